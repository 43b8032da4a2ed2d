#include "bamc/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bamc/common.hpp"
#include "bamc/image.hpp"
#include "bamc/rng.hpp"

namespace bamc {

namespace fs = std::filesystem;

ObjectKind object_kind_from_string(const std::string& s) {
    if (s == "rectangle") return ObjectKind::rectangle;
    if (s == "ellipse") return ObjectKind::ellipse;
    if (s == "two-objects") return ObjectKind::two_objects;
    if (s == "mix") return ObjectKind::mix;
    throw InvalidInput("synth: unknown object kind \"" + s + "\"");
}

std::string to_string(ObjectKind kind) {
    switch (kind) {
        case ObjectKind::rectangle: return "rectangle";
        case ObjectKind::ellipse: return "ellipse";
        case ObjectKind::two_objects: return "two-objects";
        case ObjectKind::mix: return "mix";
    }
    throw InternalError("synth: unhandled object kind");
}

namespace {

struct Color {
    std::array<double, 3> lab;      // what the pipeline actually sees, post-quantization
    std::array<std::uint8_t, 3> rgb;
};

double lab_distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double dl = a[0] - b[0], da = a[1] - b[1], db = a[2] - b[2];
    return std::sqrt(dl * dl + da * da + db * db);
}

// Sample in Lab, convert, then measure distances on the quantized color so the
// contrast constraint holds for the pixels as written, not the pre-round ideal.
Color sample_color(Rng& rng) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const std::array<double, 3> lab = {rng.uniform(0.15, 0.90), rng.uniform(0.25, 0.75),
                                           rng.uniform(0.25, 0.75)};
        std::array<std::uint8_t, 3> rgb;
        if (!lab_to_rgb(lab, rgb)) continue;
        return {rgb_to_lab(rgb[0], rgb[1], rgb[2]), rgb};
    }
    throw InternalError("synth: color sampling failed to hit the sRGB gamut");
}

Color sample_contrasting(Rng& rng, const Color& bg, double min_contrast) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const Color c = sample_color(rng);
        if (lab_distance(c.lab, bg.lab) >= min_contrast) return c;
    }
    throw InvalidInput("synth: contrast constraint unattainable");
}

Color sample_near(Rng& rng, const Color& bg) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        const double target = rng.uniform(0.02, 0.05);
        std::array<double, 3> dir = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                     rng.uniform(-1.0, 1.0)};
        const double norm = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
        if (norm < 1e-6) continue;
        std::array<double, 3> lab;
        bool inside = true;
        for (int k = 0; k < 3; ++k) {
            lab[k] = bg.lab[k] + dir[k] / norm * target;
            if (lab[k] < 0.0 || lab[k] > 1.0) inside = false;
        }
        if (!inside) continue;
        std::array<std::uint8_t, 3> rgb;
        if (!lab_to_rgb(lab, rgb)) continue;
        const Color c = {rgb_to_lab(rgb[0], rgb[1], rgb[2]), rgb};
        const double d = lab_distance(c.lab, bg.lab);
        if (d >= 0.005 && d <= 0.06) return c;
    }
    throw InternalError("synth: near-background color sampling failed");
}

struct Box {
    int x0 = 0, y0 = 0, w = 0, h = 0;  // pixel bounds, half-open
};

// Object bounding box inside [x_lo, x_hi) x [y_lo, y_hi), sized for roughly
// `fraction` of the whole image.
Box place_box(Rng& rng, int img_w, int img_h, int x_lo, int x_hi, int y_lo, int y_hi,
              double fraction) {
    const int avail_w = x_hi - x_lo;
    const int avail_h = y_hi - y_lo;
    if (avail_w < 8 || avail_h < 8)
        throw InvalidInput("synth: image too small to place an object clear of the border band");
    const double area = fraction * img_w * img_h;
    const double aspect = std::exp(rng.uniform(std::log(0.5), std::log(2.0)));
    Box box;
    box.w = std::clamp(static_cast<int>(std::lround(std::sqrt(area * aspect))), 8, avail_w);
    box.h = std::clamp(static_cast<int>(std::lround(std::sqrt(area / aspect))), 8, avail_h);
    box.x0 = x_lo + rng.uniform_int(0, avail_w - box.w);
    box.y0 = y_lo + rng.uniform_int(0, avail_h - box.h);
    return box;
}

void draw_rectangle(GrayImage8& mask, const Box& box) {
    for (int r = box.y0; r < box.y0 + box.h; ++r)
        for (int c = box.x0; c < box.x0 + box.w; ++c) mask.at(r, c) = 255;
}

void draw_ellipse(GrayImage8& mask, const Box& box) {
    const double cx = box.x0 + box.w / 2.0;
    const double cy = box.y0 + box.h / 2.0;
    const double rx = box.w / 2.0;
    const double ry = box.h / 2.0;
    for (int r = box.y0; r < box.y0 + box.h; ++r) {
        for (int c = box.x0; c < box.x0 + box.w; ++c) {
            const double dx = (c + 0.5 - cx) / rx;
            const double dy = (r + 0.5 - cy) / ry;
            if (dx * dx + dy * dy <= 1.0) mask.at(r, c) = 255;
        }
    }
}

void draw_shape(GrayImage8& mask, const Box& box, bool ellipse) {
    if (ellipse)
        draw_ellipse(mask, box);
    else
        draw_rectangle(mask, box);
}

}  // namespace

void generate(const SynthSpec& spec, const std::string& out_dir) {
    if (spec.count < 1) throw InvalidInput("synth: count must be positive");
    if (spec.width < 1 || spec.height < 1) throw InvalidInput("synth: dimensions must be positive");
    if (spec.contrast < 0.0 || spec.contrast > 1.0)
        throw InvalidInput("synth: contrast must lie in [0,1]");

    const int margin_x = static_cast<int>(std::ceil(0.10 * spec.width));
    const int margin_y = static_cast<int>(std::ceil(0.10 * spec.height));
    const int x_lo = margin_x, x_hi = spec.width - margin_x;
    const int y_lo = margin_y, y_hi = spec.height - margin_y;
    if (x_hi - x_lo < 8 || y_hi - y_lo < 8)
        throw InvalidInput("synth: image too small to place an object clear of the border band");

    const fs::path root(out_dir);
    fs::create_directories(root / "images");
    fs::create_directories(root / "masks");

    for (int index = 0; index < spec.count; ++index) {
        // Two decorrelated streams per image, both derived from (seed, index).
        // Layout must not shift when only the color mode changes, so color
        // rejection sampling gets its own stream.
        std::uint64_t state = spec.seed + static_cast<std::uint64_t>(index);
        Rng layout_rng(splitmix64(state));
        Rng color_rng(splitmix64(state));

        const Color bg = sample_color(color_rng);
        const Color obj = spec.adversarial ? sample_near(color_rng, bg)
                                           : sample_contrasting(color_rng, bg, spec.contrast);

        ObjectKind kind = spec.kind;
        if (kind == ObjectKind::mix)
            kind = layout_rng.coin() ? ObjectKind::rectangle : ObjectKind::ellipse;

        GrayImage8 mask;
        mask.width = spec.width;
        mask.height = spec.height;
        mask.data.assign(static_cast<std::size_t>(spec.width) * spec.height, 0);

        if (kind == ObjectKind::two_objects) {
            // One object per interior half keeps the pair disjoint by construction.
            const int x_mid = (x_lo + x_hi) / 2;
            const Box left =
                place_box(layout_rng, spec.width, spec.height, x_lo, x_mid - 1, y_lo, y_hi,
                          layout_rng.uniform(0.03, 0.08));
            const Box right =
                place_box(layout_rng, spec.width, spec.height, x_mid + 1, x_hi, y_lo, y_hi,
                          layout_rng.uniform(0.03, 0.08));
            draw_shape(mask, left, layout_rng.coin());
            draw_shape(mask, right, layout_rng.coin());
        } else {
            const Box box = place_box(layout_rng, spec.width, spec.height, x_lo, x_hi, y_lo, y_hi,
                                      layout_rng.uniform(0.05, 0.20));
            draw_shape(mask, box, kind == ObjectKind::ellipse);
        }

        Rgb8Image image;
        image.width = spec.width;
        image.height = spec.height;
        image.data.resize(mask.data.size() * 3);
        for (std::size_t p = 0; p < mask.data.size(); ++p) {
            const auto& base = mask.data[p] ? obj.rgb : bg.rgb;
            for (int ch = 0; ch < 3; ++ch) {
                const int v = static_cast<int>(base[ch]) + color_rng.uniform_int(-2, 2);
                image.data[3 * p + ch] = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
            }
        }

        char name[32];
        std::snprintf(name, sizeof(name), "%03d.png", index);
        save_png(image, (root / "images" / name).string());
        save_png(mask, (root / "masks" / name).string());
    }

    nlohmann::json j;
    j["seed"] = spec.seed;
    j["count"] = spec.count;
    j["width"] = spec.width;
    j["height"] = spec.height;
    j["kind"] = to_string(spec.kind);
    j["contrast"] = spec.contrast;
    j["adversarial"] = spec.adversarial;
    std::ofstream out(root / "spec.json", std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + (root / "spec.json").string());
    out << j.dump(2) << "\n";
    if (!out) throw Error("write failed: " + (root / "spec.json").string());
}

}  // namespace bamc
