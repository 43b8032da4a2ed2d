#include "bamc/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "bamc/common.hpp"

namespace bamc {

namespace {

// sRGB linearization matrix (D65). The white point is taken as the row sums
// so neutral grays land exactly on a* = b* = 0 and white on L* = 100.
constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};
constexpr double kWhite[3] = {
    kM[0][0] + kM[0][1] + kM[0][2],
    kM[1][0] + kM[1][1] + kM[1][2],
    kM[2][0] + kM[2][1] + kM[2][2],
};

const double* srgb_linear_table() {
    static const auto table = [] {
        static double t[256];
        for (int i = 0; i < 256; ++i) {
            const double v = i / 255.0;
            t[i] = v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table;
}

constexpr double kDelta = 6.0 / 29.0;

double lab_f(double t) {
    return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0;
}

double lab_f_inv(double ft) {
    return ft > kDelta ? ft * ft * ft : 3.0 * kDelta * kDelta * (ft - 4.0 / 29.0);
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

std::array<double, 3> lab_from_linear(double lr, double lg, double lb) {
    const double x = kM[0][0] * lr + kM[0][1] * lg + kM[0][2] * lb;
    const double y = kM[1][0] * lr + kM[1][1] * lg + kM[1][2] * lb;
    const double z = kM[2][0] * lr + kM[2][1] * lg + kM[2][2] * lb;
    const double fx = lab_f(x / kWhite[0]);
    const double fy = lab_f(y / kWhite[1]);
    const double fz = lab_f(z / kWhite[2]);
    const double L = 116.0 * fy - 16.0;
    const double a = 500.0 * (fx - fy);
    const double b = 200.0 * (fy - fz);
    return {clamp01(L / 100.0), clamp01((a + 128.0) / 255.0), clamp01((b + 128.0) / 255.0)};
}

double srgb_delinearize(double v) {
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

void write_bytes(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + path);
}

void encode_png(const cv::Mat& mat, const std::string& path) {
    std::vector<std::uint8_t> bytes;
    if (!cv::imencode(".png", mat, bytes)) throw Error("PNG encode failed: " + path);
    write_bytes(bytes, path);
}

}  // namespace

LabImage rgb_to_lab(const Rgb8Image& image) {
    if (image.width <= 0 || image.height <= 0)
        throw InvalidInput("rgb_to_lab: zero-dimension image");
    if (image.data.size() != static_cast<std::size_t>(3 * image.width * image.height))
        throw InvalidInput("rgb_to_lab: pixel buffer size does not match dimensions");

    const double* lin = srgb_linear_table();
    LabImage out;
    out.width = image.width;
    out.height = image.height;
    out.data.resize(image.data.size());
    const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
    for (std::size_t p = 0; p < n; ++p) {
        const std::uint8_t* px = image.data.data() + 3 * p;
        const auto lab = lab_from_linear(lin[px[0]], lin[px[1]], lin[px[2]]);
        double* o = out.data.data() + 3 * p;
        o[0] = lab[0];
        o[1] = lab[1];
        o[2] = lab[2];
    }
    return out;
}

std::array<double, 3> rgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double* lin = srgb_linear_table();
    return lab_from_linear(lin[r], lin[g], lin[b]);
}

bool lab_to_rgb(const std::array<double, 3>& lab_norm, std::array<std::uint8_t, 3>& out) {
    const double L = lab_norm[0] * 100.0;
    const double a = lab_norm[1] * 255.0 - 128.0;
    const double b = lab_norm[2] * 255.0 - 128.0;
    const double fy = (L + 16.0) / 116.0;
    const double fx = fy + a / 500.0;
    const double fz = fy - b / 200.0;
    const double xyz[3] = {lab_f_inv(fx) * kWhite[0], lab_f_inv(fy) * kWhite[1], lab_f_inv(fz) * kWhite[2]};

    // Inverse of kM via the adjugate; computed once.
    static const auto inv = [] {
        std::array<std::array<double, 3>, 3> m{};
        const double det = kM[0][0] * (kM[1][1] * kM[2][2] - kM[1][2] * kM[2][1]) -
                           kM[0][1] * (kM[1][0] * kM[2][2] - kM[1][2] * kM[2][0]) +
                           kM[0][2] * (kM[1][0] * kM[2][1] - kM[1][1] * kM[2][0]);
        m[0][0] = (kM[1][1] * kM[2][2] - kM[1][2] * kM[2][1]) / det;
        m[0][1] = (kM[0][2] * kM[2][1] - kM[0][1] * kM[2][2]) / det;
        m[0][2] = (kM[0][1] * kM[1][2] - kM[0][2] * kM[1][1]) / det;
        m[1][0] = (kM[1][2] * kM[2][0] - kM[1][0] * kM[2][2]) / det;
        m[1][1] = (kM[0][0] * kM[2][2] - kM[0][2] * kM[2][0]) / det;
        m[1][2] = (kM[0][2] * kM[1][0] - kM[0][0] * kM[1][2]) / det;
        m[2][0] = (kM[1][0] * kM[2][1] - kM[1][1] * kM[2][0]) / det;
        m[2][1] = (kM[0][1] * kM[2][0] - kM[0][0] * kM[2][1]) / det;
        m[2][2] = (kM[0][0] * kM[1][1] - kM[0][1] * kM[1][0]) / det;
        return m;
    }();

    bool in_gamut = true;
    std::array<std::uint8_t, 3> rgb{};
    for (int c = 0; c < 3; ++c) {
        double linear = inv[c][0] * xyz[0] + inv[c][1] * xyz[1] + inv[c][2] * xyz[2];
        if (linear < -1e-9 || linear > 1.0 + 1e-9) in_gamut = false;
        linear = clamp01(linear);
        const double v = srgb_delinearize(linear);
        rgb[c] = static_cast<std::uint8_t>(std::lround(clamp01(v) * 255.0));
    }
    out = rgb;
    return in_gamut;
}

Rgb8Image load_rgb8(const std::string& path) {
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw DecodeError("cannot decode image: " + path);
    Rgb8Image out;
    out.width = bgr.cols;
    out.height = bgr.rows;
    out.data.resize(static_cast<std::size_t>(3) * bgr.cols * bgr.rows);
    for (int r = 0; r < bgr.rows; ++r) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < bgr.cols; ++c) {
            std::uint8_t* px = out.pixel(r, c);
            px[0] = row[c][2];
            px[1] = row[c][1];
            px[2] = row[c][0];
        }
    }
    return out;
}

GrayImage8 load_gray8(const std::string& path) {
    cv::Mat gray = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (gray.empty()) throw DecodeError("cannot decode image: " + path);
    GrayImage8 out;
    out.width = gray.cols;
    out.height = gray.rows;
    out.data.resize(static_cast<std::size_t>(gray.cols) * gray.rows);
    for (int r = 0; r < gray.rows; ++r)
        std::copy_n(gray.ptr<std::uint8_t>(r), gray.cols, out.data.data() + static_cast<std::size_t>(r) * gray.cols);
    return out;
}

void save_png(const Rgb8Image& image, const std::string& path) {
    cv::Mat bgr(image.height, image.width, CV_8UC3);
    for (int r = 0; r < image.height; ++r) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(r);
        for (int c = 0; c < image.width; ++c) {
            const std::uint8_t* px = image.pixel(r, c);
            row[c] = cv::Vec3b(px[2], px[1], px[0]);
        }
    }
    encode_png(bgr, path);
}

void save_png(const GrayImage8& image, const std::string& path) {
    const cv::Mat gray(image.height, image.width, CV_8UC1, const_cast<std::uint8_t*>(image.data.data()));
    encode_png(gray, path);
}

void save_png16(const std::vector<std::uint16_t>& data, int width, int height, const std::string& path) {
    const cv::Mat gray(height, width, CV_16UC1, const_cast<std::uint16_t*>(data.data()));
    encode_png(gray, path);
}

}  // namespace bamc
