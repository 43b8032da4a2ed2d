#include "bamc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bamc/chain.hpp"
#include "bamc/common.hpp"
#include "bamc/graph.hpp"
#include "bamc/optimizer.hpp"
#include "bamc/prior.hpp"

namespace bamc {

namespace fs = std::filesystem;

void PipelineConfig::validate() const {
    if (!(sigma_sq > 0.0)) throw ConfigError("config: sigma_sq must be positive");
    if (!(sigma_b > 0.0)) throw ConfigError("config: sigma_b must be positive");
    if (!(sigma_s > 0.0)) throw ConfigError("config: sigma_s must be positive");
    if (!(sigma_clr > 0.0)) throw ConfigError("config: sigma_clr must be positive");
    if (!(compactness > 0.0)) throw ConfigError("config: compactness must be positive");
    if (slic_iters < 1) throw ConfigError("config: slic_iters must be positive");
    if (mu < 0.0) throw ConfigError("config: mu must be non-negative");
    if (scales.empty()) throw ConfigError("config: scales must be nonempty");
    for (int s : scales)
        if (s < 4) throw ConfigError("config: every scale must be at least 4");
}

PipelineConfig parse_config(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");

    PipelineConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "sigma_sq")
                cfg.sigma_sq = value.get<double>();
            else if (key == "scales")
                cfg.scales = value.get<std::vector<int>>();
            else if (key == "sigma_b")
                cfg.sigma_b = value.get<double>();
            else if (key == "sigma_s")
                cfg.sigma_s = value.get<double>();
            else if (key == "compactness")
                cfg.compactness = value.get<double>();
            else if (key == "slic_iters")
                cfg.slic_iters = value.get<int>();
            else if (key == "mu")
                cfg.mu = value.get<double>();
            else if (key == "sigma_clr")
                cfg.sigma_clr = value.get<double>();
            else
                throw ConfigError("config: unknown key \"" + key + "\"");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad value type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text);
}

namespace {

void dump_prior_csv(const Eigen::VectorXd& bc, const Eigen::VectorXd& f, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "index,bc,f\n";
    char buf[96];
    for (int i = 0; i < bc.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", i, bc[i], f[i]);
        out << buf;
    }
}

void dump_labels_png(const SuperpixelSegmentation& seg, const std::string& path) {
    std::vector<std::uint16_t> labels16(seg.labels.size());
    for (std::size_t i = 0; i < seg.labels.size(); ++i)
        labels16[i] = static_cast<std::uint16_t>(std::min(seg.labels[i], 65535));
    save_png16(labels16, seg.width, seg.height, path);
}

std::vector<int> boundary_set(const SuperpixelSegmentation& seg) {
    std::vector<int> out;
    for (int i = 0; i < seg.count; ++i)
        if (seg.features[i].is_boundary) out.push_back(i);
    return out;
}

}  // namespace

ScaleResult detect_scale(const LabImage& lab, int target_count, const PipelineConfig& cfg,
                         const std::string& debug_dir) {
    ScaleResult result;
    result.seg = slic_segment(lab, target_count, cfg.compactness, cfg.slic_iters);
    const SuperpixelSegmentation& seg = result.seg;

    std::string scale_dir;
    if (!debug_dir.empty()) {
        scale_dir = (fs::path(debug_dir) / ("scale_" + std::to_string(target_count))).string();
        fs::create_directories(scale_dir);
        dump_labels_png(seg, scale_dir + "/labels.png");
    }

    // Boundary-absorbing chain: absorbed time grows away from the borders.
    const AbsorbingGraph boundary_graph = build_graph(seg, boundary_set(seg), cfg.sigma_sq);
    const PossibilityVector zf =
        normalize(absorbed_time(partition(boundary_graph).first), PossibilityKind::foreground);
    if (!scale_dir.empty()) {
        write_matrix_market(boundary_graph.affinity, scale_dir + "/g1_A.mtx");
        write_matrix_market(boundary_graph.transition, scale_dir + "/g1_P.mtx");
    }

    const Eigen::VectorXd bc = boundary_connectivity(seg, cfg.sigma_clr);
    const Eigen::VectorXd f = foreground_prior_scores(seg, bc, cfg.sigma_b, cfg.sigma_s);
    if (!scale_dir.empty()) dump_prior_csv(bc, f, scale_dir + "/prior.csv");

    std::vector<int> prior_nodes;
    try {
        prior_nodes = select_prior_nodes(f);
    } catch (const DegeneratePrior&) {
        // No usable prior: the foreground possibility stands alone.
        result.saliency = zf.values;
        result.prior_fallback = true;
        return result;
    }

    // Prior-absorbing chain: absorbed time grows away from the likely object.
    const AbsorbingGraph prior_graph = build_graph(seg, prior_nodes, cfg.sigma_sq);
    const PossibilityVector zb =
        normalize(absorbed_time(partition(prior_graph).first), PossibilityKind::background);
    if (!scale_dir.empty()) {
        write_matrix_market(prior_graph.affinity, scale_dir + "/g2_A.mtx");
        write_matrix_market(prior_graph.transition, scale_dir + "/g2_P.mtx");
    }

    std::vector<WeightedEdge> smooth;
    for (const auto& [i, j] : transient_edges(seg)) {
        const double w = edge_weight(seg.features[i].mean_lab, seg.features[j].mean_lab, cfg.sigma_sq);
        smooth.push_back({i, j, w + cfg.mu});
    }
    result.saliency = optimize(zb.values, zf.values, smooth);
    return result;
}

SaliencyMap fuse_scales(const std::vector<ScaleResult>& per_scale, int width, int height) {
    if (per_scale.empty()) throw InvalidInput("fuse_scales: no scale results");
    SaliencyMap map;
    map.width = width;
    map.height = height;
    map.values.assign(static_cast<std::size_t>(width) * height, 0.0);

    for (const auto& scale : per_scale) {
        if (scale.seg.width != width || scale.seg.height != height)
            throw InvalidInput("fuse_scales: segmentation dimensions differ from output");
        for (std::size_t p = 0; p < map.values.size(); ++p)
            map.values[p] += scale.saliency[scale.seg.labels[p]];
    }

    const auto [lo_it, hi_it] = std::minmax_element(map.values.begin(), map.values.end());
    const double lo = *lo_it, hi = *hi_it;
    if (hi - lo < 1e-12) {
        std::fill(map.values.begin(), map.values.end(), 0.5);
    } else {
        const double inv = 1.0 / (hi - lo);
        for (double& v : map.values) v = (v - lo) * inv;
    }
    return map;
}

SaliencyMap detect(const Rgb8Image& image, const PipelineConfig& cfg, const std::string& debug_dir) {
    cfg.validate();
    const LabImage lab = rgb_to_lab(image);
    std::vector<ScaleResult> per_scale;
    per_scale.reserve(cfg.scales.size());
    for (int scale : cfg.scales) per_scale.push_back(detect_scale(lab, scale, cfg, debug_dir));
    return fuse_scales(per_scale, image.width, image.height);
}

GrayImage8 quantize_map(const SaliencyMap& map) {
    GrayImage8 out;
    out.width = map.width;
    out.height = map.height;
    out.data.resize(map.values.size());
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        const double v = std::clamp(map.values[i], 0.0, 1.0);
        out.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    return out;
}

}  // namespace bamc
