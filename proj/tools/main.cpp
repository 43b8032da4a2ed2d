#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "bamc/common.hpp"
#include "bamc/evaluation.hpp"
#include "bamc/image.hpp"
#include "bamc/pipeline.hpp"
#include "bamc/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

// Exit codes: 0 success, 1 decode/runtime failure, 2 config or usage error,
// 3 evaluation found no matched pairs, 4 selftest quality threshold missed.
constexpr int kExitOk = 0;
constexpr int kExitDecode = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNoPairs = 3;
constexpr int kExitThreshold = 4;

int thread_cap() {
    const char* env = std::getenv("BAMC_THREADS");
    if (env == nullptr || *env == '\0') return std::numeric_limits<int>::max();
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > std::numeric_limits<int>::max())
        throw bamc::ConfigError("BAMC_THREADS must be a positive integer");
    return static_cast<int>(v);
}

bamc::PipelineConfig load_config_opt(const std::string& path) {
    if (path.empty()) return bamc::PipelineConfig{};
    return bamc::load_config(path);
}

std::string lower_ext(const fs::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e;
}

std::vector<fs::path> list_images(const std::string& dir) {
    if (!fs::is_directory(dir)) throw bamc::ConfigError("not a directory: " + dir);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string ext = lower_ext(entry.path());
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

// Processes every image in `files`; failures are captured per file so one bad
// input never takes the batch down. Outputs are independent, so workers share
// nothing but the index counter.
int run_batch(const std::vector<fs::path>& files, const std::string& output_dir, int jobs,
              const bamc::PipelineConfig& cfg, bool quiet) {
    fs::create_directories(output_dir);
    std::vector<std::string> failures(files.size());

    const int workers = std::clamp(jobs, 1, std::max<int>(1, static_cast<int>(files.size())));
    std::atomic<std::size_t> next{0};
    const auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= files.size()) return;
            try {
                const bamc::Rgb8Image image = bamc::load_rgb8(files[i].string());
                const bamc::SaliencyMap map = bamc::detect(image, cfg);
                const fs::path out = fs::path(output_dir) / (files[i].stem().string() + ".png");
                bamc::save_png(bamc::quantize_map(map), out.string());
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int t = 0; t < workers; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    int failed = 0;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (failures[i].empty()) {
            if (!quiet) std::printf("ok   %s\n", files[i].filename().string().c_str());
        } else {
            ++failed;
            std::fprintf(stderr, "fail %s: %s\n", files[i].filename().string().c_str(),
                         failures[i].c_str());
        }
    }
    if (failed > 0) {
        std::fprintf(stderr, "%d of %zu images failed\n", failed, files.size());
        return kExitDecode;
    }
    return kExitOk;
}

int cmd_detect(const std::string& input, const std::string& output, const std::string& config,
               const std::string& debug_dir) {
    const bamc::PipelineConfig cfg = load_config_opt(config);
    const bamc::Rgb8Image image = bamc::load_rgb8(input);
    if (!debug_dir.empty()) fs::create_directories(debug_dir);
    const bamc::SaliencyMap map = bamc::detect(image, cfg, debug_dir);
    bamc::save_png(bamc::quantize_map(map), output);
    return kExitOk;
}

int cmd_batch(const std::string& input_dir, const std::string& output_dir, int jobs,
              const std::string& config) {
    const bamc::PipelineConfig cfg = load_config_opt(config);
    const int effective_jobs = std::min(jobs, thread_cap());
    return run_batch(list_images(input_dir), output_dir, effective_jobs, cfg, /*quiet=*/false);
}

int cmd_synth(const bamc::SynthSpec& spec, const std::string& out_dir) {
    bamc::generate(spec, out_dir);
    std::printf("wrote %d image/mask pairs under %s\n", spec.count, out_dir.c_str());
    return kExitOk;
}

int cmd_eval(const std::string& map_dir, const std::string& gt_dir, const std::string& out_csv,
             const std::string& per_image_dir) {
    if (!fs::is_directory(map_dir)) throw bamc::ConfigError("not a directory: " + map_dir);
    if (!fs::is_directory(gt_dir)) throw bamc::ConfigError("not a directory: " + gt_dir);

    bamc::DatasetEval eval;
    try {
        eval = bamc::evaluate_dataset(map_dir, gt_dir);
    } catch (const bamc::InvalidInput& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitNoPairs;
    }

    if (const fs::path parent = fs::path(out_csv).parent_path(); !parent.empty())
        fs::create_directories(parent);
    bamc::write_curve_csv(eval.aggregate, out_csv);
    const fs::path summary = fs::path(out_csv).replace_extension(".summary.json");
    bamc::write_summary_json(eval, summary.string());

    if (!per_image_dir.empty()) {
        fs::create_directories(per_image_dir);
        for (const auto& [stem, curve] : eval.per_image)
            bamc::write_curve_csv(curve, (fs::path(per_image_dir) / (stem + ".csv")).string());
    }

    for (const std::string& s : eval.skipped)
        std::fprintf(stderr, "skipped %s\n", s.c_str());
    std::printf("%zu image(s): max-F %.6f at threshold %d, mean-F %.6f, mean best-F %.6f\n",
                eval.per_image.size(), eval.aggregate.max_f, eval.aggregate.threshold_at_max_f,
                eval.aggregate.mean_f, eval.mean_best_f);
    return kExitOk;
}

int cmd_selftest(bool adversarial, int jobs, std::string work_dir) {
    if (work_dir.empty())
        work_dir = (fs::temp_directory_path() / ("bamc-selftest-" + std::to_string(getpid()))).string();
    fs::create_directories(work_dir);

    bamc::SynthSpec spec;  // seed 42, 100 images, 400x300, rectangle/ellipse mix, contrast 0.25
    spec.adversarial = adversarial;
    const std::string corpus = work_dir + "/corpus";
    std::printf("selftest: generating %d synthetic images under %s\n", spec.count, corpus.c_str());
    bamc::generate(spec, corpus);

    const int effective_jobs = std::min(jobs, thread_cap());
    std::printf("selftest: computing saliency maps (%d worker%s)\n", effective_jobs,
                effective_jobs == 1 ? "" : "s");
    const std::string maps = work_dir + "/maps";
    const int batch_rc = run_batch(list_images(corpus + "/images"), maps, effective_jobs,
                                   bamc::PipelineConfig{}, /*quiet=*/true);
    if (batch_rc != kExitOk) return batch_rc;

    const bamc::DatasetEval eval = bamc::evaluate_dataset(maps, corpus + "/masks");
    bamc::write_curve_csv(eval.aggregate, work_dir + "/curve.csv");
    bamc::write_summary_json(eval, work_dir + "/curve.summary.json");

    std::printf("dataset max-F = %.6f (threshold %d)\n", eval.aggregate.max_f,
                eval.aggregate.threshold_at_max_f);
    std::printf("mean per-image best-F = %.6f\n", eval.mean_best_f);

    if (adversarial) {
        std::printf("warning: adversarial corpus (object color is close to the surround); "
                    "degraded scores are expected\n");
        return kExitOk;
    }
    if (eval.aggregate.max_f >= 0.85) {
        std::printf("selftest passed (max-F >= 0.85)\n");
        return kExitOk;
    }
    std::fprintf(stderr, "selftest FAILED: max-F %.6f < 0.85\n", eval.aggregate.max_f);
    return kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Salient-object detection via bidirectional absorbing Markov chains"};
    app.require_subcommand(1);

    std::string in_path, out_path, config_path, debug_dir;
    auto* detect = app.add_subcommand("detect", "Compute a saliency map for one image");
    detect->add_option("--input", in_path, "Input image (PNG or JPEG)")->required();
    detect->add_option("--output", out_path, "Output grayscale PNG")->required();
    detect->add_option("--config", config_path, "JSON config file");
    detect->add_option("--dump-debug", debug_dir, "Directory for per-scale debug dumps");

    std::string batch_in, batch_out, batch_config;
    int batch_jobs = 1;
    auto* batch = app.add_subcommand("batch", "Process every image in a directory");
    batch->add_option("--input-dir", batch_in, "Directory of PNG/JPEG images")->required();
    batch->add_option("--output-dir", batch_out, "Directory for saliency PNGs")->required();
    batch->add_option("--jobs", batch_jobs, "Worker threads (capped by BAMC_THREADS)")
        ->check(CLI::PositiveNumber);
    batch->add_option("--config", batch_config, "JSON config file");

    bamc::SynthSpec spec;
    std::string synth_out, synth_kind = "mix";
    auto* synth = app.add_subcommand("synth", "Generate a synthetic image/mask corpus");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--seed", spec.seed, "PRNG seed");
    synth->add_option("--count", spec.count, "Number of images")->check(CLI::PositiveNumber);
    synth->add_option("--width", spec.width, "Image width")->check(CLI::PositiveNumber);
    synth->add_option("--height", spec.height, "Image height")->check(CLI::PositiveNumber);
    synth->add_option("--kind", synth_kind, "Object kind: rectangle, ellipse, two-objects, mix");
    synth->add_option("--contrast", spec.contrast, "Minimum object/background distance in normalized Lab");
    synth->add_flag("--adversarial", spec.adversarial, "Object color close to the surround");

    std::string eval_maps, eval_gt, eval_out, eval_per_image;
    auto* eval = app.add_subcommand("eval", "Score saliency maps against binary masks");
    eval->add_option("--maps", eval_maps, "Directory of saliency maps")->required();
    eval->add_option("--gt", eval_gt, "Directory of ground-truth masks")->required();
    eval->add_option("--out", eval_out, "Aggregate curve CSV (summary JSON goes next to it)")
        ->required();
    eval->add_option("--per-image", eval_per_image, "Also write one CSV per image here");

    bool st_adversarial = false;
    int st_jobs = 1;
    std::string st_work_dir;
    auto* selftest = app.add_subcommand("selftest", "Synthesize, detect, and score a fixed corpus");
    selftest->add_flag("--adversarial", st_adversarial, "Run the expected-failure corpus");
    selftest->add_option("--jobs", st_jobs, "Worker threads (capped by BAMC_THREADS)")
        ->check(CLI::PositiveNumber);
    selftest->add_option("--work-dir", st_work_dir, "Working directory (default: under the temp dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    }

    try {
        if (detect->parsed()) return cmd_detect(in_path, out_path, config_path, debug_dir);
        if (batch->parsed()) return cmd_batch(batch_in, batch_out, batch_jobs, batch_config);
        if (synth->parsed()) {
            spec.kind = bamc::object_kind_from_string(synth_kind);
            return cmd_synth(spec, synth_out);
        }
        if (eval->parsed()) return cmd_eval(eval_maps, eval_gt, eval_out, eval_per_image);
        if (selftest->parsed()) return cmd_selftest(st_adversarial, st_jobs, st_work_dir);
    } catch (const bamc::DecodeError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitDecode;
    } catch (const bamc::ConfigError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const bamc::InvalidInput& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitDecode;
    }
    return kExitConfig;
}
