// cofflow: dense Farneback flow and Combined Optical Flow feature images.

#include <cstdio>
#include <iostream>
#include <regex>

#include "CLI11.hpp"
#include "cofflow/pipeline.hpp"

namespace {

using namespace cofflow;
namespace pl = cofflow::pipeline;

void add_flow_options(CLI::App* cmd, FlowParams& p) {
    cmd->add_option("--pyr-scale", p.pyramid_scale, "Pyramid downscale ratio in (0,1)")->capture_default_str();
    cmd->add_option("--levels", p.levels, "Pyramid levels")->capture_default_str();
    cmd->add_option("--winsize", p.window_size, "Averaging window (odd)")->capture_default_str();
    cmd->add_option("--iters", p.iterations, "Iterations per level")->capture_default_str();
    cmd->add_option("--poly-n", p.poly_n, "Expansion neighborhood (odd)")->capture_default_str();
    cmd->add_option("--poly-sigma", p.poly_sigma, "Applicability Gaussian sigma")->capture_default_str();
}

Size parse_size(const std::string& text) {
    static const std::regex re(R"((\d+)[xX](\d+))");
    std::smatch m;
    if (!std::regex_match(text, m, re)) throw InvalidArgument("size must look like WxH, got '" + text + "'");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

// Runs a stage, turning library errors into a tagged message and exit code 1.
template <typename F>
int guarded(const char* stage, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        std::cerr << "[" << stage << "] error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Combined Optical Flow feature extraction for micro-expression keyframes"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    pl::FlowConfig flow_cfg;
    std::string viz_path;
    bool flow_colormap = false;
    auto* flow = app.add_subcommand("flow", "Dense flow between two frames, written as Middlebury .flo");
    flow->add_option("frame1", flow_cfg.frame1, "First frame (PGM/PNG)")->required();
    flow->add_option("frame2", flow_cfg.frame2, "Second frame (PGM/PNG)")->required();
    flow->add_option("-o,--output", flow_cfg.output, "Output .flo")->required();
    flow->add_option("--viz", viz_path, "Also write a magnitude PNG");
    flow->add_flag("--colormap", flow_colormap, "Render --viz with viridis instead of gray");
    add_flow_options(flow, flow_cfg.params);

    pl::CofConfig cof_cfg;
    bool cof_colormap = false;
    auto* cof = app.add_subcommand("cof", "COF image per manifest sample (and augmentation)");
    cof->add_option("--manifest", cof_cfg.manifest, "Manifest CSV")->required();
    cof->add_option("--out", cof_cfg.out_dir, "Output directory")->required();
    cof->add_flag("--augment", cof_cfg.augment, "Apply the six-way augmentation (training manifests)");
    cof->add_flag("--colormap", cof_colormap, "Render with viridis instead of gray replication");
    cof->add_option("--workers", cof_cfg.workers, "Worker threads (COFFLOW_WORKERS overrides)");
    add_flow_options(cof, cof_cfg.params);

    pl::AugmentConfig aug_cfg;
    auto* augment = app.add_subcommand("augment", "Write augmented frame triplets and their manifest");
    augment->add_option("--manifest", aug_cfg.manifest, "Manifest CSV")->required();
    augment->add_option("-o,--out", aug_cfg.out_dir, "Output directory")->required();

    pl::SplitConfig split_cfg;
    bool no_stratify = false;
    auto* split = app.add_subcommand("split", "Seeded stratified train/test split");
    split->add_option("--manifest", split_cfg.manifest, "Manifest CSV")->required();
    split->add_option("--frac", split_cfg.spec.train_fraction, "Train fraction")->capture_default_str();
    split->add_option("--seed", split_cfg.spec.seed, "PRNG seed")->capture_default_str();
    split->add_option("--min-count", split_cfg.min_count, "Drop classes with fewer samples")->capture_default_str();
    split->add_flag("--no-stratify", no_stratify, "Plain random split");
    split->add_option("-o,--out", split_cfg.out_dir, "Output directory")->required();

    pl::EvalConfig eval_cfg;
    auto* eval = app.add_subcommand("eval", "Nearest-centroid evaluation of COF directories");
    eval->add_option("--train", eval_cfg.train_dir, "Training COF directory")->required();
    eval->add_option("--test", eval_cfg.test_dir, "Test COF directory")->required();
    eval->add_option("-o,--output", eval_cfg.report, "Report CSV")->required();

    pl::VisualizeConfig viz_cfg;
    bool viz_colormap = false;
    auto* visualize = app.add_subcommand("visualize", "Render a .flo magnitude as PNG");
    visualize->add_option("input", viz_cfg.input, "Input .flo")->required();
    visualize->add_option("-o,--output", viz_cfg.output, "Output PNG")->required();
    visualize->add_flag("--colormap", viz_colormap, "Viridis instead of gray");

    pl::BenchConfig bench_cfg;
    std::string bench_size = "128x128";
    auto* bench = app.add_subcommand("bench", "Time single-phase flow against full COF");
    bench->add_option("--size", bench_size, "Frame size WxH")->capture_default_str();
    bench->add_option("--reps", bench_cfg.reps, "Repetitions (best is reported)")->capture_default_str();
    add_flow_options(bench, bench_cfg.params);

    CLI11_PARSE(app, argc, argv);

    if (*flow) {
        return guarded("flow", [&] {
            if (!viz_path.empty()) flow_cfg.viz = viz_path;
            flow_cfg.viz_mode = flow_colormap ? RenderMode::Viridis : RenderMode::Gray;
            return pl::run_flow(flow_cfg, std::cout);
        });
    }
    if (*cof) {
        return guarded("cof", [&] {
            cof_cfg.mode = cof_colormap ? RenderMode::Viridis : RenderMode::Gray;
            return pl::run_cof(cof_cfg, std::cout).exit_code();
        });
    }
    if (*augment) return guarded("augment", [&] { return pl::run_augment(aug_cfg, std::cout); });
    if (*split) {
        return guarded("split", [&] {
            split_cfg.spec.stratified = !no_stratify;
            return pl::run_split(split_cfg, std::cout);
        });
    }
    if (*eval) {
        return guarded("eval", [&] {
            pl::run_eval(eval_cfg, std::cout);
            return 0;
        });
    }
    if (*visualize) {
        return guarded("visualize", [&] {
            viz_cfg.mode = viz_colormap ? RenderMode::Viridis : RenderMode::Gray;
            return pl::run_visualize(viz_cfg, std::cout);
        });
    }
    if (*bench) {
        return guarded("bench", [&] {
            bench_cfg.size = parse_size(bench_size);
            pl::print_bench(pl::run_bench(bench_cfg), std::cout);
            return 0;
        });
    }
    return 1;
}
