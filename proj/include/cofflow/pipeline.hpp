#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cofflow/cof.hpp"
#include "cofflow/dataset.hpp"
#include "cofflow/eval.hpp"
#include "cofflow/flow.hpp"

// Batch stages behind the command-line front end. Each run function takes a
// fully resolved config, writes its artifacts plus a JSON run log, reports
// human-readable progress on `log`, and returns a process exit status.
namespace cofflow::pipeline {

namespace fs = std::filesystem;

/// Worker count: COFFLOW_WORKERS when set and valid, else `requested` when
/// positive, else the hardware concurrency.
int resolve_workers(int requested);

struct FlowConfig {
    fs::path frame1, frame2, output;
    std::optional<fs::path> viz;
    FlowParams params;
    RenderMode viz_mode = RenderMode::Gray;
};
int run_flow(const FlowConfig& config, std::ostream& log);

struct VisualizeConfig {
    fs::path input, output;
    RenderMode mode = RenderMode::Gray;
};
int run_visualize(const VisualizeConfig& config, std::ostream& log);

/// Normalized flow magnitude rendered as an image.
RgbImage render_flow_magnitude(const FlowField& flow, RenderMode mode);

struct CofConfig {
    fs::path manifest, out_dir;
    FlowParams params;
    bool augment = false;
    RenderMode mode = RenderMode::Gray;
    int workers = 0;  // resolved through resolve_workers
};

struct SampleOutcome {
    std::string sample_id;
    bool ok = false;
    std::string error;
    std::vector<std::string> outputs;  // file names written (png)
    double seconds = 0.0;
};

struct CofSummary {
    std::size_t samples = 0;
    std::size_t failed = 0;
    std::size_t images_written = 0;
    std::vector<SampleOutcome> outcomes;  // manifest order
    [[nodiscard]] int exit_code() const { return failed == 0 ? 0 : 1; }
};

CofSummary run_cof(const CofConfig& config, std::ostream& log);

struct AugmentConfig {
    fs::path manifest, out_dir;
};
int run_augment(const AugmentConfig& config, std::ostream& log);

struct SplitConfig {
    fs::path manifest, out_dir;
    SplitSpec spec;
    std::size_t min_count = 10;
};
int run_split(const SplitConfig& config, std::ostream& log);

struct EvalConfig {
    fs::path train_dir, test_dir, report;
};

struct EvalResult {
    ConfusionMatrix matrix;
    double accuracy = 0.0;
};
EvalResult run_eval(const EvalConfig& config, std::ostream& log);

/// Labeled 32x32 features from every `<name>.meta` + `<name>.png` pair in a
/// directory, in file-name order. Also returns the class order recorded in
/// the sidecars, if any.
std::vector<LabeledFeature> load_feature_dir(const fs::path& dir, std::vector<std::string>* class_order = nullptr);

struct BenchConfig {
    Size size{128, 128};
    int reps = 5;
    FlowParams params;
};

struct BenchResult {
    Size size;
    int reps = 0;
    double flow_seconds = 0.0;  // best single-phase flow time
    double cof_seconds = 0.0;   // best full triplet time
    [[nodiscard]] double ratio() const { return cof_seconds / flow_seconds; }
};

BenchResult run_bench(const BenchConfig& config);
void print_bench(const BenchResult& result, std::ostream& out);

}  // namespace cofflow::pipeline
