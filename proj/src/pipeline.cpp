#include "cofflow/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "cofflow/synthetic.hpp"
#include "json.hpp"

namespace cofflow::pipeline {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json params_json(const FlowParams& p) {
    return {{"pyramid_scale", p.pyramid_scale}, {"levels", p.levels},
            {"window_size", p.window_size},     {"iterations", p.iterations},
            {"poly_n", p.poly_n},               {"poly_sigma", p.poly_sigma}};
}

// Single writer for the run log. Timestamps and timings live under keys
// named *_at / *seconds so reruns differ only there.
class RunLog {
public:
    RunLog(std::string command, json config) {
        doc_["tool_version"] = std::string(kToolVersion);
        doc_["command"] = std::move(command);
        doc_["started_at"] = utc_timestamp();
        doc_["config"] = std::move(config);
        doc_["stages"] = json::array();
        doc_["samples"] = json::array();
        doc_["notes"] = json::array();
    }

    void stage(const std::string& name, double seconds) {
        std::lock_guard lock(mutex_);
        doc_["stages"].push_back({{"stage", name}, {"seconds", seconds}});
    }
    void sample(json entry) {
        std::lock_guard lock(mutex_);
        doc_["samples"].push_back(std::move(entry));
    }
    void note(const std::string& text) {
        std::lock_guard lock(mutex_);
        doc_["notes"].push_back(text);
    }
    void set(const std::string& key, json value) {
        std::lock_guard lock(mutex_);
        doc_[key] = std::move(value);
    }

    void write(const fs::path& path) {
        std::lock_guard lock(mutex_);
        doc_["finished_at"] = utc_timestamp();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot write run log '" + path.string() + "'");
        out << doc_.dump(2) << '\n';
    }

private:
    std::mutex mutex_;
    json doc_;
};

fs::path resolve_frame(const fs::path& base, const fs::path& p) {
    return p.is_absolute() ? p : (base / p).lexically_normal();
}

fs::path manifest_base(const fs::path& manifest) {
    return fs::absolute(manifest).parent_path();
}

// Relative path from `dir` to a frame referenced by a manifest in `base`.
fs::path rebase(const fs::path& frame, const fs::path& base, const fs::path& dir) {
    if (frame.is_absolute()) return frame;
    const fs::path target = (base / frame).lexically_normal();
    const fs::path rel = target.lexically_relative(fs::absolute(dir).lexically_normal());
    return rel.empty() ? target : rel;
}

Manifest rebased(const Manifest& m, const fs::path& base, const fs::path& dir) {
    std::vector<SampleTriplet> out;
    for (auto s : m.samples()) {
        s.onset_path = rebase(s.onset_path, base, dir);
        s.apex_path = rebase(s.apex_path, base, dir);
        s.offset_path = rebase(s.offset_path, base, dir);
        out.push_back(std::move(s));
    }
    return Manifest(std::move(out));
}

std::string join(const std::vector<std::string>& items, char sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? std::string(1, sep) : "") + items[i];
    return out;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Runs job(i) for i in [0, n) on `workers` threads.
template <typename Job>
void parallel_for(std::size_t n, int workers, Job job) {
    const auto count = static_cast<std::size_t>(std::max(1, workers));
    if (count == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(count, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) job(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

int resolve_workers(int requested) {
    if (const char* env = std::getenv("COFFLOW_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
    }
    if (requested > 0) return requested;
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

RgbImage render_flow_magnitude(const FlowField& flow, RenderMode mode) {
    return to_rgb(normalize(magnitude(flow)), mode).image;
}

int run_flow(const FlowConfig& config, std::ostream& log) {
    const auto start = Clock::now();
    const GrayImage f1 = load_image(config.frame1);
    const GrayImage f2 = load_image(config.frame2);
    const FlowField flow = farneback_flow(f1, f2, config.params);
    write_flo(flow, config.output);
    if (config.viz) save_image(render_flow_magnitude(flow, config.viz_mode), *config.viz);

    double max_mag = 0.0;
    for (double m : magnitude(flow).values()) max_mag = std::max(max_mag, m);
    log << "flow: " << flow.width() << "x" << flow.height() << " " << describe(config.params)
        << " max|d|=" << max_mag << " -> " << config.output.string() << " ("
        << std::fixed << std::setprecision(3) << seconds_since(start) << " s)\n";
    log.unsetf(std::ios::floatfield);
    return 0;
}

int run_visualize(const VisualizeConfig& config, std::ostream& log) {
    const FlowField flow = read_flo(config.input);
    save_image(render_flow_magnitude(flow, config.mode), config.output);
    log << "visualize: " << config.input.string() << " -> " << config.output.string() << "\n";
    return 0;
}

CofSummary run_cof(const CofConfig& config, std::ostream& log) {
    const auto start = Clock::now();
    config.params.validate();
    const int workers = resolve_workers(config.workers);
    const Manifest manifest = parse_manifest(config.manifest);
    const fs::path base = manifest_base(config.manifest);
    fs::create_directories(config.out_dir);
    const std::string classes = join(manifest.classes(), ',');

    RunLog run_log("cof", {{"manifest", config.manifest.string()},
                           {"out_dir", config.out_dir.string()},
                           {"augment", config.augment},
                           {"mode", std::string(to_string(config.mode))},
                           {"workers", workers},
                           {"flow", params_json(config.params)}});
    run_log.stage("parse_manifest", seconds_since(start));

    CofSummary summary;
    summary.samples = manifest.size();
    summary.outcomes.resize(manifest.size());
    std::mutex log_mutex;

    const auto batch_start = Clock::now();
    parallel_for(manifest.size(), workers, [&](std::size_t i) {
        const SampleTriplet& s = manifest.samples()[i];
        SampleOutcome& outcome = summary.outcomes[i];
        outcome.sample_id = s.sample_id;
        const auto t0 = Clock::now();
        try {
            const GrayImage onset = load_image(resolve_frame(base, s.onset_path));
            const GrayImage apex = load_image(resolve_frame(base, s.apex_path));
            const GrayImage offset = load_image(resolve_frame(base, s.offset_path));
            const auto plans = config.augment ? augment_plan(s) : std::vector{identity_plan()};
            for (const auto& plan : plans) {
                const std::string id = s.sample_id + plan.suffix();
                CofOptions options{config.params, config.mode, id};
                CofImage cof = compute_cof(plan.transform.apply(onset), plan.transform.apply(apex),
                                           plan.transform.apply(offset), options);
                cof.meta.extra["label"] = s.label;
                cof.meta.extra["source_id"] = s.sample_id;
                cof.meta.extra["augmentation"] = plan.tag;
                cof.meta.extra["classes"] = classes;
                save_image(cof.image, config.out_dir / (id + ".png"));
                write_metadata(cof.meta, config.out_dir / (id + ".meta"));
                outcome.outputs.push_back(id + ".png");
            }
            outcome.ok = true;
        } catch (const std::exception& e) {
            outcome.ok = false;
            outcome.error = e.what();
            std::lock_guard lock(log_mutex);
            log << "cof: sample '" << s.sample_id << "' failed: " << e.what() << "\n";
        }
        outcome.seconds = seconds_since(t0);
    });
    run_log.stage("compute_cof", seconds_since(batch_start));

    for (const auto& o : summary.outcomes) {
        json entry{{"sample_id", o.sample_id}, {"status", o.ok ? "ok" : "failed"}, {"outputs", o.outputs}};
        if (!o.ok) entry["error"] = o.error;
        entry["seconds"] = o.seconds;
        run_log.sample(std::move(entry));
        if (!o.ok) ++summary.failed;
        summary.images_written += o.outputs.size();
    }
    const double wall = seconds_since(start);
    run_log.set("summary", {{"samples", summary.samples},
                            {"failed", summary.failed},
                            {"images_written", summary.images_written},
                            {"wall_seconds", wall}});
    run_log.write(config.out_dir / "run_log.json");

    log << "cof: " << summary.samples << " samples, " << summary.images_written << " images, "
        << summary.failed << " failed, " << std::fixed << std::setprecision(2) << wall << " s\n";
    log.unsetf(std::ios::floatfield);
    return summary;
}

int run_augment(const AugmentConfig& config, std::ostream& log) {
    const Manifest manifest = parse_manifest(config.manifest);
    const fs::path base = manifest_base(config.manifest);
    fs::create_directories(config.out_dir);
    RunLog run_log("augment", {{"manifest", config.manifest.string()}, {"out_dir", config.out_dir.string()}});

    std::vector<SampleTriplet> augmented;
    int failures = 0;
    for (const auto& s : manifest.samples()) {
        try {
            const GrayImage frames[3] = {load_image(resolve_frame(base, s.onset_path)),
                                         load_image(resolve_frame(base, s.apex_path)),
                                         load_image(resolve_frame(base, s.offset_path))};
            for (const auto& plan : augment_plan(s)) {
                const std::string id = s.sample_id + plan.suffix();
                fs::create_directories(config.out_dir / id);
                const fs::path names[3] = {fs::path(id) / "onset.pgm", fs::path(id) / "apex.pgm",
                                           fs::path(id) / "offset.pgm"};
                for (int k = 0; k < 3; ++k) save_image(plan.transform.apply(frames[k]), config.out_dir / names[k]);
                augmented.push_back({id, names[0], names[1], names[2], s.label});
            }
            run_log.sample({{"sample_id", s.sample_id}, {"status", "ok"}});
        } catch (const std::exception& e) {
            ++failures;
            log << "augment: sample '" << s.sample_id << "' failed: " << e.what() << "\n";
            run_log.sample({{"sample_id", s.sample_id}, {"status", "failed"}, {"error", e.what()}});
        }
    }
    if (!augmented.empty()) write_manifest(Manifest(std::move(augmented)), config.out_dir / "augmented.csv");
    run_log.write(config.out_dir / "run_log.json");
    log << "augment: " << manifest.size() << " samples, " << failures << " failed\n";
    return failures == 0 ? 0 : 1;
}

int run_split(const SplitConfig& config, std::ostream& log) {
    const Manifest manifest = parse_manifest(config.manifest);
    RunLog run_log("split", {{"manifest", config.manifest.string()},
                             {"out_dir", config.out_dir.string()},
                             {"train_fraction", config.spec.train_fraction},
                             {"seed", config.spec.seed},
                             {"stratified", config.spec.stratified},
                             {"min_count", config.min_count}});

    const Manifest kept = filter_min_count(manifest, config.min_count);
    const auto before = manifest.classes();
    const auto after = kept.classes();
    for (const auto& c : before) {
        if (std::find(after.begin(), after.end(), c) == after.end()) {
            std::size_t n = 0;
            for (const auto& s : manifest.samples()) n += s.label == c;
            const std::string note = "class '" + c + "' excluded: " + std::to_string(n) +
                                     " samples < min-count " + std::to_string(config.min_count);
            run_log.note(note);
            log << "split: " << note << "\n";
        }
    }

    const Split parts = split(kept, config.spec);
    fs::create_directories(config.out_dir);
    const fs::path base = manifest_base(config.manifest);
    write_manifest(rebased(parts.train, base, config.out_dir), config.out_dir / "train.csv");
    write_manifest(rebased(parts.test, base, config.out_dir), config.out_dir / "test.csv");
    run_log.set("summary", {{"input", manifest.size()},
                            {"kept", kept.size()},
                            {"train", parts.train.size()},
                            {"test", parts.test.size()},
                            {"classes", after}});
    run_log.write(config.out_dir / "split_log.json");
    log << "split: " << kept.size() << " samples -> " << parts.train.size() << " train / "
        << parts.test.size() << " test\n";
    return 0;
}

std::vector<LabeledFeature> load_feature_dir(const fs::path& dir, std::vector<std::string>* class_order) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: '" + dir.string() + "'");
    std::vector<fs::path> sidecars;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".meta") sidecars.push_back(entry.path());
    }
    std::sort(sidecars.begin(), sidecars.end());

    std::vector<LabeledFeature> out;
    for (const auto& meta_path : sidecars) {
        const CofMetadata meta = read_metadata(meta_path);
        const auto label = meta.extra.find("label");
        if (label == meta.extra.end()) throw FormatError("'" + meta_path.string() + "' has no label");
        if (class_order && class_order->empty()) {
            if (const auto c = meta.extra.find("classes"); c != meta.extra.end()) *class_order = split_list(c->second, ',');
        }
        fs::path png = meta_path;
        png.replace_extension(".png");
        out.push_back({image_feature(load_image(png)), label->second});
    }
    if (out.empty()) throw IoError("no COF images with sidecars in '" + dir.string() + "'");
    return out;
}

EvalResult run_eval(const EvalConfig& config, std::ostream& log) {
    const auto start = Clock::now();
    RunLog run_log("eval", {{"train_dir", config.train_dir.string()},
                            {"test_dir", config.test_dir.string()},
                            {"report", config.report.string()}});
    std::vector<std::string> classes;
    const auto train = load_feature_dir(config.train_dir, &classes);
    const auto test = load_feature_dir(config.test_dir);
    auto declare = [&](const std::string& label) {
        if (std::find(classes.begin(), classes.end(), label) == classes.end()) classes.push_back(label);
    };
    for (const auto& s : train) declare(s.label);

    const CentroidModel model = fit_centroids(train, classes);
    run_log.stage("fit", seconds_since(start));

    std::vector<std::string> truth, predicted;
    for (const auto& s : test) {
        declare(s.label);
        truth.push_back(s.label);
        predicted.push_back(predict(model, s.feature));
        run_log.sample({{"truth", truth.back()}, {"predicted", predicted.back()}});
    }
    EvalResult result{confusion(truth, predicted, classes), 0.0};
    result.accuracy = accuracy(result.matrix);
    if (config.report.has_parent_path()) fs::create_directories(config.report.parent_path());
    write_report(result.matrix, config.report);
    run_log.set("summary", {{"train", train.size()}, {"test", test.size()}, {"accuracy", result.accuracy}});
    fs::path log_path = config.report;
    log_path += ".log.json";
    run_log.write(log_path);
    log << "eval: " << train.size() << " train / " << test.size() << " test, accuracy "
        << std::fixed << std::setprecision(4) << result.accuracy << "\n";
    log.unsetf(std::ios::floatfield);
    return result;
}

BenchResult run_bench(const BenchConfig& config) {
    if (config.reps < 1) throw InvalidArgument("bench: reps must be >= 1");
    const GrayImage onset = synthetic::smooth_texture(config.size, 11);
    const GrayImage apex = synthetic::smooth_texture(config.size, 11, 1.5, 0.5);
    const GrayImage offset = synthetic::smooth_texture(config.size, 11, 0.5, 0.25);
    const CofOptions options{config.params, RenderMode::Gray, "bench"};

    BenchResult result{config.size, config.reps, INFINITY, INFINITY};
    // Warm-up so first-touch allocation does not land in either timing.
    (void)farneback_flow(onset, apex, config.params);
    for (int r = 0; r < config.reps; ++r) {
        auto t0 = Clock::now();
        const FlowField flow = farneback_flow(onset, apex, config.params);
        result.flow_seconds = std::min(result.flow_seconds, seconds_since(t0));

        t0 = Clock::now();
        const CofImage cof = compute_cof(onset, apex, offset, options);
        result.cof_seconds = std::min(result.cof_seconds, seconds_since(t0));
        if (flow.u.empty() || cof.image.bytes().empty()) throw Error("bench: empty result");
    }
    return result;
}

void print_bench(const BenchResult& r, std::ostream& out) {
    out << std::fixed << std::setprecision(4);
    out << "bench: " << r.size.width << "x" << r.size.height << ", best of " << r.reps << "\n"
        << "  single-phase flow: " << r.flow_seconds << " s (" << std::setprecision(1)
        << 1.0 / r.flow_seconds << " frame pairs/s)\n"
        << std::setprecision(4) << "  COF triplet:       " << r.cof_seconds << " s ("
        << std::setprecision(1) << 1.0 / r.cof_seconds << " triplets/s)\n"
        << std::setprecision(3) << "  COF / flow ratio:  " << r.ratio() << "\n";
    out.unsetf(std::ios::floatfield);
}

}  // namespace cofflow::pipeline
