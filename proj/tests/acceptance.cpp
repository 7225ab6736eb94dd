// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Thresholds are pinned below.

#include <chrono>
#include <cstring>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cofflow/cof.hpp"
#include "cofflow/eval.hpp"
#include "cofflow/flow.hpp"
#include "cofflow/pipeline.hpp"
#include "cofflow/synthetic.hpp"
#include "support.hpp"

using namespace cofflow;
namespace fs = std::filesystem;
namespace pl = cofflow::pipeline;

namespace {

constexpr double kZeroMotionSup = 0.05;       // px
constexpr double kZeroMotionSeconds = 1.0;    // per image
constexpr double kTranslationError = 0.25;    // px, mean per component
constexpr double kTranslationSeconds = 5.0;   // all three shifts
constexpr double kPolyTolerance = 1e-9;
constexpr int kOracleTriplets = 100;
constexpr int kPropertyCases = 1000;
constexpr double kEndToEndAccuracy = 0.90;
constexpr double kEndToEndSeconds = 60.0;
constexpr double kOverheadRatio = 2.2;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << id << "] " << name << ": " << o.detail << std::endl;
}

double sup_norm(const FlowField& f) {
    double worst = 0.0;
    for (double x : f.u.values()) worst = std::max(worst, std::abs(x));
    for (double x : f.v.values()) worst = std::max(worst, std::abs(x));
    return worst;
}

Outcome zero_motion() {
    double worst = 0.0, slowest = 0.0;
    bool finite = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const GrayImage img = testing::random_smooth_image({128, 128}, seed);
        const auto start = Clock::now();
        const FlowField f = farneback_flow(img, img);
        slowest = std::max(slowest, seconds_since(start));
        finite = finite && f.finite();
        worst = std::max(worst, sup_norm(f));
    }
    std::ostringstream d;
    d << "max sup-norm " << worst << " px (< " << kZeroMotionSup << "), slowest " << slowest << " s (< "
      << kZeroMotionSeconds << ")";
    return {finite && worst < kZeroMotionSup && slowest < kZeroMotionSeconds, d.str()};
}

Outcome translation() {
    const Size size{96, 96};
    const double cx = 46.0, cy = 47.0, sigma = 6.0;
    const GrayImage first = synthetic::gaussian_blob(size, cx, cy, sigma);
    const double shifts[3][2] = {{1, 0}, {3, 2}, {0, -4}};
    std::ostringstream d;
    bool ok = true;
    const auto start = Clock::now();
    for (const auto& s : shifts) {
        const GrayImage second = synthetic::gaussian_blob(size, cx + s[0], cy + s[1], sigma);
        const FlowField f = farneback_flow(first, second);
        double eu = 0.0, ev = 0.0;
        int n = 0;
        for (int y = 0; y < size.height; ++y) {
            for (int x = 0; x < size.width; ++x) {
                if (first(x, y) <= 0.1) continue;  // blob support
                eu += std::abs(f.u(x, y) - s[0]);
                ev += std::abs(f.v(x, y) - s[1]);
                ++n;
            }
        }
        eu /= n;
        ev /= n;
        ok = ok && eu < kTranslationError && ev < kTranslationError;
        d << "(" << s[0] << "," << s[1] << ") err u " << eu << " v " << ev << "; ";
    }
    const double elapsed = seconds_since(start);
    d << "total " << elapsed << " s (< " << kTranslationSeconds << ")";
    return {ok && elapsed < kTranslationSeconds, d.str()};
}

Outcome poly_oracle() {
    const Size size{40, 36};
    const GrayImage constant = testing::image_from(size, [](double, double) { return 0.37; });
    const GrayImage ramp = testing::image_from(size, [](double x, double y) { return 0.1 + 0.01 * x + 0.005 * y; });
    const GrayImage quadratic = testing::image_from(size, [](double x, double y) {
        return 0.3 + 1e-4 * (x - 18) * (x - 18) - 2e-4 * (x - 18) * (y - 15) + 1.5e-4 * (y - 15) * (y - 15);
    });
    double worst = 0.0;
    for (const GrayImage* img : {&constant, &ramp, &quadratic}) {
        for (int poly_n : {5, 7}) {
            for (double sigma : {1.1, 1.5}) {
                const PolyExpansion e = poly_expand(*img, poly_n, sigma);
                const int m = poly_n / 2;
                for (int y = m; y < size.height - m; ++y) {
                    for (int x = m; x < size.width - m; ++x) {
                        const auto r = testing::dense_poly_fit(img->pixels(), x, y, poly_n, sigma);
                        const double got[6] = {e.c(x, y),   e.b1(x, y),  e.b2(x, y),
                                               e.a11(x, y), e.a22(x, y), 2.0 * e.a12(x, y)};
                        for (int i = 0; i < 6; ++i) worst = std::max(worst, std::abs(got[i] - r[i]));
                    }
                }
            }
        }
    }
    std::ostringstream d;
    d << "max coefficient deviation " << worst << " (< " << kPolyTolerance << ")";
    return {worst < kPolyTolerance, d.str()};
}

Outcome literal_oracle() {
    FlowParams p;
    p.levels = 2;
    p.window_size = 9;
    int identical = 0;
    for (int i = 0; i < kOracleTriplets; ++i) {
        const Size size{32, 32};
        const auto seed = static_cast<std::uint64_t>(i) * 3;
        // alternate noise frames and smooth moving texture
        GrayImage a = testing::random_byte_image(size, seed), b = testing::random_byte_image(size, seed + 1),
                  c = testing::random_byte_image(size, seed + 2);
        if (i % 2 == 1) {
            a = synthetic::smooth_texture(size, seed, 0, 0);
            b = synthetic::smooth_texture(size, seed, 1.5, -0.5);
            c = synthetic::smooth_texture(size, seed, 0.5, 0.25);
        }
        identical += compute_cof(a, b, c, {p}).image == testing::literal_combined_of(a, b, c, p);
    }
    std::ostringstream d;
    d << identical << "/" << kOracleTriplets << " triplets bit-identical";
    return {identical == kOracleTriplets, d.str()};
}

ScalarMap random_map(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> dim(1, 12);
    std::uniform_real_distribution<double> val(0.0, 20.0);
    const Size size{dim(rng), dim(rng)};
    std::vector<double> v(size.area());
    const bool constant = rng() % 10 == 0;
    const double c = val(rng);
    for (auto& x : v) x = constant ? c : val(rng);
    return ScalarMap(size, std::move(v));
}

ScalarMap random_map_of(Size size, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(0.0, 20.0);
    std::vector<double> v(size.area());
    for (auto& x : v) x = val(rng);
    return ScalarMap(size, std::move(v));
}

bool in_unit_range(const ScalarMap& m) {
    for (double x : m.values()) {
        if (!(x >= 0.0 && x <= 1.0)) return false;
    }
    return true;
}

Outcome invariants() {
    std::mt19937_64 rng(2024);
    int idempotent = 0, commutative = 0, black = 0, ranges = 0, finite = 0;

    for (int i = 0; i < kPropertyCases; ++i) {
        const ScalarMap n = normalize(random_map(rng));
        idempotent += normalize(n) == n;

        const ScalarMap x = normalize(random_map(rng));
        const ScalarMap y = normalize(random_map_of(x.size(), rng));
        const ScalarMap xy = combine_magnitudes(x, y);
        commutative += xy == combine_magnitudes(y, x);

        const CofImage rgb = to_rgb(xy);
        ranges += in_unit_range(n) && in_unit_range(xy) && rgb.image.size() == xy.size() &&
                  rgb.image.bytes().size() == 3 * xy.size().area();
    }

    FlowParams p;
    p.levels = 1;
    p.window_size = 7;
    for (int i = 0; i < kPropertyCases; ++i) {
        const auto seed = static_cast<std::uint64_t>(i);
        const Size size{12 + static_cast<int>(seed % 9), 12 + static_cast<int>((seed / 9) % 9)};
        const GrayImage f = testing::random_byte_image(size, seed);
        const CofImage still = compute_cof(f, f, f, {p});
        bool all_black = true;
        for (auto b : still.image.bytes()) all_black = all_black && b == 0;
        black += all_black;

        const GrayImage g = testing::random_byte_image(size, seed + 100000);
        const GrayImage h = testing::random_byte_image(size, seed + 200000);
        const FlowField f1 = farneback_flow(f, g, p), f2 = farneback_flow(g, h, p);
        const ScalarMap fused = combine_magnitudes(normalize(magnitude(f1)), normalize(magnitude(f2)));
        finite += f1.finite() && f2.finite() && in_unit_range(fused);
    }

    std::ostringstream d;
    d << "idempotence " << idempotent << ", commutativity " << commutative << ", zero-motion black " << black
      << ", ranges " << ranges << ", no NaN " << finite << " (each of " << kPropertyCases << ")";
    const bool ok = idempotent == kPropertyCases && commutative == kPropertyCases && black == kPropertyCases &&
                    ranges == kPropertyCases && finite == kPropertyCases;
    return {ok, d.str()};
}

Outcome metrics() {
    const std::vector<std::string> truth{"a", "a", "b"}, pred{"a", "b", "b"}, classes{"a", "b"};
    const ConfusionMatrix m = confusion(truth, pred, classes);
    const bool counts = m.counts() == std::vector<std::vector<std::size_t>>{{1, 1}, {0, 1}};
    const double acc = accuracy(m);
    const double perfect = accuracy(confusion(truth, truth, classes));
    std::ostringstream d;
    d << "matrix [[1,1],[0,1]] " << (counts ? "matches" : "differs") << ", accuracy " << acc
      << " (2/3), perfect " << perfect;
    return {counts && acc == 2.0 / 3.0 && perfect == 1.0, d.str()};
}

Outcome end_to_end() {
    testing::ScratchDir dir("acceptance_e2e");
    std::ostringstream log;
    const auto start = Clock::now();
    const fs::path manifest = testing::write_motion_dataset(dir / "data", 40, 7);
    if (pl::run_split({manifest, dir / "split", {0.8, 42, true}, 10}, log) != 0) {
        return {false, "split failed: " + log.str()};
    }
    const auto train = pl::run_cof({dir / "split" / "train.csv", dir / "train", {}, true, RenderMode::Gray, 0}, log);
    const auto test = pl::run_cof({dir / "split" / "test.csv", dir / "test", {}, false, RenderMode::Gray, 0}, log);
    if (train.exit_code() != 0 || test.exit_code() != 0) return {false, "cof failed: " + log.str()};
    const auto result = pl::run_eval({dir / "train", dir / "test", dir / "report.csv"}, log);
    const double elapsed = seconds_since(start);
    std::ostringstream d;
    d << train.images_written << " train / " << test.images_written << " test COFs, accuracy " << result.accuracy
      << " (>= " << kEndToEndAccuracy << "), " << elapsed << " s (< " << kEndToEndSeconds << ")";
    return {result.accuracy >= kEndToEndAccuracy && elapsed < kEndToEndSeconds, d.str()};
}

// Reads a .flo file the way common Middlebury readers do: raw float tag,
// two int32 dimensions, then interleaved float32 (u, v) rows.
bool middlebury_read(const fs::path& path, float& tag, FlowField& out) {
    std::ifstream in(path, std::ios::binary);
    std::int32_t w = 0, h = 0;
    in.read(reinterpret_cast<char*>(&tag), 4);
    in.read(reinterpret_cast<char*>(&w), 4);
    in.read(reinterpret_cast<char*>(&h), 4);
    if (!in || w <= 0 || h <= 0) return false;
    std::vector<float> data(static_cast<std::size_t>(w) * h * 2);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size() * 4));
    if (!in || in.peek() != EOF) return false;
    out = FlowField(Size{w, h});
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out.u(x, y) = data[2 * (static_cast<std::size_t>(y) * w + x)];
            out.v(x, y) = data[2 * (static_cast<std::size_t>(y) * w + x) + 1];
        }
    }
    return true;
}

Outcome formats() {
    testing::ScratchDir dir("acceptance_formats");
    std::mt19937_64 rng(5);
    std::normal_distribution<float> val(0.0f, 4.0f);
    FlowField f(Size{37, 23});
    for (auto& x : f.u.values()) x = val(rng);
    for (auto& x : f.v.values()) x = val(rng);
    write_flo(f, dir / "f.flo");

    const FlowField back = read_flo(dir / "f.flo");
    std::ifstream a(dir / "f.flo", std::ios::binary);
    const std::vector<unsigned char> bytes{std::istreambuf_iterator<char>(a), std::istreambuf_iterator<char>()};
    const bool flo_exact = back.u == f.u && back.v == f.v && encode_flo(back) == bytes;

    float tag = 0.0f;
    FlowField third;
    const bool third_ok = middlebury_read(dir / "f.flo", tag, third) && tag == 202021.25f &&
                          std::memcmp(bytes.data(), "PIEH", 4) == 0 && third.u == f.u && third.v == f.v;

    bool images_exact = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const GrayImage g = testing::random_byte_image({29, 17}, seed);
        save_image(g, dir / "g.pgm");
        save_image(g, dir / "g.png");
        images_exact = images_exact && load_image(dir / "g.pgm") == g && load_image(dir / "g.png") == g;
        const RgbImage c = testing::random_rgb_image({19, 11}, seed);
        save_image(c, dir / "c.png");
        images_exact = images_exact && load_rgb_image(dir / "c.png") == c;
    }
    std::ostringstream d;
    d << std::setprecision(9) << ".flo round trip " << (flo_exact ? "bit-exact" : "MISMATCH") << ", tag " << tag << " reader "
      << (third_ok ? "ok" : "MISMATCH") << ", PGM/PNG " << (images_exact ? "bit-exact" : "MISMATCH");
    return {flo_exact && third_ok && images_exact, d.str()};
}

Outcome overhead() {
    pl::BenchConfig cfg;
    cfg.size = {128, 128};
    cfg.reps = 5;
    const pl::BenchResult r = pl::run_bench(cfg);
    std::ostringstream d;
    d << "flow " << r.flow_seconds * 1e3 << " ms, COF " << r.cof_seconds * 1e3 << " ms, ratio " << r.ratio()
      << " (<= " << kOverheadRatio << ")";
    return {r.ratio() <= kOverheadRatio, d.str()};
}

}  // namespace

int main() {
    report(1, "zero-motion flow", zero_motion);
    report(2, "translation recovery", translation);
    report(3, "polynomial expansion oracle", poly_oracle);
    report(4, "COF literal oracle", literal_oracle);
    report(5, "COF invariants", invariants);
    report(6, "metrics", metrics);
    report(7, "end-to-end synthetic pipeline", end_to_end);
    report(8, "format fidelity", formats);
    report(9, "COF overhead", overhead);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
