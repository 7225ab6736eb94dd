#include "cofflow/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace cofflow {
namespace {

std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// Uniform index in [0, bound) by rejection, independent of the standard
// library's distribution implementations.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = rng();
    while (r >= limit) r = rng();
    return r % bound;
}

void shuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[uniform_index(rng, i)]);
    }
}

std::size_t train_count(std::size_t n, double fraction) {
    // ceil with a small tolerance so n*0.8 == 4.0000000000000001 stays 4
    auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(n) * fraction - 1e-9));
    return std::min(k, n - 1);
}

}  // namespace

Manifest::Manifest(std::vector<SampleTriplet> samples) : samples_(std::move(samples)) {
    std::unordered_set<std::string> ids;
    for (const auto& s : samples_) {
        if (s.sample_id.empty()) throw InvalidArgument("manifest: empty sample_id");
        if (!ids.insert(s.sample_id).second) {
            throw InvalidArgument("manifest: duplicate sample_id '" + s.sample_id + "'");
        }
        if (s.onset_path.empty() || s.apex_path.empty() || s.offset_path.empty()) {
            throw InvalidArgument("manifest: sample '" + s.sample_id + "' has an empty frame path");
        }
        if (s.onset_path == s.apex_path || s.apex_path == s.offset_path || s.onset_path == s.offset_path) {
            throw InvalidArgument("manifest: sample '" + s.sample_id + "' repeats a frame path");
        }
        if (s.label.empty()) throw InvalidArgument("manifest: sample '" + s.sample_id + "' has no label");
    }
}

std::vector<std::string> Manifest::classes() const {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& s : samples_) {
        if (seen.insert(s.label).second) out.push_back(s.label);
    }
    return out;
}

Manifest parse_manifest_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    std::vector<SampleTriplet> samples;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!header_seen) {
            if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
            if (line != kManifestHeader) {
                throw FormatError("manifest: expected header '" + std::string(kManifestHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        const auto f = split_commas(line);
        if (f.size() != 5) {
            throw FormatError("manifest line " + std::to_string(line_no) + ": expected 5 columns, got " +
                              std::to_string(f.size()));
        }
        samples.push_back({f[0], f[1], f[2], f[3], f[4]});
    }
    if (!header_seen || samples.empty()) throw FormatError("empty manifest");
    return Manifest(std::move(samples));
}

Manifest parse_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_manifest_text(ss.str());
}

std::string format_manifest(const Manifest& manifest) {
    std::string out(kManifestHeader);
    out += '\n';
    for (const auto& s : manifest.samples()) {
        out += s.sample_id + ',' + s.onset_path.string() + ',' + s.apex_path.string() + ',' +
               s.offset_path.string() + ',' + s.label + '\n';
    }
    return out;
}

void write_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << format_manifest(manifest);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Manifest filter_min_count(const Manifest& manifest, std::size_t min_count) {
    if (min_count < 1) throw InvalidArgument("min_count must be >= 1");
    std::unordered_map<std::string, std::size_t> counts;
    for (const auto& s : manifest.samples()) ++counts[s.label];
    std::vector<SampleTriplet> kept;
    for (const auto& s : manifest.samples()) {
        if (counts[s.label] >= min_count) kept.push_back(s);
    }
    if (kept.empty()) {
        throw InvalidArgument("no class has at least " + std::to_string(min_count) + " samples");
    }
    return Manifest(std::move(kept));
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Split split(const Manifest& manifest, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw InvalidArgument("train_fraction must lie in (0,1)");
    }
    // Groups of manifest indices: one per class, or a single group.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    if (spec.stratified) {
        std::map<std::string, std::size_t> slot;
        for (std::size_t i = 0; i < manifest.size(); ++i) {
            const auto& label = manifest.samples()[i].label;
            auto [it, added] = slot.emplace(label, groups.size());
            if (added) groups.push_back({label, {}});
            groups[it->second].second.push_back(i);
        }
    } else {
        groups.push_back({"", {}});
        for (std::size_t i = 0; i < manifest.size(); ++i) groups[0].second.push_back(i);
    }

    std::vector<bool> to_train(manifest.size(), false);
    for (auto& [label, members] : groups) {
        if (members.size() < 2) {
            throw InvalidArgument("class '" + label + "' has " + std::to_string(members.size()) +
                                  " sample(s); at least 2 are needed to split");
        }
        shuffle(members, spec.seed ^ fnv1a64(label));
        const std::size_t k = train_count(members.size(), spec.train_fraction);
        for (std::size_t i = 0; i < k; ++i) to_train[members[i]] = true;
    }

    std::vector<SampleTriplet> train, test;
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        (to_train[i] ? train : test).push_back(manifest.samples()[i]);
    }
    return {Manifest(std::move(train)), Manifest(std::move(test))};
}

GrayImage Transform::apply(const GrayImage& image) const {
    switch (kind) {
        case TransformKind::Identity: return image;
        case TransformKind::HFlip: return hflip(image);
        case TransformKind::Rotate: return rotate(image, degrees);
    }
    return image;
}

AugmentationPlan identity_plan() { return {"orig", {TransformKind::Identity, 0.0}}; }

std::vector<AugmentationPlan> augment_plan(const SampleTriplet& /*triplet*/) {
    return {
        identity_plan(),
        {"hflip", {TransformKind::HFlip, 0.0}},
        {"rot+5", {TransformKind::Rotate, 5.0}},
        {"rot-5", {TransformKind::Rotate, -5.0}},
        {"rot+10", {TransformKind::Rotate, 10.0}},
        {"rot-10", {TransformKind::Rotate, -10.0}},
    };
}

}  // namespace cofflow
