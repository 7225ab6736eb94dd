#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cofflow/image.hpp"

namespace cofflow {

struct SampleTriplet {
    std::string sample_id;
    std::filesystem::path onset_path;
    std::filesystem::path apex_path;
    std::filesystem::path offset_path;
    std::string label;

    friend bool operator==(const SampleTriplet&, const SampleTriplet&) = default;
};

/// Ordered samples with unique ids. Class order is first appearance.
class Manifest {
public:
    Manifest() = default;
    /// Validates id uniqueness and distinct, non-empty frame paths.
    explicit Manifest(std::vector<SampleTriplet> samples);

    [[nodiscard]] const std::vector<SampleTriplet>& samples() const { return samples_; }
    [[nodiscard]] std::size_t size() const { return samples_.size(); }
    [[nodiscard]] bool empty() const { return samples_.empty(); }
    [[nodiscard]] std::vector<std::string> classes() const;

    friend bool operator==(const Manifest&, const Manifest&) = default;

private:
    std::vector<SampleTriplet> samples_;
};

inline constexpr std::string_view kManifestHeader = "sample_id,onset_path,apex_path,offset_path,label";

Manifest parse_manifest(const std::filesystem::path& path);
Manifest parse_manifest_text(std::string_view text);
std::string format_manifest(const Manifest& manifest);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

/// Drops samples whose label occurs fewer than `min_count` times.
Manifest filter_min_count(const Manifest& manifest, std::size_t min_count);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct Split {
    Manifest train;
    Manifest test;
};

/// Seeded train/test partition. Each (class) group is shuffled with a PRNG
/// seeded by seed ^ fnv1a64(class) and its first ceil(n*fraction) members go
/// to train, keeping at least one for test. Output keeps manifest order.
Split split(const Manifest& manifest, const SplitSpec& spec);

std::uint64_t fnv1a64(std::string_view text);

// ---------------------------------------------------------------------------
// Augmentation

enum class TransformKind { Identity, HFlip, Rotate };

struct Transform {
    TransformKind kind = TransformKind::Identity;
    double degrees = 0.0;

    [[nodiscard]] GrayImage apply(const GrayImage& image) const;
    friend bool operator==(const Transform&, const Transform&) = default;
};

struct AugmentationPlan {
    std::string tag;  // "orig", "hflip", "rot+5", ...
    Transform transform;

    /// Id suffix for augmented outputs, e.g. "_rot-10".
    [[nodiscard]] std::string suffix() const { return "_" + tag; }
};

/// Identity, hflip and rotations by +5, -5, +10, -10 degrees, in that order.
std::vector<AugmentationPlan> augment_plan(const SampleTriplet& triplet);

/// The single identity plan used for test samples.
AugmentationPlan identity_plan();

}  // namespace cofflow
