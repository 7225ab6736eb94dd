#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cofflow/image.hpp"

namespace cofflow {

/// Rows are true classes, columns predicted classes.
class ConfusionMatrix {
public:
    ConfusionMatrix() = default;
    explicit ConfusionMatrix(std::vector<std::string> classes);
    ConfusionMatrix(std::vector<std::string> classes, std::vector<std::vector<std::size_t>> counts);

    [[nodiscard]] const std::vector<std::string>& classes() const { return classes_; }
    [[nodiscard]] std::size_t count(std::size_t truth, std::size_t predicted) const;
    [[nodiscard]] const std::vector<std::vector<std::size_t>>& counts() const { return counts_; }
    [[nodiscard]] std::size_t total() const;
    [[nodiscard]] std::size_t trace() const;
    [[nodiscard]] std::size_t index_of(std::string_view label) const;

    void add(std::string_view truth, std::string_view predicted);

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

private:
    std::vector<std::string> classes_;
    std::vector<std::vector<std::size_t>> counts_;
};

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted,
                          std::span<const std::string> classes);

/// trace / total. Throws InvalidArgument on an empty matrix.
double accuracy(const ConfusionMatrix& matrix);

/// Report CSV: header of class names, K count rows, then `accuracy,<4 decimals>`.
std::string format_report(const ConfusionMatrix& matrix);
ConfusionMatrix parse_report(std::string_view text);
void write_report(const ConfusionMatrix& matrix, const std::filesystem::path& path);
ConfusionMatrix read_report(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Nearest-centroid baseline

inline constexpr Size kFeatureSize{32, 32};

using Feature = std::vector<double>;

struct LabeledFeature {
    Feature feature;
    std::string label;
};

struct CentroidModel {
    std::vector<std::string> classes;
    std::vector<Feature> centroids;  // parallel to classes
};

/// 32x32 area-averaged gray feature vector of an image (values in [0,1]).
Feature image_feature(const GrayImage& image);

/// Per-class mean, summed in sample order. With `classes` empty the order is
/// first appearance; otherwise every listed class must have a sample.
CentroidModel fit_centroids(std::span<const LabeledFeature> samples,
                            std::vector<std::string> classes = {});

/// Nearest centroid under Euclidean distance; ties go to the earlier class.
std::string predict(const CentroidModel& model, std::span<const double> feature);

}  // namespace cofflow
