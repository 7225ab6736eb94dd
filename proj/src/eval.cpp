#include "cofflow/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cofflow {
namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes)
    : classes_(std::move(classes)),
      counts_(classes_.size(), std::vector<std::size_t>(classes_.size(), 0)) {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        for (std::size_t j = i + 1; j < classes_.size(); ++j) {
            if (classes_[i] == classes_[j]) throw InvalidArgument("duplicate class '" + classes_[i] + "'");
        }
    }
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes,
                                 std::vector<std::vector<std::size_t>> counts)
    : ConfusionMatrix(std::move(classes)) {
    if (counts.size() != classes_.size()) throw DimensionError("confusion matrix must be K x K");
    for (const auto& row : counts) {
        if (row.size() != classes_.size()) throw DimensionError("confusion matrix must be K x K");
    }
    counts_ = std::move(counts);
}

std::size_t ConfusionMatrix::count(std::size_t truth, std::size_t predicted) const {
    return counts_.at(truth).at(predicted);
}

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : counts_) {
        for (auto c : row) t += c;
    }
    return t;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t t = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) t += counts_[i][i];
    return t;
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
    const auto it = std::find(classes_.begin(), classes_.end(), label);
    if (it == classes_.end()) throw InvalidArgument("unknown label '" + std::string(label) + "'");
    return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(std::string_view truth, std::string_view predicted) {
    ++counts_[index_of(truth)][index_of(predicted)];
}

ConfusionMatrix confusion(std::span<const std::string> truth, std::span<const std::string> predicted,
                          std::span<const std::string> classes) {
    if (truth.size() != predicted.size()) {
        throw DimensionError("confusion: " + std::to_string(truth.size()) + " true labels vs " +
                             std::to_string(predicted.size()) + " predictions");
    }
    ConfusionMatrix m({classes.begin(), classes.end()});
    for (std::size_t i = 0; i < truth.size(); ++i) m.add(truth[i], predicted[i]);
    return m;
}

double accuracy(const ConfusionMatrix& matrix) {
    const std::size_t total = matrix.total();
    if (total == 0) throw InvalidArgument("accuracy of an empty confusion matrix");
    return static_cast<double>(matrix.trace()) / static_cast<double>(total);
}

std::string format_report(const ConfusionMatrix& matrix) {
    std::string out;
    const auto& classes = matrix.classes();
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].find_first_of(",\n") != std::string::npos) {
            throw InvalidArgument("class name not representable in report: '" + classes[i] + "'");
        }
        out += (i ? "," : "") + classes[i];
    }
    out += '\n';
    for (const auto& row : matrix.counts()) {
        for (std::size_t j = 0; j < row.size(); ++j) out += (j ? "," : "") + std::to_string(row[j]);
        out += '\n';
    }
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.4f", matrix.total() ? accuracy(matrix) : 0.0);
    out += std::string("accuracy,") + acc + '\n';
    return out;
}

ConfusionMatrix parse_report(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.size() < 2) throw FormatError("report: too few lines");
    auto classes = split_line(lines.front());
    const std::size_t k = classes.size();
    if (lines.size() != k + 2) throw FormatError("report: expected " + std::to_string(k) + " matrix rows");
    std::vector<std::vector<std::size_t>> counts;
    for (std::size_t i = 1; i <= k; ++i) {
        const auto fields = split_line(lines[i]);
        if (fields.size() != k) throw FormatError("report: row " + std::to_string(i) + " has wrong width");
        std::vector<std::size_t> row;
        for (const auto& f : fields) {
            if (f.empty() || f.find_first_not_of("0123456789") != std::string::npos) {
                throw FormatError("report: bad count '" + f + "'");
            }
            row.push_back(std::stoull(f));
        }
        counts.push_back(std::move(row));
    }
    if (lines.back().rfind("accuracy,", 0) != 0) throw FormatError("report: missing accuracy line");
    return ConfusionMatrix(std::move(classes), std::move(counts));
}

void write_report(const ConfusionMatrix& matrix, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << format_report(matrix);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ConfusionMatrix read_report(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_report(ss.str());
}

Feature image_feature(const GrayImage& image) {
    const Grid<double> small = resize_area(image.pixels(), kFeatureSize);
    return {small.values().begin(), small.values().end()};
}

CentroidModel fit_centroids(std::span<const LabeledFeature> samples, std::vector<std::string> classes) {
    if (samples.empty()) throw InvalidArgument("fit_centroids: no samples");
    if (classes.empty()) {
        for (const auto& s : samples) {
            if (std::find(classes.begin(), classes.end(), s.label) == classes.end()) classes.push_back(s.label);
        }
    }
    const std::size_t dim = samples.front().feature.size();
    if (dim == 0) throw DimensionError("fit_centroids: empty feature vectors");

    CentroidModel model{classes, std::vector<Feature>(classes.size(), Feature(dim, 0.0))};
    std::vector<std::size_t> counts(classes.size(), 0);
    for (const auto& s : samples) {
        if (s.feature.size() != dim) throw DimensionError("fit_centroids: inconsistent feature dimensions");
        const auto it = std::find(classes.begin(), classes.end(), s.label);
        if (it == classes.end()) throw InvalidArgument("fit_centroids: undeclared class '" + s.label + "'");
        const auto c = static_cast<std::size_t>(it - classes.begin());
        for (std::size_t i = 0; i < dim; ++i) model.centroids[c][i] += s.feature[i];
        ++counts[c];
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (counts[c] == 0) throw InvalidArgument("fit_centroids: class '" + classes[c] + "' has no samples");
        for (auto& v : model.centroids[c]) v /= static_cast<double>(counts[c]);
    }
    return model;
}

std::string predict(const CentroidModel& model, std::span<const double> feature) {
    if (model.centroids.empty()) throw InvalidArgument("predict: empty model");
    std::size_t best = 0;
    double best_d2 = INFINITY;
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
        const auto& centroid = model.centroids[c];
        if (centroid.size() != feature.size()) {
            throw DimensionError("predict: feature has " + std::to_string(feature.size()) +
                                 " dims, model expects " + std::to_string(centroid.size()));
        }
        double d2 = 0.0;
        for (std::size_t i = 0; i < feature.size(); ++i) {
            const double d = feature[i] - centroid[i];
            d2 += d * d;
        }
        if (d2 < best_d2) {
            best_d2 = d2;
            best = c;
        }
    }
    return model.classes[best];
}

}  // namespace cofflow
