#ifndef VOXC_METRICS_HPP
#define VOXC_METRICS_HPP

#include <cstdint>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "voxc/dataset.hpp"
#include "voxc/models.hpp"

namespace voxc {

/// Fraction of voxels whose thresholded prediction matches the target.
/// Counts all voxels, so sparse grids reward empty predictions; report it
/// together with IoU.
template <typename T>
double voxel_accuracy(const Tensor<T>& pred, const VoxelGrid& gt, double tau = 0.5) {
    if (pred.numel() != gt.size()) {
        throw DimensionError("voxel_accuracy: prediction has " +
                             std::to_string(pred.numel()) + " values, grid " +
                             std::to_string(gt.size()));
    }
    std::size_t matches = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        bool p = static_cast<double>(pred[i]) > tau;
        if (p == (gt.occupancy[i] != 0)) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(gt.size());
}

/// Intersection over union of the thresholded prediction and the target;
/// two empty sets count as a perfect 1.0.
template <typename T>
double iou(const Tensor<T>& pred, const VoxelGrid& gt, double tau = 0.5) {
    if (pred.numel() != gt.size()) {
        throw DimensionError("iou: prediction has " + std::to_string(pred.numel()) +
                             " values, grid " + std::to_string(gt.size()));
    }
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < gt.size(); ++i) {
        bool p = static_cast<double>(pred[i]) > tau;
        bool g = gt.occupancy[i] != 0;
        if (p && g) ++inter;
        if (p || g) ++uni;
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

struct EvalReport {
    std::size_t sample_count = 0;
    double overall_accuracy = 0.0;
    double overall_iou = 0.0;
    std::map<std::uint16_t, double> per_angle;  // view_index -> mean accuracy
    std::map<std::uint16_t, double> per_class;  // class_id -> mean accuracy
};

/// One forward pass per sample; integer match counts aggregate exactly, so
/// the report is independent of record order and per-angle means
/// recombine to the overall accuracy.
inline EvalReport evaluate(CompletionNet<float>& model, const SampleStore& store,
                           double tau = 0.5) {
    if (store.records.empty()) throw ArgumentError("evaluate: empty store");
    if (store.resolution != model.target_resolution()) {
        throw ResolutionError("evaluate: store resolution " +
                              std::to_string(store.resolution) + " does not match " +
                              model_variant_name(model.variant()));
    }
    if (store.depth_width != model.depth_size() ||
        store.depth_height != model.depth_size()) {
        throw ResolutionError("evaluate: depth size mismatch");
    }

    const std::size_t voxels = model.output_dim();
    struct Bucket {
        std::uint64_t matches = 0;
        std::size_t count = 0;
    };
    std::map<std::uint16_t, Bucket> by_angle, by_class;
    std::uint64_t total_matches = 0;
    double iou_sum = 0.0;
    Tensor<float> input;
    for (const auto& rec : store.records) {
        input.resize({1, store.depth_height, store.depth_width});
        input.data = rec.depth.values;
        const Tensor<float>& probs = model.forward(input);
        std::uint64_t matches = 0;
        std::size_t inter = 0, uni = 0;
        for (std::size_t i = 0; i < voxels; ++i) {
            bool p = static_cast<double>(probs[i]) > tau;
            bool g = rec.target.occupancy[i] != 0;
            if (p == g) ++matches;
            if (p && g) ++inter;
            if (p || g) ++uni;
        }
        total_matches += matches;
        iou_sum += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
        by_angle[rec.view_index].matches += matches;
        by_angle[rec.view_index].count += 1;
        by_class[rec.class_id].matches += matches;
        by_class[rec.class_id].count += 1;
    }

    EvalReport report;
    report.sample_count = store.records.size();
    report.overall_accuracy =
        static_cast<double>(total_matches) /
        (static_cast<double>(report.sample_count) * static_cast<double>(voxels));
    report.overall_iou = iou_sum / static_cast<double>(report.sample_count);
    for (const auto& [angle, bucket] : by_angle) {
        report.per_angle[angle] = static_cast<double>(bucket.matches) /
                                  (static_cast<double>(bucket.count) *
                                   static_cast<double>(voxels));
    }
    for (const auto& [cls, bucket] : by_class) {
        report.per_class[cls] = static_cast<double>(bucket.matches) /
                                (static_cast<double>(bucket.count) *
                                 static_cast<double>(voxels));
    }
    return report;
}

/// Flat key/value lines, one metric per line, for machine diffing.
inline std::string report_text(const EvalReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(6);
    out << "samples " << report.sample_count << "\n";
    out << "overall_accuracy " << report.overall_accuracy << "\n";
    out << "overall_iou " << report.overall_iou << "\n";
    for (const auto& [angle, acc] : report.per_angle) {
        out << "angle_" << angle << "_accuracy " << acc << "\n";
    }
    for (const auto& [cls, acc] : report.per_class) {
        out << "class_" << cls << "_accuracy " << acc << "\n";
    }
    return out.str();
}

}  // namespace voxc

#endif  // VOXC_METRICS_HPP
