#ifndef VOXC_LOSS_HPP
#define VOXC_LOSS_HPP

#include <cmath>
#include <cstdint>
#include <string>

#include "voxc/dataset.hpp"
#include "voxc/tensor.hpp"

namespace voxc {

enum class LossKind : std::uint8_t { weighted_bce = 0, squared_error = 1 };

/// Unoccupied-voxel weight ramp. Training starts with unoccupied terms
/// scaled to s0 = #occupied / #unoccupied and ramps linearly to parity:
/// w(e) = s0 + (1 - s0) * min(1, e / ramp_epochs).
struct ImbalanceSchedule {
    double s0 = 1.0;
    std::size_t ramp_epochs = 200;
    double s_min = 1e-3;
};

inline double weight_at(const ImbalanceSchedule& schedule, std::size_t epoch) {
    if (schedule.ramp_epochs == 0) return 1.0;
    double frac = std::min(1.0, static_cast<double>(epoch) /
                                    static_cast<double>(schedule.ramp_epochs));
    return schedule.s0 + (1.0 - schedule.s0) * frac;
}

namespace detail {

inline double clamped_ratio(std::uint64_t occupied, std::uint64_t total, double s_min) {
    std::uint64_t unoccupied = total - occupied;
    if (unoccupied == 0) return 1.0;
    double s0 = static_cast<double>(occupied) / static_cast<double>(unoccupied);
    return std::min(1.0, std::max(s_min, s0));
}

}  // namespace detail

/// Pooled occupied/unoccupied ratio over all targets, clamped to
/// [s_min, 1].
inline double occupancy_ratio(const SampleStore& store, double s_min = 1e-3) {
    if (store.records.empty()) {
        throw ArgumentError("occupancy_ratio: empty store");
    }
    std::uint64_t occupied = 0, total = 0;
    for (const auto& rec : store.records) {
        occupied += rec.target.occupied_count();
        total += rec.target.size();
    }
    return detail::clamped_ratio(occupied, total, s_min);
}

inline double occupancy_ratio(const SubregionStore& blocks, double s_min = 1e-3) {
    if (blocks.blocks.empty()) {
        throw ArgumentError("occupancy_ratio: empty block store");
    }
    std::uint64_t occupied = 0, total = 0;
    for (const auto& b : blocks.blocks) {
        for (std::uint8_t v : b) occupied += v;
        total += b.size();
    }
    return detail::clamped_ratio(occupied, total, s_min);
}

inline constexpr double kBceEps = 1e-7;

namespace detail {

// loss = -mean_i [ y_i ln p_i + w * (1 - y_i) ln(1 - p_i) ], p clamped to
// [eps, 1 - eps]. Loss accumulates in double; the gradient (w.r.t. the
// unclamped prediction; zero where the clamp engages) is written to grad
// when non-null.
template <typename T>
double weighted_bce_raw(const T* pred, const std::uint8_t* target, std::size_t n,
                        double w_unocc, T* grad) {
    double acc = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = static_cast<double>(pred[i]);
        bool clamped = p < kBceEps || p > 1.0 - kBceEps;
        double pc = std::min(1.0 - kBceEps, std::max(kBceEps, p));
        if (target[i]) {
            acc -= std::log(pc);
            if (grad) grad[i] = clamped ? T(0) : static_cast<T>(-inv_n / pc);
        } else {
            acc -= w_unocc * std::log(1.0 - pc);
            if (grad) grad[i] = clamped ? T(0) : static_cast<T>(w_unocc * inv_n / (1.0 - pc));
        }
    }
    return acc * inv_n;
}

// loss = mean_i w_i (p_i - y_i)^2 with w_i = 1 on occupied, w_unocc on
// unoccupied targets.
template <typename T>
double weighted_sq_raw(const T* pred, const std::uint8_t* target, std::size_t n,
                       double w_unocc, T* grad) {
    double acc = 0.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double y = target[i] ? 1.0 : 0.0;
        double w = target[i] ? 1.0 : w_unocc;
        double d = static_cast<double>(pred[i]) - y;
        acc += w * d * d;
        if (grad) grad[i] = static_cast<T>(2.0 * w * d * inv_n);
    }
    return acc * inv_n;
}

template <typename T>
double loss_raw(LossKind kind, const T* pred, const std::uint8_t* target,
                std::size_t n, double w_unocc, T* grad) {
    return kind == LossKind::weighted_bce
               ? weighted_bce_raw(pred, target, n, w_unocc, grad)
               : weighted_sq_raw(pred, target, n, w_unocc, grad);
}

}  // namespace detail

/// Occupancy-imbalance weighted binary cross entropy and its analytic
/// gradient with respect to the predictions.
template <typename T>
std::pair<double, Tensor<T>> weighted_bce(const Tensor<T>& pred,
                                          const Tensor<std::uint8_t>& target,
                                          double w_unocc) {
    if (pred.numel() != target.numel()) {
        throw DimensionError("weighted_bce: prediction has " +
                             std::to_string(pred.numel()) + " values, target " +
                             std::to_string(target.numel()));
    }
    Tensor<T> grad(pred.shape);
    double loss = detail::weighted_bce_raw(pred.ptr(), target.ptr(), pred.numel(),
                                           w_unocc, grad.ptr());
    return {loss, std::move(grad)};
}

}  // namespace voxc

#endif  // VOXC_LOSS_HPP
