#ifndef VOXC_OPTIMIZER_HPP
#define VOXC_OPTIMIZER_HPP

#include <string>

#include "voxc/network.hpp"

namespace voxc {

/// SGD with classical momentum: v <- momentum * v + g; p <- p - lr * v.
/// Frozen groups are skipped entirely, their velocity included.
template <typename T>
class SgdOptimizer {
public:
    SgdOptimizer(const NetworkParameters<T>& params, double learning_rate,
                 double momentum)
        : lr_(static_cast<T>(learning_rate)),
          momentum_(static_cast<T>(momentum)),
          velocity_(make_zero_grads(params)) {}

    void step(NetworkParameters<T>& params, const GradSet<T>& grads) {
        if (grads.size() != params.groups.size() ||
            velocity_.size() != params.groups.size()) {
            throw StateError("sgd_step: gradient set not aligned with parameters (" +
                             std::to_string(grads.size()) + " grads, " +
                             std::to_string(params.groups.size()) + " groups)");
        }
        for (std::size_t gi = 0; gi < params.groups.size(); ++gi) {
            auto& group = params.groups[gi];
            if (!group.trainable) continue;
            if (!grads[gi].dw.same_shape(group.weight) ||
                !grads[gi].db.same_shape(group.bias)) {
                throw StateError("sgd_step: gradient shapes for group '" + group.name +
                                 "' do not match its parameters");
            }
            update(group.weight, grads[gi].dw, velocity_[gi].dw);
            update(group.bias, grads[gi].db, velocity_[gi].db);
        }
    }

    GradSet<T>& velocity() { return velocity_; }
    const GradSet<T>& velocity() const { return velocity_; }
    double learning_rate() const { return static_cast<double>(lr_); }
    double momentum() const { return static_cast<double>(momentum_); }
    void set_learning_rate(double lr) { lr_ = static_cast<T>(lr); }

private:
    void update(Tensor<T>& p, const Tensor<T>& g, Tensor<T>& v) {
        const std::size_t n = p.numel();
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = momentum_ * v[i] + g[i];
            p[i] -= lr_ * v[i];
        }
    }

    T lr_;
    T momentum_;
    GradSet<T> velocity_;
};

}  // namespace voxc

#endif  // VOXC_OPTIMIZER_HPP
