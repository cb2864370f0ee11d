// Independent reference implementations used only by tests. These stay
// deliberately naive (quadruple loops, direct formulas) so they check the
// production paths without sharing code with them.
#ifndef VOXC_TESTS_ORACLES_HPP
#define VOXC_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "voxc/layers.hpp"
#include "voxc/network.hpp"
#include "voxc/tensor.hpp"

namespace oracles {

// Cross-correlation by quadruple loop with explicit bounds checks.
template <typename T>
voxc::Tensor<T> naive_conv2d(const voxc::Tensor<T>& x, const voxc::LayerSpec& s,
                             const voxc::Tensor<T>& w, const voxc::Tensor<T>& b) {
    std::size_t cin = s.in_channels, cout = s.out_channels, k = s.kernel_size;
    std::size_t h = x.shape[1], wd = x.shape[2];
    std::size_t ho = (h + 2 * s.zero_padding - k) / s.stride + 1;
    std::size_t wo = (wd + 2 * s.zero_padding - k) / s.stride + 1;
    voxc::Tensor<T> y({cout, ho, wo});
    for (std::size_t oc = 0; oc < cout; ++oc)
        for (std::size_t oh = 0; oh < ho; ++oh)
            for (std::size_t ow = 0; ow < wo; ++ow) {
                double acc = static_cast<double>(b[oc]);
                for (std::size_t ic = 0; ic < cin; ++ic)
                    for (std::size_t kh = 0; kh < k; ++kh)
                        for (std::size_t kw = 0; kw < k; ++kw) {
                            std::ptrdiff_t ih =
                                static_cast<std::ptrdiff_t>(oh * s.stride + kh) -
                                static_cast<std::ptrdiff_t>(s.zero_padding);
                            std::ptrdiff_t iw =
                                static_cast<std::ptrdiff_t>(ow * s.stride + kw) -
                                static_cast<std::ptrdiff_t>(s.zero_padding);
                            if (ih < 0 || iw < 0 ||
                                ih >= static_cast<std::ptrdiff_t>(h) ||
                                iw >= static_cast<std::ptrdiff_t>(wd))
                                continue;
                            acc += static_cast<double>(
                                       w[((oc * cin + ic) * k + kh) * k + kw]) *
                                   static_cast<double>(
                                       x[(ic * h + static_cast<std::size_t>(ih)) * wd +
                                         static_cast<std::size_t>(iw)]);
                        }
                y[(oc * ho + oh) * wo + ow] = static_cast<T>(acc);
            }
    return y;
}

// Relative error with a floor: below gradient magnitude 1e-3 the
// comparison degrades to absolute agreement, which is all central
// differences can resolve there.
inline double rel_err(double a, double n) {
    double denom = std::max(std::max(std::fabs(a), std::fabs(n)), 1e-3);
    return std::fabs(a - n) / denom;
}

// Central finite differences of a scalar function, step 1e-5.
inline double central_diff(const std::function<double(double)>& f, double x0,
                           double h = 1e-5) {
    return (f(x0 + h) - f(x0 - h)) / (2.0 * h);
}

// Squared-error loss against a fixed target, evaluated in double.
template <typename T>
double sq_loss(const voxc::Tensor<T>& y, const std::vector<double>& target) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.numel(); ++i) {
        double d = static_cast<double>(y[i]) - target[i];
        acc += 0.5 * d * d;
    }
    return acc;
}

template <typename T>
voxc::Tensor<T> sq_loss_grad(const voxc::Tensor<T>& y,
                             const std::vector<double>& target) {
    voxc::Tensor<T> g(y.shape);
    for (std::size_t i = 0; i < y.numel(); ++i) {
        g[i] = static_cast<T>(static_cast<double>(y[i]) - target[i]);
    }
    return g;
}

// Finite-difference oracle for a whole chain: double-precision forward
// around perturbed parameters / inputs. Returns max relative error between
// the supplied analytic gradients and the numeric ones.
struct ChainGradCheck {
    std::vector<voxc::LayerSpec> specs;
    voxc::NetworkParameters<double> params;
    voxc::Tensor<double> x;
    std::vector<double> target;

    double loss_at() const {
        voxc::ChainCache<double> cache;
        auto p = params;
        const auto& y = voxc::chain_forward(specs, p.groups, x, cache);
        return sq_loss(y, target);
    }

    double fd_param(std::size_t group, bool weight, std::size_t idx,
                    double h = 1e-5) const {
        auto probe = [&](double v) {
            auto p = params;
            (weight ? p.groups[group].weight[idx] : p.groups[group].bias[idx]) = v;
            voxc::ChainCache<double> cache;
            const auto& y = voxc::chain_forward(specs, p.groups, x, cache);
            return sq_loss(y, target);
        };
        double x0 = weight ? params.groups[group].weight[idx]
                           : params.groups[group].bias[idx];
        return central_diff(probe, x0, h);
    }

    double fd_input(std::size_t idx, double h = 1e-5) const {
        auto probe = [&](double v) {
            auto xi = x;
            xi[idx] = v;
            voxc::ChainCache<double> cache;
            auto p = params;
            const auto& y = voxc::chain_forward(specs, p.groups, xi, cache);
            return sq_loss(y, target);
        };
        return central_diff(probe, x[idx], h);
    }
};

}  // namespace oracles

#endif  // VOXC_TESTS_ORACLES_HPP
