#ifndef VOXC_NETWORK_HPP
#define VOXC_NETWORK_HPP

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "voxc/layers.hpp"
#include "voxc/rng.hpp"
#include "voxc/tensor.hpp"

namespace voxc {

/// Weights and bias of one parameterized layer. The trainable flag can be
/// toggled at any time without touching the tensors; the optimizer skips
/// groups with trainable == false.
template <typename T>
struct ParamGroup {
    std::string name;
    Tensor<T> weight;
    Tensor<T> bias;
    bool trainable = true;
};

template <typename T>
struct NetworkParameters {
    std::vector<ParamGroup<T>> groups;
};

template <typename T>
std::size_t param_count(const NetworkParameters<T>& params) {
    std::size_t n = 0;
    for (const auto& g : params.groups) n += g.weight.numel() + g.bias.numel();
    return n;
}

template <typename T>
struct GroupGrad {
    Tensor<T> dw;
    Tensor<T> db;
};

/// Gradients aligned one-to-one with NetworkParameters::groups.
template <typename T>
using GradSet = std::vector<GroupGrad<T>>;

template <typename T>
GradSet<T> make_zero_grads(const NetworkParameters<T>& params) {
    GradSet<T> g;
    g.reserve(params.groups.size());
    for (const auto& grp : params.groups) {
        GroupGrad<T> gg;
        gg.dw.resize(grp.weight.shape);
        gg.db.resize(grp.bias.shape);
        gg.dw.fill(T(0));
        gg.db.fill(T(0));
        g.push_back(std::move(gg));
    }
    return g;
}

template <typename T>
void zero_grads(GradSet<T>& g) {
    for (auto& gg : g) {
        gg.dw.fill(T(0));
        gg.db.fill(T(0));
    }
}

// Glorot-uniform weights, zero bias, drawn from a seeded generator.
template <typename T>
ParamGroup<T> init_group(const LayerSpec& spec, std::string name, Rng& rng) {
    ParamGroup<T> g;
    g.name = std::move(name);
    std::size_t fan_in, fan_out;
    if (spec.kind == LayerKind::conv2d) {
        fan_in = spec.in_channels * spec.kernel_size * spec.kernel_size;
        fan_out = spec.out_channels * spec.kernel_size * spec.kernel_size;
        g.weight.resize({spec.out_channels, spec.in_channels, spec.kernel_size,
                         spec.kernel_size});
        g.bias.resize({spec.out_channels});
    } else if (spec.kind == LayerKind::fully_connected) {
        fan_in = spec.in_dim;
        fan_out = spec.out_dim;
        g.weight.resize({spec.out_dim, spec.in_dim});
        g.bias.resize({spec.out_dim});
    } else {
        throw ArgumentError("init_group: layer kind has no parameters");
    }
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (T& v : g.weight.data) v = static_cast<T>(rng.uniform(-bound, bound));
    g.bias.fill(T(0));
    return g;
}

/// Parameters for every parameterized layer of a chain, named by kind and
/// position ("conv1", "fc2", ...).
template <typename T>
NetworkParameters<T> init_chain_params(const std::vector<LayerSpec>& specs,
                                       std::uint64_t seed) {
    NetworkParameters<T> params;
    Rng rng(seed);
    std::size_t conv_n = 0, fc_n = 0;
    for (const auto& spec : specs) {
        if (!spec.has_params()) continue;
        std::string name = spec.kind == LayerKind::conv2d
                               ? "conv" + std::to_string(++conv_n)
                               : "fc" + std::to_string(++fc_n);
        params.groups.push_back(init_group<T>(spec, std::move(name), rng));
    }
    return params;
}

template <typename T>
void validate_chain(const std::vector<LayerSpec>& specs,
                    const NetworkParameters<T>& params) {
    std::size_t want = 0;
    for (const auto& s : specs)
        if (s.has_params()) ++want;
    if (want != params.groups.size()) {
        throw DimensionError("network: " + std::to_string(want) +
                             " parameterized layers but " +
                             std::to_string(params.groups.size()) +
                             " parameter groups");
    }
    std::unordered_set<std::string> names;
    std::size_t gi = 0;
    for (const auto& s : specs) {
        if (!s.has_params()) continue;
        const auto& g = params.groups[gi++];
        if (!names.insert(g.name).second) {
            throw ArgumentError("network: duplicate parameter group name '" + g.name + "'");
        }
        if (s.kind == LayerKind::conv2d) {
            std::vector<std::size_t> wshape = {s.out_channels, s.in_channels,
                                               s.kernel_size, s.kernel_size};
            if (g.weight.shape != wshape || g.bias.numel() != s.out_channels) {
                throw DimensionError("network: group '" + g.name +
                                     "' shape inconsistent with conv2d spec");
            }
        } else {
            if (g.weight.shape != std::vector<std::size_t>{s.out_dim, s.in_dim} ||
                g.bias.numel() != s.out_dim) {
                throw DimensionError("network: group '" + g.name +
                                     "' shape inconsistent with fully_connected spec");
            }
        }
    }
}

/// Per-pass activation storage. acts[i] is the input of layer i;
/// acts[size] is the chain output. Reused across passes to avoid
/// reallocating.
template <typename T>
struct ChainCache {
    std::vector<Tensor<T>> acts;
    bool valid = false;
};

inline std::size_t parameterized_count(const std::vector<LayerSpec>& specs) {
    std::size_t n = 0;
    for (const auto& s : specs)
        if (s.has_params()) ++n;
    return n;
}

// group_base lets one parameter list back several consecutive sub-chains.
template <typename T>
const Tensor<T>& chain_forward(const std::vector<LayerSpec>& specs,
                               const std::vector<ParamGroup<T>>& groups,
                               const Tensor<T>& x, ChainCache<T>& cache,
                               std::size_t group_base = 0) {
    cache.acts.resize(specs.size() + 1);
    cache.acts[0] = x;
    std::size_t gi = group_base;
    for (std::size_t li = 0; li < specs.size(); ++li) {
        const LayerSpec& spec = specs[li];
        const Tensor<T>& in = cache.acts[li];
        Tensor<T>& out = cache.acts[li + 1];
        switch (spec.kind) {
            case LayerKind::conv2d: {
                const auto& g = groups[gi++];
                if (in.rank() != 3 || in.shape[0] != spec.in_channels) {
                    throw DimensionError("chain: layer " + std::to_string(li) +
                                         " (conv2d) got input " + shape_str(in));
                }
                detail::ConvDims d = conv_dims(spec, in.shape[1], in.shape[2]);
                out.resize({d.cout, d.ho, d.wo});
                detail::conv2d_fwd(in.ptr(), g.weight.ptr(), g.bias.ptr(), out.ptr(), d);
                break;
            }
            case LayerKind::fully_connected: {
                const auto& g = groups[gi++];
                if (in.numel() != spec.in_dim) {
                    throw DimensionError("chain: layer " + std::to_string(li) +
                                         " (fully_connected) expects " +
                                         std::to_string(spec.in_dim) +
                                         " inputs, got " + std::to_string(in.numel()));
                }
                out.resize({spec.out_dim});
                detail::fc_fwd(in.ptr(), g.weight.ptr(), g.bias.ptr(), out.ptr(),
                               spec.out_dim, spec.in_dim);
                break;
            }
            case LayerKind::leaky_relu: {
                out.resize(in.shape);
                const T a = static_cast<T>(spec.slope);
                for (std::size_t i = 0; i < in.numel(); ++i) {
                    T v = in[i];
                    out[i] = v > T(0) ? v : a * v;
                }
                break;
            }
            case LayerKind::sigmoid: {
                out.resize(in.shape);
                for (std::size_t i = 0; i < in.numel(); ++i) {
                    out[i] = T(1) / (T(1) + std::exp(-in[i]));
                }
                break;
            }
        }
    }
    cache.valid = true;
    return cache.acts.back();
}

/// Reverse pass over the chain. Accumulates (+=) parameter gradients for
/// trainable groups into `grads`, leaves frozen groups untouched, and
/// writes the gradient w.r.t. the chain input into `gx`.
template <typename T>
void chain_backward(const std::vector<LayerSpec>& specs,
                    const std::vector<ParamGroup<T>>& groups,
                    const ChainCache<T>& cache, const Tensor<T>& loss_grad,
                    GradSet<T>& grads, Tensor<T>& gx, std::size_t group_base = 0) {
    if (!cache.valid || cache.acts.size() != specs.size() + 1) {
        throw StateError("chain_backward: no forward pass retained for this input");
    }
    if (loss_grad.numel() != cache.acts.back().numel()) {
        throw DimensionError("chain_backward: loss gradient has " +
                             std::to_string(loss_grad.numel()) +
                             " elements, output has " +
                             std::to_string(cache.acts.back().numel()));
    }
    std::size_t gi = group_base + parameterized_count(specs);
    Tensor<T> gy = loss_grad;
    Tensor<T> gprev;
    for (std::size_t li = specs.size(); li-- > 0;) {
        const LayerSpec& spec = specs[li];
        const Tensor<T>& in = cache.acts[li];
        switch (spec.kind) {
            case LayerKind::conv2d: {
                const auto& g = groups[--gi];
                detail::ConvDims d = conv_dims(spec, in.shape[1], in.shape[2]);
                if (g.trainable) {
                    detail::conv2d_bwd_params(in.ptr(), gy.ptr(), grads[gi].dw.ptr(),
                                              grads[gi].db.ptr(), d);
                }
                gprev.resize(in.shape);
                detail::conv2d_bwd_input(g.weight.ptr(), gy.ptr(), gprev.ptr(), d);
                std::swap(gy, gprev);
                break;
            }
            case LayerKind::fully_connected: {
                const auto& g = groups[--gi];
                if (g.trainable) {
                    detail::fc_bwd_params(in.ptr(), gy.ptr(), grads[gi].dw.ptr(),
                                          grads[gi].db.ptr(), spec.out_dim, spec.in_dim);
                }
                gprev.resize(in.shape);
                detail::fc_bwd_input(g.weight.ptr(), gy.ptr(), gprev.ptr(),
                                     spec.out_dim, spec.in_dim);
                std::swap(gy, gprev);
                break;
            }
            case LayerKind::leaky_relu: {
                const T a = static_cast<T>(spec.slope);
                gprev.resize(in.shape);
                for (std::size_t i = 0; i < in.numel(); ++i) {
                    gprev[i] = in[i] > T(0) ? gy[i] : a * gy[i];
                }
                std::swap(gy, gprev);
                break;
            }
            case LayerKind::sigmoid: {
                const Tensor<T>& out = cache.acts[li + 1];
                gprev.resize(in.shape);
                for (std::size_t i = 0; i < in.numel(); ++i) {
                    gprev[i] = gy[i] * out[i] * (T(1) - out[i]);
                }
                std::swap(gy, gprev);
                break;
            }
        }
    }
    gx = std::move(gy);
}

/// An ordered layer chain plus its parameters. forward() retains the
/// intermediate activations that backward() consumes.
template <typename T>
class Network {
public:
    Network(std::vector<LayerSpec> specs, NetworkParameters<T> params)
        : specs_(std::move(specs)), params_(std::move(params)) {
        validate_chain(specs_, params_);
    }

    Network(std::vector<LayerSpec> specs, std::uint64_t seed)
        : Network(specs, init_chain_params<T>(specs, seed)) {}

    const Tensor<T>& forward(const Tensor<T>& x) {
        return chain_forward(specs_, params_.groups, x, cache_);
    }

    struct BackwardResult {
        GradSet<T> grads;
        Tensor<T> input_grad;
    };

    BackwardResult backward(const Tensor<T>& loss_grad) {
        if (!cache_.valid) {
            throw StateError("backward: no forward pass has been evaluated");
        }
        BackwardResult r;
        r.grads = make_zero_grads(params_);
        chain_backward(specs_, params_.groups, cache_, loss_grad, r.grads,
                       r.input_grad);
        return r;
    }

    const std::vector<LayerSpec>& specs() const { return specs_; }
    NetworkParameters<T>& params() { return params_; }
    const NetworkParameters<T>& params() const { return params_; }
    std::size_t param_count() const { return voxc::param_count(params_); }
    ChainCache<T>& cache() { return cache_; }

private:
    std::vector<LayerSpec> specs_;
    NetworkParameters<T> params_;
    ChainCache<T> cache_;
};

}  // namespace voxc

#endif  // VOXC_NETWORK_HPP
