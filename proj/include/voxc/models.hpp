#ifndef VOXC_MODELS_HPP
#define VOXC_MODELS_HPP

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "voxc/codec.hpp"
#include "voxc/network.hpp"

namespace voxc {

enum class ModelVariant : std::uint8_t {
    auto_encoder = 0,
    high_res_stacked = 1,
    low_res_direct = 2,
};

inline const char* model_variant_name(ModelVariant v) {
    switch (v) {
        case ModelVariant::auto_encoder: return "auto_encoder";
        case ModelVariant::high_res_stacked: return "high_res_stacked";
        case ModelVariant::low_res_direct: return "low_res_direct";
    }
    return "?";
}

inline constexpr std::size_t kHeadWidth = 480;
inline constexpr std::size_t kCodesDim = kBlockCount * kCodeDim;  // 4050

/// Convolutional trunk shared by both completion variants:
/// conv(1->16, 5x5, s2, p2) -> conv(16->32, 5x5, s2, p2) ->
/// conv(32->64, 3x3, s2, p1), leaky ReLU between.
inline std::vector<LayerSpec> completion_conv_specs() {
    return {LayerSpec::conv(1, 16, 5, 2, 2),  LayerSpec::leaky(0.01),
            LayerSpec::conv(16, 32, 5, 2, 2), LayerSpec::leaky(0.01),
            LayerSpec::conv(32, 64, 3, 2, 1), LayerSpec::leaky(0.01)};
}

inline std::size_t conv_trunk_output_dim(std::uint32_t depth_size) {
    auto specs = completion_conv_specs();
    std::size_t h = depth_size, w = depth_size, c = 1;
    for (const auto& s : specs) {
        if (s.kind != LayerKind::conv2d) continue;
        detail::ConvDims d = conv_dims(s, h, w);
        h = d.ho;
        w = d.wo;
        c = d.cout;
    }
    return c * h * w;
}

/// Head of the stacked variant: fc(flat -> 480) -> leaky -> fc(480 ->
/// 4050) -> leaky. The 4050 outputs are 27 sub-region codes, already in
/// code space (post-activation), ready for the shared decoder.
inline std::vector<LayerSpec> stacked_head_specs(std::uint32_t depth_size) {
    std::size_t flat = conv_trunk_output_dim(depth_size);
    return {LayerSpec::fc(flat, kHeadWidth), LayerSpec::leaky(0.01),
            LayerSpec::fc(kHeadWidth, kCodesDim), LayerSpec::leaky(0.01)};
}

/// Head of the low-resolution variant: direct regression of 1000 voxel
/// probabilities, no codec.
inline std::vector<LayerSpec> low_res_head_specs(std::uint32_t depth_size) {
    std::size_t flat = conv_trunk_output_dim(depth_size);
    return {LayerSpec::fc(flat, kHeadWidth), LayerSpec::leaky(0.01),
            LayerSpec::fc(kHeadWidth, kBlockVoxels), LayerSpec::sigmoid()};
}

inline std::vector<LayerSpec> autoencoder_specs() {
    return {LayerSpec::fc(kBlockVoxels, kCodeDim), LayerSpec::leaky(0.01),
            LayerSpec::fc(kCodeDim, kBlockVoxels), LayerSpec::sigmoid()};
}

/// The depth-map completion network. Both variants share the conv trunk
/// and the 480-wide bottleneck; high_res_stacked finishes with the shared
/// decoder expanded over 27 code slices in parallel plus a sigmoid, the
/// paper-structure "six layer" model (3 conv + 2 fc + decompression).
template <typename T>
class CompletionNet {
public:
    /// Randomly initialized model (decoder included, for the stacked
    /// variant).
    static CompletionNet make(ModelVariant variant, std::uint64_t seed,
                              std::uint32_t depth_size = 64) {
        if (variant == ModelVariant::auto_encoder) {
            throw ArgumentError("CompletionNet: auto_encoder is not a completion variant");
        }
        CompletionNet net;
        net.variant_ = variant;
        net.depth_size_ = depth_size;
        net.conv_specs_ = completion_conv_specs();
        net.head_specs_ = variant == ModelVariant::high_res_stacked
                              ? stacked_head_specs(depth_size)
                              : low_res_head_specs(depth_size);
        Rng rng(seed);
        std::size_t conv_n = 0, fc_n = 0;
        auto add = [&](const std::vector<LayerSpec>& specs) {
            for (const auto& s : specs) {
                if (!s.has_params()) continue;
                std::string name = s.kind == LayerKind::conv2d
                                       ? "conv" + std::to_string(++conv_n)
                                       : "fc" + std::to_string(++fc_n);
                net.params_.groups.push_back(init_group<T>(s, std::move(name), rng));
            }
        };
        add(net.conv_specs_);
        add(net.head_specs_);
        if (variant == ModelVariant::high_res_stacked) {
            net.params_.groups.push_back(
                init_group<T>(LayerSpec::fc(kCodeDim, kBlockVoxels), "decoder", rng));
        }
        return net;
    }

    /// Stacked model whose decompression layer comes from a pre-trained
    /// auto-encoder. The decoder starts frozen; the freeze/unfreeze
    /// schedule toggles its trainable flag.
    static CompletionNet stacked_from_ae(const AutoEncoderParams<T>& ae,
                                         std::uint64_t seed,
                                         std::uint32_t depth_size = 64) {
        ae.validate();
        CompletionNet net = make(ModelVariant::high_res_stacked, seed, depth_size);
        ParamGroup<T>& dec = net.params_.groups.back();
        dec.weight = ae.decoder.weight;
        dec.bias = ae.decoder.bias;
        dec.trainable = false;
        return net;
    }

    /// Rebuild from externally supplied groups (checkpoint loading).
    static CompletionNet from_groups(ModelVariant variant, std::uint32_t depth_size,
                                     NetworkParameters<T> params) {
        CompletionNet net = make(variant, 0, depth_size);
        if (params.groups.size() != net.params_.groups.size()) {
            throw CheckpointError("model groups: expected " +
                                  std::to_string(net.params_.groups.size()) + ", got " +
                                  std::to_string(params.groups.size()));
        }
        for (std::size_t i = 0; i < params.groups.size(); ++i) {
            const auto& want = net.params_.groups[i];
            const auto& got = params.groups[i];
            if (got.name != want.name || got.weight.shape != want.weight.shape ||
                got.bias.shape != want.bias.shape) {
                throw CheckpointError("model group '" + got.name +
                                      "' does not match the " +
                                      model_variant_name(variant) + " architecture");
            }
        }
        net.params_ = std::move(params);
        return net;
    }

    const Tensor<T>& forward(const Tensor<T>& depth) {
        const Tensor<T>& feat =
            chain_forward(conv_specs_, params_.groups, depth, conv_cache_, 0);
        const Tensor<T>& head =
            chain_forward(head_specs_, params_.groups, feat, head_cache_, conv_group_count());
        if (variant_ == ModelVariant::low_res_direct) return head;
        decode_codes(head);
        return probs_;
    }

    /// Accumulates parameter gradients (aligned with params().groups) and
    /// discards the gradient w.r.t. the depth input.
    void backward(const Tensor<T>& grad_output, GradSet<T>& grads) {
        if (grads.size() != params_.groups.size()) {
            throw StateError("CompletionNet::backward: misaligned gradient set");
        }
        const Tensor<T>* head_grad = &grad_output;
        if (variant_ == ModelVariant::high_res_stacked) {
            decode_backward(grad_output, grads);
            head_grad = &codes_grad_;
        }
        chain_backward(head_specs_, params_.groups, head_cache_, *head_grad, grads,
                       feat_grad_, conv_group_count());
        chain_backward(conv_specs_, params_.groups, conv_cache_, feat_grad_, grads,
                       input_grad_, 0);
    }

    ModelVariant variant() const { return variant_; }
    std::uint32_t depth_size() const { return depth_size_; }
    std::uint32_t target_resolution() const {
        return variant_ == ModelVariant::high_res_stacked ? kGridRes : kBlockRes;
    }
    std::size_t output_dim() const {
        return variant_ == ModelVariant::high_res_stacked ? 27000 : kBlockVoxels;
    }

    NetworkParameters<T>& params() { return params_; }
    const NetworkParameters<T>& params() const { return params_; }
    std::size_t param_count() const { return voxc::param_count(params_); }

    ParamGroup<T>& decoder_group() {
        if (variant_ != ModelVariant::high_res_stacked) {
            throw StateError("decoder_group: only the stacked variant has a decoder");
        }
        return params_.groups.back();
    }

    // Timing hooks for the bench command: conv trunk, fc head, decode.
    struct StagedOutput {
        const Tensor<T>* probs;
        double conv_ms, head_ms, decode_ms;
    };
    template <typename Clock>
    StagedOutput forward_staged(const Tensor<T>& depth) {
        StagedOutput out{};
        auto t0 = Clock::now();
        const Tensor<T>& feat =
            chain_forward(conv_specs_, params_.groups, depth, conv_cache_, 0);
        auto t1 = Clock::now();
        const Tensor<T>& head =
            chain_forward(head_specs_, params_.groups, feat, head_cache_, conv_group_count());
        auto t2 = Clock::now();
        if (variant_ == ModelVariant::low_res_direct) {
            out.probs = &head;
        } else {
            decode_codes(head);
            out.probs = &probs_;
        }
        auto t3 = Clock::now();
        auto ms = [](auto a, auto b) {
            return std::chrono::duration<double, std::milli>(b - a).count();
        };
        out.conv_ms = ms(t0, t1);
        out.head_ms = ms(t1, t2);
        out.decode_ms = ms(t2, t3);
        return out;
    }

private:
    std::size_t conv_group_count() const { return parameterized_count(conv_specs_); }

    // Shared decoder over the 27 code slices; probabilities land directly
    // in assembled 30^3 grid order.
    void decode_codes(const Tensor<T>& codes) {
        const ParamGroup<T>& dec = params_.groups.back();
        probs_.resize({27000});
        block_buf_.resize({kBlockVoxels});
        for (std::size_t b = 0; b < kBlockCount; ++b) {
            const T* code = codes.ptr() + b * kCodeDim;
            detail::fc_fwd(code, dec.weight.ptr(), dec.bias.ptr(), block_buf_.ptr(),
                           kBlockVoxels, kCodeDim);
            for (T& v : block_buf_.data) v = T(1) / (T(1) + std::exp(-v));
            std::size_t bi = b / 9, bj = (b / 3) % 3, bk = b % 3;
            detail::scatter_block(block_buf_.ptr(), bi, bj, bk, probs_.ptr());
        }
    }

    // All 27 blocks share the decoder, so the backward pass batches them:
    // one sweep over the 1000 weight rows serves both the code gradients
    // and the (optional) weight gradient, instead of streaming the weight
    // matrix once per block.
    void decode_backward(const Tensor<T>& grad_probs, GradSet<T>& grads) {
        if (grad_probs.numel() != 27000) {
            throw DimensionError("decode_backward: expected 27000 gradient values");
        }
        ParamGroup<T>& dec = params_.groups.back();
        const Tensor<T>& codes = head_cache_.acts.back();
        codes_grad_.resize({kCodesDim});
        codes_grad_.fill(T(0));
        block_gz_.resize({kBlockCount, kBlockVoxels});
        block_p_.resize({kBlockVoxels});
        GroupGrad<T>& dgrad = grads.back();
        for (std::size_t b = 0; b < kBlockCount; ++b) {
            std::size_t bi = b / 9, bj = (b / 3) % 3, bk = b % 3;
            T* gz = block_gz_.ptr() + b * kBlockVoxels;
            detail::gather_block(grad_probs.ptr(), bi, bj, bk, gz);
            detail::gather_block(probs_.ptr(), bi, bj, bk, block_p_.ptr());
            for (std::size_t i = 0; i < kBlockVoxels; ++i) {
                T p = block_p_[i];
                gz[i] *= p * (T(1) - p);
            }
        }
        const bool train_dec = dec.trainable;
        for (std::size_t i = 0; i < kBlockVoxels; ++i) {
            const T* w_row = dec.weight.ptr() + i * kCodeDim;
            T* dw_row = train_dec ? dgrad.dw.ptr() + i * kCodeDim : nullptr;
            T db_acc = T(0);
            for (std::size_t b = 0; b < kBlockCount; ++b) {
                const T g = block_gz_[b * kBlockVoxels + i];
                if (g == T(0)) continue;
                T* gc = codes_grad_.ptr() + b * kCodeDim;
                for (std::size_t j = 0; j < kCodeDim; ++j) gc[j] += g * w_row[j];
                if (train_dec) {
                    const T* code = codes.ptr() + b * kCodeDim;
                    for (std::size_t j = 0; j < kCodeDim; ++j) dw_row[j] += g * code[j];
                    db_acc += g;
                }
            }
            if (train_dec) dgrad.db[i] += db_acc;
        }
    }

    ModelVariant variant_ = ModelVariant::high_res_stacked;
    std::uint32_t depth_size_ = 64;
    std::vector<LayerSpec> conv_specs_;
    std::vector<LayerSpec> head_specs_;
    NetworkParameters<T> params_;
    ChainCache<T> conv_cache_;
    ChainCache<T> head_cache_;
    Tensor<T> probs_;
    Tensor<T> block_buf_;
    Tensor<T> block_gz_;
    Tensor<T> block_p_;
    Tensor<T> codes_grad_;
    Tensor<T> feat_grad_;
    Tensor<T> input_grad_;
};

}  // namespace voxc

#endif  // VOXC_MODELS_HPP
