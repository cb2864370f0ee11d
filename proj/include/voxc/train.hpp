#ifndef VOXC_TRAIN_HPP
#define VOXC_TRAIN_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "voxc/dataset.hpp"
#include "voxc/loss.hpp"
#include "voxc/models.hpp"
#include "voxc/optimizer.hpp"

namespace voxc {

struct TrainConfig {
    double learning_rate = 0.1;
    double momentum = 0.9;
    std::size_t batch_size = 16;
    std::size_t epochs = 100;
    std::uint64_t seed = 0;
    std::size_t freeze_epochs = 300;  // decoder release point (absolute epoch)
    std::size_t ramp_epochs = 200;
    ModelVariant model_variant = ModelVariant::high_res_stacked;
    LossKind loss = LossKind::weighted_bce;
    double s_min = 1e-3;

    void validate() const {
        if (!(learning_rate > 0)) throw ArgumentError("train: learning_rate must be > 0");
        if (momentum < 0 || momentum >= 1) {
            throw ArgumentError("train: momentum must lie in [0, 1)");
        }
        if (batch_size == 0) throw ArgumentError("train: batch_size must be >= 1");
    }
};

struct TrainHistory {
    std::vector<double> loss;  // per-epoch mean sample loss
};

struct EpochInfo {
    std::size_t epoch = 0;
    double loss = 0.0;
    double weight = 1.0;  // unoccupied-voxel weight in effect this epoch
};

namespace detail {

// One epoch sequence shared by every trainer. Deterministic for a fixed
// (inputs, config, start_epoch): the shuffle stream depends only on the
// seed, and gradient accumulation runs in sample order.
template <typename Model, typename LoadInput, typename TargetAt, typename PreEpoch,
          typename OnEpoch>
TrainHistory run_epochs(Model& model, SgdOptimizer<float>& opt, std::size_t n_samples,
                        std::size_t target_len, const TrainConfig& cfg, double s0,
                        std::size_t start_epoch, LoadInput&& load_input,
                        TargetAt&& target_at, PreEpoch&& pre_epoch,
                        OnEpoch&& on_epoch) {
    if (n_samples == 0) throw ArgumentError("train: empty dataset");
    cfg.validate();
    ImbalanceSchedule schedule{s0, cfg.ramp_epochs, cfg.s_min};
    Rng shuffle_rng(mix_seed(cfg.seed, 0x7368756666ULL));
    std::vector<std::size_t> order(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) order[i] = i;

    GradSet<float> grads = make_zero_grads(model.params());
    Tensor<float> input;
    Tensor<float> grad_buf({target_len});
    TrainHistory history;
    history.loss.reserve(cfg.epochs);

    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        std::size_t epoch = start_epoch + e;
        pre_epoch(epoch);
        double w = weight_at(schedule, epoch);
        shuffle_rng.shuffle(order);
        double epoch_loss = 0.0;
        for (std::size_t b0 = 0; b0 < n_samples; b0 += cfg.batch_size) {
            std::size_t bn = std::min(cfg.batch_size, n_samples - b0);
            zero_grads(grads);
            const float inv_bn = 1.0f / static_cast<float>(bn);
            for (std::size_t k = 0; k < bn; ++k) {
                std::size_t idx = order[b0 + k];
                load_input(idx, input);
                const Tensor<float>& probs = model.forward(input);
                double sample_loss =
                    loss_raw(cfg.loss, probs.ptr(), target_at(idx), target_len, w,
                             grad_buf.ptr());
                if (!std::isfinite(sample_loss)) {
                    throw TrainingError("training diverged (non-finite loss) at epoch " +
                                        std::to_string(epoch));
                }
                epoch_loss += sample_loss;
                for (float& g : grad_buf.data) g *= inv_bn;
                model.backward(grad_buf, grads);
            }
            opt.step(model.params(), grads);
        }
        double mean_loss = epoch_loss / static_cast<double>(n_samples);
        history.loss.push_back(mean_loss);
        on_epoch(EpochInfo{epoch, mean_loss, w});
    }
    return history;
}

// Chain adapter with the same forward/backward surface as CompletionNet,
// used for auto-encoder training.
struct AeNet {
    std::vector<LayerSpec> specs = autoencoder_specs();
    NetworkParameters<float> parameters;
    ChainCache<float> cache;
    Tensor<float> input_grad;

    explicit AeNet(std::uint64_t seed) {
        auto ae = init_autoencoder<float>(seed);
        parameters.groups.push_back(std::move(ae.encoder));
        parameters.groups.push_back(std::move(ae.decoder));
    }

    const Tensor<float>& forward(const Tensor<float>& x) {
        return chain_forward(specs, parameters.groups, x, cache);
    }
    void backward(const Tensor<float>& gy, GradSet<float>& grads) {
        chain_backward(specs, parameters.groups, cache, gy, grads, input_grad);
    }
    NetworkParameters<float>& params() { return parameters; }
};

}  // namespace detail

using AeEpochCallback = std::function<void(const EpochInfo&)>;

struct AeTrainResult {
    AutoEncoderParams<float> params;
    TrainHistory history;
};

/// Trains the shared sub-region auto-encoder on pooled 10^3 blocks with
/// the imbalance-weighted loss.
inline AeTrainResult train_autoencoder(const SubregionStore& blocks,
                                       const TrainConfig& cfg,
                                       const AeEpochCallback& cb = {}) {
    if (blocks.blocks.empty()) throw ArgumentError("train_autoencoder: empty block store");
    detail::AeNet net(cfg.seed);
    SgdOptimizer<float> opt(net.params(), cfg.learning_rate, cfg.momentum);
    double s0 = occupancy_ratio(blocks, cfg.s_min);

    auto load_input = [&](std::size_t idx, Tensor<float>& x) {
        x.resize({kBlockVoxels});
        const auto& b = blocks.blocks[idx];
        for (std::size_t i = 0; i < kBlockVoxels; ++i) x[i] = static_cast<float>(b[i]);
    };
    auto target_at = [&](std::size_t idx) { return blocks.blocks[idx].data(); };
    TrainHistory history = detail::run_epochs(
        net, opt, blocks.blocks.size(), kBlockVoxels, cfg, s0, 0, load_input,
        target_at, [](std::size_t) {}, [&](const EpochInfo& info) { if (cb) cb(info); });

    AeTrainResult result;
    result.params.encoder = std::move(net.parameters.groups[0]);
    result.params.decoder = std::move(net.parameters.groups[1]);
    result.history = std::move(history);
    return result;
}

using CompletionEpochCallback =
    std::function<void(const EpochInfo&, const CompletionNet<float>&)>;

struct CompletionTrainResult {
    CompletionNet<float> model;
    SgdOptimizer<float> opt;
    TrainHistory history;
    std::size_t end_epoch = 0;
};

namespace detail {

inline void check_store_matches(const CompletionNet<float>& model,
                                const SampleStore& store) {
    if (store.records.empty()) throw ArgumentError("train: empty sample store");
    if (store.resolution != model.target_resolution()) {
        throw ResolutionError("train: store resolution " +
                              std::to_string(store.resolution) + " does not match " +
                              model_variant_name(model.variant()) + " target " +
                              std::to_string(model.target_resolution()));
    }
    if (store.depth_width != model.depth_size() ||
        store.depth_height != model.depth_size()) {
        throw ResolutionError("train: store depth " + std::to_string(store.depth_width) +
                              "x" + std::to_string(store.depth_height) +
                              " does not match model input " +
                              std::to_string(model.depth_size()));
    }
}

inline TrainHistory run_completion_epochs(CompletionNet<float>& model,
                                          SgdOptimizer<float>& opt,
                                          const SampleStore& store,
                                          const TrainConfig& cfg,
                                          std::size_t start_epoch,
                                          const CompletionEpochCallback& cb) {
    check_store_matches(model, store);
    double s0 = occupancy_ratio(store, cfg.s_min);
    const std::size_t target_len = model.output_dim();
    const std::uint32_t ds = model.depth_size();
    auto load_input = [&](std::size_t idx, Tensor<float>& x) {
        x.resize({1, ds, ds});
        x.data = store.records[idx].depth.values;
    };
    auto target_at = [&](std::size_t idx) {
        return store.records[idx].target.occupancy.data();
    };
    auto pre_epoch = [&](std::size_t epoch) {
        if (model.variant() == ModelVariant::high_res_stacked) {
            // The decompression layer only updates after freeze_epochs.
            model.decoder_group().trainable = epoch >= cfg.freeze_epochs;
        }
    };
    return run_epochs(model, opt, store.records.size(), target_len, cfg, s0,
                      start_epoch, load_input, target_at, pre_epoch,
                      [&](const EpochInfo& info) { if (cb) cb(info, model); });
}

}  // namespace detail

/// Phase two of the curriculum: the stacked CNN trains end-to-end through
/// the decoder taken from a pre-trained auto-encoder. The decoder stays
/// frozen until cfg.freeze_epochs, so the CNN initially regresses the
/// compressed code representation through a fixed map.
inline CompletionTrainResult train_completion(const SampleStore& store,
                                              const AutoEncoderParams<float>& ae,
                                              const TrainConfig& cfg,
                                              const CompletionEpochCallback& cb = {}) {
    if (cfg.model_variant != ModelVariant::high_res_stacked) {
        throw ArgumentError("train_completion: config variant must be high_res_stacked");
    }
    if (store.depth_width != store.depth_height) {
        throw ArgumentError("train_completion: depth maps must be square");
    }
    CompletionNet<float> model =
        CompletionNet<float>::stacked_from_ae(ae, cfg.seed, store.depth_width);
    SgdOptimizer<float> opt(model.params(), cfg.learning_rate, cfg.momentum);
    TrainHistory history = detail::run_completion_epochs(model, opt, store, cfg, 0, cb);
    return {std::move(model), std::move(opt), std::move(history), cfg.epochs};
}

/// Direct low-resolution regression (10^3 outputs, no codec).
inline CompletionTrainResult train_low_res(const SampleStore& store,
                                           const TrainConfig& cfg,
                                           const CompletionEpochCallback& cb = {}) {
    if (cfg.model_variant != ModelVariant::low_res_direct) {
        throw ArgumentError("train_low_res: config variant must be low_res_direct");
    }
    if (store.depth_width != store.depth_height) {
        throw ArgumentError("train_low_res: depth maps must be square");
    }
    CompletionNet<float> model =
        CompletionNet<float>::make(ModelVariant::low_res_direct, cfg.seed,
                                   store.depth_width);
    SgdOptimizer<float> opt(model.params(), cfg.learning_rate, cfg.momentum);
    TrainHistory history = detail::run_completion_epochs(model, opt, store, cfg, 0, cb);
    return {std::move(model), std::move(opt), std::move(history), cfg.epochs};
}

/// Curriculum fine-tuning: continues optimization of a trained model on a
/// more diverse store. The epoch counter (and with it the imbalance ramp
/// and the freeze schedule) picks up where the loaded model stopped.
inline TrainHistory finetune(CompletionNet<float>& model, SgdOptimizer<float>& opt,
                             std::size_t start_epoch, const SampleStore& store,
                             const TrainConfig& cfg,
                             const CompletionEpochCallback& cb = {}) {
    if (cfg.model_variant != model.variant()) {
        throw CheckpointError(std::string("finetune: checkpoint variant ") +
                              model_variant_name(model.variant()) +
                              " does not match configured " +
                              model_variant_name(cfg.model_variant));
    }
    return detail::run_completion_epochs(model, opt, store, cfg, start_epoch, cb);
}

}  // namespace voxc

#endif  // VOXC_TRAIN_HPP
