#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "voxc/checkpoint.hpp"
#include "voxc/loss.hpp"
#include "voxc/metrics.hpp"
#include "voxc/optimizer.hpp"
#include "voxc/primitives.hpp"
#include "voxc/train.hpp"

using voxc::ImbalanceSchedule;
using voxc::SampleStore;
using voxc::Tensor;
using voxc::TrainConfig;

namespace {

SampleStore tiny_store(std::size_t per_class, std::uint32_t n_views,
                       std::uint32_t res, std::uint32_t depth, std::uint64_t seed) {
    std::vector<voxc::ClassedMesh> meshes;
    std::vector<voxc::PrimitiveKind> kinds = {voxc::PrimitiveKind::box,
                                              voxc::PrimitiveKind::icosphere,
                                              voxc::PrimitiveKind::cylinder};
    for (std::size_t c = 0; c < kinds.size(); ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            meshes.push_back({voxc::random_primitive(kinds[c],
                                                     voxc::mix_seed(seed, c * 100 + i)),
                              static_cast<std::uint16_t>(c)});
        }
    }
    auto result = voxc::build_dataset(meshes, n_views, res, depth, seed);
    return result.store;
}

}  // namespace

TEST(OccupancyRatio, SingleTargetFormula) {
    SampleStore store;
    store.resolution = 30;
    voxc::Sample s;
    s.target = voxc::VoxelGrid(30);
    for (std::size_t i = 0; i < 2700; ++i) s.target.occupancy[i] = 1;
    s.depth = voxc::DepthMap(4, 4);
    store.records.push_back(s);
    EXPECT_DOUBLE_EQ(voxc::occupancy_ratio(store), 2700.0 / 24300.0);
}

TEST(OccupancyRatio, AllEmptyClampsToFloor) {
    SampleStore store;
    store.resolution = 10;
    voxc::Sample s;
    s.target = voxc::VoxelGrid(10);
    s.depth = voxc::DepthMap(4, 4);
    store.records.push_back(s);
    EXPECT_DOUBLE_EQ(voxc::occupancy_ratio(store, 1e-3), 1e-3);
}

TEST(OccupancyRatio, PooledCounts) {
    SampleStore store;
    store.resolution = 30;
    for (std::size_t occ : {100u, 300u}) {
        voxc::Sample s;
        s.target = voxc::VoxelGrid(30);
        for (std::size_t i = 0; i < occ; ++i) s.target.occupancy[i] = 1;
        s.depth = voxc::DepthMap(4, 4);
        store.records.push_back(s);
    }
    EXPECT_DOUBLE_EQ(voxc::occupancy_ratio(store), 400.0 / 53600.0);
}

TEST(OccupancyRatio, EmptyStoreIsArgumentError) {
    SampleStore store;
    EXPECT_THROW(voxc::occupancy_ratio(store), voxc::ArgumentError);
}

TEST(WeightAt, ScheduleEndpointsAndMidpoint) {
    ImbalanceSchedule sched{0.2, 200, 1e-3};
    EXPECT_DOUBLE_EQ(voxc::weight_at(sched, 0), 0.2);
    EXPECT_DOUBLE_EQ(voxc::weight_at(sched, 200), 1.0);
    EXPECT_DOUBLE_EQ(voxc::weight_at(sched, 5000), 1.0);
    EXPECT_DOUBLE_EQ(voxc::weight_at(sched, 100), 0.6);
}

TEST(WeightAt, MonotoneNonDecreasing) {
    ImbalanceSchedule sched{0.05, 137, 1e-3};
    double prev = -1.0;
    for (std::size_t e = 0; e < 300; ++e) {
        double w = voxc::weight_at(sched, e);
        EXPECT_GE(w, prev);
        prev = w;
    }
}

TEST(WeightedBce, PerfectPredictionNearZeroLoss) {
    Tensor<float> pred({4}, {1.0f, 0.0f, 1.0f, 0.0f});
    Tensor<std::uint8_t> target({4}, {1, 0, 1, 0});
    auto [loss, grad] = voxc::weighted_bce(pred, target, 0.5);
    EXPECT_LE(loss, 1.1e-7);  // -ln(1 - eps), eps = 1e-7
    EXPECT_GE(loss, 0.0);
}

TEST(WeightedBce, AllOccupiedAtHalfIsLn2) {
    Tensor<double> pred({8});
    pred.fill(0.5);
    Tensor<std::uint8_t> target({8});
    target.fill(1);
    auto [loss, grad] = voxc::weighted_bce(pred, target, 0.123);
    EXPECT_NEAR(loss, std::log(2.0), 1e-12);
}

TEST(WeightedBce, AllUnoccupiedAtHalfWithHalfWeight) {
    Tensor<double> pred({8});
    pred.fill(0.5);
    Tensor<std::uint8_t> target({8});
    target.fill(0);
    auto [loss, grad] = voxc::weighted_bce(pred, target, 0.5);
    EXPECT_NEAR(loss, 0.5 * std::log(2.0), 1e-12);
}

TEST(WeightedBce, ShapeMismatchIsDimensionError) {
    Tensor<double> pred({4});
    Tensor<std::uint8_t> target({5});
    EXPECT_THROW(voxc::weighted_bce(pred, target, 1.0), voxc::DimensionError);
}

TEST(WeightedBce, GradientMatchesFiniteDifferences) {
    voxc::Rng rng(77);
    for (int it = 0; it < 20; ++it) {
        std::size_t n = 3 + rng.below(16);
        Tensor<double> pred({n});
        Tensor<std::uint8_t> target({n});
        for (std::size_t i = 0; i < n; ++i) {
            pred[i] = rng.uniform(0.05, 0.95);
            target[i] = rng.uniform() < 0.5 ? 1 : 0;
        }
        double w = rng.uniform(0.01, 1.0);
        auto [loss, grad] = voxc::weighted_bce(pred, target, w);
        for (std::size_t i = 0; i < n; ++i) {
            auto probe = [&](double v) {
                auto p = pred;
                p[i] = v;
                return voxc::weighted_bce(p, target, w).first;
            };
            double fd = oracles::central_diff(probe, pred[i]);
            EXPECT_LT(oracles::rel_err(grad[i], fd), 1e-6) << "elem " << i;
        }
    }
}

TEST(SgdStep, PlainStep) {
    voxc::NetworkParameters<float> params;
    voxc::ParamGroup<float> g;
    g.name = "p";
    g.weight = Tensor<float>({1}, {1.0f});
    g.bias = Tensor<float>({1}, {0.0f});
    params.groups.push_back(g);
    voxc::SgdOptimizer<float> opt(params, 0.1, 0.0);
    voxc::GradSet<float> grads = voxc::make_zero_grads(params);
    grads[0].dw[0] = 2.0f;
    opt.step(params, grads);
    EXPECT_FLOAT_EQ(params.groups[0].weight[0], 0.8f);
}

TEST(SgdStep, FrozenGroupUntouched) {
    voxc::NetworkParameters<float> params;
    voxc::ParamGroup<float> g;
    g.name = "p";
    g.weight = Tensor<float>({2}, {1.0f, -1.0f});
    g.bias = Tensor<float>({1}, {0.5f});
    g.trainable = false;
    params.groups.push_back(g);
    voxc::SgdOptimizer<float> opt(params, 0.5, 0.9);
    voxc::GradSet<float> grads = voxc::make_zero_grads(params);
    grads[0].dw.fill(3.0f);
    grads[0].db.fill(3.0f);
    opt.step(params, grads);
    EXPECT_FLOAT_EQ(params.groups[0].weight[0], 1.0f);
    EXPECT_FLOAT_EQ(params.groups[0].weight[1], -1.0f);
    EXPECT_FLOAT_EQ(params.groups[0].bias[0], 0.5f);
}

TEST(SgdStep, MomentumHandIteration) {
    // Two steps, momentum 0.9, g = 1, lr = 1, p0 = 0: p = -(1 + 1.9).
    voxc::NetworkParameters<double> params;
    voxc::ParamGroup<double> g;
    g.name = "p";
    g.weight = Tensor<double>({1}, {0.0});
    g.bias = Tensor<double>({1}, {0.0});
    params.groups.push_back(g);
    voxc::SgdOptimizer<double> opt(params, 1.0, 0.9);
    voxc::GradSet<double> grads = voxc::make_zero_grads(params);
    grads[0].dw[0] = 1.0;
    opt.step(params, grads);
    EXPECT_DOUBLE_EQ(params.groups[0].weight[0], -1.0);
    opt.step(params, grads);
    EXPECT_DOUBLE_EQ(params.groups[0].weight[0], -2.9);
}

TEST(SgdStep, MisalignedGradientsIsStateError) {
    voxc::NetworkParameters<float> params;
    voxc::ParamGroup<float> g;
    g.name = "p";
    g.weight = Tensor<float>({1}, {0.0f});
    g.bias = Tensor<float>({1}, {0.0f});
    params.groups.push_back(g);
    voxc::SgdOptimizer<float> opt(params, 0.1, 0.0);
    voxc::GradSet<float> empty;
    EXPECT_THROW(opt.step(params, empty), voxc::StateError);
}

TEST(TrainAutoencoder, EmptyStoreIsArgumentError) {
    voxc::SubregionStore blocks;
    TrainConfig cfg;
    EXPECT_THROW(voxc::train_autoencoder(blocks, cfg), voxc::ArgumentError);
}

TEST(TrainAutoencoder, SeedFixedRerunIsIdentical) {
    auto store = tiny_store(1, 1, 30, 16, 3);
    auto blocks = voxc::build_subregion_store(store);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.batch_size = 16;
    cfg.learning_rate = 0.5;
    cfg.seed = 42;
    auto a = voxc::train_autoencoder(blocks, cfg);
    auto b = voxc::train_autoencoder(blocks, cfg);
    EXPECT_EQ(a.params.encoder.weight.data, b.params.encoder.weight.data);
    EXPECT_EQ(a.params.decoder.weight.data, b.params.decoder.weight.data);
    EXPECT_EQ(a.history.loss, b.history.loss);
    EXPECT_EQ(a.history.loss.size(), cfg.epochs);
}

TEST(TrainAutoencoder, LossDecreasesOnSmallOverfit) {
    auto store = tiny_store(1, 1, 30, 16, 7);
    auto blocks = voxc::build_subregion_store(store);
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.batch_size = 27;
    cfg.learning_rate = 1.0;
    cfg.ramp_epochs = 0;  // pinned weight so per-epoch losses are comparable
    cfg.seed = 1;
    auto r = voxc::train_autoencoder(blocks, cfg);
    EXPECT_LT(r.history.loss.back(), 0.5 * r.history.loss.front());
}

TEST(TrainCompletion, DecoderFrozenBeforeFreezeEpochs) {
    auto store = tiny_store(1, 2, 30, 32, 11);
    auto blocks = voxc::build_subregion_store(store);
    TrainConfig ae_cfg;
    ae_cfg.epochs = 3;
    ae_cfg.learning_rate = 0.5;
    auto ae = voxc::train_autoencoder(blocks, ae_cfg);

    TrainConfig cfg;
    cfg.epochs = 6;
    cfg.freeze_epochs = 4;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.05;
    std::vector<std::vector<float>> decoder_per_epoch;
    auto result = voxc::train_completion(
        store, ae.params, cfg,
        [&](const voxc::EpochInfo&, const voxc::CompletionNet<float>& model) {
            decoder_per_epoch.push_back(
                const_cast<voxc::CompletionNet<float>&>(model).decoder_group().weight.data);
        });
    ASSERT_EQ(decoder_per_epoch.size(), 6u);
    for (std::size_t e = 0; e < 4; ++e) {
        EXPECT_EQ(decoder_per_epoch[e], ae.params.decoder.weight.data)
            << "decoder changed during frozen epoch " << e;
    }
    EXPECT_NE(decoder_per_epoch[5], ae.params.decoder.weight.data)
        << "decoder never unfroze";
    EXPECT_EQ(result.history.loss.size(), cfg.epochs);
}

TEST(TrainLowRes, OutputDimensionAndParamBudget) {
    auto model = voxc::CompletionNet<float>::make(voxc::ModelVariant::low_res_direct, 0);
    EXPECT_EQ(model.output_dim(), 1000u);
    auto stacked =
        voxc::CompletionNet<float>::make(voxc::ModelVariant::high_res_stacked, 0);
    EXPECT_LT(model.param_count(), stacked.param_count());
}

TEST(TrainLowRes, OverfitTenSamplesReaches98Percent) {
    std::vector<voxc::ClassedMesh> meshes;
    voxc::PrimitiveKind kinds[3] = {voxc::PrimitiveKind::box,
                                    voxc::PrimitiveKind::icosphere,
                                    voxc::PrimitiveKind::cylinder};
    for (int i = 0; i < 5; ++i) {
        meshes.push_back({voxc::random_primitive(kinds[i % 3], voxc::mix_seed(31415, i)),
                          static_cast<std::uint16_t>(i % 3)});
    }
    auto store = voxc::build_dataset(meshes, 2, 10, 64, 31415).store;
    ASSERT_EQ(store.records.size(), 10u);
    TrainConfig cfg;
    cfg.model_variant = voxc::ModelVariant::low_res_direct;
    cfg.learning_rate = 0.1;
    cfg.momentum = 0.9;
    cfg.batch_size = 5;
    cfg.epochs = 110;
    cfg.ramp_epochs = 60;
    cfg.seed = 3;
    auto result = voxc::train_low_res(store, cfg);
    auto report = voxc::evaluate(result.model, store, 0.5);
    EXPECT_GE(report.overall_accuracy, 0.98);
}

TEST(TrainLowRes, HistoryLengthMatchesEpochs) {
    auto store = tiny_store(1, 2, 10, 32, 13);
    TrainConfig cfg;
    cfg.model_variant = voxc::ModelVariant::low_res_direct;
    cfg.epochs = 4;
    cfg.batch_size = 6;
    cfg.learning_rate = 0.05;
    auto result = voxc::train_low_res(store, cfg);
    EXPECT_EQ(result.history.loss.size(), 4u);
}

TEST(Training, DivergenceNamesTheEpoch) {
    auto store = tiny_store(1, 1, 10, 32, 29);
    TrainConfig cfg;
    cfg.model_variant = voxc::ModelVariant::low_res_direct;
    cfg.loss = voxc::LossKind::squared_error;
    cfg.learning_rate = 1e30;  // guaranteed blow-up
    cfg.batch_size = 3;
    cfg.epochs = 10;
    try {
        voxc::train_low_res(store, cfg);
        FAIL() << "expected TrainingError";
    } catch (const voxc::TrainingError& e) {
        EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    }
}

TEST(Finetune, ZeroEpochsLeavesModelUnchanged) {
    auto store = tiny_store(1, 1, 10, 32, 17);
    TrainConfig cfg;
    cfg.model_variant = voxc::ModelVariant::low_res_direct;
    cfg.epochs = 2;
    cfg.batch_size = 3;
    cfg.learning_rate = 0.05;
    auto result = voxc::train_low_res(store, cfg);
    auto before = result.model.params().groups[0].weight.data;
    TrainConfig ft = cfg;
    ft.epochs = 0;
    auto history = voxc::finetune(result.model, result.opt, result.end_epoch, store, ft);
    EXPECT_TRUE(history.loss.empty());
    EXPECT_EQ(result.model.params().groups[0].weight.data, before);
}

TEST(Finetune, FirstEpochLossEqualsEvalLossOfLoadedModel) {
    auto store = tiny_store(1, 1, 10, 32, 19);
    TrainConfig cfg;
    cfg.model_variant = voxc::ModelVariant::low_res_direct;
    cfg.epochs = 2;
    cfg.batch_size = 64;  // single batch per epoch
    cfg.learning_rate = 0.05;
    cfg.ramp_epochs = 0;  // weight pinned at 1 so the comparison is direct
    auto result = voxc::train_low_res(store, cfg);

    // Independent evaluation of the trained model on the full store.
    double eval_loss = 0.0;
    Tensor<float> input({1, 32, 32});
    for (const auto& rec : store.records) {
        input.data = rec.depth.values;
        const auto& probs = result.model.forward(input);
        eval_loss += voxc::detail::loss_raw(cfg.loss, probs.ptr(),
                                            rec.target.occupancy.data(),
                                            probs.numel(), 1.0, (float*)nullptr);
    }
    eval_loss /= static_cast<double>(store.records.size());

    TrainConfig ft = cfg;
    ft.epochs = 1;
    auto history = voxc::finetune(result.model, result.opt, result.end_epoch, store, ft);
    ASSERT_EQ(history.loss.size(), 1u);
    EXPECT_NEAR(history.loss[0], eval_loss, 1e-12);
}

TEST(Finetune, VariantMismatchIsCheckpointError) {
    auto store = tiny_store(1, 1, 10, 32, 23);
    TrainConfig cfg;
    cfg.model_variant = voxc::ModelVariant::low_res_direct;
    cfg.epochs = 1;
    cfg.batch_size = 4;
    cfg.learning_rate = 0.05;
    auto result = voxc::train_low_res(store, cfg);
    TrainConfig ft = cfg;
    ft.model_variant = voxc::ModelVariant::high_res_stacked;
    EXPECT_THROW(voxc::finetune(result.model, result.opt, result.end_epoch, store, ft),
                 voxc::CheckpointError);
}

TEST(Training, DescentSanityOnRandomBatches) {
    // With a small learning rate a single step must not increase the
    // batch loss by more than 1e-3, averaged over 20 random batches.
    double total_delta = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        voxc::Rng rng(voxc::mix_seed(900, seed));
        std::vector<voxc::LayerSpec> specs = {voxc::LayerSpec::fc(30, 20),
                                              voxc::LayerSpec::leaky(0.01),
                                              voxc::LayerSpec::fc(20, 12),
                                              voxc::LayerSpec::sigmoid()};
        auto params = voxc::init_chain_params<float>(specs, seed);
        voxc::SgdOptimizer<float> opt(params, 1e-3, 0.0);
        std::size_t batch = 4;
        std::vector<Tensor<float>> xs;
        std::vector<Tensor<std::uint8_t>> ys;
        for (std::size_t b = 0; b < batch; ++b) {
            Tensor<float> x({30});
            for (auto& v : x.data) v = static_cast<float>(rng.uniform(0.0, 1.0));
            Tensor<std::uint8_t> y({12});
            for (auto& v : y.data) v = rng.uniform() < 0.3 ? 1 : 0;
            xs.push_back(std::move(x));
            ys.push_back(std::move(y));
        }
        auto batch_loss = [&](const voxc::NetworkParameters<float>& p) {
            double acc = 0.0;
            voxc::ChainCache<float> cache;
            auto pcopy = p;
            for (std::size_t b = 0; b < batch; ++b) {
                const auto& probs = voxc::chain_forward(specs, pcopy.groups, xs[b], cache);
                acc += voxc::detail::weighted_bce_raw(probs.ptr(), ys[b].ptr(),
                                                      probs.numel(), 0.7,
                                                      (float*)nullptr);
            }
            return acc / batch;
        };
        double before = batch_loss(params);
        voxc::GradSet<float> grads = voxc::make_zero_grads(params);
        voxc::ChainCache<float> cache;
        Tensor<float> gx, grad_buf({12});
        for (std::size_t b = 0; b < batch; ++b) {
            const auto& probs = voxc::chain_forward(specs, params.groups, xs[b], cache);
            voxc::detail::weighted_bce_raw(probs.ptr(), ys[b].ptr(), probs.numel(), 0.7,
                                           grad_buf.ptr());
            for (auto& g : grad_buf.data) g /= batch;
            voxc::chain_backward(specs, params.groups, cache, grad_buf, grads, gx);
        }
        opt.step(params, grads);
        double after = batch_loss(params);
        total_delta += after - before;
    }
    EXPECT_LE(total_delta / 20.0, 1e-3);
}

TEST(Checkpoint, RoundTripPreservesForwardBitwise) {
    auto model = voxc::CompletionNet<float>::make(voxc::ModelVariant::high_res_stacked,
                                                  31, 64);
    voxc::SgdOptimizer<float> opt(model.params(), 0.1, 0.9);
    auto ckpt = voxc::make_checkpoint(model, &opt, 12, 31);
    std::string bytes = voxc::write_checkpoint_bytes(ckpt);
    auto back = voxc::read_checkpoint_bytes(bytes);
    EXPECT_EQ(voxc::write_checkpoint_bytes(back), bytes);
    auto restored = voxc::model_from_checkpoint(back);
    EXPECT_EQ(restored.epoch, 12u);

    Tensor<float> x({1, 64, 64});
    voxc::Rng rng(5);
    for (auto& v : x.data) v = static_cast<float>(rng.uniform(0.0, 1.0));
    const auto& y1 = model.forward(x);
    auto y1copy = y1.data;
    const auto& y2 = restored.model.forward(x);
    EXPECT_EQ(y1copy, y2.data);
}

TEST(Checkpoint, CorruptedMagicIsFormatError) {
    auto model = voxc::CompletionNet<float>::make(voxc::ModelVariant::low_res_direct, 1);
    auto ckpt = voxc::make_checkpoint(model, nullptr, 0, 1);
    std::string bytes = voxc::write_checkpoint_bytes(ckpt);
    bytes[1] = 'Z';
    EXPECT_THROW(voxc::read_checkpoint_bytes(bytes), voxc::FormatError);
}

TEST(Checkpoint, TruncationDetected) {
    auto model = voxc::CompletionNet<float>::make(voxc::ModelVariant::low_res_direct, 2);
    auto ckpt = voxc::make_checkpoint(model, nullptr, 0, 2);
    std::string bytes = voxc::write_checkpoint_bytes(ckpt);
    std::string cut = bytes.substr(0, bytes.size() / 2);
    EXPECT_THROW(voxc::read_checkpoint_bytes(cut), voxc::FormatError);
}

TEST(Checkpoint, AutoEncoderRoundTrip) {
    auto ae = voxc::init_autoencoder<float>(44);
    auto ckpt = voxc::make_checkpoint(ae, 100, 44);
    auto back = voxc::autoencoder_from_checkpoint(
        voxc::read_checkpoint_bytes(voxc::write_checkpoint_bytes(ckpt)));
    EXPECT_EQ(back.encoder.weight.data, ae.encoder.weight.data);
    EXPECT_EQ(back.decoder.bias.data, ae.decoder.bias.data);
}

TEST(Checkpoint, VariantMismatchIsCheckpointError) {
    auto ae = voxc::init_autoencoder<float>(45);
    auto ckpt = voxc::make_checkpoint(ae, 0, 45);
    EXPECT_THROW(voxc::model_from_checkpoint(ckpt), voxc::CheckpointError);
    auto model = voxc::CompletionNet<float>::make(voxc::ModelVariant::low_res_direct, 3);
    auto mckpt = voxc::make_checkpoint(model, nullptr, 0, 3);
    EXPECT_THROW(voxc::autoencoder_from_checkpoint(mckpt), voxc::CheckpointError);
}

TEST(StackedModel, ParameterBudgetIs4097354) {
    auto model =
        voxc::CompletionNet<float>::make(voxc::ModelVariant::high_res_stacked, 0, 64);
    EXPECT_EQ(model.param_count(), 4097354u);
}

TEST(StackedModel, SixParameterizedLayersIncludingDecoder) {
    auto model =
        voxc::CompletionNet<float>::make(voxc::ModelVariant::high_res_stacked, 0, 64);
    const auto& groups = model.params().groups;
    ASSERT_EQ(groups.size(), 6u);
    EXPECT_EQ(groups[0].name, "conv1");
    EXPECT_EQ(groups[1].name, "conv2");
    EXPECT_EQ(groups[2].name, "conv3");
    EXPECT_EQ(groups[3].name, "fc1");
    EXPECT_EQ(groups[4].name, "fc2");
    EXPECT_EQ(groups[5].name, "decoder");
    EXPECT_EQ(groups[5].weight.numel() + groups[5].bias.numel(), 151000u);
}

TEST(StackedModel, GradientMatchesFiniteDifferencesThroughDecoder) {
    // End-to-end check of the code fan-out: double-precision FD on a few
    // parameters of each group against the analytic accumulation.
    auto model =
        voxc::CompletionNet<float>::make(voxc::ModelVariant::high_res_stacked, 7, 64);
    voxc::Rng rng(8);
    Tensor<float> x({1, 64, 64});
    for (auto& v : x.data) v = static_cast<float>(rng.uniform(0.0, 1.0));
    Tensor<std::uint8_t> target({27000});
    for (auto& v : target.data) v = rng.uniform() < 0.1 ? 1 : 0;
    const double w = 0.3;

    const auto& probs = model.forward(x);
    Tensor<float> grad_buf({27000});
    voxc::detail::weighted_bce_raw(probs.ptr(), target.ptr(), 27000, w, grad_buf.ptr());
    voxc::GradSet<float> grads = voxc::make_zero_grads(model.params());
    model.backward(grad_buf, grads);

    auto loss_at = [&]() {
        const auto& p = model.forward(x);
        return voxc::detail::weighted_bce_raw(p.ptr(), target.ptr(), 27000, w,
                                              (float*)nullptr);
    };
    voxc::Rng pick(9);
    for (std::size_t gi = 0; gi < model.params().groups.size(); ++gi) {
        auto& group = model.params().groups[gi];
        for (int rep = 0; rep < 3; ++rep) {
            std::size_t i = pick.below(group.weight.numel());
            float saved = group.weight[i];
            const float h = 1e-3f;
            group.weight[i] = saved + h;
            double lp = loss_at();
            group.weight[i] = saved - h;
            double lm = loss_at();
            group.weight[i] = saved;
            double fd = (lp - lm) / (2.0 * static_cast<double>(h));
            EXPECT_LT(oracles::rel_err(grads[gi].dw[i], fd), 2e-2)
                << group.name << "[" << i << "]";
        }
    }
}
