#include <gtest/gtest.h>

#include "voxc/codec.hpp"
#include "voxc/rng.hpp"

using voxc::Tensor;
using voxc::VoxelGrid;

namespace {

VoxelGrid random_grid(std::uint64_t seed, double density = 0.2) {
    VoxelGrid g(30);
    voxc::Rng rng(seed);
    for (auto& v : g.occupancy) v = rng.uniform() < density ? 1 : 0;
    return g;
}

}  // namespace

TEST(Partition, SingleVoxelLandsInExpectedBlock) {
    VoxelGrid g(30);
    g.set(12, 17, 29, 1);
    auto set = voxc::partition(g);
    // b = floor(g/10), l = g mod 10.
    std::size_t bidx = voxc::detail::block_index(1, 1, 2);
    std::size_t lidx = voxc::detail::local_index(2, 7, 9);
    for (std::size_t b = 0; b < voxc::kBlockCount; ++b) {
        for (std::size_t l = 0; l < voxc::kBlockVoxels; ++l) {
            bool expect = b == bidx && l == lidx;
            EXPECT_EQ(set.blocks[b][l], expect ? 1 : 0);
        }
    }
}

TEST(Partition, RoundTripAndConservation) {
    auto g = random_grid(3);
    auto set = voxc::partition(g);
    std::size_t block_occ = 0;
    for (const auto& b : set.blocks)
        for (auto v : b) block_occ += v;
    EXPECT_EQ(block_occ, g.occupied_count());
    EXPECT_TRUE(voxc::assemble(set) == g);
}

TEST(Partition, WrongResolutionIsResolutionError) {
    VoxelGrid g(10);
    EXPECT_THROW(voxc::partition(g), voxc::ResolutionError);
}

TEST(Partition, EmptyGridGivesEmptyBlocks) {
    VoxelGrid g(30);
    auto set = voxc::partition(g);
    for (const auto& b : set.blocks)
        for (auto v : b) EXPECT_EQ(v, 0);
}

TEST(Assemble, PartitionOfAssembleIsIdentity) {
    voxc::SubRegionSet set;
    voxc::Rng rng(9);
    for (auto& b : set.blocks)
        for (auto& v : b) v = rng.uniform() < 0.3 ? 1 : 0;
    auto grid = voxc::assemble(set);
    auto round = voxc::partition(grid);
    for (std::size_t b = 0; b < voxc::kBlockCount; ++b) {
        EXPECT_EQ(round.blocks[b], set.blocks[b]);
    }
}

TEST(Assemble, AllOccupiedBlocksGiveFullGrid) {
    voxc::SubRegionSet set;
    for (auto& b : set.blocks) b.fill(1);
    auto grid = voxc::assemble(set);
    EXPECT_EQ(grid.occupied_count(), 27000u);
}

TEST(EncodeBlock, OutputDimensionIs150) {
    auto ae = voxc::init_autoencoder<float>(1);
    Tensor<float> block({voxc::kBlockVoxels});
    voxc::Rng rng(2);
    for (auto& v : block.data) v = rng.uniform() < 0.2 ? 1.0f : 0.0f;
    auto code = voxc::encode_block(block, ae);
    EXPECT_EQ(code.numel(), 150u);
}

TEST(EncodeBlock, ZeroBlockGivesActivatedBias) {
    auto ae = voxc::init_autoencoder<double>(3);
    for (auto& v : ae.encoder.bias.data) v = -0.5 + 0.001 * (&v - ae.encoder.bias.ptr());
    Tensor<double> zero({voxc::kBlockVoxels});
    zero.fill(0.0);
    auto code = voxc::encode_block(zero, ae);
    for (std::size_t i = 0; i < voxc::kCodeDim; ++i) {
        double b = ae.encoder.bias[i];
        double want = b > 0 ? b : 0.01 * b;
        EXPECT_DOUBLE_EQ(code[i], want);
    }
}

TEST(EncodeBlock, Deterministic) {
    auto ae = voxc::init_autoencoder<float>(4);
    Tensor<float> block({voxc::kBlockVoxels});
    voxc::Rng rng(5);
    for (auto& v : block.data) v = rng.uniform() < 0.4 ? 1.0f : 0.0f;
    auto a = voxc::encode_block(block, ae);
    auto b = voxc::encode_block(block, ae);
    EXPECT_EQ(a.data, b.data);
}

TEST(DecodeBlock, ZeroCodeGivesSigmoidBias) {
    auto ae = voxc::init_autoencoder<double>(6);
    voxc::Rng rng(7);
    for (auto& v : ae.decoder.bias.data) v = rng.uniform(-2.0, 2.0);
    Tensor<double> code({voxc::kCodeDim});
    code.fill(0.0);
    auto probs = voxc::decode_block(code, ae);
    for (std::size_t i = 0; i < voxc::kBlockVoxels; ++i) {
        EXPECT_DOUBLE_EQ(probs[i], 1.0 / (1.0 + std::exp(-ae.decoder.bias[i])));
    }
}

TEST(DecodeBlock, OutputDimensionIs1000AndInsideUnitInterval) {
    auto ae = voxc::init_autoencoder<float>(8);
    Tensor<float> code({voxc::kCodeDim});
    voxc::Rng rng(9);
    for (auto& v : code.data) v = static_cast<float>(rng.uniform(-3.0, 3.0));
    auto probs = voxc::decode_block(code, ae);
    EXPECT_EQ(probs.numel(), 1000u);
    for (float p : probs.data) {
        EXPECT_GT(p, 0.0f);
        EXPECT_LT(p, 1.0f);
    }
}

TEST(DecodeBlock, PositionalEquivariance) {
    // Shared weights: permuting block codes permutes decoded blocks
    // identically.
    auto ae = voxc::init_autoencoder<float>(10);
    voxc::Rng rng(11);
    Tensor<float> code_a({voxc::kCodeDim}), code_b({voxc::kCodeDim});
    for (auto& v : code_a.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    for (auto& v : code_b.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
    auto probs_a = voxc::decode_block(code_a, ae);
    auto probs_b = voxc::decode_block(code_b, ae);
    // Decoding is position-independent, so swapping inputs swaps outputs.
    EXPECT_EQ(voxc::decode_block(code_b, ae).data, probs_b.data);
    EXPECT_EQ(voxc::decode_block(code_a, ae).data, probs_a.data);
}

TEST(CompressionRatio, PaperValueAt150) {
    EXPECT_DOUBLE_EQ(voxc::compression_ratio(150), 0.15);
}

TEST(CompressionRatio, Extremes) {
    EXPECT_DOUBLE_EQ(voxc::compression_ratio(1000), 1.0);
    EXPECT_DOUBLE_EQ(voxc::compression_ratio(1), 0.001);
    EXPECT_THROW(voxc::compression_ratio(0), voxc::ArgumentError);
}

TEST(AutoEncoderParams, ParameterCounts) {
    auto ae = voxc::init_autoencoder<float>(0);
    EXPECT_EQ(ae.encoder.weight.numel() + ae.encoder.bias.numel(), 150150u);
    EXPECT_EQ(ae.decoder.weight.numel() + ae.decoder.bias.numel(), 151000u);
}
