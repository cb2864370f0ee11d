#ifndef VOXC_CODEC_HPP
#define VOXC_CODEC_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "voxc/network.hpp"
#include "voxc/tensor.hpp"
#include "voxc/voxelize.hpp"

namespace voxc {

// The 30^3 grid splits into a 3x3x3 arrangement of 10^3 blocks. Block
// (bi, bj, bk) local (li, lj, lk) maps to global index 10*b + l per axis.
inline constexpr std::uint32_t kGridRes = 30;
inline constexpr std::uint32_t kBlockRes = 10;
inline constexpr std::uint32_t kBlocksPerAxis = 3;
inline constexpr std::size_t kBlockCount = 27;
inline constexpr std::size_t kBlockVoxels = 1000;
inline constexpr std::size_t kCodeDim = 150;

/// 27 blocks of 10^3 occupancy, ordered by (bi, bj, bk) with bi slowest.
/// Each block is flattened with li slowest, lk fastest — the same order a
/// 10^3 VoxelGrid uses.
struct SubRegionSet {
    std::array<std::array<std::uint8_t, kBlockVoxels>, kBlockCount> blocks{};
};

/// 27 code vectors of dimension 150 (post-activation values), one per
/// block position. 27 * 150 = 4050 = 0.15 * 27000.
template <typename T>
struct SubRegionCodeBlock {
    std::array<std::array<T, kCodeDim>, kBlockCount> codes{};
};

namespace detail {

inline std::size_t block_index(std::size_t bi, std::size_t bj, std::size_t bk) {
    return (bi * kBlocksPerAxis + bj) * kBlocksPerAxis + bk;
}

inline std::size_t local_index(std::size_t li, std::size_t lj, std::size_t lk) {
    return (li * kBlockRes + lj) * kBlockRes + lk;
}

// Copies one 10^3 block out of / into a 30^3 grid laid out (i*30+j)*30+k.
template <typename Src, typename Dst>
void gather_block(const Src* grid, std::size_t bi, std::size_t bj, std::size_t bk,
                  Dst* block) {
    for (std::size_t li = 0; li < kBlockRes; ++li)
        for (std::size_t lj = 0; lj < kBlockRes; ++lj) {
            const Src* row = grid + ((bi * kBlockRes + li) * kGridRes +
                                     (bj * kBlockRes + lj)) *
                                        kGridRes +
                             bk * kBlockRes;
            Dst* out = block + local_index(li, lj, 0);
            for (std::size_t lk = 0; lk < kBlockRes; ++lk) {
                out[lk] = static_cast<Dst>(row[lk]);
            }
        }
}

template <typename Src, typename Dst>
void scatter_block(const Src* block, std::size_t bi, std::size_t bj, std::size_t bk,
                   Dst* grid) {
    for (std::size_t li = 0; li < kBlockRes; ++li)
        for (std::size_t lj = 0; lj < kBlockRes; ++lj) {
            Dst* row = grid + ((bi * kBlockRes + li) * kGridRes +
                               (bj * kBlockRes + lj)) *
                                  kGridRes +
                       bk * kBlockRes;
            const Src* in = block + local_index(li, lj, 0);
            for (std::size_t lk = 0; lk < kBlockRes; ++lk) {
                row[lk] = static_cast<Dst>(in[lk]);
            }
        }
}

}  // namespace detail

inline SubRegionSet partition(const VoxelGrid& grid) {
    if (grid.resolution != kGridRes) {
        throw ResolutionError("partition: grid resolution " +
                              std::to_string(grid.resolution) + " != 30");
    }
    SubRegionSet set;
    for (std::size_t bi = 0; bi < kBlocksPerAxis; ++bi)
        for (std::size_t bj = 0; bj < kBlocksPerAxis; ++bj)
            for (std::size_t bk = 0; bk < kBlocksPerAxis; ++bk) {
                detail::gather_block(grid.occupancy.data(), bi, bj, bk,
                                     set.blocks[detail::block_index(bi, bj, bk)].data());
            }
    return set;
}

inline VoxelGrid assemble(const SubRegionSet& set) {
    VoxelGrid grid(kGridRes);
    for (std::size_t bi = 0; bi < kBlocksPerAxis; ++bi)
        for (std::size_t bj = 0; bj < kBlocksPerAxis; ++bj)
            for (std::size_t bk = 0; bk < kBlocksPerAxis; ++bk) {
                detail::scatter_block(set.blocks[detail::block_index(bi, bj, bk)].data(),
                                      bi, bj, bk, grid.occupancy.data());
            }
    return grid;
}

/// Shared-weight auto-encoder: fc 1000->150 + leaky ReLU on the encoding
/// side, fc 150->1000 + sigmoid on the decoding side. One weight set
/// serves all 27 block positions.
template <typename T>
struct AutoEncoderParams {
    ParamGroup<T> encoder;  // weight [150 x 1000], bias [150]
    ParamGroup<T> decoder;  // weight [1000 x 150], bias [1000]
    double slope = 0.01;

    void validate() const {
        if (encoder.weight.shape != std::vector<std::size_t>{kCodeDim, kBlockVoxels} ||
            encoder.bias.numel() != kCodeDim) {
            throw DimensionError("auto-encoder: encoder shapes must be 1000->150");
        }
        if (decoder.weight.shape != std::vector<std::size_t>{kBlockVoxels, kCodeDim} ||
            decoder.bias.numel() != kBlockVoxels) {
            throw DimensionError("auto-encoder: decoder shapes must be 150->1000");
        }
    }
};

template <typename T>
AutoEncoderParams<T> init_autoencoder(std::uint64_t seed) {
    Rng rng(seed);
    AutoEncoderParams<T> ae;
    ae.encoder = init_group<T>(LayerSpec::fc(kBlockVoxels, kCodeDim), "encoder", rng);
    ae.decoder = init_group<T>(LayerSpec::fc(kCodeDim, kBlockVoxels), "decoder", rng);
    return ae;
}

/// code = leaky_relu(W_enc * x + b_enc) for a block flattened in partition
/// order.
template <typename T>
Tensor<T> encode_block(const Tensor<T>& block, const AutoEncoderParams<T>& params) {
    params.validate();
    if (block.numel() != kBlockVoxels) {
        throw DimensionError("encode_block: expected 1000 values, got " +
                             std::to_string(block.numel()));
    }
    Tensor<T> code({kCodeDim});
    detail::fc_fwd(block.ptr(), params.encoder.weight.ptr(), params.encoder.bias.ptr(),
                   code.ptr(), kCodeDim, kBlockVoxels);
    const T a = static_cast<T>(params.slope);
    for (T& v : code.data) v = v > T(0) ? v : a * v;
    return code;
}

/// probs = sigmoid(W_dec * code + b_dec), each strictly inside (0, 1).
template <typename T>
Tensor<T> decode_block(const Tensor<T>& code, const AutoEncoderParams<T>& params) {
    params.validate();
    if (code.numel() != kCodeDim) {
        throw DimensionError("decode_block: expected a 150-dimensional code, got " +
                             std::to_string(code.numel()));
    }
    Tensor<T> probs({kBlockVoxels});
    detail::fc_fwd(code.ptr(), params.decoder.weight.ptr(), params.decoder.bias.ptr(),
                   probs.ptr(), kBlockVoxels, kCodeDim);
    for (T& v : probs.data) v = T(1) / (T(1) + std::exp(-v));
    return probs;
}

/// Compressed fraction of a 30^3 grid: 27 codes of code_dim values against
/// 27000 voxels. code_dim = 150 gives 0.15, i.e. 85% compression.
inline double compression_ratio(std::size_t code_dim) {
    if (code_dim < 1) throw ArgumentError("compression_ratio: code_dim must be >= 1");
    return static_cast<double>(kBlockCount * code_dim) / 27000.0;
}

}  // namespace voxc

#endif  // VOXC_CODEC_HPP
