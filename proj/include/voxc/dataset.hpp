#ifndef VOXC_DATASET_HPP
#define VOXC_DATASET_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "voxc/codec.hpp"
#include "voxc/depth_render.hpp"
#include "voxc/io_util.hpp"
#include "voxc/voxelize.hpp"

namespace voxc {

/// One training record: a rendered depth view and the voxelized target of
/// the same normalized mesh.
struct Sample {
    DepthMap depth;
    VoxelGrid target;
    std::uint16_t class_id = 0;
    std::uint16_t view_index = 0;
};

struct SampleStore {
    std::uint32_t resolution = 30;
    std::uint32_t depth_width = 64;
    std::uint32_t depth_height = 64;
    std::uint32_t n_views = 8;
    std::uint32_t n_classes = 0;
    std::uint64_t seed = 0;
    std::vector<Sample> records;
};

struct ClassedMesh {
    TriangleMesh mesh;
    std::uint16_t class_id = 0;
};

struct BuildResult {
    SampleStore store;
    std::size_t skipped = 0;  // degenerate meshes and trivial targets
};

/// Builds (normalize -> voxelize once -> render each ring view) per mesh.
/// Records are ordered (mesh, view). Meshes that fail normalization or
/// produce an empty/full target grid are skipped and counted.
inline BuildResult build_dataset(const std::vector<ClassedMesh>& meshes,
                                 std::uint32_t n_views, std::uint32_t resolution,
                                 std::uint32_t depth_size, std::uint64_t seed,
                                 double elevation_deg = 20.0) {
    if (meshes.empty()) throw ArgumentError("build_dataset: empty mesh list");
    if (n_views < 1) throw ArgumentError("build_dataset: n_views must be >= 1");
    BuildResult result;
    SampleStore& store = result.store;
    store.resolution = resolution;
    store.depth_width = depth_size;
    store.depth_height = depth_size;
    store.n_views = n_views;
    store.seed = seed;
    std::uint32_t max_class = 0;
    for (const auto& cm : meshes) max_class = std::max<std::uint32_t>(max_class, cm.class_id);
    store.n_classes = max_class + 1;

    auto views = viewpoint_ring(n_views, elevation_deg);
    const std::size_t full = static_cast<std::size_t>(resolution) * resolution * resolution;
    for (const auto& cm : meshes) {
        TriangleMesh norm;
        try {
            norm = normalize_mesh(cm.mesh);
            validate_mesh(norm);
        } catch (const Error&) {
            ++result.skipped;
            continue;
        }
        VoxelGrid target = voxelize(norm, resolution);
        std::size_t occ = target.occupied_count();
        if (occ == 0 || occ == full) {
            ++result.skipped;
            continue;
        }
        for (std::uint32_t v = 0; v < n_views; ++v) {
            Sample s;
            s.depth = render_depth(norm, views[v], depth_size);
            s.target = target;
            s.class_id = cm.class_id;
            s.view_index = static_cast<std::uint16_t>(v);
            store.records.push_back(std::move(s));
        }
    }
    return result;
}

/// Pool of 10^3 blocks cut from every store target via partition, 27 per
/// sample in partition order. Feeds auto-encoder training.
struct SubregionStore {
    std::vector<std::array<std::uint8_t, kBlockVoxels>> blocks;
};

inline SubregionStore build_subregion_store(const SampleStore& store) {
    if (store.resolution != kGridRes) {
        throw ResolutionError("build_subregion_store: store resolution " +
                              std::to_string(store.resolution) + " != 30");
    }
    SubregionStore out;
    out.blocks.reserve(store.records.size() * kBlockCount);
    for (const auto& rec : store.records) {
        SubRegionSet set = partition(rec.target);
        for (const auto& b : set.blocks) out.blocks.push_back(b);
    }
    return out;
}

/// Splits off the named class: test gets exactly its samples, train the
/// rest, both in original order with unchanged headers.
inline std::pair<SampleStore, SampleStore> split_holdout(const SampleStore& store,
                                                         std::uint16_t holdout_class) {
    if (holdout_class >= store.n_classes) {
        throw ArgumentError("split_holdout: class " + std::to_string(holdout_class) +
                            " not in class table of size " +
                            std::to_string(store.n_classes));
    }
    SampleStore train = store, test = store;
    train.records.clear();
    test.records.clear();
    for (const auto& rec : store.records) {
        (rec.class_id == holdout_class ? test : train).records.push_back(rec);
    }
    return {std::move(train), std::move(test)};
}

// ---- container format ------------------------------------------------------
//
// Little-endian: magic "VOXC", u16 version = 1, u16 flags, u32 R,
// u32 depth_w, u32 depth_h, u32 n_views, u32 n_classes, u64 n_records,
// u64 seed; then per record: u16 class_id, u16 view_index, depth as
// f32[w*h], occupancy bit-packed LSB-first (R^3 bits, padded to a byte).

inline constexpr std::uint16_t kStoreVersion = 1;

inline std::string write_store_bytes(const SampleStore& store) {
    detail::ByteWriter w;
    w.magic("VOXC");
    w.u16(kStoreVersion);
    w.u16(0);  // flags, reserved
    w.u32(store.resolution);
    w.u32(store.depth_width);
    w.u32(store.depth_height);
    w.u32(store.n_views);
    w.u32(store.n_classes);
    w.u64(static_cast<std::uint64_t>(store.records.size()));
    w.u64(store.seed);
    const std::size_t voxels =
        static_cast<std::size_t>(store.resolution) * store.resolution * store.resolution;
    for (const auto& rec : store.records) {
        w.u16(rec.class_id);
        w.u16(rec.view_index);
        for (float v : rec.depth.values) w.f32(v);
        std::uint8_t acc = 0;
        for (std::size_t i = 0; i < voxels; ++i) {
            if (rec.target.occupancy[i]) acc |= static_cast<std::uint8_t>(1u << (i % 8));
            if (i % 8 == 7) {
                w.u8(acc);
                acc = 0;
            }
        }
        if (voxels % 8 != 0) w.u8(acc);
    }
    return w.take();
}

inline SampleStore read_store_bytes(std::string_view data) {
    detail::ByteReader r(data);
    r.expect_magic("VOXC", "store");
    std::uint16_t version = r.u16();
    if (version != kStoreVersion) {
        throw VersionError("store: unsupported version " + std::to_string(version));
    }
    r.u16();  // flags
    SampleStore store;
    store.resolution = r.u32();
    store.depth_width = r.u32();
    store.depth_height = r.u32();
    store.n_views = r.u32();
    store.n_classes = r.u32();
    std::uint64_t n_records = r.u64();
    store.seed = r.u64();
    if (store.resolution == 0 || store.depth_width == 0 || store.depth_height == 0) {
        throw FormatError("store: zero dimension in header");
    }
    const std::size_t pixels =
        static_cast<std::size_t>(store.depth_width) * store.depth_height;
    const std::size_t voxels =
        static_cast<std::size_t>(store.resolution) * store.resolution * store.resolution;
    const std::size_t packed = (voxels + 7) / 8;
    store.records.reserve(n_records);
    for (std::uint64_t n = 0; n < n_records; ++n) {
        Sample rec;
        rec.class_id = r.u16();
        rec.view_index = r.u16();
        if (rec.class_id >= store.n_classes || rec.view_index >= store.n_views) {
            throw FormatError("store: record " + std::to_string(n) +
                              " has out-of-range class or view id (byte offset " +
                              std::to_string(r.offset()) + ")");
        }
        rec.depth.width = store.depth_width;
        rec.depth.height = store.depth_height;
        rec.depth.values.resize(pixels);
        for (std::size_t i = 0; i < pixels; ++i) {
            float v = r.f32();
            if (!(v >= 0.0f && v <= 1.0f)) {
                throw FormatError("store: depth value outside [0, 1] in record " +
                                  std::to_string(n));
            }
            rec.depth.values[i] = v;
        }
        rec.target = VoxelGrid(store.resolution);
        std::string_view bits = r.bytes(packed, "occupancy bits");
        for (std::size_t i = 0; i < voxels; ++i) {
            rec.target.occupancy[i] =
                (static_cast<std::uint8_t>(bits[i / 8]) >> (i % 8)) & 1u;
        }
        store.records.push_back(std::move(rec));
    }
    if (!r.at_end()) {
        throw FormatError("store: " + std::to_string(r.remaining()) +
                          " trailing bytes at offset " + std::to_string(r.offset()));
    }
    return store;
}

inline void write_store(const std::string& path, const SampleStore& store) {
    detail::write_file(path, write_store_bytes(store));
}

inline SampleStore read_store(const std::string& path) {
    return read_store_bytes(detail::read_file(path));
}

inline bool store_equal(const SampleStore& a, const SampleStore& b) {
    if (a.resolution != b.resolution || a.depth_width != b.depth_width ||
        a.depth_height != b.depth_height || a.n_views != b.n_views ||
        a.n_classes != b.n_classes || a.seed != b.seed ||
        a.records.size() != b.records.size())
        return false;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        const Sample& x = a.records[i];
        const Sample& y = b.records[i];
        if (x.class_id != y.class_id || x.view_index != y.view_index) return false;
        if (x.depth.values != y.depth.values) return false;
        if (!(x.target == y.target)) return false;
    }
    return true;
}

}  // namespace voxc

#endif  // VOXC_DATASET_HPP
