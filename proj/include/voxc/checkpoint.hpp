#ifndef VOXC_CHECKPOINT_HPP
#define VOXC_CHECKPOINT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "voxc/io_util.hpp"
#include "voxc/models.hpp"
#include "voxc/optimizer.hpp"

namespace voxc {

// Checkpoint format (little-endian): magic "VOXW", u16 version, u8
// variant, u32 epoch, u64 seed; then per tensor: u32 name length + bytes,
// u32 rank + u32 extents, f32 data, f32 momentum buffer, u8 trainable.
// Each parameter group contributes two tensors, "<name>.weight" and
// "<name>.bias". Tensors run to end of stream; the expected set is fixed
// by the variant.

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct CheckpointTensor {
    std::string name;
    std::vector<std::uint32_t> shape;
    std::vector<float> data;
    std::vector<float> momentum;
    bool trainable = true;
};

struct Checkpoint {
    ModelVariant variant = ModelVariant::high_res_stacked;
    std::uint32_t epoch = 0;
    std::uint64_t seed = 0;
    std::vector<CheckpointTensor> tensors;
};

inline std::string write_checkpoint_bytes(const Checkpoint& ckpt) {
    detail::ByteWriter w;
    w.magic("VOXW");
    w.u16(kCheckpointVersion);
    w.u8(static_cast<std::uint8_t>(ckpt.variant));
    w.u32(ckpt.epoch);
    w.u64(ckpt.seed);
    for (const auto& t : ckpt.tensors) {
        w.u32(static_cast<std::uint32_t>(t.name.size()));
        w.bytes(t.name.data(), t.name.size());
        w.u32(static_cast<std::uint32_t>(t.shape.size()));
        for (std::uint32_t e : t.shape) w.u32(e);
        for (float v : t.data) w.f32(v);
        for (float v : t.momentum) w.f32(v);
        w.u8(t.trainable ? 1 : 0);
    }
    return w.take();
}

inline Checkpoint read_checkpoint_bytes(std::string_view bytes) {
    detail::ByteReader r(bytes);
    r.expect_magic("VOXW", "checkpoint");
    std::uint16_t version = r.u16();
    if (version != kCheckpointVersion) {
        throw VersionError("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint ckpt;
    std::uint8_t variant = r.u8();
    if (variant > 2) {
        throw FormatError("checkpoint: unknown variant byte " + std::to_string(variant));
    }
    ckpt.variant = static_cast<ModelVariant>(variant);
    ckpt.epoch = r.u32();
    ckpt.seed = r.u64();
    while (!r.at_end()) {
        CheckpointTensor t;
        std::uint32_t name_len = r.u32();
        if (name_len == 0 || name_len > 256) {
            throw FormatError("checkpoint: implausible tensor name length " +
                              std::to_string(name_len) + " at byte offset " +
                              std::to_string(r.offset() - 4));
        }
        auto nameview = r.bytes(name_len, "tensor name");
        t.name.assign(nameview.begin(), nameview.end());
        std::uint32_t rank = r.u32();
        if (rank == 0 || rank > 4) {
            throw FormatError("checkpoint: implausible rank " + std::to_string(rank) +
                              " for tensor '" + t.name + "'");
        }
        std::uint64_t numel = 1;
        for (std::uint32_t i = 0; i < rank; ++i) {
            std::uint32_t e = r.u32();
            if (e == 0 || numel * e > (1ull << 28)) {
                throw FormatError("checkpoint: implausible extent in tensor '" +
                                  t.name + "'");
            }
            t.shape.push_back(e);
            numel *= e;
        }
        t.data.resize(numel);
        for (auto& v : t.data) v = r.f32();
        t.momentum.resize(numel);
        for (auto& v : t.momentum) v = r.f32();
        t.trainable = r.u8() != 0;
        ckpt.tensors.push_back(std::move(t));
    }
    return ckpt;
}

inline void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    detail::write_file(path, write_checkpoint_bytes(ckpt));
}

inline Checkpoint read_checkpoint(const std::string& path) {
    return read_checkpoint_bytes(detail::read_file(path));
}

// ---- bridges between live objects and checkpoints --------------------------

namespace detail {

inline void append_group_tensors(Checkpoint& ckpt, const ParamGroup<float>& group,
                                 const GroupGrad<float>* velocity) {
    auto push = [&](const std::string& suffix, const Tensor<float>& tensor,
                    const Tensor<float>* vel) {
        CheckpointTensor t;
        t.name = group.name + suffix;
        for (std::size_t e : tensor.shape) t.shape.push_back(static_cast<std::uint32_t>(e));
        t.data = tensor.data;
        t.momentum = vel ? vel->data : std::vector<float>(tensor.numel(), 0.0f);
        t.trainable = group.trainable;
        ckpt.tensors.push_back(std::move(t));
    };
    push(".weight", group.weight, velocity ? &velocity->dw : nullptr);
    push(".bias", group.bias, velocity ? &velocity->db : nullptr);
}

// Reassembles ParamGroups (and velocity) from the .weight/.bias pairs.
inline void split_checkpoint_tensors(const Checkpoint& ckpt,
                                     NetworkParameters<float>& params,
                                     GradSet<float>& velocity) {
    if (ckpt.tensors.size() % 2 != 0) {
        throw FormatError("checkpoint: odd tensor count, weight/bias pairs expected");
    }
    for (std::size_t i = 0; i < ckpt.tensors.size(); i += 2) {
        const CheckpointTensor& wt = ckpt.tensors[i];
        const CheckpointTensor& bt = ckpt.tensors[i + 1];
        auto ends_with = [](const std::string& s, const char* suffix) {
            std::string suf(suffix);
            return s.size() > suf.size() &&
                   s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
        };
        if (!ends_with(wt.name, ".weight") || !ends_with(bt.name, ".bias")) {
            throw FormatError("checkpoint: tensors '" + wt.name + "'/'" + bt.name +
                              "' are not a weight/bias pair");
        }
        std::string base = wt.name.substr(0, wt.name.size() - 7);
        if (bt.name.substr(0, bt.name.size() - 5) != base) {
            throw FormatError("checkpoint: mismatched pair '" + wt.name + "'/'" +
                              bt.name + "'");
        }
        ParamGroup<float> g;
        g.name = base;
        g.trainable = wt.trainable;
        std::vector<std::size_t> wshape(wt.shape.begin(), wt.shape.end());
        std::vector<std::size_t> bshape(bt.shape.begin(), bt.shape.end());
        g.weight = Tensor<float>(wshape, wt.data);
        g.bias = Tensor<float>(bshape, bt.data);
        GroupGrad<float> v;
        v.dw = Tensor<float>(wshape, wt.momentum);
        v.db = Tensor<float>(bshape, bt.momentum);
        params.groups.push_back(std::move(g));
        velocity.push_back(std::move(v));
    }
}

}  // namespace detail

inline Checkpoint make_checkpoint(const CompletionNet<float>& model,
                                  const SgdOptimizer<float>* opt, std::uint32_t epoch,
                                  std::uint64_t seed) {
    Checkpoint ckpt;
    ckpt.variant = model.variant();
    ckpt.epoch = epoch;
    ckpt.seed = seed;
    const auto& groups = model.params().groups;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        detail::append_group_tensors(ckpt, groups[i],
                                     opt ? &opt->velocity()[i] : nullptr);
    }
    return ckpt;
}

inline Checkpoint make_checkpoint(const AutoEncoderParams<float>& ae,
                                  std::uint32_t epoch, std::uint64_t seed) {
    Checkpoint ckpt;
    ckpt.variant = ModelVariant::auto_encoder;
    ckpt.epoch = epoch;
    ckpt.seed = seed;
    detail::append_group_tensors(ckpt, ae.encoder, nullptr);
    detail::append_group_tensors(ckpt, ae.decoder, nullptr);
    return ckpt;
}

/// Model plus optimizer state as restored from a checkpoint.
struct RestoredModel {
    CompletionNet<float> model;
    GradSet<float> velocity;
    std::uint32_t epoch = 0;
    std::uint64_t seed = 0;
};

inline RestoredModel model_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.variant == ModelVariant::auto_encoder) {
        throw CheckpointError("expected a completion model checkpoint, got variant "
                              "auto_encoder");
    }
    NetworkParameters<float> params;
    GradSet<float> velocity;
    detail::split_checkpoint_tensors(ckpt, params, velocity);
    // Depth size from the first fully-connected input: flat = 64*(s/8)^2.
    std::uint32_t depth_size = 0;
    for (const auto& g : params.groups) {
        if (g.name == "fc1") {
            std::size_t flat = g.weight.shape[1];
            for (std::uint32_t s = 8; s <= 1024; s += 8) {
                if (conv_trunk_output_dim(s) == flat) {
                    depth_size = s;
                    break;
                }
            }
        }
    }
    if (depth_size == 0) {
        throw CheckpointError("checkpoint: cannot infer depth size from fc1 shape");
    }
    RestoredModel r{CompletionNet<float>::from_groups(ckpt.variant, depth_size,
                                                      std::move(params)),
                    std::move(velocity), ckpt.epoch, ckpt.seed};
    return r;
}

inline AutoEncoderParams<float> autoencoder_from_checkpoint(const Checkpoint& ckpt) {
    if (ckpt.variant != ModelVariant::auto_encoder) {
        throw CheckpointError(std::string("expected an auto_encoder checkpoint, got ") +
                              model_variant_name(ckpt.variant));
    }
    NetworkParameters<float> params;
    GradSet<float> velocity;
    detail::split_checkpoint_tensors(ckpt, params, velocity);
    if (params.groups.size() != 2 || params.groups[0].name != "encoder" ||
        params.groups[1].name != "decoder") {
        throw CheckpointError("auto_encoder checkpoint must hold encoder and decoder");
    }
    AutoEncoderParams<float> ae;
    ae.encoder = std::move(params.groups[0]);
    ae.decoder = std::move(params.groups[1]);
    ae.validate();
    return ae;
}

}  // namespace voxc

#endif  // VOXC_CHECKPOINT_HPP
