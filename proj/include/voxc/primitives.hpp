#ifndef VOXC_PRIMITIVES_HPP
#define VOXC_PRIMITIVES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "voxc/geometry.hpp"
#include "voxc/rng.hpp"

namespace voxc {

enum class PrimitiveKind : std::uint8_t { box = 0, icosphere = 1, cylinder = 2, composite = 3 };

inline const char* primitive_kind_name(PrimitiveKind k) {
    switch (k) {
        case PrimitiveKind::box: return "box";
        case PrimitiveKind::icosphere: return "icosphere";
        case PrimitiveKind::cylinder: return "cylinder";
        case PrimitiveKind::composite: return "composite";
    }
    return "?";
}

inline PrimitiveKind primitive_kind_from_name(const std::string& name) {
    if (name == "box") return PrimitiveKind::box;
    if (name == "icosphere") return PrimitiveKind::icosphere;
    if (name == "cylinder") return PrimitiveKind::cylinder;
    if (name == "composite") return PrimitiveKind::composite;
    throw ArgumentError("unknown primitive kind '" + name + "'");
}

/// Parameter ranges: box extents > 0; icosphere radius > 0, subdivision
/// <= 4; cylinder radius/height > 0, segments >= 3; composite parts in
/// [2, 4] (chosen from seed when parts == 0).
struct PrimitiveParams {
    Vec3 box_extents{1.0, 1.0, 1.0};
    double radius = 0.5;
    std::uint32_t subdivision = 2;
    double height = 1.0;
    std::uint32_t segments = 24;
    std::uint32_t parts = 0;
};

inline TriangleMesh make_box(const Vec3& extents) {
    if (!(extents.x > 0 && extents.y > 0 && extents.z > 0)) {
        throw ArgumentError("make_box: extents must be positive");
    }
    double hx = extents.x / 2, hy = extents.y / 2, hz = extents.z / 2;
    TriangleMesh m;
    m.vertices = {{-hx, -hy, -hz}, {hx, -hy, -hz}, {hx, hy, -hz}, {-hx, hy, -hz},
                  {-hx, -hy, hz},  {hx, -hy, hz},  {hx, hy, hz},  {-hx, hy, hz}};
    // Two triangles per face, outward winding.
    m.triangles = {{0, 2, 1}, {0, 3, 2},   // -z
                   {4, 5, 6}, {4, 6, 7},   // +z
                   {0, 1, 5}, {0, 5, 4},   // -y
                   {2, 3, 7}, {2, 7, 6},   // +y
                   {1, 2, 6}, {1, 6, 5},   // +x
                   {3, 0, 4}, {3, 4, 7}};  // -x
    return m;
}

inline TriangleMesh make_icosphere(double radius, std::uint32_t subdivision) {
    if (!(radius > 0)) throw ArgumentError("make_icosphere: radius must be positive");
    if (subdivision > 4) {
        throw ArgumentError("make_icosphere: subdivision must be <= 4");
    }
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    TriangleMesh m;
    m.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                  {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                  {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                   {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                   {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                   {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    auto project = [&](Vec3 v) { return v * (radius / v.norm()); };
    for (Vec3& v : m.vertices) v = project(v);

    for (std::uint32_t level = 0; level < subdivision; ++level) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoint;
        auto mid = [&](std::uint32_t a, std::uint32_t b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 p = project((m.vertices[a] + m.vertices[b]) * 0.5);
            std::uint32_t idx = static_cast<std::uint32_t>(m.vertices.size());
            m.vertices.push_back(p);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& t : m.triangles) {
            std::uint32_t ab = mid(t[0], t[1]);
            std::uint32_t bc = mid(t[1], t[2]);
            std::uint32_t ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.triangles = std::move(next);
    }
    return m;
}

inline TriangleMesh make_cylinder(double radius, double height,
                                  std::uint32_t segments) {
    if (!(radius > 0) || !(height > 0)) {
        throw ArgumentError("make_cylinder: radius and height must be positive");
    }
    if (segments < 3) throw ArgumentError("make_cylinder: segments must be >= 3");
    TriangleMesh m;
    double hz = height / 2;
    for (std::uint32_t s = 0; s < segments; ++s) {
        double a = 2.0 * M_PI * s / segments;
        double x = radius * std::cos(a), y = radius * std::sin(a);
        m.vertices.push_back({x, y, -hz});
        m.vertices.push_back({x, y, hz});
    }
    std::uint32_t cb = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back({0, 0, -hz});
    std::uint32_t ct = cb + 1;
    m.vertices.push_back({0, 0, hz});
    for (std::uint32_t s = 0; s < segments; ++s) {
        std::uint32_t n = (s + 1) % segments;
        std::uint32_t b0 = 2 * s, t0 = 2 * s + 1, b1 = 2 * n, t1 = 2 * n + 1;
        m.triangles.push_back({b0, b1, t1});
        m.triangles.push_back({b0, t1, t0});
        m.triangles.push_back({cb, b1, b0});
        m.triangles.push_back({ct, t0, t1});
    }
    return m;
}

/// Deterministic mesh for (kind, params, seed). The composite kind merges
/// 2-4 randomly scaled, rotated and translated basic primitives drawn from
/// the seed.
inline TriangleMesh gen_primitive(PrimitiveKind kind, const PrimitiveParams& params,
                                  std::uint64_t seed) {
    switch (kind) {
        case PrimitiveKind::box:
            return make_box(params.box_extents);
        case PrimitiveKind::icosphere:
            return make_icosphere(params.radius, params.subdivision);
        case PrimitiveKind::cylinder:
            return make_cylinder(params.radius, params.height, params.segments);
        case PrimitiveKind::composite: {
            if (params.parts > 4 || params.parts == 1) {
                throw ArgumentError("composite: parts must be 0 (random) or in [2, 4]");
            }
            Rng rng(seed);
            std::uint32_t parts =
                params.parts ? params.parts : 2 + static_cast<std::uint32_t>(rng.below(3));
            TriangleMesh m;
            for (std::uint32_t p = 0; p < parts; ++p) {
                TriangleMesh part;
                switch (rng.below(3)) {
                    case 0:
                        part = make_box({rng.uniform(0.25, 0.6), rng.uniform(0.25, 0.6),
                                         rng.uniform(0.25, 0.6)});
                        break;
                    case 1:
                        part = make_icosphere(rng.uniform(0.12, 0.3), 2);
                        break;
                    default:
                        part = make_cylinder(rng.uniform(0.1, 0.25),
                                             rng.uniform(0.3, 0.7), 16);
                        break;
                }
                part = rotate_mesh_z(part, rng.uniform(0.0, 360.0));
                part = translate_mesh(part, {rng.uniform(-0.35, 0.35),
                                             rng.uniform(-0.35, 0.35),
                                             rng.uniform(-0.35, 0.35)});
                merge_mesh(m, part);
            }
            return m;
        }
    }
    throw ArgumentError("gen_primitive: unknown kind");
}

/// Randomized instance of a kind, parameters drawn from the documented
/// ranges. Dataset construction uses this as its per-mesh generator.
inline TriangleMesh random_primitive(PrimitiveKind kind, std::uint64_t seed) {
    Rng rng(seed);
    PrimitiveParams p;
    switch (kind) {
        case PrimitiveKind::box:
            p.box_extents = {rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0),
                             rng.uniform(0.3, 1.0)};
            break;
        case PrimitiveKind::icosphere:
            p.radius = rng.uniform(0.2, 0.5);
            p.subdivision = 2;
            break;
        case PrimitiveKind::cylinder:
            p.radius = rng.uniform(0.15, 0.5);
            p.height = rng.uniform(0.4, 1.2);
            p.segments = 24;
            break;
        case PrimitiveKind::composite:
            break;
    }
    TriangleMesh m = gen_primitive(kind, p, mix_seed(seed, 0x706172747353ULL));
    if (kind != PrimitiveKind::composite) {
        // Mild anisotropy and rotation so same-kind instances differ in
        // more than scale (normalization would otherwise collapse them).
        m = rotate_mesh_z(m, rng.uniform(0.0, 360.0));
    }
    return m;
}

}  // namespace voxc

#endif  // VOXC_PRIMITIVES_HPP
