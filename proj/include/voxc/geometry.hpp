#ifndef VOXC_GEOMETRY_HPP
#define VOXC_GEOMETRY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "voxc/errors.hpp"

namespace voxc {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline double& vec3_at(Vec3& v, int i) { return i == 0 ? v.x : (i == 1 ? v.y : v.z); }

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;

    std::array<Vec3, 3> triangle(std::size_t t) const {
        const auto& tri = triangles[t];
        return {vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
    }
};

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    void grow(const Vec3& p) {
        lo.x = std::min(lo.x, p.x);
        lo.y = std::min(lo.y, p.y);
        lo.z = std::min(lo.z, p.z);
        hi.x = std::max(hi.x, p.x);
        hi.y = std::max(hi.y, p.y);
        hi.z = std::max(hi.z, p.z);
    }
};

inline Aabb mesh_bounds(const TriangleMesh& mesh) {
    Aabb box;
    for (const Vec3& v : mesh.vertices) box.grow(v);
    return box;
}

inline void validate_mesh(const TriangleMesh& mesh) {
    if (mesh.triangles.empty()) {
        throw DegenerateGeometryError("mesh has no triangles");
    }
    for (const Vec3& v : mesh.vertices) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
            throw FormatError("mesh has non-finite vertex coordinates");
        }
    }
    for (const auto& t : mesh.triangles) {
        for (std::uint32_t i : t) {
            if (i >= mesh.vertices.size()) {
                throw IndexError("triangle references vertex " + std::to_string(i) +
                                 " of " + std::to_string(mesh.vertices.size()));
            }
        }
    }
}

/// Center the bounding box at the origin and scale the longest side to
/// exactly 0.9, so the mesh sits inside the [-0.45, 0.45]^3 core of the
/// voxel domain with its aspect ratio preserved.
inline TriangleMesh normalize_mesh(const TriangleMesh& mesh) {
    if (mesh.vertices.empty()) {
        throw DegenerateGeometryError("normalize_mesh: empty mesh");
    }
    Aabb box = mesh_bounds(mesh);
    Vec3 extent = box.hi - box.lo;
    double max_extent = std::max(extent.x, std::max(extent.y, extent.z));
    if (!(max_extent > 0.0) || !std::isfinite(max_extent)) {
        throw DegenerateGeometryError("normalize_mesh: zero-extent mesh");
    }
    Vec3 center = (box.lo + box.hi) * 0.5;
    double scale = 0.9 / max_extent;
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = (v - center) * scale;
    return out;
}

/// Counterclockwise rotation about +Z (degrees), seen from above.
inline TriangleMesh rotate_mesh_z(const TriangleMesh& mesh, double degrees) {
    double rad = degrees * (M_PI / 180.0);
    double c = std::cos(rad), s = std::sin(rad);
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) {
        v = {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
    }
    return out;
}

inline TriangleMesh translate_mesh(const TriangleMesh& mesh, const Vec3& d) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = v + d;
    return out;
}

inline TriangleMesh scale_mesh(const TriangleMesh& mesh, double s) {
    TriangleMesh out = mesh;
    for (Vec3& v : out.vertices) v = v * s;
    return out;
}

inline void merge_mesh(TriangleMesh& into, const TriangleMesh& part) {
    std::uint32_t base = static_cast<std::uint32_t>(into.vertices.size());
    into.vertices.insert(into.vertices.end(), part.vertices.begin(),
                         part.vertices.end());
    for (const auto& t : part.triangles) {
        into.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
    }
}

namespace detail {

// Whitespace/comment-skipping tokenizer for OFF text. '#' comments run to
// end of line.
class OffTokens {
public:
    explicit OffTokens(std::istream& in) : in_(in) {}

    bool next(std::string& tok) {
        tok.clear();
        int c;
        while ((c = in_.get()) != EOF) {
            if (c == '#') {
                while ((c = in_.get()) != EOF && c != '\n') {
                }
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) return true;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        return !tok.empty();
    }

private:
    std::istream& in_;
};

inline double off_real(OffTokens& toks, const char* what) {
    std::string t;
    if (!toks.next(t)) {
        throw TruncationError(std::string("OFF: stream ended reading ") + what);
    }
    try {
        std::size_t pos = 0;
        double v = std::stod(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("OFF: expected a number for ") + what +
                          ", got '" + t + "'");
    }
}

inline long off_int(OffTokens& toks, const char* what) {
    std::string t;
    if (!toks.next(t)) {
        throw TruncationError(std::string("OFF: stream ended reading ") + what);
    }
    try {
        std::size_t pos = 0;
        long v = std::stol(t, &pos);
        if (pos != t.size()) throw std::invalid_argument(t);
        return v;
    } catch (const std::exception&) {
        throw FormatError(std::string("OFF: expected an integer for ") + what +
                          ", got '" + t + "'");
    }
}

}  // namespace detail

/// OFF loader. Polygons with more than three vertices are fan-triangulated
/// from their first vertex. Handles the common ModelNet quirk of counts
/// appended directly to the magic ("OFF490 518 0").
inline TriangleMesh load_off(std::istream& in) {
    detail::OffTokens toks(in);
    std::string magic;
    if (!toks.next(magic)) throw FormatError("OFF: empty stream");
    long nv, nf;
    if (magic == "OFF") {
        nv = detail::off_int(toks, "vertex count");
        nf = detail::off_int(toks, "face count");
        detail::off_int(toks, "edge count");
    } else if (magic.rfind("OFF", 0) == 0 && magic.size() > 3) {
        std::istringstream rest(magic.substr(3));
        detail::OffTokens rtoks(rest);
        nv = detail::off_int(rtoks, "vertex count");
        nf = detail::off_int(toks, "face count");
        detail::off_int(toks, "edge count");
    } else {
        throw FormatError("OFF: missing magic, stream begins '" + magic + "'");
    }
    if (nv < 0 || nf < 0) throw FormatError("OFF: negative counts");

    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        Vec3 v;
        v.x = detail::off_real(toks, "vertex x");
        v.y = detail::off_real(toks, "vertex y");
        v.z = detail::off_real(toks, "vertex z");
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
            throw FormatError("OFF: non-finite vertex coordinate");
        }
        mesh.vertices.push_back(v);
    }
    for (long f = 0; f < nf; ++f) {
        long k = detail::off_int(toks, "face vertex count");
        if (k < 3) throw FormatError("OFF: face with fewer than 3 vertices");
        std::vector<std::uint32_t> idx(static_cast<std::size_t>(k));
        for (long j = 0; j < k; ++j) {
            long v = detail::off_int(toks, "face index");
            if (v < 0 || v >= nv) {
                throw IndexError("OFF: face index " + std::to_string(v) +
                                 " out of range [0, " + std::to_string(nv) + ")");
            }
            idx[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(v);
        }
        for (std::size_t j = 1; j + 1 < idx.size(); ++j) {
            mesh.triangles.push_back({idx[0], idx[j], idx[j + 1]});
        }
    }
    return mesh;
}

inline TriangleMesh load_off(const std::string& text) {
    std::istringstream in(text);
    return load_off(in);
}

}  // namespace voxc

#endif  // VOXC_GEOMETRY_HPP
