#ifndef VOXC_VOXELIZE_HPP
#define VOXC_VOXELIZE_HPP

#include <algorithm>
#include <cstdint>
#include <vector>

#include "voxc/geometry.hpp"

namespace voxc {

/// Binary occupancy over the axis-aligned cube [-0.5, 0.5]^3. Voxel
/// (i, j, k) covers [-0.5 + i/R, -0.5 + (i+1)/R) per axis; cells are
/// half-open with the last cell closed, so the domain partitions exactly.
/// Linear index: (i * R + j) * R + k.
struct VoxelGrid {
    std::uint32_t resolution = 0;
    std::vector<std::uint8_t> occupancy;

    VoxelGrid() = default;
    explicit VoxelGrid(std::uint32_t r)
        : resolution(r),
          occupancy(static_cast<std::size_t>(r) * r * r, 0) {}

    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * resolution + j) * resolution + k;
    }
    std::uint8_t at(std::size_t i, std::size_t j, std::size_t k) const {
        return occupancy[index(i, j, k)];
    }
    void set(std::size_t i, std::size_t j, std::size_t k, std::uint8_t v) {
        occupancy[index(i, j, k)] = v;
    }
    std::size_t size() const { return occupancy.size(); }
    std::size_t occupied_count() const {
        std::size_t n = 0;
        for (std::uint8_t v : occupancy) n += v;
        return n;
    }
    bool operator==(const VoxelGrid& o) const {
        return resolution == o.resolution && occupancy == o.occupancy;
    }

    double cell_low(std::uint32_t i) const {
        return -0.5 + static_cast<double>(i) / resolution;
    }
};

namespace detail {

// Sutherland-Hodgman clip of a convex polygon against one axis-aligned
// half-space. Clipped intersection points get the plane coordinate
// assigned exactly, which keeps the later strict boundary comparisons
// meaningful.
inline void clip_axis(std::vector<Vec3>& poly, std::vector<Vec3>& tmp, int axis,
                      double bound, bool keep_below) {
    tmp.clear();
    std::size_t n = poly.size();
    if (n == 0) return;
    auto inside = [&](const Vec3& p) {
        double c = p[axis];
        return keep_below ? c <= bound : c >= bound;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = poly[i];
        const Vec3& b = poly[(i + 1) % n];
        bool ia = inside(a), ib = inside(b);
        if (ia) tmp.push_back(a);
        if (ia != ib) {
            double da = a[axis] - bound, db = b[axis] - bound;
            double t = da / (da - db);
            Vec3 p = a + (b - a) * t;
            vec3_at(p, axis) = bound;
            tmp.push_back(p);
        }
    }
    poly.swap(tmp);
}

inline void clip_triangle_to_box(const std::array<Vec3, 3>& tri, const Vec3& lo,
                                 const Vec3& hi, std::vector<Vec3>& poly,
                                 std::vector<Vec3>& tmp) {
    poly.assign(tri.begin(), tri.end());
    for (int axis = 0; axis < 3 && !poly.empty(); ++axis) {
        clip_axis(poly, tmp, axis, lo[axis], false);
        if (poly.empty()) break;
        clip_axis(poly, tmp, axis, hi[axis], true);
    }
}

}  // namespace detail

/// Surface (shell) voxelization: a cell is occupied iff some triangle
/// meets its half-open box. The test clips the triangle against the closed
/// cell and then requires, per axis, a point strictly below the upper face
/// (except for the last cell, which is closed). A convex set inside the
/// closed cell meets the half-open cell exactly when each axis separately
/// attains a coordinate below the upper bound, so this is exact.
inline VoxelGrid voxelize(const TriangleMesh& mesh, std::uint32_t resolution) {
    if (resolution < 2) {
        throw ArgumentError("voxelize: resolution must be >= 2");
    }
    validate_mesh(mesh);
    Aabb bounds = mesh_bounds(mesh);
    const double limit = 0.5 + 1e-9;
    if (bounds.lo.x < -limit || bounds.lo.y < -limit || bounds.lo.z < -limit ||
        bounds.hi.x > limit || bounds.hi.y > limit || bounds.hi.z > limit) {
        throw VoxelDomainError("voxelize: mesh bounding box exceeds [-0.5, 0.5]^3; "
                               "normalize the mesh first");
    }

    VoxelGrid grid(resolution);
    const double r = static_cast<double>(resolution);
    const std::uint32_t last = resolution - 1;

    auto cell_of = [&](double c) {
        double f = std::floor((c + 0.5) * r);
        long i = static_cast<long>(f);
        return static_cast<std::uint32_t>(std::clamp(i, 0L, static_cast<long>(last)));
    };

    std::vector<Vec3> poly, tmp;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        std::array<Vec3, 3> tri = mesh.triangle(t);
        Aabb tb;
        tb.grow(tri[0]);
        tb.grow(tri[1]);
        tb.grow(tri[2]);
        std::uint32_t ilo = cell_of(tb.lo.x), ihi = cell_of(tb.hi.x);
        std::uint32_t jlo = cell_of(tb.lo.y), jhi = cell_of(tb.hi.y);
        std::uint32_t klo = cell_of(tb.lo.z), khi = cell_of(tb.hi.z);
        for (std::uint32_t i = ilo; i <= ihi; ++i)
            for (std::uint32_t j = jlo; j <= jhi; ++j)
                for (std::uint32_t k = klo; k <= khi; ++k) {
                    if (grid.at(i, j, k)) continue;
                    Vec3 lo{grid.cell_low(i), grid.cell_low(j), grid.cell_low(k)};
                    Vec3 hi{grid.cell_low(i + 1), grid.cell_low(j + 1),
                            grid.cell_low(k + 1)};
                    detail::clip_triangle_to_box(tri, lo, hi, poly, tmp);
                    if (poly.empty()) continue;
                    std::uint32_t idx[3] = {i, j, k};
                    bool inside = true;
                    for (int axis = 0; axis < 3 && inside; ++axis) {
                        if (idx[axis] == last) continue;  // last cell is closed
                        double mn = poly[0][axis];
                        for (const Vec3& p : poly) mn = std::min(mn, p[axis]);
                        if (!(mn < hi[axis])) inside = false;
                    }
                    if (inside) grid.set(i, j, k, 1);
                }
    }
    return grid;
}

}  // namespace voxc

#endif  // VOXC_VOXELIZE_HPP
