#ifndef VOXC_DEPTH_RENDER_HPP
#define VOXC_DEPTH_RENDER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "voxc/geometry.hpp"

namespace voxc {

/// Normalized orthographic depth image. Values lie in [0, 1]; pixels whose
/// ray misses the mesh hold the background sentinel 1.0.
struct DepthMap {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<float> values;

    DepthMap() = default;
    DepthMap(std::uint32_t w, std::uint32_t h)
        : width(w), height(h),
          values(static_cast<std::size_t>(w) * h, 1.0f) {}

    float at(std::uint32_t px, std::uint32_t py) const {
        return values[static_cast<std::size_t>(py) * width + px];
    }
};

enum class Projection : std::uint8_t { orthographic = 0 };

struct Viewpoint {
    double azimuth_deg = 0.0;    // [0, 360), counterclockwise about +Z
    double elevation_deg = 0.0;  // above the horizon, toward +Z
    Projection projection = Projection::orthographic;
};

/// n viewpoints at azimuths k * (360 / n), shared elevation.
inline std::vector<Viewpoint> viewpoint_ring(std::size_t n, double elevation_deg) {
    if (n == 0) throw ArgumentError("viewpoint_ring: n must be >= 1");
    std::vector<Viewpoint> views(n);
    for (std::size_t k = 0; k < n; ++k) {
        views[k].azimuth_deg = 360.0 * static_cast<double>(k) / static_cast<double>(n);
        views[k].elevation_deg = elevation_deg;
    }
    return views;
}

namespace detail {

struct RayBasis {
    Vec3 forward;  // from the camera side toward the origin
    Vec3 right;
    Vec3 up;
};

inline RayBasis view_basis(const Viewpoint& view) {
    double a = view.azimuth_deg * (M_PI / 180.0);
    double e = view.elevation_deg * (M_PI / 180.0);
    Vec3 cam{std::cos(e) * std::cos(a), std::cos(e) * std::sin(a), std::sin(e)};
    RayBasis b;
    b.forward = cam * -1.0;
    b.right = {std::sin(a), -std::cos(a), 0.0};
    b.up = b.forward.cross(b.right);
    return b;
}

// Intersection parameter range of a ray with [-0.5, 0.5]^3, unrestricted t.
inline bool domain_slab(const Vec3& p0, const Vec3& dir, double& t_near,
                        double& t_far) {
    t_near = -std::numeric_limits<double>::infinity();
    t_far = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        double o = p0[axis], d = dir[axis];
        if (std::fabs(d) < 1e-15) {
            if (o < -0.5 || o > 0.5) return false;
            continue;
        }
        double t1 = (-0.5 - o) / d;
        double t2 = (0.5 - o) / d;
        if (t1 > t2) std::swap(t1, t2);
        t_near = std::max(t_near, t1);
        t_far = std::min(t_far, t2);
    }
    return t_near <= t_far;
}

// Moeller-Trumbore, both-sided. The barycentric tolerance keeps rays that
// run exactly along a shared triangle edge (pixel grids do hit face
// diagonals) from slipping between the two triangles.
inline bool ray_triangle(const Vec3& p0, const Vec3& dir, const std::array<Vec3, 3>& tri,
                         double& t_hit) {
    constexpr double eps = 1e-9;
    const Vec3 e1 = tri[1] - tri[0];
    const Vec3 e2 = tri[2] - tri[0];
    const Vec3 pv = dir.cross(e2);
    double det = e1.dot(pv);
    if (std::fabs(det) < 1e-14) return false;
    double inv = 1.0 / det;
    const Vec3 tv = p0 - tri[0];
    double u = tv.dot(pv) * inv;
    if (u < -eps || u > 1.0 + eps) return false;
    const Vec3 qv = tv.cross(e1);
    double v = dir.dot(qv) * inv;
    if (v < -eps || u + v > 1.0 + eps) return false;
    t_hit = e2.dot(qv) * inv;
    return true;
}

}  // namespace detail

/// Orthographic depth render. Rays pass through a size x size pixel grid
/// over the unit square perpendicular to the view direction; depth is the
/// hit parameter normalized to the ray's traversal of the [-0.5, 0.5]^3
/// domain, with misses reading 1.0.
inline DepthMap render_depth(const TriangleMesh& mesh, const Viewpoint& view,
                             std::uint32_t size) {
    if (size < 8) throw ArgumentError("render_depth: size must be >= 8");
    validate_mesh(mesh);
    detail::RayBasis basis = detail::view_basis(view);
    DepthMap depth(size, size);
    const double inv = 1.0 / static_cast<double>(size);
    for (std::uint32_t py = 0; py < size; ++py) {
        double sy = 0.5 - (py + 0.5) * inv;
        for (std::uint32_t px = 0; px < size; ++px) {
            double sx = (px + 0.5) * inv - 0.5;
            Vec3 p0 = basis.right * sx + basis.up * sy;
            double t_near, t_far;
            if (!detail::domain_slab(p0, basis.forward, t_near, t_far) ||
                !(t_far > t_near)) {
                continue;  // stays at the background sentinel
            }
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                double t_hit;
                if (detail::ray_triangle(p0, basis.forward, mesh.triangle(t), t_hit)) {
                    best = std::min(best, t_hit);
                }
            }
            if (std::isinf(best)) continue;
            double d = (best - t_near) / (t_far - t_near);
            d = std::clamp(d, 0.0, 1.0);
            depth.values[static_cast<std::size_t>(py) * size + px] =
                static_cast<float>(d);
        }
    }
    return depth;
}

}  // namespace voxc

#endif  // VOXC_DEPTH_RENDER_HPP
