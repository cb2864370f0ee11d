#ifndef VOXC_OBJ_EXPORT_HPP
#define VOXC_OBJ_EXPORT_HPP

#include <ostream>
#include <sstream>
#include <string>

#include "voxc/io_util.hpp"
#include "voxc/tensor.hpp"
#include "voxc/voxelize.hpp"

namespace voxc {

template <typename T>
VoxelGrid threshold_grid(const Tensor<T>& probs, std::uint32_t resolution,
                         double tau = 0.5) {
    VoxelGrid grid(resolution);
    if (probs.numel() != grid.size()) {
        throw DimensionError("threshold_grid: " + std::to_string(probs.numel()) +
                             " probabilities for a " + std::to_string(resolution) +
                             "^3 grid");
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.occupancy[i] = static_cast<double>(probs[i]) > tau ? 1 : 0;
    }
    return grid;
}

/// One axis-aligned cube (8 vertices, 12 triangles) per occupied voxel, in
/// grid coordinates over [-0.5, 0.5]^3. Vertex ordering is fixed by voxel
/// iteration order, so output bytes are deterministic.
inline void export_obj(std::ostream& out, const VoxelGrid& grid) {
    out << "# voxel grid export, resolution " << grid.resolution << "\n";
    const double r = static_cast<double>(grid.resolution);
    std::size_t base = 1;  // OBJ indices are 1-based
    std::ostringstream faces;
    for (std::uint32_t i = 0; i < grid.resolution; ++i)
        for (std::uint32_t j = 0; j < grid.resolution; ++j)
            for (std::uint32_t k = 0; k < grid.resolution; ++k) {
                if (!grid.at(i, j, k)) continue;
                double x0 = -0.5 + i / r, x1 = -0.5 + (i + 1) / r;
                double y0 = -0.5 + j / r, y1 = -0.5 + (j + 1) / r;
                double z0 = -0.5 + k / r, z1 = -0.5 + (k + 1) / r;
                out << "v " << x0 << " " << y0 << " " << z0 << "\n"
                    << "v " << x1 << " " << y0 << " " << z0 << "\n"
                    << "v " << x1 << " " << y1 << " " << z0 << "\n"
                    << "v " << x0 << " " << y1 << " " << z0 << "\n"
                    << "v " << x0 << " " << y0 << " " << z1 << "\n"
                    << "v " << x1 << " " << y0 << " " << z1 << "\n"
                    << "v " << x1 << " " << y1 << " " << z1 << "\n"
                    << "v " << x0 << " " << y1 << " " << z1 << "\n";
                static const int quads[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7},
                                                {0, 1, 5, 4}, {2, 3, 7, 6},
                                                {1, 2, 6, 5}, {3, 0, 4, 7}};
                for (const auto& q : quads) {
                    faces << "f " << base + q[0] << " " << base + q[1] << " "
                          << base + q[2] << "\n"
                          << "f " << base + q[0] << " " << base + q[2] << " "
                          << base + q[3] << "\n";
                }
                base += 8;
            }
    out << faces.str();
}

inline void export_obj(const std::string& path, const VoxelGrid& grid) {
    std::ostringstream out;
    export_obj(out, grid);
    detail::write_file(path, out.str());
}

}  // namespace voxc

#endif  // VOXC_OBJ_EXPORT_HPP
