#ifndef VOXC_VOXC_HPP
#define VOXC_VOXC_HPP

#include "voxc/checkpoint.hpp"
#include "voxc/codec.hpp"
#include "voxc/dataset.hpp"
#include "voxc/depth_render.hpp"
#include "voxc/geometry.hpp"
#include "voxc/layers.hpp"
#include "voxc/loss.hpp"
#include "voxc/metrics.hpp"
#include "voxc/models.hpp"
#include "voxc/network.hpp"
#include "voxc/obj_export.hpp"
#include "voxc/optimizer.hpp"
#include "voxc/primitives.hpp"
#include "voxc/rng.hpp"
#include "voxc/tensor.hpp"
#include "voxc/train.hpp"
#include "voxc/voxelize.hpp"

#endif  // VOXC_VOXC_HPP
