#ifndef VOXC_LAYERS_HPP
#define VOXC_LAYERS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "voxc/tensor.hpp"

namespace voxc {

enum class LayerKind { conv2d, fully_connected, leaky_relu, sigmoid };

inline const char* layer_kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::fully_connected: return "fully_connected";
        case LayerKind::leaky_relu: return "leaky_relu";
        case LayerKind::sigmoid: return "sigmoid";
    }
    return "?";
}

/// One layer of the network chain. Only the fields of the active kind are
/// meaningful; the rest stay at their defaults.
struct LayerSpec {
    LayerKind kind = LayerKind::sigmoid;

    // conv2d
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel_size = 0;
    std::size_t stride = 1;
    std::size_t zero_padding = 0;

    // fully_connected
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;

    // leaky_relu
    double slope = 0.01;

    static LayerSpec conv(std::size_t cin, std::size_t cout, std::size_t k,
                          std::size_t stride, std::size_t pad) {
        LayerSpec s;
        s.kind = LayerKind::conv2d;
        s.in_channels = cin;
        s.out_channels = cout;
        s.kernel_size = k;
        s.stride = stride;
        s.zero_padding = pad;
        if (k < 1) throw ArgumentError("conv2d: kernel_size must be >= 1");
        if (stride < 1) throw ArgumentError("conv2d: stride must be >= 1");
        return s;
    }

    static LayerSpec fc(std::size_t in, std::size_t out) {
        LayerSpec s;
        s.kind = LayerKind::fully_connected;
        s.in_dim = in;
        s.out_dim = out;
        return s;
    }

    static LayerSpec leaky(double slope = 0.01) {
        if (!(slope > 0.0 && slope < 1.0)) {
            throw ArgumentError("leaky_relu: slope must lie in (0, 1)");
        }
        LayerSpec s;
        s.kind = LayerKind::leaky_relu;
        s.slope = slope;
        return s;
    }

    static LayerSpec sigmoid() {
        LayerSpec s;
        s.kind = LayerKind::sigmoid;
        return s;
    }

    bool has_params() const {
        return kind == LayerKind::conv2d || kind == LayerKind::fully_connected;
    }
};

inline std::size_t conv_output_extent(std::size_t in, std::size_t k,
                                      std::size_t stride, std::size_t pad,
                                      const char* axis) {
    std::size_t padded = in + 2 * pad;
    if (padded < k) {
        throw DimensionError(std::string("conv2d: kernel ") + std::to_string(k) +
                             " larger than padded input " + std::to_string(padded) +
                             " on axis " + axis);
    }
    return (padded - k) / stride + 1;
}

namespace detail {

// Raw kernels. Shapes are trusted here; the wrappers validate.
// Parallel regions always partition disjoint output elements with a fixed
// sequential accumulation per element, so results are bitwise independent
// of the thread count.

// Dot product with sixteen independent accumulator lanes. The fixed
// lane-to-element mapping and fixed reduction order keep results
// reproducible while letting the compiler vectorize the reduction.
template <typename T>
T dot_lanes(const T* a, const T* b, std::size_t n) {
    T acc[16] = {};
    std::size_t j = 0;
    for (; j + 16 <= n; j += 16) {
        for (std::size_t l = 0; l < 16; ++l) acc[l] += a[j + l] * b[j + l];
    }
    for (; j < n; ++j) acc[j % 16] += a[j] * b[j];
    T s = T(0);
    for (std::size_t l = 0; l < 16; ++l) s += acc[l];
    return s;
}

template <typename T>
void fc_fwd(const T* x, const T* w, const T* b, T* y, std::size_t out_dim,
            std::size_t in_dim) {
#pragma omp parallel for schedule(static) if (out_dim * in_dim > 16384)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(out_dim); ++i) {
        const T* row = w + static_cast<std::size_t>(i) * in_dim;
        y[i] = b[i] + dot_lanes(row, x, in_dim);
    }
}

// dw/db accumulate (+=); gx is overwritten.
template <typename T>
void fc_bwd_params(const T* x, const T* gy, T* dw, T* db, std::size_t out_dim,
                   std::size_t in_dim) {
#pragma omp parallel for schedule(static) if (out_dim * in_dim > 16384)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(out_dim); ++i) {
        T* dwrow = dw + static_cast<std::size_t>(i) * in_dim;
        const T g = gy[i];
        for (std::size_t j = 0; j < in_dim; ++j) dwrow[j] += g * x[j];
        db[i] += g;
    }
}

template <typename T>
void fc_bwd_input(const T* w, const T* gy, T* gx, std::size_t out_dim,
                  std::size_t in_dim) {
#pragma omp parallel if (out_dim * in_dim > 16384)
    {
#ifdef _OPENMP
        int nt = omp_get_num_threads();
        int tid = omp_get_thread_num();
#else
        int nt = 1;
        int tid = 0;
#endif
        std::size_t chunk = (in_dim + nt - 1) / nt;
        std::size_t lo = std::min(in_dim, chunk * static_cast<std::size_t>(tid));
        std::size_t hi = std::min(in_dim, lo + chunk);
        for (std::size_t j = lo; j < hi; ++j) gx[j] = T(0);
        for (std::size_t i = 0; i < out_dim; ++i) {
            const T* row = w + i * in_dim;
            const T g = gy[i];
            for (std::size_t j = lo; j < hi; ++j) gx[j] += g * row[j];
        }
    }
}

struct ConvDims {
    std::size_t cin, h, w;
    std::size_t cout, k, stride, pad;
    std::size_t ho, wo;
};

// Valid output-column range for a given kernel column: ow such that
// 0 <= ow*stride + kw - pad < w.
inline void conv_col_range(const ConvDims& d, std::size_t kw, std::size_t& lo,
                           std::size_t& hi) {
    std::ptrdiff_t off = static_cast<std::ptrdiff_t>(kw) -
                         static_cast<std::ptrdiff_t>(d.pad);
    std::ptrdiff_t s = static_cast<std::ptrdiff_t>(d.stride);
    std::ptrdiff_t lo_i = off < 0 ? (-off + s - 1) / s : 0;
    std::ptrdiff_t hi_i = static_cast<std::ptrdiff_t>(d.wo);  // exclusive
    std::ptrdiff_t max_iw = static_cast<std::ptrdiff_t>(d.w) - 1 - off;
    if (max_iw < 0) {
        lo = hi = 0;
        return;
    }
    hi_i = std::min(hi_i, max_iw / s + 1);
    lo = static_cast<std::size_t>(std::min(lo_i, hi_i));
    hi = static_cast<std::size_t>(hi_i);
}

template <typename T>
void conv2d_fwd(const T* x, const T* w, const T* b, T* y, const ConvDims& d) {
#pragma omp parallel for schedule(static) if (d.cout > 1)
    for (std::ptrdiff_t oc = 0; oc < static_cast<std::ptrdiff_t>(d.cout); ++oc) {
        T* ybase = y + static_cast<std::size_t>(oc) * d.ho * d.wo;
        for (std::size_t i = 0; i < d.ho * d.wo; ++i) ybase[i] = b[oc];
        for (std::size_t ic = 0; ic < d.cin; ++ic) {
            const T* xc = x + ic * d.h * d.w;
            const T* wbase =
                w + ((static_cast<std::size_t>(oc) * d.cin + ic) * d.k) * d.k;
            for (std::size_t kh = 0; kh < d.k; ++kh) {
                for (std::size_t kw = 0; kw < d.k; ++kw) {
                    const T wv = wbase[kh * d.k + kw];
                    std::size_t lo, hi;
                    conv_col_range(d, kw, lo, hi);
                    std::ptrdiff_t coff = static_cast<std::ptrdiff_t>(kw) -
                                          static_cast<std::ptrdiff_t>(d.pad);
                    for (std::size_t oh = 0; oh < d.ho; ++oh) {
                        std::ptrdiff_t ih =
                            static_cast<std::ptrdiff_t>(oh * d.stride + kh) -
                            static_cast<std::ptrdiff_t>(d.pad);
                        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(d.h)) continue;
                        const T* xrow = xc + static_cast<std::size_t>(ih) * d.w;
                        T* yrow = ybase + oh * d.wo;
                        for (std::size_t ow = lo; ow < hi; ++ow) {
                            yrow[ow] += wv * xrow[ow * d.stride + coff];
                        }
                    }
                }
            }
        }
    }
}

template <typename T>
void conv2d_bwd_params(const T* x, const T* gy, T* dw, T* db, const ConvDims& d) {
#pragma omp parallel for schedule(static) if (d.cout > 1)
    for (std::ptrdiff_t oc = 0; oc < static_cast<std::ptrdiff_t>(d.cout); ++oc) {
        const T* gyc = gy + static_cast<std::size_t>(oc) * d.ho * d.wo;
        T acc_b = T(0);
        for (std::size_t i = 0; i < d.ho * d.wo; ++i) acc_b += gyc[i];
        db[oc] += acc_b;
        for (std::size_t ic = 0; ic < d.cin; ++ic) {
            const T* xc = x + ic * d.h * d.w;
            T* dwbase =
                dw + ((static_cast<std::size_t>(oc) * d.cin + ic) * d.k) * d.k;
            for (std::size_t kh = 0; kh < d.k; ++kh) {
                for (std::size_t kw = 0; kw < d.k; ++kw) {
                    std::size_t lo, hi;
                    conv_col_range(d, kw, lo, hi);
                    std::ptrdiff_t coff = static_cast<std::ptrdiff_t>(kw) -
                                          static_cast<std::ptrdiff_t>(d.pad);
                    T acc = T(0);
                    for (std::size_t oh = 0; oh < d.ho; ++oh) {
                        std::ptrdiff_t ih =
                            static_cast<std::ptrdiff_t>(oh * d.stride + kh) -
                            static_cast<std::ptrdiff_t>(d.pad);
                        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(d.h)) continue;
                        const T* xrow = xc + static_cast<std::size_t>(ih) * d.w;
                        const T* gyrow = gyc + oh * d.wo;
                        if (d.stride == 1) {
                            acc += dot_lanes(gyrow + lo, xrow + lo + coff, hi - lo);
                        } else {
                            T lane[4] = {T(0), T(0), T(0), T(0)};
                            std::size_t ow = lo;
                            for (; ow + 4 <= hi; ow += 4) {
                                for (std::size_t l = 0; l < 4; ++l) {
                                    lane[l] += gyrow[ow + l] *
                                               xrow[(ow + l) * d.stride + coff];
                                }
                            }
                            for (; ow < hi; ++ow) {
                                lane[(ow - lo) % 4] +=
                                    gyrow[ow] * xrow[ow * d.stride + coff];
                            }
                            acc += (lane[0] + lane[2]) + (lane[1] + lane[3]);
                        }
                    }
                    dwbase[kh * d.k + kw] += acc;
                }
            }
        }
    }
}

template <typename T>
void conv2d_bwd_input(const T* w, const T* gy, T* gx, const ConvDims& d) {
    for (std::size_t i = 0; i < d.cin * d.h * d.w; ++i) gx[i] = T(0);
#pragma omp parallel for schedule(static) if (d.cin > 1)
    for (std::ptrdiff_t ic = 0; ic < static_cast<std::ptrdiff_t>(d.cin); ++ic) {
        T* gxc = gx + static_cast<std::size_t>(ic) * d.h * d.w;
        for (std::size_t oc = 0; oc < d.cout; ++oc) {
            const T* gyc = gy + oc * d.ho * d.wo;
            const T* wbase =
                w + ((oc * d.cin + static_cast<std::size_t>(ic)) * d.k) * d.k;
            for (std::size_t kh = 0; kh < d.k; ++kh) {
                for (std::size_t kw = 0; kw < d.k; ++kw) {
                    const T wv = wbase[kh * d.k + kw];
                    std::size_t lo, hi;
                    conv_col_range(d, kw, lo, hi);
                    std::ptrdiff_t coff = static_cast<std::ptrdiff_t>(kw) -
                                          static_cast<std::ptrdiff_t>(d.pad);
                    for (std::size_t oh = 0; oh < d.ho; ++oh) {
                        std::ptrdiff_t ih =
                            static_cast<std::ptrdiff_t>(oh * d.stride + kh) -
                            static_cast<std::ptrdiff_t>(d.pad);
                        if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(d.h)) continue;
                        T* gxrow = gxc + static_cast<std::size_t>(ih) * d.w;
                        const T* gyrow = gyc + oh * d.wo;
                        for (std::size_t ow = lo; ow < hi; ++ow) {
                            gxrow[ow * d.stride + coff] += wv * gyrow[ow];
                        }
                    }
                }
            }
        }
    }
}

}  // namespace detail

// ---- friendly wrappers over the kernels -----------------------------------

template <typename T>
Tensor<T> fc_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    if (w.rank() != 2) {
        throw DimensionError("fc_forward: weight must be rank 2, got " + shape_str(w));
    }
    std::size_t out_dim = w.shape[0], in_dim = w.shape[1];
    if (x.numel() != in_dim) {
        throw DimensionError("fc_forward: input length " + std::to_string(x.numel()) +
                             " != in_dim " + std::to_string(in_dim) + " (weight axis 1)");
    }
    if (b.numel() != out_dim) {
        throw DimensionError("fc_forward: bias length " + std::to_string(b.numel()) +
                             " != out_dim " + std::to_string(out_dim) +
                             " (weight axis 0)");
    }
    Tensor<T> y({out_dim});
    detail::fc_fwd(x.ptr(), w.ptr(), b.ptr(), y.ptr(), out_dim, in_dim);
    return y;
}

inline detail::ConvDims conv_dims(const LayerSpec& spec, std::size_t h, std::size_t w) {
    detail::ConvDims d;
    d.cin = spec.in_channels;
    d.h = h;
    d.w = w;
    d.cout = spec.out_channels;
    d.k = spec.kernel_size;
    d.stride = spec.stride;
    d.pad = spec.zero_padding;
    d.ho = conv_output_extent(h, d.k, d.stride, d.pad, "H");
    d.wo = conv_output_extent(w, d.k, d.stride, d.pad, "W");
    return d;
}

template <typename T>
Tensor<T> conv2d_forward(const Tensor<T>& x, const LayerSpec& spec,
                         const Tensor<T>& w, const Tensor<T>& b) {
    if (x.rank() != 3) {
        throw DimensionError("conv2d_forward: input must be CxHxW, got " + shape_str(x));
    }
    if (x.shape[0] != spec.in_channels) {
        throw DimensionError("conv2d_forward: input channels " +
                             std::to_string(x.shape[0]) + " != in_channels " +
                             std::to_string(spec.in_channels) + " (axis 0)");
    }
    std::vector<std::size_t> wshape = {spec.out_channels, spec.in_channels,
                                       spec.kernel_size, spec.kernel_size};
    if (w.shape != wshape) {
        throw DimensionError("conv2d_forward: weight shape " + shape_str(w) +
                             " does not match spec");
    }
    if (b.numel() != spec.out_channels) {
        throw DimensionError("conv2d_forward: bias length " + std::to_string(b.numel()) +
                             " != out_channels " + std::to_string(spec.out_channels));
    }
    detail::ConvDims d = conv_dims(spec, x.shape[1], x.shape[2]);
    Tensor<T> y({d.cout, d.ho, d.wo});
    detail::conv2d_fwd(x.ptr(), w.ptr(), b.ptr(), y.ptr(), d);
    return y;
}

template <typename T>
Tensor<T> leaky_relu(const Tensor<T>& x, double slope) {
    if (!(slope > 0.0 && slope < 1.0)) {
        throw ArgumentError("leaky_relu: slope must lie in (0, 1)");
    }
    Tensor<T> y = x;
    const T a = static_cast<T>(slope);
    for (T& v : y.data) v = v > T(0) ? v : a * v;
    return y;
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& x) {
    Tensor<T> y = x;
    for (T& v : y.data) v = T(1) / (T(1) + std::exp(-v));
    return y;
}

}  // namespace voxc

#endif  // VOXC_LAYERS_HPP
