#ifndef VOXC_TENSOR_HPP
#define VOXC_TENSOR_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "voxc/errors.hpp"

namespace voxc {

/// Dense row-major tensor. The shape is dynamic; data lives in one
/// contiguous buffer of product(shape) elements.
template <typename T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> data;

    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> s)
        : shape(std::move(s)), data(checked_numel(shape)) {}

    Tensor(std::vector<std::size_t> s, std::vector<T> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (checked_numel(shape) != data.size()) {
            throw DimensionError("tensor: shape product " +
                                 std::to_string(checked_numel(shape)) +
                                 " != data length " + std::to_string(data.size()));
        }
    }

    static std::size_t checked_numel(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == 0) {
                throw DimensionError("tensor: zero extent on axis " + std::to_string(i));
            }
            n *= s[i];
        }
        return s.empty() ? 0 : n;
    }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }

    T* ptr() { return data.data(); }
    const T* ptr() const { return data.data(); }

    T& operator[](std::size_t i) { return data[i]; }
    const T& operator[](std::size_t i) const { return data[i]; }

    void fill(T v) { data.assign(data.size(), v); }

    void resize(std::vector<std::size_t> s) {
        std::size_t n = checked_numel(s);
        shape = std::move(s);
        data.resize(n);
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

template <typename T>
bool all_finite(const Tensor<T>& t) {
    for (const T& v : t.data) {
        if (!std::isfinite(static_cast<double>(v))) return false;
    }
    return true;
}

template <typename T>
std::string shape_str(const Tensor<T>& t) {
    std::string s = "[";
    for (std::size_t i = 0; i < t.shape.size(); ++i) {
        if (i) s += "x";
        s += std::to_string(t.shape[i]);
    }
    return s + "]";
}

}  // namespace voxc

#endif  // VOXC_TENSOR_HPP
