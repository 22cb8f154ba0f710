#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "caco/error.hpp"

namespace caco {

using Shape = std::vector<std::size_t>;

inline std::string to_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

inline std::size_t element_count(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

/// Dense row-major array of doubles. A scalar has shape [1].
class Tensor {
public:
    Tensor() : shape_{1}, data_(1, 0.0) {}

    explicit Tensor(Shape shape) : shape_(std::move(shape)) {
        validate_shape();
        data_.assign(element_count(shape_), 0.0);
    }

    Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
        validate_shape();
        if (data_.size() != element_count(shape_))
            throw ShapeError("tensor of shape " + to_string(shape_) + " given " +
                             std::to_string(data_.size()) + " values");
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    static Tensor vector(std::vector<double> v) {
        const std::size_t n = v.size();
        return Tensor({n}, std::move(v));
    }

    static Tensor vector(std::initializer_list<double> v) { return vector(std::vector<double>(v)); }

    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v) {
        return Tensor({rows, cols}, std::move(v));
    }

    static Tensor zeros_like(const Tensor& t) { return Tensor(t.shape_); }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    bool is_scalar() const noexcept { return data_.size() == 1; }

    std::size_t rows() const { return rank() == 2 ? shape_[0] : data_.size(); }
    std::size_t cols() const { return rank() == 2 ? shape_[1] : 1; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    const std::vector<double>& values() const noexcept { return data_; }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    double& at(std::size_t r, std::size_t c) { return data_[r * shape_[1] + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * shape_[1] + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }

    double item() const {
        if (!is_scalar()) throw ShapeError("item() on non-scalar tensor " + to_string(shape_));
        return data_[0];
    }

    void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

    void add_scaled(const Tensor& other, double scale = 1.0) {
        require_same_shape(*this, other, "add_scaled");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const Tensor&, const Tensor&) = default;

    static void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
        if (a.shape_ != b.shape_)
            throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape_) + " vs " +
                             to_string(b.shape_));
    }

private:
    void validate_shape() const {
        if (shape_.empty()) throw ShapeError("tensor shape must have at least one extent");
        for (auto e : shape_)
            if (e == 0) throw ShapeError("tensor extents must be positive, got " + to_string(shape_));
    }

    Shape shape_;
    std::vector<double> data_;
};

} // namespace caco
