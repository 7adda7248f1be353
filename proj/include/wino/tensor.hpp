#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace wino {

class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string shape_str(const std::vector<std::size_t>& shape);

// Dense n-dimensional row-major tensor of f64 values.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<double> data);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    std::size_t flat_index(const std::vector<std::size_t>& idx) const;
    std::vector<std::size_t> unflatten(std::size_t offset) const;

    double& operator[](std::size_t offset) { return data_[offset]; }
    double operator[](std::size_t offset) const { return data_[offset]; }

    template <typename... Ix>
    double& operator()(Ix... ix) {
        return data_[offset_of(ix...)];
    }
    template <typename... Ix>
    double operator()(Ix... ix) const {
        return data_[offset_of(ix...)];
    }

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

    void fill(double v);

private:
    template <typename... Ix>
    std::size_t offset_of(Ix... ix) const {
        const std::size_t idx[] = {static_cast<std::size_t>(ix)...};
        static_assert(sizeof...(Ix) > 0);
        std::size_t off = 0;
        for (std::size_t k = 0; k < sizeof...(Ix); ++k)
            off += idx[k] * strides_[k];
        return off;
    }

    void init_strides();

    std::vector<std::size_t> shape_;
    std::vector<std::size_t> strides_;
    std::vector<double> data_;
};

// Small dense row-major matrix used for the constant transform matrices
// and the per-tile p x q blocks.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    std::vector<double>& entries() { return entries_; }
    const std::vector<double>& entries() const { return entries_; }

    std::string shape_str() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
// u^T x v
Matrix sandwich(const Matrix& u, const Matrix& x, const Matrix& v);
Matrix hadamard(const Matrix& x, const Matrix& y);
Matrix identity(std::size_t n);

enum class Dtype : std::uint8_t { f64 = 1, f32 = 2 };

// "WGT1" binary tensor files: magic, u8 dtype, u8 ndim, ndim x u32 LE
// extents, then raw little-endian row-major elements.
void write_wgt1(const std::string& path, const Tensor& t, Dtype dtype = Dtype::f64);
Tensor read_wgt1(const std::string& path, Dtype* dtype_out = nullptr);

}  // namespace wino
