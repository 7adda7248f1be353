#include "wino/tensor.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

namespace wino {

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ')';
    return os.str();
}

Tensor::Tensor(std::vector<std::size_t> shape) : shape_(std::move(shape)) {
    std::size_t n = 1;
    for (std::size_t e : shape_) {
        if (e == 0) throw ShapeError("tensor extent must be positive, got shape " + shape_str(shape_));
        n *= e;
    }
    data_.assign(n, 0.0);
    init_strides();
}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    std::size_t n = 1;
    for (std::size_t e : shape_) {
        if (e == 0) throw ShapeError("tensor extent must be positive, got shape " + shape_str(shape_));
        n *= e;
    }
    if (n != data_.size())
        throw ShapeError("data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_str(shape_));
    init_strides();
}

void Tensor::init_strides() {
    strides_.assign(shape_.size(), 1);
    for (std::size_t k = shape_.size(); k-- > 1;)
        strides_[k - 1] = strides_[k] * shape_[k];
}

std::size_t Tensor::flat_index(const std::vector<std::size_t>& idx) const {
    if (idx.size() != shape_.size())
        throw ShapeError("index rank " + std::to_string(idx.size()) +
                         " does not match tensor rank " + std::to_string(shape_.size()));
    std::size_t off = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] >= shape_[k])
            throw ShapeError("index " + std::to_string(idx[k]) + " out of range for axis " +
                             std::to_string(k) + " of shape " + shape_str(shape_));
        off += idx[k] * strides_[k];
    }
    return off;
}

std::vector<std::size_t> Tensor::unflatten(std::size_t offset) const {
    if (offset >= data_.size())
        throw ShapeError("flat offset " + std::to_string(offset) + " out of range");
    std::vector<std::size_t> idx(shape_.size());
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        idx[k] = offset / strides_[k];
        offset %= strides_[k];
    }
    return idx;
}

void Tensor::fill(double v) {
    std::fill(data_.begin(), data_.end(), v);
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ * cols_ != entries_.size())
        throw ShapeError("matrix entries length " + std::to_string(entries_.size()) +
                         " does not match " + shape_str());
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows.begin() == rows.end() ? 0 : rows.begin()->size();
    entries_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw ShapeError("ragged matrix initializer");
        entries_.insert(entries_.end(), r.begin(), r.end());
    }
}

std::string Matrix::shape_str() const {
    return wino::shape_str({rows_, cols_});
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("mat_mul shape mismatch: " + a.shape_str() + " x " + b.shape_str());
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;  // fixed left-to-right accumulation
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc += a(i, k) * b(k, j);
            out(i, j) = acc;
        }
    return out;
}

Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            out(j, i) = a(i, j);
    return out;
}

Matrix sandwich(const Matrix& u, const Matrix& x, const Matrix& v) {
    if (u.rows() != x.rows() || v.rows() != x.cols())
        throw ShapeError("sandwich shape mismatch: u=" + u.shape_str() + " x=" + x.shape_str() +
                         " v=" + v.shape_str());
    return mat_mul(mat_mul(transpose(u), x), v);
}

Matrix hadamard(const Matrix& x, const Matrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw ShapeError("hadamard shape mismatch: " + x.shape_str() + " vs " + y.shape_str());
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.entries().size(); ++i)
        out.entries()[i] = x.entries()[i] * y.entries()[i];
    return out;
}

Matrix identity(std::size_t n) {
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
}

namespace {

void put_u32_le(std::ostream& os, std::uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    os.write(b, 4);
}

std::uint32_t get_u32_le(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw IoError("truncated WGT1 header");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

}  // namespace

void write_wgt1(const std::string& path, const Tensor& t, Dtype dtype) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os.write("WGT1", 4);
    os.put(static_cast<char>(dtype));
    os.put(static_cast<char>(t.rank()));
    for (std::size_t e : t.shape()) put_u32_le(os, static_cast<std::uint32_t>(e));
    if (dtype == Dtype::f64) {
        // assumes little-endian host, as does the reader
        os.write(reinterpret_cast<const char*>(t.data().data()),
                 static_cast<std::streamsize>(t.size() * sizeof(double)));
    } else {
        std::vector<float> buf(t.data().begin(), t.data().end());
        os.write(reinterpret_cast<const char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(float)));
    }
    if (!os) throw IoError("write failed for " + path);
}

Tensor read_wgt1(const std::string& path, Dtype* dtype_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "WGT1", 4) != 0)
        throw IoError(path + ": bad WGT1 magic");
    int dtype = is.get();
    int ndim = is.get();
    if (dtype != 1 && dtype != 2) throw IoError(path + ": unknown dtype code");
    if (ndim < 0 || !is) throw IoError(path + ": truncated header");
    std::vector<std::size_t> shape(static_cast<std::size_t>(ndim));
    std::size_t n = 1;
    for (auto& e : shape) {
        e = get_u32_le(is);
        if (e == 0) throw IoError(path + ": zero extent");
        n *= e;
    }
    std::vector<double> data(n);
    if (dtype == 1) {
        is.read(reinterpret_cast<char*>(data.data()),
                static_cast<std::streamsize>(n * sizeof(double)));
    } else {
        std::vector<float> buf(n);
        is.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(n * sizeof(float)));
        std::copy(buf.begin(), buf.end(), data.begin());
    }
    if (!is) throw IoError(path + ": truncated payload");
    if (dtype_out) *dtype_out = static_cast<Dtype>(dtype);
    return Tensor(std::move(shape), std::move(data));
}

}  // namespace wino
