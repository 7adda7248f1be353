#pragma once

#include <cstdint>
#include <vector>

#include "wino/layer.hpp"
#include "wino/tensor.hpp"
#include "wino/transforms.hpp"

namespace wino {

class CorruptFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// p*q independent K x C sparse matrices in CSR form, one per Winograd
// coordinate (i,j).
template <typename T>
struct PointwiseCsr {
    struct Slice {
        std::vector<std::size_t> row_ptr;  // length K+1
        std::vector<std::size_t> col_idx;  // strictly increasing within a row
        std::vector<T> values;
    };

    std::size_t k = 0, c = 0, p = 0, q = 0;
    std::vector<Slice> slices;  // p*q, row-major over (i,j)

    const Slice& slice(std::size_t i, std::size_t j) const { return slices[i * q + j]; }
    Slice& slice(std::size_t i, std::size_t j) { return slices[i * q + j]; }

    std::size_t nnz_total() const {
        std::size_t n = 0;
        for (const auto& s : slices) n += s.values.size();
        return n;
    }
};

// Entries with |value| <= zero_tol are dropped. Weights are K x C x p x q.
template <typename T>
PointwiseCsr<T> compress(const Tensor& w_f, double zero_tol = 0.0);

// Inverse of compress at zero_tol = 0.
template <typename T>
Tensor reconstruct(const PointwiseCsr<T>& csr);

template <typename T>
double density(const PointwiseCsr<T>& csr) {
    return static_cast<double>(csr.nnz_total()) /
           static_cast<double>(csr.k * csr.c * csr.p * csr.q);
}

// out (K x T, T contiguous) += one CSR slice times dense (C x T).
template <typename T>
void spmdm(const typename PointwiseCsr<T>::Slice& slice, std::size_t k, std::size_t c,
           const T* dense, std::size_t t_n, T* out, OpCounter* counter = nullptr);

// Activations in (p*q) x C x T order with the tile dimension contiguous.
template <typename T>
struct TiledActivationLayout {
    std::size_t p = 0, q = 0, c = 0, t = 0;
    std::vector<T> buffer;  // ((i*q+j)*C + c)*T + t

    T* plane(std::size_t i, std::size_t j) { return buffer.data() + (i * q + j) * c * t; }
    const T* plane(std::size_t i, std::size_t j) const {
        return buffer.data() + (i * q + j) * c * t;
    }
};

// Input transform of one image into the tile-fastest layout.
template <typename T>
TiledActivationLayout<T> build_tiled_layout(const Tensor& img, const TransformSet& tset,
                                            const TileGeometry& geom);

// Sparse Winograd inference over a batch (N x C x Hi x Wi) -> N x K x Ho x Wo.
// Work is partitioned over images, then over output-channel blocks when
// images < workers; output is bitwise independent of the worker count.
template <typename T>
Tensor sparse_forward(const Tensor& batch, const PointwiseCsr<T>& csr, const TransformSet& tset,
                      const TileGeometry& geom, unsigned workers = 1,
                      OpCounter* counter = nullptr);

}  // namespace wino
