#pragma once

#include <cstdint>
#include <functional>

#include "wino/tensor.hpp"
#include "wino/transforms.hpp"

namespace wino {

class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OpCounter {
    std::uint64_t multiplications = 0;
    std::uint64_t additions = 0;

    void reset() { multiplications = additions = 0; }
};

// Slow spatial-domain convolution, the ground truth for everything else.
// Sliding dot product (no kernel flip): O(k,i,j) = sum_{c,u,v} W(k,c,u,v) I(c,i+u,j+v).
// The paper's F(2x2,3x3) matrices reproduce exactly this orientation; see
// README for the one-off verification.
Tensor direct_conv(const Tensor& img, const Tensor& w, OpCounter* counter = nullptr);

// Per-tile filtering of an already tiled input: (C x T x p x q, K x C x r x s)
// -> K x T x m x n.
Tensor overlapped_conv(const Tensor& tiled, const Tensor& w, std::size_t m, std::size_t n,
                       OpCounter* counter = nullptr);

// Central-difference gradient of a scalar function, step h scaled per
// coordinate by max(1, |x_i|).
Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        double h = 1e-5);

// Spatial convolution layer gradients (standard formulas), used by the
// trainer's spatial pre-training path.
Tensor direct_conv_grad_weights(const Tensor& grad_out, const Tensor& img,
                                std::size_t k, std::size_t r, std::size_t s);
Tensor direct_conv_grad_input(const Tensor& grad_out, const Tensor& w,
                              std::size_t h_i, std::size_t w_i);

}  // namespace wino
