#pragma once

#include <optional>

#include "wino/reference.hpp"
#include "wino/tensor.hpp"
#include "wino/transforms.hpp"

namespace wino {

class ConsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Intermediate tensors retained by the forward pass; both backward
// operations read them and backward_weights additionally deposits the
// shared dL/dZ here.
struct ForwardCache {
    Tensor i_tiled;               // C x T x p x q
    Tensor i_f;                   // C x T x p x q, transformed tiles
    Tensor z;                     // K x T x p x q, pre-inverse-transform output
    std::optional<Tensor> grad_z; // K x T x p x q, set by backward_weights
    std::size_t k = 0, c = 0, t = 0, p = 0, q = 0;
};

// W (K x C x r x s) -> W_F (K x C x p x q) via the G matrices.
Tensor lift_spatial_weights(const Tensor& w, const TransformSet& tset);

// Forward pass of the Winograd layer. w_f has shape K x C x p x q.
// Returns O (K x Ho x Wo); the cache captures what backward needs.
Tensor winograd_forward(const Tensor& img, const Tensor& w_f, const TransformSet& tset,
                        const TileGeometry& geom, ForwardCache* cache = nullptr,
                        OpCounter* counter = nullptr);

// dL/dW_F from dL/dO (K x Ho x Wo). Stores dL/dZ in the cache for
// backward_input to reuse.
Tensor winograd_backward_weights(const Tensor& grad_o, ForwardCache& cache,
                                 const TransformSet& tset, const TileGeometry& geom);

// dL/dI (C x Hi x Wi); requires the dL/dZ computed by backward_weights.
Tensor winograd_backward_input(const ForwardCache& cache, const Tensor& w_f,
                               const TransformSet& tset, const TileGeometry& geom);

}  // namespace wino
