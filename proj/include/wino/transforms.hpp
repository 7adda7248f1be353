#pragma once

#include <cstddef>
#include <utility>

#include "wino/tensor.hpp"

namespace wino {

class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The six constant matrices of a Winograd algorithm producing an m x n
// output tile from a p x q input tile with an r x s kernel:
//   out = a1^T [ (g1 W g2^T) (*) (b1^T D b2) ] a2
struct TransformSet {
    Matrix a1, a2;  // p x m, q x n
    Matrix b1, b2;  // p x p, q x q
    Matrix g1, g2;  // p x r, q x s
    std::size_t m = 0, n = 0;
    std::size_t r = 0, s = 0;
    std::size_t p = 0, q = 0;  // m+r-1, n+s-1
};

// The fixed F(2x2,3x3) instance with exact half entries.
TransformSet f2x2_3x3_transforms();

// Cook-Toom construction at points 0, 1, -1, 2, -2, 1/2, -1/2 plus the
// point at infinity. Supports p = m+r-1 <= 8; rejects larger sizes.
TransformSet cook_toom_transforms(std::size_t m, std::size_t r);
TransformSet cook_toom_transforms(std::size_t m, std::size_t n, std::size_t r, std::size_t s);

// Tiling geometry of one image: realizes the index maps between the
// C x Hi x Wi image and its C x T x p x q overlapped tile form. When the
// tile size does not divide the output, the image is zero padded on the
// bottom/right and outputs are cropped after untiling.
struct TileGeometry {
    std::size_t c = 0;
    std::size_t h_i = 0, w_i = 0;      // true input extents
    std::size_t h_o = 0, w_o = 0;      // true output extents
    std::size_t h_op = 0, w_op = 0;    // padded output extents (divisible by m, n)
    std::size_t h_ip = 0, w_ip = 0;    // padded input extents
    std::size_t m = 0, n = 0, r = 0, s = 0;
    std::size_t p = 0, q = 0;
    std::size_t tiles_y = 0, tiles_x = 0;
    std::size_t t = 0;

    bool padded() const { return h_op != h_o || w_op != w_o; }
};

TileGeometry make_geometry(std::size_t c, std::size_t h_i, std::size_t w_i,
                           std::size_t m, std::size_t n, std::size_t r, std::size_t s);
TileGeometry make_geometry(std::size_t c, std::size_t h_i, std::size_t w_i,
                           const TransformSet& tset);

// phi: (tile, local row, local col) -> (row, col) into the padded input.
std::pair<std::size_t, std::size_t> phi(const TileGeometry& g, std::size_t t,
                                        std::size_t i, std::size_t j);

struct TileIndex {
    std::size_t t, i, j;
};

// psi: (output row, output col) -> (tile, local row, local col), over the
// padded output index set.
TileIndex psi(const TileGeometry& g, std::size_t i, std::size_t j);

// I (C x Hi x Wi) -> I~ (C x T x p x q); halo elements are copied.
Tensor tile_input(const Tensor& img, const TileGeometry& g);

// O~ (K x T x m x n) -> O (K x Ho x Wo), cropping any padding.
Tensor untile_output(const Tensor& tiled, const TileGeometry& g);

// O (K x Ho x Wo) -> O~ (K x T x m x n), zero filling padded positions.
// Inverse of untile_output; also used to reindex output gradients.
Tensor tile_output(const Tensor& img, const TileGeometry& g);

}  // namespace wino
