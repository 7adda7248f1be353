#include "wino/transforms.hpp"

#include <array>

namespace wino {

TransformSet f2x2_3x3_transforms() {
    TransformSet t;
    t.m = t.n = 2;
    t.r = t.s = 3;
    t.p = t.q = 4;
    t.a1 = Matrix{{1, 0}, {1, 1}, {1, -1}, {0, -1}};
    t.b1 = Matrix{{1, 0, 0, 0}, {0, 1, -1, 1}, {-1, 1, 1, 0}, {0, 0, 0, -1}};
    t.g1 = Matrix{{1, 0, 0}, {0.5, 0.5, 0.5}, {0.5, -0.5, 0.5}, {0, 0, 1}};
    t.a2 = t.a1;
    t.b2 = t.b1;
    t.g2 = t.g1;
    return t;
}

namespace {

constexpr std::array<double, 7> kInterpPoints = {0.0, 1.0, -1.0, 2.0, -2.0, 0.5, -0.5};

struct OneDim {
    Matrix a;  // p x m
    Matrix b;  // p x p
    Matrix g;  // p x r
};

// Coefficients of the interpolating polynomial through (pts[i], vals-basis):
// returns L (n x n) with t_j = sum_i L(j,i) * value_i.
Matrix inverse_vandermonde(const std::vector<double>& pts) {
    const std::size_t n = pts.size();
    // Lagrange basis polynomial coefficients, one column per point.
    Matrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> coeff = {1.0};  // numerator polynomial
        double denom = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i) continue;
            std::vector<double> next(coeff.size() + 1, 0.0);
            for (std::size_t d = 0; d < coeff.size(); ++d) {
                next[d] -= coeff[d] * pts[k];
                next[d + 1] += coeff[d];
            }
            coeff = std::move(next);
            denom *= pts[i] - pts[k];
        }
        for (std::size_t j = 0; j < n; ++j) inv(j, i) = coeff[j] / denom;
    }
    return inv;
}

// Coefficients of M(x) = prod (x - pts[i]); length pts.size()+1, monic.
std::vector<double> product_poly(const std::vector<double>& pts) {
    std::vector<double> coeff = {1.0};
    for (double a : pts) {
        std::vector<double> next(coeff.size() + 1, 0.0);
        for (std::size_t d = 0; d < coeff.size(); ++d) {
            next[d] -= coeff[d] * a;
            next[d + 1] += coeff[d];
        }
        coeff = std::move(next);
    }
    return coeff;
}

// 1-D F(m, r) by Cook-Toom evaluation/interpolation with the point at
// infinity carried as the last row.
OneDim cook_toom_1d(std::size_t m, std::size_t r) {
    if (m < 1 || r < 1)
        throw CapabilityError("tile and kernel extents must be >= 1");
    const std::size_t p = m + r - 1;
    if (p > 8)
        throw CapabilityError("unsupported transform size: m+r-1 = " + std::to_string(p) +
                              " exceeds 8");

    OneDim out;
    if (p == 1) {
        // m = r = 1: plain scalar product, all matrices are 1x1 identities.
        out.a = out.b = out.g = identity(1);
        return out;
    }

    std::vector<double> pts(kInterpPoints.begin(), kInterpPoints.begin() + (p - 1));

    // Evaluation matrices: row i evaluates the monomial basis at pts[i];
    // the infinity row selects the leading coefficient.
    auto eval_matrix = [&](std::size_t ncoeff) {
        Matrix v(p, ncoeff);
        for (std::size_t i = 0; i + 1 < p; ++i) {
            double x = 1.0;
            for (std::size_t j = 0; j < ncoeff; ++j) {
                v(i, j) = x;
                x *= pts[i];
            }
        }
        v(p - 1, ncoeff - 1) = 1.0;
        return v;
    };
    out.g = eval_matrix(r);
    out.a = eval_matrix(m);

    // Interpolation matrix for the length-p linear convolution:
    // s_j (j < p-1) from the p-1 finite samples plus the M(x) correction for
    // the leading coefficient, which the infinity sample carries exactly.
    Matrix inv = inverse_vandermonde(pts);
    std::vector<double> mpoly = product_poly(pts);
    Matrix c(p, p);
    for (std::size_t j = 0; j + 1 < p; ++j) {
        for (std::size_t i = 0; i + 1 < p; ++i) c(j, i) = inv(j, i);
        c(j, p - 1) = mpoly[j];
    }
    c(p - 1, p - 1) = 1.0;
    // The correlation algorithm is the transpose of the interpolation step:
    // out = a^T [ (g w) (*) (c^T d) ], so b = c.
    out.b = c;
    return out;
}

}  // namespace

TransformSet cook_toom_transforms(std::size_t m, std::size_t r) {
    return cook_toom_transforms(m, m, r, r);
}

TransformSet cook_toom_transforms(std::size_t m, std::size_t n, std::size_t r, std::size_t s) {
    OneDim row = cook_toom_1d(m, r);
    OneDim col = cook_toom_1d(n, s);
    TransformSet t;
    t.m = m;
    t.n = n;
    t.r = r;
    t.s = s;
    t.p = m + r - 1;
    t.q = n + s - 1;
    t.a1 = row.a;
    t.b1 = row.b;
    t.g1 = row.g;
    t.a2 = col.a;
    t.b2 = col.b;
    t.g2 = col.g;
    return t;
}

TileGeometry make_geometry(std::size_t c, std::size_t h_i, std::size_t w_i,
                           std::size_t m, std::size_t n, std::size_t r, std::size_t s) {
    if (h_i < r || w_i < s)
        throw ShapeError("image " + shape_str({c, h_i, w_i}) + " smaller than kernel " +
                         shape_str({r, s}));
    TileGeometry g;
    g.c = c;
    g.h_i = h_i;
    g.w_i = w_i;
    g.m = m;
    g.n = n;
    g.r = r;
    g.s = s;
    g.p = m + r - 1;
    g.q = n + s - 1;
    g.h_o = h_i - r + 1;
    g.w_o = w_i - s + 1;
    g.tiles_y = (g.h_o + m - 1) / m;
    g.tiles_x = (g.w_o + n - 1) / n;
    g.h_op = g.tiles_y * m;
    g.w_op = g.tiles_x * n;
    g.h_ip = g.h_op + r - 1;
    g.w_ip = g.w_op + s - 1;
    g.t = g.tiles_y * g.tiles_x;
    return g;
}

TileGeometry make_geometry(std::size_t c, std::size_t h_i, std::size_t w_i,
                           const TransformSet& tset) {
    return make_geometry(c, h_i, w_i, tset.m, tset.n, tset.r, tset.s);
}

std::pair<std::size_t, std::size_t> phi(const TileGeometry& g, std::size_t t,
                                        std::size_t i, std::size_t j) {
    if (t >= g.t || i >= g.p || j >= g.q)
        throw ShapeError("phi index (" + std::to_string(t) + "," + std::to_string(i) + "," +
                         std::to_string(j) + ") out of range");
    const std::size_t ty = t / g.tiles_x;
    const std::size_t tx = t % g.tiles_x;
    return {ty * g.m + i, tx * g.n + j};
}

TileIndex psi(const TileGeometry& g, std::size_t i, std::size_t j) {
    if (i >= g.h_op || j >= g.w_op)
        throw ShapeError("psi index (" + std::to_string(i) + "," + std::to_string(j) +
                         ") out of range");
    return {(i / g.m) * g.tiles_x + (j / g.n), i % g.m, j % g.n};
}

Tensor tile_input(const Tensor& img, const TileGeometry& g) {
    if (img.shape() != std::vector<std::size_t>{g.c, g.h_i, g.w_i})
        throw ShapeError("tile_input: image shape " + shape_str(img.shape()) +
                         " does not match geometry " + shape_str({g.c, g.h_i, g.w_i}));
    Tensor tiled({g.c, g.t, g.p, g.q});
    for (std::size_t c = 0; c < g.c; ++c)
        for (std::size_t t = 0; t < g.t; ++t)
            for (std::size_t i = 0; i < g.p; ++i)
                for (std::size_t j = 0; j < g.q; ++j) {
                    auto [y, x] = phi(g, t, i, j);
                    // padded region reads as zero
                    tiled(c, t, i, j) = (y < g.h_i && x < g.w_i) ? img(c, y, x) : 0.0;
                }
    return tiled;
}

Tensor untile_output(const Tensor& tiled, const TileGeometry& g) {
    const std::size_t k = tiled.extent(0);
    if (tiled.rank() != 4 || tiled.extent(1) != g.t || tiled.extent(2) != g.m ||
        tiled.extent(3) != g.n)
        throw ShapeError("untile_output: tiled shape " + shape_str(tiled.shape()) +
                         " does not match geometry tiles " + shape_str({g.t, g.m, g.n}));
    Tensor out({k, g.h_o, g.w_o});
    for (std::size_t kk = 0; kk < k; ++kk)
        for (std::size_t i = 0; i < g.h_o; ++i)
            for (std::size_t j = 0; j < g.w_o; ++j) {
                TileIndex ti = psi(g, i, j);
                out(kk, i, j) = tiled(kk, ti.t, ti.i, ti.j);
            }
    return out;
}

Tensor tile_output(const Tensor& img, const TileGeometry& g) {
    const std::size_t k = img.extent(0);
    if (img.rank() != 3 || img.extent(1) != g.h_o || img.extent(2) != g.w_o)
        throw ShapeError("tile_output: image shape " + shape_str(img.shape()) +
                         " does not match geometry output " + shape_str({g.h_o, g.w_o}));
    Tensor tiled({k, g.t, g.m, g.n});
    for (std::size_t kk = 0; kk < k; ++kk)
        for (std::size_t i = 0; i < g.h_o; ++i)
            for (std::size_t j = 0; j < g.w_o; ++j) {
                TileIndex ti = psi(g, i, j);
                tiled(kk, ti.t, ti.i, ti.j) = img(kk, i, j);
            }
    return tiled;
}

}  // namespace wino
