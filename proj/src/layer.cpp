#include "wino/layer.hpp"

namespace wino {

namespace {

Matrix slice_pq(const Tensor& t, std::size_t a, std::size_t b, std::size_t rows,
                std::size_t cols) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = t(a, b, i, j);
    return m;
}

void store_pq(Tensor& t, std::size_t a, std::size_t b, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            t(a, b, i, j) = m(i, j);
}

void check_cache(const ForwardCache& cache, const TileGeometry& geom) {
    if (cache.t != geom.t || cache.p != geom.p || cache.q != geom.q || cache.c != geom.c)
        throw ConsistencyError("forward cache does not match the given geometry");
}

}  // namespace

Tensor lift_spatial_weights(const Tensor& w, const TransformSet& tset) {
    if (w.rank() != 4 || w.extent(2) != tset.r || w.extent(3) != tset.s)
        throw ShapeError("lift_spatial_weights: kernel " + shape_str(w.shape()) +
                         " inconsistent with transform r,s = " +
                         shape_str({tset.r, tset.s}));
    const std::size_t k_n = w.extent(0), c_n = w.extent(1);
    Tensor w_f({k_n, c_n, tset.p, tset.q});
    const Matrix g2t = transpose(tset.g2);
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t c = 0; c < c_n; ++c) {
            Matrix kernel = slice_pq(w, k, c, tset.r, tset.s);
            store_pq(w_f, k, c, mat_mul(mat_mul(tset.g1, kernel), g2t));
        }
    return w_f;
}

Tensor winograd_forward(const Tensor& img, const Tensor& w_f, const TransformSet& tset,
                        const TileGeometry& geom, ForwardCache* cache, OpCounter* counter) {
    if (w_f.rank() != 4 || w_f.extent(2) != tset.p || w_f.extent(3) != tset.q)
        throw ShapeError("winograd_forward: weights " + shape_str(w_f.shape()) +
                         " inconsistent with transform p,q = " + shape_str({tset.p, tset.q}));
    if (w_f.extent(1) != geom.c)
        throw ShapeError("winograd_forward: weights expect " + std::to_string(w_f.extent(1)) +
                         " channels, image has " + std::to_string(geom.c));
    const std::size_t k_n = w_f.extent(0);

    Tensor i_tiled = tile_input(img, geom);
    Tensor i_f({geom.c, geom.t, geom.p, geom.q});
    for (std::size_t c = 0; c < geom.c; ++c)
        for (std::size_t t = 0; t < geom.t; ++t)
            store_pq(i_f, c, t, sandwich(tset.b1, slice_pq(i_tiled, c, t, geom.p, geom.q), tset.b2));

    // Z(k,t,:,:) = sum_c W_F(k,c,:,:) (*) I_F(c,t,:,:)
    Tensor z({k_n, geom.t, geom.p, geom.q});
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t t = 0; t < geom.t; ++t)
            for (std::size_t i = 0; i < geom.p; ++i)
                for (std::size_t j = 0; j < geom.q; ++j) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < geom.c; ++c)
                        acc += w_f(k, c, i, j) * i_f(c, t, i, j);
                    z(k, t, i, j) = acc;
                }
    if (counter) {
        const std::uint64_t n =
            static_cast<std::uint64_t>(k_n) * geom.c * geom.t * geom.p * geom.q;
        counter->multiplications += n;
        counter->additions += n;
    }

    Tensor o_tiled({k_n, geom.t, geom.m, geom.n});
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t t = 0; t < geom.t; ++t)
            store_pq(o_tiled, k, t, sandwich(tset.a1, slice_pq(z, k, t, geom.p, geom.q), tset.a2));

    if (cache) {
        cache->i_tiled = std::move(i_tiled);
        cache->i_f = std::move(i_f);
        cache->z = std::move(z);
        cache->grad_z.reset();
        cache->k = k_n;
        cache->c = geom.c;
        cache->t = geom.t;
        cache->p = geom.p;
        cache->q = geom.q;
    }
    return untile_output(o_tiled, geom);
}

Tensor winograd_backward_weights(const Tensor& grad_o, ForwardCache& cache,
                                 const TransformSet& tset, const TileGeometry& geom) {
    check_cache(cache, geom);
    const std::size_t k_n = cache.k;
    if (grad_o.rank() != 3 || grad_o.extent(0) != k_n || grad_o.extent(1) != geom.h_o ||
        grad_o.extent(2) != geom.w_o)
        throw ShapeError("backward_weights: upstream gradient " + shape_str(grad_o.shape()) +
                         " does not match output " + shape_str({k_n, geom.h_o, geom.w_o}));

    // dL/dO~ via psi^-1; padded tile positions carry zero gradient.
    Tensor grad_o_tiled = tile_output(grad_o, geom);

    // dL/dZ(k,t,:,:) = A1 dL/dO~(k,t,:,:) A2^T
    Tensor grad_z({k_n, geom.t, geom.p, geom.q});
    const Matrix a2t = transpose(tset.a2);
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t t = 0; t < geom.t; ++t)
            store_pq(grad_z, k, t,
                     mat_mul(mat_mul(tset.a1, slice_pq(grad_o_tiled, k, t, geom.m, geom.n)), a2t));

    // dL/dW_F(:,:,i,j) = dL/dZ(:,:,i,j) I_F(:,:,i,j)^T
    Tensor grad_wf({k_n, cache.c, geom.p, geom.q});
    for (std::size_t i = 0; i < geom.p; ++i)
        for (std::size_t j = 0; j < geom.q; ++j)
            for (std::size_t k = 0; k < k_n; ++k)
                for (std::size_t c = 0; c < cache.c; ++c) {
                    double acc = 0.0;
                    for (std::size_t t = 0; t < geom.t; ++t)
                        acc += grad_z(k, t, i, j) * cache.i_f(c, t, i, j);
                    grad_wf(k, c, i, j) = acc;
                }

    cache.grad_z = std::move(grad_z);
    return grad_wf;
}

Tensor winograd_backward_input(const ForwardCache& cache, const Tensor& w_f,
                               const TransformSet& tset, const TileGeometry& geom) {
    check_cache(cache, geom);
    if (!cache.grad_z)
        throw ConsistencyError("backward_input: dL/dZ missing; run backward_weights first");
    const Tensor& grad_z = *cache.grad_z;
    const std::size_t k_n = cache.k;
    if (w_f.extent(0) != k_n || w_f.extent(1) != cache.c)
        throw ShapeError("backward_input: weights " + shape_str(w_f.shape()) +
                         " do not match cache");

    // dL/dI_F(:,:,i,j) = W_F(:,:,i,j)^T dL/dZ(:,:,i,j)
    Tensor grad_if({cache.c, geom.t, geom.p, geom.q});
    for (std::size_t i = 0; i < geom.p; ++i)
        for (std::size_t j = 0; j < geom.q; ++j)
            for (std::size_t c = 0; c < cache.c; ++c)
                for (std::size_t t = 0; t < geom.t; ++t) {
                    double acc = 0.0;
                    for (std::size_t k = 0; k < k_n; ++k)
                        acc += w_f(k, c, i, j) * grad_z(k, t, i, j);
                    grad_if(c, t, i, j) = acc;
                }

    // dL/dI~(c,t,:,:) = B1 dL/dI_F(c,t,:,:) B2^T, then the phi-indexed halo sum.
    const Matrix b2t = transpose(tset.b2);
    Tensor grad_img({geom.c, geom.h_i, geom.w_i});
    for (std::size_t c = 0; c < geom.c; ++c)
        for (std::size_t t = 0; t < geom.t; ++t) {
            Matrix g = mat_mul(mat_mul(tset.b1, slice_pq(grad_if, c, t, geom.p, geom.q)), b2t);
            for (std::size_t i = 0; i < geom.p; ++i)
                for (std::size_t j = 0; j < geom.q; ++j) {
                    auto [y, x] = phi(geom, t, i, j);
                    if (y < geom.h_i && x < geom.w_i)  // padded positions are dropped
                        grad_img(c, y, x) += g(i, j);
                }
        }
    return grad_img;
}

}  // namespace wino
