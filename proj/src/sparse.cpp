#include "wino/sparse.hpp"

#include <atomic>
#include <cmath>
#include <thread>

namespace wino {

template <typename T>
PointwiseCsr<T> compress(const Tensor& w_f, double zero_tol) {
    if (w_f.rank() != 4)
        throw ShapeError("compress: expected K x C x p x q weights, got " +
                         shape_str(w_f.shape()));
    PointwiseCsr<T> csr;
    csr.k = w_f.extent(0);
    csr.c = w_f.extent(1);
    csr.p = w_f.extent(2);
    csr.q = w_f.extent(3);
    csr.slices.resize(csr.p * csr.q);
    for (std::size_t i = 0; i < csr.p; ++i)
        for (std::size_t j = 0; j < csr.q; ++j) {
            auto& s = csr.slice(i, j);
            s.row_ptr.assign(csr.k + 1, 0);
            for (std::size_t k = 0; k < csr.k; ++k) {
                for (std::size_t c = 0; c < csr.c; ++c) {
                    const double v = w_f(k, c, i, j);
                    if (std::abs(v) > zero_tol || (zero_tol == 0.0 && v != 0.0)) {
                        s.col_idx.push_back(c);
                        s.values.push_back(static_cast<T>(v));
                    }
                }
                s.row_ptr[k + 1] = s.values.size();
            }
        }
    return csr;
}

template <typename T>
Tensor reconstruct(const PointwiseCsr<T>& csr) {
    Tensor w_f({csr.k, csr.c, csr.p, csr.q});
    for (std::size_t i = 0; i < csr.p; ++i)
        for (std::size_t j = 0; j < csr.q; ++j) {
            const auto& s = csr.slice(i, j);
            for (std::size_t k = 0; k < csr.k; ++k)
                for (std::size_t e = s.row_ptr[k]; e < s.row_ptr[k + 1]; ++e)
                    w_f(k, s.col_idx[e], i, j) = static_cast<double>(s.values[e]);
        }
    return w_f;
}

template <typename T>
void spmdm(const typename PointwiseCsr<T>::Slice& slice, std::size_t k_n, std::size_t c_n,
           const T* dense, std::size_t t_n, T* out, OpCounter* counter) {
    for (std::size_t k = 0; k < k_n; ++k) {
        T* out_row = out + k * t_n;
        for (std::size_t e = slice.row_ptr[k]; e < slice.row_ptr[k + 1]; ++e) {
            const std::size_t c = slice.col_idx[e];
            if (c >= c_n) throw CorruptFormatError("spmdm: column index out of bounds");
            const T v = slice.values[e];
            const T* in_row = dense + c * t_n;
            for (std::size_t t = 0; t < t_n; ++t)  // contiguous over tiles
                out_row[t] += v * in_row[t];
        }
    }
    if (counter) {
        counter->multiplications += slice.values.size() * t_n;
        counter->additions += slice.values.size() * t_n;
    }
}

namespace {

template <typename T>
std::vector<T> to_precision(const Matrix& m) {
    return std::vector<T>(m.entries().begin(), m.entries().end());
}

}  // namespace

template <typename T>
TiledActivationLayout<T> build_tiled_layout(const Tensor& img, const TransformSet& tset,
                                            const TileGeometry& geom) {
    TiledActivationLayout<T> layout;
    layout.p = geom.p;
    layout.q = geom.q;
    layout.c = geom.c;
    layout.t = geom.t;
    layout.buffer.assign(geom.p * geom.q * geom.c * geom.t, T(0));

    const std::vector<T> b1 = to_precision<T>(tset.b1);
    const std::vector<T> b2 = to_precision<T>(tset.b2);
    std::vector<T> tile(geom.p * geom.q), tmp(geom.p * geom.q), u(geom.p * geom.q);

    for (std::size_t c = 0; c < geom.c; ++c)
        for (std::size_t t = 0; t < geom.t; ++t) {
            for (std::size_t i = 0; i < geom.p; ++i)
                for (std::size_t j = 0; j < geom.q; ++j) {
                    auto [y, x] = phi(geom, t, i, j);
                    tile[i * geom.q + j] =
                        (y < geom.h_i && x < geom.w_i) ? static_cast<T>(img(c, y, x)) : T(0);
                }
            // u = B1^T tile B2, in storage precision
            for (std::size_t i = 0; i < geom.p; ++i)
                for (std::size_t j = 0; j < geom.q; ++j) {
                    T acc = 0;
                    for (std::size_t k = 0; k < geom.p; ++k)
                        acc += b1[k * geom.p + i] * tile[k * geom.q + j];
                    tmp[i * geom.q + j] = acc;
                }
            for (std::size_t i = 0; i < geom.p; ++i)
                for (std::size_t j = 0; j < geom.q; ++j) {
                    T acc = 0;
                    for (std::size_t k = 0; k < geom.q; ++k)
                        acc += tmp[i * geom.q + k] * b2[k * geom.q + j];
                    u[i * geom.q + j] = acc;
                }
            for (std::size_t i = 0; i < geom.p; ++i)
                for (std::size_t j = 0; j < geom.q; ++j)
                    layout.plane(i, j)[c * geom.t + t] = u[i * geom.q + j];
        }
    return layout;
}

namespace {

// One image, one contiguous block of output channels.
template <typename T>
void sparse_forward_block(const Tensor& img, const PointwiseCsr<T>& csr,
                          const TransformSet& tset, const TileGeometry& geom,
                          std::size_t k_begin, std::size_t k_end, Tensor& out,
                          std::size_t image_index, OpCounter* counter) {
    const std::size_t p = geom.p, q = geom.q, t_n = geom.t;
    TiledActivationLayout<T> acts = build_tiled_layout<T>(img, tset, geom);

    const std::size_t k_blk = k_end - k_begin;
    std::vector<T> z(p * q * k_blk * t_n, T(0));
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            // restrict the CSR slice to the block's rows
            const auto& s = csr.slice(i, j);
            typename PointwiseCsr<T>::Slice sub;
            sub.row_ptr.assign(s.row_ptr.begin() + k_begin, s.row_ptr.begin() + k_end + 1);
            const std::size_t base = sub.row_ptr.front();
            for (auto& rp : sub.row_ptr) rp -= base;
            sub.col_idx.assign(s.col_idx.begin() + base, s.col_idx.begin() + base + sub.row_ptr.back());
            sub.values.assign(s.values.begin() + base, s.values.begin() + base + sub.row_ptr.back());
            spmdm<T>(sub, k_blk, csr.c, acts.plane(i, j), t_n,
                     z.data() + (i * q + j) * k_blk * t_n, counter);
        }

    // inverse transform fused with untiling, vectorizable over tiles; the
    // two-step association (over i, then over j) mirrors the dense path so
    // f64 results match it bitwise
    const std::vector<T> a1 = to_precision<T>(tset.a1);
    const std::vector<T> a2 = to_precision<T>(tset.a2);
    std::vector<T> tmp(geom.m * q * t_n);
    std::vector<T> acc(t_n);
    for (std::size_t kb = 0; kb < k_blk; ++kb) {
        for (std::size_t y = 0; y < geom.m; ++y)
            for (std::size_t j = 0; j < q; ++j) {
                T* trow = tmp.data() + (y * q + j) * t_n;
                std::fill(trow, trow + t_n, T(0));
                for (std::size_t i = 0; i < p; ++i) {
                    const T coef = a1[i * geom.m + y];
                    const T* zrow = z.data() + ((i * q + j) * k_blk + kb) * t_n;
                    for (std::size_t t = 0; t < t_n; ++t) trow[t] += coef * zrow[t];
                }
            }
        for (std::size_t y = 0; y < geom.m; ++y)
            for (std::size_t x = 0; x < geom.n; ++x) {
                std::fill(acc.begin(), acc.end(), T(0));
                for (std::size_t j = 0; j < q; ++j) {
                    const T coef = a2[j * geom.n + x];
                    const T* trow = tmp.data() + (y * q + j) * t_n;
                    for (std::size_t t = 0; t < t_n; ++t) acc[t] += coef * trow[t];
                }
                for (std::size_t t = 0; t < t_n; ++t) {
                    const std::size_t ty = t / geom.tiles_x, tx = t % geom.tiles_x;
                    const std::size_t oy = ty * geom.m + y, ox = tx * geom.n + x;
                    if (oy < geom.h_o && ox < geom.w_o)
                        out(image_index, k_begin + kb, oy, ox) = static_cast<double>(acc[t]);
                }
            }
    }
}

}  // namespace

template <typename T>
Tensor sparse_forward(const Tensor& batch, const PointwiseCsr<T>& csr, const TransformSet& tset,
                      const TileGeometry& geom, unsigned workers, OpCounter* counter) {
    if (batch.rank() != 4 || batch.extent(1) != geom.c || batch.extent(2) != geom.h_i ||
        batch.extent(3) != geom.w_i)
        throw ShapeError("sparse_forward: batch " + shape_str(batch.shape()) +
                         " does not match geometry " + shape_str({geom.c, geom.h_i, geom.w_i}));
    if (csr.c != geom.c || csr.p != geom.p || csr.q != geom.q)
        throw ShapeError("sparse_forward: CSR weights do not match transform set");
    const std::size_t n_img = batch.extent(0);
    const std::size_t k_n = csr.k;
    if (workers == 0) workers = 1;

    Tensor out({n_img, k_n, geom.h_o, geom.w_o});

    // work units: (image, k-block); blocks split channels only when there
    // are fewer images than workers
    std::size_t k_blocks = 1;
    if (n_img < workers && k_n > 1)
        k_blocks = std::min<std::size_t>((workers + n_img - 1) / n_img, k_n);
    struct Unit {
        std::size_t img, k0, k1;
    };
    std::vector<Unit> units;
    for (std::size_t im = 0; im < n_img; ++im)
        for (std::size_t b = 0; b < k_blocks; ++b) {
            const std::size_t k0 = b * k_n / k_blocks, k1 = (b + 1) * k_n / k_blocks;
            if (k0 < k1) units.push_back({im, k0, k1});
        }

    auto image_view = [&](std::size_t im) {
        std::vector<double> data(batch.data().begin() + im * geom.c * geom.h_i * geom.w_i,
                                 batch.data().begin() + (im + 1) * geom.c * geom.h_i * geom.w_i);
        return Tensor({geom.c, geom.h_i, geom.w_i}, std::move(data));
    };

    if (workers == 1) {
        for (const Unit& u : units)
            sparse_forward_block<T>(image_view(u.img), csr, tset, geom, u.k0, u.k1, out, u.img,
                                    counter);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::vector<OpCounter> local(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            const PointwiseCsr<T> replica = csr;  // per-worker weight copy
            for (;;) {
                const std::size_t u = next.fetch_add(1);
                if (u >= units.size()) break;
                sparse_forward_block<T>(image_view(units[u].img), replica, tset, geom,
                                        units[u].k0, units[u].k1, out, units[u].img,
                                        counter ? &local[w] : nullptr);
            }
        });
    for (auto& th : pool) th.join();
    if (counter)
        for (const auto& lc : local) {
            counter->multiplications += lc.multiplications;
            counter->additions += lc.additions;
        }
    return out;
}

template PointwiseCsr<double> compress<double>(const Tensor&, double);
template PointwiseCsr<float> compress<float>(const Tensor&, double);
template Tensor reconstruct<double>(const PointwiseCsr<double>&);
template Tensor reconstruct<float>(const PointwiseCsr<float>&);
template void spmdm<double>(const PointwiseCsr<double>::Slice&, std::size_t, std::size_t,
                            const double*, std::size_t, double*, OpCounter*);
template void spmdm<float>(const PointwiseCsr<float>::Slice&, std::size_t, std::size_t,
                           const float*, std::size_t, float*, OpCounter*);
template TiledActivationLayout<double> build_tiled_layout<double>(const Tensor&,
                                                                  const TransformSet&,
                                                                  const TileGeometry&);
template TiledActivationLayout<float> build_tiled_layout<float>(const Tensor&,
                                                                const TransformSet&,
                                                                const TileGeometry&);
template Tensor sparse_forward<double>(const Tensor&, const PointwiseCsr<double>&,
                                       const TransformSet&, const TileGeometry&, unsigned,
                                       OpCounter*);
template Tensor sparse_forward<float>(const Tensor&, const PointwiseCsr<float>&,
                                      const TransformSet&, const TileGeometry&, unsigned,
                                      OpCounter*);

}  // namespace wino
