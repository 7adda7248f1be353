#include "wino/reference.hpp"

#include <cmath>

namespace wino {

Tensor direct_conv(const Tensor& img, const Tensor& w, OpCounter* counter) {
    if (img.rank() != 3 || w.rank() != 4 || img.extent(0) != w.extent(1))
        throw ShapeError("direct_conv: image " + shape_str(img.shape()) + " vs kernel " +
                         shape_str(w.shape()));
    const std::size_t c_n = img.extent(0), h_i = img.extent(1), w_i = img.extent(2);
    const std::size_t k_n = w.extent(0), r = w.extent(2), s = w.extent(3);
    if (h_i < r || w_i < s)
        throw ShapeError("direct_conv: image smaller than kernel");
    const std::size_t h_o = h_i - r + 1, w_o = w_i - s + 1;

    Tensor out({k_n, h_o, w_o});
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t i = 0; i < h_o; ++i)
            for (std::size_t j = 0; j < w_o; ++j) {
                double acc = 0.0;
                for (std::size_t c = 0; c < c_n; ++c)
                    for (std::size_t u = 0; u < r; ++u)
                        for (std::size_t v = 0; v < s; ++v)
                            acc += w(k, c, u, v) * img(c, i + u, j + v);
                out(k, i, j) = acc;
            }
    if (counter) {
        const std::uint64_t per = static_cast<std::uint64_t>(c_n) * r * s;
        counter->multiplications += per * k_n * h_o * w_o;
        counter->additions += per * k_n * h_o * w_o;
    }
    return out;
}

Tensor overlapped_conv(const Tensor& tiled, const Tensor& w, std::size_t m, std::size_t n,
                       OpCounter* counter) {
    if (tiled.rank() != 4 || w.rank() != 4 || tiled.extent(0) != w.extent(1))
        throw ShapeError("overlapped_conv: tiles " + shape_str(tiled.shape()) + " vs kernel " +
                         shape_str(w.shape()));
    const std::size_t c_n = tiled.extent(0), t_n = tiled.extent(1);
    const std::size_t p = tiled.extent(2), q = tiled.extent(3);
    const std::size_t k_n = w.extent(0), r = w.extent(2), s = w.extent(3);
    if (p != m + r - 1 || q != n + s - 1)
        throw ShapeError("overlapped_conv: tile extents " + shape_str({p, q}) +
                         " inconsistent with m,n,r,s");

    Tensor out({k_n, t_n, m, n});
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t t = 0; t < t_n; ++t)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < c_n; ++c)
                        for (std::size_t u = 0; u < r; ++u)
                            for (std::size_t v = 0; v < s; ++v)
                                acc += w(k, c, u, v) * tiled(c, t, i + u, j + v);
                    out(k, t, i, j) = acc;
                }
    if (counter) {
        const std::uint64_t per = static_cast<std::uint64_t>(c_n) * r * s;
        counter->multiplications += per * k_n * t_n * m * n;
        counter->additions += per * k_n * t_n * m * n;
    }
    return out;
}

Tensor finite_diff_grad(const std::function<double(const Tensor&)>& f, const Tensor& x,
                        double h) {
    if (h <= 0) throw NumericError("finite_diff_grad: step must be positive");
    Tensor grad(x.shape());
    Tensor probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        const double step = h * std::max(1.0, std::abs(x0));
        probe[i] = x0 + step;
        const double fp = f(probe);
        probe[i] = x0 - step;
        const double fm = f(probe);
        probe[i] = x0;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericError("finite_diff_grad: non-finite function value");
        grad[i] = (fp - fm) / (2.0 * step);
    }
    return grad;
}

Tensor direct_conv_grad_weights(const Tensor& grad_out, const Tensor& img,
                                std::size_t k_n, std::size_t r, std::size_t s) {
    const std::size_t c_n = img.extent(0);
    const std::size_t h_o = grad_out.extent(1), w_o = grad_out.extent(2);
    Tensor grad({k_n, c_n, r, s});
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t c = 0; c < c_n; ++c)
            for (std::size_t u = 0; u < r; ++u)
                for (std::size_t v = 0; v < s; ++v) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < h_o; ++i)
                        for (std::size_t j = 0; j < w_o; ++j)
                            acc += grad_out(k, i, j) * img(c, i + u, j + v);
                    grad(k, c, u, v) = acc;
                }
    return grad;
}

Tensor direct_conv_grad_input(const Tensor& grad_out, const Tensor& w,
                              std::size_t h_i, std::size_t w_i) {
    const std::size_t k_n = w.extent(0), c_n = w.extent(1);
    const std::size_t r = w.extent(2), s = w.extent(3);
    const std::size_t h_o = grad_out.extent(1), w_o = grad_out.extent(2);
    Tensor grad({c_n, h_i, w_i});
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t i = 0; i < h_o; ++i)
            for (std::size_t j = 0; j < w_o; ++j) {
                const double go = grad_out(k, i, j);
                for (std::size_t c = 0; c < c_n; ++c)
                    for (std::size_t u = 0; u < r; ++u)
                        for (std::size_t v = 0; v < s; ++v)
                            grad(c, i + u, j + v) += go * w(k, c, u, v);
            }
    return grad;
}

}  // namespace wino
