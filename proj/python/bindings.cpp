#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wino/layer.hpp"
#include "wino/perfmodel.hpp"
#include "wino/reference.hpp"
#include "wino/sparse.hpp"
#include "wino/tensor.hpp"
#include "wino/transforms.hpp"

namespace py = pybind11;
using namespace wino;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor to_tensor(const DArray& arr) {
    std::vector<std::size_t> shape(arr.ndim());
    for (py::ssize_t i = 0; i < arr.ndim(); ++i)
        shape[static_cast<std::size_t>(i)] = static_cast<std::size_t>(arr.shape(i));
    std::vector<double> data(arr.data(), arr.data() + arr.size());
    return Tensor(std::move(shape), std::move(data));
}

py::array from_tensor(const Tensor& t) {
    std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
    py::array_t<double> arr(shape);
    std::copy(t.data().begin(), t.data().end(), arr.mutable_data());
    return arr;
}

py::array from_matrix(const Matrix& m) {
    py::array_t<double> arr({static_cast<py::ssize_t>(m.rows()),
                             static_cast<py::ssize_t>(m.cols())});
    std::copy(m.entries().begin(), m.entries().end(), arr.mutable_data());
    return arr;
}

TransformSet transforms_for(std::size_t m, std::size_t n, std::size_t r, std::size_t s) {
    if (m == 2 && n == 2 && r == 3 && s == 3) return f2x2_3x3_transforms();
    return cook_toom_transforms(m, n, r, s);
}

TransformSet transforms_for_weights(const Tensor& w_f, std::size_t m, std::size_t n) {
    if (w_f.rank() != 4) throw ShapeError("expected K x C x p x q Winograd weights");
    const std::size_t p = w_f.extent(2), q = w_f.extent(3);
    if (p < m || q < n) throw ShapeError("tile larger than the Winograd weight extent");
    return transforms_for(m, n, p - m + 1, q - n + 1);
}

}  // namespace

PYBIND11_MODULE(_wino, mod) {
    mod.doc() = "Winograd convolution layers: transforms, forward/backward, sparse "
                "inference, and the FLOP performance model";

    mod.def(
        "gen_transforms",
        [](std::size_t m, std::size_t n, std::size_t r, std::size_t s) {
            TransformSet t = transforms_for(m, n ? n : m, r, s ? s : r);
            py::dict out;
            out["A1"] = from_matrix(t.a1);
            out["A2"] = from_matrix(t.a2);
            out["B1"] = from_matrix(t.b1);
            out["B2"] = from_matrix(t.b2);
            out["G1"] = from_matrix(t.g1);
            out["G2"] = from_matrix(t.g2);
            return out;
        },
        py::arg("m") = 2, py::arg("n") = 0, py::arg("r") = 3, py::arg("s") = 0,
        "Transform matrices of F(m x n, r x s)");

    mod.def(
        "lift",
        [](const DArray& w, std::size_t m, std::size_t n) {
            Tensor wt = to_tensor(w);
            if (wt.rank() != 4) throw ShapeError("expected K x C x r x s spatial weights");
            TransformSet t = transforms_for(m, n ? n : m, wt.extent(2), wt.extent(3));
            return from_tensor(lift_spatial_weights(wt, t));
        },
        py::arg("weights"), py::arg("m") = 2, py::arg("n") = 0,
        "Spatial K x C x r x s weights -> Winograd-domain K x C x p x q");

    mod.def(
        "conv_direct",
        [](const DArray& img, const DArray& w) {
            return from_tensor(direct_conv(to_tensor(img), to_tensor(w)));
        },
        py::arg("image"), py::arg("weights"),
        "Reference sliding-dot-product convolution (C x H x W, K x C x r x s)");

    mod.def(
        "conv_winograd",
        [](const DArray& img, const DArray& w_f, std::size_t m, std::size_t n) {
            Tensor image = to_tensor(img);
            Tensor weights = to_tensor(w_f);
            if (image.rank() != 3) throw ShapeError("expected a C x H x W image");
            TransformSet t = transforms_for_weights(weights, m, n ? n : m);
            TileGeometry geom =
                make_geometry(image.extent(0), image.extent(1), image.extent(2), t);
            return from_tensor(winograd_forward(image, weights, t, geom));
        },
        py::arg("image"), py::arg("weights_winograd"), py::arg("m") = 2, py::arg("n") = 0,
        "Winograd-layer forward pass on K x C x p x q weights");

    mod.def(
        "conv_winograd_grad",
        [](const DArray& img, const DArray& w_f, const DArray& grad_out, std::size_t m,
           std::size_t n) {
            Tensor image = to_tensor(img);
            Tensor weights = to_tensor(w_f);
            TransformSet t = transforms_for_weights(weights, m, n ? n : m);
            TileGeometry geom =
                make_geometry(image.extent(0), image.extent(1), image.extent(2), t);
            ForwardCache cache;
            winograd_forward(image, weights, t, geom, &cache);
            Tensor grad_wf = winograd_backward_weights(to_tensor(grad_out), cache, t, geom);
            Tensor grad_in = winograd_backward_input(cache, weights, t, geom);
            return py::make_tuple(from_tensor(grad_wf), from_tensor(grad_in));
        },
        py::arg("image"), py::arg("weights_winograd"), py::arg("grad_output"),
        py::arg("m") = 2, py::arg("n") = 0,
        "Analytic (dL/dW_F, dL/dI) for upstream gradient dL/dO");

    mod.def(
        "sparse_conv",
        [](const DArray& batch, const DArray& w_f, std::size_t m, std::size_t n,
           unsigned workers, const std::string& precision) {
            Tensor b = to_tensor(batch);
            Tensor weights = to_tensor(w_f);
            if (b.rank() != 4) throw ShapeError("expected an N x C x H x W batch");
            TransformSet t = transforms_for_weights(weights, m, n ? n : m);
            TileGeometry geom = make_geometry(b.extent(1), b.extent(2), b.extent(3), t);
            if (precision == "f32") {
                auto csr = compress<float>(weights);
                return from_tensor(sparse_forward<float>(b, csr, t, geom, workers));
            }
            if (precision != "f64") throw std::invalid_argument("precision must be f32 or f64");
            auto csr = compress<double>(weights);
            return from_tensor(sparse_forward<double>(b, csr, t, geom, workers));
        },
        py::arg("batch"), py::arg("weights_winograd"), py::arg("m") = 2, py::arg("n") = 0,
        py::arg("workers") = 1, py::arg("precision") = "f64",
        "Sparse Winograd inference; exact zeros in the weights are skipped");

    mod.def(
        "density",
        [](const DArray& w_f) {
            Tensor w = to_tensor(w_f);
            std::size_t nnz = 0;
            for (double v : w.data()) nnz += v != 0.0;
            return static_cast<double>(nnz) / static_cast<double>(w.size());
        },
        py::arg("weights"), "Fraction of exactly nonzero entries");

    auto perf = mod.def_submodule("perf", "FLOP-count performance model");
    auto dims = [](std::uint64_t c, std::uint64_t k, std::uint64_t h, std::uint64_t r,
                   std::uint64_t m) {
        return perf::LayerDims{"layer", c, k, h, r, m};
    };
    perf.def(
        "flops_baseline",
        [dims](std::uint64_t c, std::uint64_t k, std::uint64_t h, std::uint64_t r,
               std::uint64_t m) { return perf::flops_baseline(dims(c, k, h, r, m)); },
        py::arg("c"), py::arg("k"), py::arg("h"), py::arg("r") = 3, py::arg("m") = 2);
    perf.def(
        "flops_sparse",
        [dims](std::uint64_t c, std::uint64_t k, std::uint64_t h, double alpha, double x,
               std::uint64_t r, std::uint64_t m) {
            return perf::flops_sparse(dims(c, k, h, r, m), {alpha, x});
        },
        py::arg("c"), py::arg("k"), py::arg("h"), py::arg("alpha"), py::arg("x"),
        py::arg("r") = 3, py::arg("m") = 2);
    perf.def(
        "flops_winograd",
        [dims](std::uint64_t c, std::uint64_t k, std::uint64_t h, std::uint64_t r,
               std::uint64_t m) { return perf::flops_winograd(dims(c, k, h, r, m)); },
        py::arg("c"), py::arg("k"), py::arg("h"), py::arg("r") = 3, py::arg("m") = 2);
    perf.def(
        "flops_sparse_winograd",
        [dims](std::uint64_t c, std::uint64_t k, std::uint64_t h, double alpha, double x,
               std::uint64_t r, std::uint64_t m) {
            return perf::flops_sparse_winograd(dims(c, k, h, r, m), {alpha, x});
        },
        py::arg("c"), py::arg("k"), py::arg("h"), py::arg("alpha"), py::arg("x"),
        py::arg("r") = 3, py::arg("m") = 2);
    perf.def("crossover_density", &perf::crossover_density, py::arg("alpha"));

    mod.def(
        "write_wgt1",
        [](const std::string& path, const DArray& arr, const std::string& dtype) {
            write_wgt1(path, to_tensor(arr), dtype == "f32" ? Dtype::f32 : Dtype::f64);
        },
        py::arg("path"), py::arg("array"), py::arg("dtype") = "f64");
    mod.def(
        "read_wgt1", [](const std::string& path) { return from_tensor(read_wgt1(path)); },
        py::arg("path"));

    py::register_exception<ShapeError>(mod, "ShapeError", PyExc_ValueError);
    py::register_exception<IoError>(mod, "IoError", PyExc_IOError);
    py::register_exception<CapabilityError>(mod, "CapabilityError", PyExc_ValueError);
    py::register_exception<NumericError>(mod, "NumericError", PyExc_ArithmeticError);
}
