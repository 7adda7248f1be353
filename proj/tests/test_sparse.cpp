#include <doctest.h>

#include <cmath>
#include <random>

#include "wino/layer.hpp"
#include "wino/reference.hpp"
#include "wino/sparse.hpp"
#include "wino/train.hpp"

using namespace wino;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = dist(rng);
    return t;
}

Tensor sparse_random(std::vector<std::size_t> shape, std::uint64_t seed, double density) {
    Tensor t = random_tensor(std::move(shape), seed);
    train::magnitude_threshold_to_density(t, density);
    return t;
}

}  // namespace

TEST_CASE("compress/reconstruct round trip") {
    Tensor w = sparse_random({3, 2, 4, 4}, 101, 0.3);
    auto csr = compress<double>(w);
    Tensor back = reconstruct(csr);
    REQUIRE(back.same_shape(w));
    for (std::size_t i = 0; i < w.size(); ++i) CHECK(back[i] == w[i]);
    CHECK(density(csr) == doctest::Approx(0.3).epsilon(0.05));
}

TEST_CASE("compress drops exactly the values under the tolerance") {
    Tensor w({1, 1, 2, 2}, {0.5, 1e-9, 0.0, -2.0});
    auto a = compress<double>(w);
    CHECK(a.nnz_total() == 3);  // only the exact zero dropped
    auto b = compress<double>(w, 1e-6);
    CHECK(b.nnz_total() == 2);
}

TEST_CASE("spmdm hand example") {
    // 2x3 sparse [[1,0,2],[0,0,-1]] times dense 3x2 columns-as-tiles
    PointwiseCsr<double> csr;
    csr.k = 2;
    csr.c = 3;
    csr.p = csr.q = 1;
    csr.slices.resize(1);
    auto& s = csr.slices[0];
    s.row_ptr = {0, 2, 3};
    s.col_idx = {0, 2, 2};
    s.values = {1.0, 2.0, -1.0};
    const double dense[6] = {1, 2, 3, 4, 5, 6};  // C x T, T=2
    double out[4] = {0, 0, 0, 0};
    OpCounter ops;
    spmdm<double>(s, 2, 3, dense, 2, out, &ops);
    CHECK(out[0] == 1.0 * 1 + 2.0 * 5);
    CHECK(out[1] == 1.0 * 2 + 2.0 * 6);
    CHECK(out[2] == -5.0);
    CHECK(out[3] == -6.0);
    CHECK(ops.multiplications == 3 * 2);
}

TEST_CASE("sparse_forward at full density matches the dense winograd layer") {
    TransformSet tset = f2x2_3x3_transforms();
    Tensor w_f = random_tensor({3, 2, 4, 4}, 111);
    Tensor batch = random_tensor({2, 2, 8, 8}, 112);
    TileGeometry geom = make_geometry(2, 8, 8, tset);
    auto csr = compress<double>(w_f);
    Tensor out = sparse_forward<double>(batch, csr, tset, geom);
    for (std::size_t n = 0; n < 2; ++n) {
        Tensor img({2, 8, 8});
        for (std::size_t i = 0; i < img.size(); ++i) img[i] = batch[n * img.size() + i];
        Tensor ref = winograd_forward(img, w_f, tset, geom);
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK(out[n * ref.size() + i] == doctest::Approx(ref[i]).epsilon(1e-12));
    }
}

TEST_CASE("sparse_forward f64 is bitwise identical to the dense path") {
    TransformSet tset = f2x2_3x3_transforms();
    Tensor w_f = sparse_random({4, 3, 4, 4}, 121, 0.4);
    Tensor batch = random_tensor({1, 3, 10, 10}, 122);
    TileGeometry geom = make_geometry(3, 10, 10, tset);
    auto csr = compress<double>(w_f);
    Tensor sparse_out = sparse_forward<double>(batch, csr, tset, geom);
    Tensor img({3, 10, 10});
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = batch[i];
    Tensor dense_out = winograd_forward(img, w_f, tset, geom);
    for (std::size_t i = 0; i < dense_out.size(); ++i)
        CHECK(sparse_out[i] == dense_out[i]);
}

TEST_CASE("sparse_forward is bitwise independent of the worker count") {
    TransformSet tset = f2x2_3x3_transforms();
    Tensor w_f = sparse_random({5, 3, 4, 4}, 131, 0.3);
    Tensor batch = random_tensor({3, 3, 12, 12}, 132);
    TileGeometry geom = make_geometry(3, 12, 12, tset);

    for (const bool f32 : {false, true}) {
        Tensor ref;
        for (unsigned workers : {1u, 2u, 3u, 5u, 8u}) {
            Tensor out;
            if (f32) {
                auto csr = compress<float>(w_f);
                out = sparse_forward<float>(batch, csr, tset, geom, workers);
            } else {
                auto csr = compress<double>(w_f);
                out = sparse_forward<double>(batch, csr, tset, geom, workers);
            }
            if (workers == 1u) {
                ref = out;
            } else {
                REQUIRE(out.same_shape(ref));
                for (std::size_t i = 0; i < ref.size(); ++i) CHECK(out[i] == ref[i]);
            }
        }
    }
}

TEST_CASE("sparse_forward handles padded geometry and f32 storage") {
    TransformSet tset = f2x2_3x3_transforms();
    Tensor w_f = random_tensor({2, 2, 4, 4}, 141);
    Tensor batch = random_tensor({2, 2, 7, 9}, 142);
    TileGeometry geom = make_geometry(2, 7, 9, tset);
    auto csr = compress<float>(w_f);
    Tensor out = sparse_forward<float>(batch, csr, tset, geom, 4);
    Tensor img({2, 7, 9});
    for (std::size_t i = 0; i < img.size(); ++i) img[i] = batch[i];
    Tensor ref = winograd_forward(img, w_f, tset, geom);
    REQUIRE(out.extent(1) == 2);
    REQUIRE(out.extent(2) == 5);
    REQUIRE(out.extent(3) == 7);
    for (std::size_t i = 0; i < ref.size(); ++i)
        CHECK(out[i] == doctest::Approx(ref[i]).epsilon(1e-4));
}

TEST_CASE("spmdm multiplication count equals nnz times tiles") {
    TransformSet tset = f2x2_3x3_transforms();
    Tensor w_f = sparse_random({4, 4, 4, 4}, 151, 0.25);
    Tensor batch = random_tensor({1, 4, 8, 8}, 152);
    TileGeometry geom = make_geometry(4, 8, 8, tset);
    auto csr = compress<double>(w_f);
    OpCounter ops;
    sparse_forward<double>(batch, csr, tset, geom, 1, &ops);
    CHECK(ops.multiplications == csr.nnz_total() * geom.t);
}

TEST_CASE("spmdm rejects corrupt structure") {
    PointwiseCsr<double> csr;
    csr.k = 2;
    csr.c = 2;
    csr.p = csr.q = 1;
    csr.slices.resize(1);
    auto& s = csr.slices[0];
    s.row_ptr = {0, 1};  // wrong length for k=2
    s.col_idx = {0};
    s.values = {1.0};
    double dense[2] = {1, 1};
    double out[2] = {0, 0};
    CHECK_THROWS_AS(spmdm<double>(s, 2, 2, dense, 1, out), CorruptFormatError);
}
