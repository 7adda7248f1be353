#include <doctest.h>

#include <cmath>
#include <random>

#include "wino/reference.hpp"
#include "wino/tensor.hpp"
#include "wino/transforms.hpp"

using namespace wino;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = dist(rng);
    return t;
}

// One tile through the algorithm: a1^T [(g1 w g2^T) (*) (b1^T d b2)] a2
Matrix run_tile(const TransformSet& t, const Matrix& d, const Matrix& w) {
    Matrix w_f = sandwich(transpose(t.g1), w, transpose(t.g2));
    Matrix d_f = sandwich(t.b1, d, t.b2);
    return sandwich(t.a1, hadamard(w_f, d_f), t.a2);
}

void check_correctness_identity(const TransformSet& t, std::uint64_t seed, double tol) {
    Tensor img = random_tensor({1, t.p, t.q}, seed);
    Tensor w = random_tensor({1, 1, t.r, t.s}, seed + 1);
    Tensor ref = direct_conv(img, w);

    Matrix d(t.p, t.q), wm(t.r, t.s);
    for (std::size_t i = 0; i < t.p; ++i)
        for (std::size_t j = 0; j < t.q; ++j) d(i, j) = img(0, i, j);
    for (std::size_t i = 0; i < t.r; ++i)
        for (std::size_t j = 0; j < t.s; ++j) wm(i, j) = w(0, 0, i, j);
    Matrix out = run_tile(t, d, wm);
    REQUIRE(out.rows() == t.m);
    REQUIRE(out.cols() == t.n);
    for (std::size_t i = 0; i < t.m; ++i)
        for (std::size_t j = 0; j < t.n; ++j)
            CHECK(std::abs(out(i, j) - ref(0, i, j)) <= tol);
}

}  // namespace

TEST_CASE("fixed F(2x2,3x3) matrices have the expected entries") {
    TransformSet t = f2x2_3x3_transforms();
    CHECK(t.m == 2);
    CHECK(t.p == 4);
    // A columns [1,1,1,0] and [0,1,-1,-1]
    const double a[4][2] = {{1, 0}, {1, 1}, {1, -1}, {0, -1}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 2; ++j) CHECK(t.a1(i, j) == a[i][j]);
    const double b[4][4] = {{1, 0, 0, 0}, {0, 1, -1, 1}, {-1, 1, 1, 0}, {0, 0, 0, -1}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) CHECK(t.b1(i, j) == b[i][j]);
    const double g[4][3] = {{1, 0, 0}, {0.5, 0.5, 0.5}, {0.5, -0.5, 0.5}, {0, 0, 1}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK(t.g1(i, j) == g[i][j]);
    CHECK(t.a2.entries() == t.a1.entries());
    CHECK(t.b2.entries() == t.b1.entries());
    CHECK(t.g2.entries() == t.g1.entries());
}

TEST_CASE("F(2x2,3x3) reproduces direct convolution exactly on small integers") {
    TransformSet t = f2x2_3x3_transforms();
    // integer tile: every intermediate is exactly representable
    Matrix d(4, 4), w(3, 3);
    int v = -7;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) d(i, j) = static_cast<double>(v++ % 5);
    v = 3;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) w(i, j) = static_cast<double>((v++ % 7) - 3);
    Matrix out = run_tile(t, d, w);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double ref = 0.0;
            for (std::size_t u = 0; u < 3; ++u)
                for (std::size_t x = 0; x < 3; ++x) ref += w(u, x) * d(i + u, j + x);
            CHECK(out(i, j) == ref);
        }
}

TEST_CASE("correctness identity for generated transforms") {
    check_correctness_identity(f2x2_3x3_transforms(), 11, 1e-12);
    check_correctness_identity(cook_toom_transforms(2, 3), 13, 1e-10);
    check_correctness_identity(cook_toom_transforms(4, 3), 17, 1e-9);
    check_correctness_identity(cook_toom_transforms(1, 3), 19, 1e-12);
    check_correctness_identity(cook_toom_transforms(3, 3), 23, 1e-10);
    check_correctness_identity(cook_toom_transforms(2, 5), 29, 1e-9);
    check_correctness_identity(cook_toom_transforms(6, 3), 31, 1e-7);
    check_correctness_identity(cook_toom_transforms(4, 2, 3, 3), 37, 1e-9);
}

TEST_CASE("cook_toom rejects unsupported sizes") {
    CHECK_THROWS_AS(cook_toom_transforms(7, 3), CapabilityError);
    CHECK_THROWS_AS(cook_toom_transforms(6, 5), CapabilityError);
}

TEST_CASE("tile geometry without padding") {
    TileGeometry g = make_geometry(3, 6, 6, 2, 2, 3, 3);
    CHECK(g.h_o == 4);
    CHECK(g.w_o == 4);
    CHECK(g.h_op == 4);
    CHECK_FALSE(g.padded());
    CHECK(g.tiles_y == 2);
    CHECK(g.tiles_x == 2);
    CHECK(g.t == 4);
}

TEST_CASE("tile geometry pads to the next tile boundary") {
    TileGeometry g = make_geometry(1, 7, 9, 2, 2, 3, 3);
    CHECK(g.h_o == 5);
    CHECK(g.w_o == 7);
    CHECK(g.h_op == 6);
    CHECK(g.w_op == 8);
    CHECK(g.padded());
    CHECK(g.tiles_y == 3);
    CHECK(g.tiles_x == 4);
    CHECK(g.h_ip == 8);
    CHECK(g.w_ip == 10);
}

TEST_CASE("phi and psi hand values") {
    TileGeometry g = make_geometry(1, 12, 12, 2, 2, 3, 3);  // 5x5 tiles? no: 12->10 out, 5x5
    CHECK(g.tiles_x == 5);
    // phi(t, i, j) = (ty*m + i, tx*n + j), t = ty*tiles_x + tx
    auto [r0, c0] = phi(g, 0, 0, 0);
    CHECK(r0 == 0);
    CHECK(c0 == 0);
    auto [r1, c1] = phi(g, 1, 0, 0);
    CHECK(r1 == 0);
    CHECK(c1 == 2);
    auto [r2, c2] = phi(g, 3, 3, 3);
    CHECK(r2 == 3);
    CHECK(c2 == 9);
    auto [r3, c3] = phi(g, 6, 1, 2);
    CHECK(r3 == 3);
    CHECK(c3 == 4);

    TileIndex ti = psi(g, 3, 2);
    CHECK(ti.t == 1 * 5 + 1);
    CHECK(ti.i == 1);
    CHECK(ti.j == 0);
    TileIndex t0 = psi(g, 0, 0);
    CHECK(t0.t == 0);
    CHECK(t0.i == 0);
    CHECK(t0.j == 0);
}

TEST_CASE("phi and psi are consistent on the output index set") {
    TileGeometry g = make_geometry(1, 9, 11, 2, 2, 3, 3);
    for (std::size_t i = 0; i < g.h_op; ++i)
        for (std::size_t j = 0; j < g.w_op; ++j) {
            TileIndex t = psi(g, i, j);
            auto [r, c] = phi(g, t.t, t.i, t.j);
            CHECK(r == i);
            CHECK(c == j);
        }
}

TEST_CASE("tile_input copies halos and zero fills padding") {
    TileGeometry g = make_geometry(1, 5, 5, 2, 2, 3, 3);  // h_o=3, padded to 4
    Tensor img = random_tensor({1, 5, 5}, 41);
    Tensor tiled = tile_input(img, g);
    REQUIRE(tiled.shape() == std::vector<std::size_t>{1, g.t, 4, 4});
    for (std::size_t t = 0; t < g.t; ++t)
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                auto [r, c] = phi(g, t, i, j);
                const double want = (r < 5 && c < 5) ? img(0, r, c) : 0.0;
                CHECK(tiled(0, t, i, j) == want);
            }
}

TEST_CASE("untile_output inverts tile_output and crops padding") {
    TileGeometry g = make_geometry(1, 7, 7, 2, 2, 3, 3);  // h_o=5 -> padded 6
    Tensor out = random_tensor({2, 5, 5}, 43);
    Tensor tiled = tile_output(out, g);
    REQUIRE(tiled.shape() == std::vector<std::size_t>{2, g.t, 2, 2});
    Tensor back = untile_output(tiled, g);
    REQUIRE(back.same_shape(out));
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(back[i] == out[i]);
    // padded positions are zero filled
    TileIndex pad = psi(g, 5, 5);
    CHECK(tiled(0, pad.t, pad.i, pad.j) == 0.0);
}
