import numpy as np
import pytest

import wino


def rng(seed):
    return np.random.default_rng(seed)


def test_transform_matrices():
    t = wino.gen_transforms(m=2, r=3)
    assert t["A1"].shape == (4, 2)
    assert t["B1"].shape == (4, 4)
    assert t["G1"].shape == (4, 3)
    np.testing.assert_array_equal(
        t["G1"], np.array([[1, 0, 0], [0.5, 0.5, 0.5], [0.5, -0.5, 0.5], [0, 0, 1]])
    )


def test_winograd_matches_direct():
    r = rng(0)
    img = r.standard_normal((3, 9, 11))
    w = r.standard_normal((2, 3, 3, 3))
    ref = wino.conv_direct(img, w)
    out = wino.conv_winograd(img, wino.lift(w), m=2)
    assert out.shape == (2, 7, 9)
    np.testing.assert_allclose(out, ref, atol=1e-12)


def test_larger_tile():
    r = rng(1)
    img = r.standard_normal((2, 12, 12))
    w = r.standard_normal((2, 2, 3, 3))
    out = wino.conv_winograd(img, wino.lift(w, m=4), m=4)
    np.testing.assert_allclose(out, wino.conv_direct(img, w), atol=1e-9)


def test_gradients_match_finite_differences():
    r = rng(2)
    img = r.standard_normal((1, 6, 6))
    w_f = r.standard_normal((2, 1, 4, 4))
    out = wino.conv_winograd(img, w_f)
    grad_wf, grad_in = wino.conv_winograd_grad(img, w_f, out)  # L = ||O||^2 / 2

    h = 1e-6
    idx = (1, 0, 2, 3)
    wp, wm = w_f.copy(), w_f.copy()
    wp[idx] += h
    wm[idx] -= h
    fd = (np.sum(wino.conv_winograd(img, wp) ** 2) - np.sum(wino.conv_winograd(img, wm) ** 2)) / (4 * h)
    assert grad_wf[idx] == pytest.approx(fd, rel=1e-5)

    idx = (0, 3, 4)
    ip, im = img.copy(), img.copy()
    ip[idx] += h
    im[idx] -= h
    fd = (np.sum(wino.conv_winograd(ip, w_f) ** 2) - np.sum(wino.conv_winograd(im, w_f) ** 2)) / (4 * h)
    assert grad_in[idx] == pytest.approx(fd, rel=1e-5)


def test_sparse_matches_dense_and_workers_agree():
    r = rng(3)
    batch = r.standard_normal((2, 3, 8, 8))
    w_f = r.standard_normal((4, 3, 4, 4))
    w_f[np.abs(w_f) < 0.8] = 0.0
    assert wino.density(w_f) < 1.0

    out1 = wino.sparse_conv(batch, w_f, workers=1)
    out4 = wino.sparse_conv(batch, w_f, workers=4)
    np.testing.assert_array_equal(out1, out4)  # bitwise

    for n in range(2):
        dense = wino.conv_winograd(batch[n], w_f)
        np.testing.assert_array_equal(out1[n], dense)  # bitwise in f64

    out32 = wino.sparse_conv(batch, w_f, precision="f32")
    np.testing.assert_allclose(out32, out1, rtol=1e-4, atol=1e-4)


def test_perf_model_values():
    assert wino.perf.flops_baseline(1, 1, 1, r=1, m=1) == 2.0
    assert wino.perf.flops_winograd(1, 1, 2) == 384.0
    x = wino.perf.crossover_density(3.0)
    assert x == pytest.approx(1 / 3)
    assert wino.perf.flops_sparse_winograd(8, 8, 16, 3.0, x) == wino.perf.flops_winograd(8, 8, 16)


def test_wgt1_roundtrip(tmp_path):
    path = str(tmp_path / "t.wgt")
    arr = rng(4).standard_normal((2, 3, 4))
    wino.write_wgt1(path, arr)
    np.testing.assert_array_equal(wino.read_wgt1(path), arr)


def test_shape_errors_surface_as_valueerror():
    with pytest.raises(ValueError):
        wino.conv_direct(np.zeros((4, 4)), np.zeros((1, 1, 3, 3)))
    with pytest.raises(ValueError):
        wino.gen_transforms(m=7, r=3)
