// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "wino/layer.hpp"
#include "wino/perfmodel.hpp"
#include "wino/reference.hpp"
#include "wino/sparse.hpp"
#include "wino/train.hpp"
#include "wino/transforms.hpp"

using namespace wino;

namespace {

int failures = 0;

void verdict(int criterion, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << criterion << ": " << detail
              << "\n";
    if (!ok) ++failures;
}

Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor t(std::move(shape));
    for (double& v : t.data()) v = dist(rng);
    return t;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

double max_abs(const Tensor& t) {
    double m = 0.0;
    for (double v : t.data()) m = std::max(m, std::abs(v));
    return m;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// 1. forward(lift(W)) == direct_conv within 1e-10 absolute, 100 seeded cases
void criterion_1() {
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<std::size_t> ch(1, 4);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const bool big_tile = i % 2 == 1;
        TransformSet tset = big_tile ? cook_toom_transforms(4, 3) : f2x2_3x3_transforms();
        std::uniform_int_distribution<std::size_t> sz(tset.p, 16);
        const std::size_t c = ch(rng), k = ch(rng), h = sz(rng), w = sz(rng);
        Tensor img = random_tensor({c, h, w}, rng);
        Tensor kw = random_tensor({k, c, 3, 3}, rng);
        TileGeometry geom = make_geometry(c, h, w, tset);
        Tensor out = winograd_forward(img, lift_spatial_weights(kw, tset), tset, geom);
        Tensor ref = direct_conv(img, kw);
        worst = std::max(worst, max_abs_diff(out, ref));
    }
    verdict(1, worst <= 1e-10,
            "winograd forward vs direct conv, 100 cases, max abs diff " +
                sci(worst));
}

// 2. analytic gradients vs central finite differences, 1e-6 relative, 20 cases
void criterion_2() {
    std::mt19937_64 rng(1002);
    std::uniform_int_distribution<std::size_t> ch(1, 3);
    std::uniform_int_distribution<std::size_t> sz(5, 11);
    TransformSet tset = f2x2_3x3_transforms();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const std::size_t c = ch(rng), k = ch(rng), h = sz(rng), w = sz(rng);
        Tensor img = random_tensor({c, h, w}, rng);
        Tensor w_f = random_tensor({k, c, 4, 4}, rng);
        TileGeometry geom = make_geometry(c, h, w, tset);

        ForwardCache cache;
        Tensor out = winograd_forward(img, w_f, tset, geom, &cache);
        Tensor grad_wf = winograd_backward_weights(out, cache, tset, geom);
        Tensor grad_in = winograd_backward_input(cache, w_f, tset, geom);

        auto loss = [&](const Tensor& ii, const Tensor& ww) {
            Tensor o = winograd_forward(ii, ww, tset, geom);
            double l = 0.0;
            for (double v : o.data()) l += 0.5 * v * v;
            return l;
        };
        Tensor fd_wf =
            finite_diff_grad([&](const Tensor& x) { return loss(img, x); }, w_f);
        Tensor fd_in =
            finite_diff_grad([&](const Tensor& x) { return loss(x, w_f); }, img);
        worst = std::max(worst, max_abs_diff(grad_wf, fd_wf) / std::max(1e-12, max_abs(fd_wf)));
        worst = std::max(worst, max_abs_diff(grad_in, fd_in) / std::max(1e-12, max_abs(fd_in)));
    }
    verdict(2, worst <= 1e-6,
            "analytic vs finite-difference gradients, 20 cases, max rel err " +
                sci(worst));
}

// 3. sparse == dense within 1e-10 relative; bitwise worker independence
void criterion_3() {
    std::mt19937_64 rng(1003);
    TransformSet tset = f2x2_3x3_transforms();
    Tensor batch = random_tensor({3, 3, 12, 12}, rng);
    TileGeometry geom = make_geometry(3, 12, 12, tset);
    bool ok = true;
    std::string detail;
    for (double x : {0.0, 0.05, 0.3, 1.0}) {
        Tensor w_f = random_tensor({4, 3, 4, 4}, rng);
        train::magnitude_threshold_to_density(w_f, x);
        auto csr = compress<double>(w_f);
        Tensor base = sparse_forward<double>(batch, csr, tset, geom, 1);
        Tensor w4 = sparse_forward<double>(batch, csr, tset, geom, 4);
        for (std::size_t i = 0; i < base.size() && ok; ++i)
            if (base[i] != w4[i]) {
                ok = false;
                detail = "worker counts 1 and 4 disagree bitwise at x=" + std::to_string(x);
            }
        // dense reference per image
        const std::size_t img_sz = 3 * 12 * 12;
        const std::size_t out_sz = base.size() / 3;
        double scale = std::max(1.0, max_abs(base));
        for (std::size_t n = 0; n < 3 && ok; ++n) {
            Tensor img({3, 12, 12});
            for (std::size_t i = 0; i < img_sz; ++i) img[i] = batch[n * img_sz + i];
            Tensor ref = winograd_forward(img, w_f, tset, geom);
            for (std::size_t i = 0; i < out_sz; ++i)
                if (std::abs(base[n * out_sz + i] - ref[i]) > 1e-10 * scale) {
                    ok = false;
                    detail = "sparse deviates from dense at x=" + std::to_string(x);
                    break;
                }
        }
        if (!ok) break;
    }
    verdict(3, ok,
            ok ? "sparse == dense across densities {0,0.05,0.3,1}, bitwise worker-stable"
               : detail);
}

// 4. exactly 16 multiplications per (tile,c,k) vs 36 for direct filtering
void criterion_4() {
    std::mt19937_64 rng(1004);
    TransformSet tset = f2x2_3x3_transforms();
    const std::size_t c = 3, k = 4, h = 8;
    Tensor img = random_tensor({c, h, h}, rng);
    Tensor kw = random_tensor({k, c, 3, 3}, rng);
    TileGeometry geom = make_geometry(c, h, h, tset);
    OpCounter wino_ops, direct_ops;
    winograd_forward(img, lift_spatial_weights(kw, tset), tset, geom, nullptr, &wino_ops);
    direct_conv(img, kw, &direct_ops);
    const std::uint64_t per_tck_wino = wino_ops.multiplications / (geom.t * c * k);
    const std::uint64_t per_tck_direct = direct_ops.multiplications / (geom.t * c * k);
    const bool exact = wino_ops.multiplications == geom.t * c * k * 16 &&
                       direct_ops.multiplications == geom.t * c * k * 36;
    verdict(4, exact,
            "element-wise multiplications per (tile,c,k): winograd " +
                std::to_string(per_tck_wino) + ", direct " + std::to_string(per_tck_direct));
}

// 5. pinned FLOP-model values, exact equality
void criterion_5() {
    perf::LayerDims unit{"unit", 1, 1, 1, 1, 1};
    perf::LayerDims small{"small", 1, 1, 2, 3, 2};
    const bool b1 = perf::flops_baseline(unit) == 2.0;
    const bool b2 = perf::flops_winograd(small) == 384.0;
    const double x_star = perf::crossover_density(3.0);
    perf::CostParams cp{3.0, x_star};
    const bool b3 = perf::flops_sparse_winograd(small, cp) == perf::flops_winograd(small);
    const bool b4 = x_star == 1.0 / 3.0;
    verdict(5, b1 && b2 && b3 && b4,
            "baseline(1,1,1,1)=2, winograd(1,1,2)=384, sparse==dense at x*=1/3 exactly");
}

struct PrunedRun {
    double baseline_acc = 0.0;
    double final_acc = 0.0;
    double density = 0.0;
    train::Network net;
    bool masks_held = true;
};

// Shared pipeline for criteria 6-8: pretrain, prune, fine-tune with per-epoch
// bitwise mask checks.
PrunedRun run_method_a(std::uint64_t seed) {
    using namespace train;
    Dataset train_set = synth_dataset(stream_seed(seed, "split/train"), 384);
    Dataset test_set = synth_dataset(stream_seed(seed, "split/test"), 128);

    PrunedRun r;
    r.net = make_toy_network(seed, Domain::winograd);
    PruneConfig cfg;
    cfg.seed = seed;
    cfg.base_lr = 0.08;
    run_epochs(r.net, train_set, cfg, 24, StepMode::plain, "pretrain");
    r.baseline_acc = accuracy(r.net, test_set);

    for (auto& conv : r.net.convs) {
        conv.lambda = 0.01;
        conv.norm = 1;
    }
    PruneConfig pcfg = cfg;
    pcfg.base_lr = 0.05;
    pcfg.eps = 1e-2;
    run_epochs(r.net, train_set, pcfg, 30, StepMode::prune, "prune");

    set_masks_from_zeros(r.net);
    std::vector<Tensor> frozen;
    for (const auto& conv : r.net.convs) frozen.push_back(conv.mask);
    PruneConfig fcfg = cfg;
    fcfg.base_lr = 0.03;
    for (auto& conv : r.net.convs) conv.lambda = 5e-4;
    for (int e = 0; e < 12; ++e) {
        run_epochs(r.net, train_set, fcfg, 1, StepMode::finetune,
                   "finetune/" + std::to_string(e));
        // bitwise: masked coordinates are exactly 0 at every checkpoint
        for (std::size_t l = 0; l < r.net.convs.size(); ++l)
            for (std::size_t i = 0; i < frozen[l].size(); ++i)
                if (frozen[l][i] != 0.0 && r.net.convs[l].w[i] != 0.0)
                    r.masks_held = false;
    }
    r.final_acc = accuracy(r.net, test_set);

    std::size_t nnz = 0, total = 0;
    for (const auto& conv : r.net.convs) {
        total += conv.w.size();
        for (double v : conv.w.data()) nnz += v != 0.0;
    }
    r.density = static_cast<double>(nnz) / static_cast<double>(total);
    return r;
}

void criteria_6_7_8() {
    using namespace train;
    const std::uint64_t seed = 1;
    PrunedRun a1 = run_method_a(seed);
    PrunedRun a2 = run_method_a(seed);
    const bool deterministic = a1.final_acc == a2.final_acc && a1.density == a2.density;

    // 7: >= 70% sparsity with <= 2 accuracy points drop, deterministic
    const double sparsity = 1.0 - a1.density;
    const double drop = 100.0 * (a1.baseline_acc - a1.final_acc);
    verdict(7, sparsity >= 0.70 && drop <= 2.0 && deterministic,
            "method A: sparsity " + std::to_string(100.0 * sparsity) + "%, accuracy drop " +
                std::to_string(drop) + " points, deterministic=" +
                (deterministic ? "yes" : "no"));

    // 8: masks bitwise invariant across the whole fine-tune of criterion 7
    verdict(8, a1.masks_held && a2.masks_held,
            "zero-masked parameters stayed bitwise 0 at every fine-tune epoch");

    // 6: method B at matched density either loses >= 5 points or needs >= 2x
    // the density for matched accuracy
    Dataset train_set = synth_dataset(stream_seed(seed, "split/train"), 384);
    Dataset test_set = synth_dataset(stream_seed(seed, "split/test"), 128);
    Network spatial = make_toy_network(seed, Domain::spatial);
    PruneConfig cfg;
    cfg.seed = seed;
    cfg.base_lr = 0.08;

    PhaseResult b_matched =
        method_b_prune(spatial, train_set, test_set, cfg, 24, a1.density);
    const double b_drop_points = 100.0 * (a1.final_acc - b_matched.accuracy);
    bool pass6 = b_drop_points >= 5.0;
    std::string detail6 = "method B at matched density " + std::to_string(a1.density) +
                          ": accuracy " + std::to_string(b_matched.accuracy) + " vs A " +
                          std::to_string(a1.final_acc) + " (" +
                          std::to_string(b_drop_points) + " points worse)";
    if (!pass6) {
        // fallback clause: density method B needs to reach A's accuracy
        double needed = 1.0;
        for (double x : {0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0}) {
            PhaseResult b = method_b_prune(spatial, train_set, test_set, cfg, 24, x);
            if (b.accuracy >= a1.final_acc - 1e-9) {
                needed = x;
                break;
            }
        }
        pass6 = needed >= 2.0 * a1.density;
        detail6 += "; matched-accuracy density " + std::to_string(needed) + " vs A " +
                   std::to_string(a1.density);
    }
    verdict(6, pass6, detail6);
}

// 9. counter and wall-time scaling of the sparse kernel
void criterion_9() {
    std::mt19937_64 rng(1009);
    TransformSet tset = f2x2_3x3_transforms();
    const std::size_t c = 64, k = 64, h = 32, batch = 8;
    TileGeometry geom = make_geometry(c, h + 2, h + 2, tset);
    Tensor batch_t = random_tensor({batch, c, geom.h_i, geom.w_i}, rng);
    Tensor w_f = random_tensor({k, c, 4, 4}, rng);

    auto bench = [&](double density, OpCounter& ops) {
        Tensor w = w_f;
        train::magnitude_threshold_to_density(w, density);
        auto csr = compress<double>(w);
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            OpCounter local;
            auto t0 = std::chrono::steady_clock::now();
            sparse_forward<double>(batch_t, csr, tset, geom, 1, &local);
            auto t1 = std::chrono::steady_clock::now();
            best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
            ops = local;
        }
        return best;
    };
    OpCounter dense_ops, sparse_ops;
    const double t_dense = bench(1.0, dense_ops);
    const double t_sparse = bench(0.1, sparse_ops);
    const double mult_ratio = static_cast<double>(sparse_ops.multiplications) /
                              static_cast<double>(dense_ops.multiplications);
    verdict(9, mult_ratio <= 0.12 && t_sparse < t_dense,
            "density 0.1 vs 1.0: multiplication ratio " + std::to_string(mult_ratio) +
                ", wall " + std::to_string(t_sparse) + "s vs " + std::to_string(t_dense) +
                "s");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criteria_6_7_8();
    criterion_9();
    std::cout << (failures ? "acceptance: FAILED\n" : "acceptance: all criteria pass\n");
    return failures ? 1 : 0;
}
