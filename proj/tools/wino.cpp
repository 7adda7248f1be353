#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wino/harness.hpp"
#include "wino/layer.hpp"
#include "wino/perfmodel.hpp"
#include "wino/reference.hpp"
#include "wino/sparse.hpp"
#include "wino/tensor.hpp"
#include "wino/train.hpp"
#include "wino/transforms.hpp"

namespace {

using namespace wino;
namespace hn = wino::harness;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumeric = 2;

std::pair<std::size_t, std::size_t> parse_tile(const std::string& spec) {
    const auto comma = spec.find(',');
    if (comma == std::string::npos) {
        const std::size_t m = std::stoul(spec);
        return {m, m};
    }
    return {std::stoul(spec.substr(0, comma)), std::stoul(spec.substr(comma + 1))};
}

std::vector<std::size_t> parse_shape(const std::string& spec) {
    std::vector<std::size_t> shape;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto x = spec.find('x', pos);
        if (x == std::string::npos) x = spec.size();
        shape.push_back(std::stoul(spec.substr(pos, x - pos)));
        pos = x + 1;
    }
    return shape;
}

TransformSet transforms_for(std::size_t m, std::size_t n, std::size_t r, std::size_t s) {
    if (m == 2 && n == 2 && r == 3 && s == 3) return f2x2_3x3_transforms();
    return cook_toom_transforms(m, n, r, s);
}

void print_matrix_block(std::ostream& os, const std::string& name, const Matrix& mat) {
    os << name << "\n";
    for (std::size_t i = 0; i < mat.rows(); ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < mat.cols(); ++j) {
            std::ostringstream v;
            v << mat(i, j);
            row.push_back(v.str());
        }
        os << hn::csv_row(row) << "\n";
    }
}

Tensor matrix_tensor(const Matrix& m) {
    return Tensor({m.rows(), m.cols()}, m.entries());
}

int cmd_gen_transforms(std::size_t m, std::size_t n, std::size_t r, std::size_t s,
                       const std::string& out_dir) {
    TransformSet t = transforms_for(m, n, r, s);
    print_matrix_block(std::cout, "A1", t.a1);
    print_matrix_block(std::cout, "A2", t.a2);
    print_matrix_block(std::cout, "B1", t.b1);
    print_matrix_block(std::cout, "B2", t.b2);
    print_matrix_block(std::cout, "G1", t.g1);
    print_matrix_block(std::cout, "G2", t.g2);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_wgt1(out_dir + "/a1.wgt", matrix_tensor(t.a1));
        write_wgt1(out_dir + "/a2.wgt", matrix_tensor(t.a2));
        write_wgt1(out_dir + "/b1.wgt", matrix_tensor(t.b1));
        write_wgt1(out_dir + "/b2.wgt", matrix_tensor(t.b2));
        write_wgt1(out_dir + "/g1.wgt", matrix_tensor(t.g1));
        write_wgt1(out_dir + "/g2.wgt", matrix_tensor(t.g2));
    }
    return kExitOk;
}

int cmd_conv(const std::string& input, const std::string& weights, const std::string& output,
             const std::string& tile, const std::string& domain) {
    Tensor img = read_wgt1(input);
    Tensor w = read_wgt1(weights);
    if (domain == "spatial") {
        write_wgt1(output, direct_conv(img, w));
        return kExitOk;
    }
    auto [m, n] = parse_tile(tile);
    const std::size_t p = w.extent(2), q = w.extent(3);
    if (p < m || q < n) throw ShapeError("tile larger than Winograd weight extent");
    TransformSet tset = transforms_for(m, n, p - m + 1, q - n + 1);
    TileGeometry geom = make_geometry(img.extent(0), img.extent(1), img.extent(2), tset);
    write_wgt1(output, winograd_forward(img, w, tset, geom));
    return kExitOk;
}

int cmd_grad_check(std::uint64_t seed, const std::string& shape_spec, const std::string& tile,
                   std::size_t out_channels, double tol) {
    auto shape = parse_shape(shape_spec);
    if (shape.size() != 3) throw ShapeError("grad-check shape must be CxHxW");
    auto [m, n] = parse_tile(tile);
    TransformSet tset = transforms_for(m, n, 3, 3);
    TileGeometry geom = make_geometry(shape[0], shape[1], shape[2], tset);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor img(shape);
    for (double& v : img.data()) v = dist(rng);
    Tensor w_f({out_channels, shape[0], tset.p, tset.q});
    for (double& v : w_f.data()) v = dist(rng);

    // L = 1/2 ||O||^2
    ForwardCache cache;
    Tensor out = winograd_forward(img, w_f, tset, geom, &cache);
    Tensor grad_o = out;
    Tensor grad_wf = winograd_backward_weights(grad_o, cache, tset, geom);
    Tensor grad_in = winograd_backward_input(cache, w_f, tset, geom);

    auto loss_of = [&](const Tensor& i, const Tensor& wf) {
        Tensor o = winograd_forward(i, wf, tset, geom);
        double l = 0.0;
        for (double v : o.data()) l += 0.5 * v * v;
        return l;
    };
    Tensor fd_wf = finite_diff_grad([&](const Tensor& wf) { return loss_of(img, wf); }, w_f);
    Tensor fd_in = finite_diff_grad([&](const Tensor& i) { return loss_of(i, w_f); }, img);

    auto max_rel = [](const Tensor& a, const Tensor& b) {
        double scale = 1e-12, diff = 0.0;
        for (double v : b.data()) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < a.size(); ++i)
            diff = std::max(diff, std::abs(a[i] - b[i]));
        return diff / scale;
    };
    const double rel_wf = max_rel(grad_wf, fd_wf);
    const double rel_in = max_rel(grad_in, fd_in);
    std::cout << "weights max relative error: " << rel_wf << "\n";
    std::cout << "input max relative error: " << rel_in << "\n";
    if (rel_wf > tol || rel_in > tol) {
        std::cerr << "gradient check failed: tolerance " << tol << " exceeded\n";
        return kExitNumeric;
    }
    return kExitOk;
}

train::Dataset dataset_from_config(const hn::Config& cfg, const std::string& which) {
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("dataset", "seed", 1));
    const auto channels = static_cast<std::size_t>(cfg.get_int("dataset", "channels", 2));
    const auto n = static_cast<std::size_t>(
        cfg.get_int("dataset", which, which == "train" ? 512 : 128));
    // distinct streams for train and test splits
    return train::synth_dataset(train::stream_seed(seed, "split/" + which), n, channels);
}

train::PruneConfig prune_config_from(const hn::Config& cfg, const std::string& section) {
    train::PruneConfig pc;
    pc.seed = static_cast<std::uint64_t>(cfg.get_int("dataset", "seed", 1));
    pc.eps = cfg.get_double(section, "eps", 1e-4);
    pc.beta = cfg.get_double(section, "beta", 0.1);
    pc.base_lr = cfg.get_double(section, "lr", 0.05);
    pc.lr_decay = cfg.get_double(section, "lr_decay", 0.0);
    pc.wino_lr_mult = cfg.get_double(section, "wino_lr_mult", 1.0);
    pc.batch_size = static_cast<std::size_t>(cfg.get_int(section, "batch_size", 16));
    return pc;
}

void set_conv_lambdas(train::Network& net, const hn::Config& cfg, const std::string& section) {
    const double lambda = cfg.get_double(section, "lambda", 0.0);
    const int norm = static_cast<int>(cfg.get_int(section, "norm", 1));
    for (auto& conv : net.convs) {
        conv.lambda = lambda;
        conv.norm = norm;
    }
}

int cmd_train(const std::string& config_path, const std::string& out_dir) {
    hn::Config cfg = hn::Config::parse_file(config_path);
    train::Dataset train_set = dataset_from_config(cfg, "train");
    train::Dataset test_set = dataset_from_config(cfg, "test");

    const std::string domain_s = cfg.get_or("network", "domain", "spatial");
    const train::Domain domain =
        domain_s == "winograd" ? train::Domain::winograd : train::Domain::spatial;
    const auto seed = static_cast<std::uint64_t>(cfg.get_int("dataset", "seed", 1));
    train::Network net = train::make_toy_network(
        seed, domain, static_cast<std::size_t>(cfg.get_int("dataset", "channels", 2)),
        static_cast<std::size_t>(cfg.get_int("network", "hidden1", 6)),
        static_cast<std::size_t>(cfg.get_int("network", "hidden2", 8)));

    train::PruneConfig pc = prune_config_from(cfg, "pretrain");
    const auto epochs = static_cast<std::size_t>(cfg.get_int("pretrain", "epochs", 20));
    const double lift_lambda = cfg.get_double("pretrain", "lift_lambda", 0.0);
    train::run_epochs(net, train_set, pc, epochs, train::StepMode::plain, "pretrain",
                      lift_lambda);

    if (domain == train::Domain::spatial && cfg.get_int("pretrain", "lift", 1))
        net = train::lift_network(net);

    hn::save_checkpoint(out_dir, net);
    std::cout << "accuracy," << train::accuracy(net, test_set) << "\n";
    return kExitOk;
}

int cmd_prune(const std::string& config_path, const std::string& in_dir,
              const std::string& out_dir) {
    hn::Config cfg = hn::Config::parse_file(config_path);
    train::Dataset train_set = dataset_from_config(cfg, "train");
    train::Dataset test_set = dataset_from_config(cfg, "test");
    train::Network net = hn::load_checkpoint(in_dir);
    set_conv_lambdas(net, cfg, "prune");
    train::PruneConfig pc = prune_config_from(cfg, "prune");
    const auto epochs = static_cast<std::size_t>(cfg.get_int("prune", "epochs", 20));
    train::run_epochs(net, train_set, pc, epochs, train::StepMode::prune, "prune");
    hn::save_checkpoint(out_dir, net);
    std::cout << "accuracy," << train::accuracy(net, test_set) << "\n";
    for (const auto& row : train::sparsity_report(net))
        std::cout << row.layer << "," << row.density << "\n";
    return kExitOk;
}

int cmd_finetune(const std::string& config_path, const std::string& in_dir,
                 const std::string& out_dir) {
    hn::Config cfg = hn::Config::parse_file(config_path);
    train::Dataset train_set = dataset_from_config(cfg, "train");
    train::Dataset test_set = dataset_from_config(cfg, "test");
    train::Network net = hn::load_checkpoint(in_dir);
    set_conv_lambdas(net, cfg, "finetune");
    bool has_mask = false;
    for (const auto& conv : net.convs) has_mask |= conv.mask.size() == conv.w.size();
    if (!has_mask) train::set_masks_from_zeros(net);
    train::PruneConfig pc = prune_config_from(cfg, "finetune");
    const auto epochs = static_cast<std::size_t>(cfg.get_int("finetune", "epochs", 10));
    train::run_epochs(net, train_set, pc, epochs, train::StepMode::finetune, "finetune");
    hn::save_checkpoint(out_dir, net);
    std::cout << "accuracy," << train::accuracy(net, test_set) << "\n";
    return kExitOk;
}

int cmd_report(const std::string& config_path, const std::string& dir) {
    hn::Config cfg = hn::Config::parse_file(config_path);
    train::Dataset test_set = dataset_from_config(cfg, "test");
    train::Network net = hn::load_checkpoint(dir);
    const double acc = train::accuracy(net, test_set);
    std::cout << hn::csv_row({"layer", "domain", "density_x", "sparsity_pct", "accuracy"})
              << "\n";
    for (const auto& row : train::sparsity_report(net)) {
        std::ostringstream d, s, a;
        d << row.density;
        s << 100.0 * (1.0 - row.density);
        a << acc;
        std::cout << hn::csv_row({row.layer, row.domain, d.str(), s.str(), a.str()}) << "\n";
    }
    return kExitOk;
}

std::vector<perf::LayerDims> layers_from_config(const std::string& path) {
    hn::Config cfg = hn::Config::parse_file(path);
    std::vector<perf::LayerDims> layers;
    for (const auto& section : cfg.sections()) {
        if (section.empty()) continue;
        perf::LayerDims d;
        d.name = section;
        d.c = static_cast<std::uint64_t>(cfg.get_int(section, "c", 0));
        d.k = static_cast<std::uint64_t>(cfg.get_int(section, "k", 0));
        d.h = static_cast<std::uint64_t>(cfg.get_int(section, "h", 0));
        d.r = static_cast<std::uint64_t>(cfg.get_int(section, "r", 3));
        d.m = static_cast<std::uint64_t>(cfg.get_int(section, "m", 2));
        if (!d.c || !d.k || !d.h)
            throw hn::ConfigError("layer " + section + " needs c, k, and h");
        layers.push_back(d);
    }
    if (layers.empty()) throw hn::ConfigError("no layers in " + path);
    return layers;
}

int cmd_perf_model(const std::string& layers_path, double alpha, const std::string& grid_spec,
                   const std::string& csv_path, double machine_balance) {
    auto layers = layers_from_config(layers_path);
    auto grid = hn::parse_density_grid(grid_spec);
    auto rows = perf::speedup_table(layers, grid, alpha, machine_balance);

    std::ostringstream os;
    std::vector<std::string> header = {"layer", "x", "speedup_sparse", "speedup_winograd",
                                       "speedup_sparse_winograd"};
    if (machine_balance > 0.0) header.push_back("sparse_winograd_bound");
    os << hn::csv_row(header) << "\n";
    for (const auto& row : rows) {
        std::ostringstream x, a, b, c;
        x << row.x;
        a << row.speedup_sparse;
        b << row.speedup_winograd;
        c << row.speedup_sparse_winograd;
        std::vector<std::string> fields = {row.layer, x.str(), a.str(), b.str(), c.str()};
        if (row.bound_annotated)
            fields.push_back(row.sparse_winograd_compute_bound ? "compute" : "bandwidth");
        os << hn::csv_row(fields) << "\n";
    }
    if (csv_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(csv_path);
        f << os.str();
    }
    return kExitOk;
}

int cmd_infer_bench(std::size_t batch, const std::string& layers_path,
                    const std::string& sweep_spec, const std::string& precision,
                    unsigned workers, const std::string& csv_path, std::uint64_t seed) {
    auto layers = layers_from_config(layers_path);
    auto grid = hn::parse_density_grid(sweep_spec);
    workers = hn::effective_workers(workers);
    const bool f32 = precision == "f32";
    if (!f32 && precision != "f64")
        throw hn::ConfigError("precision must be f32 or f64");

    std::ostringstream os;
    os << hn::csv_row({"layer", "density", "workers", "wall_ns", "effective_gflops",
                       "checksum"})
       << "\n";
    for (const auto& d : layers) {
        TransformSet tset = transforms_for(d.m, d.m, d.r, d.r);
        TileGeometry geom = make_geometry(d.c, d.h + d.r - 1, d.h + d.r - 1, tset);
        std::mt19937_64 rng(train::stream_seed(seed, "bench/" + d.name));
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        Tensor batch_t({batch, d.c, geom.h_i, geom.w_i});
        for (double& v : batch_t.data()) v = dist(rng);
        Tensor w_f({d.k, d.c, tset.p, tset.q});
        for (double& v : w_f.data()) v = dist(rng);

        for (double x : grid) {
            Tensor w = w_f;
            train::magnitude_threshold_to_density(w, x);
            Tensor out;
            auto t0 = std::chrono::steady_clock::now();
            if (f32) {
                auto csr = compress<float>(w);
                out = sparse_forward<float>(batch_t, csr, tset, geom, workers);
            } else {
                auto csr = compress<double>(w);
                out = sparse_forward<double>(batch_t, csr, tset, geom, workers);
            }
            auto t1 = std::chrono::steady_clock::now();
            const auto wall_ns =
                std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            double checksum = 0.0;
            for (double v : out.data()) checksum += v;
            const double gflops = perf::flops_baseline(d) * static_cast<double>(batch) /
                                  static_cast<double>(wall_ns);
            std::ostringstream xs, ws, ns, gs, cs;
            xs << x;
            ws << workers;
            ns << wall_ns;
            gs << gflops;
            cs << checksum;
            os << hn::csv_row({d.name, xs.str(), ws.str(), ns.str(), gs.str(), cs.str()})
               << "\n";
        }
    }
    if (csv_path.empty()) {
        std::cout << os.str();
    } else {
        std::ofstream f(csv_path);
        f << os.str();
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Winograd-layer training, pruning, and sparse inference toolkit"};
    app.require_subcommand(1);

    // gen-transforms
    auto* gen = app.add_subcommand("gen-transforms", "print/export a transform set");
    std::size_t g_m = 2, g_n = 0, g_r = 3, g_s = 0;
    std::string g_out;
    gen->add_option("--m", g_m);
    gen->add_option("--n", g_n);
    gen->add_option("--r", g_r);
    gen->add_option("--s", g_s);
    gen->add_option("--out-dir", g_out);

    // conv
    auto* conv = app.add_subcommand("conv", "run one convolution on WGT1 tensors");
    std::string c_in, c_w, c_out, c_tile = "2", c_domain = "winograd";
    conv->add_option("--input", c_in)->required();
    conv->add_option("--weights", c_w)->required();
    conv->add_option("--output", c_out)->required();
    conv->add_option("--tile", c_tile);
    conv->add_option("--domain", c_domain)->check(CLI::IsMember({"spatial", "winograd"}));

    // grad-check
    auto* gc = app.add_subcommand("grad-check", "finite-difference gradient verification");
    std::uint64_t gc_seed = 7;
    std::string gc_shape = "1x6x6", gc_tile = "2";
    std::size_t gc_k = 2;
    double gc_tol = 1e-6;
    gc->add_option("--seed", gc_seed);
    gc->add_option("--shape", gc_shape);
    gc->add_option("--tile", gc_tile);
    gc->add_option("--out-channels", gc_k);
    gc->add_option("--tol", gc_tol);

    // train / prune / finetune / report
    auto* tr = app.add_subcommand("train", "pre-train the toy network");
    std::string tr_cfg, tr_out = "checkpoint";
    tr->add_option("--config", tr_cfg)->required();
    tr->add_option("--out", tr_out);

    auto* pr = app.add_subcommand("prune", "L1 + gradient-thresholding pruning");
    std::string pr_cfg, pr_in, pr_out = "checkpoint-pruned";
    pr->add_option("--config", pr_cfg)->required();
    pr->add_option("--checkpoint", pr_in)->required();
    pr->add_option("--out", pr_out);

    auto* ft = app.add_subcommand("finetune", "mask-fixed fine-tuning");
    std::string ft_cfg, ft_in, ft_out = "checkpoint-finetuned";
    ft->add_option("--config", ft_cfg)->required();
    ft->add_option("--checkpoint", ft_in)->required();
    ft->add_option("--out", ft_out);

    auto* rp = app.add_subcommand("report", "sparsity/accuracy table as CSV");
    std::string rp_cfg, rp_in;
    rp->add_option("--config", rp_cfg)->required();
    rp->add_option("--checkpoint", rp_in)->required();

    // infer-bench
    auto* ib = app.add_subcommand("infer-bench", "sparse inference benchmark");
    std::size_t ib_batch = 8;
    std::string ib_layers, ib_sweep = "0.02:1.0:log", ib_prec = "f32", ib_csv;
    unsigned ib_workers = 1;
    std::uint64_t ib_seed = 1;
    ib->add_option("--batch", ib_batch);
    ib->add_option("--layers", ib_layers)->required();
    ib->add_option("--density-sweep", ib_sweep);
    ib->add_option("--precision", ib_prec);
    ib->add_option("--workers", ib_workers);
    ib->add_option("--csv", ib_csv);
    ib->add_option("--seed", ib_seed);

    // perf-model
    auto* pm = app.add_subcommand("perf-model", "FLOP model speedup projections");
    std::string pm_layers, pm_grid = "0.02:1:log20", pm_csv;
    double pm_alpha = 3.0, pm_balance = 0.0;
    pm->add_option("--layers", pm_layers)->required();
    pm->add_option("--alpha", pm_alpha);
    pm->add_option("--density-grid", pm_grid);
    pm->add_option("--csv", pm_csv);
    pm->add_option("--machine-balance", pm_balance);

    try {
        app.parse(argc, argv);
        if (*gen)
            return cmd_gen_transforms(g_m, g_n ? g_n : g_m, g_r, g_s ? g_s : g_r, g_out);
        if (*conv) return cmd_conv(c_in, c_w, c_out, c_tile, c_domain);
        if (*gc) return cmd_grad_check(gc_seed, gc_shape, gc_tile, gc_k, gc_tol);
        if (*tr) return cmd_train(tr_cfg, tr_out);
        if (*pr) return cmd_prune(pr_cfg, pr_in, pr_out);
        if (*ft) return cmd_finetune(ft_cfg, ft_in, ft_out);
        if (*rp) return cmd_report(rp_cfg, rp_in);
        if (*ib)
            return cmd_infer_bench(ib_batch, ib_layers, ib_sweep, ib_prec, ib_workers, ib_csv,
                                   ib_seed);
        if (*pm) return cmd_perf_model(pm_layers, pm_alpha, pm_grid, pm_csv, pm_balance);
        return kExitValidation;
    } catch (const CLI::ParseError& e) {
        // usage text on the error stream; any parse failure is a validation
        // error (help exits 0)
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitValidation;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const train::TrainingError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}
