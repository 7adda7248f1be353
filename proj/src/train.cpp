#include "wino/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wino/reference.hpp"

namespace wino {
namespace train {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Tensor sample_image(const Dataset& data, std::size_t i) {
    const std::size_t c = data.images.extent(1), h = data.images.extent(2),
                      w = data.images.extent(3);
    const std::size_t n = c * h * w;
    std::vector<double> buf(data.images.data().begin() + i * n,
                            data.images.data().begin() + (i + 1) * n);
    return Tensor({c, h, w}, std::move(buf));
}

struct SampleCtx {
    std::vector<Tensor> conv_in;       // input of each conv layer
    std::vector<Tensor> conv_out;      // post-ReLU output
    std::vector<Tensor> relu_mask;     // 1 where pre-activation > 0
    std::vector<ForwardCache> caches;  // winograd layers only (empty otherwise)
    std::vector<double> features;      // dense input
    std::vector<double> logits;
};

std::vector<double> softmax(const std::vector<double>& logits) {
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) sum += (p[i] = std::exp(logits[i] - mx));
    for (double& v : p) v /= sum;
    return p;
}

Tensor conv_forward(const ConvLayer& layer, const Tensor& in, ForwardCache* cache) {
    if (layer.domain == Domain::winograd) {
        TileGeometry geom = make_geometry(layer.in_c, in.extent(1), in.extent(2), layer.tset);
        return winograd_forward(in, layer.w, layer.tset, geom, cache);
    }
    return direct_conv(in, layer.w);
}

void run_forward(const Network& net, const Tensor& image, SampleCtx& ctx) {
    ctx.conv_in.clear();
    ctx.conv_out.clear();
    ctx.relu_mask.clear();
    ctx.caches.assign(net.convs.size(), ForwardCache{});

    Tensor cur = image;
    for (std::size_t l = 0; l < net.convs.size(); ++l) {
        ctx.conv_in.push_back(cur);
        Tensor out = conv_forward(net.convs[l], cur, &ctx.caches[l]);
        Tensor mask(out.shape());
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] > 0.0) {
                mask[i] = 1.0;
            } else {
                out[i] = 0.0;
            }
        }
        ctx.relu_mask.push_back(std::move(mask));
        ctx.conv_out.push_back(out);
        cur = ctx.conv_out.back();
    }

    ctx.features = cur.data();
    const std::size_t nf = ctx.features.size();
    if (net.dense.w.extent(1) != nf)
        throw ShapeError("dense layer expects " + std::to_string(net.dense.w.extent(1)) +
                         " features, got " + std::to_string(nf));
    ctx.logits.assign(net.n_classes, 0.0);
    for (std::size_t k = 0; k < net.n_classes; ++k) {
        double acc = net.dense.bias[k];
        for (std::size_t f = 0; f < nf; ++f) acc += net.dense.w(k, f) * ctx.features[f];
        ctx.logits[k] = acc;
    }
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, const std::string& name) {
    return splitmix64(seed ^ fnv1a(name));
}

double threshold_value(double w, double g, double eps, double beta) {
    return (std::abs(w) * (std::abs(g) + beta) < eps) ? 0.0 : w;
}

std::vector<double> forward_logits(const Network& net, const Tensor& image) {
    SampleCtx ctx;
    run_forward(net, image, ctx);
    return ctx.logits;
}

double accuracy(const Network& net, const Dataset& data) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto logits = forward_logits(net, sample_image(data, i));
        const auto arg =
            std::distance(logits.begin(), std::max_element(logits.begin(), logits.end()));
        if (arg == data.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
}

double mean_loss(const Network& net, const Dataset& data) {
    double total = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto p = softmax(forward_logits(net, sample_image(data, i)));
        total += -std::log(std::max(p[static_cast<std::size_t>(data.labels[i])], 1e-300));
    }
    return total / static_cast<double>(data.size());
}

double energy(const Network& net, double loss) {
    if (!std::isfinite(loss)) throw TrainingError("energy: non-finite loss");
    double e = loss;
    auto add_norm = [&e](const Tensor& w, double lambda, int norm) {
        if (lambda == 0.0) return;
        if (norm == 1) {
            double s = 0.0;
            for (double v : w.data()) s += std::abs(v);
            e += lambda * s;
        } else {
            double s = 0.0;
            for (double v : w.data()) s += v * v;
            e += lambda * std::sqrt(s);
        }
    };
    for (const auto& conv : net.convs) add_norm(conv.w, conv.lambda, conv.norm);
    add_norm(net.dense.w, net.dense.lambda, net.dense.norm);
    return e;
}

Grads minibatch_grad(const Network& net, const Dataset& data,
                     const std::vector<std::size_t>& indices) {
    Grads grads;
    for (const auto& conv : net.convs) grads.conv_w.emplace_back(conv.w.shape());
    grads.dense_w = Tensor(net.dense.w.shape());
    grads.dense_b.assign(net.n_classes, 0.0);

    SampleCtx ctx;
    const double inv_b = 1.0 / static_cast<double>(indices.size());
    for (std::size_t si : indices) {
        Tensor image = sample_image(data, si);
        run_forward(net, image, ctx);

        auto p = softmax(ctx.logits);
        const std::size_t label = static_cast<std::size_t>(data.labels[si]);
        grads.loss += -std::log(std::max(p[label], 1e-300)) * inv_b;

        std::vector<double> dlogits = p;
        dlogits[label] -= 1.0;

        // dense layer
        const std::size_t nf = ctx.features.size();
        std::vector<double> dfeat(nf, 0.0);
        for (std::size_t k = 0; k < net.n_classes; ++k) {
            grads.dense_b[k] += dlogits[k] * inv_b;
            for (std::size_t f = 0; f < nf; ++f) {
                grads.dense_w(k, f) += dlogits[k] * ctx.features[f] * inv_b;
                dfeat[f] += net.dense.w(k, f) * dlogits[k];
            }
        }

        // conv chain, last to first
        Tensor dout(ctx.conv_out.back().shape(), std::move(dfeat));
        for (std::size_t l = net.convs.size(); l-- > 0;) {
            const ConvLayer& conv = net.convs[l];
            for (std::size_t i = 0; i < dout.size(); ++i) dout[i] *= ctx.relu_mask[l][i];

            Tensor din;
            if (conv.domain == Domain::winograd) {
                TileGeometry geom = make_geometry(conv.in_c, ctx.conv_in[l].extent(1),
                                                  ctx.conv_in[l].extent(2), conv.tset);
                Tensor gw = winograd_backward_weights(dout, ctx.caches[l], conv.tset, geom);
                for (std::size_t i = 0; i < gw.size(); ++i) grads.conv_w[l][i] += gw[i] * inv_b;
                if (l > 0)
                    din = winograd_backward_input(ctx.caches[l], conv.w, conv.tset, geom);
            } else {
                Tensor gw = direct_conv_grad_weights(dout, ctx.conv_in[l], conv.out_c, 3, 3);
                for (std::size_t i = 0; i < gw.size(); ++i) grads.conv_w[l][i] += gw[i] * inv_b;
                if (l > 0)
                    din = direct_conv_grad_input(dout, conv.w, ctx.conv_in[l].extent(1),
                                                 ctx.conv_in[l].extent(2));
            }
            if (l > 0) dout = std::move(din);
        }
    }
    return grads;
}

namespace {

// subgradient of lambda ||w||_p, taken as 0 at w = 0 (and at ||w|| = 0)
double reg_grad(double v, double lambda, int norm, double l2norm) {
    if (lambda == 0.0) return 0.0;
    if (norm == 1) return v > 0.0 ? lambda : (v < 0.0 ? -lambda : 0.0);
    return l2norm > 0.0 ? lambda * v / l2norm : 0.0;
}

double l2_norm(const Tensor& w) {
    double s = 0.0;
    for (double v : w.data()) s += v * v;
    return std::sqrt(s);
}

// pullback of the on-the-fly lift penalty lambda ||G1 w G2^T||_1 through
// the lift: G1^T sign(G1 w G2^T) G2, per kernel
void add_lift_penalty_grad(Tensor& grad, const Tensor& w, const TransformSet& tset,
                           double lambda) {
    const std::size_t k_n = w.extent(0), c_n = w.extent(1);
    const Matrix g2t = transpose(tset.g2);
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t c = 0; c < c_n; ++c) {
            Matrix kernel(tset.r, tset.s);
            for (std::size_t u = 0; u < tset.r; ++u)
                for (std::size_t v = 0; v < tset.s; ++v) kernel(u, v) = w(k, c, u, v);
            Matrix lifted = mat_mul(mat_mul(tset.g1, kernel), g2t);
            Matrix sgn(tset.p, tset.q);
            for (std::size_t i = 0; i < sgn.entries().size(); ++i) {
                const double v = lifted.entries()[i];
                sgn.entries()[i] = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
            }
            Matrix pb = mat_mul(mat_mul(transpose(tset.g1), sgn), tset.g2);
            for (std::size_t u = 0; u < tset.r; ++u)
                for (std::size_t v = 0; v < tset.s; ++v)
                    grad(k, c, u, v) += lambda * pb(u, v);
        }
}

}  // namespace

double train_step(Network& net, const Dataset& data, const std::vector<std::size_t>& indices,
                  const PruneConfig& cfg, double lr, StepMode mode,
                  double spatial_lift_lambda) {
    Grads grads = minibatch_grad(net, data, indices);
    if (!std::isfinite(grads.loss)) throw TrainingError("train_step: non-finite loss");

    for (std::size_t l = 0; l < net.convs.size(); ++l) {
        ConvLayer& conv = net.convs[l];
        Tensor& g = grads.conv_w[l];
        const double layer_lr =
            conv.domain == Domain::winograd ? lr * cfg.wino_lr_mult : lr;

        // effective norm during fine-tuning is L2 regardless of the layer's
        // pruning norm
        const int norm = mode == StepMode::finetune ? 2 : conv.norm;
        const double ln = norm == 2 ? l2_norm(conv.w) : 0.0;

        Tensor total_g = g;
        for (std::size_t i = 0; i < conv.w.size(); ++i)
            total_g[i] += reg_grad(conv.w[i], conv.lambda, norm, ln);
        if (mode != StepMode::finetune && conv.domain == Domain::spatial &&
            spatial_lift_lambda > 0.0)
            add_lift_penalty_grad(total_g, conv.w, conv.tset, spatial_lift_lambda);

        const bool masked = mode == StepMode::finetune && conv.mask.size() == conv.w.size();
        for (std::size_t i = 0; i < conv.w.size(); ++i) {
            if (masked && conv.mask[i] != 0.0) continue;  // frozen zero
            double v = conv.w[i] - layer_lr * total_g[i];
            if (mode == StepMode::prune && conv.lambda > 0.0)
                v = threshold_value(v, g[i], cfg.eps, cfg.beta);
            if (!std::isfinite(v)) throw TrainingError("train_step: divergence in " + conv.name);
            conv.w[i] = v;
        }
    }

    {
        const double ln = net.dense.norm == 2 ? l2_norm(net.dense.w) : 0.0;
        for (std::size_t i = 0; i < net.dense.w.size(); ++i) {
            const double v = net.dense.w[i] -
                             lr * (grads.dense_w[i] +
                                   reg_grad(net.dense.w[i], net.dense.lambda, net.dense.norm, ln));
            if (!std::isfinite(v)) throw TrainingError("train_step: divergence in dense layer");
            net.dense.w[i] = v;
        }
        for (std::size_t k = 0; k < net.n_classes; ++k)
            net.dense.bias[k] -= lr * grads.dense_b[k];
    }

    if (mode == StepMode::finetune) check_masks(net);
    return grads.loss;
}

double run_epochs(Network& net, const Dataset& data, const PruneConfig& cfg,
                  std::size_t epochs, StepMode mode, const std::string& stream,
                  double spatial_lift_lambda) {
    std::mt19937_64 rng(stream_seed(cfg.seed, stream));
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    double last_loss = 0.0;
    std::size_t step = 0;
    for (std::size_t e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t b = 0; b + cfg.batch_size <= order.size(); b += cfg.batch_size) {
            std::vector<std::size_t> batch(order.begin() + b,
                                           order.begin() + b + cfg.batch_size);
            const double lr = cfg.base_lr / (1.0 + cfg.lr_decay * static_cast<double>(step));
            last_loss = train_step(net, data, batch, cfg, lr, mode, spatial_lift_lambda);
            ++step;
        }
    }
    return last_loss;
}

void set_masks_from_zeros(Network& net) {
    for (auto& conv : net.convs) {
        if (conv.domain != Domain::winograd || conv.lambda == 0.0) continue;
        conv.mask = Tensor(conv.w.shape());
        for (std::size_t i = 0; i < conv.w.size(); ++i)
            conv.mask[i] = conv.w[i] == 0.0 ? 1.0 : 0.0;
    }
}

void check_masks(const Network& net) {
    for (const auto& conv : net.convs) {
        if (conv.mask.size() != conv.w.size()) continue;
        for (std::size_t i = 0; i < conv.w.size(); ++i)
            if (conv.mask[i] != 0.0 && conv.w[i] != 0.0)
                throw InvariantError("mask violation in layer " + conv.name);
    }
}

Network lift_network(const Network& spatial) {
    Network lifted = spatial;
    for (auto& conv : lifted.convs) {
        if (conv.domain != Domain::spatial) continue;
        conv.w = lift_spatial_weights(conv.w, conv.tset);
        conv.domain = Domain::winograd;
    }
    return lifted;
}

namespace {

// Gauss-Jordan inverse for the tiny normal-equation matrices.
Matrix invert(Matrix a) {
    const std::size_t n = a.rows();
    Matrix inv = identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-12)
            throw NumericError("method_b_project: rank-deficient transform");
        if (piv != col)
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(piv, c), a(col, c));
                std::swap(inv(piv, c), inv(col, c));
            }
        const double d = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= f * a(col, c);
                inv(r, c) -= f * inv(col, c);
            }
        }
    }
    return inv;
}

}  // namespace

Tensor method_b_project(const Tensor& w_f_hat, const TransformSet& tset) {
    if (w_f_hat.rank() != 4 || w_f_hat.extent(2) != tset.p || w_f_hat.extent(3) != tset.q)
        throw ShapeError("method_b_project: weights " + shape_str(w_f_hat.shape()) +
                         " inconsistent with transform set");
    const std::size_t k_n = w_f_hat.extent(0), c_n = w_f_hat.extent(1);
    const Matrix g1t = transpose(tset.g1);
    const Matrix g2t = transpose(tset.g2);
    const Matrix left = mat_mul(invert(mat_mul(g1t, tset.g1)), g1t);       // r x p
    const Matrix right = mat_mul(tset.g2, invert(mat_mul(g2t, tset.g2)));  // q x s

    Tensor w({k_n, c_n, tset.r, tset.s});
    for (std::size_t k = 0; k < k_n; ++k)
        for (std::size_t c = 0; c < c_n; ++c) {
            Matrix wf(tset.p, tset.q);
            for (std::size_t i = 0; i < tset.p; ++i)
                for (std::size_t j = 0; j < tset.q; ++j) wf(i, j) = w_f_hat(k, c, i, j);
            Matrix proj = mat_mul(mat_mul(left, wf), right);
            for (std::size_t u = 0; u < tset.r; ++u)
                for (std::size_t v = 0; v < tset.s; ++v) w(k, c, u, v) = proj(u, v);
        }
    return w;
}

void magnitude_threshold_to_density(Tensor& w, double target_density) {
    const std::size_t keep = static_cast<std::size_t>(
        std::floor(target_density * static_cast<double>(w.size())));
    if (keep >= w.size()) return;
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&w](std::size_t a, std::size_t b) {
        return std::abs(w[a]) > std::abs(w[b]);
    });
    for (std::size_t rank = keep; rank < order.size(); ++rank) w[order[rank]] = 0.0;
}

std::vector<LayerReport> sparsity_report(const Network& net) {
    std::vector<LayerReport> rows;
    for (const auto& conv : net.convs) {
        std::size_t nnz = 0;
        for (double v : conv.w.data())
            if (v != 0.0) ++nnz;
        rows.push_back({conv.name, conv.domain == Domain::winograd ? "winograd" : "spatial",
                        static_cast<double>(nnz) / static_cast<double>(conv.w.size())});
    }
    return rows;
}

namespace {

double winograd_density(const Network& net) {
    std::size_t nnz = 0, total = 0;
    for (const auto& conv : net.convs) {
        if (conv.domain != Domain::winograd) continue;
        total += conv.w.size();
        for (double v : conv.w.data())
            if (v != 0.0) ++nnz;
    }
    return total ? static_cast<double>(nnz) / static_cast<double>(total) : 1.0;
}

}  // namespace

PhaseResult method_a_prune_finetune(Network& net, const Dataset& train_set,
                                    const Dataset& test_set, const PruneConfig& cfg,
                                    std::size_t prune_epochs, std::size_t finetune_epochs) {
    run_epochs(net, train_set, cfg, prune_epochs, StepMode::prune, "prune");
    set_masks_from_zeros(net);
    run_epochs(net, train_set, cfg, finetune_epochs, StepMode::finetune, "finetune");
    return {accuracy(net, test_set), winograd_density(net)};
}

PhaseResult method_b_prune(const Network& spatial_net, const Dataset& train_set,
                           const Dataset& test_set, const PruneConfig& cfg,
                           std::size_t epochs, double target_density, Network* out_net) {
    Network net = spatial_net;
    for (std::size_t e = 0; e < epochs; ++e) {
        PruneConfig ecfg = cfg;
        ecfg.seed = stream_seed(cfg.seed, "method_b/" + std::to_string(e));
        run_epochs(net, train_set, ecfg, 1, StepMode::plain, "epoch");
        // lift - threshold - least-squares project back
        for (auto& conv : net.convs) {
            if (conv.lambda == 0.0) continue;
            Tensor w_f = lift_spatial_weights(conv.w, conv.tset);
            magnitude_threshold_to_density(w_f, target_density);
            conv.w = method_b_project(w_f, conv.tset);
        }
    }
    // final model: thresholded Winograd weights
    Network wino_net = net;
    for (auto& conv : wino_net.convs) {
        conv.w = lift_spatial_weights(conv.w, conv.tset);
        conv.domain = Domain::winograd;
        if (conv.lambda > 0.0) magnitude_threshold_to_density(conv.w, target_density);
    }
    if (out_net) *out_net = wino_net;
    return {accuracy(wino_net, test_set), winograd_density(wino_net)};
}

Dataset synth_dataset(std::uint64_t seed, std::size_t n_samples, std::size_t channels) {
    if (n_samples < 8) throw TrainingError("synth_dataset: need at least 8 samples");
    const std::size_t h = 12, w = 12;
    Dataset data;
    data.images = Tensor({n_samples, channels, h, w});
    data.labels.resize(n_samples);

    std::mt19937_64 rng(stream_seed(seed, "dataset"));
    std::normal_distribution<double> noise(0.0, 0.25);
    std::uniform_int_distribution<int> pos(2, 9);

    for (std::size_t s = 0; s < n_samples; ++s) {
        const int label = static_cast<int>(s % 4);  // balanced within +-1
        data.labels[s] = label;
        Tensor pattern({h, w});
        const int at = pos(rng);
        switch (label) {
            case 0:  // horizontal bar
                for (std::size_t j = 0; j < w; ++j) {
                    pattern(static_cast<std::size_t>(at), j) = 1.0;
                    pattern(static_cast<std::size_t>(at) + 1, j) = 1.0;
                }
                break;
            case 1:  // vertical bar
                for (std::size_t i = 0; i < h; ++i) {
                    pattern(i, static_cast<std::size_t>(at)) = 1.0;
                    pattern(i, static_cast<std::size_t>(at) + 1) = 1.0;
                }
                break;
            case 2: {  // diagonal stripe with random offset
                const int off = at - 5;
                for (int i = 0; i < static_cast<int>(h); ++i) {
                    const int j = i + off;
                    if (j >= 0 && j < static_cast<int>(w)) pattern(i, j) = 1.0;
                    if (j + 1 >= 0 && j + 1 < static_cast<int>(w)) pattern(i, j + 1) = 1.0;
                }
                break;
            }
            default: {  // centered blob
                const double cy = at, cx = pos(rng);
                for (std::size_t i = 0; i < h; ++i)
                    for (std::size_t j = 0; j < w; ++j) {
                        const double d2 = (i - cy) * (i - cy) + (j - cx) * (j - cx);
                        pattern(i, j) = std::exp(-d2 / 4.0);
                    }
                break;
            }
        }
        for (std::size_t c = 0; c < channels; ++c) {
            const double scale = 1.0 / static_cast<double>(c + 1);
            for (std::size_t i = 0; i < h; ++i)
                for (std::size_t j = 0; j < w; ++j)
                    data.images(s, c, i, j) = scale * pattern(i, j) + noise(rng);
        }
    }
    return data;
}

Network make_toy_network(std::uint64_t seed, Domain domain, std::size_t in_c,
                         std::size_t hidden1, std::size_t hidden2, std::size_t in_h,
                         std::size_t in_w, std::size_t n_classes) {
    Network net;
    net.in_c = in_c;
    net.in_h = in_h;
    net.in_w = in_w;
    net.n_classes = n_classes;

    const TransformSet tset = f2x2_3x3_transforms();
    auto make_conv = [&](const std::string& name, std::size_t c, std::size_t k) {
        ConvLayer conv;
        conv.name = name;
        conv.in_c = c;
        conv.out_c = k;
        conv.tset = tset;
        conv.domain = Domain::spatial;
        conv.lambda = 0.0;
        conv.norm = 1;
        conv.w = Tensor({k, c, 3, 3});
        std::mt19937_64 rng(stream_seed(seed, "init/" + name));
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (c * 9.0)));
        for (double& v : conv.w.data()) v = dist(rng);
        if (domain == Domain::winograd) {
            conv.w = lift_spatial_weights(conv.w, tset);
            conv.domain = Domain::winograd;
        }
        return conv;
    };
    net.convs.push_back(make_conv("conv1", in_c, hidden1));
    net.convs.push_back(make_conv("conv2", hidden1, hidden2));

    const std::size_t h2 = in_h - 4, w2 = in_w - 4;  // two valid 3x3 convs
    const std::size_t features = hidden2 * h2 * w2;
    net.dense.w = Tensor({n_classes, features});
    net.dense.bias.assign(n_classes, 0.0);
    std::mt19937_64 rng(stream_seed(seed, "init/dense"));
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(features)));
    for (double& v : net.dense.w.data()) v = dist(rng);
    return net;
}

}  // namespace train
}  // namespace wino
