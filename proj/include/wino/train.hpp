#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wino/layer.hpp"
#include "wino/tensor.hpp"
#include "wino/transforms.hpp"

namespace wino {
namespace train {

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvariantError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PruneConfig {
    double eps = 1e-4;         // threshold scale
    double beta = 0.1;         // gradient floor
    double base_lr = 0.05;
    double lr_decay = 0.0;     // eta_k = base_lr / (1 + lr_decay * k)
    double wino_lr_mult = 1.0; // multiplier on the base rate for Winograd layers
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
};

enum class Domain { spatial, winograd };

// A 3x3 convolution layer followed by ReLU. In the Winograd domain the
// independent parameters are the K x C x p x q tensor itself.
struct ConvLayer {
    std::string name;
    Domain domain = Domain::spatial;
    std::size_t in_c = 0, out_c = 0;
    Tensor w;            // K x C x 3 x 3 (spatial) or K x C x p x q (winograd)
    TransformSet tset;   // used when domain == winograd, and for lifting
    double lambda = 0.0; // regularization factor
    int norm = 1;        // 1 or 2
    Tensor mask;         // 1 = frozen zero; empty when no mask is set
};

// Final fully connected layer producing class logits.
struct DenseLayer {
    Tensor w;  // classes x features
    std::vector<double> bias;
    double lambda = 0.0;
    int norm = 2;
};

struct Network {
    std::size_t in_c = 0, in_h = 0, in_w = 0;
    std::size_t n_classes = 0;
    std::vector<ConvLayer> convs;
    DenseLayer dense;
};

struct Dataset {
    Tensor images;  // N x C x H x W
    std::vector<int> labels;

    std::size_t size() const { return labels.size(); }
};

// Deterministic class-conditional 12x12 patterns (bars, diagonal stripe,
// blob), 4 classes, labels balanced within one sample.
Dataset synth_dataset(std::uint64_t seed, std::size_t n_samples, std::size_t channels = 2);

// 2 conv layers (He-style init, lifted when domain is winograd) + 1 dense.
Network make_toy_network(std::uint64_t seed, Domain domain, std::size_t in_c = 2,
                         std::size_t hidden1 = 6, std::size_t hidden2 = 8,
                         std::size_t in_h = 12, std::size_t in_w = 12,
                         std::size_t n_classes = 4);

// Per-sample evaluation.
std::vector<double> forward_logits(const Network& net, const Tensor& image);
double accuracy(const Network& net, const Dataset& data);
double mean_loss(const Network& net, const Dataset& data);

// Loss gradients (no regularization term) averaged over the minibatch.
struct Grads {
    std::vector<Tensor> conv_w;
    Tensor dense_w;
    std::vector<double> dense_b;
    double loss = 0.0;
};
Grads minibatch_grad(const Network& net, const Dataset& data,
                     const std::vector<std::size_t>& indices);

// E = L + sum_l lambda_l ||w_l||_{p_l}
double energy(const Network& net, double loss);

// 0 if |w| (|g| + beta) < eps, else w
double threshold_value(double w, double g, double eps, double beta);

enum class StepMode {
    plain,      // SGD on E, no thresholding (L1 subgradient 0 at 0)
    prune,      // SGD on E followed by gradient-based thresholding
    finetune,   // SGD with L2 penalty; masked coordinates stay exactly 0
};

// One SGD step on the given minibatch; returns the minibatch loss.
// Thresholding in prune mode applies only to layers with lambda > 0.
double train_step(Network& net, const Dataset& data, const std::vector<std::size_t>& indices,
                  const PruneConfig& cfg, double lr, StepMode mode,
                  double spatial_lift_lambda = 0.0);

// Runs epochs of seeded minibatch SGD; stream names the RNG stream.
double run_epochs(Network& net, const Dataset& data, const PruneConfig& cfg,
                  std::size_t epochs, StepMode mode, const std::string& stream,
                  double spatial_lift_lambda = 0.0);

// Freezes the current zeros of every Winograd conv layer with lambda > 0.
void set_masks_from_zeros(Network& net);
void check_masks(const Network& net);  // throws InvariantError on violation

// Converts every spatial conv layer to a Winograd layer by lifting.
Network lift_network(const Network& spatial);

// Frobenius-norm least-squares projection back to the spatial domain:
// W = (G1^T G1)^-1 G1^T W_F G2 (G2^T G2)^-1 per (k,c).
Tensor method_b_project(const Tensor& w_f_hat, const TransformSet& tset);

// Keep the largest-magnitude fraction `target_density` per layer, zero the rest.
void magnitude_threshold_to_density(Tensor& w, double target_density);

struct LayerReport {
    std::string layer;
    std::string domain;
    double density;  // nnz / total, exact-zero counting
};
std::vector<LayerReport> sparsity_report(const Network& net);

struct PhaseResult {
    double accuracy = 0.0;
    double density = 0.0;  // aggregate over Winograd conv layers
};

// Method A: prune (L1 + gradient thresholding) then mask-fixed fine-tune.
PhaseResult method_a_prune_finetune(Network& net, const Dataset& train_set,
                                    const Dataset& test_set, const PruneConfig& cfg,
                                    std::size_t prune_epochs, std::size_t finetune_epochs);

// Method B baseline: spatial training with periodic lift-threshold-project
// cycles; the returned network is the final thresholded Winograd model.
PhaseResult method_b_prune(const Network& spatial_net, const Dataset& train_set,
                           const Dataset& test_set, const PruneConfig& cfg,
                           std::size_t epochs, double target_density, Network* out_net = nullptr);

// RNG stream splitting: one master seed, independent named streams.
std::uint64_t stream_seed(std::uint64_t seed, const std::string& name);

}  // namespace train
}  // namespace wino
