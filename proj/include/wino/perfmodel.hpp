#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wino/tensor.hpp"

namespace wino {
namespace perf {

// Square-image layer dimensions (Hi = Wi = Ho = Wo = H, r = s).
struct LayerDims {
    std::string name;
    std::uint64_t c = 0;  // input channels
    std::uint64_t k = 0;  // output channels
    std::uint64_t h = 0;  // spatial extent
    std::uint64_t r = 0;  // kernel extent
    std::uint64_t m = 0;  // tile extent

    std::uint64_t p() const { return r + m - 1; }
    std::uint64_t tiles() const { return (h + m - 1) / m; }  // ceil(H/m)
};

struct CostParams {
    double alpha = 1.0;  // sparse-computation overhead, >= 1
    double x = 1.0;      // non-zero density in [0,1]
};

// F = 2 C K H^2 r^2
double flops_baseline(const LayerDims& d);
// F = 2 alpha x C K H^2 r^2
double flops_sparse(const LayerDims& d, const CostParams& cp);
// F = 2 (2Cp^2 + CKp + Km(m+p)) p ceil(H/m)^2
double flops_winograd(const LayerDims& d);
// element-wise term scaled by alpha*x, transforms unchanged
double flops_sparse_winograd(const LayerDims& d, const CostParams& cp);

// density below which sparse Winograd beats dense Winograd; exactly 1/alpha
double crossover_density(double alpha);

struct SpeedupRow {
    std::string layer;
    double x;
    double speedup_sparse;           // F_baseline / F_sparse
    double speedup_winograd;         // F_baseline / F_winograd
    double speedup_sparse_winograd;  // F_baseline / F_sparse_winograd
    // set when a machine balance (FLOP/Byte) is supplied
    bool bound_annotated = false;
    bool sparse_winograd_compute_bound = true;
};

std::vector<SpeedupRow> speedup_table(const std::vector<LayerDims>& layers,
                                      const std::vector<double>& x_grid, double alpha,
                                      double machine_balance = 0.0);

}  // namespace perf
}  // namespace wino
