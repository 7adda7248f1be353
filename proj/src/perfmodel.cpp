#include "wino/perfmodel.hpp"

namespace wino {
namespace perf {

double flops_baseline(const LayerDims& d) {
    return 2.0 * static_cast<double>(d.c) * static_cast<double>(d.k) *
           static_cast<double>(d.h * d.h) * static_cast<double>(d.r * d.r);
}

double flops_sparse(const LayerDims& d, const CostParams& cp) {
    return (cp.alpha * cp.x) * flops_baseline(d);
}

double flops_winograd(const LayerDims& d) {
    const double p = static_cast<double>(d.p());
    const double tiles2 = static_cast<double>(d.tiles() * d.tiles());
    const double c = static_cast<double>(d.c), k = static_cast<double>(d.k),
                 m = static_cast<double>(d.m);
    return 2.0 * (2.0 * c * p * p + c * k * p + k * m * (m + p)) * p * tiles2;
}

double flops_sparse_winograd(const LayerDims& d, const CostParams& cp) {
    const double p = static_cast<double>(d.p());
    const double tiles2 = static_cast<double>(d.tiles() * d.tiles());
    const double c = static_cast<double>(d.c), k = static_cast<double>(d.k),
                 m = static_cast<double>(d.m);
    const double ax = cp.alpha * cp.x;
    return 2.0 * (2.0 * c * p * p + ax * (c * k * p) + k * m * (m + p)) * p * tiles2;
}

double crossover_density(double alpha) {
    return 1.0 / alpha;
}

namespace {

// weights-only traffic model: 4 bytes per stored weight, CSR costed at
// 1.5x for index overhead
double sparse_winograd_bytes(const LayerDims& d, double x) {
    const double params = static_cast<double>(d.k * d.c) * static_cast<double>(d.p() * d.p());
    return 1.5 * 4.0 * x * params;
}

}  // namespace

std::vector<SpeedupRow> speedup_table(const std::vector<LayerDims>& layers,
                                      const std::vector<double>& x_grid, double alpha,
                                      double machine_balance) {
    std::vector<SpeedupRow> rows;
    for (const auto& d : layers) {
        const double base = flops_baseline(d);
        for (double x : x_grid) {
            CostParams cp{alpha, x};
            SpeedupRow row;
            row.layer = d.name;
            row.x = x;
            row.speedup_sparse = base / flops_sparse(d, cp);
            row.speedup_winograd = base / flops_winograd(d);
            row.speedup_sparse_winograd = base / flops_sparse_winograd(d, cp);
            if (machine_balance > 0.0) {
                row.bound_annotated = true;
                const double flop_per_byte =
                    flops_sparse_winograd(d, cp) / sparse_winograd_bytes(d, x);
                row.sparse_winograd_compute_bound = flop_per_byte >= machine_balance;
            }
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace perf
}  // namespace wino
