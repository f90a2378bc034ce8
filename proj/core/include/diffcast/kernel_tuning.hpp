#pragma once

#include "diffcast/dataset.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace diffcast {

struct BandwidthProfile {
    Vector rho0;  // per-point ad-hoc bandwidth, ambient distance units
    int k0 = 8;
};

struct TuningResult {
    double eps_star = 0.0;
    double d_est = 0.0;
    double max_slope = 0.0;
    std::vector<std::pair<double, double>> curve;  // (log eps, log T(eps))
    bool boundary_warning = false;                 // argmax sat on the first or last grid interval
};

struct DensityEstimate {
    Vector q;  // density w.r.t. the volume form inherited from the ambient space
    double eps_used = 0.0;
    double d_used = 0.0;
};

/// Kernel values below this are stored and summed as exact zeros.
inline constexpr double kKernelFloor = 1e-15;

/// rho0(x_i) = sqrt(mean_{j=2..k0} |x_i - x_I(i,j)|^2), neighbors excluding self.
/// Throws if some rho0 is zero (duplicated points).
BandwidthProfile adhoc_bandwidth(const NeighborList& nn, int k0 = 8);
BandwidthProfile adhoc_bandwidth(const TimeSeries& ts, int k0 = 8);

/// eps = 2^l for l = -30, -29.9, ..., 10.
std::vector<double> default_grid();

/// Picks eps at the maximum of the (3-point smoothed) forward-difference slope
/// of log T against log eps; d_est = 2 * max slope.
TuningResult tune(const std::function<double(double)>& kernel_sum, const std::vector<double>& grid);

/// Evaluates T(eps) = (1/N^2) * sum exp(-s / eps) over a fixed set of kernel
/// exponents s = |x - y|^2 / h(x, y). The exponents are sorted once so each
/// evaluation only touches entries above the kernel floor.
class KernelSum {
public:
    KernelSum(const RowMatrix& exponents, Eigen::Index n_points);
    double operator()(double eps) const;

private:
    std::vector<double> sorted_;
    double n_points_;
};

/// s_ij = |x_i - x_j|^2 / (2 rho0_i rho0_j) over the neighbor table (row i, column j).
RowMatrix kde_exponents(const NeighborList& nn, const BandwidthProfile& profile);

/// s_ij = |x_i - x_j|^2 / (4 (q_i q_j)^beta) over the neighbor table.
RowMatrix vb_exponents(const NeighborList& nn, const Vector& q, double beta);

/// q(x_i) = sum_j exp(-s_ij / eps) / (N (2 pi eps rho0_i^2)^{d/2}) over the neighbor table.
DensityEstimate kde(const NeighborList& nn, const BandwidthProfile& profile, double eps, double d);

/// All-pairs version of the same estimate.
DensityEstimate kde(const TimeSeries& ts, const BandwidthProfile& profile, double eps, double d);

/// Writes "log_eps,log_T" rows.
void save_tuning_curve(const TuningResult& result, const std::filesystem::path& path);

}  // namespace diffcast
