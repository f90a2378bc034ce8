#pragma once

#include "diffcast/dataset.hpp"
#include "diffcast/diffusion_forecast.hpp"
#include "diffcast/simulators.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace diffcast {

/// x' ~ linear * x + offset.
struct AffineModel {
    Matrix linear;
    Vector offset;
    double fit_residual = 0.0;  // RMS residual over the neighbors
    bool degenerate = false;    // design matrix rank deficient; minimum-norm solution used
};

struct GaussianState {
    Vector mean;
    Matrix cov;
};

/// Least-squares affine fit of x_{i+lead} against x_i over the k nearest
/// neighbors of `query` among rows i <= N - 1 - lead.
AffineModel fit_local_affine(const Matrix& train, const Vector& query, int lead_steps, int k = 15);

GaussianState local_linear_forecast(const TimeSeries& train, const GaussianState& init, int lead_steps, int k = 15);
GaussianState iterated_local_linear_forecast(const TimeSeries& train, const GaussianState& init, int lead_steps,
                                             int k = 15);

/// States for leads 0..max_lead; entry n equals the single-lead call with lead n.
std::vector<GaussianState> local_linear_path(const TimeSeries& train, const GaussianState& init, int max_lead,
                                             int k = 15);
std::vector<GaussianState> iterated_local_linear_path(const TimeSeries& train, const GaussianState& init,
                                                      int max_lead, int k = 15);

using Observation = std::function<Vector(const Vector&)>;

/// n_ens members drawn from init, member m using noise stream m. Moments are of
/// observe(state) (identity when empty) at leads 0..n_leads sampling intervals.
/// Variances use the 1/(n_ens - 1) convention.
MomentForecast ensemble_forecast(const SDEModel& model, const GaussianState& init, Eigen::Index n_ens,
                                 double dt_sample, int substeps, int n_leads, std::uint64_t seed,
                                 const Observation& observe = {});
MomentForecast ensemble_forecast(const ODEModel& model, const GaussianState& init, Eigen::Index n_ens,
                                 double dt_sample, int n_leads, std::uint64_t seed, const Observation& observe = {},
                                 double max_step = 0.01);

/// Draws from N(mean, cov) using a symmetric square root (cov may be singular).
class GaussianSampler {
public:
    explicit GaussianSampler(const GaussianState& state);
    Vector draw(NormalSampler& noise) const;

private:
    Vector mean_;
    Matrix root_;
};

}  // namespace diffcast
