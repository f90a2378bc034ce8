#pragma once

#include "diffcast/diffusion_basis.hpp"

#include <vector>

namespace diffcast {

/// A(l, j) = (1 / n_pairs) * sum_i phi_j(x_i) phi_l(x_{i+1}).
struct ShiftOperator {
    Matrix A;
    double tau = 1.0;
    Eigen::Index n_pairs = 0;
};

/// Coefficients of p = peq * sum_j c_j phi_j at time t.
struct DensityCoefficients {
    Vector c;
    double t = 0.0;
};

struct MomentForecast {
    std::vector<double> lead_times;
    std::vector<Vector> mean;      // per lead, per coordinate
    std::vector<Vector> variance;  // per lead, per coordinate, clamped at 0
    Eigen::Index clamped = 0;      // number of variance entries raised to 0
};

/// Uses the pairs (x_i, x_{i+1}) for i = 0, stride, 2 * stride, ...
/// Rows of basis.phi must be in time order.
ShiftOperator estimate_shift_operator(const DiffusionBasis& basis, double tau, Eigen::Index stride = 1);

/// Scales A by 1 / sigma_max when sigma_max > 1 + 1e-6. Returns whether it did.
bool apply_spectral_clamp(ShiftOperator& op);

/// (1/N) sum_i p0(x_i) phi_j(x_i) / peq(x_i), without mass normalization.
Vector project_density_raw(const Vector& p0_values, const DiffusionBasis& basis);

/// Projection rescaled so c_0 = 1. Any positive multiple of the density gives the same result.
DensityCoefficients project_density(const Vector& p0_values, const DiffusionBasis& basis);

struct StepDiagnostics {
    double max_mass_drift = 0.0;  // max |c_0 - 1| before re-pinning
};

/// n_steps products c <- A c, rescaling to c_0 = 1 after each one.
DensityCoefficients step(const DensityCoefficients& c, const ShiftOperator& op, int n_steps,
                         StepDiagnostics* diagnostics = nullptr);

/// p(x_i) = peq(x_i) * sum_l phi_l(x_i) c_l; may be slightly negative.
Vector reconstruct_density(const DensityCoefficients& c, const DiffusionBasis& basis);

/// Negative values set to 0 and the result rescaled to unit mass under the
/// sampling measure, for export only.
Vector display_density(const Vector& p, const DiffusionBasis& basis);

/// E_p[g] = sum_l c_l * ghat_l with ghat_l = (1/N) sum_i g(x_i) phi_l(x_i),
/// one entry per column of observables.
Vector forecast_moments(const DensityCoefficients& c, const DiffusionBasis& basis, const Matrix& observables);

/// Precomputed projections of coordinates and their squares.
class MomentProjector {
public:
    MomentProjector(const DiffusionBasis& basis, const Matrix& coordinates);

    /// Mean and variance (clamped at 0); increments *clamped per clamped entry.
    void moments(const DensityCoefficients& c, Vector& mean, Vector& variance, Eigen::Index* clamped = nullptr) const;

    /// Mean and variance under peq.
    void climatology(Vector& mean, Vector& variance) const;

    const Matrix& first() const { return first_; }
    const Matrix& second() const { return second_; }

private:
    Matrix first_;   // M x n
    Matrix second_;  // M x n
};

/// Moments at leads 0, 1, ..., n_leads steps of op.tau.
MomentForecast forecast(const DensityCoefficients& c0, const ShiftOperator& op, const MomentProjector& projector,
                        int n_leads);

/// Batched projection: column b of p0_values is one initial density.
/// Returns M x B coefficients, each column rescaled so its entry 0 is 1.
Matrix project_densities(const Matrix& p0_values, const DiffusionBasis& basis);

struct BatchMoments {
    std::vector<Matrix> mean;      // per lead: B x n
    std::vector<Matrix> variance;  // per lead: B x n, clamped at 0
    Eigen::Index clamped = 0;
};

/// Column-wise equivalent of forecast() for leads 0..n_leads.
BatchMoments forecast_batch(const Matrix& coefficients, const ShiftOperator& op, const MomentProjector& projector,
                            int n_leads);

/// exp(log N(x; mean, diag(variance)) - max over rows): a positively scaled
/// Gaussian density that cannot underflow everywhere.
Vector gaussian_values(const Matrix& points, const Vector& mean, const Vector& variance);

}  // namespace diffcast
