#include "diffcast/diffusion_forecast.hpp"

#include "diffcast/log.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace diffcast {

ShiftOperator estimate_shift_operator(const DiffusionBasis& basis, double tau, Eigen::Index stride) {
    const Eigen::Index n = basis.size();
    if (n < 2) throw std::invalid_argument("estimate_shift_operator: need at least 2 points");
    if (stride < 1) throw std::invalid_argument("estimate_shift_operator: stride must be positive");
    if (!(tau > 0.0)) throw std::invalid_argument("estimate_shift_operator: tau must be positive");
    ShiftOperator op;
    op.tau = tau;
    if (stride == 1) {
        op.n_pairs = n - 1;
        op.A.noalias() = basis.phi.bottomRows(n - 1).transpose() * basis.phi.topRows(n - 1);
    } else {
        op.n_pairs = (n - 2) / stride + 1;
        Matrix cur(op.n_pairs, basis.M()), next(op.n_pairs, basis.M());
        for (Eigen::Index p = 0; p < op.n_pairs; ++p) {
            cur.row(p) = basis.phi.row(p * stride);
            next.row(p) = basis.phi.row(p * stride + 1);
        }
        op.A.noalias() = next.transpose() * cur;
    }
    op.A /= static_cast<double>(op.n_pairs);
    return op;
}

bool apply_spectral_clamp(ShiftOperator& op) {
    const double sigma = Eigen::BDCSVD<Matrix>(op.A).singularValues()(0);
    if (sigma <= 1.0 + 1e-6) return false;
    op.A /= sigma;
    log::info("spectral clamp: scaled A by 1/" + std::to_string(sigma));
    return true;
}

Vector project_density_raw(const Vector& p0_values, const DiffusionBasis& basis) {
    if (p0_values.size() != basis.size()) throw std::invalid_argument("project_density: size mismatch");
    const Vector ratio = p0_values.cwiseQuotient(basis.peq);
    return basis.phi.transpose() * ratio / static_cast<double>(basis.size());
}

DensityCoefficients project_density(const Vector& p0_values, const DiffusionBasis& basis) {
    if ((p0_values.array() < 0.0).any() || !p0_values.allFinite())
        throw std::invalid_argument("project_density: density values must be finite and nonnegative");
    if (!(p0_values.maxCoeff() > 0.0)) throw std::invalid_argument("project_density: density is identically zero");
    Vector c = project_density_raw(p0_values, basis);
    if (!(c(0) > 0.0)) throw std::domain_error("project_density: c_0 <= 0, density not representable on the basis");
    c /= c(0);
    return DensityCoefficients{std::move(c), 0.0};
}

DensityCoefficients step(const DensityCoefficients& c, const ShiftOperator& op, int n_steps,
                         StepDiagnostics* diagnostics) {
    if (n_steps < 0) throw std::invalid_argument("step: n_steps must be nonnegative");
    if (c.c.size() != op.A.cols()) throw std::invalid_argument("step: coefficient size mismatch");
    DensityCoefficients out = c;
    Vector next(c.c.size());
    for (int s = 0; s < n_steps; ++s) {
        next.noalias() = op.A * out.c;
        const double mass = next(0);
        if (diagnostics) diagnostics->max_mass_drift = std::max(diagnostics->max_mass_drift, std::abs(mass - 1.0));
        if (!(mass > 0.0)) throw std::domain_error("step: total mass became non-positive");
        out.c = next / mass;
        if (out.c.cwiseAbs().maxCoeff() > 1e12) throw std::overflow_error("step: coefficients exceed 1e12");
    }
    out.t = c.t + n_steps * op.tau;
    return out;
}

Vector reconstruct_density(const DensityCoefficients& c, const DiffusionBasis& basis) {
    if (c.c.size() != basis.M()) throw std::invalid_argument("reconstruct_density: size mismatch");
    return basis.peq.cwiseProduct(basis.phi * c.c);
}

Vector display_density(const Vector& p, const DiffusionBasis& basis) {
    Vector out = p.cwiseMax(0.0);
    const double mass = out.cwiseQuotient(basis.peq).mean();
    if (mass > 0.0) out /= mass;
    return out;
}

Vector forecast_moments(const DensityCoefficients& c, const DiffusionBasis& basis, const Matrix& observables) {
    if (observables.rows() != basis.size()) throw std::invalid_argument("forecast_moments: size mismatch");
    const Matrix ghat = basis.phi.transpose() * observables / static_cast<double>(basis.size());
    return ghat.transpose() * c.c;
}

MomentProjector::MomentProjector(const DiffusionBasis& basis, const Matrix& coordinates) {
    if (coordinates.rows() != basis.size()) throw std::invalid_argument("MomentProjector: size mismatch");
    const double n = static_cast<double>(basis.size());
    first_ = basis.phi.transpose() * coordinates / n;
    second_ = basis.phi.transpose() * coordinates.cwiseAbs2() / n;
}

void MomentProjector::moments(const DensityCoefficients& c, Vector& mean, Vector& variance,
                              Eigen::Index* clamped) const {
    mean = first_.transpose() * c.c;
    variance = second_.transpose() * c.c - mean.cwiseAbs2();
    for (Eigen::Index i = 0; i < variance.size(); ++i)
        if (variance(i) < 0.0) {
            variance(i) = 0.0;
            if (clamped) ++*clamped;
        }
}

void MomentProjector::climatology(Vector& mean, Vector& variance) const {
    DensityCoefficients e0{Vector::Unit(first_.rows(), 0), 0.0};
    moments(e0, mean, variance);
}

MomentForecast forecast(const DensityCoefficients& c0, const ShiftOperator& op, const MomentProjector& projector,
                        int n_leads) {
    if (n_leads < 0) throw std::invalid_argument("forecast: n_leads must be nonnegative");
    MomentForecast out;
    DensityCoefficients c = c0;
    for (int lead = 0; lead <= n_leads; ++lead) {
        if (lead > 0) c = step(c, op, 1);
        Vector mean, variance;
        projector.moments(c, mean, variance, &out.clamped);
        out.lead_times.push_back(lead * op.tau);
        out.mean.push_back(std::move(mean));
        out.variance.push_back(std::move(variance));
    }
    if (out.clamped > 0) log::debug("forecast: clamped " + std::to_string(out.clamped) + " negative variances");
    return out;
}

Matrix project_densities(const Matrix& p0_values, const DiffusionBasis& basis) {
    if (p0_values.rows() != basis.size()) throw std::invalid_argument("project_densities: size mismatch");
    if ((p0_values.array() < 0.0).any() || !p0_values.allFinite())
        throw std::invalid_argument("project_densities: density values must be finite and nonnegative");
    Matrix c = basis.phi.transpose() * (basis.peq.cwiseInverse().asDiagonal() * p0_values);
    c /= static_cast<double>(basis.size());
    for (Eigen::Index b = 0; b < c.cols(); ++b) {
        if (!(c(0, b) > 0.0))
            throw std::domain_error("project_densities: c_0 <= 0 for column " + std::to_string(b));
        c.col(b) /= c(0, b);
    }
    return c;
}

BatchMoments forecast_batch(const Matrix& coefficients, const ShiftOperator& op, const MomentProjector& projector,
                            int n_leads) {
    if (n_leads < 0) throw std::invalid_argument("forecast_batch: n_leads must be nonnegative");
    if (coefficients.rows() != op.A.cols()) throw std::invalid_argument("forecast_batch: size mismatch");
    BatchMoments out;
    Matrix c = coefficients;
    Matrix next(c.rows(), c.cols());
    for (int lead = 0; lead <= n_leads; ++lead) {
        if (lead > 0) {
            next.noalias() = op.A * c;
            for (Eigen::Index b = 0; b < c.cols(); ++b) {
                const double mass = next(0, b);
                if (!(mass > 0.0)) throw std::domain_error("forecast_batch: total mass became non-positive");
                c.col(b) = next.col(b) / mass;
            }
            if (c.cwiseAbs().maxCoeff() > 1e12) throw std::overflow_error("forecast_batch: coefficients exceed 1e12");
        }
        Matrix mean = c.transpose() * projector.first();
        Matrix var = c.transpose() * projector.second() - mean.cwiseAbs2();
        for (Eigen::Index i = 0; i < var.size(); ++i)
            if (var.data()[i] < 0.0) {
                var.data()[i] = 0.0;
                ++out.clamped;
            }
        out.mean.push_back(std::move(mean));
        out.variance.push_back(std::move(var));
    }
    return out;
}

Vector gaussian_values(const Matrix& points, const Vector& mean, const Vector& variance) {
    if (points.cols() != mean.size() || variance.size() != mean.size())
        throw std::invalid_argument("gaussian_values: dimension mismatch");
    if ((variance.array() <= 0.0).any()) throw std::invalid_argument("gaussian_values: variance must be positive");
    Vector logp(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        logp(i) = -0.5 * ((points.row(i).transpose() - mean).array().square() / variance.array()).sum();
    return (logp.array() - logp.maxCoeff()).exp().matrix();
}

}  // namespace diffcast
