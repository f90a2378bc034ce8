#pragma once

// Finite-volume Fokker-Planck solver for a scalar SDE on the circle,
// dtheta = a(theta) dt + sigma dW, used as an independent reference for the
// density forecasts.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

class PeriodicFokkerPlanck {
public:
    PeriodicFokkerPlanck(std::function<double(double)> drift, double sigma, int cells = 512)
        : cells_(cells), h_(2.0 * std::numbers::pi / cells), generator_(Eigen::MatrixXd::Zero(cells, cells)) {
        // Conservative central fluxes: F_{i+1/2} = a (p_i + p_{i+1}) / 2 - D (p_{i+1} - p_i) / h.
        const double diff = 0.5 * sigma * sigma;
        for (int i = 0; i < cells; ++i) {
            const int r = (i + 1) % cells;
            const double a = drift((i + 1) * h_);
            // Flux through the right face of cell i as coefficients on (p_i, p_r).
            const double ci = 0.5 * a + diff / h_;
            const double cr = 0.5 * a - diff / h_;
            generator_(i, i) -= ci / h_;
            generator_(i, r) -= cr / h_;
            generator_(r, i) += ci / h_;
            generator_(r, r) += cr / h_;
        }
    }

    int cells() const { return cells_; }
    double h() const { return h_; }
    double center(int i) const { return (i + 0.5) * h_; }
    const Eigen::MatrixXd& generator() const { return generator_; }

    /// Maps cell densities at time 0 to cell densities at time t.
    Eigen::MatrixXd propagator(double t) const { return (generator_ * t).exp(); }

    /// Null vector of the generator, normalized to unit mass.
    Eigen::VectorXd stationary() const {
        Eigen::FullPivLU<Eigen::MatrixXd> lu(generator_);
        Eigen::VectorXd p = lu.kernel().col(0);
        return p / (p.sum() * h_);
    }

    /// Periodic linear interpolation of cell-centered values.
    double interpolate(const Eigen::VectorXd& values, double theta) const {
        double s = theta / h_ - 0.5;
        s -= cells_ * std::floor(s / cells_);
        const int i = static_cast<int>(std::floor(s)) % cells_;
        const double w = s - std::floor(s);
        return (1.0 - w) * values(i) + w * values((i + 1) % cells_);
    }

private:
    int cells_;
    double h_;
    Eigen::MatrixXd generator_;
};

/// Wrapped normal density on [0, 2 pi).
inline double wrapped_normal(double x, double mean, double sd) {
    double acc = 0.0;
    for (int k = -3; k <= 3; ++k) {
        const double d = x - mean + 2.0 * std::numbers::pi * k;
        acc += std::exp(-0.5 * d * d / (sd * sd));
    }
    return acc / (sd * std::sqrt(2.0 * std::numbers::pi));
}

}  // namespace oracle
