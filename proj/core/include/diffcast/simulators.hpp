#pragma once

#include "diffcast/dataset.hpp"
#include "diffcast/random.hpp"

#include <cstdint>
#include <functional>
#include <utility>

namespace diffcast {

/// dx = a(x) dt + b(x) dW with W of dimension noise_dim.
struct SDEModel {
    int dim = 1;
    int noise_dim = 1;
    std::function<void(const Vector& x, Vector& a)> drift;
    std::function<void(const Vector& x, Matrix& b)> diffusion;  // dim x noise_dim
    Vector period;  // per coordinate; 0 means not periodic. Empty: none.
};

struct ODEModel {
    int dim = 1;
    std::function<void(const Vector& x, Vector& dxdt)> rhs;
};

/// Advances an SDE state by one sampling interval with Euler-Maruyama
/// substeps, wrapping periodic coordinates after every substep.
class SdeStepper {
public:
    SdeStepper(const SDEModel& model, double dt_sample, int substeps);
    void advance(Vector& x, NormalSampler& noise);

private:
    const SDEModel& model_;
    double h_;
    double sqrt_h_;
    int substeps_;
    Vector a_, dw_;
    Matrix b_;
};

/// Advances an ODE state by one sampling interval with classic RK4 using the
/// smallest number of equal internal steps not exceeding max_step.
class Rk4Stepper {
public:
    Rk4Stepper(const ODEModel& model, double dt_sample, double max_step = 0.01);
    void advance(Vector& x);
    double internal_step() const { return h_; }
    int substeps() const { return substeps_; }

private:
    const ODEModel& model_;
    double h_;
    int substeps_;
    Vector k1_, k2_, k3_, k4_, tmp_;
};

void wrap_periodic(const Vector& period, Vector& x);

/// n_samples states recorded every dt_sample, starting with x0 (after burn_in
/// discarded sampling intervals). Throws on a non-finite state.
TimeSeries euler_maruyama(const SDEModel& model, const Vector& x0, double dt_sample, int substeps,
                          Eigen::Index n_samples, std::uint64_t seed, Eigen::Index burn_in = 0,
                          std::uint64_t stream = 0);

SDEModel torus_model();
Vector torus_embedding(double theta, double phi);
Matrix torus_embedding(const Matrix& intrinsic);

struct TorusData {
    TimeSeries intrinsic;  // (theta, phi) in [0, 2 pi)^2
    TimeSeries embedded;   // (x, y, z)
};

TorusData simulate_torus(Eigen::Index n_samples = 20000, double dt_sample = 0.1, int substeps = 50,
                         std::uint64_t seed = 0, Eigen::Index burn_in = 100);

struct LorenzParameters {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
};

ODEModel lorenz63_model(const LorenzParameters& p = {});

/// RK4 with internal step <= max_step, 1000 internal transient steps discarded
/// before the first sample. x0 defaults to (1, 1, 1) plus a seeded N(0, 1) offset.
TimeSeries simulate_lorenz63(Eigen::Index n_samples, double dt_sample, const Vector& x0, double max_step = 0.01,
                             int transient_steps = 1000, const LorenzParameters& p = {});
TimeSeries simulate_lorenz63(Eigen::Index n_samples, double dt_sample, std::uint64_t seed, double max_step = 0.01,
                             int transient_steps = 1000, const LorenzParameters& p = {});

}  // namespace diffcast
