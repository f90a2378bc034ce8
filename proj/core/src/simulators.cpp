#include "diffcast/simulators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace diffcast {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void wrap_periodic(const Vector& period, Vector& x) {
    for (Eigen::Index i = 0; i < period.size(); ++i) {
        const double p = period(i);
        if (p <= 0.0) continue;
        double v = std::fmod(x(i), p);
        if (v < 0.0) v += p;
        if (v >= p) v = 0.0;  // fmod of a tiny negative value can round up to p
        x(i) = v;
    }
}

SdeStepper::SdeStepper(const SDEModel& model, double dt_sample, int substeps)
    : model_(model), h_(dt_sample / substeps), sqrt_h_(std::sqrt(dt_sample / substeps)), substeps_(substeps),
      a_(model.dim), dw_(model.noise_dim), b_(model.dim, model.noise_dim) {
    if (substeps < 1) throw std::invalid_argument("SdeStepper: substeps must be at least 1");
    if (!(dt_sample > 0.0)) throw std::invalid_argument("SdeStepper: dt_sample must be positive");
    if (!model.drift || !model.diffusion) throw std::invalid_argument("SdeStepper: model is incomplete");
}

void SdeStepper::advance(Vector& x, NormalSampler& noise) {
    for (int s = 0; s < substeps_; ++s) {
        model_.drift(x, a_);
        model_.diffusion(x, b_);
        for (Eigen::Index k = 0; k < dw_.size(); ++k) dw_(k) = sqrt_h_ * noise();
        x.noalias() += h_ * a_;
        x.noalias() += b_ * dw_;
        wrap_periodic(model_.period, x);
    }
}

Rk4Stepper::Rk4Stepper(const ODEModel& model, double dt_sample, double max_step)
    : model_(model), k1_(model.dim), k2_(model.dim), k3_(model.dim), k4_(model.dim), tmp_(model.dim) {
    if (!(dt_sample > 0.0) || !(max_step > 0.0)) throw std::invalid_argument("Rk4Stepper: steps must be positive");
    substeps_ = static_cast<int>(std::ceil(dt_sample / max_step - 1e-9));
    if (substeps_ < 1) substeps_ = 1;
    h_ = dt_sample / substeps_;
}

void Rk4Stepper::advance(Vector& x) {
    for (int s = 0; s < substeps_; ++s) {
        model_.rhs(x, k1_);
        tmp_ = x + 0.5 * h_ * k1_;
        model_.rhs(tmp_, k2_);
        tmp_ = x + 0.5 * h_ * k2_;
        model_.rhs(tmp_, k3_);
        tmp_ = x + h_ * k3_;
        model_.rhs(tmp_, k4_);
        x += (h_ / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }
}

TimeSeries euler_maruyama(const SDEModel& model, const Vector& x0, double dt_sample, int substeps,
                          Eigen::Index n_samples, std::uint64_t seed, Eigen::Index burn_in, std::uint64_t stream) {
    if (x0.size() != model.dim) throw std::invalid_argument("euler_maruyama: x0 has the wrong dimension");
    if (n_samples < 1) throw std::invalid_argument("euler_maruyama: n_samples must be positive");
    SdeStepper stepper(model, dt_sample, substeps);
    NormalSampler noise(seed, stream);
    Vector x = x0;
    wrap_periodic(model.period, x);
    for (Eigen::Index s = 0; s < burn_in; ++s) stepper.advance(x, noise);
    Matrix out(n_samples, model.dim);
    for (Eigen::Index s = 0; s < n_samples; ++s) {
        if (s > 0) stepper.advance(x, noise);
        if (!x.allFinite()) throw std::runtime_error("euler_maruyama: non-finite state at sample " + std::to_string(s));
        out.row(s) = x.transpose();
    }
    return TimeSeries(std::move(out), dt_sample, "euler-maruyama");
}

SDEModel torus_model() {
    SDEModel m;
    m.dim = 2;
    m.noise_dim = 2;
    m.period = Vector::Constant(2, kTwoPi);
    m.drift = [](const Vector& x, Vector& a) {
        const double th = x(0), ph = x(1);
        const double shifted = std::cos(th + std::numbers::pi / 2.0);
        a(0) = 0.5 + 0.125 * std::cos(th) * std::cos(2.0 * ph) + 0.5 * shifted;
        a(1) = 10.0 + 0.5 * std::cos(th + ph / 2.0) + shifted;
    };
    m.diffusion = [](const Vector& x, Matrix& b) {
        const double th = x(0), ph = x(1);
        const double off = 0.25 * std::cos(th + ph);
        b(0, 0) = 0.25 + 0.25 * std::sin(th);
        b(0, 1) = off;
        b(1, 0) = off;
        b(1, 1) = 1.0 / 40.0 + std::sin(ph) * std::cos(th) / 40.0;
    };
    return m;
}

Vector torus_embedding(double theta, double phi) {
    const double r = 2.0 + std::sin(theta);
    return Vector{{r * std::cos(phi), r * std::sin(phi), std::cos(theta)}};
}

Matrix torus_embedding(const Matrix& intrinsic) {
    if (intrinsic.cols() != 2) throw std::invalid_argument("torus_embedding: expected (theta, phi) columns");
    Matrix out(intrinsic.rows(), 3);
    for (Eigen::Index i = 0; i < intrinsic.rows(); ++i)
        out.row(i) = torus_embedding(intrinsic(i, 0), intrinsic(i, 1)).transpose();
    return out;
}

TorusData simulate_torus(Eigen::Index n_samples, double dt_sample, int substeps, std::uint64_t seed,
                         Eigen::Index burn_in) {
    const SDEModel model = torus_model();
    TimeSeries intrinsic = euler_maruyama(model, Vector::Zero(2), dt_sample, substeps, n_samples, seed, burn_in);
    TimeSeries embedded(torus_embedding(intrinsic.points()), dt_sample, "torus-embedded");
    return {TimeSeries(intrinsic.points(), dt_sample, "torus-intrinsic"), std::move(embedded)};
}

ODEModel lorenz63_model(const LorenzParameters& p) {
    ODEModel m;
    m.dim = 3;
    m.rhs = [p](const Vector& x, Vector& f) {
        f(0) = p.sigma * (x(1) - x(0));
        f(1) = x(0) * (p.rho - x(2)) - x(1);
        f(2) = x(0) * x(1) - p.beta * x(2);
    };
    return m;
}

TimeSeries simulate_lorenz63(Eigen::Index n_samples, double dt_sample, const Vector& x0, double max_step,
                             int transient_steps, const LorenzParameters& p) {
    if (x0.size() != 3) throw std::invalid_argument("simulate_lorenz63: x0 must have 3 entries");
    if (n_samples < 1) throw std::invalid_argument("simulate_lorenz63: n_samples must be positive");
    const ODEModel model = lorenz63_model(p);
    Vector x = x0;
    Rk4Stepper transient(model, max_step, max_step);
    for (int s = 0; s < transient_steps; ++s) transient.advance(x);
    Rk4Stepper stepper(model, dt_sample, max_step);
    Matrix out(n_samples, 3);
    for (Eigen::Index s = 0; s < n_samples; ++s) {
        if (s > 0) stepper.advance(x);
        if (!x.allFinite()) throw std::runtime_error("simulate_lorenz63: non-finite state at sample " + std::to_string(s));
        out.row(s) = x.transpose();
    }
    return TimeSeries(std::move(out), dt_sample, "lorenz63");
}

TimeSeries simulate_lorenz63(Eigen::Index n_samples, double dt_sample, std::uint64_t seed, double max_step,
                             int transient_steps, const LorenzParameters& p) {
    NormalSampler g(seed, 0x4c3633);
    Vector x0(3);
    for (int i = 0; i < 3; ++i) x0(i) = 1.0 + g();
    return simulate_lorenz63(n_samples, dt_sample, x0, max_step, transient_steps, p);
}

}  // namespace diffcast
