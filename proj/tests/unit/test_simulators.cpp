#include "diffcast/simulators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace diffcast;

namespace {

SDEModel scalar_sde(double rate, double noise) {
    SDEModel m;
    m.drift = [rate](const Vector& x, Vector& a) { a(0) = rate * x(0); };
    m.diffusion = [noise](const Vector&, Matrix& b) { b(0, 0) = noise; };
    return m;
}

double wrapped_step(double a, double b) {
    const double d = std::remainder(b - a, 2.0 * std::numbers::pi);
    return std::abs(d);
}

}  // namespace

TEST(EulerMaruyama, ZeroModelIsConstant) {
    const TimeSeries ts = euler_maruyama(scalar_sde(0.0, 0.0), Vector{{1.25}}, 0.1, 5, 20, 1);
    EXPECT_TRUE((ts.points().array() == 1.25).all());
    EXPECT_EQ(ts.size(), 20);
    EXPECT_DOUBLE_EQ(ts.tau(), 0.1);
}

TEST(EulerMaruyama, BrownianVariance) {
    const SDEModel bm = scalar_sde(0.0, 1.0);
    const int paths = 10000;
    const double t = 2.0;
    double acc = 0.0, acc2 = 0.0;
    for (int p = 0; p < paths; ++p) {
        const double x = euler_maruyama(bm, Vector{{0.0}}, t, 20, 2, 7, 0, p).points()(1, 0);
        acc += x;
        acc2 += x * x;
    }
    const double mean = acc / paths;
    const double var = acc2 / paths - mean * mean;
    EXPECT_NEAR(var, t, 3.0 * t * std::sqrt(2.0 / paths));
}

TEST(EulerMaruyama, OrnsteinUhlenbeckStationaryVariance) {
    const TimeSeries ts = euler_maruyama(scalar_sde(-1.0, 1.0), Vector{{0.0}}, 0.1, 10, 200000, 3, 100);
    const auto x = ts.points().col(0).array();
    const double var = (x - x.mean()).square().mean();
    EXPECT_NEAR(var, 0.5, 0.025);
}

TEST(EulerMaruyama, WeakErrorShrinksWithSubsteps) {
    const SDEModel ou = scalar_sde(-1.0, 0.0);
    auto error = [&](int substeps) {
        const double x = euler_maruyama(ou, Vector{{1.0}}, 1.0, substeps, 2, 0).points()(1, 0);
        return std::abs(x - std::exp(-1.0));
    };
    EXPECT_LT(error(20), error(10));
    EXPECT_LT(error(40), error(20));
}

TEST(EulerMaruyama, NonFiniteStateThrows) {
    EXPECT_THROW(euler_maruyama(scalar_sde(1e6, 0.0), Vector{{1.0}}, 1.0, 1, 200, 0), std::exception);
}

TEST(EulerMaruyama, Deterministic) {
    const TimeSeries a = euler_maruyama(scalar_sde(-1.0, 1.0), Vector{{0.0}}, 0.1, 10, 500, 9);
    const TimeSeries b = euler_maruyama(scalar_sde(-1.0, 1.0), Vector{{0.0}}, 0.1, 10, 500, 9);
    const TimeSeries c = euler_maruyama(scalar_sde(-1.0, 1.0), Vector{{0.0}}, 0.1, 10, 500, 10);
    EXPECT_EQ(a.points(), b.points());
    EXPECT_NE(a.points(), c.points());
}

TEST(Torus, EmbeddingIdentity) {
    const TorusData data = simulate_torus(2000, 0.1, 50, 1);
    ASSERT_EQ(data.intrinsic.size(), 2000);
    const Matrix& x = data.embedded.points();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double r = std::hypot(x(i, 0), x(i, 1)) - 2.0;
        EXPECT_NEAR(r * r + x(i, 2) * x(i, 2), 1.0, 1e-12);
    }
    EXPECT_GE(data.intrinsic.points().minCoeff(), 0.0);
    EXPECT_LT(data.intrinsic.points().maxCoeff(), 2.0 * std::numbers::pi);
    EXPECT_EQ(torus_embedding(data.intrinsic.points()), x);
}

TEST(Torus, WrapDoesNotChangeEmbedding) {
    for (double theta : {-7.0, 0.3, 9.5})
        for (double phi : {-3.0, 1.0, 14.0}) {
            Vector s{{theta, phi}};
            wrap_periodic(Vector::Constant(2, 2.0 * std::numbers::pi), s);
            EXPECT_GE(s.minCoeff(), 0.0);
            EXPECT_LT(s.maxCoeff(), 2.0 * std::numbers::pi);
            EXPECT_LT((torus_embedding(s(0), s(1)) - torus_embedding(theta, phi)).cwiseAbs().maxCoeff(), 1e-12);
        }
}

TEST(Torus, PhiIsFasterThanTheta) {
    const TorusData data = simulate_torus(2000, 0.1, 50, 2);
    const Matrix& s = data.intrinsic.points();
    double dtheta = 0.0, dphi = 0.0;
    for (Eigen::Index i = 1; i < s.rows(); ++i) {
        dtheta += wrapped_step(s(i - 1, 0), s(i, 0));
        dphi += wrapped_step(s(i - 1, 1), s(i, 1));
    }
    EXPECT_GT(dphi, dtheta);
}

TEST(Torus, Deterministic) {
    EXPECT_EQ(simulate_torus(300, 0.1, 50, 4).embedded.points(), simulate_torus(300, 0.1, 50, 4).embedded.points());
}

TEST(Lorenz, StaysInTrappingBall) {
    const LorenzParameters p;
    const TimeSeries ts = simulate_lorenz63(20000, 0.1, std::uint64_t{1});
    // Radius of the absorbing ball centred on (0, 0, rho + sigma) for b >= 2.
    const double radius = p.beta * (p.rho + p.sigma) / (2.0 * std::sqrt(p.beta - 1.0));
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        const Eigen::RowVector3d v(ts.points()(i, 0), ts.points()(i, 1), ts.points()(i, 2) - p.rho - p.sigma);
        EXPECT_LT(v.norm(), radius);
    }
}

TEST(Lorenz, MeanZ) {
    const TimeSeries ts = simulate_lorenz63(100000, 0.1, std::uint64_t{2});
    EXPECT_NEAR(ts.points().col(2).mean(), 23.5, 0.5);
}

TEST(Lorenz, StepRefinement) {
    const Vector x0{{1.0, 2.0, 20.0}};
    // No transient: its length is counted in internal steps.
    const TimeSeries a = simulate_lorenz63(101, 0.1, x0, 0.01, 0);
    const TimeSeries b = simulate_lorenz63(101, 0.1, x0, 0.005, 0);
    const Vector xa = a.points().row(100), xb = b.points().row(100);
    EXPECT_LT((xa - xb).norm() / xa.norm(), 1e-3);
}

TEST(Rk4, FourthOrderOnOscillator) {
    ODEModel osc;
    osc.dim = 2;
    osc.rhs = [](const Vector& x, Vector& dx) { dx = Vector{{x(1), -x(0)}}; };
    auto error = [&](double h) {
        Vector x{{1.0, 0.0}};
        Rk4Stepper stepper(osc, 1.0, h);
        for (int k = 0; k < 5; ++k) stepper.advance(x);
        return (x - Vector{{std::cos(5.0), -std::sin(5.0)}}).norm();
    };
    const double ratio = error(0.1) / error(0.05);
    EXPECT_NEAR(ratio, 16.0, 1.0);
}

TEST(Lorenz, InternalStepNeverExceedsLimit) {
    const ODEModel m = lorenz63_model();
    const Rk4Stepper coarse(m, 0.5), fine(m, 0.1);
    EXPECT_EQ(coarse.substeps(), 50);
    EXPECT_LE(coarse.internal_step(), 0.01 + 1e-15);
    EXPECT_EQ(fine.substeps(), 10);
    const Rk4Stepper odd(m, 0.025);
    EXPECT_EQ(odd.substeps(), 3);
}

TEST(Lorenz, SeedSelectsInitialCondition) {
    const TimeSeries a = simulate_lorenz63(50, 0.1, std::uint64_t{5});
    const TimeSeries b = simulate_lorenz63(50, 0.1, std::uint64_t{5});
    const TimeSeries c = simulate_lorenz63(50, 0.1, std::uint64_t{6});
    EXPECT_EQ(a.points(), b.points());
    EXPECT_NE(a.points(), c.points());
}
