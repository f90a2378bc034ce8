#include "diffcast/baselines.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace diffcast {

namespace {

void check_state(const GaussianState& s, Eigen::Index dim) {
    if (s.mean.size() != dim || s.cov.rows() != dim || s.cov.cols() != dim)
        throw std::invalid_argument("GaussianState has the wrong dimension");
}

GaussianState apply(const AffineModel& m, const GaussianState& s) {
    GaussianState out;
    out.mean = m.linear * s.mean + m.offset;
    out.cov = m.linear * s.cov * m.linear.transpose();
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

}  // namespace

AffineModel fit_local_affine(const Matrix& train, const Vector& query, int lead_steps, int k) {
    const Eigen::Index n = train.rows(), dim = train.cols();
    if (lead_steps < 0) throw std::invalid_argument("fit_local_affine: lead must be nonnegative");
    if (query.size() != dim) throw std::invalid_argument("fit_local_affine: query dimension mismatch");
    AffineModel model;
    if (lead_steps == 0) {
        model.linear = Matrix::Identity(dim, dim);
        model.offset = Vector::Zero(dim);
        return model;
    }
    const Eigen::Index limit = n - lead_steps;
    if (k < 1 || limit < k)
        throw std::invalid_argument("fit_local_affine: need at least k + lead training points");

    std::vector<Eigen::Index> idx;
    std::vector<double> dist;
    knn_query(train, limit, query, k, idx, dist);
    Matrix x(k, dim), y(k, dim);
    for (int r = 0; r < k; ++r) {
        x.row(r) = train.row(idx[r]);
        y.row(r) = train.row(idx[r] + lead_steps);
    }
    const Eigen::RowVectorXd x_mean = x.colwise().mean(), y_mean = y.colwise().mean();
    x.rowwise() -= x_mean;
    y.rowwise() -= y_mean;

    // Centered least squares; the complete orthogonal decomposition gives the
    // minimum-norm solution when the neighbors do not span the space.
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
    const double scale = x.cwiseAbs().maxCoeff();
    cod.setThreshold(1e-12);
    model.degenerate = scale == 0.0 || cod.rank() < dim;
    const Matrix lt = scale == 0.0 ? Matrix::Zero(dim, dim) : Matrix(cod.solve(y));
    model.linear = lt.transpose();
    model.offset = y_mean.transpose() - model.linear * x_mean.transpose();
    model.fit_residual = std::sqrt((x * lt - y).squaredNorm() / static_cast<double>(k));
    return model;
}

GaussianState local_linear_forecast(const TimeSeries& train, const GaussianState& init, int lead_steps, int k) {
    check_state(init, train.dim());
    return apply(fit_local_affine(train.points(), init.mean, lead_steps, k), init);
}

GaussianState iterated_local_linear_forecast(const TimeSeries& train, const GaussianState& init, int lead_steps,
                                             int k) {
    return iterated_local_linear_path(train, init, lead_steps, k).back();
}

std::vector<GaussianState> local_linear_path(const TimeSeries& train, const GaussianState& init, int max_lead,
                                             int k) {
    check_state(init, train.dim());
    std::vector<GaussianState> out;
    out.reserve(max_lead + 1);
    for (int lead = 0; lead <= max_lead; ++lead)
        out.push_back(apply(fit_local_affine(train.points(), init.mean, lead, k), init));
    return out;
}

std::vector<GaussianState> iterated_local_linear_path(const TimeSeries& train, const GaussianState& init,
                                                      int max_lead, int k) {
    check_state(init, train.dim());
    if (max_lead < 0) throw std::invalid_argument("iterated_local_linear_path: lead must be nonnegative");
    std::vector<GaussianState> out{init};
    out.reserve(max_lead + 1);
    for (int lead = 1; lead <= max_lead; ++lead) {
        const GaussianState& s = out.back();
        out.push_back(apply(fit_local_affine(train.points(), s.mean, 1, k), s));
    }
    return out;
}

GaussianSampler::GaussianSampler(const GaussianState& state) : mean_(state.mean) {
    check_state(state, state.mean.size());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(state.cov);
    const Vector vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    root_ = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

Vector GaussianSampler::draw(NormalSampler& noise) const {
    Vector z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = noise();
    return mean_ + root_ * z;
}

namespace {

// Running sums per lead; members are accumulated in index order so the
// result does not depend on scheduling.
class MomentAccumulator {
public:
    MomentAccumulator(int n_leads, double dt) : dt_(dt), n_leads_(n_leads) {}

    void add(int lead, const Vector& obs) {
        if (sum_.empty()) {
            sum_.assign(n_leads_ + 1, Vector::Zero(obs.size()));
            sq_.assign(n_leads_ + 1, Vector::Zero(obs.size()));
            shift_.assign(n_leads_ + 1, Vector());
        }
        // Sums about the first member's value keep the variance well conditioned.
        if (shift_[lead].size() == 0) shift_[lead] = obs;
        const Vector dv = obs - shift_[lead];
        sum_[lead] += dv;
        sq_[lead] += dv.cwiseAbs2();
        if (lead == 0) ++count_;
    }

    MomentForecast finish() const {
        MomentForecast out;
        const double n = static_cast<double>(count_);
        for (int lead = 0; lead <= n_leads_; ++lead) {
            const Vector m = sum_[lead] / n;
            Vector var = (sq_[lead] - n * m.cwiseAbs2()) / std::max(1.0, n - 1.0);
            var = var.cwiseMax(0.0);
            out.lead_times.push_back(lead * dt_);
            out.mean.push_back(m + shift_[lead]);
            out.variance.push_back(var);
        }
        return out;
    }

private:
    double dt_;
    int n_leads_;
    Eigen::Index count_ = 0;
    std::vector<Vector> sum_, sq_, shift_;
};

void check_ensemble_args(Eigen::Index n_ens, int n_leads) {
    if (n_ens < 1) throw std::invalid_argument("ensemble_forecast: n_ens must be positive");
    if (n_leads < 0) throw std::invalid_argument("ensemble_forecast: n_leads must be nonnegative");
}

}  // namespace

MomentForecast ensemble_forecast(const SDEModel& model, const GaussianState& init, Eigen::Index n_ens,
                                 double dt_sample, int substeps, int n_leads, std::uint64_t seed,
                                 const Observation& observe) {
    check_ensemble_args(n_ens, n_leads);
    check_state(init, model.dim);
    const GaussianSampler sampler(init);
    SdeStepper stepper(model, dt_sample, substeps);
    MomentAccumulator acc(n_leads, dt_sample);
    for (Eigen::Index m = 0; m < n_ens; ++m) {
        NormalSampler noise(seed, static_cast<std::uint64_t>(m));
        Vector x = sampler.draw(noise);
        wrap_periodic(model.period, x);
        for (int lead = 0; lead <= n_leads; ++lead) {
            if (lead > 0) stepper.advance(x, noise);
            if (!x.allFinite())
                throw std::runtime_error("ensemble_forecast: member " + std::to_string(m) + " diverged");
            acc.add(lead, observe ? observe(x) : x);
        }
    }
    return acc.finish();
}

MomentForecast ensemble_forecast(const ODEModel& model, const GaussianState& init, Eigen::Index n_ens,
                                 double dt_sample, int n_leads, std::uint64_t seed, const Observation& observe,
                                 double max_step) {
    check_ensemble_args(n_ens, n_leads);
    check_state(init, model.dim);
    const GaussianSampler sampler(init);
    Rk4Stepper stepper(model, dt_sample, max_step);
    MomentAccumulator acc(n_leads, dt_sample);
    for (Eigen::Index m = 0; m < n_ens; ++m) {
        NormalSampler noise(seed, static_cast<std::uint64_t>(m));
        Vector x = sampler.draw(noise);
        for (int lead = 0; lead <= n_leads; ++lead) {
            if (lead > 0) stepper.advance(x);
            if (!x.allFinite())
                throw std::runtime_error("ensemble_forecast: member " + std::to_string(m) + " diverged");
            acc.add(lead, observe ? observe(x) : x);
        }
    }
    return acc.finish();
}

}  // namespace diffcast
