#include "diffcast/kernel_tuning.hpp"

#include "diffcast/csv.hpp"
#include "diffcast/log.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace diffcast {

namespace {
// exp(-s / eps) < kKernelFloor beyond this ratio.
const double kMaxExponent = -std::log(kKernelFloor);
}  // namespace

BandwidthProfile adhoc_bandwidth(const NeighborList& nn, int k0) {
    if (k0 < 2) throw std::invalid_argument("adhoc_bandwidth: k0 must be at least 2");
    if (nn.k() < k0) throw std::invalid_argument("adhoc_bandwidth: neighbor table narrower than k0");
    if (nn.size() <= k0) throw std::invalid_argument("adhoc_bandwidth: need more than k0 points");
    BandwidthProfile profile;
    profile.k0 = k0;
    profile.rho0.resize(nn.size());
    for (Eigen::Index i = 0; i < nn.size(); ++i) {
        double acc = 0.0;
        for (int j = 1; j < k0; ++j) acc += nn.distances(i, j) * nn.distances(i, j);
        const double rho = std::sqrt(acc / (k0 - 1));
        if (!(rho > 0.0))
            throw std::domain_error("adhoc_bandwidth: point " + std::to_string(i) + " has " + std::to_string(k0 - 1) +
                                    " duplicate neighbors; deduplicate the data");
        profile.rho0(i) = rho;
    }
    return profile;
}

BandwidthProfile adhoc_bandwidth(const TimeSeries& ts, int k0) {
    if (ts.size() <= k0) throw std::invalid_argument("adhoc_bandwidth: need more than k0 points");
    return adhoc_bandwidth(knn(ts, k0), k0);
}

std::vector<double> default_grid() {
    std::vector<double> grid;
    grid.reserve(401);
    for (int l = -300; l <= 100; ++l) grid.push_back(std::exp2(l / 10.0));
    return grid;
}

TuningResult tune(const std::function<double(double)>& kernel_sum, const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("tune: grid needs at least 2 points");
    TuningResult result;
    result.curve.reserve(grid.size());
    for (double eps : grid) {
        if (!(eps > 0.0)) throw std::invalid_argument("tune: grid values must be positive");
        const double t = kernel_sum(eps);
        if (!std::isfinite(t) || t <= 0.0)
            throw std::domain_error("tune: T(eps) is not finite and positive at eps = " + std::to_string(eps));
        result.curve.emplace_back(std::log(eps), std::log(t));
    }
    for (std::size_t i = 1; i < result.curve.size(); ++i)
        if (!(result.curve[i].first > result.curve[i - 1].first))
            throw std::invalid_argument("tune: grid must be strictly increasing");

    const std::size_t n = result.curve.size() - 1;
    std::vector<double> slope(n);
    for (std::size_t i = 0; i < n; ++i)
        slope[i] = (result.curve[i + 1].second - result.curve[i].second) /
                   (result.curve[i + 1].first - result.curve[i].first);

    std::size_t best = 0;
    double best_value = -INFINITY;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = std::min(n - 1, i + 1);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) acc += slope[j];
        const double smoothed = acc / static_cast<double>(hi - lo + 1);
        if (smoothed > best_value) {
            best_value = smoothed;
            best = i;
        }
    }
    if (!(best_value > 0.0))
        throw std::domain_error("tune: log T is flat over the grid (all points coincide at every scale)");

    result.eps_star = grid[best];
    result.max_slope = best_value;
    result.d_est = 2.0 * best_value;
    result.boundary_warning = best == 0 || best == n - 1;
    if (result.boundary_warning) log::warn("tune: slope maximum at the grid boundary; bandwidth unreliable");
    return result;
}

KernelSum::KernelSum(const RowMatrix& exponents, Eigen::Index n_points)
    : sorted_(exponents.data(), exponents.data() + exponents.size()), n_points_(static_cast<double>(n_points)) {
    std::sort(sorted_.begin(), sorted_.end());
}

double KernelSum::operator()(double eps) const {
    const auto end = std::upper_bound(sorted_.begin(), sorted_.end(), kMaxExponent * eps);
    const auto count = static_cast<Eigen::Index>(end - sorted_.begin());
    const Eigen::Map<const Eigen::ArrayXd> s(sorted_.data(), count);
    return (-s / eps).exp().sum() / (n_points_ * n_points_);
}

RowMatrix kde_exponents(const NeighborList& nn, const BandwidthProfile& profile) {
    if (profile.rho0.size() != nn.size()) throw std::invalid_argument("kde_exponents: size mismatch");
    RowMatrix s(nn.size(), nn.k());
    for (Eigen::Index i = 0; i < nn.size(); ++i)
        for (Eigen::Index j = 0; j < nn.k(); ++j) {
            const double dist = nn.distances(i, j);
            s(i, j) = dist * dist / (2.0 * profile.rho0(i) * profile.rho0(nn.indices(i, j)));
        }
    return s;
}

RowMatrix vb_exponents(const NeighborList& nn, const Vector& q, double beta) {
    if (q.size() != nn.size()) throw std::invalid_argument("vb_exponents: size mismatch");
    RowMatrix s(nn.size(), nn.k());
    for (Eigen::Index i = 0; i < nn.size(); ++i)
        for (Eigen::Index j = 0; j < nn.k(); ++j) {
            const double dist = nn.distances(i, j);
            s(i, j) = dist * dist / (4.0 * std::pow(q(i) * q(nn.indices(i, j)), beta));
        }
    return s;
}

namespace {

DensityEstimate finish_kde(Vector sums, const BandwidthProfile& profile, double eps, double d) {
    const double n = static_cast<double>(sums.size());
    for (Eigen::Index i = 0; i < sums.size(); ++i) {
        const double volume = std::pow(2.0 * std::numbers::pi * eps * profile.rho0(i) * profile.rho0(i), d / 2.0);
        sums(i) /= n * volume;
        if (!(sums(i) > 0.0) || !std::isfinite(sums(i)))
            throw std::domain_error("kde: density at point " + std::to_string(i) +
                                    " is not positive and finite; try a larger eps");
    }
    return DensityEstimate{std::move(sums), eps, d};
}

void check_kde_args(double eps, double d) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("kde: eps must be positive");
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("kde: d must be positive");
}

}  // namespace

DensityEstimate kde(const NeighborList& nn, const BandwidthProfile& profile, double eps, double d) {
    check_kde_args(eps, d);
    const RowMatrix s = kde_exponents(nn, profile);
    Vector sums(nn.size());
    for (Eigen::Index i = 0; i < nn.size(); ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < nn.k(); ++j) {
            const double k = std::exp(-s(i, j) / eps);
            if (k >= kKernelFloor) acc += k;
        }
        sums(i) = acc;
    }
    return finish_kde(std::move(sums), profile, eps, d);
}

DensityEstimate kde(const TimeSeries& ts, const BandwidthProfile& profile, double eps, double d) {
    check_kde_args(eps, d);
    if (profile.rho0.size() != ts.size()) throw std::invalid_argument("kde: profile size mismatch");
    const Matrix& x = ts.points();
    Vector sums(ts.size());
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < ts.size(); ++j) {
            const double d2 = (x.row(i) - x.row(j)).squaredNorm();
            const double k = std::exp(-d2 / (2.0 * eps * profile.rho0(i) * profile.rho0(j)));
            if (k >= kKernelFloor) acc += k;
        }
        sums(i) = acc;
    }
    return finish_kde(std::move(sums), profile, eps, d);
}

void save_tuning_curve(const TuningResult& result, const std::filesystem::path& path) {
    CsvWriter out(path, {"log_eps", "log_T"});
    for (const auto& [le, lt] : result.curve) out.write({le, lt});
}

}  // namespace diffcast
