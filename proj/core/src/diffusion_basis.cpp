#include "diffcast/diffusion_basis.hpp"

#include "diffcast/log.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace diffcast {

SparseMatrix build_vb_kernel(const NeighborList& nn, const Vector& q, double eps, double beta) {
    if (!(eps > 0.0)) throw std::invalid_argument("build_vb_kernel: eps must be positive");
    if (q.size() != nn.size()) throw std::invalid_argument("build_vb_kernel: density size mismatch");
    if ((q.array() <= 0.0).any()) throw std::invalid_argument("build_vb_kernel: density must be positive");
    const Eigen::Index n = nn.size();
    const RowMatrix s = vb_exponents(nn, q, beta);

    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(2 * s.size()));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < nn.k(); ++j) {
            const double v = std::exp(-s(i, j) / eps);
            if (v < kKernelFloor) continue;
            const Eigen::Index col = nn.indices(i, j);
            entries.emplace_back(i, col, v);
            if (col != i) entries.emplace_back(col, i, v);
        }
    SparseMatrix kernel(n, n);
    kernel.setFromTriplets(entries.begin(), entries.end(), [](double a, double b) { return std::max(a, b); });
    kernel.makeCompressed();

    for (Eigen::Index i = 0; i < n; ++i) {
        bool connected = false;
        for (SparseMatrix::InnerIterator it(kernel, i); it; ++it)
            if (it.col() != i) connected = true;
        if (!connected)
            throw std::domain_error("build_vb_kernel: point " + std::to_string(i) +
                                    " is disconnected; increase eps or neighbor_cap");
    }
    return kernel;
}

SparseMatrix build_vb_kernel(const TimeSeries& ts, const DensityEstimate& q, double eps, double beta,
                             Eigen::Index neighbor_cap) {
    if (neighbor_cap < 1) throw std::invalid_argument("build_vb_kernel: neighbor_cap must be positive");
    const auto cap = static_cast<int>(std::min(neighbor_cap, ts.size()));
    return build_vb_kernel(knn(ts, cap), q.q, eps, beta);
}

namespace {

Vector row_sums(const SparseMatrix& m) {
    Vector sums(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (SparseMatrix::InnerIterator it(m, i); it; ++it) acc += it.value();
        sums(i) = acc;
    }
    return sums;
}

SparseMatrix scale_symmetric(const SparseMatrix& m, const Vector& w) {
    SparseMatrix out = m;
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        for (SparseMatrix::InnerIterator it(out, i); it; ++it) it.valueRef() *= w(i) * w(it.col());
    return out;
}

// Fix each column's sign so its entry of largest magnitude is positive.
void fix_signs(Matrix& phi) {
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
        Eigen::Index arg = 0;
        phi.col(j).cwiseAbs().maxCoeff(&arg);
        if (phi(arg, j) < 0.0) phi.col(j) *= -1.0;
    }
}

NormalizationLedger normalize(const SparseMatrix& kernel, const Vector& q, double eps, double d, double alpha,
                              double beta, SparseMatrix& k_alpha) {
    NormalizationLedger ledger;
    ledger.qS = row_sums(kernel).array() / q.array().pow(d * beta);
    k_alpha = scale_symmetric(kernel, ledger.qS.array().pow(-alpha).matrix());
    ledger.qSalpha = row_sums(k_alpha);
    // Dhat = (m/2) eps q^{2 beta}: with m = 2 the generator has the unit-scaled
    // Laplacian spectrum (circle: 1, 1, 4, 4, ...).
    ledger.Dhat_scale = (ledger.m_const / 2.0) * eps * q.array().pow(2.0 * beta);
    ledger.P = (ledger.Dhat_scale.array() * ledger.qSalpha.array()).sqrt();
    if ((ledger.qS.array() <= 0.0).any() || (ledger.qSalpha.array() <= 0.0).any() || !ledger.P.allFinite())
        throw std::domain_error("build_basis: non-positive normalization factor");
    return ledger;
}

SparseMatrix assemble_generator(const SparseMatrix& k_alpha, const NormalizationLedger& ledger) {
    SparseMatrix l = scale_symmetric(k_alpha, ledger.P.cwiseInverse());
    for (Eigen::Index i = 0; i < l.rows(); ++i) l.coeffRef(i, i) -= 1.0 / ledger.Dhat_scale(i);
    l.makeCompressed();
    return l;
}

}  // namespace

SparseMatrix symmetric_generator(const SparseMatrix& kernel, const NormalizationLedger& ledger, double alpha) {
    return assemble_generator(scale_symmetric(kernel, ledger.qS.array().pow(-alpha).matrix()), ledger);
}

std::pair<DiffusionBasis, NormalizationLedger> build_basis(const SparseMatrix& kernel, const DensityEstimate& q,
                                                           double eps, double d, Eigen::Index M, double alpha,
                                                           double beta, bool retain_P, const EigenOptions& eigen) {
    const Eigen::Index n = kernel.rows();
    if (kernel.cols() != n || q.q.size() != n) throw std::invalid_argument("build_basis: size mismatch");
    if (M < 1 || M > n) throw std::invalid_argument("build_basis: need 1 <= M <= N");

    SparseMatrix k_alpha;
    NormalizationLedger ledger = normalize(kernel, q.q, eps, d, alpha, beta, k_alpha);
    const SparseMatrix generator = assemble_generator(k_alpha, ledger);
    EigenPairs pairs = largest_eigenpairs(generator, M, eigen);

    ledger.solver = pairs.used;
    ledger.eigen_residual = pairs.max_residual;
    Vector lambda = -pairs.values;
    const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < M; ++j) {
        if (lambda(j) < -1e-8 * scale) {
            std::ostringstream msg;
            msg << "build_basis: eigenvalue " << j << " is " << lambda(j) << " (expected >= 0); residual "
                << pairs.max_residual;
            throw std::runtime_error(msg.str());
        }
        lambda(j) = std::max(lambda(j), 0.0);
    }

    const double sqrt_n = std::sqrt(static_cast<double>(n));
    Matrix phi;
    if (retain_P) {
        // Eigenvectors of the Markov generator are P^{-1} U; orthonormalize them
        // in the sampling measure, keeping the eigenvalue order.
        const Matrix u = ledger.P.cwiseInverse().asDiagonal() * pairs.vectors;
        Eigen::HouseholderQR<Matrix> qr(u);
        phi = qr.householderQ() * Matrix::Identity(n, M);
        const Vector r = qr.matrixQR().diagonal().head(M);
        for (Eigen::Index j = 0; j < M; ++j)
            if (r(j) < 0.0) phi.col(j) *= -1.0;
        phi *= sqrt_n;
    } else {
        phi = sqrt_n * pairs.vectors;
    }
    fix_signs(phi);

    DiffusionBasis basis;
    basis.phi = std::move(phi);
    basis.lambda = std::move(lambda);
    basis.peq = q.q;
    basis.eps = eps;
    basis.d = d;
    basis.alpha = alpha;
    basis.beta = beta;
    return {std::move(basis), std::move(ledger)};
}

LearnedBasis learn_basis(const TimeSeries& ts, const BasisOptions& options) {
    const Eigen::Index n = ts.size();
    if (options.neighbor_cap < 1) throw std::invalid_argument("learn_basis: neighbor_cap must be positive");
    if (n <= options.k0) throw std::invalid_argument("learn_basis: need more than k0 points");
    const std::vector<double> grid = options.grid.empty() ? default_grid() : options.grid;

    LearnedBasis out;
    out.neighbor_cap = std::min(options.neighbor_cap, n);
    if (out.neighbor_cap < options.k0) throw std::invalid_argument("learn_basis: neighbor_cap below k0");
    log::info("knn: N = " + std::to_string(n) + ", k = " + std::to_string(out.neighbor_cap));
    const NeighborList nn = knn(ts, static_cast<int>(out.neighbor_cap));

    out.profile = adhoc_bandwidth(nn, options.k0);
    const KernelSum kde_sum(kde_exponents(nn, out.profile), n);
    out.kde_tuning = tune(std::cref(kde_sum), grid);
    out.density = kde(nn, out.profile, out.kde_tuning.eps_star, out.kde_tuning.d_est);

    const KernelSum vb_sum(vb_exponents(nn, out.density.q, options.beta), n);
    out.vb_tuning = tune(std::cref(vb_sum), grid);
    const double eps = out.vb_tuning.eps_star;
    const double d = out.vb_tuning.d_est;
    log::info("tuning: kde eps = " + std::to_string(out.kde_tuning.eps_star) + ", d = " +
              std::to_string(out.kde_tuning.d_est) + "; vb eps = " + std::to_string(eps) + ", d = " + std::to_string(d));

    const SparseMatrix kernel = build_vb_kernel(nn, out.density.q, eps, options.beta);
    const double alpha = options.alpha.value_or(-d / 4.0);
    auto [basis, ledger] =
        build_basis(kernel, out.density, eps, d, options.M, alpha, options.beta, options.retain_P, options.eigen);
    out.basis = std::move(basis);
    out.ledger = std::move(ledger);
    return out;
}

}  // namespace diffcast
