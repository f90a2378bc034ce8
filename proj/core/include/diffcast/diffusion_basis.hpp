#pragma once

#include "diffcast/dataset.hpp"
#include "diffcast/eigensolver.hpp"
#include "diffcast/kernel_tuning.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace diffcast {

/// Eigenbasis of the estimated generator, orthonormal for the empirical
/// sampling measure: (1/N) phi^T phi = I.
struct DiffusionBasis {
    Matrix phi;     // N x M, column j = phi_j at the data points
    Vector lambda;  // ascending, nonnegative
    Vector peq;     // invariant density estimate at the data points
    double eps = 0.0;
    double d = 0.0;
    double alpha = 0.0;
    double beta = -0.5;

    Eigen::Index size() const { return phi.rows(); }
    Eigen::Index M() const { return phi.cols(); }
};

/// Intermediate normalization factors, kept for inspection.
struct NormalizationLedger {
    Vector qS;          // row sums of K divided by q^{d beta}
    Vector qSalpha;     // row sums of D^{-alpha} K D^{-alpha}
    Vector Dhat_scale;  // diagonal of Dhat
    Vector P;           // sqrt(Dhat * qSalpha)
    double m_const = 2.0;
    EigenSolverKind solver = EigenSolverKind::Dense;
    double eigen_residual = 0.0;
};

struct BasisOptions {
    Eigen::Index M = 30;
    int k0 = 8;
    Eigen::Index neighbor_cap = 512;  // clipped to N
    double beta = -0.5;
    std::optional<double> alpha;      // default -d/4
    // Map the symmetric eigenvectors back through P^{-1} and re-orthonormalize.
    // When false, phi = sqrt(N) * (eigenvectors of the symmetric matrix).
    bool retain_P = true;
    std::vector<double> grid;         // empty: default_grid()
    EigenOptions eigen;
};

/// K(x_i, x_j) = exp(-s_ij / eps) on the neighbor table, symmetrized by max and
/// with entries below kKernelFloor dropped. Throws if a row has no off-diagonal entry.
SparseMatrix build_vb_kernel(const NeighborList& nn, const Vector& q, double eps, double beta = -0.5);
SparseMatrix build_vb_kernel(const TimeSeries& ts, const DensityEstimate& q, double eps, double beta,
                             Eigen::Index neighbor_cap);

/// Normalization chain and eigensolve. d enters both the first normalization
/// (q^{d beta}) and, unless alpha is given explicitly, alpha = -d/4.
std::pair<DiffusionBasis, NormalizationLedger> build_basis(const SparseMatrix& kernel, const DensityEstimate& q,
                                                           double eps, double d, Eigen::Index M, double alpha,
                                                           double beta = -0.5, bool retain_P = true,
                                                           const EigenOptions& eigen = {});

/// The symmetric matrix Lhat = P^{-1} K_alpha P^{-1} - Dhat^{-1} for a given ledger.
SparseMatrix symmetric_generator(const SparseMatrix& kernel, const NormalizationLedger& ledger, double alpha);

struct LearnedBasis {
    DiffusionBasis basis;
    NormalizationLedger ledger;
    BandwidthProfile profile;
    DensityEstimate density;
    TuningResult kde_tuning;
    TuningResult vb_tuning;
    Eigen::Index neighbor_cap = 0;
};

/// Full pipeline: kNN, ad-hoc bandwidth, KDE tuning, KDE, variable-bandwidth
/// tuning, kernel, normalization and eigensolve.
LearnedBasis learn_basis(const TimeSeries& ts, const BasisOptions& options);

}  // namespace diffcast
