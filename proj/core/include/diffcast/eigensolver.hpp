#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <string>

namespace diffcast {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class EigenSolverKind { Auto, Dense, Lanczos };

EigenSolverKind parse_eigen_solver(const std::string& name);
std::string to_string(EigenSolverKind kind);

struct EigenOptions {
    EigenSolverKind kind = EigenSolverKind::Auto;
    // Auto uses the dense solver up to this size, and also above it (memory
    // permitting) when M is a sizeable fraction of N, where restarted Lanczos
    // costs more than a full tridiagonalization.
    Eigen::Index dense_limit = 4000;
    Eigen::Index dense_memory_limit = 16000;
    double tol = 1e-12;
    int max_iterations = 5000;
    std::uint64_t seed = 0;
};

struct EigenPairs {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // unit 2-norm columns
    EigenSolverKind used = EigenSolverKind::Dense;
    int iterations = 0;
    double max_residual = 0.0;  // max_j |A v_j - lambda_j v_j|
};

/// The M algebraically largest eigenpairs of a symmetric matrix.
/// Throws std::runtime_error on non-convergence, reporting the residual.
EigenPairs largest_eigenpairs(const SparseMatrix& a, Eigen::Index m, const EigenOptions& options = {});

}  // namespace diffcast
