#include "diffcast/eigensolver.hpp"

#include "diffcast/log.hpp"
#include "diffcast/random.hpp"

#include <lapacke.h>

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

extern "C" {
void dsaupd_c(int* ido, const char* bmat, int n, const char* which, int nev, double tol, double* resid, int ncv,
              double* v, int ldv, int* iparam, int* ipntr, double* workd, double* workl, int lworkl, int* info);
void dseupd_c(int rvec, const char* howmny, const int* select, double* d, double* z, int ldz, double sigma,
              const char* bmat, int n, const char* which, int nev, double tol, double* resid, int ncv, double* v,
              int ldv, int* iparam, int* ipntr, double* workd, double* workl, int lworkl, int* info);
}

namespace diffcast {

EigenSolverKind parse_eigen_solver(const std::string& name) {
    if (name == "auto") return EigenSolverKind::Auto;
    if (name == "dense") return EigenSolverKind::Dense;
    if (name == "lanczos") return EigenSolverKind::Lanczos;
    throw std::invalid_argument("unknown eigensolver '" + name + "' (auto, dense, lanczos)");
}

std::string to_string(EigenSolverKind kind) {
    switch (kind) {
        case EigenSolverKind::Auto: return "auto";
        case EigenSolverKind::Dense: return "dense";
        case EigenSolverKind::Lanczos: return "lanczos";
    }
    return "auto";
}

namespace {

double max_residual(const SparseMatrix& a, const EigenPairs& pairs) {
    double worst = 0.0;
    for (Eigen::Index j = 0; j < pairs.values.size(); ++j) {
        const Eigen::VectorXd r = a * pairs.vectors.col(j) - pairs.values(j) * pairs.vectors.col(j);
        worst = std::max(worst, r.norm());
    }
    return worst;
}

EigenPairs dense_solve(const SparseMatrix& a, Eigen::Index m) {
    const auto n = static_cast<lapack_int>(a.rows());
    Eigen::MatrixXd full = Eigen::MatrixXd(a);
    Eigen::VectorXd w(n);
    Eigen::MatrixXd z(n, m);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(m));
    lapack_int found = 0;
    const lapack_int info =
        LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, full.data(), n, 0.0, 0.0, n - static_cast<lapack_int>(m) + 1,
                       n, 0.0, &found, w.data(), z.data(), n, support.data());
    if (info != 0 || found != m)
        throw std::runtime_error("dense eigensolver failed (LAPACK info " + std::to_string(info) + ")");
    EigenPairs pairs;
    pairs.used = EigenSolverKind::Dense;
    pairs.values = w.head(m).reverse();
    pairs.vectors = z.rowwise().reverse();
    return pairs;
}

EigenPairs lanczos_solve(const SparseMatrix& a, Eigen::Index m, const EigenOptions& options) {
    const int n = static_cast<int>(a.rows());
    const int nev = static_cast<int>(m);
    const int ncv = std::min(n, std::max(2 * nev + 1, nev + 32));
    const int lworkl = ncv * (ncv + 8);
    std::vector<double> resid(n), v(static_cast<std::size_t>(n) * ncv), workd(3 * static_cast<std::size_t>(n)),
        workl(lworkl);
    NormalSampler gauss(options.seed, 0x4c414e43);
    for (double& r : resid) r = gauss();
    int iparam[11] = {};
    int ipntr[11] = {};
    iparam[0] = 1;
    iparam[2] = options.max_iterations;
    iparam[6] = 1;
    int ido = 0;
    int info = 1;  // use the supplied starting vector
    while (true) {
        dsaupd_c(&ido, "I", n, "LA", nev, options.tol, resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(),
                 workl.data(), lworkl, &info);
        if (ido != 1 && ido != -1) break;
        Eigen::Map<const Eigen::VectorXd> x(workd.data() + ipntr[0] - 1, n);
        Eigen::Map<Eigen::VectorXd> y(workd.data() + ipntr[1] - 1, n);
        y.noalias() = a * x;
    }
    if (info < 0) throw std::runtime_error("ARPACK dsaupd error " + std::to_string(info));
    if (info == 1) {
        std::ostringstream msg;
        msg << "Lanczos eigensolver did not converge: " << iparam[4] << " of " << nev << " eigenpairs after "
            << iparam[2] << " restarts";
        throw std::runtime_error(msg.str());
    }
    std::vector<int> select(ncv, 1);
    Eigen::VectorXd d(nev);
    Eigen::MatrixXd z(n, nev);
    int einfo = 0;
    dseupd_c(1, "A", select.data(), d.data(), z.data(), n, 0.0, "I", n, "LA", nev, options.tol, resid.data(), ncv,
             v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, &einfo);
    if (einfo != 0) throw std::runtime_error("ARPACK dseupd error " + std::to_string(einfo));

    std::vector<Eigen::Index> order(nev);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) { return d(i) > d(j); });
    EigenPairs pairs;
    pairs.used = EigenSolverKind::Lanczos;
    pairs.iterations = iparam[2];
    pairs.values.resize(nev);
    pairs.vectors.resize(n, nev);
    for (int j = 0; j < nev; ++j) {
        pairs.values(j) = d(order[j]);
        pairs.vectors.col(j) = z.col(order[j]);
    }
    return pairs;
}

}  // namespace

EigenPairs largest_eigenpairs(const SparseMatrix& a, Eigen::Index m, const EigenOptions& options) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("largest_eigenpairs: matrix must be square");
    if (m < 1 || m > n) throw std::invalid_argument("largest_eigenpairs: need 1 <= M <= N");

    EigenSolverKind kind = options.kind;
    if (kind == EigenSolverKind::Auto) {
        const bool small = n <= options.dense_limit;
        const bool wide = 40 * m > n && n <= options.dense_memory_limit;
        kind = small || wide ? EigenSolverKind::Dense : EigenSolverKind::Lanczos;
    }
    // ARPACK needs nev < ncv <= n.
    if (kind == EigenSolverKind::Lanczos && m + 1 >= n) kind = EigenSolverKind::Dense;

    EigenPairs pairs = kind == EigenSolverKind::Dense ? dense_solve(a, m) : lanczos_solve(a, m, options);
    pairs.max_residual = max_residual(a, pairs);
    log::debug("eigensolver " + to_string(pairs.used) + ": residual " + std::to_string(pairs.max_residual));
    return pairs;
}

}  // namespace diffcast
