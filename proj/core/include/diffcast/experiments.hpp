#pragma once

#include "diffcast/config.hpp"
#include "diffcast/diffusion_basis.hpp"
#include "diffcast/evaluation.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace diffcast {

struct BasisDiagnostics {
    double orthonormality_error = 0.0;  // max |(1/N) phi^T phi - I|
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double phi0_deviation = 0.0;        // max |phi_0 / mean(phi_0) - 1|
};

BasisDiagnostics diagnose(const DiffusionBasis& basis);

/// Independent seed for a named purpose (splitmix64 of seed and tag).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

BasisOptions basis_options(const ExperimentConfig& config);

struct TorusReport {
    std::vector<double> lead_times;
    Matrix df_mean, df_stdev;    // leads x 3 (x, y, z)
    Matrix ens_mean, ens_stdev;  // leads x 3
    Vector climatological_stdev;  // per coordinate, training series
    Vector max_mean_error;        // max over leads of |df - ens| / climatological stdev
    Vector max_stdev_error;
    BasisDiagnostics basis;
    double d_est = 0.0;
};

/// Writes series.csv, moments.csv, summary.json and manifest.json under config.out_dir.
TorusReport run_torus_experiment(const ExperimentConfig& config);

struct LorenzRun {
    double dt = 0.1;
    SkillReport diffusion, direct, iterated, ensemble;
    BasisDiagnostics basis;
    double d_est = 0.0;
};

struct LorenzReport {
    std::vector<LorenzRun> runs;
};

/// Per sampling interval writes skill_<method>_dt<dt>.csv and a manifest.
LorenzReport run_lorenz_experiment(const ExperimentConfig& config);

struct NinoReport {
    SkillReport skill;
    BasisDiagnostics basis;
    Eigen::Index n_train = 0;
    Eigen::Index n_raw_train = 0;
};

/// Throws with download instructions when the data file is missing.
NinoReport run_nino_experiment(const ExperimentConfig& config);

/// Location of the Nino-3.4 file: config.data_path, else $DIFFCAST_NINO34_DATA.
std::filesystem::path nino_data_path(const ExperimentConfig& config);

}  // namespace diffcast
