#pragma once

#include "diffcast/eigensolver.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace diffcast {

enum class ExperimentKind { Torus, Lorenz63, Nino34, Custom };

ExperimentKind parse_experiment(const std::string& name);
std::string to_string(ExperimentKind kind);

/// Every knob of an experiment run. Defaults depend on the experiment and on
/// whether paper-scale sizes are requested; see default_config().
struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Custom;
    bool paper_scale = false;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = "out";

    // Data generation / ingestion.
    Eigen::Index n_samples = 8000;  // torus training length
    double tau = 0.1;
    int substeps = 50;
    Eigen::Index burn_in = 100;
    std::vector<double> lorenz_dts{0.1, 0.5};
    Eigen::Index n_train = 6000;
    Eigen::Index n_verify = 500;
    std::filesystem::path data_path;
    std::string data_format = "noaa-monthly-grid";
    std::string train_start = "1950-01";
    std::string train_end = "1999-12";
    std::string verify_start = "2000-01";
    std::string verify_end = "2013-09";
    int lags = 5;

    // Basis and operator.
    Eigen::Index M = 400;
    int k0 = 8;
    Eigen::Index neighbor_cap = 512;
    Eigen::Index stride = 1;
    bool retain_P = true;
    bool spectral_clamp = false;
    EigenSolverKind eigensolver = EigenSolverKind::Auto;
    Eigen::Index dense_limit = 4000;

    // Forecasting.
    double init_variance = 0.1;
    double max_lead_time = 10.0;  // time units (months for nino34)
    Eigen::Index ensemble_size = 10000;
    int local_linear_k = 15;
    int trajectory_lead = 14;  // nino34: lead of the exported trajectory
    bool write_densities = false;
    bool dump_tuning = false;
};

ExperimentConfig default_config(ExperimentKind kind, bool paper_scale);

/// Parses "key = value" lines; '#' starts a comment. Throws on malformed lines
/// and duplicate keys.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Sets one field from text. Throws std::invalid_argument for unknown keys or bad values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Defaults for the file's `experiment` and `paper_scale` keys (or the given
/// fallbacks), then every other key applied on top.
ExperimentConfig make_config(const std::map<std::string, std::string>& settings,
                             ExperimentKind fallback = ExperimentKind::Custom, bool paper_scale = false);

/// Range checks; throws std::invalid_argument naming the field.
void validate(const ExperimentConfig& config);

/// Flat JSON object with every field.
std::string config_json(const ExperimentConfig& config);

/// Parses "YYYY-MM".
void parse_year_month(const std::string& text, int& year, int& month);

}  // namespace diffcast
