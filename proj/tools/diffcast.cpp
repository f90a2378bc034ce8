// diffcast command-line front end.

#include "diffcast/baselines.hpp"
#include "diffcast/basis_io.hpp"
#include "diffcast/config.hpp"
#include "diffcast/csv.hpp"
#include "diffcast/dataset.hpp"
#include "diffcast/diffusion_basis.hpp"
#include "diffcast/diffusion_forecast.hpp"
#include "diffcast/evaluation.hpp"
#include "diffcast/experiments.hpp"
#include "diffcast/log.hpp"
#include "diffcast/simulators.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

using namespace diffcast;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool paper_scale = false;
    bool verbose = false;
};

// File settings over the defaults of `kind` (the subcommand's experiment, or the
// file's own `experiment` key for generic subcommands); flags override both.
ExperimentConfig resolve_config(const Globals& g, ExperimentKind kind) {
    std::map<std::string, std::string> settings;
    if (!g.config_path.empty()) settings = read_config_file(g.config_path);
    if (kind != ExperimentKind::Custom) settings.erase("experiment");
    if (g.paper_scale) settings["paper_scale"] = "true";
    ExperimentConfig config = make_config(settings, kind, g.paper_scale);
    if (g.seed) config.seed = *g.seed;
    if (!g.out_dir.empty()) config.out_dir = g.out_dir;
    validate(config);
    return config;
}

void write_manifest(const fs::path& dir, const std::string& command, json body) {
    json j;
    j["command"] = command;
    for (auto& [k, v] : body.items()) j[k] = v;
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write " + (dir / "manifest.json").string());
    out << j.dump(2) << '\n';
}

struct SeriesArgs {
    std::string path;
    std::string format = "csv";
    int lags = 1;
    double tau = 0.0;  // 0: take from the config

    void add(CLI::App* app) {
        app->add_option("--series", path, "Training series file")->required()->check(CLI::ExistingFile);
        app->add_option("--format", format, "single-column | two-column-dated | noaa-monthly-grid | csv");
        app->add_option("--lags", lags, "Delay-embedding lags")->check(CLI::PositiveNumber);
        app->add_option("--tau", tau, "Sampling interval (default from config)");
    }

    TimeSeries load(const ExperimentConfig& config) const {
        const TimeSeries raw = load_series(path, parse_series_format(format), tau > 0.0 ? tau : config.tau);
        return lags > 1 ? delay_embed(raw, lags) : raw;
    }
};

struct GaussianArgs {
    std::vector<double> mean;
    std::vector<double> variance;
    int leads = 10;

    void add(CLI::App* app) {
        app->add_option("--mean", mean, "Initial mean, comma separated")->required()->delimiter(',');
        app->add_option("--variance", variance, "Initial diagonal variance, comma separated (one value broadcasts)")
            ->required()
            ->delimiter(',');
        app->add_option("--leads", leads, "Number of lead steps")->check(CLI::NonNegativeNumber);
    }

    GaussianState state(Eigen::Index dim) const {
        if (static_cast<Eigen::Index>(mean.size()) != dim)
            throw std::invalid_argument("--mean has " + std::to_string(mean.size()) + " entries, expected " +
                                        std::to_string(dim));
        if (variance.size() != 1 && static_cast<Eigen::Index>(variance.size()) != dim)
            throw std::invalid_argument("--variance needs 1 or " + std::to_string(dim) + " entries");
        GaussianState s{Vector(dim), Matrix::Zero(dim, dim)};
        for (Eigen::Index i = 0; i < dim; ++i) {
            s.mean(i) = mean[i];
            s.cov(i, i) = variance.size() == 1 ? variance[0] : variance[i];
        }
        return s;
    }
};

std::vector<std::string> moment_header(Eigen::Index dim) {
    std::vector<std::string> h{"lead"};
    for (Eigen::Index i = 0; i < dim; ++i) h.push_back("mean_" + std::to_string(i));
    for (Eigen::Index i = 0; i < dim; ++i) h.push_back("stdev_" + std::to_string(i));
    return h;
}

void write_moments(const fs::path& path, const std::vector<double>& leads, const std::vector<Vector>& mean,
                   const std::vector<Vector>& variance) {
    const Eigen::Index dim = mean.front().size();
    CsvWriter out(path, moment_header(dim));
    for (std::size_t k = 0; k < leads.size(); ++k) {
        std::vector<double> row{leads[k]};
        for (Eigen::Index i = 0; i < dim; ++i) row.push_back(mean[k](i));
        for (Eigen::Index i = 0; i < dim; ++i) row.push_back(std::sqrt(std::max(variance[k](i), 0.0)));
        out.write(row);
    }
}

std::vector<double> eigen_to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// --- subcommands ---------------------------------------------------------

void cmd_simulate(const Globals& g, const std::string& model, Eigen::Index n, double dt, int substeps) {
    const bool torus = model == "torus";
    ExperimentConfig config = resolve_config(g, torus ? ExperimentKind::Torus : ExperimentKind::Lorenz63);
    fs::create_directories(config.out_dir);
    const std::uint64_t seed = derive_seed(config.seed, 1);
    json m;
    m["seed"] = config.seed;
    m["model"] = model;
    if (torus) {
        n = n > 0 ? n : config.n_samples;
        dt = dt > 0 ? dt : config.tau;
        substeps = substeps > 0 ? substeps : config.substeps;
        const TorusData data = simulate_torus(n, dt, substeps, seed, config.burn_in);
        save_series_csv(data.embedded, config.out_dir / "series.csv");
        save_series_csv(data.intrinsic, config.out_dir / "intrinsic.csv");
        m["parameters"] = {{"n_samples", n}, {"dt", dt}, {"substeps", substeps}, {"burn_in", config.burn_in}};
    } else {
        n = n > 0 ? n : config.n_train + config.n_verify;
        dt = dt > 0 ? dt : config.lorenz_dts.front();
        const LorenzParameters p;
        save_series_csv(simulate_lorenz63(n, dt, seed), config.out_dir / "series.csv");
        m["parameters"] = {{"n_samples", n},         {"dt", dt},     {"max_step", 0.01}, {"transient_steps", 1000},
                           {"sigma", p.sigma},       {"rho", p.rho}, {"beta", p.beta}};
    }
    write_manifest(config.out_dir, "simulate", m);
    std::printf("wrote %s\n", (config.out_dir / "series.csv").string().c_str());
}

struct BasisArgs {
    SeriesArgs series;
    std::optional<Eigen::Index> M, neighbor_cap;
    std::optional<std::string> eigensolver;
    bool paper_literal = false;
    bool dump_tuning = false;
};

void cmd_build_basis(const Globals& g, const BasisArgs& a) {
    ExperimentConfig config = resolve_config(g, ExperimentKind::Custom);
    if (a.M) config.M = *a.M;
    if (a.neighbor_cap) config.neighbor_cap = *a.neighbor_cap;
    if (a.eigensolver) config.eigensolver = parse_eigen_solver(*a.eigensolver);
    if (a.paper_literal) config.retain_P = false;
    validate(config);
    const TimeSeries ts = a.series.load(config);
    fs::create_directories(config.out_dir);
    const LearnedBasis learned = learn_basis(ts, basis_options(config));
    json meta = json::parse(learned_basis_metadata(learned));
    meta["tau"] = ts.tau();
    meta["lags"] = a.series.lags;
    meta["series"] = a.series.path;
    meta["retain_P"] = config.retain_P;
    save_basis(learned.basis, config.out_dir / "basis.bin", meta.dump());
    if (a.dump_tuning || config.dump_tuning) {
        save_tuning_curve(learned.kde_tuning, config.out_dir / "tuning_kde.csv");
        save_tuning_curve(learned.vb_tuning, config.out_dir / "tuning_vb.csv");
    }
    const BasisDiagnostics d = diagnose(learned.basis);
    json m;
    m["config"] = json::parse(config_json(config));
    m["basis"] = meta;
    m["diagnostics"] = {{"orthonormality_error", d.orthonormality_error},
                        {"lambda0", d.lambda0},
                        {"lambda1", d.lambda1},
                        {"phi0_deviation", d.phi0_deviation}};
    m["lambda"] = eigen_to_std(learned.basis.lambda);
    write_manifest(config.out_dir, "build-basis", m);
    std::printf("N = %ld, M = %ld, d = %.4g, eps = %.4g, lambda_1 = %.4g\n", static_cast<long>(learned.basis.size()),
                static_cast<long>(learned.basis.M()), learned.basis.d, learned.basis.eps, d.lambda1);
}

double sidecar_tau(const fs::path& basis_path) {
    std::ifstream in(basis_path.string() + ".json");
    if (!in) return 0.0;
    const json j = json::parse(in);
    if (j.contains("metadata") && j["metadata"].contains("tau")) return j["metadata"]["tau"].get<double>();
    return 0.0;
}

void cmd_train(const Globals& g, const std::string& basis_path, double tau, std::optional<Eigen::Index> stride,
               bool clamp) {
    ExperimentConfig config = resolve_config(g, ExperimentKind::Custom);
    if (stride) config.stride = *stride;
    if (tau <= 0.0) tau = sidecar_tau(basis_path);
    if (tau <= 0.0) tau = config.tau;
    const DiffusionBasis basis = load_basis(basis_path);
    ShiftOperator op = estimate_shift_operator(basis, tau, config.stride);
    const bool clamped = (clamp || config.spectral_clamp) && apply_spectral_clamp(op);
    fs::create_directories(config.out_dir);
    save_operator(op, config.out_dir / "operator.bin");
    json m;
    m["basis"] = basis_path;
    m["tau"] = tau;
    m["stride"] = config.stride;
    m["n_pairs"] = op.n_pairs;
    m["spectral_clamp_applied"] = clamped;
    m["A00"] = op.A(0, 0);
    write_manifest(config.out_dir, "train", m);
    std::printf("wrote %s (M = %ld, %ld pairs)\n", (config.out_dir / "operator.bin").string().c_str(),
                static_cast<long>(op.A.rows()), static_cast<long>(op.n_pairs));
}

void cmd_forecast(const Globals& g, const std::string& basis_path, const std::string& op_path, const SeriesArgs& s,
                  const GaussianArgs& ga, bool write_density) {
    ExperimentConfig config = resolve_config(g, ExperimentKind::Custom);
    const DiffusionBasis basis = load_basis(basis_path);
    const ShiftOperator op = load_operator(op_path);
    SeriesArgs series = s;
    if (series.tau <= 0.0) series.tau = op.tau;
    const TimeSeries ts = series.load(config);
    if (ts.size() != basis.size())
        throw std::invalid_argument("series has " + std::to_string(ts.size()) + " points but the basis has " +
                                    std::to_string(basis.size()));
    const GaussianState init = ga.state(ts.dim());
    const Vector p0 = gaussian_values(ts.points(), init.mean, init.cov.diagonal());
    const DensityCoefficients c0 = project_density(p0, basis);
    const MomentProjector projector(basis, ts.points());
    const MomentForecast f = forecast(c0, op, projector, ga.leads);
    fs::create_directories(config.out_dir);
    write_moments(config.out_dir / "forecast.csv", f.lead_times, f.mean, f.variance);
    if (write_density || config.write_densities) {
        std::vector<std::string> header{"lead"};
        for (Eigen::Index i = 0; i < basis.size(); ++i) header.push_back("p_" + std::to_string(i));
        CsvWriter out(config.out_dir / "densities.csv", header);
        DensityCoefficients c = c0;
        for (int k = 0; k <= ga.leads; ++k) {
            if (k > 0) c = step(c, op, 1);
            std::vector<double> row{c.t};
            const Vector p = display_density(reconstruct_density(c, basis), basis);
            row.insert(row.end(), p.data(), p.data() + p.size());
            out.write(row);
        }
    }
    json m;
    m["basis"] = basis_path;
    m["operator"] = op_path;
    m["series"] = series.path;
    m["initial_mean"] = ga.mean;
    m["initial_variance"] = ga.variance;
    m["leads"] = ga.leads;
    m["variance_clamped"] = f.clamped;
    write_manifest(config.out_dir, "forecast", m);
    std::printf("wrote %s\n", (config.out_dir / "forecast.csv").string().c_str());
}

struct BaselineArgs {
    std::string method = "local-linear";
    SeriesArgs series;
    GaussianArgs gaussian;
    std::string model = "lorenz63";
    Eigen::Index ensemble_size = 0;
    double dt = 0.0;
    int substeps = 0;
};

void cmd_baseline(const Globals& g, BaselineArgs a) {
    ExperimentConfig config = resolve_config(g, ExperimentKind::Custom);
    fs::create_directories(config.out_dir);
    json m;
    m["method"] = a.method;
    m["initial_mean"] = a.gaussian.mean;
    m["initial_variance"] = a.gaussian.variance;
    m["leads"] = a.gaussian.leads;
    if (a.method == "ensemble") {
        const Eigen::Index n_ens = a.ensemble_size > 0 ? a.ensemble_size : config.ensemble_size;
        const std::uint64_t seed = derive_seed(config.seed, 3);
        MomentForecast f;
        if (a.model == "torus") {
            const double dt = a.dt > 0 ? a.dt : config.tau;
            const int substeps = a.substeps > 0 ? a.substeps : config.substeps;
            f = ensemble_forecast(torus_model(), a.gaussian.state(2), n_ens, dt, substeps, a.gaussian.leads, seed,
                                  [](const Vector& x) { return torus_embedding(x(0), x(1)); });
        } else if (a.model == "lorenz63") {
            const double dt = a.dt > 0 ? a.dt : config.lorenz_dts.front();
            f = ensemble_forecast(lorenz63_model(), a.gaussian.state(3), n_ens, dt, a.gaussian.leads, seed);
        } else {
            throw std::invalid_argument("unknown model '" + a.model + "' (expected torus or lorenz63)");
        }
        write_moments(config.out_dir / "forecast.csv", f.lead_times, f.mean, f.variance);
        m["model"] = a.model;
        m["ensemble_size"] = n_ens;
        m["seed"] = config.seed;
    } else if (a.method == "local-linear" || a.method == "iterated") {
        if (a.series.path.empty()) throw std::invalid_argument("--series is required for " + a.method);
        const TimeSeries ts = a.series.load(config);
        const GaussianState init = a.gaussian.state(ts.dim());
        const int k = config.local_linear_k;
        const auto path = a.method == "iterated" ? iterated_local_linear_path(ts, init, a.gaussian.leads, k)
                                                 : local_linear_path(ts, init, a.gaussian.leads, k);
        std::vector<double> leads;
        std::vector<Vector> mean, variance;
        for (std::size_t n = 0; n < path.size(); ++n) {
            leads.push_back(static_cast<double>(n) * ts.tau());
            mean.push_back(path[n].mean);
            variance.push_back(path[n].cov.diagonal());
        }
        write_moments(config.out_dir / "forecast.csv", leads, mean, variance);
        m["series"] = a.series.path;
        m["k"] = k;
    } else {
        throw std::invalid_argument("unknown method '" + a.method + "' (expected local-linear, iterated or ensemble)");
    }
    write_manifest(config.out_dir, "baseline", m);
    std::printf("wrote %s\n", (config.out_dir / "forecast.csv").string().c_str());
}

// Forecast table: one row per (origin, lead) with columns origin, lead,
// mean_0..mean_{n-1} and optionally stdev_0..stdev_{n-1}. The truth for a row
// is row origin + round(lead / tau) of the truth series.
void cmd_evaluate(const Globals& g, const SeriesArgs& truth_args, const std::string& table_path) {
    ExperimentConfig config = resolve_config(g, ExperimentKind::Custom);
    const TimeSeries truth = truth_args.load(config);
    const CsvTable table = read_csv(table_path);
    const std::size_t origin_col = table.column("origin"), lead_col = table.column("lead");
    std::vector<std::size_t> mean_cols, stdev_cols;
    for (Eigen::Index i = 0; i < truth.dim(); ++i) {
        mean_cols.push_back(table.column("mean_" + std::to_string(i)));
        const auto it = std::find(table.columns.begin(), table.columns.end(), "stdev_" + std::to_string(i));
        if (it != table.columns.end()) stdev_cols.push_back(static_cast<std::size_t>(it - table.columns.begin()));
    }
    const bool has_stdev = stdev_cols.size() == mean_cols.size();
    std::map<double, std::vector<const std::vector<double>*>> by_lead;
    for (const auto& row : table.rows) by_lead[row[lead_col]].push_back(&row);
    std::vector<double> leads;
    std::vector<Matrix> t, f, s;
    for (const auto& [lead, rows] : by_lead) {
        const auto shift = static_cast<Eigen::Index>(std::llround(lead / truth.tau()));
        Matrix tm(static_cast<Eigen::Index>(rows.size()), truth.dim()), fm = tm, sm = tm;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            const auto& row = *rows[r];
            const Eigen::Index target = static_cast<Eigen::Index>(std::llround(row[origin_col])) + shift;
            if (target < 0 || target >= truth.size())
                throw std::out_of_range("evaluate: origin " + std::to_string(row[origin_col]) + " at lead " +
                                        std::to_string(lead) + " is outside the truth series");
            tm.row(static_cast<Eigen::Index>(r)) = truth.row(target);
            for (Eigen::Index i = 0; i < truth.dim(); ++i) {
                fm(static_cast<Eigen::Index>(r), i) = row[mean_cols[i]];
                if (has_stdev) sm(static_cast<Eigen::Index>(r), i) = row[stdev_cols[i]];
            }
        }
        leads.push_back(lead);
        t.push_back(tm);
        f.push_back(fm);
        if (has_stdev) s.push_back(sm);
    }
    const SkillReport report = rmse_and_correlation(leads, t, f, s, climatological_stdev(truth.points()));
    fs::create_directories(config.out_dir);
    save_skill_report(report, config.out_dir / "skill.csv");
    json m;
    m["truth"] = truth_args.path;
    m["forecasts"] = table_path;
    m["climatological_stdev"] = report.climatological_stdev;
    write_manifest(config.out_dir, "evaluate", m);
    std::printf("wrote %s (%zu leads)\n", (config.out_dir / "skill.csv").string().c_str(), leads.size());
}

void cmd_experiment(const Globals& g, const std::string& name) {
    const ExperimentKind kind = parse_experiment(name);
    const ExperimentConfig config = resolve_config(g, kind);
    switch (kind) {
    case ExperimentKind::Torus: {
        const TorusReport r = run_torus_experiment(config);
        std::printf("torus: max |dmean|/clim x %.3f z %.3f, max |dstdev|/clim x %.3f z %.3f\n", r.max_mean_error(0),
                    r.max_mean_error(2), r.max_stdev_error(0), r.max_stdev_error(2));
        break;
    }
    case ExperimentKind::Lorenz63: {
        const LorenzReport r = run_lorenz_experiment(config);
        for (const LorenzRun& run : r.runs)
            std::printf("lorenz63 dt %.3g: final RMSE diffusion %.3f, local-linear %.3f, iterated %.3f, ensemble %.3f "
                        "(clim %.3f)\n",
                        run.dt, run.diffusion.rmse.back(), run.direct.rmse.back(), run.iterated.rmse.back(),
                        run.ensemble.rmse.back(), run.diffusion.climatological_stdev);
        break;
    }
    case ExperimentKind::Nino34: {
        const NinoReport r = run_nino_experiment(config);
        for (std::size_t i = 0; i < r.skill.lead_times.size(); ++i)
            if (std::lround(r.skill.lead_times[i]) == config.trajectory_lead)
                std::printf("nino34 lead %d: RMSE %.3f, correlation %.3f\n", config.trajectory_lead, r.skill.rmse[i],
                            r.skill.correlation[i]);
        break;
    }
    case ExperimentKind::Custom:
        throw std::invalid_argument("experiment must be torus, lorenz63 or nino34");
    }
    std::printf("outputs in %s\n", config.out_dir.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diffcast: nonparametric density forecasting with diffusion maps"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "Flat key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master random seed");
    app.add_option("--out-dir", g.out_dir, "Output directory");
    app.add_flag("--paper-scale", g.paper_scale, "Use full-size experiment defaults");
    app.add_flag("-v,--verbose", g.verbose, "Progress messages on stderr");

    auto* simulate = app.add_subcommand("simulate", "Generate a trajectory of a built-in model");
    std::string sim_model;
    Eigen::Index sim_n = 0;
    double sim_dt = 0.0;
    int sim_substeps = 0;
    simulate->add_option("model", sim_model, "torus | lorenz63")->required()->check(CLI::IsMember({"torus", "lorenz63"}));
    simulate->add_option("--n", sim_n, "Number of samples");
    simulate->add_option("--dt", sim_dt, "Sampling interval");
    simulate->add_option("--substeps", sim_substeps, "Euler-Maruyama substeps per sample (torus)");

    auto* build = app.add_subcommand("build-basis", "Learn the diffusion basis of a series");
    BasisArgs basis_args;
    basis_args.series.add(build);
    build->add_option("--M", basis_args.M, "Number of eigenfunctions");
    build->add_option("--neighbor-cap", basis_args.neighbor_cap, "Kernel neighbors per point");
    build->add_option("--eigensolver", basis_args.eigensolver, "auto | dense | lanczos");
    build->add_flag("--paper-literal", basis_args.paper_literal, "Use the symmetric eigenvectors directly");
    build->add_flag("--dump-tuning", basis_args.dump_tuning, "Write the bandwidth tuning curves");

    auto* train = app.add_subcommand("train", "Estimate the shift operator on a basis");
    std::string train_basis;
    double train_tau = 0.0;
    std::optional<Eigen::Index> train_stride;
    bool train_clamp = false;
    train->add_option("--basis", train_basis, "basis.bin")->required()->check(CLI::ExistingFile);
    train->add_option("--tau", train_tau, "Sampling interval (default from the basis sidecar)");
    train->add_option("--stride", train_stride, "Use every stride-th pair");
    train->add_flag("--spectral-clamp", train_clamp, "Scale A to unit spectral norm if larger");

    auto* fc = app.add_subcommand("forecast", "Forecast moments from a Gaussian initial density");
    std::string fc_basis, fc_op;
    SeriesArgs fc_series;
    GaussianArgs fc_gauss;
    bool fc_density = false;
    fc->add_option("--basis", fc_basis, "basis.bin")->required()->check(CLI::ExistingFile);
    fc->add_option("--operator", fc_op, "operator.bin")->required()->check(CLI::ExistingFile);
    fc_series.add(fc);
    fc_gauss.add(fc);
    fc->add_flag("--write-density", fc_density, "Also write the density at every training point");

    auto* bl = app.add_subcommand("baseline", "Local-linear or true-model ensemble forecasts");
    BaselineArgs bl_args;
    bl->add_option("--method", bl_args.method, "local-linear | iterated | ensemble")
        ->check(CLI::IsMember({"local-linear", "iterated", "ensemble"}));
    bl->add_option("--series", bl_args.series.path, "Training series (local-linear methods)")->check(CLI::ExistingFile);
    bl->add_option("--format", bl_args.series.format, "Series format");
    bl->add_option("--lags", bl_args.series.lags, "Delay-embedding lags")->check(CLI::PositiveNumber);
    bl->add_option("--tau", bl_args.series.tau, "Sampling interval");
    bl_args.gaussian.add(bl);
    bl->add_option("--model", bl_args.model, "Ensemble model: torus (state theta, phi) | lorenz63");
    bl->add_option("--ensemble-size", bl_args.ensemble_size, "Ensemble members");
    bl->add_option("--dt", bl_args.dt, "Ensemble sampling interval");
    bl->add_option("--substeps", bl_args.substeps, "Ensemble Euler-Maruyama substeps (torus)");

    auto* ev = app.add_subcommand("evaluate", "RMSE and correlation of a forecast table against a truth series");
    SeriesArgs ev_truth;
    std::string ev_table;
    ev->add_option("--truth", ev_truth.path, "Truth series")->required()->check(CLI::ExistingFile);
    ev->add_option("--format", ev_truth.format, "Truth series format");
    ev->add_option("--lags", ev_truth.lags, "Delay-embedding lags")->check(CLI::PositiveNumber);
    ev->add_option("--tau", ev_truth.tau, "Sampling interval");
    ev->add_option("--forecasts", ev_table, "CSV with origin, lead, mean_i[, stdev_i]")
        ->required()
        ->check(CLI::ExistingFile);

    auto* ex = app.add_subcommand("experiment", "Run a complete experiment");
    std::string ex_name;
    ex->add_option("name", ex_name, "torus | lorenz63 | nino34")
        ->required()
        ->check(CLI::IsMember({"torus", "lorenz63", "nino34"}));

    CLI11_PARSE(app, argc, argv);
    if (g.verbose) log::set_level(log::Level::Info);

    try {
        if (*simulate) cmd_simulate(g, sim_model, sim_n, sim_dt, sim_substeps);
        else if (*build) cmd_build_basis(g, basis_args);
        else if (*train) cmd_train(g, train_basis, train_tau, train_stride, train_clamp);
        else if (*fc) cmd_forecast(g, fc_basis, fc_op, fc_series, fc_gauss, fc_density);
        else if (*bl) cmd_baseline(g, bl_args);
        else if (*ev) cmd_evaluate(g, ev_truth, ev_table);
        else if (*ex) cmd_experiment(g, ex_name);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "diffcast: %s\n", e.what());
        return 1;
    }
    return 0;
}
