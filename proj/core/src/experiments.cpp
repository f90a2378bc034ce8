#include "diffcast/experiments.hpp"

#include "diffcast/baselines.hpp"
#include "diffcast/basis_io.hpp"
#include "diffcast/csv.hpp"
#include "diffcast/diffusion_forecast.hpp"
#include "diffcast/log.hpp"
#include "diffcast/simulators.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace diffcast {

using json = nlohmann::ordered_json;

BasisDiagnostics diagnose(const DiffusionBasis& basis) {
    BasisDiagnostics out;
    const Matrix gram = basis.phi.transpose() * basis.phi / static_cast<double>(basis.size());
    out.orthonormality_error = (gram - Matrix::Identity(basis.M(), basis.M())).cwiseAbs().maxCoeff();
    out.lambda0 = basis.lambda(0);
    out.lambda1 = basis.M() > 1 ? basis.lambda(1) : 0.0;
    const double mean0 = basis.phi.col(0).mean();
    out.phi0_deviation = (basis.phi.col(0).array() / mean0 - 1.0).abs().maxCoeff();
    return out;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed ^ (tag * 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

BasisOptions basis_options(const ExperimentConfig& config) {
    BasisOptions o;
    o.M = config.M;
    o.k0 = config.k0;
    o.neighbor_cap = config.neighbor_cap;
    o.retain_P = config.retain_P;
    o.eigen.kind = config.eigensolver;
    o.eigen.dense_limit = config.dense_limit;
    o.eigen.seed = derive_seed(config.seed, 0xE16E);
    return o;
}

namespace {

enum SeedTag : std::uint64_t { kSimulate = 1, kInitialMean = 2, kEnsemble = 3, kPerturb = 4 };

json diagnostics_json(const BasisDiagnostics& d) {
    return {{"orthonormality_error", d.orthonormality_error},
            {"lambda0", d.lambda0},
            {"lambda1", d.lambda1},
            {"phi0_deviation", d.phi0_deviation}};
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json manifest(const ExperimentConfig& config) {
    json j;
    j["config"] = json::parse(config_json(config));
    return j;
}

ShiftOperator train_operator(const ExperimentConfig& config, const DiffusionBasis& basis, double tau) {
    ShiftOperator op = estimate_shift_operator(basis, tau, config.stride);
    if (config.spectral_clamp) apply_spectral_clamp(op);
    return op;
}

int lead_count(double max_lead_time, double tau) {
    return static_cast<int>(std::floor(max_lead_time / tau + 1e-9));
}

std::string dt_tag(double dt) {
    std::ostringstream s;
    s << dt;
    return s.str();
}

// Wrapped normal density on the circle, summed over the nearest images.
double wrapped_normal(double x, double mean, double variance) {
    double acc = 0.0;
    for (int k = -2; k <= 2; ++k) {
        const double d = x - mean + 2.0 * std::numbers::pi * k;
        acc += std::exp(-0.5 * d * d / variance);
    }
    return acc / std::sqrt(2.0 * std::numbers::pi * variance);
}

}  // namespace

TorusReport run_torus_experiment(const ExperimentConfig& config) {
    validate(config);
    std::filesystem::create_directories(config.out_dir);
    const TorusData data =
        simulate_torus(config.n_samples, config.tau, config.substeps, derive_seed(config.seed, kSimulate), config.burn_in);
    save_series_csv(data.embedded, config.out_dir / "series.csv");

    const LearnedBasis learned = learn_basis(data.embedded, basis_options(config));
    if (config.dump_tuning) {
        save_tuning_curve(learned.kde_tuning, config.out_dir / "tuning_kde.csv");
        save_tuning_curve(learned.vb_tuning, config.out_dir / "tuning_vb.csv");
    }
    const DiffusionBasis& basis = learned.basis;
    const ShiftOperator op = train_operator(config, basis, config.tau);

    Philox4x32 rng(derive_seed(config.seed, kInitialMean));
    const double theta0 = 2.0 * std::numbers::pi * rng.uniform();
    const double phi0 = 2.0 * std::numbers::pi * rng.uniform();

    // Density of the (theta, phi) Gaussian with respect to the torus volume
    // element, which is (2 + sin theta) dtheta dphi in the embedding.
    const Matrix& angles = data.intrinsic.points();
    Vector p0(angles.rows());
    for (Eigen::Index i = 0; i < angles.rows(); ++i)
        p0(i) = wrapped_normal(angles(i, 0), theta0, config.init_variance) *
                wrapped_normal(angles(i, 1), phi0, config.init_variance) / (2.0 + std::sin(angles(i, 0)));

    const int n_leads = lead_count(config.max_lead_time, config.tau);
    const MomentProjector projector(basis, data.embedded.points());
    const MomentForecast df = forecast(project_density(p0, basis), op, projector, n_leads);

    GaussianState init{Vector{{theta0, phi0}}, config.init_variance * Matrix::Identity(2, 2)};
    const SDEModel model = torus_model();
    const MomentForecast ens =
        ensemble_forecast(model, init, config.ensemble_size, config.tau, config.substeps, n_leads,
                          derive_seed(config.seed, kEnsemble), [](const Vector& x) { return torus_embedding(x(0), x(1)); });

    TorusReport report;
    report.basis = diagnose(basis);
    report.d_est = learned.vb_tuning.d_est;
    report.lead_times = df.lead_times;
    const auto leads = static_cast<Eigen::Index>(df.lead_times.size());
    report.df_mean.resize(leads, 3);
    report.df_stdev.resize(leads, 3);
    report.ens_mean.resize(leads, 3);
    report.ens_stdev.resize(leads, 3);
    for (Eigen::Index l = 0; l < leads; ++l) {
        report.df_mean.row(l) = df.mean[l].transpose();
        report.df_stdev.row(l) = df.variance[l].cwiseSqrt().transpose();
        report.ens_mean.row(l) = ens.mean[l].transpose();
        report.ens_stdev.row(l) = ens.variance[l].cwiseSqrt().transpose();
    }
    const Matrix& x = data.embedded.points();
    report.climatological_stdev =
        ((x.rowwise() - x.colwise().mean()).cwiseAbs2().colwise().sum() / static_cast<double>(x.rows()))
            .cwiseSqrt()
            .transpose();
    report.max_mean_error = ((report.df_mean - report.ens_mean).cwiseAbs().colwise().maxCoeff().array() /
                             report.climatological_stdev.transpose().array())
                                .transpose();
    report.max_stdev_error = ((report.df_stdev - report.ens_stdev).cwiseAbs().colwise().maxCoeff().array() /
                              report.climatological_stdev.transpose().array())
                                 .transpose();

    CsvWriter out(config.out_dir / "moments.csv",
                  {"lead", "df_mean_x", "df_mean_y", "df_mean_z", "df_std_x", "df_std_y", "df_std_z", "ens_mean_x",
                   "ens_mean_y", "ens_mean_z", "ens_std_x", "ens_std_y", "ens_std_z"});
    for (Eigen::Index l = 0; l < leads; ++l) {
        std::vector<double> row{report.lead_times[l]};
        for (const Matrix* m : {&report.df_mean, &report.df_stdev, &report.ens_mean, &report.ens_stdev})
            for (int c = 0; c < 3; ++c) row.push_back((*m)(l, c));
        out.write(row);
    }

    json summary;
    summary["initial_mean"] = {theta0, phi0};
    summary["climatological_stdev"] = std::vector<double>(report.climatological_stdev.begin(), report.climatological_stdev.end());
    summary["max_mean_error"] = std::vector<double>(report.max_mean_error.begin(), report.max_mean_error.end());
    summary["max_stdev_error"] = std::vector<double>(report.max_stdev_error.begin(), report.max_stdev_error.end());
    summary["basis"] = diagnostics_json(report.basis);
    summary["variance_clamped"] = df.clamped;
    write_json(config.out_dir / "summary.json", summary);

    json m = manifest(config);
    m["basis"] = json::parse(learned_basis_metadata(learned));
    write_json(config.out_dir / "manifest.json", m);
    return report;
}

LorenzReport run_lorenz_experiment(const ExperimentConfig& config) {
    validate(config);
    std::filesystem::create_directories(config.out_dir);
    LorenzReport report;
    json m = manifest(config);
    std::uint64_t dt_index = 0;
    for (double dt : config.lorenz_dts) {
        ++dt_index;
        const int n_leads = lead_count(config.max_lead_time, dt);
        const Eigen::Index total = config.n_train + config.n_verify + n_leads;
        const TimeSeries series = simulate_lorenz63(total, dt, derive_seed(config.seed, kSimulate * 100 + dt_index));
        const auto [train, rest] = split(series, config.n_train);
        const std::string tag = dt_tag(dt);
        save_series_csv(series, config.out_dir / ("series_dt" + tag + ".csv"));

        const LearnedBasis learned = learn_basis(train, basis_options(config));
        const DiffusionBasis& basis = learned.basis;
        const ShiftOperator op = train_operator(config, basis, dt);
        const MomentProjector projector(basis, train.points());

        // Perturbed initial states, one noise stream per origin.
        const Eigen::Index n_origins = config.n_verify;
        Matrix starts(n_origins, 3);
        const double sd = std::sqrt(config.init_variance);
        for (Eigen::Index o = 0; o < n_origins; ++o) {
            NormalSampler noise(derive_seed(config.seed, kPerturb * 100 + dt_index), static_cast<std::uint64_t>(o));
            for (int c = 0; c < 3; ++c) starts(o, c) = rest.points()(o, c) + sd * noise();
        }
        const Vector variance = Vector::Constant(3, config.init_variance);

        Matrix p0(train.size(), n_origins);
        for (Eigen::Index o = 0; o < n_origins; ++o)
            p0.col(o) = gaussian_values(train.points(), starts.row(o).transpose(), variance);
        const BatchMoments df = forecast_batch(project_densities(p0, basis), op, projector, n_leads);

        std::vector<Matrix> truth(n_leads + 1, Matrix(n_origins, 3));
        std::vector<Matrix> dm(n_leads + 1, Matrix(n_origins, 3)), ds(n_leads + 1, Matrix(n_origins, 3));
        std::vector<Matrix> lm = dm, ls = dm, im = dm, is = dm, em = dm, es = dm;
        const ODEModel model = lorenz63_model();
        for (Eigen::Index o = 0; o < n_origins; ++o) {
            const GaussianState init{starts.row(o).transpose(), config.init_variance * Matrix::Identity(3, 3)};
            const auto direct = local_linear_path(train, init, n_leads, config.local_linear_k);
            const auto iterated = iterated_local_linear_path(train, init, n_leads, config.local_linear_k);
            MomentForecast ens;
            if (config.ensemble_size > 1)
                ens = ensemble_forecast(model, init, config.ensemble_size, dt, n_leads,
                                        derive_seed(derive_seed(config.seed, kEnsemble * 100 + dt_index), o));
            for (int l = 0; l <= n_leads; ++l) {
                truth[l].row(o) = rest.points().row(o + l);
                dm[l].row(o) = df.mean[l].row(o);
                ds[l].row(o) = df.variance[l].row(o).cwiseSqrt();
                lm[l].row(o) = direct[l].mean.transpose();
                ls[l].row(o) = direct[l].cov.diagonal().cwiseMax(0.0).cwiseSqrt().transpose();
                im[l].row(o) = iterated[l].mean.transpose();
                is[l].row(o) = iterated[l].cov.diagonal().cwiseMax(0.0).cwiseSqrt().transpose();
                if (config.ensemble_size > 1) {
                    em[l].row(o) = ens.mean[l].transpose();
                    es[l].row(o) = ens.variance[l].cwiseSqrt().transpose();
                }
            }
        }

        std::vector<double> lead_times;
        for (int l = 0; l <= n_leads; ++l) lead_times.push_back(l * dt);
        const double clim = climatological_stdev(train.points());
        LorenzRun run;
        run.dt = dt;
        run.basis = diagnose(basis);
        run.d_est = learned.vb_tuning.d_est;
        run.diffusion = rmse_and_correlation(lead_times, truth, dm, ds, clim);
        run.direct = rmse_and_correlation(lead_times, truth, lm, ls, clim);
        run.iterated = rmse_and_correlation(lead_times, truth, im, is, clim);
        save_skill_report(run.diffusion, config.out_dir / ("skill_diffusion_dt" + tag + ".csv"));
        save_skill_report(run.direct, config.out_dir / ("skill_local_linear_dt" + tag + ".csv"));
        save_skill_report(run.iterated, config.out_dir / ("skill_iterated_dt" + tag + ".csv"));
        if (config.ensemble_size > 1) {
            run.ensemble = rmse_and_correlation(lead_times, truth, em, es, clim);
            save_skill_report(run.ensemble, config.out_dir / ("skill_ensemble_dt" + tag + ".csv"));
        }
        m["runs"].push_back({{"dt", dt},
                             {"n_leads", n_leads},
                             {"basis", json::parse(learned_basis_metadata(learned))},
                             {"diagnostics", diagnostics_json(run.basis)}});
        report.runs.push_back(std::move(run));
    }
    write_json(config.out_dir / "manifest.json", m);
    return report;
}

std::filesystem::path nino_data_path(const ExperimentConfig& config) {
    if (!config.data_path.empty()) return config.data_path;
    if (const char* env = std::getenv("DIFFCAST_NINO34_DATA")) return env;
    return {};
}

NinoReport run_nino_experiment(const ExperimentConfig& config) {
    validate(config);
    const std::filesystem::path path = nino_data_path(config);
    if (path.empty() || !std::filesystem::exists(path))
        throw std::runtime_error(
            "Nino-3.4 data file not found" + (path.empty() ? std::string() : " at " + path.string()) +
            ". Download the monthly Nino 3.4 index from NOAA PSL "
            "(https://psl.noaa.gov/gcos_wgsp/Timeseries/Data/nino34.long.data) and set data_path in the config "
            "or DIFFCAST_NINO34_DATA.");
    std::filesystem::create_directories(config.out_dir);

    const MonthlySeries monthly = load_monthly_series(path, parse_series_format(config.data_format));
    int y, mo;
    parse_year_month(config.train_start, y, mo);
    const Eigen::Index train_first = monthly.index_of(y, mo);
    parse_year_month(config.train_end, y, mo);
    const Eigen::Index train_last = monthly.index_of(y, mo);
    parse_year_month(config.verify_start, y, mo);
    const Eigen::Index verify_first = monthly.index_of(y, mo);
    parse_year_month(config.verify_end, y, mo);
    const Eigen::Index verify_last = monthly.index_of(y, mo);
    const Eigen::Index n = monthly.series.size();
    if (train_first < 0 || train_last >= n || train_last - train_first + 1 <= config.lags + config.k0)
        throw std::runtime_error("nino34: training window not covered by the data file");
    if (verify_last >= n || verify_first <= train_last)
        throw std::runtime_error("nino34: verification window not covered by the data file");

    const int n_leads = lead_count(config.max_lead_time, 1.0);
    const int L = config.lags;
    const TimeSeries embedded = delay_embed(monthly.series, L);
    // Embedded row r ends at raw month r + L - 1.
    const Eigen::Index train_rows = train_last - train_first + 1 - (L - 1);
    const TimeSeries train = embedded.slice(train_first, train_rows);

    const LearnedBasis learned = learn_basis(train, basis_options(config));
    const DiffusionBasis& basis = learned.basis;
    const ShiftOperator op = train_operator(config, basis, 1.0);
    const MomentProjector projector(basis, train.points());

    // Origins: every month whose forecast at some lead in 1..n_leads is valid
    // inside the verification window.
    const Eigen::Index origin_first = std::max<Eigen::Index>(verify_first - n_leads, L - 1);
    const Eigen::Index origin_last = verify_last - 1;
    const Eigen::Index n_origins = origin_last - origin_first + 1;
    const Vector variance = Vector::Constant(L, config.init_variance);
    const double sd = std::sqrt(config.init_variance);
    Matrix p0(train.size(), n_origins);
    for (Eigen::Index o = 0; o < n_origins; ++o) {
        NormalSampler noise(derive_seed(config.seed, kPerturb), static_cast<std::uint64_t>(o));
        Vector start = embedded.points().row(origin_first + o - (L - 1)).transpose();
        for (Eigen::Index c = 0; c < L; ++c) start(c) += sd * noise();
        p0.col(o) = gaussian_values(train.points(), start, variance);
    }
    const BatchMoments df = forecast_batch(project_densities(p0, basis), op, projector, n_leads);

    std::vector<double> lead_times;
    std::vector<Matrix> truth, mean, stdev;
    for (int l = 1; l <= n_leads; ++l) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index o = 0; o < n_origins; ++o) {
            const Eigen::Index target = origin_first + o + l;
            if (target >= verify_first && target <= verify_last) rows.push_back(o);
        }
        Matrix t(rows.size(), 1), f(rows.size(), 1), s(rows.size(), 1);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            t(r, 0) = monthly.series.points()(origin_first + rows[r] + l, 0);
            f(r, 0) = df.mean[l](rows[r], 0);
            s(r, 0) = std::sqrt(df.variance[l](rows[r], 0));
        }
        lead_times.push_back(l);
        truth.push_back(std::move(t));
        mean.push_back(std::move(f));
        stdev.push_back(std::move(s));
    }
    const Matrix verify_values = monthly.series.points().middleRows(verify_first, verify_last - verify_first + 1);
    NinoReport report;
    report.skill = rmse_and_correlation(lead_times, truth, mean, stdev, climatological_stdev(verify_values));
    report.basis = diagnose(basis);
    report.n_train = train.size();
    report.n_raw_train = train_last - train_first + 1;
    save_skill_report(report.skill, config.out_dir / "skill_diffusion.csv");

    if (config.trajectory_lead <= n_leads) {
        const int l = config.trajectory_lead;
        CsvWriter traj(config.out_dir / ("trajectory_lead" + std::to_string(l) + ".csv"),
                       {"year", "month", "truth", "mean", "stdev"});
        for (Eigen::Index o = 0; o < n_origins; ++o) {
            const Eigen::Index target = origin_first + o + l;
            if (target < verify_first || target > verify_last) continue;
            const int key = monthly.first_year * 12 + (monthly.first_month - 1) + static_cast<int>(target);
            traj.write({static_cast<double>(key / 12), static_cast<double>(key % 12 + 1),
                        monthly.series.points()(target, 0), df.mean[l](o, 0), std::sqrt(df.variance[l](o, 0))});
        }
    }
    json m = manifest(config);
    m["data_file"] = path.string();
    m["basis"] = json::parse(learned_basis_metadata(learned));
    m["diagnostics"] = diagnostics_json(report.basis);
    write_json(config.out_dir / "manifest.json", m);
    return report;
}

}  // namespace diffcast
