#include "diffcast/evaluation.hpp"

#include "diffcast/csv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace diffcast {

double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, bool* degenerate) {
    if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson: need two aligned samples");
    const Eigen::ArrayXd da = a.array() - a.mean(), db = b.array() - b.mean();
    const double saa = da.square().sum(), sbb = db.square().sum();
    // Relative threshold: a constant series leaves only rounding noise in its deviations.
    const double tiny = 1e-24 * std::max(1.0, std::max(a.squaredNorm(), b.squaredNorm()));
    if (saa <= tiny || sbb <= tiny) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    if (degenerate) *degenerate = false;
    return std::clamp((da * db).sum() / std::sqrt(saa * sbb), -1.0, 1.0);
}

double climatological_stdev(const Matrix& series) {
    if (series.rows() < 1) throw std::invalid_argument("climatological_stdev: empty series");
    const Eigen::RowVectorXd mean = series.colwise().mean();
    const double var = (series.rowwise() - mean).cwiseAbs2().sum() / static_cast<double>(series.size());
    return std::sqrt(var);
}

SkillReport rmse_and_correlation(const std::vector<double>& lead_times, const std::vector<Matrix>& truth,
                                 const std::vector<Matrix>& forecast, const std::vector<Matrix>& stdev,
                                 double climatological_stdev) {
    const std::size_t leads = lead_times.size();
    if (truth.size() != leads || forecast.size() != leads || (!stdev.empty() && stdev.size() != leads))
        throw std::invalid_argument("rmse_and_correlation: one entry per lead required");
    SkillReport report;
    report.lead_times = lead_times;
    report.climatological_stdev = climatological_stdev;
    for (std::size_t l = 0; l < leads; ++l) {
        const Matrix& t = truth[l];
        const Matrix& f = forecast[l];
        if (t.rows() != f.rows() || t.cols() != f.cols())
            throw std::invalid_argument("rmse_and_correlation: truth and forecast shapes differ");
        if (t.rows() < 2) throw std::invalid_argument("rmse_and_correlation: need at least 2 verification points");
        report.rmse.push_back(std::sqrt((t - f).squaredNorm() / static_cast<double>(t.size())));
        double corr = 0.0;
        bool any_degenerate = false;
        for (Eigen::Index c = 0; c < t.cols(); ++c) {
            bool degenerate = false;
            corr += pearson(f.col(c), t.col(c), &degenerate);
            any_degenerate = any_degenerate || degenerate;
        }
        report.correlation.push_back(corr / static_cast<double>(t.cols()));
        report.correlation_degenerate.push_back(any_degenerate);
        double sd = 0.0;
        if (!stdev.empty()) {
            if (stdev[l].rows() != t.rows() || stdev[l].cols() != t.cols())
                throw std::invalid_argument("rmse_and_correlation: stdev shape differs");
            sd = std::sqrt(stdev[l].squaredNorm() / static_cast<double>(t.size()));
        }
        report.mean_forecast_stdev.push_back(sd);
    }
    return report;
}

void save_skill_report(const SkillReport& report, const std::filesystem::path& path) {
    CsvWriter out(path, {"lead", "rmse", "correlation", "mean_stdev", "climatological_stdev", "degenerate"});
    for (std::size_t l = 0; l < report.lead_times.size(); ++l)
        out.write({report.lead_times[l], report.rmse[l], report.correlation[l], report.mean_forecast_stdev[l],
                   report.climatological_stdev, report.correlation_degenerate[l] ? 1.0 : 0.0});
}

SkillReport load_skill_report(const std::filesystem::path& path) {
    const CsvTable table = read_csv(path);
    const std::size_t lead = table.column("lead"), rmse = table.column("rmse"), corr = table.column("correlation"),
                      sd = table.column("mean_stdev"), clim = table.column("climatological_stdev"),
                      deg = table.column("degenerate");
    SkillReport report;
    for (const auto& row : table.rows) {
        report.lead_times.push_back(row[lead]);
        report.rmse.push_back(row[rmse]);
        report.correlation.push_back(row[corr]);
        report.mean_forecast_stdev.push_back(row[sd]);
        report.correlation_degenerate.push_back(row[deg] != 0.0);
        report.climatological_stdev = row[clim];
    }
    return report;
}

}  // namespace diffcast
