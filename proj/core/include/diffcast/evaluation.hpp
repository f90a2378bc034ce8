#pragma once

#include "diffcast/dataset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace diffcast {

struct SkillReport {
    std::vector<double> lead_times;
    std::vector<double> rmse;
    std::vector<double> correlation;
    std::vector<double> mean_forecast_stdev;
    std::vector<bool> correlation_degenerate;  // correlation undefined, reported as 0
    double climatological_stdev = 0.0;
};

/// Per lead: truth and forecast are (origins x coordinates). RMSE pools all
/// origins and coordinates; correlation is the mean over coordinates of the
/// Pearson correlation across origins; mean_forecast_stdev is the RMS of
/// `stdev` (zero when it is empty). Throws with fewer than 2 origins.
SkillReport rmse_and_correlation(const std::vector<double>& lead_times, const std::vector<Matrix>& truth,
                                 const std::vector<Matrix>& forecast, const std::vector<Matrix>& stdev,
                                 double climatological_stdev);

/// sqrt of the mean over coordinates of the population variance.
double climatological_stdev(const Matrix& series);

/// Pearson correlation; sets *degenerate and returns 0 when either side is constant.
double pearson(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b, bool* degenerate = nullptr);

/// "lead,rmse,correlation,mean_stdev,climatological_stdev,degenerate".
void save_skill_report(const SkillReport& report, const std::filesystem::path& path);
SkillReport load_skill_report(const std::filesystem::path& path);

}  // namespace diffcast
