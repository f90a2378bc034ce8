#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <utility>

namespace diffcast {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using IndexMatrix = Eigen::Matrix<Eigen::Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Uniformly sampled, time-ordered series of points in R^n. Row i is x_i.
/// A single-point series is allowed (e.g. the verification block of a split);
/// operations that need consecutive pairs check N >= 2 themselves.
class TimeSeries {
public:
    TimeSeries(Matrix points, double tau, std::string origin_label = {});

    const Matrix& points() const { return points_; }
    double tau() const { return tau_; }
    const std::string& origin_label() const { return origin_label_; }

    Eigen::Index size() const { return points_.rows(); }
    Eigen::Index dim() const { return points_.cols(); }
    auto row(Eigen::Index i) const { return points_.row(i); }

    /// Rows [first, first + count) as a new series with the same tau.
    TimeSeries slice(Eigen::Index first, Eigen::Index count) const;

private:
    Matrix points_;
    double tau_;
    std::string origin_label_;
};

/// Exact k-nearest-neighbor table. Row i is sorted by ascending distance,
/// ties broken by lower index; column 0 is the point itself.
struct NeighborList {
    IndexMatrix indices;
    RowMatrix distances;

    Eigen::Index size() const { return indices.rows(); }
    Eigen::Index k() const { return indices.cols(); }
};

enum class SeriesFormat {
    SingleColumn,    // one value per line
    TwoColumnDated,  // "YYYY-MM,value"
    NoaaMonthlyGrid, // "year v1 ... v12"
    Csv,             // header row, "t,x0,x1,..." as written by save_series_csv
};

SeriesFormat parse_series_format(const std::string& name);

/// Reads a scalar series (or a multi-column series for SeriesFormat::Csv).
/// Missing-value sentinels (-99.9, -99.99, -999 and below) end the series at
/// their first occurrence after at least one valid value.
TimeSeries load_series(const std::filesystem::path& path, SeriesFormat format, double tau = 1.0);

/// Monthly series (tau = 1 month) with the calendar date of its first point.
struct MonthlySeries {
    TimeSeries series;
    int first_year = 0;
    int first_month = 1;

    /// Row of the given month; may lie outside [0, N).
    Eigen::Index index_of(int year, int month) const;
};

MonthlySeries load_monthly_series(const std::filesystem::path& path, SeriesFormat format);

/// Writes "t,x0,...,x{n-1}" with t = i * tau.
void save_series_csv(const TimeSeries& ts, const std::filesystem::path& path);

/// Lag stacking: row i = (x_{i+L-1}, x_{i+L-2}, ..., x_i).
TimeSeries delay_embed(const TimeSeries& ts, int lags);

NeighborList knn(const TimeSeries& ts, int k);
NeighborList knn(const Matrix& points, int k);

/// k nearest rows of `points[0, limit)` to `query` (ascending, index tie-break).
void knn_query(const Matrix& points, Eigen::Index limit, const Eigen::Ref<const Vector>& query, int k,
               std::vector<Eigen::Index>& indices, std::vector<double>& distances);

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& ts, Eigen::Index n_train);

}  // namespace diffcast
