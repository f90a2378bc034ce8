#include "diffcast/dataset.hpp"

#include "diffcast/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace diffcast {

TimeSeries::TimeSeries(Matrix points, double tau, std::string origin_label)
    : points_(std::move(points)), tau_(tau), origin_label_(std::move(origin_label)) {
    if (points_.rows() < 1) throw std::invalid_argument("TimeSeries needs at least 1 point");
    if (points_.cols() < 1) throw std::invalid_argument("TimeSeries needs at least 1 coordinate");
    if (!(tau_ > 0.0) || !std::isfinite(tau_)) throw std::invalid_argument("TimeSeries tau must be > 0");
    if (!points_.allFinite()) throw std::invalid_argument("TimeSeries entries must be finite");
}

TimeSeries TimeSeries::slice(Eigen::Index first, Eigen::Index count) const {
    if (first < 0 || count < 0 || first + count > size())
        throw std::out_of_range("TimeSeries::slice out of range");
    return TimeSeries(points_.middleRows(first, count), tau_, origin_label_);
}

SeriesFormat parse_series_format(const std::string& name) {
    if (name == "single-column") return SeriesFormat::SingleColumn;
    if (name == "two-column-dated") return SeriesFormat::TwoColumnDated;
    if (name == "noaa-monthly-grid") return SeriesFormat::NoaaMonthlyGrid;
    if (name == "csv") return SeriesFormat::Csv;
    throw std::invalid_argument("unknown series format '" + name +
                                "' (expected single-column, two-column-dated, noaa-monthly-grid or csv)");
}

namespace {

bool is_missing(double v) { return v <= -99.0; }

std::vector<std::string> tokenize(const std::string& line, char sep) {
    std::vector<std::string> out;
    if (sep == ' ') {
        std::istringstream is(line);
        std::string tok;
        while (is >> tok) out.push_back(tok);
    } else {
        std::string tok;
        std::istringstream is(line);
        while (std::getline(is, tok, sep)) {
            auto b = tok.find_first_not_of(" \t\r");
            auto e = tok.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? std::string{} : tok.substr(b, e - b + 1));
        }
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

[[noreturn]] void parse_error(const std::filesystem::path& path, std::size_t line_no, const std::string& what) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
}

bool skippable(const std::string& line) {
    auto b = line.find_first_not_of(" \t\r");
    return b == std::string::npos || line[b] == '#';
}

TimeSeries scalar_series(const std::vector<double>& values, double tau, const std::filesystem::path& path) {
    if (values.empty()) throw std::runtime_error(path.string() + ": empty series");
    if (values.size() < 2) throw std::runtime_error(path.string() + ": series has fewer than 2 points");
    Matrix pts(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) pts(static_cast<Eigen::Index>(i), 0) = values[i];
    return TimeSeries(std::move(pts), tau, path.filename().string());
}

}  // namespace

namespace {

TimeSeries load_series_impl(const std::filesystem::path& path, SeriesFormat format, double tau, int* first_key) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file " + path.string());

    std::vector<double> values;
    bool terminated = false;
    auto push = [&](double v, int key = -1) {
        if (is_missing(v)) {
            if (!values.empty()) terminated = true;
            return;
        }
        if (values.empty() && first_key) *first_key = key;
        values.push_back(v);
    };

    std::string line;
    std::size_t line_no = 0;
    switch (format) {
    case SeriesFormat::SingleColumn:
        while (!terminated && std::getline(in, line)) {
            ++line_no;
            if (skippable(line)) continue;
            auto toks = tokenize(line, ' ');
            double v;
            if (toks.size() != 1 || !parse_double(toks[0], v)) parse_error(path, line_no, "expected one number");
            push(v);
        }
        return scalar_series(values, tau, path);

    case SeriesFormat::TwoColumnDated: {
        std::vector<std::pair<int, double>> dated;
        while (std::getline(in, line)) {
            ++line_no;
            if (skippable(line)) continue;
            auto toks = tokenize(line, ',');
            int year = 0, month = 0;
            double v;
            if (toks.size() != 2 || toks[0].size() != 7 || toks[0][4] != '-' ||
                std::sscanf(toks[0].c_str(), "%4d-%2d", &year, &month) != 2 || month < 1 || month > 12 ||
                !parse_double(toks[1], v))
                parse_error(path, line_no, "expected 'YYYY-MM,value'");
            dated.emplace_back(year * 12 + (month - 1), v);
        }
        std::stable_sort(dated.begin(), dated.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < dated.size(); ++i)
            if (dated[i].first == dated[i - 1].first)
                throw std::runtime_error(path.string() + ": duplicate month in dated series");
        for (const auto& [key, v] : dated) {
            push(v, key);
            if (terminated) break;
        }
        return scalar_series(values, tau, path);
    }

    case SeriesFormat::NoaaMonthlyGrid:
        while (!terminated && std::getline(in, line)) {
            ++line_no;
            if (skippable(line)) continue;
            auto toks = tokenize(line, ' ');
            // PSL-style files open with a "first_year last_year" range line.
            if (toks.size() == 2 && values.empty() && line_no == 1) continue;
            // The grid is followed by a lone missing-value line and free-text notes.
            if (double v; toks.size() == 1 && parse_double(toks[0], v) && is_missing(v)) break;
            if (toks.size() != 13) parse_error(path, line_no, "expected 'year v1 ... v12'");
            double year;
            if (!parse_double(toks[0], year) || year != std::floor(year)) parse_error(path, line_no, "bad year field");
            for (int m = 1; m <= 12 && !terminated; ++m) {
                double v;
                if (!parse_double(toks[m], v)) parse_error(path, line_no, "bad value in column " + std::to_string(m + 1));
                push(v, static_cast<int>(year) * 12 + (m - 1));
            }
        }
        return scalar_series(values, tau, path);

    case SeriesFormat::Csv: {
        auto table = read_csv(path);
        if (table.columns.size() < 2 || table.columns.front() != "t")
            throw std::runtime_error(path.string() + ": expected header 't,x0,...'");
        const auto n = static_cast<Eigen::Index>(table.rows.size());
        if (n < 2) throw std::runtime_error(path.string() + ": series has fewer than 2 points");
        const auto dim = static_cast<Eigen::Index>(table.columns.size()) - 1;
        Matrix pts(n, dim);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < dim; ++j) pts(i, j) = table.rows[i][j + 1];
        const double dt = table.rows[1][0] - table.rows[0][0];
        for (Eigen::Index i = 1; i < n; ++i) {
            const double step = table.rows[i][0] - table.rows[i - 1][0];
            if (std::abs(step - dt) > 1e-9 * std::max(1.0, std::abs(table.rows[i][0])))
                throw std::runtime_error(path.string() + ": non-uniform time column at row " + std::to_string(i + 2));
        }
        return TimeSeries(std::move(pts), dt, path.filename().string());
    }
    }
    throw std::logic_error("unhandled series format");
}

}  // namespace

TimeSeries load_series(const std::filesystem::path& path, SeriesFormat format, double tau) {
    return load_series_impl(path, format, tau, nullptr);
}

MonthlySeries load_monthly_series(const std::filesystem::path& path, SeriesFormat format) {
    if (format != SeriesFormat::TwoColumnDated && format != SeriesFormat::NoaaMonthlyGrid)
        throw std::invalid_argument("load_monthly_series: format carries no dates");
    int key = 0;
    TimeSeries ts = load_series_impl(path, format, 1.0, &key);
    return MonthlySeries{std::move(ts), key / 12, key % 12 + 1};
}

Eigen::Index MonthlySeries::index_of(int year, int month) const {
    return static_cast<Eigen::Index>(year * 12 + (month - 1)) - (first_year * 12 + (first_month - 1));
}

void save_series_csv(const TimeSeries& ts, const std::filesystem::path& path) {
    std::vector<std::string> header{"t"};
    for (Eigen::Index j = 0; j < ts.dim(); ++j) header.push_back("x" + std::to_string(j));
    CsvWriter out(path, header);
    std::vector<double> row(static_cast<std::size_t>(ts.dim()) + 1);
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
        row[0] = static_cast<double>(i) * ts.tau();
        for (Eigen::Index j = 0; j < ts.dim(); ++j) row[static_cast<std::size_t>(j) + 1] = ts.points()(i, j);
        out.write(row);
    }
}

TimeSeries delay_embed(const TimeSeries& ts, int lags) {
    if (lags < 1) throw std::invalid_argument("delay_embed: lags must be >= 1");
    if (lags > ts.size()) throw std::invalid_argument("delay_embed: lags exceed series length");
    const Eigen::Index n = ts.dim();
    const Eigen::Index rows = ts.size() - lags + 1;
    Matrix out(rows, n * lags);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (int l = 0; l < lags; ++l) out.block(i, l * n, 1, n) = ts.points().row(i + lags - 1 - l);
    return TimeSeries(std::move(out), ts.tau(), ts.origin_label());
}

namespace {

// Partial selection of the k smallest (distance, index) pairs.
void select_k(std::vector<std::pair<double, Eigen::Index>>& cand, int k) {
    auto less = [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); };
    if (static_cast<std::size_t>(k) < cand.size()) {
        std::nth_element(cand.begin(), cand.begin() + k, cand.end(), less);
        cand.resize(static_cast<std::size_t>(k));
    }
    std::sort(cand.begin(), cand.end(), less);
}

}  // namespace

NeighborList knn(const Matrix& points, int k) {
    const Eigen::Index n = points.rows();
    if (k < 1) throw std::invalid_argument("knn: k must be >= 1");
    if (k > n) throw std::invalid_argument("knn: k exceeds number of points");

    // Row-major copy so each point is contiguous.
    const RowMatrix pts = points;
    const Eigen::Index dim = pts.cols();

    NeighborList out;
    out.indices.resize(n, k);
    out.distances.resize(n, k);
    std::vector<std::pair<double, Eigen::Index>> cand;
    cand.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        cand.clear();
        const double* xi = pts.data() + i * dim;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double* xj = pts.data() + j * dim;
            double d2 = 0.0;
            for (Eigen::Index c = 0; c < dim; ++c) {
                const double diff = xi[c] - xj[c];
                d2 += diff * diff;
            }
            cand.emplace_back(j == i ? 0.0 : d2, j);
        }
        select_k(cand, k);
        // Self first even when another point coincides with x_i.
        auto self = std::find_if(cand.begin(), cand.end(), [i](const auto& p) { return p.second == i; });
        if (self == cand.end()) {
            cand.back() = {0.0, i};
            self = cand.end() - 1;
        }
        if (self != cand.begin()) std::rotate(cand.begin(), self, self + 1);
        for (int c = 0; c < k; ++c) {
            out.indices(i, c) = cand[static_cast<std::size_t>(c)].second;
            out.distances(i, c) = std::sqrt(cand[static_cast<std::size_t>(c)].first);
        }
    }
    return out;
}

NeighborList knn(const TimeSeries& ts, int k) { return knn(ts.points(), k); }

void knn_query(const Matrix& points, Eigen::Index limit, const Eigen::Ref<const Vector>& query, int k,
               std::vector<Eigen::Index>& indices, std::vector<double>& distances) {
    if (limit > points.rows() || limit < 1) throw std::invalid_argument("knn_query: bad candidate range");
    if (k < 1 || k > limit) throw std::invalid_argument("knn_query: k out of range");
    std::vector<std::pair<double, Eigen::Index>> cand(static_cast<std::size_t>(limit));
    for (Eigen::Index j = 0; j < limit; ++j)
        cand[static_cast<std::size_t>(j)] = {(points.row(j).transpose() - query).squaredNorm(), j};
    select_k(cand, k);
    indices.resize(static_cast<std::size_t>(k));
    distances.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        indices[static_cast<std::size_t>(c)] = cand[static_cast<std::size_t>(c)].second;
        distances[static_cast<std::size_t>(c)] = std::sqrt(cand[static_cast<std::size_t>(c)].first);
    }
}

std::pair<TimeSeries, TimeSeries> split(const TimeSeries& ts, Eigen::Index n_train) {
    if (n_train < 1 || n_train >= ts.size()) throw std::invalid_argument("split: n_train must be in [1, N)");
    return {ts.slice(0, n_train), ts.slice(n_train, ts.size() - n_train)};
}

}  // namespace diffcast
