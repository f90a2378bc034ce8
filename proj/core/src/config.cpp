#include "diffcast/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace diffcast {

ExperimentKind parse_experiment(const std::string& name) {
    if (name == "torus") return ExperimentKind::Torus;
    if (name == "lorenz63") return ExperimentKind::Lorenz63;
    if (name == "nino34") return ExperimentKind::Nino34;
    if (name == "custom") return ExperimentKind::Custom;
    throw std::invalid_argument("unknown experiment '" + name + "' (torus, lorenz63, nino34, custom)");
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Torus: return "torus";
        case ExperimentKind::Lorenz63: return "lorenz63";
        case ExperimentKind::Nino34: return "nino34";
        case ExperimentKind::Custom: return "custom";
    }
    return "custom";
}

ExperimentConfig default_config(ExperimentKind kind, bool paper_scale) {
    ExperimentConfig c;
    c.experiment = kind;
    c.paper_scale = paper_scale;
    switch (kind) {
        case ExperimentKind::Torus:
            c.n_samples = paper_scale ? 20000 : 8000;
            c.M = paper_scale ? 1000 : 400;
            c.ensemble_size = paper_scale ? 50000 : 10000;
            c.tau = 0.1;
            c.init_variance = 0.1;
            c.max_lead_time = 10.0;
            break;
        case ExperimentKind::Lorenz63:
            c.n_train = paper_scale ? 5000 : 6000;
            c.n_verify = paper_scale ? 5000 : 500;
            c.M = paper_scale ? 4500 : 1000;
            c.ensemble_size = paper_scale ? 1000 : 200;
            c.init_variance = 0.01;
            c.max_lead_time = 10.0;
            c.dense_limit = paper_scale ? 6000 : 4000;
            break;
        case ExperimentKind::Nino34:
            c.M = 80;
            c.lags = 5;
            c.tau = 1.0;
            c.init_variance = 0.01;
            c.max_lead_time = 24.0;
            c.ensemble_size = 0;
            break;
        case ExperimentKind::Custom:
            break;
    }
    return c;
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": empty key");
        if (!out.emplace(key, value).second)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return out;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* end = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) throw std::invalid_argument("config: bad value for " + key + ": '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(' '), e = item.find_last_not_of(' ');
        if (b == std::string::npos) throw std::invalid_argument("config: empty entry in " + key);
        out.push_back(parse_number<double>(key, item.substr(b, e - b + 1)));
    }
    return out;
}

}  // namespace

void parse_year_month(const std::string& text, int& year, int& month) {
    char tail = 0;
    if (text.size() != 7 || text[4] != '-' || std::sscanf(text.c_str(), "%4d-%2d%c", &year, &month, &tail) != 2 ||
        month < 1 || month > 12)
        throw std::invalid_argument("expected YYYY-MM, got '" + text + "'");
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
    using Index = Eigen::Index;
    if (key == "experiment") c.experiment = parse_experiment(value);
    else if (key == "paper_scale") c.paper_scale = parse_bool(key, value);
    else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "out_dir") c.out_dir = value;
    else if (key == "n_samples") c.n_samples = parse_number<Index>(key, value);
    else if (key == "tau") c.tau = parse_number<double>(key, value);
    else if (key == "substeps") c.substeps = parse_number<int>(key, value);
    else if (key == "burn_in") c.burn_in = parse_number<Index>(key, value);
    else if (key == "lorenz_dts") c.lorenz_dts = parse_list(key, value);
    else if (key == "n_train") c.n_train = parse_number<Index>(key, value);
    else if (key == "n_verify") c.n_verify = parse_number<Index>(key, value);
    else if (key == "data_path") c.data_path = value;
    else if (key == "data_format") c.data_format = value;
    else if (key == "train_start") c.train_start = value;
    else if (key == "train_end") c.train_end = value;
    else if (key == "verify_start") c.verify_start = value;
    else if (key == "verify_end") c.verify_end = value;
    else if (key == "lags") c.lags = parse_number<int>(key, value);
    else if (key == "M") c.M = parse_number<Index>(key, value);
    else if (key == "k0") c.k0 = parse_number<int>(key, value);
    else if (key == "neighbor_cap") c.neighbor_cap = parse_number<Index>(key, value);
    else if (key == "stride") c.stride = parse_number<Index>(key, value);
    else if (key == "retain_P") c.retain_P = parse_bool(key, value);
    else if (key == "spectral_clamp") c.spectral_clamp = parse_bool(key, value);
    else if (key == "eigensolver") c.eigensolver = parse_eigen_solver(value);
    else if (key == "dense_limit") c.dense_limit = parse_number<Index>(key, value);
    else if (key == "init_variance") c.init_variance = parse_number<double>(key, value);
    else if (key == "max_lead_time") c.max_lead_time = parse_number<double>(key, value);
    else if (key == "ensemble_size") c.ensemble_size = parse_number<Index>(key, value);
    else if (key == "local_linear_k") c.local_linear_k = parse_number<int>(key, value);
    else if (key == "trajectory_lead") c.trajectory_lead = parse_number<int>(key, value);
    else if (key == "write_densities") c.write_densities = parse_bool(key, value);
    else if (key == "dump_tuning") c.dump_tuning = parse_bool(key, value);
    else throw std::invalid_argument("config: unknown key '" + key + "'");
}

ExperimentConfig make_config(const std::map<std::string, std::string>& settings, ExperimentKind fallback,
                             bool paper_scale) {
    ExperimentKind kind = fallback;
    if (auto it = settings.find("experiment"); it != settings.end()) kind = parse_experiment(it->second);
    if (auto it = settings.find("paper_scale"); it != settings.end()) paper_scale = parse_bool("paper_scale", it->second);
    ExperimentConfig config = default_config(kind, paper_scale);
    for (const auto& [key, value] : settings)
        if (key != "experiment" && key != "paper_scale") apply_setting(config, key, value);
    return config;
}

void validate(const ExperimentConfig& c) {
    auto require = [](bool ok, const char* field, const char* rule) {
        if (!ok) throw std::invalid_argument(std::string("config: ") + field + " " + rule);
    };
    require(c.n_samples >= 2, "n_samples", "must be at least 2");
    require(c.tau > 0.0, "tau", "must be positive");
    require(c.substeps >= 1, "substeps", "must be at least 1");
    require(c.burn_in >= 0, "burn_in", "must be nonnegative");
    require(!c.lorenz_dts.empty(), "lorenz_dts", "must not be empty");
    for (double dt : c.lorenz_dts) require(dt > 0.0, "lorenz_dts", "entries must be positive");
    require(c.n_train >= 2, "n_train", "must be at least 2");
    require(c.n_verify >= 2, "n_verify", "must be at least 2");
    require(c.lags >= 1, "lags", "must be at least 1");
    require(c.M >= 1, "M", "must be at least 1");
    require(c.k0 >= 2, "k0", "must be at least 2");
    require(c.neighbor_cap >= c.k0, "neighbor_cap", "must be at least k0");
    require(c.stride >= 1, "stride", "must be at least 1");
    require(c.dense_limit >= 1, "dense_limit", "must be positive");
    require(c.init_variance > 0.0, "init_variance", "must be positive");
    require(c.max_lead_time >= 0.0, "max_lead_time", "must be nonnegative");
    require(c.ensemble_size >= 0, "ensemble_size", "must be nonnegative");
    require(c.local_linear_k >= 2, "local_linear_k", "must be at least 2");
    require(c.trajectory_lead >= 1, "trajectory_lead", "must be at least 1");
    int y, m;
    parse_year_month(c.train_start, y, m);
    parse_year_month(c.train_end, y, m);
    parse_year_month(c.verify_start, y, m);
    parse_year_month(c.verify_end, y, m);
}

std::string config_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["experiment"] = to_string(c.experiment);
    j["paper_scale"] = c.paper_scale;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir.string();
    j["n_samples"] = c.n_samples;
    j["tau"] = c.tau;
    j["substeps"] = c.substeps;
    j["burn_in"] = c.burn_in;
    j["lorenz_dts"] = c.lorenz_dts;
    j["n_train"] = c.n_train;
    j["n_verify"] = c.n_verify;
    j["data_path"] = c.data_path.string();
    j["data_format"] = c.data_format;
    j["train_start"] = c.train_start;
    j["train_end"] = c.train_end;
    j["verify_start"] = c.verify_start;
    j["verify_end"] = c.verify_end;
    j["lags"] = c.lags;
    j["M"] = c.M;
    j["k0"] = c.k0;
    j["neighbor_cap"] = c.neighbor_cap;
    j["stride"] = c.stride;
    j["retain_P"] = c.retain_P;
    j["spectral_clamp"] = c.spectral_clamp;
    j["eigensolver"] = to_string(c.eigensolver);
    j["dense_limit"] = c.dense_limit;
    j["init_variance"] = c.init_variance;
    j["max_lead_time"] = c.max_lead_time;
    j["ensemble_size"] = c.ensemble_size;
    j["local_linear_k"] = c.local_linear_k;
    j["trajectory_lead"] = c.trajectory_lead;
    j["write_densities"] = c.write_densities;
    j["dump_tuning"] = c.dump_tuning;
    return j.dump(2);
}

}  // namespace diffcast
