#include "diffcast/basis_io.hpp"

#include <json.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace diffcast {

namespace {

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : path_(path) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary);
        if (!out_) throw std::runtime_error("cannot write " + path.string());
    }
    void magic(const char* m) { out_.write(m, 4); }
    void u64(std::uint64_t v) { put(v); }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void finish() {
        out_.flush();
        if (!out_) throw std::runtime_error("write failed: " + path_.string());
    }

private:
    void put(std::uint64_t v) {
        unsigned char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(v >> (8 * b));
        out_.write(reinterpret_cast<const char*>(bytes), 8);
    }
    std::filesystem::path path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open " + path.string());
    }
    void expect_magic(const char* m) {
        char got[4] = {};
        in_.read(got, 4);
        if (!in_ || std::memcmp(got, m, 4) != 0)
            throw std::runtime_error(path_.string() + ": not a " + std::string(m, 4) + " file");
    }
    std::uint64_t u64() { return get(); }
    double f64() { return std::bit_cast<double>(get()); }
    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof()) throw std::runtime_error(path_.string() + ": trailing data");
    }

private:
    std::uint64_t get() {
        unsigned char bytes[8];
        in_.read(reinterpret_cast<char*>(bytes), 8);
        if (!in_) throw std::runtime_error(path_.string() + ": truncated file");
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        return v;
    }
    std::filesystem::path path_;
    std::ifstream in_;
};

std::filesystem::path sidecar(const std::filesystem::path& path) { return path.string() + ".json"; }

// Guards against absurd headers before allocating.
void check_size(std::uint64_t value, const std::filesystem::path& path) {
    if (value == 0 || value > (std::uint64_t{1} << 31)) throw std::runtime_error(path.string() + ": bad dimension");
}

}  // namespace

void save_basis(const DiffusionBasis& basis, const std::filesystem::path& path, const std::string& metadata_json) {
    Writer w(path);
    w.magic("DMB1");
    w.u64(static_cast<std::uint64_t>(basis.size()));
    w.u64(static_cast<std::uint64_t>(basis.M()));
    w.f64(basis.d);
    w.f64(basis.eps);
    for (Eigen::Index i = 0; i < basis.size(); ++i) w.f64(basis.peq(i));
    for (Eigen::Index j = 0; j < basis.M(); ++j) w.f64(basis.lambda(j));
    for (Eigen::Index i = 0; i < basis.size(); ++i)
        for (Eigen::Index j = 0; j < basis.M(); ++j) w.f64(basis.phi(i, j));
    w.finish();

    nlohmann::ordered_json meta;
    meta["format"] = "DMB1";
    meta["N"] = basis.size();
    meta["M"] = basis.M();
    meta["d"] = basis.d;
    meta["eps"] = basis.eps;
    meta["alpha"] = basis.alpha;
    meta["beta"] = basis.beta;
    meta["metadata"] = nlohmann::ordered_json::parse(metadata_json);
    std::ofstream side(sidecar(path));
    if (!side) throw std::runtime_error("cannot write " + sidecar(path).string());
    side << meta.dump(2) << '\n';
}

DiffusionBasis load_basis(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic("DMB1");
    const std::uint64_t n = r.u64(), m = r.u64();
    check_size(n, path);
    check_size(m, path);
    if (m > n) throw std::runtime_error(path.string() + ": M exceeds N");
    DiffusionBasis basis;
    basis.d = r.f64();
    basis.eps = r.f64();
    const auto N = static_cast<Eigen::Index>(n), M = static_cast<Eigen::Index>(m);
    basis.peq.resize(N);
    basis.lambda.resize(M);
    basis.phi.resize(N, M);
    for (Eigen::Index i = 0; i < N; ++i) basis.peq(i) = r.f64();
    for (Eigen::Index j = 0; j < M; ++j) basis.lambda(j) = r.f64();
    for (Eigen::Index i = 0; i < N; ++i)
        for (Eigen::Index j = 0; j < M; ++j) basis.phi(i, j) = r.f64();
    r.expect_end();

    basis.alpha = -basis.d / 4.0;
    basis.beta = -0.5;
    std::ifstream side(sidecar(path));
    if (side) {
        const auto meta = nlohmann::json::parse(side);
        basis.alpha = meta.value("alpha", basis.alpha);
        basis.beta = meta.value("beta", basis.beta);
    }
    return basis;
}

void save_operator(const ShiftOperator& op, const std::filesystem::path& path) {
    if (op.A.rows() != op.A.cols()) throw std::invalid_argument("save_operator: A must be square");
    Writer w(path);
    w.magic("DMA1");
    w.u64(static_cast<std::uint64_t>(op.A.rows()));
    w.u64(static_cast<std::uint64_t>(op.n_pairs));
    w.f64(op.tau);
    for (Eigen::Index i = 0; i < op.A.rows(); ++i)
        for (Eigen::Index j = 0; j < op.A.cols(); ++j) w.f64(op.A(i, j));
    w.finish();
}

ShiftOperator load_operator(const std::filesystem::path& path) {
    Reader r(path);
    r.expect_magic("DMA1");
    const std::uint64_t m = r.u64();
    check_size(m, path);
    ShiftOperator op;
    op.n_pairs = static_cast<Eigen::Index>(r.u64());
    op.tau = r.f64();
    const auto M = static_cast<Eigen::Index>(m);
    op.A.resize(M, M);
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j) op.A(i, j) = r.f64();
    r.expect_end();
    return op;
}

std::string learned_basis_metadata(const LearnedBasis& learned) {
    nlohmann::ordered_json meta;
    meta["neighbor_cap"] = learned.neighbor_cap;
    meta["k0"] = learned.profile.k0;
    meta["kde"] = {{"eps", learned.kde_tuning.eps_star},
                   {"d", learned.kde_tuning.d_est},
                   {"boundary_warning", learned.kde_tuning.boundary_warning}};
    meta["vb"] = {{"eps", learned.vb_tuning.eps_star},
                  {"d", learned.vb_tuning.d_est},
                  {"boundary_warning", learned.vb_tuning.boundary_warning}};
    meta["eigensolver"] = to_string(learned.ledger.solver);
    meta["eigen_residual"] = learned.ledger.eigen_residual;
    return meta.dump();
}

}  // namespace diffcast
