#pragma once

#include "diffcast/diffusion_basis.hpp"
#include "diffcast/diffusion_forecast.hpp"

#include <filesystem>
#include <string>

namespace diffcast {

/// Binary layout, little-endian:
///   "DMB1", u64 N, u64 M, f64 d, f64 eps, f64 peq[N], f64 lambda[M], f64 phi[N*M] (row-major).
/// alpha and beta go in the JSON sidecar "<path>.json" together with `metadata`.
void save_basis(const DiffusionBasis& basis, const std::filesystem::path& path, const std::string& metadata_json = "{}");
DiffusionBasis load_basis(const std::filesystem::path& path);

/// Binary layout, little-endian: "DMA1", u64 M, u64 n_pairs, f64 tau, f64 A[M*M] (row-major).
void save_operator(const ShiftOperator& op, const std::filesystem::path& path);
ShiftOperator load_operator(const std::filesystem::path& path);

/// JSON object describing a learned basis (tuning results, options), for sidecars and manifests.
std::string learned_basis_metadata(const LearnedBasis& learned);

}  // namespace diffcast
