#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dtnlab/reduction.hpp"
#include "dtnlab/stability.hpp"

namespace dtnlab::io {

using json = nlohmann::json;

std::string read_text_file(const std::string& path);
// write-to-temp + rename, so failures never leave partial files behind
void write_text_atomic(const std::string& path, const std::string& content);

std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t value);

// --- strict JSON helpers ---------------------------------------------------
// Unknown keys are rejected with the JSON path of the offender.
void expect_keys(const json& obj, const std::string& where,
                 const std::vector<std::string>& allowed);

json potential_spec_to_json(const PotentialSpec& spec);
PotentialSpec potential_spec_from_json(const json& j, const std::string& where);

json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig sweep_config_from_json(const json& root);
std::string config_hash_hex(const ExperimentConfig& cfg);

// --- potentials -------------------------------------------------------------
// CSV columns: x1,..,xd,value
void write_potential_csv(const std::string& path, const Potential& v);
std::vector<double> read_potential_csv(const std::string& path, const Domain& dom);

// --- DtN maps ---------------------------------------------------------------
// base+".json" holds the metadata; the kernel goes to base+".csv"
// (row,col,value) or base+".gdtn" (magic "GDTN0001" + row-major f64).
void write_dtn(const std::string& base_path, const DtnMap& map, bool binary);
Eigen::MatrixXd read_dtn_kernel(const std::string& meta_path, const Domain& dom);

// --- scattering samples -----------------------------------------------------
struct ScatterRow {
  Vec p{};
  double rho = 0.0;
  cplx h;
  cplx vhat;
};
std::string scattering_csv(const std::vector<ScatterRow>& rows, int dim);

// --- reports ----------------------------------------------------------------
json report_to_json(const StabilityReport& rep);
std::string report_csv(const StabilityReport& rep);
json ledger_to_json(const BoundsLedger& ledger);

}  // namespace dtnlab::io
