#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "coarsekit/classical.hpp"
#include "coarsekit/compat.hpp"
#include "coarsekit/scenarios.hpp"

namespace coarsekit {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Complex numbers are [re, im]; matrices are row-major arrays of rows.
// Readers also accept a bare number for a real entry.
Json to_json(cplx z);
Json to_json(const CMatrix& m);
Json to_json(const CondTable& t);
cplx complex_from_json(const Json& j);
CMatrix matrix_from_json(const Json& j);
CondTable cond_table_from_json(const Json& j);

/// Optional settings a scenario file may carry; unset fields fall back to
/// command-line flags or defaults.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> sdp_max_iter;
  std::optional<double> sdp_tol;
  std::optional<int> witness_trials;
  std::optional<std::vector<std::size_t>> ancilla_dims;
};

struct ScenarioFile {
  int version = kFormatVersion;
  std::string name;
  std::optional<Scenario> scenario;
  Expected expected = Expected::Unknown;
  std::string notes;
  std::optional<ChainModel> chain;
  std::optional<DoModel> do_model;
  ConfigOverrides config;
};

/// Structural problems (bad JSON, missing or mistyped fields, unknown
/// version) throw ErrorKind::Parse. Well-formed content that violates a
/// channel or unitary invariant throws that invariant's kind.
ScenarioFile scenario_file_from_json(const Json& j);
Json to_json(const ScenarioFile& f);
Json to_json(const NamedScenario& s);

ScenarioFile read_scenario_file(const std::filesystem::path& path);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

Json to_json(const KrausMap& k);
KrausChannel channel_from_json(const Json& j);

struct ReportFile {
  std::string tool_version = kToolVersion;
  std::string scenario_name;
  std::size_t micro_dim = 0;
  std::size_t macro_dim = 0;
  CheckConfig config;
  CompatReport report;
};

/// Timing is deliberately absent so equal inputs give byte-identical files.
Json to_json(const ReportFile& r);
ReportFile report_file_from_json(const Json& j);

}  // namespace coarsekit
