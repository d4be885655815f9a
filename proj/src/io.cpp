#include "coarsekit/io.hpp"

#include <fstream>
#include <sstream>

namespace coarsekit {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorKind::Parse, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) parse_error(std::string("expected an object holding '") + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) parse_error(std::string("missing field '") + key + "'");
  return *it;
}

template <class T>
T get(const Json& j, const char* key) {
  try {
    return field(j, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_error(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
std::optional<T> get_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get<T>(j, key);
}

std::vector<double> vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const Json& v : j) {
    if (!v.is_number()) parse_error(std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Expected expected_from_string(const std::string& s) {
  if (s == "compatible") return Expected::Compatible;
  if (s == "incompatible") return Expected::Incompatible;
  if (s == "unknown") return Expected::Unknown;
  parse_error("unknown expected verdict '" + s + "'");
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "compatible") return Verdict::Compatible;
  if (s == "incompatible") return Verdict::Incompatible;
  if (s == "inconclusive") return Verdict::Inconclusive;
  parse_error("unknown verdict '" + s + "'");
}

SdpStatus sdp_status_from_string(const std::string& s) {
  if (s == "feasible") return SdpStatus::Feasible;
  if (s == "infeasible") return SdpStatus::Infeasible;
  if (s == "undecided") return SdpStatus::Undecided;
  parse_error("unknown SDP status '" + s + "'");
}

Json config_to_json(const CheckConfig& c) {
  return Json{{"seed", c.seed},
              {"sdp_max_iter", c.sdp_max_iter},
              {"sdp_tol", c.sdp_tol},
              {"witness_trials", c.witness_trials},
              {"ancilla_dims", c.ancilla_dims}};
}

CheckConfig config_from_json(const Json& j) {
  CheckConfig c;
  c.seed = get<std::uint64_t>(j, "seed");
  c.sdp_max_iter = get<int>(j, "sdp_max_iter");
  c.sdp_tol = get<double>(j, "sdp_tol");
  c.witness_trials = get<int>(j, "witness_trials");
  c.ancilla_dims = get<std::vector<std::size_t>>(j, "ancilla_dims");
  return c;
}

Json optional_matrix(const std::optional<CMatrix>& m) { return m ? to_json(*m) : Json(nullptr); }

std::optional<CMatrix> optional_matrix_from_json(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return matrix_from_json(j.at(key));
}

}  // namespace

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  parse_error("complex number must be [re, im] or a real number, got " + j.dump());
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) parse_error("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) parse_error("matrix rows must be non-empty arrays");
  CMatrix m(j.size(), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) parse_error("ragged matrix at row " + std::to_string(i));
    for (std::size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

Json to_json(const CondTable& t) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < t.n_out(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < t.n_in(); ++k) row.push_back(t(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

CondTable cond_table_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) parse_error("conditional table must be a non-empty array of rows");
  std::vector<double> flat;
  std::size_t cols = 0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::vector<double> row = vector_from_json(j[i], "conditional table row");
    if (i == 0) cols = row.size();
    if (row.size() != cols || cols == 0) parse_error("ragged conditional table at row " + std::to_string(i));
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return CondTable(j.size(), cols, std::move(flat));
}

ScenarioFile scenario_file_from_json(const Json& j) {
  if (!j.is_object()) parse_error("scenario file must be a JSON object");
  ScenarioFile f;
  f.version = get<int>(j, "version");
  if (f.version != kFormatVersion) parse_error("unsupported format version " + std::to_string(f.version));
  f.name = get_optional<std::string>(j, "name").value_or("");
  f.notes = get_optional<std::string>(j, "notes").value_or("");
  if (auto e = get_optional<std::string>(j, "expected")) f.expected = expected_from_string(*e);

  if (j.contains("kraus") || j.contains("unitary")) {
    const auto micro = get<std::size_t>(j, "D");
    const auto macro = get<std::size_t>(j, "d");
    const Json& kraus = field(j, "kraus");
    if (!kraus.is_array() || kraus.empty()) parse_error("'kraus' must be a non-empty array of matrices");
    std::vector<CMatrix> ops;
    for (const Json& k : kraus) ops.push_back(matrix_from_json(k));
    CMatrix u = matrix_from_json(field(j, "unitary"));
    f.scenario.emplace(KrausChannel(micro, macro, std::move(ops)), std::move(u));
  }

  if (j.contains("classical")) {
    const Json& c = j.at("classical");
    if (!c.is_object()) parse_error("'classical' must be an object");
    if (c.contains("chain")) {
      const Json& m = c.at("chain");
      f.chain.emplace(vector_from_json(field(m, "pA"), "pA"), cond_table_from_json(field(m, "pB_given_A")),
                      cond_table_from_json(field(m, "pX_given_A")), cond_table_from_json(field(m, "pY_given_B")));
    }
    if (c.contains("do")) {
      const Json& m = c.at("do");
      f.do_model.emplace(vector_from_json(field(m, "pA"), "pA"), cond_table_from_json(field(m, "pX_given_A")),
                         cond_table_from_json(field(m, "pB_given_AX")),
                         cond_table_from_json(field(m, "pY_given_B")));
    }
  }

  if (j.contains("config")) {
    const Json& c = j.at("config");
    if (!c.is_object()) parse_error("'config' must be an object");
    f.config.seed = get_optional<std::uint64_t>(c, "seed");
    f.config.sdp_max_iter = get_optional<int>(c, "sdp_max_iter");
    f.config.sdp_tol = get_optional<double>(c, "sdp_tol");
    f.config.witness_trials = get_optional<int>(c, "witness_trials");
    f.config.ancilla_dims = get_optional<std::vector<std::size_t>>(c, "ancilla_dims");
  }
  return f;
}

Json to_json(const ScenarioFile& f) {
  Json j{{"version", f.version}};
  if (!f.name.empty()) j["name"] = f.name;
  j["expected"] = to_string(f.expected);
  if (!f.notes.empty()) j["notes"] = f.notes;
  if (f.scenario) {
    j["D"] = f.scenario->micro_dim();
    j["d"] = f.scenario->macro_dim();
    Json kraus = Json::array();
    for (const CMatrix& k : f.scenario->cg().kraus()) kraus.push_back(to_json(k));
    j["kraus"] = std::move(kraus);
    j["unitary"] = to_json(f.scenario->u());
  }
  if (f.chain || f.do_model) {
    Json c = Json::object();
    if (f.chain)
      c["chain"] = Json{{"pA", f.chain->pA},
                        {"pB_given_A", to_json(f.chain->pB_given_A)},
                        {"pX_given_A", to_json(f.chain->pX_given_A)},
                        {"pY_given_B", to_json(f.chain->pY_given_B)}};
    if (f.do_model)
      c["do"] = Json{{"pA", f.do_model->pA},
                     {"pX_given_A", to_json(f.do_model->pX_given_A)},
                     {"pB_given_AX", to_json(f.do_model->pB_given_AX)},
                     {"pY_given_B", to_json(f.do_model->pY_given_B)}};
    j["classical"] = std::move(c);
  }
  Json cfg = Json::object();
  if (f.config.seed) cfg["seed"] = *f.config.seed;
  if (f.config.sdp_max_iter) cfg["sdp_max_iter"] = *f.config.sdp_max_iter;
  if (f.config.sdp_tol) cfg["sdp_tol"] = *f.config.sdp_tol;
  if (f.config.witness_trials) cfg["witness_trials"] = *f.config.witness_trials;
  if (f.config.ancilla_dims) cfg["ancilla_dims"] = *f.config.ancilla_dims;
  if (!cfg.empty()) j["config"] = std::move(cfg);
  return j;
}

Json to_json(const NamedScenario& s) {
  ScenarioFile f;
  f.name = s.name;
  f.scenario = s.scenario;
  f.expected = s.expected;
  f.notes = s.notes;
  return to_json(f);
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    parse_error("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

ScenarioFile read_scenario_file(const std::filesystem::path& path) {
  ScenarioFile f = scenario_file_from_json(read_json(path));
  if (f.name.empty()) f.name = path.stem().string();
  return f;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Parse, "cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Parse, "write to '" + path.string() + "' failed");
}

Json to_json(const KrausMap& k) {
  Json kraus = Json::array();
  for (const CMatrix& m : k.kraus()) kraus.push_back(to_json(m));
  return Json{{"version", kFormatVersion}, {"din", k.din()}, {"dout", k.dout()}, {"kraus", std::move(kraus)}};
}

KrausChannel channel_from_json(const Json& j) {
  if (get<int>(j, "version") != kFormatVersion) parse_error("unsupported format version");
  const Json& kraus = field(j, "kraus");
  if (!kraus.is_array() || kraus.empty()) parse_error("'kraus' must be a non-empty array of matrices");
  std::vector<CMatrix> ops;
  for (const Json& k : kraus) ops.push_back(matrix_from_json(k));
  return KrausChannel(get<std::size_t>(j, "din"), get<std::size_t>(j, "dout"), std::move(ops));
}

Json to_json(const ReportFile& r) {
  const CompatReport& c = r.report;
  Json j{{"version", kFormatVersion},
         {"tool", "coarsekit"},
         {"tool_version", r.tool_version},
         {"scenario", Json{{"name", r.scenario_name}, {"D", r.micro_dim}, {"d", r.macro_dim}}},
         {"config", config_to_json(r.config)},
         {"verdict", to_string(c.agreement.overall)}};
  j["methods"] = Json{{"geometric", to_string(c.agreement.geometric)},
                      {"algebraic", to_string(c.agreement.algebraic)},
                      {"sdp", to_string(c.agreement.sdp)},
                      {"unitary_equivalence", to_string(c.agreement.unitary_equivalence)}};
  j["fiber"] = Json{{"preserved", c.fiber.preserved}, {"residual", c.fiber.residual}, {"kernel_dim", c.fiber.kernel_dim}};
  j["algebraic"] = Json{{"found", c.algebraic.v.has_value()},
                        {"residual", c.algebraic.residual},
                        {"threshold", c.algebraic.threshold},
                        {"v", optional_matrix(c.algebraic.v)},
                        {"least_squares_v", to_json(c.algebraic.least_squares_v)}};
  j["dual_identity_residual"] = c.dual_identity_residual;
  j["sdp"] = Json{{"status", to_string(c.sdp.status)}, {"residual", c.sdp.residual}, {"iterations", c.sdp.iterations}};
  if (c.witness) {
    const EnsembleWitness& w = *c.witness;
    j["witness"] = Json{{"p0", w.p0},
                        {"p1", w.p1},
                        {"ancilla_dim", w.ancilla_dim},
                        {"trial", w.trial},
                        {"pg_before", w.pg_before},
                        {"pg_after", w.pg_after},
                        {"gap", w.gap()},
                        {"rho0", to_json(w.rho0.mat())},
                        {"rho1", to_json(w.rho1.mat())}};
  } else {
    j["witness"] = nullptr;
  }
  j["witness_trials"] = c.witness_trials;
  j["ancilla_dims"] = c.ancilla_dims;
  if (c.emergent) {
    Json kraus = Json::array();
    for (const CMatrix& k : c.emergent->kraus()) kraus.push_back(to_json(k));
    j["emergent"] = Json{{"kraus", std::move(kraus)}, {"diagram_residual", c.emergent_diagram_residual}};
  } else {
    j["emergent"] = nullptr;
  }
  if (c.kraus_equivalence) {
    j["kraus_equivalence"] = Json{{"equivalent", c.kraus_equivalence->equivalent},
                                  {"residual", c.kraus_equivalence->residual},
                                  {"v", optional_matrix(c.kraus_equivalence->v)}};
  } else {
    j["kraus_equivalence"] = nullptr;
  }
  return j;
}

ReportFile report_file_from_json(const Json& j) {
  if (get<int>(j, "version") != kFormatVersion) parse_error("unsupported report version");
  ReportFile r;
  r.tool_version = get<std::string>(j, "tool_version");
  const Json& s = field(j, "scenario");
  r.scenario_name = get<std::string>(s, "name");
  r.micro_dim = get<std::size_t>(s, "D");
  r.macro_dim = get<std::size_t>(s, "d");
  r.config = config_from_json(field(j, "config"));

  CompatReport& c = r.report;
  c.agreement.overall = verdict_from_string(get<std::string>(j, "verdict"));
  const Json& m = field(j, "methods");
  c.agreement.geometric = verdict_from_string(get<std::string>(m, "geometric"));
  c.agreement.algebraic = verdict_from_string(get<std::string>(m, "algebraic"));
  c.agreement.sdp = verdict_from_string(get<std::string>(m, "sdp"));
  c.agreement.unitary_equivalence = verdict_from_string(get<std::string>(m, "unitary_equivalence"));

  const Json& fib = field(j, "fiber");
  c.fiber.preserved = get<bool>(fib, "preserved");
  c.fiber.residual = get<double>(fib, "residual");
  c.fiber.kernel_dim = get<std::size_t>(fib, "kernel_dim");

  const Json& alg = field(j, "algebraic");
  c.algebraic.residual = get<double>(alg, "residual");
  c.algebraic.threshold = get<double>(alg, "threshold");
  c.algebraic.v = optional_matrix_from_json(alg, "v");
  c.algebraic.least_squares_v = matrix_from_json(field(alg, "least_squares_v"));
  c.dual_identity_residual = get<double>(j, "dual_identity_residual");

  const Json& sdp = field(j, "sdp");
  c.sdp.status = sdp_status_from_string(get<std::string>(sdp, "status"));
  c.sdp.residual = get<double>(sdp, "residual");
  c.sdp.iterations = get<int>(sdp, "iterations");

  if (const Json& w = field(j, "witness"); !w.is_null()) {
    c.witness = EnsembleWitness{.p0 = get<double>(w, "p0"),
                                .p1 = get<double>(w, "p1"),
                                .ancilla_dim = get<std::size_t>(w, "ancilla_dim"),
                                .trial = get<std::size_t>(w, "trial"),
                                .rho0 = DensityMatrix(matrix_from_json(field(w, "rho0"))),
                                .rho1 = DensityMatrix(matrix_from_json(field(w, "rho1"))),
                                .pg_before = get<double>(w, "pg_before"),
                                .pg_after = get<double>(w, "pg_after")};
  }
  c.witness_trials = get<int>(j, "witness_trials");
  c.ancilla_dims = get<std::vector<std::size_t>>(j, "ancilla_dims");

  if (const Json& e = field(j, "emergent"); !e.is_null()) {
    const Json& kraus = field(e, "kraus");
    if (!kraus.is_array() || kraus.empty()) parse_error("emergent 'kraus' must be a non-empty array");
    std::vector<CMatrix> ops;
    for (const Json& k : kraus) ops.push_back(matrix_from_json(k));
    c.emergent.emplace(r.macro_dim, r.macro_dim, std::move(ops));
    c.emergent_diagram_residual = get<double>(e, "diagram_residual");
  }
  if (const Json& k = field(j, "kraus_equivalence"); !k.is_null()) {
    KrausEquivalence eq;
    eq.equivalent = get<bool>(k, "equivalent");
    eq.residual = get<double>(k, "residual");
    eq.v = optional_matrix_from_json(k, "v");
    c.kraus_equivalence = std::move(eq);
  }
  return r;
}

}  // namespace coarsekit
