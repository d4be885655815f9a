// coarsekit: check coarse-grainings of unitary dynamics for an emergent channel.
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "coarsekit/io.hpp"

namespace ck = coarsekit;

namespace {

// Exit codes.
constexpr int kExitCompatible = 0;
constexpr int kExitIncompatible = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitParse = 64;
constexpr int kExitInvariant = 65;
constexpr int kExitDisagreement = 70;

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::string fixed(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

void print_matrix(std::ostream& os, const ck::CMatrix& m, const std::string& indent) {
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << indent << '[';
    for (std::size_t k = 0; k < m.cols(); ++k) {
      std::snprintf(buf, sizeof buf, "%s%+.4f%+.4fi", k ? "  " : "", m(i, k).real(), m(i, k).imag());
      os << buf;
    }
    os << "]\n";
  }
}

struct CommonFlags {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> trials;
  std::optional<int> max_iter;
  std::vector<std::size_t> ancilla;
  std::string json_path;
};

void add_check_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed, "RNG seed (falls back to the file, then COARSEKIT_SEED, then 0)");
  cmd->add_option("--tol", f.tol, "SDP tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", f.max_iter, "SDP iteration cap")->check(CLI::PositiveNumber);
}

std::uint64_t env_seed() {
  const char* s = std::getenv("COARSEKIT_SEED");
  if (!s || !*s) return 0;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (used != std::strlen(s)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ck::Error(ck::ErrorKind::Parse, std::string("COARSEKIT_SEED is not an unsigned integer: ") + s);
  }
}

ck::CheckConfig resolve_config(const CommonFlags& f, const ck::ConfigOverrides& file) {
  ck::CheckConfig c;
  c.seed = f.seed ? *f.seed : file.seed ? *file.seed : env_seed();
  c.sdp_tol = f.tol.value_or(file.sdp_tol.value_or(c.sdp_tol));
  c.sdp_max_iter = f.max_iter.value_or(file.sdp_max_iter.value_or(c.sdp_max_iter));
  c.witness_trials = f.trials.value_or(file.witness_trials.value_or(c.witness_trials));
  c.ancilla_dims = !f.ancilla.empty() ? f.ancilla : file.ancilla_dims.value_or(std::vector<std::size_t>{});
  return c;
}

// A registry name or a path to a scenario file.
ck::ScenarioFile load_input(const std::string& input) {
  if (auto named = ck::find_scenario(input)) {
    ck::ScenarioFile f;
    f.name = named->name;
    f.scenario = named->scenario;
    f.expected = named->expected;
    f.notes = named->notes;
    return f;
  }
  return ck::read_scenario_file(input);
}

const ck::Scenario& require_scenario(const ck::ScenarioFile& f) {
  if (!f.scenario) throw ck::Error(ck::ErrorKind::Parse, "'" + f.name + "' has no quantum scenario (kraus/unitary)");
  return *f.scenario;
}

void print_report(std::ostream& os, const ck::ReportFile& file) {
  const ck::CompatReport& r = file.report;
  const ck::MethodAgreement& m = r.agreement;
  os << "scenario     " << file.scenario_name << " (D=" << file.micro_dim << ", d=" << file.macro_dim << ")\n";
  os << "verdict      " << ck::to_string(m.overall) << "\n\n";
  os << "geometric    " << ck::to_string(m.geometric) << ": fiber residual " << sci(r.fiber.residual)
     << ", kernel dim " << r.fiber.kernel_dim << "\n";
  os << "algebraic    " << ck::to_string(m.algebraic) << ": residual " << sci(r.algebraic.residual)
     << " (threshold " << sci(r.algebraic.threshold) << "), dual identity residual "
     << sci(r.dual_identity_residual) << "\n";
  os << "sdp          " << ck::to_string(m.sdp) << ": " << ck::to_string(r.sdp.status) << ", residual "
     << sci(r.sdp.residual) << ", " << r.sdp.iterations << " iterations\n";
  os << "witness      ";
  if (r.witness) {
    os << "found at trial " << r.witness->trial << " (ancilla " << r.witness->ancilla_dim << "): pg "
       << fixed(r.witness->pg_before) << " -> " << fixed(r.witness->pg_after) << ", gap " << sci(r.witness->gap())
       << "\n";
  } else {
    os << "none in " << r.witness_trials << " trials (ancilla";
    for (std::size_t n : r.ancilla_dims) os << ' ' << n;
    os << ")\n";
  }
  os << "equivalence  " << ck::to_string(m.unitary_equivalence);
  if (r.kraus_equivalence) os << ": connecting-unitary residual " << sci(r.kraus_equivalence->residual);
  os << "\n";
  if (r.emergent) {
    os << "\nemergent channel (" << r.emergent->kraus().size() << " Kraus operators, diagram residual "
       << sci(r.emergent_diagram_residual) << ")\n";
    for (std::size_t i = 0; i < r.emergent->kraus().size(); ++i) {
      os << "  K" << i << ":\n";
      print_matrix(os, r.emergent->kraus()[i], "    ");
    }
  }
}

int exit_for(ck::Verdict v) {
  switch (v) {
    case ck::Verdict::Compatible: return kExitCompatible;
    case ck::Verdict::Incompatible: return kExitIncompatible;
    case ck::Verdict::Inconclusive: return kExitUndecided;
  }
  return kExitUndecided;
}

int cmd_check(const std::string& input, const CommonFlags& flags) {
  const ck::ScenarioFile f = load_input(input);
  const ck::Scenario& s = require_scenario(f);
  ck::ReportFile file;
  file.scenario_name = f.name;
  file.micro_dim = s.micro_dim();
  file.macro_dim = s.macro_dim();
  file.config = resolve_config(flags, f.config);
  file.report = ck::run_all(s, file.config);
  print_report(std::cout, file);
  if (!flags.json_path.empty()) ck::write_json(flags.json_path, ck::to_json(file));
  return exit_for(file.report.agreement.overall);
}

int cmd_construct(const std::string& input, const CommonFlags& flags, const std::string& out) {
  const ck::ScenarioFile f = load_input(input);
  const ck::Scenario& s = require_scenario(f);
  const ck::CheckConfig cfg = resolve_config(flags, f.config);
  const auto gamma = ck::construct_emergent(s, cfg.sdp_max_iter, cfg.sdp_tol);
  if (!gamma) {
    std::cerr << "no CPTP emergent channel found for " << f.name << " (fiber residual "
              << sci(ck::check_fiber_preservation(s).residual) << ")\n";
    return kExitIncompatible;
  }
  const double residual = ck::diagram_residual(s, *gamma);
  std::cout << "emergent channel for " << f.name << ": " << gamma->kraus().size()
            << " Kraus operators, diagram residual " << sci(residual) << "\n";
  for (std::size_t i = 0; i < gamma->kraus().size(); ++i) {
    std::cout << "  K" << i << ":\n";
    print_matrix(std::cout, gamma->kraus()[i], "    ");
  }
  if (!out.empty()) {
    ck::Json j = ck::to_json(*gamma);
    j["diagram_residual"] = residual;
    ck::write_json(out, j);
  }
  return kExitCompatible;
}

int cmd_classical(const std::string& input, bool emergent, std::optional<std::size_t> do_x,
                  const std::string& json_path) {
  const ck::ScenarioFile f = ck::read_scenario_file(input);
  if (!f.chain && !f.do_model) throw ck::Error(ck::ErrorKind::Parse, "'" + input + "' has no classical block");
  if (!emergent && !do_x) emergent = true;
  ck::Json out{{"version", ck::kFormatVersion}, {"name", f.name}};

  if (emergent) {
    if (!f.chain) throw ck::Error(ck::ErrorKind::Parse, "classical block has no 'chain' model");
    const ck::CondTable table = ck::emergent_channel(*f.chain);
    const double residual = ck::verify_total_probability(*f.chain);
    std::cout << "emergent P(Y|X) (rows y, columns x)\n";
    char buf[32];
    for (std::size_t y = 0; y < table.n_out(); ++y) {
      std::cout << "  ";
      for (std::size_t x = 0; x < table.n_in(); ++x) {
        std::snprintf(buf, sizeof buf, "%s%.12f", x ? "  " : "", table(y, x));
        std::cout << buf;
      }
      std::cout << "\n";
    }
    std::cout << "total probability residual " << sci(residual) << "\n";
    out["emergent"] = ck::to_json(table);
    out["total_probability_residual"] = residual;
  }
  if (do_x) {
    if (!f.do_model) throw ck::Error(ck::ErrorKind::Parse, "classical block has no 'do' model");
    const ck::ObsVsDo r = ck::observational_vs_do(*f.do_model, *do_x);
    const double gap = r.l1_gap();
    auto show = [](const std::vector<double>& v) {
      std::ostringstream os;
      char buf[32];
      for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%s%.12f", i ? "  " : "", v[i]);
        os << buf;
      }
      return os.str();
    };
    std::cout << "P(Y | do(X=" << *do_x << "))  " << show(r.intervened) << "\n";
    std::cout << "P(Y | X=" << *do_x << ")      " << show(r.obs) << "\n";
    std::cout << "L1 gap " << sci(gap) << (gap > 1e-12 ? "  (conditioning and intervening differ)" : "") << "\n";
    out["do"] = ck::Json{{"x", *do_x}, {"intervened", r.intervened}, {"observed", r.obs}, {"l1_gap", gap}};
  }
  if (!json_path.empty()) ck::write_json(json_path, out);
  return 0;
}

struct GenFlags {
  std::string name;
  std::size_t micro = 3;
  std::size_t macro = 2;
  std::size_t kraus = 2;
  std::optional<std::uint64_t> seed;
  bool planted = false;
  std::string out;
};

int cmd_gen(const GenFlags& g) {
  ck::Json j;
  if (!g.name.empty()) {
    const auto named = ck::find_scenario(g.name);
    if (!named) throw ck::Error(ck::ErrorKind::Parse, "unknown registry scenario '" + g.name + "'");
    j = ck::to_json(*named);
  } else {
    const std::uint64_t seed = g.seed ? *g.seed : env_seed();
    j = ck::to_json(g.planted ? ck::planted_covariant_scenario(g.micro, g.macro, seed)
                              : ck::random_scenario(g.micro, g.macro, g.kraus, seed));
  }
  if (g.out.empty())
    std::cout << j.dump(2) << "\n";
  else
    ck::write_json(g.out, j);
  return 0;
}

int cmd_list() {
  for (const ck::NamedScenario& s : ck::registry())
    std::cout << s.name << "  D=" << s.scenario.micro_dim() << " d=" << s.scenario.macro_dim() << "  expected "
              << ck::to_string(s.expected) << "\n";
  return 0;
}

int exit_for_error(const ck::Error& e) {
  switch (e.kind()) {
    case ck::ErrorKind::Parse: return kExitParse;
    case ck::ErrorKind::MethodDisagreement: return kExitDisagreement;
    default: return kExitInvariant;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks whether a coarse-graining of unitary dynamics admits emergent channel dynamics."};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string input;

  auto* check = app.add_subcommand("check", "run every compatibility criterion");
  check->add_option("input", input, "registry name or scenario file")->required();
  add_check_flags(check, flags);
  check->add_option("--trials", flags.trials, "witness trials per ancilla dimension")->check(CLI::PositiveNumber);
  check->add_option("--ancilla", flags.ancilla, "ancilla dimensions for the witness search (repeatable)")
      ->check(CLI::PositiveNumber);
  check->add_option("--json", flags.json_path, "write the machine-readable report here");

  std::string construct_out;
  auto* construct = app.add_subcommand("construct", "build the emergent channel");
  construct->add_option("input", input, "registry name or scenario file")->required();
  add_check_flags(construct, flags);
  construct->add_option("--out,--json", construct_out, "write the emergent Kraus operators here");

  bool emergent = false;
  std::optional<std::size_t> do_x;
  std::string classical_json;
  auto* classical = app.add_subcommand("classical", "classical chain model: emergent P(Y|X) or do(X=x)");
  classical->add_option("input", input, "scenario file with a 'classical' block")->required();
  classical->add_flag("--emergent", emergent, "emit the emergent table P~(Y|X)");
  classical->add_option("--do", do_x, "emit P(Y|do(X=x)) next to P(Y|X=x)");
  classical->add_option("--json", classical_json, "write results here");

  auto* list = app.add_subcommand("list", "list built-in scenarios");

  GenFlags gen_flags;
  auto* gen = app.add_subcommand("gen", "write a scenario file (random, planted or from the registry)");
  gen->add_option("name", gen_flags.name, "registry scenario to export instead of a random one");
  gen->add_option("--micro", gen_flags.micro, "microscopic dimension D")->check(CLI::PositiveNumber);
  gen->add_option("--macro", gen_flags.macro, "macroscopic dimension d")->check(CLI::PositiveNumber);
  gen->add_option("--kraus", gen_flags.kraus, "Kraus operators of the random coarse-graining")
      ->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_flags.seed, "RNG seed (falls back to COARSEKIT_SEED, then 0)");
  gen->add_flag("--planted", gen_flags.planted, "plant an exactly covariant scenario (d must divide D)");
  gen->add_option("--out", gen_flags.out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  try {
    if (check->parsed()) return cmd_check(input, flags);
    if (construct->parsed()) return cmd_construct(input, flags, construct_out);
    if (classical->parsed()) return cmd_classical(input, emergent, do_x, classical_json);
    if (list->parsed()) return cmd_list();
    if (gen->parsed()) return cmd_gen(gen_flags);
  } catch (const ck::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for_error(e);
  }
  return kExitParse;
}
