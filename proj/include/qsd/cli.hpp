#pragma once

// Command-line front end: compute, random, verify. Kept in a header so the
// tests can drive it in-process with captured streams.

#include <cstdint>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qsd/divergence.hpp"
#include "qsd/ensemble.hpp"
#include "qsd/errors.hpp"
#include "qsd/frechet.hpp"
#include "qsd/io.hpp"
#include "qsd/random.hpp"
#include "qsd/verify.hpp"

namespace qsd::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kUsage = 2, kDomain = 3, kIo = 4 };

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Seed used when --seed is absent: QSD_SEED if set, else 42.
inline std::uint64_t default_seed() {
  if (const char* env = std::getenv("QSD_SEED")) {
    try {
      std::size_t used = 0;
      const std::string s(env);
      const auto v = std::stoull(s, &used, 0);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError("QSD_SEED is not an unsigned integer: " + std::string(env));
  }
  return kDefaultSeed;
}

inline std::string format_value(double v) {
  if (std::isinf(v) && v > 0) return "inf";
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline const std::vector<std::string>& measures() {
  static const std::vector<std::string> m{"entropy", "re",  "sd",          "dsd",    "trace-dist",
                                          "fidelity", "chi", "mixing-rate", "chi2log"};
  return m;
}

struct ComputeArgs {
  std::string measure;
  std::vector<std::string> files;
  std::optional<double> alpha;
  std::optional<double> t;
};

namespace detail {

inline void expect_files(const ComputeArgs& a, std::size_t n, const char* what) {
  if (a.files.size() != n)
    throw CLI::ValidationError("--measure " + a.measure + " expects " + std::to_string(n) + " " + what);
}

inline double need_alpha(const ComputeArgs& a) {
  if (!a.alpha) throw CLI::ValidationError("--measure " + a.measure + " requires --alpha");
  return *a.alpha;
}

inline DensityMatrix state_file(const std::string& path) { return io::state_from_json(io::read_json_file(path)); }

}  // namespace detail

/// Evaluates one measure; INFINITE relative entropy is +infinity.
inline double compute(const ComputeArgs& a) {
  using detail::expect_files;
  using detail::state_file;
  const std::string& m = a.measure;
  if (m == "entropy") {
    expect_files(a, 1, "state file");
    return von_neumann_entropy(state_file(a.files[0]));
  }
  if (m == "chi") {
    expect_files(a, 1, "ensemble file");
    return holevo_chi(io::ensemble_from_json(io::read_json_file(a.files[0])));
  }
  if (m == "mixing-rate") {
    // ensemble followed by one Hamiltonian per member
    if (a.files.size() < 2) throw CLI::ValidationError("--measure mixing-rate expects an ensemble and Hamiltonians");
    const Ensemble e = io::ensemble_from_json(io::read_json_file(a.files[0]));
    if (a.files.size() != e.size() + 1)
      throw CLI::ValidationError("--measure mixing-rate expects one Hamiltonian file per ensemble member");
    std::vector<HermitianOperator> hs;
    for (std::size_t j = 1; j < a.files.size(); ++j) hs.push_back(io::operator_from_json(io::read_json_file(a.files[j])));
    if (hs.size() == 1) hs.push_back(hs.front());
    MixingExperiment exp(e, hs[0], hs[1], a.t.value_or(0.0));
    if (a.t && *a.t != 0.0) {
      std::vector<DensityMatrix> moved;
      for (std::size_t j = 0; j < e.size(); ++j) moved.push_back(evolve(e.state(j), exp.hamiltonian(j), *a.t));
      exp = MixingExperiment(Ensemble(e.weights(), std::move(moved)), hs[0], hs[1], *a.t);
    }
    return mixing_rate(exp);
  }
  expect_files(a, 2, "state files");
  const DensityMatrix rho = state_file(a.files[0]);
  const DensityMatrix sigma = state_file(a.files[1]);
  if (m == "re") {
    const auto v = relative_entropy(rho, sigma);
    return v.is_infinite() ? std::numeric_limits<double>::infinity() : v.value;
  }
  if (m == "sd") return skew_divergence(rho, sigma, SkewParameter(detail::need_alpha(a)));
  if (m == "dsd") {
    const double al = detail::need_alpha(a);
    if (!(al >= 0.0 && al <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
    return differential_skew_divergence(rho, sigma, al);
  }
  if (m == "trace-dist") return trace_distance(rho, sigma);
  if (m == "fidelity") return fidelity(rho, sigma);
  if (m == "chi2log") return chi2_log(rho, sigma);
  throw CLI::ValidationError("unknown measure " + m);
}

inline std::vector<std::size_t> parse_dims(const std::string& text) {
  std::vector<std::size_t> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v == 0) throw CLI::ValidationError("--dims must be positive integers: " + text);
    dims.push_back(v);
  }
  if (dims.empty()) throw CLI::ValidationError("--dims is empty");
  return dims;
}

/// Runs the CLI. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Skew-divergence toolkit: compute measures, generate random objects, verify inequalities"};
  app.require_subcommand(1);

  ComputeArgs cargs;
  double alpha = 0.0;
  double time = 0.0;
  auto* compute_cmd = app.add_subcommand("compute", "Evaluate a measure on states read from JSON files");
  compute_cmd->add_option("--measure", cargs.measure, "Measure to evaluate")
      ->required()
      ->check(CLI::IsMember(measures()));
  auto* alpha_opt = compute_cmd->add_option("--alpha", alpha, "Skewing parameter");
  auto* t_opt = compute_cmd->add_option("--t", time, "Evolution time (mixing-rate)");
  compute_cmd->add_option("files", cargs.files, "Input files")->required();

  std::string kind;
  std::size_t dim = 0;
  std::size_t count = 2;
  std::uint64_t seed = 0;
  std::string out_path = "-";
  auto* random_cmd = app.add_subcommand("random", "Write a seeded random object as JSON");
  random_cmd->add_option("kind", kind, "state | ensemble | hamiltonian | channel")
      ->required()
      ->check(CLI::IsMember({"state", "ensemble", "hamiltonian", "channel"}));
  random_cmd->add_option("--dim", dim, "Hilbert space dimension")->required()->check(CLI::PositiveNumber);
  random_cmd->add_option("--n", count, "Ensemble size, or environment dimension for a channel")
      ->check(CLI::PositiveNumber);
  auto* random_seed = random_cmd->add_option("--seed", seed, "Seed (default QSD_SEED or 42)");
  random_cmd->add_option("--out", out_path, "Output path, - for stdout");

  std::string suite = "all";
  std::string dims_text = "2,3,4";
  std::size_t trials = 200;
  double tol = verify::kDefaultTolerance;
  std::string report_path = "-";
  std::uint64_t vseed = 0;
  auto* verify_cmd = app.add_subcommand("verify", "Run the property-check suite and write a JSON report");
  verify_cmd->add_option("--suite", suite, "all | core | frechet | ensemble | sim")
      ->check(CLI::IsMember({"all", "core", "frechet", "ensemble", "sim"}));
  verify_cmd->add_option("--dims", dims_text, "Comma-separated dimensions");
  verify_cmd->add_option("--trials", trials, "Random instances per check and dimension");
  auto* verify_seed = verify_cmd->add_option("--seed", vseed, "Seed (default QSD_SEED or 42)");
  verify_cmd->add_option("--tol", tol, "Violation tolerance for checks without a fixed one")->check(CLI::NonNegativeNumber);
  verify_cmd->add_option("--out", report_path, "Report path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (compute_cmd->parsed()) {
      if (*alpha_opt) cargs.alpha = alpha;
      if (*t_opt) cargs.t = time;
      out << format_value(compute(cargs)) << "\n";
      return kOk;
    }
    if (random_cmd->parsed()) {
      Rng rng = make_stream(*random_seed ? seed : default_seed());
      io::json j;
      if (kind == "state") j = io::to_json(random_state(dim, rng).op());
      if (kind == "hamiltonian") j = io::to_json(random_hamiltonian(dim, rng));
      if (kind == "channel") j = io::to_json(random_cptp(dim, count, rng));
      if (kind == "ensemble") {
        std::vector<DensityMatrix> states;
        const auto w = random_probabilities(count, rng);
        for (std::size_t i = 0; i < count; ++i) states.push_back(random_state(dim, rng));
        j = io::to_json(Ensemble(w, std::move(states)));
      }
      io::write_json(j, out_path, out);
      return kOk;
    }
    if (verify_cmd->parsed()) {
      if (trials == 0) throw CLI::ValidationError("--trials must be >= 1");
      const auto dims = parse_dims(dims_text);
      const auto report = verify::run_suite(suite, dims, trials, *verify_seed ? vseed : default_seed(), tol);
      io::write_json(report.to_json(), report_path, out);
      for (const auto& c : report.checks)
        if (!c.passed())
          err << "violation: " << c.id << " (" << c.violations << " of " << c.trials << ", worst slack "
              << format_value(c.worst_slack) << ")\n";
      err << report.checks.size() << " checks, " << report.total_violations() << " violations, "
          << format_value(report.wall_time) << " s\n";
      return report.passed() ? kOk : kViolation;
    }
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const ConvergenceError& e) {
    err << "convergence error: " << e.what() << "\n";
    return kDomain;
  }
  return kUsage;
}

}  // namespace qsd::cli
