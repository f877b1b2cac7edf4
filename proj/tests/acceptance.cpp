// Acceptance criteria: one PASS/FAIL line per criterion on stdout, details of
// any violation on stderr. Exit status is nonzero when a criterion fails.
//
// Usage: acceptance <path-to-qsd-binary>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "qsd/io.hpp"
#include "qsd/verify.hpp"

using namespace qsd;
using namespace qsd::verify;

namespace {

constexpr std::uint64_t kSeed = 20240917;

struct Item {
  std::string check_id;
  std::optional<double> tolerance;  // overrides the check's own tolerance
};

const Check& find_check(const std::string& id) {
  for (const auto& c : registry())
    if (c.id == id) return c;
  throw std::logic_error("no check named " + id);
}

/// Runs each item over dims x trials_per_dim; true when nothing is violated.
bool run_items(const std::vector<Item>& items, const std::vector<std::size_t>& dims, std::size_t trials_per_dim,
               std::string& summary) {
  bool ok = true;
  std::size_t total = 0;
  for (const auto& item : items) {
    Check c = find_check(item.check_id);
    if (item.tolerance) c.tolerance = item.tolerance;
    const auto rec = run_check(c, dims, trials_per_dim, kSeed, kDefaultTolerance);
    total += rec.trials;
    if (!rec.passed()) {
      ok = false;
      std::cerr << "  " << rec.id << ": " << rec.violations << " of " << rec.trials << " violated, worst slack "
                << rec.worst_slack << " (tolerance " << rec.tolerance << ")";
      if (rec.first_error) std::cerr << " error: " << *rec.first_error;
      std::cerr << "\n";
      if (rec.worst_case_inputs) std::cerr << "  worst case: " << rec.worst_case_inputs->dump() << "\n";
    }
  }
  summary = std::to_string(items.size()) + " checks, " + std::to_string(total) + " trials";
  return ok;
}

int failures = 0;

void report(int number, const std::string& title, bool ok, const std::string& summary) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << number << ": " << title << " [" << summary << "]"
            << std::endl;
  if (!ok) ++failures;
}

void criterion(int number, const std::string& title, const std::vector<Item>& items,
               const std::vector<std::size_t>& dims, std::size_t trials_per_dim) {
  std::string summary;
  bool ok = false;
  try {
    ok = run_items(items, dims, trials_per_dim, summary);
  } catch (const std::exception& e) {
    summary = std::string("error: ") + e.what();
  }
  report(number, title, ok, summary);
}

void end_to_end(const std::string& binary) {
  namespace fs = std::filesystem;
  const fs::path out = fs::temp_directory_path() / "qsd_acceptance_report.json";
  const std::string cmd = "\"" + binary + "\" verify --suite all --dims 2,3,4,6 --trials 200 --seed 42 --out \"" +
                          out.string() + "\"";
  const int status = std::system(cmd.c_str());
  bool ok = status == 0;
  std::string summary = "exit status " + std::to_string(status);
  try {
    const auto rep = io::read_json_file(out.string());
    std::set<std::string> covered;
    for (const auto& c : rep["checks"])
      covered.insert(c["invariant"].get<std::string>());
    std::size_t missing = 0;
    for (const auto& inv : invariant_catalog())
      if (!covered.count(inv.key)) {
        ++missing;
        std::cerr << "  invariant without a check in the report: " << inv.key << "\n";
      }
    ok = ok && missing == 0 && rep["total_violations"].get<std::size_t>() == 0;
    summary += ", " + std::to_string(rep["checks"].size()) + " checks, " +
               std::to_string(invariant_catalog().size() - missing) + "/" +
               std::to_string(invariant_catalog().size()) + " invariants covered, " +
               std::to_string(rep["total_violations"].get<std::size_t>()) + " violations";
  } catch (const std::exception& e) {
    ok = false;
    summary += std::string(", report unreadable: ") + e.what();
  }
  std::error_code ec;
  fs::remove(out, ec);
  report(10, "qsd verify --suite all --dims 2,3,4,6 --trials 200 --seed 42", ok, summary);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: acceptance <path-to-qsd-binary>\n";
    return 2;
  }
  const std::vector<std::size_t> five{2, 3, 4, 6, 8};

  // 2000 x 5 dims = 10^4 pairs, each at five skew parameters.
  criterion(1, "SD range over 10^4 pairs; orthogonal pairs give 1",
            {{"sd.range", 1e-9}, {"sd.orthogonal_pairs", 1e-9}, {"sd.overlapping_pairs", std::nullopt}}, five, 2000);
  criterion(2, "trace-norm sandwich and its tight family",
            {{"sd.trace_norm_lower", 1e-8}, {"sd.trace_norm_upper", 1e-8}, {"sd.trace_norm_tight", 1e-9}}, five, 200);
  criterion(3, "Frechet derivative vs quadrature and finite differences, cond <= 1e6",
            {{"frechet.quadrature", std::nullopt}, {"frechet.finite_difference", std::nullopt}}, five, 100);
  criterion(4, "operator lemmas T_{A+B}(A) <= 1, R_{A+B}(A) <= 1, R_A(A,D) = T_A(D)",
            {{"frechet.sum_bound", 1e-9}, {"frechet.second_sum_bound", 1e-9}, {"frechet.second_at_base", std::nullopt}},
            five, 100);
  criterion(5, "metric continuity inequality, both sides",
            {{"metric.continuity_lower", 1e-8}, {"metric.continuity_upper", 1e-8}}, five, 100);
  criterion(6, "differential SD: symmetry, averaging, derivative, chi2_log relation",
            {{"dsd.symmetry", 1e-10}, {"sd.averaging", 1e-6}, {"dsd.derivative", 1e-6}, {"chi2log.relation", 1e-9}},
            five, 100);
  criterion(7, "shifted-argument bounds, continuity bounds, equality case",
            {{"shifted.sd_first_lower", 1e-8},
             {"shifted.sd_first_upper", 1e-8},
             {"shifted.re_first_lower", 1e-8},
             {"shifted.re_first_upper", 1e-8},
             {"shifted.sd_second_lower", 1e-8},
             {"shifted.sd_second_upper", 1e-8},
             {"shifted.re_second_lower", 1e-8},
             {"shifted.re_second_upper", 1e-8},
             {"continuity.dsd_second_arg", 1e-8},
             {"continuity.dsd_first_arg", 1e-8},
             {"continuity.sd_second_arg", 1e-8},
             {"continuity.sd_first_arg", 1e-8},
             {"continuity.sd_equality_case", 1e-9}},
            five, 100);
  criterion(8, "entropy gain <= 2 t h(p) ||H||, SD decomposition, unitary-shift bound (10^3 experiments)",
            {{"sim.entropy_gain", 1e-8}, {"sim.sd_representation", 1e-8}, {"sim.sd_unitary_shift", 1e-8}},
            {2, 3, 4, 5, 6}, 200);
  criterion(9, "Holevo quantity three ways, bound chain, continuity, fidelity-based bound",
            {{"holevo.three_forms", 1e-9},
             {"holevo.bound_chain", 1e-8},
             {"holevo.continuity", 1e-8},
             {"holevo.fidelity_bound", 1e-8}},
            {2, 3, 4, 6}, 125);
  end_to_end(argv[1]);
  return failures == 0 ? 0 : 1;
}
