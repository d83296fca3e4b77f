#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace growthlab::cli {

enum class Scenario { measure, classify, decompose, incidence, construct, span, tower, bsg, stab, bounds };

const std::vector<std::string>& scenario_names();
std::optional<Scenario> scenario_from(std::string_view name);
std::string to_string(Scenario s);

/// "name(arg, arg, ...)" with nested parentheses, or a bare literal (name
/// holds the whole text and `call` is false).
struct Spec {
  std::string name;
  std::vector<std::string> args;
  bool call = false;
  std::string raw;
};

/// Throws std::invalid_argument on unbalanced parentheses.
Spec parse_spec(std::string_view text);

struct Params {
  std::optional<double> eps, delta, t, c, c_prime, xi, gamma, gamma_prime, r, quantile;
  std::optional<std::uint64_t> n, k, m, budget, top;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::measure;
  std::string label;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Params params;
  /// Raw input specs keyed by name (family, poly, A, B, D, B0..B9, surface, mode,
  /// sizes, action, S, W, generator, Ns, ks, ns).
  std::map<std::string, std::string> inputs;
  /// Directory that relative file(...) paths resolve against.
  std::filesystem::path base_dir;
};

struct Validation {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
};

/// Structural and referential validation. Every problem is reported; nothing
/// throws. `scenario` overrides or must agree with a `scenario` key.
Validation validate_config(const std::string& text, std::optional<Scenario> scenario = std::nullopt,
                           const std::filesystem::path& base_dir = ".");

/// One CSV row. Counts and reals are kept as preformatted cells so that
/// empty fields stay empty.
struct Row {
  std::string label;
  std::optional<std::uint64_t> n;
  std::string f_count, image, incidence, log_scale, coarse_dim, slope, residual, value;
};

struct Report {
  std::string scenario;
  std::vector<Row> rows;
  std::vector<std::string> summary;
  /// Extra outputs as (path suffix, contents), e.g. the generated set.
  std::vector<std::pair<std::string, std::string>> artifacts;
};

/// Header: scenario,label,n,f_count,image,incidence,log_scale,coarse_dim,slope,residual,value
void write_csv(const Report& report, std::ostream& out);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Raised when a result fails its own exact recheck.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Runs the scenario. Rows come back sorted by (label, n).
Report run_experiment(const ExperimentConfig& config);

/// Human-readable description of what run_experiment would do.
std::vector<std::string> plan(const ExperimentConfig& config);

enum ExitCode : int { ok = 0, invalid_config = 2, budget_exceeded = 3, invariant_violation = 4 };

}  // namespace growthlab::cli
