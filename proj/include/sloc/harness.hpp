#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sloc/adversary.hpp"
#include "sloc/offline.hpp"
#include "sloc/simulator.hpp"

namespace sloc {

struct BoundParams {
  std::string policy;
  Mode mode = Mode::tsp;
  int k = 1;
  double delta = 0.0;  // ratio
  std::optional<double> beta;
  std::optional<double> gamma;
  bool raw = false;  // no dispatch: always the spatial formula
};

BoundParams bound_params(const std::string& policy, const Instance& inst);

struct Bound {
  double value = 0.0;
  std::string formula;  // e.g. "2+d", "lit-2.41", "none"
  bool testable = false;
};

// Spatial-branch formula when the dispatch selects it, else the literature
// constant (not testable here). Throws Errc::missing_parameter.
Bound theoretical_bound(const BoundParams& p);
Bound theoretical_bound(const std::string& policy, const Instance& inst);

// Evaluates formula `formula` at another delta (for plotted curves).
double bound_curve(const std::string& formula, double delta, double beta, double gamma);

struct RatioRow {
  std::string policy;
  std::string branch;
  int m = 0;
  int k = 1;
  double delta = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  Mode mode = Mode::tsp;
  Ending ending = Ending::nomadic;
  double ol = 0.0;
  double opt = 0.0;
  OptKind opt_kind = OptKind::exact;
  double ratio = 0.0;
  Bound bound;
  std::string within;  // pass | fail | unknown | n/a
  std::string status;  // ok | audit-fail:<items> | error:<code>
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
  std::string label;
};

// ratio with 0/0 taken as 1.
double safe_ratio(double ol, double opt);
std::string within_flag(double ratio, const Bound& bound, OptKind kind);

struct RunSpec {
  Instance instance;
  std::string policy;
  std::string label;
  std::uint64_t seed = 0;
  std::optional<int> star_leaves;  // star adversary run
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<RunSpec> runs;
  std::string opt_mode = "exact";  // exact | lower-bound | constructed
  int parallelism = 0;             // 0: hardware concurrency
  PolicyOptions policy_options;
  OptCaps caps;
};

// Config JSON: instances (inline objects or file paths), optional family
// {kind, grid, base}, optional star {n: [...], delta}, policies, repetitions,
// seeds, opt, parallelism, raw. Relative paths resolve against `base_dir`.
ExperimentConfig experiment_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
ExperimentConfig load_experiment(const std::string& path);

RatioRow run_one(const RunSpec& spec, const std::string& opt_mode, const PolicyOptions& popts, const OptCaps& caps);

struct SummaryRow {
  std::string policy;
  std::string formula;
  double max_ratio = 0.0;
  std::size_t runs = 0;
  std::size_t pass = 0;
  std::size_t fail = 0;
  std::size_t unknown = 0;
  std::size_t errors = 0;
};

struct Report {
  std::vector<RatioRow> rows;
  std::vector<SummaryRow> summary;
};

Report run_experiment(const ExperimentConfig& config);
std::vector<SummaryRow> summarize(const std::vector<RatioRow>& rows);

std::string csv_header();
std::string to_csv(const std::vector<RatioRow>& rows, bool include_runtime = true);
// Writes via a temporary file and rename.
void write_csv(const std::vector<RatioRow>& rows, const std::string& path);

enum class PlotKind { ratio_vs_delta, ratio_vs_n, bound_overlay };
PlotKind plot_kind_from_string(const std::string& s);
std::string_view to_string(PlotKind kind);
// Whitespace-separated columns, '#' comments, blocks separated by two blank lines.
// Throws Errc::empty_report.
std::string emit_plotdata(const std::vector<RatioRow>& rows, PlotKind kind);

}  // namespace sloc
