#include "sloc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace sloc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Bounds

BoundParams bound_params(const std::string& policy, const Instance& inst) {
  BoundParams p;
  p.policy = policy;
  p.mode = inst.mode;
  p.k = inst.k;
  p.delta = inst.delta_ratio();
  if (inst.space.is_line()) {
    p.beta = inst.space.beta();
    p.gamma = inst.space.gamma();
  }
  return p;
}

double bound_curve(const std::string& formula, double d, double beta, double gamma) {
  if (formula == "1+d") return 1.0 + d;
  if (formula == "1+(1+d)/(1+b)") return 1.0 + (1.0 + d) / (1.0 + beta);
  if (formula == "2+d") return 2.0 + d;
  if (formula == "2+d/g") return 2.0 + d / gamma;
  if (formula == "2(1+d)") return 2.0 * (1.0 + d);
  if (formula.rfind("lit-", 0) == 0) return std::stod(formula.substr(4));
  return std::nan("");
}

Bound theoretical_bound(const BoundParams& p) {
  const double d = p.delta;
  const bool tsp = p.mode == Mode::tsp;
  auto need = [&p](const std::optional<double>& v, const char* what) {
    if (!v) throw Error(Errc::missing_parameter, p.policy + " bound needs " + what);
    return *v;
  };
  auto pick = [&p](double y, double lit, const std::string& formula) {
    if (p.raw || y < lit) return Bound{y, formula, true};
    std::ostringstream os;
    os << "lit-" << lit;
    return Bound{lit, os.str(), false};
  };
  if (p.policy == "seq-greedy") return Bound{1.0 + d, "1+d", true};
  if (p.policy == "line-switch" || p.policy == "line-sweep-alt") {
    const double b = need(p.beta, "beta");
    return pick(1.0 + (1.0 + d) / (1.0 + b), tsp ? 2.04 : 2.457, "1+(1+d)/(1+b)");
  }
  if (p.policy == "arbitrary-replan") return pick(2.0 + d, tsp ? 2.41 : 2.457, "2+d");
  if (p.policy == "multi-line") return pick(2.0 + d / need(p.gamma, "gamma"), 2.04, "2+d/g");
  if (p.policy == "multi-arbitrary") return pick(2.0 * (1.0 + d), tsp ? 2.41 : 2.457, "2(1+d)");
  if (p.policy == "replan-baseline") return Bound{std::nan(""), "none", false};
  throw Error(Errc::invalid_argument, "no bound for policy '" + p.policy + "'");
}

Bound theoretical_bound(const std::string& policy, const Instance& inst) {
  return theoretical_bound(bound_params(policy, inst));
}

double safe_ratio(double ol, double opt) {
  if (opt <= kEps) return ol <= kEps ? 1.0 : std::numeric_limits<double>::infinity();
  return ol / opt;
}

std::string within_flag(double ratio, const Bound& bound, OptKind kind) {
  if (!bound.testable) return "n/a";
  const bool ok = ratio <= bound.value + 1e-6;
  if (kind == OptKind::lower_bound) return ok ? "pass" : "unknown";
  return ok ? "pass" : "fail";
}

// ---------------------------------------------------------------------------
// Single runs

RatioRow run_one(const RunSpec& spec, const std::string& opt_mode, const PolicyOptions& popts, const OptCaps& caps) {
  const auto start = std::chrono::steady_clock::now();
  const Instance& inst = spec.instance;
  RatioRow row;
  row.policy = spec.policy;
  row.label = spec.label;
  row.k = inst.k;
  row.delta = inst.delta_ratio();
  row.beta = inst.space.is_line() ? inst.space.beta() : std::nan("");
  row.gamma = inst.space.is_line() ? inst.space.gamma() : std::nan("");
  row.mode = inst.mode;
  row.ending = inst.ending;
  row.seed = spec.seed;
  row.status = "ok";
  try {
    PolicyOptions po = popts;
    if (spec.star_leaves) po.raw = true;
    auto policy = make_policy(spec.policy, inst, po);
    std::unique_ptr<RequestOracle> oracle;
    if (spec.star_leaves) {
      oracle = std::make_unique<StarOracle>(*spec.star_leaves, inst.delta);
    } else {
      oracle = make_oracle(inst);
    }
    const Trace trace = run(inst, *policy, *oracle);
    row.branch = trace.branch.empty() ? (po.raw ? "raw" : "") : trace.branch;
    const Instance realized = realized_instance(trace, inst);
    row.m = static_cast<int>(realized.requests.size());
    row.ol = trace.makespan;
    const AuditReport rep = audit(trace, realized);
    if (!rep.ok()) {
      std::string failed;
      bool only_locality = true;
      for (const auto& item : rep.items) {
        if (item.pass) continue;
        if (!failed.empty()) failed += "+";
        failed += item.name;
        only_locality = only_locality && item.name == "spatial-locality";
      }
      // fixed streams are only certified relative to the algorithm they were built for
      const bool certified = inst.generator.has_value();
      row.status = (only_locality && !certified) ? "uncertified" : "audit-fail:" + failed;
    }
    if (spec.star_leaves && opt_mode != "lower-bound") {
      row.opt = star_schedule(realized).makespan;
      row.opt_kind = OptKind::constructed;
    } else if (opt_mode == "lower-bound") {
      row.opt = opt_lower_bound(realized);
      row.opt_kind = OptKind::lower_bound;
    } else {
      const OptValue v = opt_value(realized, caps);
      row.opt = v.value;
      row.opt_kind = v.kind;
    }
    row.ratio = safe_ratio(row.ol, row.opt);
    BoundParams bp = bound_params(spec.policy, inst);
    bp.raw = po.raw;  // the spatial algorithm ran regardless of the dispatch
    row.bound = theoretical_bound(bp);
    row.within = within_flag(row.ratio, row.bound, row.opt_kind);
    if (row.status.rfind("audit-fail", 0) == 0 && row.within == "pass") row.within = "fail";
  } catch (const Error& e) {
    row.status = std::string("error:") + std::string(errc_name(e.code()));
    row.within = "fail";
  }
  row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

// ---------------------------------------------------------------------------
// Config

namespace {

SweepBase sweep_base_from_json(const json& j) {
  SweepBase b;
  b.diameter = j.value("diameter", b.diameter);
  b.delta = j.value("delta", b.delta);
  b.beta = j.value("beta", b.beta);
  b.k = j.value("k", b.k);
  const std::string mode = j.value("mode", "tsp");
  b.mode = mode == "darp" ? Mode::darp : Mode::tsp;
  const std::string ending = j.value("ending", "nomadic");
  b.ending = ending == "homing" ? Ending::homing : Ending::nomadic;
  if (j.contains("generator")) b.generator = generator_from_json(j.at("generator"));
  if (j.contains("space")) b.space = metric_from_json(j.at("space"));
  return b;
}

}  // namespace

ExperimentConfig experiment_from_json(const json& j, const std::string& base_dir) {
  ExperimentConfig cfg;
  try {
    cfg.name = j.value("name", cfg.name);
    if (!j.contains("policies") || !j.at("policies").is_array() || j.at("policies").empty()) {
      throw Error(Errc::schema_violation, "experiment: 'policies' must be a non-empty array");
    }
    const auto policies = j.at("policies").get<std::vector<std::string>>();
    const int reps = j.value("repetitions", 1);
    std::vector<std::uint64_t> seeds;
    if (j.contains("seeds")) {
      seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
      for (int r = 0; r < reps; ++r) seeds.push_back(static_cast<std::uint64_t>(r + 1));
    }
    if (static_cast<int>(seeds.size()) < reps) {
      throw Error(Errc::schema_violation, "experiment: fewer seeds than repetitions");
    }
    cfg.opt_mode = j.value("opt", cfg.opt_mode);
    if (cfg.opt_mode != "exact" && cfg.opt_mode != "lower-bound" && cfg.opt_mode != "constructed") {
      throw Error(Errc::schema_violation, "experiment: opt must be exact|lower-bound|constructed");
    }
    cfg.parallelism = j.value("parallelism", 0);
    cfg.policy_options.raw = j.value("raw", false);
    cfg.policy_options.strict_lemma3 = j.value("strict_lemma3", false);

    std::vector<std::pair<Instance, std::string>> fixed;
    if (j.contains("instances")) {
      int idx = 0;
      for (const auto& item : j.at("instances")) {
        if (item.is_string()) {
          std::filesystem::path p = item.get<std::string>();
          if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
          fixed.emplace_back(load_instance(p.string()), p.filename().string());
        } else {
          fixed.emplace_back(instance_from_json(item), "instance-" + std::to_string(idx));
        }
        ++idx;
      }
    }
    for (int r = 0; r < reps; ++r) {
      for (const auto& [inst, label] : fixed) {
        Instance copy = inst;
        if (copy.generator) copy.generator->seed += seeds[r];
        if (!copy.generator && r > 0) continue;  // fixed instances replay identically
        for (const auto& p : policies) cfg.runs.push_back(RunSpec{copy, p, label, seeds[r], std::nullopt});
      }
      if (j.contains("family")) {
        const json& fam = j.at("family");
        const SweepKind kind = sweep_kind_from_string(fam.at("kind").get<std::string>());
        const auto grid = fam.at("grid").get<std::vector<double>>();
        const SweepBase base = sweep_base_from_json(fam.value("base", json::object()));
        const auto family = sweep_family(kind, grid, base, seeds[r]);
        for (std::size_t i = 0; i < family.size(); ++i) {
          std::ostringstream label;
          label << fam.at("kind").get<std::string>() << "=" << grid[i];
          for (const auto& p : policies) cfg.runs.push_back(RunSpec{family[i], p, label.str(), seeds[r], std::nullopt});
        }
      }
    }
    if (j.contains("star")) {
      const json& st = j.at("star");
      const double delta = st.value("delta", 2.0);
      const std::string ending = st.value("ending", "nomadic");
      for (int n : st.at("n").get<std::vector<int>>()) {
        const Instance inst = star_instance(n, delta, ending == "homing" ? Ending::homing : Ending::nomadic);
        for (const auto& p : policies) {
          cfg.runs.push_back(RunSpec{inst, p, "star-n=" + std::to_string(n), 0, n});
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(Errc::schema_violation, std::string("experiment: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, path + ": " + e.what());
  }
  return experiment_from_json(j, std::filesystem::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Execution

std::vector<SummaryRow> summarize(const std::vector<RatioRow>& rows) {
  std::vector<SummaryRow> out;
  std::map<std::pair<std::string, std::string>, std::size_t> at;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.policy, r.bound.formula);
    auto it = at.find(key);
    if (it == at.end()) {
      it = at.emplace(key, out.size()).first;
      out.push_back(SummaryRow{r.policy, r.bound.formula});
    }
    SummaryRow& s = out[it->second];
    ++s.runs;
    if (r.status.rfind("error", 0) == 0) {
      ++s.errors;
      continue;
    }
    s.max_ratio = std::max(s.max_ratio, r.ratio);
    if (r.within == "pass") ++s.pass;
    if (r.within == "fail") ++s.fail;
    if (r.within == "unknown") ++s.unknown;
  }
  return out;
}

Report run_experiment(const ExperimentConfig& config) {
  Report rep;
  rep.rows.resize(config.runs.size());
  int threads = config.parallelism > 0 ? config.parallelism : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min<int>(threads, static_cast<int>(config.runs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < config.runs.size(); i = next++) {
      rep.rows[i] = run_one(config.runs[i], config.opt_mode, config.policy_options, config.caps);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  rep.summary = summarize(rep.rows);
  return rep;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

std::string csv_header() {
  return "policy,branch,m,k,delta,beta,gamma,mode,ending,ol,opt,opt_kind,ratio,bound,formula,within_bound,status,seed,"
         "label,runtime_ms";
}

std::string to_csv(const std::vector<RatioRow>& rows, bool include_runtime) {
  std::ostringstream os;
  os << "#schema=1\n" << csv_header() << "\n";
  for (const auto& r : rows) {
    os << r.policy << ',' << r.branch << ',' << r.m << ',' << r.k << ',' << num(r.delta) << ',' << num(r.beta) << ','
       << num(r.gamma) << ',' << to_string(r.mode) << ',' << to_string(r.ending) << ',' << num(r.ol) << ','
       << num(r.opt) << ',' << to_string(r.opt_kind) << ',' << num(r.ratio) << ',' << num(r.bound.value) << ','
       << r.bound.formula << ',' << r.within << ',' << r.status << ',' << r.seed << ',' << r.label << ','
       << (include_runtime ? num(r.runtime_ms) : std::string("-")) << "\n";
  }
  return os.str();
}

void write_csv(const std::vector<RatioRow>& rows, const std::string& path) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp);
    out << to_csv(rows);
    if (!out) throw Error(Errc::io_error, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::io_error, "cannot rename " + tmp + ": " + ec.message());
}

PlotKind plot_kind_from_string(const std::string& s) {
  if (s == "ratio-vs-delta") return PlotKind::ratio_vs_delta;
  if (s == "ratio-vs-n") return PlotKind::ratio_vs_n;
  if (s == "bound-overlay") return PlotKind::bound_overlay;
  throw Error(Errc::invalid_argument, "unknown plot kind '" + s + "'");
}

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::ratio_vs_delta: return "ratio-vs-delta";
    case PlotKind::ratio_vs_n: return "ratio-vs-n";
    case PlotKind::bound_overlay: return "bound-overlay";
  }
  return "?";
}

std::string emit_plotdata(const std::vector<RatioRow>& all, PlotKind kind) {
  std::vector<RatioRow> rows;
  for (const auto& r : all) {
    if (r.status.rfind("error", 0) != 0) rows.push_back(r);
  }
  if (rows.empty()) throw Error(Errc::empty_report, "no successful rows to plot");
  std::ostringstream os;
  os << "# kind: " << to_string(kind) << "\n";
  // curve formulas per policy, with the line parameters of its first row
  std::map<std::string, std::pair<const RatioRow*, std::vector<std::string>>> curves;
  for (const auto& r : rows) {
    auto& c = curves[r.policy];
    if (!c.first) c.first = &r;
    auto add = [&c](const std::string& f) {
      if (f != "none" && std::find(c.second.begin(), c.second.end(), f) == c.second.end()) c.second.push_back(f);
    };
    add(r.bound.formula);
    // the fallback constant alongside the spatial formula
    BoundParams bp;
    bp.policy = r.policy;
    bp.mode = r.mode;
    bp.k = r.k;
    bp.delta = 1.0;
    if (!std::isnan(r.beta)) bp.beta = r.beta;
    if (!std::isnan(r.gamma)) bp.gamma = r.gamma;
    try {
      add(theoretical_bound(bp).formula);
    } catch (const Error&) {
    }
  }
  if (kind == PlotKind::ratio_vs_delta || kind == PlotKind::ratio_vs_n) {
    const bool by_delta = kind == PlotKind::ratio_vs_delta;
    os << "# x: " << (by_delta ? "delta" : "m") << "\n";
    os << "# columns: " << (by_delta ? "delta" : "m") << " max_ratio mean_ratio bound runs\n";
    std::map<std::string, std::map<double, std::vector<const RatioRow*>>> groups;
    for (const auto& r : rows) groups[r.policy][by_delta ? r.delta : static_cast<double>(r.m)].push_back(&r);
    bool first = true;
    for (const auto& [policy, pts] : groups) {
      if (!first) os << "\n\n";
      first = false;
      os << "# series: " << policy << "\n";
      for (const auto& [x, rs] : pts) {
        double mx = 0.0;
        double sum = 0.0;
        double bound = std::nan("");
        for (const auto* r : rs) {
          mx = std::max(mx, r->ratio);
          sum += r->ratio;
          if (r->bound.testable) bound = r->bound.value;
        }
        os << num(x) << ' ' << num(mx) << ' ' << num(sum / rs.size()) << ' ' << num(bound) << ' ' << rs.size() << "\n";
      }
    }
    if (by_delta) {
      for (const auto& [policy, c] : curves) {
        for (const auto& f : c.second) {
          os << "\n\n# curve: " << policy << " " << f << "\n# columns: delta bound\n";
          for (int i = 0; i <= 20; ++i) {
            const double d = i / 20.0;
            os << num(d) << ' ' << num(bound_curve(f, d, c.first->beta, c.first->gamma)) << "\n";
          }
        }
      }
    }
    return os.str();
  }
  // bound overlay: measured points, then every bound curve over delta in [0, 1]
  os << "# x: delta\n# columns: delta ratio\n";
  bool first = true;
  std::map<std::string, std::vector<const RatioRow*>> by_policy;
  for (const auto& r : rows) by_policy[r.policy].push_back(&r);
  for (const auto& [policy, rs] : by_policy) {
    if (!first) os << "\n\n";
    first = false;
    os << "# series: " << policy << " measured\n";
    for (const auto* r : rs) os << num(r->delta) << ' ' << num(r->ratio) << "\n";
  }
  for (const auto& [policy, c] : curves) {
    for (const auto& f : c.second) {
      os << "\n\n# curve: " << policy << " " << f << "\n";
      for (int i = 0; i <= 20; ++i) {
        const double d = i / 20.0;
        os << num(d) << ' ' << num(bound_curve(f, d, c.first->beta, c.first->gamma)) << "\n";
      }
    }
  }
  return os.str();
}

}  // namespace sloc
