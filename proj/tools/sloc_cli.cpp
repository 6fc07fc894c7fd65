#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sloc/adversary.hpp"
#include "sloc/harness.hpp"
#include "sloc/offline.hpp"
#include "sloc/simulator.hpp"

using nlohmann::json;
using namespace sloc;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << text;
}

json audit_json(const AuditReport& rep) {
  json j = json::object();
  for (const auto& i : rep.items) {
    j[i.name] = i.skipped ? "skipped" : i.pass ? "pass" : "fail: " + i.detail;
  }
  return j;
}

json row_json(const RatioRow& r) {
  return {{"policy", r.policy},       {"branch", r.branch},    {"m", r.m},
          {"ol", r.ol},               {"opt", r.opt},          {"opt_kind", to_string(r.opt_kind)},
          {"ratio", r.ratio},         {"bound", r.bound.value}, {"formula", r.bound.formula},
          {"within_bound", r.within}, {"status", r.status}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online TSP / dial-a-ride under spatial locality: simulate, solve offline, audit"};
  app.require_subcommand(1);

  std::string instance_path;
  std::string policy_name = "replan-baseline";
  std::string trace_path;
  bool raw = false;
  bool strict = false;
  auto* run_cmd = app.add_subcommand("run", "simulate one policy on an instance or adaptive oracle");
  auto* inst_opt = run_cmd->add_option("--instance", instance_path, "instance JSON");
  run_cmd->add_option("--oracle", instance_path, "instance JSON with a generator block")->excludes(inst_opt);
  run_cmd->add_option("--policy", policy_name, "policy name")->capture_default_str();
  run_cmd->add_option("--trace", trace_path, "write the trace as JSON lines");
  run_cmd->add_flag("--raw", raw, "skip the threshold dispatch");
  run_cmd->add_flag("--strict", strict, "abort when a replan's first outstanding request is out of reach");

  std::string schedule_path;
  auto* opt_cmd = app.add_subcommand("opt", "exact offline optimum (lower bound above the size caps)");
  opt_cmd->add_option("--instance", instance_path, "instance JSON")->required();
  opt_cmd->add_option("--schedule", schedule_path, "write the witness schedule JSON");

  std::string config_path;
  std::string out_path = "results.csv";
  std::string plot_dir;
  int parallel = 0;
  auto* exp_cmd = app.add_subcommand("experiment", "run a policy x instance grid");
  exp_cmd->add_option("--config", config_path, "experiment JSON")->required();
  exp_cmd->add_option("--out", out_path, "CSV output")->capture_default_str();
  exp_cmd->add_option("--plot", plot_dir, "directory for plot data files");
  exp_cmd->add_option("--parallel", parallel, "worker threads (0: all cores)");

  int leaves = 10;
  double delta = 2.0;
  std::string ending = "nomadic";
  std::string adv_policy = "arbitrary-replan";
  auto* adv_cmd = app.add_subcommand("adversary", "adversarial constructions");
  adv_cmd->require_subcommand(1);
  auto* star_cmd = adv_cmd->add_subcommand("star", "star lower-bound adversary");
  star_cmd->add_option("--n", leaves, "leaf count")->capture_default_str();
  star_cmd->add_option("--delta", delta, "edge length and locality radius")->capture_default_str();
  star_cmd->add_option("--policy", adv_policy, "policy")->capture_default_str();
  star_cmd->add_option("--ending", ending, "nomadic|homing")->capture_default_str();
  star_cmd->add_option("--trace", trace_path, "write the trace as JSON lines");

  std::string metric_path;
  auto* val_cmd = app.add_subcommand("validate", "check a metric, an instance, or a policy trace");
  auto* vm = val_cmd->add_option("--metric", metric_path, "metric JSON");
  val_cmd->add_option("--instance", instance_path, "instance JSON")->excludes(vm);
  val_cmd->add_option("--policy", policy_name, "also simulate this policy and audit the trace");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      if (instance_path.empty()) throw Error(Errc::invalid_argument, "run needs --instance or --oracle");
      const Instance inst = load_instance(instance_path);
      PolicyOptions po;
      po.raw = raw;
      po.strict_lemma3 = strict;
      auto policy = make_policy(policy_name, inst, po);
      const Trace trace = run(inst, *policy);
      if (!trace_path.empty()) write_text(trace_path, trace_to_jsonl(trace));
      const Instance realized = realized_instance(trace, inst);
      const AuditReport rep = audit(trace, realized, AuditOptions{inst.generator.has_value()});
      json out = {{"policy", trace.policy}, {"branch", trace.branch}, {"makespan", trace.makespan},
                  {"requests", trace.requests.size()}, {"events", trace.events.size()}, {"audit", audit_json(rep)}};
      const OptValue ov = opt_value(realized);
      const Bound b = theoretical_bound(bound_params(policy_name, inst));
      out["opt"] = ov.value;
      out["opt_kind"] = to_string(ov.kind);
      out["ratio"] = safe_ratio(trace.makespan, ov.value);
      out["bound"] = b.value;
      out["formula"] = b.formula;
      out["within_bound"] = within_flag(safe_ratio(trace.makespan, ov.value), b, ov.kind);
      std::cout << out.dump(2) << "\n";
      return rep.ok() ? 0 : 1;
    }
    if (*opt_cmd) {
      const Instance inst = load_instance(instance_path);
      json out;
      try {
        const OptResult res = opt_exact(inst);
        const Evaluation ev = evaluate_schedule(res.schedule, inst);
        out = {{"makespan", res.makespan}, {"kind", "exact"}, {"schedule", schedule_to_json(res.schedule)},
               {"replayed", ev.makespan}};
        if (!schedule_path.empty()) write_text(schedule_path, schedule_to_json(res.schedule).dump(2) + "\n");
        std::cout << out.dump(2) << "\n";
        return ev.feasible && approx_eq(ev.makespan, res.makespan) ? 0 : 1;
      } catch (const Error& e) {
        if (e.code() != Errc::size_cap_exceeded) throw;
        out = {{"makespan", opt_lower_bound(inst)}, {"kind", "lower-bound"}, {"note", e.what()}};
        std::cout << out.dump(2) << "\n";
        return 0;
      }
    }
    if (*exp_cmd) {
      ExperimentConfig cfg = load_experiment(config_path);
      if (parallel > 0) cfg.parallelism = parallel;
      const Report rep = run_experiment(cfg);
      write_csv(rep.rows, out_path);
      if (!plot_dir.empty()) {
        std::filesystem::create_directories(plot_dir);
        for (auto kind : {PlotKind::ratio_vs_delta, PlotKind::ratio_vs_n, PlotKind::bound_overlay}) {
          write_text((std::filesystem::path(plot_dir) / (std::string(to_string(kind)) + ".dat")).string(),
                     emit_plotdata(rep.rows, kind));
        }
      }
      bool hard_fail = false;
      for (const auto& s : rep.summary) {
        std::cout << s.policy << "  " << s.formula << "  runs=" << s.runs << "  max_ratio=" << s.max_ratio
                  << "  pass=" << s.pass << "  fail=" << s.fail << "  unknown=" << s.unknown
                  << "  errors=" << s.errors << "\n";
        hard_fail = hard_fail || s.fail > 0 || s.errors > 0;
      }
      for (const auto& r : rep.rows) hard_fail = hard_fail || r.status.rfind("audit-fail", 0) == 0;
      std::cout << rep.rows.size() << " rows written to " << out_path << "\n";
      return hard_fail ? 1 : 0;
    }
    if (*star_cmd) {
      const Ending end = ending == "homing" ? Ending::homing : Ending::nomadic;
      const Instance inst = star_instance(leaves, delta, end);
      PolicyOptions po;
      po.raw = true;
      auto policy = make_policy(adv_policy, inst, po);
      StarOracle oracle(leaves, delta);
      const Trace trace = run(inst, *policy, oracle);
      if (!trace_path.empty()) write_text(trace_path, trace_to_jsonl(trace));
      const Instance realized = realized_instance(trace, inst);
      const Schedule opt = star_schedule(realized);
      const AuditReport rep = audit(trace, realized);
      RatioRow row;
      row.policy = adv_policy;
      row.branch = "raw";
      row.m = static_cast<int>(realized.requests.size());
      row.ol = trace.makespan;
      row.opt = opt.makespan;
      row.opt_kind = OptKind::constructed;
      row.ratio = safe_ratio(row.ol, row.opt);
      BoundParams bp = bound_params(adv_policy, inst);
      bp.raw = true;
      row.bound = theoretical_bound(bp);
      row.within = within_flag(row.ratio, row.bound, row.opt_kind);
      row.status = rep.ok() ? "ok" : "audit-fail";
      const double floor = delta * (delta + 4.0 * leaves);
      json out = {{"instance", instance_to_json(realized)},
                  {"opt_schedule", schedule_to_json(opt)},
                  {"row", row_json(row)},
                  {"online_floor", floor - (end == Ending::nomadic ? delta : 0.0)},
                  {"fallback_releases", oracle.fallback_releases()},
                  {"audit", audit_json(rep)}};
      std::cout << out.dump(2) << "\n";
      return rep.ok() ? 0 : 1;
    }
    if (*val_cmd) {
      if (!metric_path.empty()) {
        const json j = read_json(metric_path);
        const MetricSpace space = metric_from_json(j);
        const auto v = validate_metric(space);
        std::cout << (v ? "violation: " + v->describe() : "ok: " + space.describe()) << "\n";
        return v ? 1 : 0;
      }
      if (instance_path.empty()) throw Error(Errc::invalid_argument, "validate needs --metric or --instance");
      const Instance inst = load_instance(instance_path);
      std::cout << "instance ok: " << inst.requests.size() << " requests, " << inst.space.describe() << "\n";
      if (!val_cmd->get_option("--policy")->empty()) {
        const Trace trace = run(inst, policy_name);
        const AuditReport rep = audit(trace, realized_instance(trace, inst));
        std::cout << rep.describe();
        return rep.ok() ? 0 : 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
