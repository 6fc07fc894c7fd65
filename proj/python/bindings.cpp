// Thin JSON-string bridge; the Python package decodes the results.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sloc/adversary.hpp"
#include "sloc/harness.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace sloc;

namespace {

json audit_json(const AuditReport& rep) {
  json items = json::array();
  for (const auto& i : rep.items) items.push_back({{"name", i.name}, {"pass", i.pass}, {"detail", i.detail}});
  return {{"ok", rep.ok()}, {"items", items}};
}

std::string validate(const std::string& text) { return instance_to_json(instance_from_string(text)).dump(); }

std::string run_policy(const std::string& text, const std::string& policy, bool raw, bool strict) {
  const Instance inst = instance_from_string(text);
  PolicyOptions po;
  po.raw = raw;
  po.strict_lemma3 = strict;
  const Trace trace = run(inst, policy, po);
  const Instance realized = realized_instance(trace, inst);
  const AuditReport rep = audit(trace, realized, AuditOptions{inst.generator.has_value()});
  const OptValue ov = opt_value(realized);
  BoundParams bp = bound_params(policy, inst);
  bp.raw = raw;
  const Bound b = theoretical_bound(bp);
  const double ratio = safe_ratio(trace.makespan, ov.value);
  json out = {{"policy", trace.policy},
              {"branch", trace.branch},
              {"makespan", trace.makespan},
              {"opt", ov.value},
              {"opt_kind", to_string(ov.kind)},
              {"ratio", ratio},
              {"bound", b.value},
              {"formula", b.formula},
              {"within_bound", within_flag(ratio, b, ov.kind)},
              {"audit", audit_json(rep)},
              {"realized", instance_to_json(realized)},
              {"trace", trace_to_jsonl(trace)}};
  return out.dump();
}

std::string opt(const std::string& text) {
  const Instance inst = instance_from_string(text);
  try {
    const OptResult res = opt_exact(inst);
    return json{{"makespan", res.makespan}, {"kind", "exact"}, {"schedule", schedule_to_json(res.schedule)}}.dump();
  } catch (const Error& e) {
    if (e.code() != Errc::size_cap_exceeded) throw;
    return json{{"makespan", opt_lower_bound(inst)}, {"kind", "lower-bound"}}.dump();
  }
}

std::string evaluate(const std::string& schedule, const std::string& text) {
  const Evaluation ev = evaluate_schedule(schedule_from_json(json::parse(schedule)), instance_from_string(text));
  return json{{"feasible", ev.feasible}, {"makespan", ev.makespan}, {"completion", ev.completion}}.dump();
}

std::string star(int leaves, double delta, const std::string& policy, bool homing) {
  const Instance inst = star_instance(leaves, delta, homing ? Ending::homing : Ending::nomadic);
  PolicyOptions po;
  po.raw = true;
  auto p = make_policy(policy, inst, po);
  StarOracle oracle(leaves, delta);
  const Trace trace = run(inst, *p, oracle);
  const Instance realized = realized_instance(trace, inst);
  const Schedule s = star_schedule(realized);
  return json{{"makespan", trace.makespan},
              {"opt", s.makespan},
              {"ratio", safe_ratio(trace.makespan, s.makespan)},
              {"requests", realized.requests.size()},
              {"audit", audit_json(audit(trace, realized))}}
      .dump();
}

std::string bound(const std::string& policy, const std::string& text) {
  const Bound b = theoretical_bound(policy, instance_from_string(text));
  return json{{"value", b.value}, {"formula", b.formula}, {"testable", b.testable}}.dump();
}

}  // namespace

PYBIND11_MODULE(_sloc, m) {
  // messages carry the error code as a "name: " prefix
  auto& err = py::register_exception<Error>(m, "SlocError", PyExc_ValueError);
  py::register_exception<json::exception>(m, "JsonError", err.ptr());
  m.def("validate_instance", &validate);
  m.def("run", &run_policy, py::arg("instance"), py::arg("policy"), py::arg("raw") = false,
        py::arg("strict_lemma3") = false);
  m.def("opt", &opt);
  m.def("opt_lower_bound", [](const std::string& text) { return opt_lower_bound(instance_from_string(text)); });
  m.def("evaluate_schedule", &evaluate);
  m.def("star", &star, py::arg("n"), py::arg("delta"), py::arg("policy") = "arbitrary-replan",
        py::arg("homing") = false);
  m.def("theoretical_bound", &bound);
  m.def("policy_names", &policy_names);
}
