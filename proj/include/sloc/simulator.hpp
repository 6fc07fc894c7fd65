#pragma once

#include <string>
#include <vector>

#include "sloc/instance.hpp"
#include "sloc/policy.hpp"
#include "sloc/trace.hpp"

namespace sloc {

struct SimOptions {
  double guard_factor = 10.0;        // time guard multiplier
  std::size_t max_steps = 4'000'000;  // hard cap on loop iterations
};

// Event-driven run. Within one instant: releases, then policy replans, then
// service, then route completion callbacks.
Trace run(const Instance& inst, Policy& policy, RequestOracle& oracle, const SimOptions& opts = {});
Trace run(const Instance& inst, Policy& policy, const SimOptions& opts = {});
Trace run(const Instance& inst, const std::string& policy, const PolicyOptions& popts = {},
          const SimOptions& opts = {});

struct AuditItem {
  std::string name;
  bool pass = true;
  bool skipped = false;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditItem> items;
  bool ok() const;
  const AuditItem* find(const std::string& name) const;
  std::string describe() const;
};

struct AuditOptions {
  bool locality = true;  // off for streams that only claim locality w.r.t. another algorithm
};

AuditReport audit(const Trace& trace, const Instance& inst, const AuditOptions& opts = {});

}  // namespace sloc
