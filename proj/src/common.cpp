#include "sloc/common.hpp"

namespace sloc {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_metric: return "invalid-metric";
    case Errc::size_cap_exceeded: return "size-cap-exceeded";
    case Errc::parse_error: return "parse-error";
    case Errc::schema_violation: return "schema-violation";
    case Errc::missing_position: return "missing-position";
    case Errc::empty_ball: return "empty-ball";
    case Errc::sequentiality_violated: return "sequentiality-violated";
    case Errc::lemma3_violated: return "lemma3-violated";
    case Errc::policy_incompatible: return "policy-incompatible";
    case Errc::infeasible: return "infeasible";
    case Errc::nontermination: return "nontermination";
    case Errc::stalled: return "stalled";
    case Errc::out_of_range: return "out-of-range";
    case Errc::divisibility_violated: return "divisibility-violated";
    case Errc::missing_parameter: return "missing-parameter";
    case Errc::empty_report: return "empty-report";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

// splitmix64
double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % n;
}

}  // namespace sloc
