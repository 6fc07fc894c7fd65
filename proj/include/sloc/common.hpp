#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sloc {

// Global comparison tolerance for distances and times.
inline constexpr double kEps = 1e-9;

inline bool approx_le(double a, double b, double eps = kEps) { return a <= b + eps; }
inline bool approx_eq(double a, double b, double eps = kEps) {
  return a - b <= eps && b - a <= eps;
}

enum class Errc {
  invalid_argument,
  invalid_metric,
  size_cap_exceeded,
  parse_error,
  schema_violation,
  missing_position,
  empty_ball,
  sequentiality_violated,
  lemma3_violated,
  policy_incompatible,
  infeasible,
  nontermination,
  stalled,
  out_of_range,
  divisibility_violated,
  missing_parameter,
  empty_report,
  io_error,
};

std::string_view errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// mt19937_64 with hand-written distribution helpers: the engine output is
// fixed by the standard, the <random> distributions are not, so streams stay
// identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace sloc
