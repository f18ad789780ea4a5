#pragma once

#include "roundoff/program.hpp"
#include "roundoff/rounding.hpp"

#include <cstdint>
#include <vector>

namespace roundoff {

struct SampleOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  int reference_bits = 256;
  RoundingOptions rounding;  // input_rounding decides whether inputs are real or already in the format
  // When uniform rejection sampling starves, walk inside the constraint set (hit-and-run)
  // instead of throwing RejectionSamplingStarved.
  bool walk_fallback = false;
};

struct SampleResult {
  double max_error = 0;          // max |float result - reference result|
  std::vector<double> argmax;    // input point of the maximum
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;    // points outside the constraints
  std::uint64_t invalid = 0;     // points where either evaluation is undefined
  bool walked = false;           // points came from the constraint-set walk
};

// Executes the program in the target format (every operation rounded to nearest at the format
// precision) and in high-precision reference arithmetic on random inputs drawn uniformly from
// the box and filtered by the constraints. Deterministic for a given seed, independent of the
// thread count.
SampleResult sample_error(const ProgramSpec& spec, const SampleOptions& options);

}  // namespace roundoff
