#pragma once

#include "roundoff/engine.hpp"
#include "roundoff/sampling.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace roundoff {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kJsonSchemaVersion = 1;

// Published double-precision bounds for the 30-program suite. NaN marks a missing entry
// (tool does not handle the program or ran out of memory).
struct ReferenceRow {
  const char* name;
  const char* id;
  const char* category;  // polynomial, semialgebraic, constrained, conditional, transcendental
  double ref_bound;
  double rosa;
  double fptaylor;
  double fptaylor_improved;
  double gappa;
  double fluctuat;
  double lower;
  double limit_factor;  // bound must stay within limit_factor * ref_bound; 0 = soundness only
};

const std::vector<ReferenceRow>& reference_table();
const ReferenceRow* find_reference(const std::string& name);

struct FlagRecord {
  std::string precision;
  unsigned order = 0;
  bool merge_errors = false;
  int subdivide = 1;
  bool certify = false;
  std::string solver = "embedded";
  bool input_rounding = true;
  bool neg_error = false;
  bool constant_rounding = true;
};

FlagRecord flags_of(const ProgramSpec& spec, const EngineOptions& opt);
nlohmann::json flags_json(const FlagRecord& f);

nlohmann::json analysis_json(const std::string& benchmark, const AnalysisResult& r, const FlagRecord& flags,
                             const std::optional<std::string>& certificate_path = std::nullopt,
                             const std::optional<SampleResult>& sampled = std::nullopt);
std::string analysis_text(const std::string& benchmark, const AnalysisResult& r,
                          const std::optional<SampleResult>& sampled = std::nullopt);

struct BenchRow {
  std::string benchmark;
  std::string file;
  bool ok = false;
  std::string error;
  double bound = 0;
  double sampled = 0;
  bool have_sample = false;
  bool sound = true;  // bound >= sampled
  bool tight = true;
  unsigned order = 0;
  double seconds = 0;
  const ReferenceRow* reference = nullptr;
};

std::string bench_table(const std::vector<BenchRow>& rows);
nlohmann::json bench_json(const std::vector<BenchRow>& rows, const FlagRecord& flags);

// Shortest decimal rendering of a double with "%.3g" style.
std::string sci(double v);

}  // namespace roundoff
