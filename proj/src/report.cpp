#include "roundoff/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <sstream>

namespace roundoff {

namespace {

constexpr double kNone = std::numeric_limits<double>::quiet_NaN();
constexpr double kOoM = std::numeric_limits<double>::quiet_NaN();

nlohmann::json number_or_null(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

nlohmann::json interval_json(const Interval& I) {
  return {{"lo", to_double(I.lo())}, {"hi", to_double(I.hi())}, {"lo_exact", to_string(I.lo())},
          {"hi_exact", to_string(I.hi())}};
}

}  // namespace

const std::vector<ReferenceRow>& reference_table() {
  static const std::vector<ReferenceRow> rows = {
    {"rigidBody1", "a", "polynomial", 5.33e-13, 5.08e-13, 3.87e-13, 2.95e-13, 2.95e-13, 3.22e-13, 2.28e-13, 2},
    {"rigidBody2", "b", "polynomial", 6.48e-11, 6.48e-11, 5.24e-11, 3.61e-11, 3.61e-11, 3.65e-11, 2.19e-11, 2},
    {"kepler0", "c", "polynomial", 1.18e-13, 1.16e-13, 1.05e-13, 7.47e-14, 1.12e-13, 1.26e-13, 2.23e-14, 2},
    {"kepler1", "d", "polynomial", 4.47e-13, 6.49e-13, 4.49e-13, 2.87e-13, 4.89e-13, 5.57e-13, 7.58e-14, 2},
    {"kepler2", "e", "polynomial", 2.09e-12, 2.89e-12, 2.10e-12, 1.58e-12, 2.45e-12, 2.90e-12, 3.03e-13, 2},
    {"sineTaylor", "f", "polynomial", 6.03e-16, 9.56e-16, 6.75e-16, 4.44e-16, 8.33e-02, 6.86e-16, 2.85e-16, 2},
    {"sineOrder3", "g", "polynomial", 1.19e-15, 1.11e-15, 9.97e-16, 7.95e-16, 7.62e-16, 1.03e-15, 3.34e-16, 2},
    {"sqroot", "h", "polynomial", 1.29e-15, 8.41e-16, 7.13e-16, 5.02e-16, 5.37e-16, 3.21e-13, 4.45e-16, 2},
    {"himmilbeau", "i", "polynomial", 1.43e-12, 1.43e-12, 1.32e-12, 1.01e-12, 1.01e-12, 1.01e-12, 1.47e-13, 2},
    {"doppler1", "j", "semialgebraic", 7.65e-12, 4.92e-13, 1.59e-13, 1.29e-13, 1.82e-13, 1.34e-13, 7.11e-14, 4},
    {"doppler2", "k", "semialgebraic", 1.57e-11, 1.29e-12, 2.90e-13, 2.39e-13, 3.23e-13, 2.53e-13, 1.14e-13, 4},
    {"doppler3", "l", "semialgebraic", 8.55e-12, 2.03e-13, 8.22e-14, 6.96e-14, 9.29e-14, 7.36e-14, 4.27e-14, 4},
    {"verhulst", "m", "semialgebraic", 4.67e-16, 6.82e-16, 3.53e-16, 2.50e-16, 3.18e-16, 4.84e-16, 2.23e-16, 4},
    {"carbonGas", "n", "semialgebraic", 2.21e-08, 4.64e-08, 1.23e-08, 7.77e-09, 8.85e-09, 1.86e-08, 4.11e-09, 4},
    {"predPrey", "o", "semialgebraic", 2.52e-16, 2.94e-16, 1.89e-16, 1.60e-16, 1.95e-16, 2.45e-16, 1.47e-16, 4},
    {"turbine1", "p", "semialgebraic", 2.45e-11, 1.25e-13, 2.33e-14, 1.67e-14, 3.88e-14, 6.09e-14, 1.07e-14, 4},
    {"turbine2", "q", "semialgebraic", 2.08e-12, 1.76e-13, 3.14e-14, 2.01e-14, 3.97e-14, 8.96e-14, 1.43e-14, 4},
    {"turbine3", "r", "semialgebraic", 1.71e-11, 8.50e-14, 1.70e-14, 9.58e-15, 9.96e+00, 4.90e-14, 5.33e-15, 4},
    {"jetEngine", "s", "semialgebraic", kOoM, 1.62e-08, 1.50e-11, 1.03e-11, 1.32e+05, 1.82e-11, 5.46e-12, 0},
    {"floudas2_6", "t", "constrained", 5.15e-13, 5.87e-13, 7.88e-13, 5.94e-13, 5.98e-13, 7.45e-13, 4.56e-14, 2},
    {"floudas3_3", "u", "constrained", 5.81e-13, 4.05e-13, 5.76e-13, 4.29e-13, 2.65e-13, 4.32e-13, 1.48e-13, 2},
    {"floudas3_4", "v", "constrained", 2.78e-15, 2.56e-15, 2.23e-15, 1.78e-15, 1.23e-15, 2.23e-15, 3.80e-16, 2},
    {"floudas4_6", "w", "constrained", 1.82e-15, 1.33e-15, 1.23e-15, 8.89e-16, 8.89e-16, 1.12e-15, 2.35e-16, 2},
    {"floudas4_7", "x", "constrained", 1.06e-14, 1.31e-14, 1.80e-14, 1.32e-14, 7.44e-15, 1.71e-14, 7.31e-15, 2},
    {"cav10", "y", "conditional", 2.91e+00, 2.91e+00, kNone, kNone, kNone, 1.02e+02, 2.90e+00, 2},
    {"perin", "z", "conditional", 2.01e+00, 2.01e+00, kNone, kNone, kNone, 4.91e+01, 2.00e+00, 2},
    {"logexp", "alpha", "transcendental", 2.52e-15, kNone, 2.07e-15, 1.99e-15, kNone, kNone, 1.19e-15, 4},
    {"sphere", "beta", "transcendental", 1.53e-14, kNone, 1.29e-14, 8.21e-15, kNone, kNone, 5.05e-15, 4},
    {"hartman3", "gamma", "transcendental", 2.99e-13, kNone, 1.34e-14, 4.97e-15, kNone, kNone, 1.10e-15, 0},
    {"hartman6", "delta", "transcendental", 5.09e-13, kNone, 2.55e-14, 8.19e-15, kNone, kNone, 2.20e-15, 0},
  };
  return rows;
}

const ReferenceRow* find_reference(const std::string& name) {
  for (const auto& r : reference_table())
    if (name == r.name) return &r;
  if (name == "jet") return find_reference("jetEngine");
  return nullptr;
}

std::string sci(double v) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

FlagRecord flags_of(const ProgramSpec& spec, const EngineOptions& opt) {
  FlagRecord f;
  f.precision = spec.format.name();
  f.order = opt.order;
  f.merge_errors = opt.rounding.merge;
  f.subdivide = opt.subdivide;
  f.certify = opt.certify;
  f.solver = opt.solver;
  f.input_rounding = opt.rounding.input_rounding;
  f.neg_error = opt.rounding.neg_error;
  f.constant_rounding = opt.rounding.constant_rounding;
  return f;
}

nlohmann::json flags_json(const FlagRecord& f) {
  return {{"precision", f.precision},       {"order", f.order},
          {"merge_errors", f.merge_errors}, {"subdivide", f.subdivide},
          {"certify", f.certify},           {"solver", f.solver},
          {"input_rounding", f.input_rounding}, {"neg_error", f.neg_error},
          {"constant_rounding", f.constant_rounding}};
}

nlohmann::json analysis_json(const std::string& benchmark, const AnalysisResult& r, const FlagRecord& flags,
                             const std::optional<std::string>& certificate_path,
                             const std::optional<SampleResult>& sampled) {
  nlohmann::json j;
  j["schema"] = kJsonSchemaVersion;
  j["tool"] = {{"name", "roundoff"}, {"version", kToolVersion}};
  j["solver_backend"] = flags.solver;
  j["flags"] = flags_json(flags);
  j["benchmark"] = benchmark;
  j["format"] = r.format;
  j["bound"] = to_double(r.bound);
  j["bound_exact"] = to_string(r.bound);
  j["interval"] = interval_json(r.interval);
  j["order"] = r.order;
  j["tight"] = r.tight;
  j["fallback"] = !r.tight;
  j["seconds"] = r.seconds;
  j["condition_error"] = interval_json(r.condition_error);
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : r.terms)
    terms.push_back({{"label", t.label},
                     {"linear", interval_json(t.linear)},
                     {"remainder", interval_json(t.remainder)},
                     {"total", interval_json(t.total)},
                     {"method", t.method},
                     {"tight", t.tight},
                     {"order", t.order},
                     {"errors", t.errors},
                     {"lifted", t.lifted}});
  j["terms"] = terms;
  nlohmann::json certs = nlohmann::json::array();
  for (const auto& c : r.cert_records)
    certs.push_back({{"tag", c.tag},
                     {"solver_bound", number_or_null(c.solver_bound)},
                     {"solver_status", c.solver_status},
                     {"certified_bound", to_double(c.certified_bound)},
                     {"passed", c.passed}});
  j["certificates"] = certs;
  j["certificate_path"] = certificate_path ? nlohmann::json(*certificate_path) : nlohmann::json(nullptr);
  if (sampled) {
    j["sampled_lower_bound"] = sampled->max_error;
    j["samples"] = sampled->accepted;
  } else {
    j["sampled_lower_bound"] = nullptr;
  }
  j["notes"] = r.notes;
  return j;
}

std::string analysis_text(const std::string& benchmark, const AnalysisResult& r,
                          const std::optional<SampleResult>& sampled) {
  std::ostringstream os;
  os << benchmark << " (" << r.format << ")\n";
  os << "  bound     " << sci(to_double(r.bound)) << "\n";
  os << "  interval  [" << sci(to_double(r.interval.lo())) << ", " << sci(to_double(r.interval.hi())) << "]\n";
  os << "  order     " << r.order << (r.tight ? "" : "  (fallback used)") << "\n";
  for (const auto& t : r.terms)
    os << "  term " << t.label << ": linear [" << sci(to_double(t.linear.lo())) << ", " << sci(to_double(t.linear.hi()))
       << "] remainder " << sci(to_double(t.remainder.hi())) << " via " << t.method << ", " << t.errors
       << " error variables\n";
  for (const auto& c : r.cert_records)
    os << "  certificate " << c.tag << ": " << (c.passed ? "PASS" : "FAIL") << " certified "
       << sci(to_double(c.certified_bound)) << "\n";
  if (sampled) os << "  sampled   " << sci(sampled->max_error) << " (" << sampled->accepted << " points)\n";
  os << "  time      " << std::fixed << std::setprecision(2) << r.seconds << " s\n";
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  return os.str();
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "benchmark" << std::setw(4) << "id" << std::setw(11) << "bound" << std::setw(11)
     << "sampled" << std::setw(11) << "ref_bound" << std::setw(8) << "ratio" << std::setw(11) << "lower"
     << std::setw(11) << "fptaylor" << std::setw(9) << "time" << "status\n";
  for (const auto& r : rows) {
    const ReferenceRow* ref = r.reference;
    os << std::left << std::setw(12) << r.benchmark << std::setw(4) << (ref ? ref->id : "-");
    if (!r.ok) {
      os << "error: " << r.error << "\n";
      continue;
    }
    double ratio = ref && !std::isnan(ref->ref_bound) ? r.bound / ref->ref_bound : kNone;
    char t[32];
    std::snprintf(t, sizeof t, "%.2fs", r.seconds);
    os << std::setw(11) << sci(r.bound) << std::setw(11) << (r.have_sample ? sci(r.sampled) : "-") << std::setw(11)
       << (ref ? sci(ref->ref_bound) : "-") << std::setw(8) << sci(ratio) << std::setw(11)
       << (ref ? sci(ref->lower) : "-") << std::setw(11) << (ref ? sci(ref->fptaylor) : "-") << std::setw(9) << t
       << (r.sound ? "ok" : "UNSOUND") << (r.tight ? "" : " fallback") << "\n";
  }
  return os.str();
}

nlohmann::json bench_json(const std::vector<BenchRow>& rows, const FlagRecord& flags) {
  nlohmann::json j;
  j["schema"] = kJsonSchemaVersion;
  j["tool"] = {{"name", "roundoff"}, {"version", kToolVersion}};
  j["solver_backend"] = flags.solver;
  j["flags"] = flags_json(flags);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json e;
    e["benchmark"] = r.benchmark;
    e["file"] = r.file;
    e["ok"] = r.ok;
    if (!r.ok) {
      e["error"] = r.error;
      arr.push_back(e);
      continue;
    }
    e["bound"] = r.bound;
    e["sampled_lower_bound"] = r.have_sample ? nlohmann::json(r.sampled) : nlohmann::json(nullptr);
    e["sound"] = r.sound;
    e["tight"] = r.tight;
    e["order"] = r.order;
    e["seconds"] = r.seconds;
    if (r.reference) {
      const ReferenceRow& ref = *r.reference;
      e["reference"] = {{"id", ref.id},
                        {"category", ref.category},
                        {"ref_bound", number_or_null(ref.ref_bound)},
                        {"rosa", number_or_null(ref.rosa)},
                        {"fptaylor", number_or_null(ref.fptaylor)},
                        {"fptaylor_improved", number_or_null(ref.fptaylor_improved)},
                        {"gappa", number_or_null(ref.gappa)},
                        {"fluctuat", number_or_null(ref.fluctuat)},
                        {"lower", number_or_null(ref.lower)}};
      e["ratio_to_ref_bound"] = std::isnan(ref.ref_bound) ? nlohmann::json(nullptr) : nlohmann::json(r.bound / ref.ref_bound);
    }
    arr.push_back(e);
  }
  j["rows"] = arr;
  return j;
}

}  // namespace roundoff
