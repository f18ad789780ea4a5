#include "roundoff/engine.hpp"
#include "roundoff/errors.hpp"
#include "roundoff/report.hpp"
#include "roundoff/sampling.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace roundoff;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnsound = 1;
constexpr int kExitParse = 2;
constexpr int kExitAnalysis = 3;

struct CommonFlags {
  unsigned order = 0;
  std::string precision;
  bool merge = false;
  int subdivide = 1;
  std::string solver = "embedded";
  bool json = false;
  std::string input_rounding = "on";
  std::string neg_error = "off";
};

struct SampleFlags {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  int threads = 0;
  bool walk = false;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("-d,--order", f.order, "relaxation order (0 = minimal order)");
  app->add_option("--precision", f.precision, "single, double, quad or a bit count (default: program's format)");
  app->add_flag("--merge-errors", f.merge, "merge products of rounding factors");
  app->add_option("--subdivide", f.subdivide, "number of input-box pieces")->check(CLI::PositiveNumber);
  app->add_option("--solver", f.solver, "embedded or sdpa-files:<dir>");
  app->add_flag("--json", f.json, "emit JSON");
  app->add_option("--input-rounding", f.input_rounding, "round program inputs")->check(CLI::IsMember({"on", "off"}));
  app->add_option("--neg-error", f.neg_error, "give negation its own error")->check(CLI::IsMember({"on", "off"}));
}

void add_sampling(CLI::App* app, SampleFlags& f) {
  app->add_option("--samples", f.samples, "number of accepted samples");
  app->add_option("--seed", f.seed, "random seed");
  app->add_option("--threads", f.threads, "sampling threads (0 = all cores)");
  app->add_flag("--walk", f.walk, "walk inside the constraint set when rejection sampling starves");
}

EngineOptions engine_options(const CommonFlags& f) {
  EngineOptions o;
  o.order = f.order;
  o.rounding.merge = f.merge;
  o.rounding.input_rounding = f.input_rounding == "on";
  o.rounding.neg_error = f.neg_error == "on";
  o.subdivide = f.subdivide;
  o.solver = f.solver;
  return o;
}

SampleOptions sample_options(const SampleFlags& f, const EngineOptions& eo) {
  SampleOptions s;
  s.samples = f.samples;
  s.seed = f.seed;
  s.threads = f.threads;
  s.rounding = eo.rounding;
  s.walk_fallback = f.walk;
  return s;
}

bool is_parse_error(const std::exception& e) {
  return dynamic_cast<const SyntaxError*>(&e) || dynamic_cast<const ParseError*>(&e) ||
         dynamic_cast<const UnknownVariable*>(&e) || dynamic_cast<const ArityMismatch*>(&e) ||
         dynamic_cast<const EmptyBox*>(&e) || dynamic_cast<const NestedConditional*>(&e);
}

// Reads, parses and validates; parse failures exit with kExitParse.
std::optional<ProgramSpec> load(const std::string& path, const std::string& precision, std::string& error) {
  try {
    ProgramSpec spec = parse_program_file(path);
    if (!precision.empty()) spec.format = FpFormat::parse(precision);
    validate_spec(spec);
    return spec;
  } catch (const std::exception& e) {
    error = e.what();
    return std::nullopt;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

int cmd_analyze(const std::string& path, const CommonFlags& flags, bool certify, const std::string& cert_out,
                std::optional<std::string> check, bool check_given) {
  std::string err;
  auto spec = load(path, flags.precision, err);
  if (!spec) {
    std::cerr << "error: " << err << "\n";
    return kExitParse;
  }
  EngineOptions opt = engine_options(flags);
  opt.certify = certify || check_given;
  AnalysisResult r;
  try {
    r = analyze(*spec, opt);
  } catch (const std::exception& e) {
    std::cerr << "analysis failed: " << e.what() << "\n";
    return kExitAnalysis;
  }

  std::optional<std::string> cert_path;
  if (certify) {
    cert_path = cert_out.empty() ? stem_of(path) + ".cert" : cert_out;
    std::ofstream out(*cert_path);
    out << certificates_to_text(r.certificates);
    if (!out) {
      std::cerr << "error: cannot write " << *cert_path << "\n";
      return kExitAnalysis;
    }
  }

  int rc = kExitOk;
  nlohmann::json check_json;
  if (check_given) {
    std::string src = check && !check->empty() ? *check : cert_path.value_or("");
    try {
      std::vector<SosCertificate> certs =
          src.empty() ? certificates_from_text(certificates_to_text(r.certificates))
                      : certificates_from_text(read_file(src));
      auto checks = verify_certificates(*spec, opt, certs);
      bool all = !checks.empty() || r.certificates.empty();
      check_json = nlohmann::json::array();
      for (const auto& c : checks) {
        bool ok = c.statement_matches && c.result.passed;
        all = all && ok;
        check_json.push_back({{"tag", c.tag},
                              {"statement_matches", c.statement_matches},
                              {"passed", c.result.passed},
                              {"certified_bound", to_double(c.scaled_bound)},
                              {"message", c.result.message}});
        if (!flags.json)
          std::cout << "check " << c.tag << ": " << (ok ? "PASS" : "FAIL") << " certified "
                    << sci(to_double(c.scaled_bound)) << (c.statement_matches ? "" : " (statement mismatch)")
                    << (ok || c.result.message.empty() ? "" : " " + c.result.message) << "\n";
      }
      if (!all) rc = kExitAnalysis;
    } catch (const std::exception& e) {
      std::cerr << "certificate check failed: " << e.what() << "\n";
      return kExitAnalysis;
    }
  }

  if (flags.json) {
    nlohmann::json j = analysis_json(stem_of(path), r, flags_of(*spec, opt), cert_path);
    if (check_given) j["check"] = check_json;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << analysis_text(stem_of(path), r);
    if (cert_path) std::cout << "certificates written to " << *cert_path << "\n";
  }
  return rc;
}

int cmd_sample(const std::string& path, const CommonFlags& flags, const SampleFlags& sf) {
  std::string err;
  auto spec = load(path, flags.precision, err);
  if (!spec) {
    std::cerr << "error: " << err << "\n";
    return kExitParse;
  }
  EngineOptions opt = engine_options(flags);
  SampleResult s;
  try {
    s = sample_error(*spec, sample_options(sf, opt));
  } catch (const std::exception& e) {
    std::cerr << "sampling failed: " << e.what() << "\n";
    return kExitAnalysis;
  }
  if (flags.json) {
    nlohmann::json j;
    j["schema"] = kJsonSchemaVersion;
    j["tool"] = {{"name", "roundoff"}, {"version", kToolVersion}};
    j["flags"] = flags_json(flags_of(*spec, opt));
    j["benchmark"] = stem_of(path);
    j["seed"] = sf.seed;
    j["sampled_lower_bound"] = s.max_error;
    j["argmax"] = s.argmax;
    j["accepted"] = s.accepted;
    j["rejected"] = s.rejected;
    j["invalid"] = s.invalid;
    j["walked"] = s.walked;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << stem_of(path) << ": sampled " << sci(s.max_error) << " from " << s.accepted << " points ("
              << s.rejected << " rejected, " << s.invalid << " undefined" << (s.walked ? ", constraint walk" : "")
              << ")\n";
  }
  return kExitOk;
}

BenchRow bench_one(const std::string& file, const CommonFlags& flags, const SampleFlags& sf, int& rc) {
  BenchRow row;
  row.file = file;
  row.benchmark = stem_of(file);
  row.reference = find_reference(row.benchmark);
  std::string err;
  auto spec = load(file, flags.precision, err);
  if (!spec) {
    row.error = err;
    rc = kExitParse;
    return row;
  }
  EngineOptions opt = engine_options(flags);
  opt.parallel = false;
  try {
    AnalysisResult r = analyze(*spec, opt);
    row.bound = to_double(r.bound);
    row.tight = r.tight;
    row.order = r.order;
    row.seconds = r.seconds;
    if (sf.samples > 0) {
      SampleOptions so = sample_options(sf, opt);
      so.threads = 1;
      so.walk_fallback = true;
      SampleResult s = sample_error(*spec, so);
      row.sampled = s.max_error;
      row.have_sample = true;
      row.sound = r.bound >= Rational(s.max_error);
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
    rc = kExitAnalysis;
  }
  return row;
}

int cmd_bench(const std::string& dir, const CommonFlags& flags, const SampleFlags& sf, int jobs) {
  std::vector<std::string> files;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    std::cerr << "error: " << dir << " is not a directory\n";
    return kExitParse;
  }
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".prog") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());

  std::vector<BenchRow> rows(files.size());
  std::vector<int> codes(files.size(), kExitOk);
  std::atomic<std::size_t> next{0};
  int workers = jobs > 0 ? jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::max(1, std::min<int>(workers, static_cast<int>(files.size())));
  auto work = [&] {
    for (std::size_t i; (i = next++) < files.size();) rows[i] = bench_one(files[i], flags, sf, codes[i]);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  int rc = kExitOk;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (codes[i] == kExitParse) rc = kExitParse;
    else if (codes[i] != kExitOk && rc == kExitOk) rc = codes[i];
    if (rows[i].ok && !rows[i].sound && rc == kExitOk) rc = kExitUnsound;
  }
  FlagRecord fr;
  fr.precision = flags.precision.empty() ? "program" : flags.precision;
  EngineOptions eo = engine_options(flags);
  fr.order = eo.order;
  fr.merge_errors = eo.rounding.merge;
  fr.subdivide = eo.subdivide;
  fr.solver = eo.solver;
  fr.input_rounding = eo.rounding.input_rounding;
  fr.neg_error = eo.rounding.neg_error;
  fr.constant_rounding = eo.rounding.constant_rounding;
  if (flags.json) {
    nlohmann::json j = bench_json(rows, fr);
    j["samples"] = sf.samples;
    j["seed"] = sf.seed;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << bench_table(rows);
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified roundoff error bounds for straight-line floating-point programs"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonFlags analyze_flags, sample_flags, bench_flags;
  SampleFlags sample_sf, bench_sf;
  bench_sf.samples = 10000;

  std::string analyze_path, sample_path, bench_dir;
  std::string cert_out, check_path;
  bool certify = false;
  int jobs = 1;

  auto* a = app.add_subcommand("analyze", "bound the roundoff error of a program");
  a->add_option("program", analyze_path, "program file")->required();
  add_common(a, analyze_flags);
  auto* cert_opt = a->add_option("--certify", cert_out, "produce certificates, optionally naming the output file")
                       ->expected(0, 1);
  auto* check_opt = a->add_option("--check", check_path, "re-check a certificate file (defaults to --certify's)")
                        ->expected(0, 1);

  auto* s = app.add_subcommand("sample", "sampled lower bound on the roundoff error");
  s->add_option("program", sample_path, "program file")->required();
  add_common(s, sample_flags);
  add_sampling(s, sample_sf);

  auto* b = app.add_subcommand("bench", "analyze and sample every .prog file in a directory");
  b->add_option("dir", bench_dir, "suite directory")->required();
  add_common(b, bench_flags);
  add_sampling(b, bench_sf);
  b->add_option("-j,--jobs", jobs, "concurrent benchmarks (0 = all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (*a) {
      certify = cert_opt->count() > 0;
      bool check_given = check_opt->count() > 0;
      std::optional<std::string> check;
      if (check_given && !check_path.empty()) check = check_path;
      return cmd_analyze(analyze_path, analyze_flags, certify, cert_out, check, check_given);
    }
    if (*s) return cmd_sample(sample_path, sample_flags, sample_sf);
    if (*b) return cmd_bench(bench_dir, bench_flags, bench_sf, jobs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_parse_error(e) ? kExitParse : kExitAnalysis;
  }
  return kExitOk;
}
