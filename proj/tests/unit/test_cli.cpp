#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(ROUNDOFF_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string bench(const std::string& name) { return std::string(ROUNDOFF_BENCH_DIR) + "/" + name + ".prog"; }

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("roundoff_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("analyze prints a bound") {
  Run r = run("analyze " + bench("rigidBody1") + " -d 2 --precision double");
  CHECK(r.code == 0);
  CHECK(r.out.find("bound") != std::string::npos);
}

TEST_CASE("analyze --json records version and flags") {
  Run r = run("analyze " + bench("kepler1") + " -d 2 --json");
  CHECK(r.code == 0);
  CHECK(r.out.find("\"schema\": 1") != std::string::npos);
  CHECK(r.out.find("\"version\": \"1.0.0\"") != std::string::npos);
  CHECK(r.out.find("\"solver_backend\": \"embedded\"") != std::string::npos);
  CHECK(r.out.find("\"input_rounding\": true") != std::string::npos);
}

TEST_CASE("exit codes") {
  fs::path d = scratch("exit");
  std::ofstream(d / "bad.prog") << "let box_p x = [(0, 1)];; let obj_p x = [(x +, 0)];;";
  CHECK(run("analyze " + (d / "bad.prog").string()).code == 2);
  CHECK(run("analyze " + (d / "missing.prog").string()).code == 2);
  CHECK(run("analyze").code == 2);
  std::ofstream(d / "c.prog") << "let box_p x = [(0, 1)];; let obj_p x = [(2, 0)];;";
  Run c = run("analyze " + (d / "c.prog").string() + " --json");
  CHECK(c.code == 0);
  CHECK(c.out.find("\"bound\": 0.0") != std::string::npos);
}

TEST_CASE("certify and check") {
  fs::path d = scratch("cert");
  std::string cert = (d / "rb1.cert").string();
  Run r = run("analyze " + bench("rigidBody1") + " --certify " + cert + " --check");
  CHECK(r.code == 0);
  CHECK(fs::exists(cert));
  CHECK(r.out.find("FAIL") == std::string::npos);
  Run again = run("analyze " + bench("rigidBody1") + " --check " + cert);
  CHECK(again.code == 0);
  Run wrong = run("analyze " + bench("rigidBody2") + " --check " + cert);
  CHECK(wrong.code == 3);
}

TEST_CASE("sample") {
  Run r = run("sample " + bench("rigidBody1") + " --samples 2000 --seed 3 --json");
  CHECK(r.code == 0);
  CHECK(r.out.find("sampled_lower_bound") != std::string::npos);
}

TEST_CASE("bench on empty and corrupted suites") {
  fs::path empty = scratch("empty");
  Run e = run("bench " + empty.string());
  CHECK(e.code == 0);
  fs::path bad = scratch("bad");
  fs::copy_file(bench("sqroot"), bad / "sqroot.prog");
  std::ofstream(bad / "broken.prog") << "let box_q x = [(0, 1)];; let obj_q x = [(x *";
  Run b = run("bench " + bad.string() + " --samples 500");
  CHECK(b.code == 2);
  CHECK(b.out.find("broken") != std::string::npos);
  CHECK(b.out.find("error") != std::string::npos);
  CHECK(b.out.find("sqroot") != std::string::npos);
}
