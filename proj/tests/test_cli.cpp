#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr combined
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(THERMOFORM_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) output += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "thermoform_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path path = temp_dir() / name;
  std::ofstream out(path);
  out << text;
  return path;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kPressureConfig = R"({
  "command": "pressure",
  "map": {"degree": 2},
  "potential": {},
  "grid": 64,
  "params": {}
})";

}  // namespace

TEST_CASE("pressure run succeeds and reports log 2") {
  const fs::path cfg = write_file("pressure.json", kPressureConfig);
  const fs::path out = temp_dir() / "pressure.csv";
  const RunResult r = run("pressure --config " + cfg.string() + " --out " +
                          out.string() + " --no-timestamp");
  INFO(r.output);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("pressure=0.693147") != std::string::npos);
  CHECK(fs::exists(out));
}

TEST_CASE("output is byte-identical across runs with --no-timestamp") {
  const fs::path cfg = write_file("pressure.json", kPressureConfig);
  const fs::path out1 = temp_dir() / "run1.csv";
  const fs::path out2 = temp_dir() / "run2.csv";
  REQUIRE(run("pressure --config " + cfg.string() + " --out " + out1.string() +
              " --no-timestamp")
              .exit_code == 0);
  REQUIRE(run("pressure --config " + cfg.string() + " --out " + out2.string() +
              " --no-timestamp")
              .exit_code == 0);
  const std::string a = read_file(out1);
  const std::string b = read_file(out2);
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(a.find("# generated") == std::string::npos);
}

TEST_CASE("timestamp header is written by default") {
  const fs::path cfg = write_file("pressure.json", kPressureConfig);
  const fs::path out = temp_dir() / "stamped.csv";
  REQUIRE(run("pressure --config " + cfg.string() + " --out " + out.string())
              .exit_code == 0);
  CHECK(read_file(out).rfind("# generated ", 0) == 0);
}

TEST_CASE("malformed JSON exits 2") {
  const fs::path cfg = write_file("broken.json", "{ not json ");
  const RunResult r = run("pressure --config " + cfg.string());
  CHECK(r.exit_code == 2);
}

TEST_CASE("unknown config key exits 2") {
  const fs::path cfg = write_file("unknown_key.json", R"({
    "command": "pressure",
    "map": {"degree": 2, "wavelength": 3},
    "potential": {},
    "grid": 64,
    "params": {}
  })");
  const RunResult r = run("pressure --config " + cfg.string());
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("wavelength") != std::string::npos);
}

TEST_CASE("unknown command exits 2") {
  const fs::path cfg = write_file("pressure.json", kPressureConfig);
  const RunResult r = run("spectralize --config " + cfg.string());
  CHECK(r.exit_code == 2);
}

TEST_CASE("command mismatch between CLI and config exits 2") {
  const fs::path cfg = write_file("pressure.json", kPressureConfig);
  const RunResult r = run("variance --config " + cfg.string());
  CHECK(r.exit_code == 2);
}

TEST_CASE("missing arguments exit 2") {
  CHECK(run("").exit_code == 2);
  CHECK(run("pressure").exit_code == 2);
  CHECK(run("pressure --config").exit_code == 2);
  CHECK(run("corpus").exit_code == 2);
  CHECK(run("pressure --config /nonexistent/x.json").exit_code == 2);
}

TEST_CASE("computational failure exits 1") {
  // A constant observable makes the free energy affine, so the Legendre
  // transform is not strictly convex: a computational error, not a config one.
  const fs::path cfg = write_file("ldp_degenerate.json", R"({
    "command": "ldp",
    "map": {"degree": 2},
    "potential": {},
    "observable": {"constant": 1.0},
    "grid": 64,
    "params": {"mode": "rate", "t_max": 1.0, "t_points": 9,
               "s_grid": [0.9, 1.0, 1.1]}
  })");
  const RunResult r = run("ldp --config " + cfg.string());
  CHECK(r.exit_code == 1);
}

TEST_CASE("corpus on missing or empty directory exits 2") {
  CHECK(run("corpus --dir /nonexistent/corpus").exit_code == 2);
  const fs::path empty = temp_dir() / "empty_corpus";
  fs::create_directories(empty);
  CHECK(run("corpus --dir " + empty.string()).exit_code == 2);
}

TEST_CASE("corpus reports per-config verdicts and fails on a bad target") {
  const fs::path dir = temp_dir() / "mini_corpus";
  fs::create_directories(dir);
  fs::create_directories(dir / "out");
  {
    std::ofstream ok(dir / "good.json");
    ok << R"({
      "command": "pressure",
      "map": {"degree": 2},
      "potential": {},
      "grid": 64,
      "params": {},
      "out": "out/good.csv",
      "accept": {"pressure": {"target": 0.6931471805599453, "tol": 1e-9}}
    })";
  }
  {
    std::ofstream bad(dir / "bad.json");
    bad << R"({
      "command": "pressure",
      "map": {"degree": 2},
      "potential": {},
      "grid": 64,
      "params": {},
      "out": "out/bad.csv",
      "accept": {"pressure": {"target": 1.0, "tol": 1e-9}}
    })";
  }
  const RunResult r = run("corpus --dir " + dir.string());
  INFO(r.output);
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("PASS") != std::string::npos);
  CHECK(r.output.find("FAIL") != std::string::npos);
  CHECK(r.output.find("bad.json") != std::string::npos);
}

TEST_CASE("shipped corpus passes") {
  const fs::path src = THERMOFORM_CONFIG_DIR;
  const fs::path dir = temp_dir() / "shipped_corpus";
  fs::remove_all(dir);
  fs::create_directories(dir / "out");
  for (const auto& entry : fs::directory_iterator(src)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      fs::copy_file(entry.path(), dir / entry.path().filename());
  }
  const RunResult r = run("corpus --dir " + dir.string());
  INFO(r.output);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("FAIL") == std::string::npos);
}
