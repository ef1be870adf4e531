#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string output;
};

const char* cli_binary() {
  const char* bin = std::getenv("SOFTCLIK_CLI");
  REQUIRE_MESSAGE(bin != nullptr, "SOFTCLIK_CLI must point at the built binary");
  return bin;
}

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path capture =
      fs::temp_directory_path() / ("softclik_cli_out_" + std::to_string(counter++) + ".txt");
  const std::string cmd =
      std::string("\"") + cli_binary() + "\" " + args + " > " + capture.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream in(capture);
  r.output.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  fs::remove(capture);
  return r;
}

/// Value of a "key=value" line in the command output; empty if absent.
std::string value_of(const std::string& output, const std::string& key) {
  const std::string needle = key + "=";
  std::size_t at = 0;
  while (at < output.size()) {
    const std::size_t end = output.find('\n', at);
    const std::string line = output.substr(at, end == std::string::npos ? end : end - at);
    if (line.rfind(needle, 0) == 0) return line.substr(needle.size());
    if (end == std::string::npos) break;
    at = end + 1;
  }
  return {};
}

std::vector<char> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Scratch directory removed at scope exit.
struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "softclik_cli_case") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("usage problems exit with code 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("generate --bogus 1").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  TempDir dir;
  // a 1-node centerline grid is a parameter error, not a crash
  const RunResult r = run_cli("generate --n 2 --ns 1 --out " + dir.file("ds.bin"));
  CHECK(r.code == 2);
  CHECK(r.output.find("usage error") != std::string::npos);
}

TEST_CASE("missing inputs exit with code 1") {
  const RunResult r =
      run_cli("eval --data /nonexistent/ds.bin --checkpoint /nonexistent/model.ckpt");
  CHECK(r.code == 1);
  CHECK(r.output.find("error") != std::string::npos);
}

TEST_CASE("help lists the four commands") {
  const RunResult r = run_cli("--help");
  CHECK(r.code == 0);
  for (const char* name : {"generate", "train", "eval", "run"})
    CHECK(r.output.find(name) != std::string::npos);
}

TEST_CASE("dataset generation is reproducible and echoes its config") {
  TempDir dir;
  const std::string flags = "generate --n 5 --ns 6 --seed 5 --box -1,0 --out ";
  const RunResult first = run_cli(flags + dir.file("a.bin"));
  REQUIRE_MESSAGE(first.code == 0, first.output);
  CHECK(value_of(first.output, "rows") == "5");
  CHECK(value_of(first.output, "dropped") == "0");
  CHECK(fs::exists(dir.file("a.bin.config")));

  const RunResult second = run_cli(flags + dir.file("b.bin"));
  REQUIRE(second.code == 0);
  CHECK(read_bytes(dir.file("a.bin")) == read_bytes(dir.file("b.bin")));

  // the echoed config alone reproduces the file
  const RunResult echoed = run_cli("generate --config " + dir.file("a.bin.config") +
                                   " --out " + dir.file("c.bin"));
  REQUIRE(echoed.code == 0);
  CHECK(read_bytes(dir.file("a.bin")) == read_bytes(dir.file("c.bin")));

  // flags override the file
  const RunResult more = run_cli("generate --config " + dir.file("a.bin.config") +
                                 " --n 7 --out " + dir.file("d.bin"));
  REQUIRE(more.code == 0);
  CHECK(value_of(more.output, "rows") == "7");
}

TEST_CASE("train, eval, and a neural controller run work end to end") {
  TempDir dir;
  const std::string ds = dir.file("ds.bin");
  REQUIRE(run_cli("generate --n 6 --ns 6 --seed 7 --box -1,0 --out " + ds).code == 0);

  const std::string ckpt = dir.file("model.ckpt");
  const RunResult trained =
      run_cli("train --data " + ds + " --out " + ckpt + " --epochs 2 --batch 8 --box -1,0" +
              " --split 0.5,0.25,0.25 --history " + dir.file("history.csv"));
  REQUIRE_MESSAGE(trained.code == 0, trained.output);
  CHECK(fs::exists(ckpt));
  CHECK(fs::exists(ckpt + ".config"));
  CHECK(!value_of(trained.output, "best_val_mse").empty());
  {
    std::ifstream in(dir.file("history.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == 3);  // header + one per epoch
  }

  const RunResult scored = run_cli("eval --data " + ds + " --checkpoint " + ckpt +
                                   " --split 0.5,0.25,0.25");
  REQUIRE_MESSAGE(scored.code == 0, scored.output);
  CHECK(value_of(scored.output, "count") == "1");
  CHECK(std::stod(value_of(scored.output, "mse")) >= 0.0);

  const RunResult whole =
      run_cli("eval --data " + ds + " --checkpoint " + ckpt + " --whole");
  REQUIRE(whole.code == 0);
  CHECK(value_of(whole.output, "count") == "6");

  // an untrained model will not converge in 20 steps; this asserts wiring, not accuracy
  const RunResult ran = run_cli("run --model neural --checkpoint " + ckpt +
                                " --task pos_fixed --target 0,0,-0.15 --K 4 --tend 0.02" +
                                " --q0 -0.5 --out " + dir.file("neural_run"));
  REQUIRE_MESSAGE(ran.code == 0, ran.output);
  CHECK(value_of(ran.output, "steps") == "20");
  CHECK(fs::exists(dir.file("neural_run.csv")));
}

TEST_CASE("a controller run on the analytic model converges and exports plots") {
  TempDir dir;
  const RunResult r = run_cli(
      "run --model cc --task dist_fixed --target 0.77669923830602,0.53136853793611 --sbar 1 --K 8 --tend 1" +
      std::string(" --q0 0.3 --cc-length 1 --snapshot-every 100 --out ") + dir.file("cc_run"));
  REQUIRE_MESSAGE(r.code == 0, r.output);
  CHECK(value_of(r.output, "steps") == "1000");
  CHECK(std::stod(value_of(r.output, "final_error")) <
        1e-2 * std::stod(value_of(r.output, "initial_error")));
  for (const char* name :
       {"cc_run.csv", "cc_run.config", "cc_run_error.svg", "cc_run_actuation.svg",
        "cc_run_shape.svg"})
    CHECK(fs::exists(dir.file(name)));

  std::ifstream csv(dir.file("cc_run.csv"));
  std::string header;
  std::getline(csv, header);
  CHECK(header == "t,q1,x1,s,cond");
}

TEST_CASE("mismatched task and actuation dimensions are a usage error") {
  TempDir dir;
  const RunResult r = run_cli("run --model cc --task pos_fixed --target 0.3,0.4 --out " +
                              dir.file("bad"));
  CHECK(r.code == 2);
  CHECK(r.output.find("square") != std::string::npos);
}

TEST_CASE("an unknown model name is a usage error") {
  TempDir dir;
  const RunResult r = run_cli("run --model bogus --out " + dir.file("bad"));
  CHECK(r.code == 2);
}
