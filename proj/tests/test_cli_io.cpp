#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nlslab/io.hpp"
#include "nlslab/profile.hpp"

using namespace nlslab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NLSLAB_CLI) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

struct TempDir {
  fs::path path;
  TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("field snapshots round-trip through csv") {
  TempDir dir("nlslab_io_test");
  GridPtr g = make_grid(512, 40.0);
  ComplexField u(g);
  for (int j = 0; j < g->n(); ++j)
    u.v[j] = cplx(std::sin(0.3 * j), std::cos(0.11 * j)) * std::exp(-0.01 * j);
  const std::string path = dir.str() + "/snap.csv";
  save_field(path, u, 1.25);
  double t = 0;
  ComplexField w = load_field(path, &t);
  CHECK(t == 1.25);
  REQUIRE(w.n() == u.n());
  for (int j = 0; j < g->n(); ++j) CHECK(std::abs(w.v[j] - u.v[j]) <= 1e-15);
}

TEST_CASE("csv writer emits deterministic shortest round-trip doubles") {
  TempDir dir("nlslab_csv_test");
  const std::string path = dir.str() + "/t.csv";
  CsvWriter csv(path, {"a", "b"});
  csv.row({1.0 / 3.0, 1e-300});
  csv.row({-0.1, 2.5});
  const std::string body = slurp(path);
  CHECK(body.find("a,b") == 0);
  CHECK(body.find("0.33333333333333331") != std::string::npos);
}

TEST_CASE("content hash is stable and sensitive") {
  CHECK(content_hash("abc") == content_hash("abc"));
  CHECK(content_hash("abc") != content_hash("abd"));
}

#ifdef NLSLAB_CLI

TEST_CASE("cli: profile subcommand writes outputs and manifest") {
  TempDir dir("nlslab_cli_profile");
  const int rc = run_cli("--omega 1 profile --out " + dir.str());
  CHECK(rc == 0);
  CHECK(fs::exists(dir.path / "profile.txt"));
  CHECK(fs::exists(dir.path / "profile.json"));
  CHECK(fs::exists(dir.path / "manifest.json"));
  const std::string meta = slurp((dir.path / "profile.json").string());
  CHECK(meta.find("\"y0\": 1.0") != std::string::npos);
}

TEST_CASE("cli: unknown flag exits with code 3-ish usage failure") {
  const int rc = run_cli("profile --definitely-not-a-flag");
  CHECK(rc != 0);
}

TEST_CASE("cli: evolve twice gives byte-identical observer streams") {
  TempDir d1("nlslab_cli_e1"), d2("nlslab_cli_e2");
  const std::string args =
      "--omega 1 evolve --n 512 --length 60 --dt 0.002 --t-end 0.5 --v 0.1 --stride 50 --out ";
  REQUIRE(run_cli(args + d1.str()) == 0);
  REQUIRE(run_cli(args + d2.str()) == 0);
  CHECK(slurp((d1.path / "observers.csv").string()) ==
        slurp((d2.path / "observers.csv").string()));
  CHECK(slurp((d1.path / "final.csv").string()) == slurp((d2.path / "final.csv").string()));
}

TEST_CASE("cli: fit recovers placement parameters from a snapshot") {
  TempDir dir("nlslab_cli_fit");
  // Build an odd two-soliton snapshot directly and feed it to `fit`.
  auto F = PolynomialNonlinearity::cubic();
  auto p = solve_profile_full(F, 1.0, 28.0, 2048);
  GridPtr g = make_grid(1024, 80.0);
  ComplexField right(g);
  for (int j = 0; j < g->n(); ++j) {
    const double x = g->x()[j];
    right.v[j] = p.value(x - 9.0) * std::exp(cplx(0, 0.15 * 0.5 * (x - 4.5) + 0.3));
  }
  ComplexField u(g);
  for (int j = 0; j < g->n(); ++j)
    u.v[j] = right.v[j] - right.v[g->reflect(j)];
  const std::string snap = dir.str() + "/u.csv";
  save_field(snap, u, 0.0);
  const int rc = run_cli("--omega 1 fit --input " + snap +
                         " --zeta 9.05 --v 0.14 --gamma 0.25 --out " + dir.str());
  CHECK(rc == 0);
  const std::string rj = slurp((dir.path / "fit.json").string());
  CHECK(rj.find("p_zeta") != std::string::npos);
}

#endif  // NLSLAB_CLI
