// Drives the installed `procsight` executable end to end: argument parsing,
// exit codes, and artifact layout. PROCSIGHT_BIN is injected by CMake.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "procsight/serialize.hpp"

using namespace procsight;
using namespace procsight::testing;
namespace fs = std::filesystem;

#ifndef PROCSIGHT_BIN
#define PROCSIGHT_BIN "procsight"
#endif

namespace {

int run(const std::string& args) {
  const std::string command = std::string(PROCSIGHT_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WEXITSTATUS(status);
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

struct BinaryFixture {
  fs::path dir;

  BinaryFixture() {
    dir = fs::temp_directory_path() / "procsight_binary_smoke";
    fs::remove_all(dir);
    fs::create_directories(dir);

    std::ostringstream csv;
    write_csv(order_signal_log(120, 61), csv);
    write_file(dir / "log.csv", csv.str());

    Json doc = {
        {"log",
         {{"path", (dir / "log.csv").string()},
          {"columns",
           {{"case_id", "case_id"}, {"activity", "activity"}, {"timestamp", "timestamp"}}}}},
        {"task",
         {{"type", "outcome"},
          {"rule", {{"variant", "eventually_followed"}, {"first", "X"}, {"second", "Y"}}}}},
        {"bucketing", {{"strategy", "single"}, {"min_len", 1}, {"max_len", 8}, {"gap", 1}}},
        {"encoding", {{"kind", "aggregation"}}},
        {"training", {{"n_trees", 10}, {"max_depth", 3}}},
        {"evaluation", {{"earliness_threshold", 0.5}}},
        {"output_dir", (dir / "out").string()},
        {"seed", 62}};
    write_file(dir / "config.json", doc.dump(2));

    Json bad = doc;
    bad["log"]["columns"]["timestamp"] = "no_such_column";
    write_file(dir / "bad_config.json", bad.dump(2));
  }

  std::string config() const { return (dir / "config.json").string(); }
};

}  // namespace

TEST_CASE("procsight binary: full command surface and exit codes") {
  setenv("PROCSIGHT_LOG_LEVEL", "quiet", 1);
  BinaryFixture fx;

  CHECK(run("validate --config " + fx.config()) == 0);
  CHECK(run("validate --config " + (fx.dir / "bad_config.json").string()) == 2);  // MissingColumn
  CHECK(run("validate --config " + (fx.dir / "missing.json").string()) == 2);
  CHECK(run("bogus-subcommand --config " + fx.config()) != 0);

  const std::string bundle = (fx.dir / "bundle").string();
  CHECK(run("train --config " + fx.config() + " --out " + bundle) == 0);
  CHECK(fs::exists(fs::path(bundle) / "manifest.json"));
  CHECK(fs::exists(fs::path(bundle) / "model_single.json"));
  CHECK(fs::exists(fs::path(bundle) / "spec_single.json"));
  CHECK(fs::exists(fs::path(bundle) / "stats_single.json"));

  const std::string eval_dir = (fx.dir / "eval").string();
  CHECK(run("evaluate --config " + fx.config() + " --bundle " + bundle + " --out " + eval_dir) == 0);
  CHECK(fs::exists(fs::path(eval_dir) / "eval.json"));
  CHECK(fs::exists(fs::path(eval_dir) / "curves.csv"));
  {
    std::ifstream in(fs::path(eval_dir) / "eval.json");
    Json eval;
    in >> eval;
    CHECK(eval.contains("earliness"));  // threshold came from the config
  }

  const std::string explain_dir = (fx.dir / "explain").string();
  CHECK(run("explain --config " + fx.config() + " --bundle " + bundle + " --out " + explain_dir +
            " --global --local case_0 2 --pdp agg__X") == 0);
  CHECK(fs::exists(fs::path(explain_dir) / "global_importance_single.json"));
  CHECK(fs::exists(fs::path(explain_dir) / "surrogate_single.json"));
  CHECK(fs::exists(fs::path(explain_dir) / "local_explanation.json"));
  CHECK(fs::exists(fs::path(explain_dir) / "pdp.json"));
  CHECK(run("explain --config " + fx.config() + " --bundle " + bundle + " --out " + explain_dir) ==
        2);  // no explanation selected

  const std::string audit_dir = (fx.dir / "audit").string();
  CHECK(run("audit --config " + fx.config() + " --bundle " + bundle + " --out " + audit_dir) == 0);
  CHECK(fs::exists(fs::path(audit_dir) / "audit.md"));

  // evaluating with a tampered bundle is an input error
  {
    std::ifstream in(fs::path(bundle) / "spec_single.json");
    Json spec;
    in >> spec;
    spec["max_index"] = 99;
    write_file(fs::path(bundle) / "spec_single.json", spec.dump(2) + "\n");
  }
  CHECK(run("evaluate --config " + fx.config() + " --bundle " + bundle + " --out " + eval_dir) == 2);

  fs::remove_all(fx.dir);
}
