#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "paynet/cli.hpp"
#include "paynet/text.hpp"

using namespace paynet;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  Run r;
  r.code = cli::run(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

struct Workspace {
  fs::path root;
  explicit Workspace(const std::string& name) : root(fs::temp_directory_path() / ("paynet_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Workspace() { fs::remove_all(root); }
  std::string config(const json& j, const std::string& file = "config.json") const {
    std::ofstream(root / file) << j.dump(2);
    return (root / file).string();
  }
  std::string out() const { return (root / "out").string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

const json kSmallSynth = {{"seed", 2},
                          {"subgraph", "all"},
                          {"thresholds", {{"min_rated", 30}, {"min_module_size", 30}, {"k_max", 5}}},
                          {"synth", {{"model", "customer"}, {"n", 800}}}};

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"metrics", "--window", "hourly"}).code == 2);
}

TEST_CASE("config validation maps to exit code 2") {
  Workspace w("config");
  CHECK(run({"--config", (w.root / "missing.json").string(), "metrics"}).code == 2);
  std::ofstream(w.root / "broken.json") << "{ not json";
  CHECK(run({"--config", (w.root / "broken.json").string(), "metrics"}).code == 2);
  const auto bad = w.config({{"thresholds", {{"p_s", 2.0}}}});
  const Run r = run({"--config", bad, "metrics"});
  CHECK(r.code == 2);
  CHECK(r.err.find("p_s") != std::string::npos);
  const auto no_inputs = w.config(json::object(), "empty.json");
  CHECK(run({"--config", no_inputs, "--out", w.out(), "build"}).code == 2);
}

TEST_CASE("stages without their upstream artifacts exit 3") {
  Workspace w("deps");
  const auto cfg = w.config(kSmallSynth);
  const Run r = run({"--config", cfg, "--out", w.out(), "risk"});
  CHECK(r.code == 3);
  CHECK(r.err.find("build") != std::string::npos);
  REQUIRE(run({"--config", cfg, "--out", w.out(), "synth"}).code == 0);
  CHECK(run({"--config", cfg, "--out", w.out(), "classify", "train"}).code == 3);  // no partition yet
  // A different seed changes the config hash, so earlier outputs are stale.
  const Run stale = run({"--config", cfg, "--out", w.out(), "--seed", "99", "metrics"});
  CHECK(stale.code == 3);
  CHECK(stale.err.find("config hash") != std::string::npos);
}

TEST_CASE("malformed firm table exits 4") {
  Workspace w("data");
  std::ofstream(w.root / "tx.csv") << "payer,payee,date,amount\na,b,2014-01-02,5\n";
  std::ofstream(w.root / "firms.csv") << "id,status,rating,sector\na,customer,Q,\n";
  const auto cfg = w.config({{"inputs", {{"transactions", "tx.csv"}, {"firms", "firms.csv"}}}});
  CHECK(run({"--config", cfg, "--out", w.out(), "build"}).code == 4);
}

TEST_CASE("full pipeline from synthetic data through build") {
  Workspace w("pipeline");
  const auto synth_cfg = w.config(kSmallSynth, "synth.json");
  const std::string synth_out = (w.root / "synthetic").string();
  REQUIRE(run({"--config", synth_cfg, "--out", synth_out, "synth"}).code == 0);
  CHECK(fs::exists(w.root / "synthetic" / "synth" / "truth.json"));

  // Second run ingests the generated CSV files, relative to the config.
  json cfg = kSmallSynth;
  cfg.erase("synth");
  cfg["inputs"] = {{"transactions", "synthetic/synth/transactions.csv"}, {"firms", "synthetic/synth/firms.csv"}};
  cfg["subgraph"] = "customers";
  const auto build_cfg = w.config(cfg, "build.json");
  const std::vector<std::string> base{"--config", build_cfg, "--out", w.out()};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return run(a);
  };
  const Run b = with({"build"});
  REQUIRE(b.code == 0);
  const json manifest = json::parse(slurp(w.root / "out" / "graphs" / "manifest.json"));
  CHECK(manifest["graphs"] == json::array({"2020-01"}));
  CHECK(first_line(w.root / "out" / "build" / "summary.csv").rfind("label,n,m,", 0) == 0);

  REQUIRE(with({"metrics"}).code == 0);
  REQUIRE(with({"risk"}).code == 0);
  REQUIRE(with({"partition"}).code == 0);
  CHECK(first_line(w.root / "out" / "partition" / "enrichment.csv") ==
        "graph,partition,group,rating,observed,draws,successes,population,p_value,threshold,direction,tie,"
        "significant");
  const json part = json::parse(slurp(w.root / "out" / "partition" / "partition.json"));
  CHECK(part["graphs"][0]["modules"]["Q"].get<double>() > 0.0);
  CHECK(part["graphs"][0]["hierarchy"]["h"].get<double>() >= 0.0);

  std::ofstream(w.root / "grid.json") << R"([{"label":"d3","tree":{"max_depth":3}},{"label":"d6","tree":{"max_depth":6}}])";
  REQUIRE(with({"classify", "--grid", (w.root / "grid.json").string(), "--objective", "accuracy", "train"}).code == 0);
  const json report = json::parse(slurp(w.root / "out" / "classify" / "report.json"));
  CHECK(report["grid"].size() == 2);
  CHECK(report["methods"].size() == 3);
  REQUIRE(with({"classify", "eval"}).code == 0);
  REQUIRE(with({"classify", "predict"}).code == 0);
  CHECK(first_line(w.root / "out" / "classify" / "predictions.csv") == "node,predicted");

  REQUIRE(with({"report"}).code == 0);
  for (const char* f : {"summary.csv", "enrichment.csv", "enrichment_summary.csv", "fits.csv", "classify.csv"})
    CHECK(fs::exists(w.root / "out" / "report" / f));
  CHECK(first_line(w.root / "out" / "report" / "classify.csv") ==
        "method,accuracy,recall_L,recall_M,recall_H,ws_acc,ws_rec,ws_pr");

  // Every JSON artifact carries the config hash and seed.
  for (const auto& e : fs::recursive_directory_iterator(w.root / "out")) {
    if (e.path().extension() != ".json") continue;
    const json j = json::parse(slurp(e.path()));
    CHECK(j.contains("config_hash"));
    CHECK(j["seed"] == 2);
  }
}

TEST_CASE("weekly windows split the log") {
  Workspace w("weekly");
  std::ofstream(w.root / "tx.csv") << "payer,payee,date,amount,count,kind\n"
                                      "a,b,2014-01-06,5.00,1,x\n"
                                      "b,c,2014-01-07,2.50,1,x\n"
                                      "c,a,2014-01-14,1.00,1,x\n";
  std::ofstream(w.root / "firms.csv") << "id,status,rating,sector\na,customer,L,\nb,customer,H,\nc,customer,M,\n";
  const auto cfg = w.config({{"inputs", {{"transactions", "tx.csv"}, {"firms", "firms.csv"}}}});
  REQUIRE(run({"--config", cfg, "--out", w.out(), "--window", "weekly", "build"}).code == 0);
  const json manifest = json::parse(slurp(w.root / "out" / "graphs" / "manifest.json"));
  CHECK(manifest["graphs"] == json::array({"2014-W02", "2014-W03"}));
  const json summary = json::parse(slurp(w.root / "out" / "build" / "summary.json"));
  CHECK(summary["rows"][0]["m"] == 2);
  CHECK(summary["rows"][1]["m"] == 1);
  // Tiny graphs: analyses that are undefined report errors instead of failing.
  CHECK(run({"--config", cfg, "--out", w.out(), "--window", "weekly", "metrics"}).code == 0);
}

TEST_CASE("config hash ignores the output directory") {
  cli::RunConfig a, b;
  b.out = "elsewhere";
  CHECK(a.hash() == b.hash());
  b.seed = 2;
  CHECK(a.hash() != b.hash());
  CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}
