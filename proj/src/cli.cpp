#include "paynet/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "paynet/classify.hpp"
#include "paynet/metrics.hpp"
#include "paynet/partition.hpp"
#include "paynet/riskstats.hpp"
#include "paynet/synth.hpp"
#include "paynet/text.hpp"

namespace paynet::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using graph::NodeId;
using graph::PaymentGraph;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json RunConfig::canonical() const {
  return {{"inputs", {{"transactions", transactions}, {"firms", firms}}},
          {"window", ingest::to_string(window)},
          {"subgraph", subgraph},
          {"thresholds",
           {{"p_s", p_s},
            {"min_rated", min_rated},
            {"k_max", k_max},
            {"min_module_size", min_module_size},
            {"distance_max_sources", distance_max_sources}}},
          {"analyses",
           {{"distance_tables", distance_tables}, {"powerlaw", powerlaw}, {"louvain_restarts", louvain_restarts}}},
          {"classify", {{"train_fraction", train_fraction}, {"objective", objective}}},
          {"synth", synth},
          {"seed", seed}};
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(canonical().dump())));
  return buf;
}

namespace {

template <class T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) j.at(key).get_to(target);
}

}  // namespace

RunConfig config_from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.base_dir = base_dir;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("inputs")) {
      read(j.at("inputs"), "transactions", c.transactions);
      read(j.at("inputs"), "firms", c.firms);
    }
    if (j.contains("window")) c.window = ingest::parse_granularity(j.at("window").get<std::string>());
    read(j, "subgraph", c.subgraph);
    if (j.contains("thresholds")) {
      const json& t = j.at("thresholds");
      read(t, "p_s", c.p_s);
      read(t, "min_rated", c.min_rated);
      read(t, "k_max", c.k_max);
      read(t, "min_module_size", c.min_module_size);
      read(t, "distance_max_sources", c.distance_max_sources);
    }
    if (j.contains("analyses")) {
      const json& a = j.at("analyses");
      read(a, "distance_tables", c.distance_tables);
      read(a, "powerlaw", c.powerlaw);
      read(a, "louvain_restarts", c.louvain_restarts);
    }
    if (j.contains("classify")) {
      read(j.at("classify"), "train_fraction", c.train_fraction);
      read(j.at("classify"), "objective", c.objective);
    }
    if (j.contains("synth")) c.synth = j.at("synth");
    read(j, "seed", c.seed);
    if (j.contains("out")) c.out = base_dir / j.at("out").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.subgraph != "customers" && c.subgraph != "rated" && c.subgraph != "all")
    throw ConfigError("subgraph must be customers, rated or all (got '" + c.subgraph + "')");
  if (!(c.p_s > 0 && c.p_s < 1)) throw ConfigError("thresholds.p_s must lie in (0, 1)");
  if (c.k_max < 1) throw ConfigError("thresholds.k_max must be at least 1");
  if (!(c.train_fraction > 0 && c.train_fraction < 1)) throw ConfigError("classify.train_fraction must lie in (0, 1)");
  classify::Scores{}.metric(c.objective);
  return c;
}

// ---------------------------------------------------------------------------
// Basic metrics table

SummaryRow summarize(const std::string& label, const PaymentGraph& g, std::uint64_t seed,
                     std::size_t exact_diameter_limit) {
  SummaryRow r;
  r.label = label;
  r.n = g.node_count();
  r.m = g.edge_count();
  if (r.n == 0) return r;
  const graph::DegreeTable d = graph::degrees(g);
  r.mean_in_all = d.mean_in_all;
  r.mean_out_all = d.mean_out_all;
  r.mean_in_active = d.mean_in_active;
  r.mean_out_active = d.mean_out_active;
  auto safe_density = [](std::size_t n, std::size_t m) { return n < 2 ? 0.0 : graph::density(n, m); };
  r.density = safe_density(r.n, r.m);

  const graph::Components weak = graph::components(g, graph::ComponentMode::weak);
  const std::uint32_t giant = weak.largest();
  const graph::BowTie bt = graph::bow_tie(g);
  std::vector<std::uint8_t> in_scc(r.n, 0);
  for (NodeId v : bt.scc) in_scc[v] = 1;
  double scc_volume = 0.0;
  for (NodeId u = 0; u < r.n; ++u)
    for (const graph::Arc& a : g.out_arcs(u)) {
      if (weak.label[u] == giant) ++r.gc_edges;
      if (in_scc[u] && in_scc[a.node]) {
        ++r.scc_edges;
        scc_volume += a.weight;
      }
    }
  r.gc_size = weak.sizes[giant];
  r.gc_density = safe_density(r.gc_size, r.gc_edges);
  r.scc_size = bt.scc.size();
  r.scc_density = safe_density(r.scc_size, r.scc_edges);
  r.scc_volume_share = g.total_weight() > 0 ? scc_volume / g.total_weight() : 0.0;
  r.payers_only = bt.payers_only.size();
  const graph::DiameterResult dia = graph::diameter(
      g, r.n <= exact_diameter_limit ? graph::DiameterMode::exact : graph::DiameterMode::double_sweep_bound, seed);
  r.diameter_lower = dia.lower;
  r.diameter_upper = dia.upper;
  return r;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "label,n,m,mean_in_all,mean_out_all,mean_in_active,mean_out_active,density,diameter_lower,"
         "diameter_upper,gc_size,gc_edges,gc_density,scc_size,scc_edges,scc_density,scc_volume_share,payers_only\n";
  for (const SummaryRow& r : rows)
    out << text::csv_field(r.label) << ',' << r.n << ',' << r.m << ',' << text::format_double(r.mean_in_all) << ','
        << text::format_double(r.mean_out_all) << ',' << text::format_double(r.mean_in_active) << ','
        << text::format_double(r.mean_out_active) << ',' << text::format_double(r.density) << ','
        << r.diameter_lower << ',' << r.diameter_upper << ',' << r.gc_size << ',' << r.gc_edges << ','
        << text::format_double(r.gc_density) << ',' << r.scc_size << ',' << r.scc_edges << ','
        << text::format_double(r.scc_density) << ',' << text::format_double(r.scc_volume_share) << ','
        << r.payers_only << '\n';
}

json to_json(const SummaryRow& r) {
  return {{"label", r.label},
          {"n", r.n},
          {"m", r.m},
          {"mean_in_degree_all", r.mean_in_all},
          {"mean_out_degree_all", r.mean_out_all},
          {"mean_in_degree_active", r.mean_in_active},
          {"mean_out_degree_active", r.mean_out_active},
          {"density", r.density},
          {"diameter_lower", r.diameter_lower},
          {"diameter_upper", r.diameter_upper},
          {"gc_size", r.gc_size},
          {"gc_edges", r.gc_edges},
          {"gc_density", r.gc_density},
          {"scc_size", r.scc_size},
          {"scc_edges", r.scc_edges},
          {"scc_density", r.scc_density},
          {"scc_volume_share", r.scc_volume_share},
          {"payers_only", r.payers_only}};
}

// ---------------------------------------------------------------------------
// Stage plumbing

namespace {

struct Context {
  RunConfig cfg;
  std::string hash;
  std::ostream& out;
  std::ostream& err;
};

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ConfigError("cannot create directory " + p.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  ensure_dir(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw DataError("cannot read " + p.string());
  return f;
}

// Every JSON artifact carries the config hash and the seed.
void write_json(const Context& ctx, const fs::path& p, json body) {
  body["config_hash"] = ctx.hash;
  body["seed"] = ctx.cfg.seed;
  open_out(p) << body.dump(2) << '\n';
}

json read_json(const fs::path& p) {
  std::ifstream f = open_in(p);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw DataError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

void write_manifest(const Context& ctx, const std::string& dir, const std::string& stage,
                    const std::vector<std::string>& files, json extra = json::object()) {
  extra["stage"] = stage;
  extra["files"] = files;
  write_json(ctx, ctx.cfg.out / dir / "manifest.json", std::move(extra));
}

// Loads the manifest of an upstream stage; DependencyError when it is missing
// or was produced under a different configuration.
json require_stage(const Context& ctx, const std::string& dir, const std::string& stage_names) {
  const fs::path p = ctx.cfg.out / dir / "manifest.json";
  if (!fs::exists(p))
    throw DependencyError("missing upstream stage '" + stage_names + "': " + p.string() + " not found; run `paynet " +
                          stage_names + "` first");
  const json m = read_json(p);
  const std::string h = m.value("config_hash", "");
  if (h != ctx.hash)
    throw DependencyError("stage '" + m.value("stage", stage_names) + "' output in " + (ctx.cfg.out / dir).string() +
                          " was produced with config hash " + h + ", current config hash is " + ctx.hash +
                          "; re-run `paynet " + m.value("stage", stage_names) + "`");
  return m;
}

bool stage_present(const Context& ctx, const std::string& dir) {
  return fs::exists(ctx.cfg.out / dir / "manifest.json");
}

void write_graph_files(const Context& ctx, const std::string& label, const PaymentGraph& g) {
  std::ofstream e = open_out(ctx.cfg.out / "graphs" / (label + ".edges.csv"));
  graph::write_edge_list(e, g);
  std::ofstream n = open_out(ctx.cfg.out / "graphs" / (label + ".nodes.csv"));
  graph::write_node_table(n, g);
}

graph::NodePredicate subgraph_predicate(const std::string& which) {
  if (which == "customers") return [](const FirmMeta& f) { return f.status == Status::customer; };
  if (which == "rated") return [](const FirmMeta& f) { return is_known(f.rating); };
  return [](const FirmMeta&) { return true; };
}

struct LoadedGraph {
  std::string label;
  PaymentGraph graph;
};

std::vector<LoadedGraph> load_graphs(const Context& ctx, const std::string& only = "") {
  const json manifest = require_stage(ctx, "graphs", "build' or 'synth");
  std::vector<LoadedGraph> out;
  for (const auto& label : manifest.at("graphs")) {
    const std::string l = label.get<std::string>();
    if (!only.empty() && l != only) continue;
    std::ifstream e = open_in(ctx.cfg.out / "graphs" / (l + ".edges.csv"));
    std::ifstream n = open_in(ctx.cfg.out / "graphs" / (l + ".nodes.csv"));
    const PaymentGraph full = graph::read_graph(e, n);
    out.push_back({l, graph::subgraph(full, subgraph_predicate(ctx.cfg.subgraph))});
  }
  if (!only.empty() && out.empty()) throw ConfigError("no graph labelled '" + only + "'");
  return out;
}

std::string file_label(const std::string& label, const char* suffix) { return label + suffix; }

// ---------------------------------------------------------------------------
// build

int cmd_build(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  if (c.transactions.empty() || c.firms.empty())
    throw ConfigError("build needs inputs.transactions and inputs.firms in the config");
  const fs::path tx_path = c.base_dir / c.transactions, firm_path = c.base_dir / c.firms;
  if (!fs::exists(tx_path)) throw ConfigError("transactions file not found: " + tx_path.string());
  if (!fs::exists(firm_path)) throw ConfigError("firms file not found: " + firm_path.string());
  std::ifstream tx = open_in(tx_path), fm = open_in(firm_path);
  const auto records = ingest::parse_transactions(tx);
  const auto firms = ingest::parse_firms(fm);
  if (!firms.errors.empty())
    throw DataError("firms file has " + std::to_string(firms.errors.size()) + " bad rows; first at line " +
                    std::to_string(firms.errors.front().line) + ": " + firms.errors.front().message);

  std::vector<std::string> labels, files;
  std::vector<SummaryRow> rows;
  json windows = json::array();
  for (const ingest::TimeWindow& w : ingest::windows_spanned(records.rows, c.window)) {
    const std::string label = ingest::window_label(w);
    const ingest::BuildResult b = ingest::build_network(records.rows, firms.rows, w);
    write_graph_files(ctx, label, b.graph);
    labels.push_back(label);
    files.push_back(label + ".edges.csv");
    files.push_back(label + ".nodes.csv");
    rows.push_back(summarize(label, b.graph, c.seed));
    windows.push_back({{"label", label},
                       {"records_in_window", b.diagnostics.records_in_window},
                       {"self_loops_dropped", b.diagnostics.self_loops_dropped},
                       {"self_loop_volume", b.diagnostics.self_loop_volume},
                       {"firms_without_metadata", b.diagnostics.firms_without_metadata}});
  }
  json errors = json::array();
  for (std::size_t i = 0; i < records.errors.size() && i < 50; ++i)
    errors.push_back({{"line", records.errors[i].line}, {"message", records.errors[i].message}});
  write_json(ctx, c.out / "build" / "diagnostics.json",
             {{"rows_read", records.rows_read},
              {"rows_rejected", records.errors.size()},
              {"first_errors", errors},
              {"firms_read", firms.rows_read},
              {"windows", windows}});

  json summary = json::array();
  for (const SummaryRow& r : rows) summary.push_back(to_json(r));
  write_json(ctx, c.out / "build" / "summary.json", {{"window", ingest::to_string(c.window)}, {"rows", summary}});
  {
    std::ofstream csv = open_out(c.out / "build" / "summary.csv");
    write_summary_csv(csv, rows);
  }

  const ingest::ActivitySeries act = ingest::activity_summary(records.rows, c.window);
  json series = json::array();
  for (const auto& w : act.windows)
    series.push_back({{"label", ingest::window_label(w.window)},
                      {"nodes", w.nodes},
                      {"edges", w.edges},
                      {"volume", w.volume},
                      {"transactions", w.transactions}});
  json np = json::object(), ep = json::object();
  for (const auto& [k, v] : act.node_persistence) np[std::to_string(k)] = v;
  for (const auto& [k, v] : act.edge_persistence) ep[std::to_string(k)] = v;
  write_json(ctx, c.out / "build" / "activity.json",
             {{"windows", series}, {"node_persistence", np}, {"edge_persistence", ep}});

  write_manifest(ctx, "build", "build", {"diagnostics.json", "summary.json", "summary.csv", "activity.json"});
  write_manifest(ctx, "graphs", "build", files, {{"graphs", labels}});
  ctx.out << "build: " << labels.size() << " " << ingest::to_string(c.window) << " graphs, " << records.rows.size()
          << " records (" << records.errors.size() << " rejected) -> " << (c.out / "graphs").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// synth

int cmd_synth(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  synth::SynthSpec spec = synth::spec_from_json(c.synth);
  spec.seed = c.seed;
  const synth::SynthOutput s = synth::generate(spec);
  const std::string label = "synthetic";
  write_graph_files(ctx, label, s.graph);
  json truth = s.truth;
  truth["spec"] = synth::to_json(spec);
  write_json(ctx, c.out / "synth" / "truth.json", truth);
  {
    std::ofstream tx = open_out(c.out / "synth" / "transactions.csv");
    synth::write_transactions(tx, s.graph, 2020, 1, c.seed);
    std::ofstream fm = open_out(c.out / "synth" / "firms.csv");
    synth::write_firms(fm, s.graph);
  }
  const SummaryRow row = summarize(label, s.graph, c.seed);
  write_json(ctx, c.out / "synth" / "summary.json", {{"rows", json::array({to_json(row)})}});
  {
    std::ofstream csv = open_out(c.out / "synth" / "summary.csv");
    write_summary_csv(csv, {row});
  }
  write_manifest(ctx, "synth", "synth", {"truth.json", "transactions.csv", "firms.csv", "summary.json", "summary.csv"});
  write_manifest(ctx, "graphs", "synth", {label + ".edges.csv", label + ".nodes.csv"},
                 {{"graphs", json::array({label})}});
  ctx.out << "synth: " << s.graph.node_count() << " nodes, " << s.graph.edge_count() << " edges -> "
          << (c.out / "graphs").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

json fit_json(std::span<const double> samples, bool discrete) {
  try {
    const metrics::PowerLawFit f = metrics::powerlaw_fit(samples, discrete);
    return {{"alpha", f.alpha},     {"xmin", f.xmin},       {"ks", f.ks},
            {"n_tail", f.n_tail},   {"discrete", discrete}, {"tail_fraction", f.tail_fraction}};
  } catch (const DomainError& e) {
    return {{"error", e.what()}};
  }
}

json assortativity_json(const PaymentGraph& g, bool weighted) {
  try {
    const metrics::Assortativity a = metrics::rating_assortativity(g, weighted);
    return {{"r", a.r}, {"r_min", a.r_min}};
  } catch (const DomainError& e) {
    return {{"error", e.what()}};
  }
}

int cmd_metrics(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  json results = json::array();
  std::vector<std::string> files{"metrics.json"};
  for (const LoadedGraph& lg : load_graphs(ctx)) {
    const PaymentGraph& g = lg.graph;
    const graph::DegreeTable d = graph::degrees(g);
    std::vector<double> in_deg(d.in_degree.begin(), d.in_degree.end());
    std::vector<double> out_deg(d.out_degree.begin(), d.out_degree.end());
    json r{{"graph", lg.label}, {"n", g.node_count()}, {"m", g.edge_count()}};
    r["degrees"] = {{"mean_in_all", d.mean_in_all},
                    {"mean_out_all", d.mean_out_all},
                    {"mean_in_active", d.mean_in_active},
                    {"mean_out_active", d.mean_out_active}};
    if (c.powerlaw)
      r["fits"] = {{"in_degree", fit_json(in_deg, true)},
                   {"out_degree", fit_json(out_deg, true)},
                   {"in_strength", fit_json(d.in_strength, false)},
                   {"out_strength", fit_json(d.out_strength, false)}};
    r["assortativity"] = {{"rating", assortativity_json(g, false)}, {"rating_weighted", assortativity_json(g, true)}};
    if (g.edge_count() > 0) {
      try {
        r["assortativity"]["degree_class"] =
            metrics::degree_class_assortativity(g, metrics::NodeAttribute::degree);
        r["assortativity"]["strength_class"] =
            metrics::degree_class_assortativity(g, metrics::NodeAttribute::strength);
      } catch (const DomainError& e) {
        r["assortativity"]["class_error"] = e.what();
      }
    }
    if (g.node_count() > 0) {
      const auto weak = graph::components(g, graph::ComponentMode::weak);
      const auto strong = graph::components(g, graph::ComponentMode::strong);
      r["components"] = {{"weak_count", weak.count()},
                         {"weak_largest", weak.sizes[weak.largest()]},
                         {"strong_count", strong.count()},
                         {"strong_largest", strong.sizes[strong.largest()]}};
      const graph::BowTie bt = graph::bow_tie(g);
      r["bow_tie"] = {{"scc", bt.scc.size()},
                      {"in", bt.in_comp.size()},
                      {"out", bt.out_comp.size()},
                      {"tendrils_other", bt.tendrils_other.size()},
                      {"payers_only", bt.payers_only.size()},
                      {"outside_giant", bt.outside_giant.size()},
                      {"degenerate_scc", bt.degenerate_scc}};
    }
    results.push_back(r);

    const std::string ccdf_file = file_label(lg.label, ".ccdf.csv");
    std::ofstream csv = open_out(c.out / "metrics" / ccdf_file);
    csv << "quantity,x,p\n";
    const std::vector<std::pair<const char*, const std::vector<double>*>> series{
        {"in_degree", &in_deg}, {"out_degree", &out_deg}, {"in_strength", &d.in_strength},
        {"out_strength", &d.out_strength}};
    for (const auto& [name, values] : series) {
      std::vector<double> positive;
      for (double v : *values)
        if (v > 0) positive.push_back(v);
      for (const metrics::CcdfPoint& p : metrics::ccdf(positive))
        csv << name << ',' << text::format_double(p.x) << ',' << text::format_double(p.p) << '\n';
    }
    files.push_back(ccdf_file);
  }
  write_json(ctx, c.out / "metrics" / "metrics.json", {{"subgraph", c.subgraph}, {"graphs", results}});
  write_manifest(ctx, "metrics", "metrics", files);
  ctx.out << "metrics: " << results.size() << " graphs -> " << (c.out / "metrics").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// risk

json logit_json(const riskstats::BinaryLogitFit& f) {
  return {{"intercept", f.intercept}, {"slopes", f.slopes},       {"std_errors", f.std_errors},
          {"converged", f.converged}, {"separated", f.separated}, {"iterations", f.iterations}};
}

int cmd_risk(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  using riskstats::Direction;
  json results = json::array();
  std::vector<std::string> files{"risk.json"};
  for (const LoadedGraph& lg : load_graphs(ctx)) {
    const PaymentGraph& g = lg.graph;
    json r{{"graph", lg.label}};

    const std::string degree_file = file_label(lg.label, ".degree.csv");
    {
      std::ofstream csv = open_out(c.out / "risk" / degree_file);
      csv << "direction,degree,rated,share_L,share_M,share_H\n";
      for (Direction d : {Direction::in, Direction::out}) {
        try {
          for (const auto& [k, s] : riskstats::rating_given_degree(g, d))
            csv << (d == Direction::in ? "in" : "out") << ',' << k << ',' << s.rated << ','
                << text::format_double(s.share[0]) << ',' << text::format_double(s.share[1]) << ','
                << text::format_double(s.share[2]) << '\n';
        } catch (const DomainError& e) {
          r["degree_error"] = e.what();
        }
      }
    }
    files.push_back(degree_file);

    // Cumulative logit on the degree, then degree plus size tertile.
    const std::vector<std::uint8_t> tertile = g.node_count() > 0 ? metrics::size_proxy_tertiles(g)
                                                                  : std::vector<std::uint8_t>{};
    json logit = json::object();
    for (Direction d : {Direction::in, Direction::out}) {
      Matrix x1, x2;
      std::vector<Rating> y;
      for (NodeId v = 0; v < g.node_count(); ++v) {
        if (!is_known(g.meta(v).rating)) continue;
        const double k = static_cast<double>(d == Direction::in ? g.in_degree(v) : g.out_degree(v));
        const std::array<double, 1> a{k};
        const std::array<double, 2> b{k, static_cast<double>(tertile[v])};
        x1.append_row(a);
        x2.append_row(b);
        y.push_back(g.meta(v).rating);
      }
      const char* name = d == Direction::in ? "in_degree" : "out_degree";
      try {
        const auto m1 = riskstats::fit_cumulative_logit(x1, y);
        const auto m2 = riskstats::fit_cumulative_logit(x2, y);
        logit[name] = {{"degree", {{"split_L", logit_json(m1.split_l)}, {"split_M", logit_json(m1.split_m)}}},
                       {"degree_size",
                        {{"split_L", logit_json(m2.split_l)}, {"split_M", logit_json(m2.split_m)}}}};
      } catch (const DomainError& e) {
        logit[name] = {{"error", e.what()}};
      }
    }
    r["cumulative_logit"] = logit;

    if (c.distance_tables) {
      const std::string dist_file = file_label(lg.label, ".distance.csv");
      std::ofstream csv = open_out(c.out / "risk" / dist_file);
      csv << "source,k,target,pairs,total,share,null_share,p_value,over,significant\n";
      json sources = json::object();
      for (Rating src : kKnownRatings) {
        try {
          const auto t = riskstats::distance_conditional_ratings(g, src, c.k_max, c.p_s, c.distance_max_sources,
                                                                 c.seed);
          sources[std::string(to_string(src))] = {{"sources", t.sources}, {"shells", t.shells.size()}};
          for (const auto& s : t.shells)
            for (std::size_t x = 0; x < 3; ++x)
              csv << to_string(src) << ',' << s.k << ',' << to_string(kKnownRatings[x]) << ',' << s.pairs[x] << ','
                  << s.total << ',' << text::format_double(s.share[x]) << ','
                  << text::format_double(t.null_share[x]) << ',' << text::format_double(s.p_value[x]) << ','
                  << (s.over[x] ? "true" : "false") << ',' << (s.significant[x] ? "true" : "false") << '\n';
        } catch (const DomainError& e) {
          sources[std::string(to_string(src))] = {{"error", e.what()}};
        }
      }
      r["distance_tables"] = sources;
      files.push_back(dist_file);
    }

    const std::string mw_file = file_label(lg.label, ".mannwhitney.csv");
    {
      std::ofstream csv = open_out(c.out / "risk" / mw_file);
      csv << "sample_a,sample_b,u,p_value,exact\n";
      try {
        const auto ev = riskstats::excess_volume_samples(g);
        const auto tests = riskstats::excess_volume_tests(ev);
        for (const auto& t : tests)
          csv << t.label_a << ',' << t.label_b << ',' << text::format_double(t.result.u) << ','
              << text::format_double(t.result.p) << ',' << (t.result.exact ? "true" : "false") << '\n';
        r["excess_volume"] = {{"a", ev.a}, {"b", ev.b}, {"tests", tests.size()}};
      } catch (const DomainError& e) {
        r["excess_volume"] = {{"error", e.what()}};
      }
    }
    files.push_back(mw_file);
    results.push_back(r);
  }
  write_json(ctx, c.out / "risk" / "risk.json", {{"subgraph", c.subgraph}, {"graphs", results}});
  write_manifest(ctx, "risk", "risk", files);
  ctx.out << "risk: " << results.size() << " graphs -> " << (c.out / "risk").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// partition

void write_assignment(const fs::path& p, const PaymentGraph& g, const partition::RankedPartition& part,
                      const char* column) {
  std::ofstream csv = open_out(p);
  csv << "node," << column << '\n';
  for (NodeId v = 0; v < g.node_count(); ++v) csv << text::csv_field(g.meta(v).id) << ',' << part.assignment[v] << '\n';
}

partition::RankedPartition read_assignment(const fs::path& p, const PaymentGraph& g, bool ordered) {
  std::ifstream in = open_in(p);
  partition::RankedPartition part;
  part.ordered = ordered;
  part.assignment.assign(g.node_count(), 0);
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = text::split_csv(line);
    const auto id = fields.size() == 2 ? g.find(fields[0]) : std::nullopt;
    const auto grp = fields.size() == 2 ? text::parse_int(fields[1]) : std::nullopt;
    if (!id || !grp || *grp < 1)
      throw DataError(p.string() + ":" + std::to_string(line_no) + ": bad partition row");
    part.assignment[*id] = static_cast<std::uint32_t>(*grp);
    part.n_groups = std::max(part.n_groups, static_cast<std::uint32_t>(*grp));
  }
  return part;
}

json enrichment_summary(const partition::GroupRiskReport& rep) {
  json s = json::object();
  for (Rating r : kKnownRatings) {
    std::size_t over = 0, under = 0;
    for (const auto& e : rep.results)
      if (e.rating == r && e.significant) ++(e.direction == riskstats::Over::over ? over : under);
    s[std::string(to_string(r))] = {{"over", over}, {"under", under}};
  }
  s["tested"] = rep.tested_groups;
  s["total"] = rep.total_groups;
  s["skipped"] = rep.skipped.size();
  return s;
}

void write_enrichment_rows(std::ostream& csv, const std::string& label, const char* kind,
                           const partition::GroupRiskReport& rep) {
  for (const auto& e : rep.results)
    csv << text::csv_field(label) << ',' << kind << ',' << e.group << ',' << to_string(e.rating) << ',' << e.observed
        << ',' << e.draws << ',' << e.successes << ',' << e.population << ',' << text::format_double(e.p_value) << ','
        << text::format_double(e.threshold) << ',' << (e.direction == riskstats::Over::over ? "over" : "under")
        << ',' << (e.tie ? "true" : "false") << ',' << (e.significant ? "true" : "false") << '\n';
}

int cmd_partition(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  json results = json::array();
  std::vector<std::string> files{"partition.json", "enrichment.csv"};
  std::ofstream enrich = open_out(c.out / "partition" / "enrichment.csv");
  enrich << "graph,partition,group,rating,observed,draws,successes,population,p_value,threshold,direction,tie,"
            "significant\n";
  json truth;
  if (stage_present(ctx, "synth")) {
    require_stage(ctx, "synth", "synth");
    truth = read_json(c.out / "synth" / "truth.json");
  }
  for (const LoadedGraph& lg : load_graphs(ctx)) {
    const PaymentGraph& g = lg.graph;
    json r{{"graph", lg.label}, {"n", g.node_count()}, {"m", g.edge_count()}};
    if (g.edge_count() == 0) {
      r["error"] = "graph has no edges";
      results.push_back(r);
      continue;
    }
    const std::vector<Rating> ratings = g.ratings();

    partition::LouvainOptions lo;
    lo.seed = c.seed;
    lo.restarts = c.louvain_restarts;
    const partition::RankedPartition modules = partition::louvain(g, lo);
    const auto mod_report = partition::group_risk_profiles(modules, ratings, c.min_rated, c.p_s);
    json mj{{"Q", modules.score},
            {"n_groups", modules.n_groups},
            {"levels", modules.levels},
            {"moves", modules.moves},
            {"sizes", modules.group_sizes()},
            {"enrichment", enrichment_summary(mod_report)}};
    if (truth.contains("modules") && truth["modules"].size() == g.node_count())
      mj["nmi_vs_planted"] = partition::nmi(modules.assignment, truth["modules"].get<std::vector<std::uint32_t>>());
    r["modules"] = mj;

    const partition::RankedPartition hier = partition::minimize_agony(g, partition::AgonyMode::heuristic);
    const auto hier_report = partition::group_risk_profiles(hier, ratings, c.min_rated, c.p_s);
    json hj{{"h", hier.score},
            {"agony", hier.agony},
            {"agony_lower_bound", hier.agony_lower_bound},
            {"n_groups", hier.n_groups},
            {"sizes", hier.group_sizes()},
            {"enrichment", enrichment_summary(hier_report)}};
    if (truth.contains("planted_agony") && truth.contains("ranks") && truth["ranks"].size() == g.node_count())
      hj["planted_agony"] = truth["planted_agony"];
    r["hierarchy"] = hj;

    const std::string mod_file = file_label(lg.label, ".modules.csv");
    const std::string hier_file = file_label(lg.label, ".hierarchy.csv");
    write_assignment(c.out / "partition" / mod_file, g, modules, "group");
    write_assignment(c.out / "partition" / hier_file, g, hier, "rank");
    files.push_back(mod_file);
    files.push_back(hier_file);
    write_enrichment_rows(enrich, lg.label, "modules", mod_report);
    write_enrichment_rows(enrich, lg.label, "hierarchy", hier_report);
    results.push_back(r);
  }
  enrich.close();
  write_json(ctx, c.out / "partition" / "partition.json",
             {{"subgraph", c.subgraph}, {"min_rated", c.min_rated}, {"p_s", c.p_s}, {"graphs", results}});
  write_manifest(ctx, "partition", "partition", files);
  ctx.out << "partition: " << results.size() << " graphs -> " << (c.out / "partition").string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyArgs {
  std::string action;
  std::string base = "tree";
  std::string strategy = "two-step";
  std::string grid_file;
  std::string objective;
  std::string graph;
};

std::vector<classify::GridPoint> read_grid(const fs::path& p) {
  const json j = read_json(p);
  if (!j.is_array() || j.empty()) throw ConfigError("grid file must hold a non-empty JSON array");
  std::vector<classify::GridPoint> grid;
  auto apply = [](const json& src, classify::Hyper& h) {
    if (src.contains("softmax")) {
      read(src.at("softmax"), "l2", h.softmax.l2);
      read(src.at("softmax"), "max_iter", h.softmax.max_iter);
    }
    if (src.contains("tree")) {
      read(src.at("tree"), "max_depth", h.tree.max_depth);
      read(src.at("tree"), "min_leaf", h.tree.min_leaf);
    }
    if (src.contains("mlp")) {
      read(src.at("mlp"), "layers", h.mlp.layers);
      read(src.at("mlp"), "epochs", h.mlp.epochs);
      read(src.at("mlp"), "learning_rate", h.mlp.learning_rate);
      read(src.at("mlp"), "batch_size", h.mlp.batch_size);
      read(src.at("mlp"), "momentum", h.mlp.momentum);
      read(src.at("mlp"), "l2", h.mlp.l2);
    }
  };
  try {
    for (std::size_t i = 0; i < j.size(); ++i) {
      classify::GridPoint g;
      g.label = j[i].value("label", "point" + std::to_string(i + 1));
      apply(j[i], g.step1);
      g.step2 = g.step1;
      if (j[i].contains("step2")) apply(j[i].at("step2"), g.step2);
      grid.push_back(g);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("grid file: ") + e.what());
  }
  return grid;
}

struct ClassifyData {
  LoadedGraph graph;
  partition::RankedPartition modules, hierarchy;
};

ClassifyData load_classify_inputs(const Context& ctx, const std::string& label) {
  require_stage(ctx, "partition", "partition");
  std::vector<LoadedGraph> graphs = load_graphs(ctx, label);
  if (graphs.empty()) throw DataError("no graphs available");
  ClassifyData d{std::move(graphs.front()), {}, {}};
  const fs::path dir = ctx.cfg.out / "partition";
  d.modules = read_assignment(dir / file_label(d.graph.label, ".modules.csv"), d.graph.graph, false);
  d.hierarchy = read_assignment(dir / file_label(d.graph.label, ".hierarchy.csv"), d.graph.graph, true);
  return d;
}

json scores_row(const std::string& method, const classify::Scores& s) {
  json j = classify::to_json(s);
  j["method"] = method;
  return j;
}

json confusion_json(const classify::ConfusionMatrix& c) {
  json j = json::array();
  for (const auto& row : c) j.push_back(row);
  return j;
}

int cmd_classify(const Context& ctx, const ClassifyArgs& a) {
  const RunConfig& c = ctx.cfg;
  const fs::path dir = c.out / "classify";
  if (a.action == "train") {
    const classify::BaseLearner base = classify::parse_base_learner(a.base);
    const classify::Strategy strategy = classify::parse_strategy(a.strategy);
    const std::string objective = a.objective.empty() ? c.objective : a.objective;
    classify::Scores{}.metric(objective);
    const std::vector<classify::GridPoint> grid =
        a.grid_file.empty() ? classify::default_grid(base) : read_grid(fs::path(a.grid_file));

    const ClassifyData d = load_classify_inputs(ctx, a.graph);
    classify::FeatureOptions fo;
    fo.min_module_size = c.min_module_size;
    const classify::Preprocessing prep = classify::fit_preprocessing(d.graph.graph, d.modules, d.hierarchy, fo);
    const classify::FeatureSet fs_all = classify::build_features(d.graph.graph, d.modules, d.hierarchy, prep);
    const classify::Split split = classify::stratified_split(fs_all.y, c.train_fraction, c.seed);
    auto rows_y = [&](const std::vector<std::size_t>& rows) {
      std::vector<Rating> y;
      for (std::size_t r : rows) y.push_back(fs_all.y[r]);
      return y;
    };
    const Matrix train_x = fs_all.x.select_rows(split.train), test_x = fs_all.x.select_rows(split.test);
    const std::vector<Rating> train_y = rows_y(split.train), test_y = rows_y(split.test);

    // Hyper-parameters are chosen on a further split of the training rows.
    const classify::Split inner = classify::stratified_split(train_y, c.train_fraction, c.seed + 1);
    std::vector<Rating> inner_train_y, inner_valid_y;
    for (std::size_t r : inner.train) inner_train_y.push_back(train_y[r]);
    for (std::size_t r : inner.test) inner_valid_y.push_back(train_y[r]);
    classify::TrainOptions to;
    to.seed = c.seed;
    const classify::GridResult gr =
        classify::grid_search(train_x.select_rows(inner.train), inner_train_y, train_x.select_rows(inner.test),
                              inner_valid_y, base, strategy, grid, objective, to);
    const classify::Classifier model = classify::train_classifier(train_x, train_y, base, strategy, grid[gr.best], to);
    const classify::ConfusionMatrix cm = classify::confusion(model, test_x, test_y);
    const classify::Scores scores = classify::evaluate(cm);

    std::array<double, 3> q{};
    for (Rating r : train_y) q[index_of(r)] += 1.0 / static_cast<double>(train_y.size());
    const std::string method = std::string(classify::to_string(base)) + " " + std::string(classify::to_string(strategy));
    json table = json::array();
    for (const auto& row : gr.table) table.push_back(scores_row(row.label, row.scores));

    write_json(ctx, dir / "model.json",
               {{"graph", d.graph.label},
                {"grid_point", grid[gr.best].label},
                {"train_fraction", c.train_fraction},
                {"preprocessing", classify::to_json(prep)},
                {"classifier", classify::to_json(model)}});
    write_json(ctx, dir / "report.json",
               {{"graph", d.graph.label},
                {"objective", objective},
                {"rows_train", split.train.size()},
                {"rows_test", split.test.size()},
                {"class_distribution", q},
                {"grid", table},
                {"best", grid[gr.best].label},
                {"confusion", confusion_json(cm)},
                {"methods",
                 json::array({scores_row(method, scores),
                              scores_row("random one-step", classify::random_baseline(q, classify::Strategy::one_step)),
                              scores_row("random two-step",
                                         classify::random_baseline(q, classify::Strategy::two_step))})}});
    write_manifest(ctx, "classify", "classify", {"model.json", "report.json"});
    ctx.out << "classify train: " << method << " accuracy " << text::format_double(scores.accuracy) << " recall_H "
            << text::format_double(scores.recall[2]) << " -> " << dir.string() << '\n';
    return 0;
  }

  require_stage(ctx, "classify", "classify train");
  const json model_file = read_json(dir / "model.json");
  const classify::Classifier model = classify::classifier_from_json(model_file.at("classifier"));
  const classify::Preprocessing prep = classify::preprocessing_from_json(model_file.at("preprocessing"));
  const ClassifyData d = load_classify_inputs(ctx, model_file.at("graph").get<std::string>());
  const PaymentGraph& g = d.graph.graph;

  if (a.action == "eval") {
    const classify::FeatureSet fs_all = classify::build_features(g, d.modules, d.hierarchy, prep);
    const classify::Split split = classify::stratified_split(fs_all.y, c.train_fraction, c.seed);
    std::vector<Rating> test_y;
    for (std::size_t r : split.test) test_y.push_back(fs_all.y[r]);
    const classify::ConfusionMatrix cm = classify::confusion(model, fs_all.x.select_rows(split.test), test_y);
    write_json(ctx, dir / "eval.json",
               {{"graph", d.graph.label},
                {"rows_test", split.test.size()},
                {"confusion", confusion_json(cm)},
                {"scores", classify::to_json(classify::evaluate(cm))}});
    write_manifest(ctx, "classify", "classify", {"model.json", "report.json", "eval.json"});
    ctx.out << "classify eval -> " << (dir / "eval.json").string() << '\n';
    return 0;
  }

  if (a.action == "predict") {
    std::vector<NodeId> targets;
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (!is_known(g.meta(v).rating)) targets.push_back(v);
    const classify::FeatureSet fs_t = classify::build_features(g, d.modules, d.hierarchy, prep, targets);
    std::ofstream csv = open_out(dir / "predictions.csv");
    csv << "node,predicted\n";
    for (std::size_t i = 0; i < targets.size(); ++i)
      csv << text::csv_field(g.meta(targets[i]).id) << ',' << to_string(model.predict(fs_t.x.row(i))) << '\n';
    ctx.out << "classify predict: " << targets.size() << " nodes -> " << (dir / "predictions.csv").string() << '\n';
    return 0;
  }
  throw ConfigError("unknown classify action '" + a.action + "'");
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const json graphs = require_stage(ctx, "graphs", "build' or 'synth");
  const fs::path dir = c.out / "report";
  ensure_dir(dir);
  std::vector<std::string> included{graphs.at("stage").get<std::string>()};
  std::vector<std::string> files{"report.json"};

  const std::string summary_stage = graphs.at("stage").get<std::string>();
  if (fs::exists(c.out / summary_stage / "summary.csv")) {
    fs::copy_file(c.out / summary_stage / "summary.csv", dir / "summary.csv", fs::copy_options::overwrite_existing);
    files.push_back("summary.csv");
  }
  if (stage_present(ctx, "partition")) {
    require_stage(ctx, "partition", "partition");
    fs::copy_file(c.out / "partition" / "enrichment.csv", dir / "enrichment.csv",
                  fs::copy_options::overwrite_existing);
    const json p = read_json(c.out / "partition" / "partition.json");
    std::ofstream csv = open_out(dir / "enrichment_summary.csv");
    csv << "graph,partition,score,groups,tested,over_L,under_L,over_M,under_M,over_H,under_H\n";
    for (const json& g : p.at("graphs")) {
      if (!g.contains("modules")) continue;
      for (const char* kind : {"modules", "hierarchy"}) {
        const json& part = g.at(kind);
        const json& e = part.at("enrichment");
        csv << text::csv_field(g.at("graph").get<std::string>()) << ',' << kind << ','
            << text::format_double(part.at(std::string(kind) == "modules" ? "Q" : "h").get<double>()) << ','
            << part.at("n_groups") << ',' << e.at("tested") << ',' << e["L"]["over"] << ',' << e["L"]["under"] << ','
            << e["M"]["over"] << ',' << e["M"]["under"] << ',' << e["H"]["over"] << ',' << e["H"]["under"] << '\n';
      }
    }
    files.push_back("enrichment.csv");
    files.push_back("enrichment_summary.csv");
    included.push_back("partition");
  }
  if (stage_present(ctx, "metrics")) {
    require_stage(ctx, "metrics", "metrics");
    const json m = read_json(c.out / "metrics" / "metrics.json");
    std::ofstream csv = open_out(dir / "fits.csv");
    csv << "graph,quantity,alpha,xmin,ks,n_tail\n";
    for (const json& g : m.at("graphs")) {
      if (!g.contains("fits")) continue;
      for (const auto& [name, f] : g.at("fits").items()) {
        if (f.contains("error")) continue;
        csv << text::csv_field(g.at("graph").get<std::string>()) << ',' << name << ','
            << text::format_double(f.at("alpha").get<double>()) << ',' << text::format_double(f.at("xmin").get<double>())
            << ',' << text::format_double(f.at("ks").get<double>()) << ',' << f.at("n_tail") << '\n';
      }
    }
    files.push_back("fits.csv");
    included.push_back("metrics");
  }
  if (stage_present(ctx, "risk")) {
    require_stage(ctx, "risk", "risk");
    included.push_back("risk");
  }
  if (stage_present(ctx, "classify")) {
    require_stage(ctx, "classify", "classify train");
    const json r = read_json(c.out / "classify" / "report.json");
    std::ofstream csv = open_out(dir / "classify.csv");
    csv << "method,accuracy,recall_L,recall_M,recall_H,ws_acc,ws_rec,ws_pr\n";
    for (const json& row : r.at("methods")) {
      csv << text::csv_field(row.at("method").get<std::string>());
      for (const char* k : {"accuracy", "recall_L", "recall_M", "recall_H", "ws_acc", "ws_rec", "ws_pr"})
        csv << ',' << text::format_double(row.at(k).get<double>());
      csv << '\n';
    }
    files.push_back("classify.csv");
    included.push_back("classify");
  }
  write_json(ctx, dir / "report.json", {{"stages", included}, {"files", files}});
  write_manifest(ctx, "report", "report", files);
  ctx.out << "report: " << files.size() << " files -> " << dir.string() << '\n';
  return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Payment-network risk analytics", "paynet"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, window, subgraph, out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--window", window, "monthly | weekly | daily");
  app.add_option("--subgraph", subgraph, "customers | rated | all");
  app.add_option("--out", out_dir, "output directory");

  app.add_subcommand("build", "graphs per window and the basic-metrics table");
  app.add_subcommand("metrics", "power-law fits, assortativity, components, bow-tie");
  app.add_subcommand("risk", "rating-degree curves, logit fits, distance tables, excess-volume tests");
  app.add_subcommand("partition", "modules, hierarchy and their risk enrichment");
  app.add_subcommand("synth", "generate a synthetic network from the config's synth section");
  app.add_subcommand("report", "aggregate stage outputs into CSV tables");
  CLI::App* cls = app.add_subcommand("classify", "rating prediction: train, eval, predict");
  ClassifyArgs ca;
  cls->require_subcommand(1);
  cls->fallthrough();
  cls->add_option("--base", ca.base, "softmax | tree | mlp");
  cls->add_option("--strategy", ca.strategy, "one-step | two-step");
  cls->add_option("--grid", ca.grid_file, "JSON grid of hyper-parameters");
  cls->add_option("--objective", ca.objective, "metric maximized by the grid search");
  cls->add_option("--graph", ca.graph, "graph label (default: first)");
  for (const char* action : {"train", "eval", "predict"}) cls->add_subcommand(action)->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    json raw = json::object();
    fs::path base_dir = ".";
    if (!config_path.empty()) {
      if (!fs::exists(config_path)) throw ConfigError("config file not found: " + config_path);
      try {
        std::ifstream f(config_path);
        raw = json::parse(f);
      } catch (const json::exception& e) {
        throw ConfigError("config file " + config_path + " is not valid JSON: " + e.what());
      }
      base_dir = fs::path(config_path).parent_path();
      if (base_dir.empty()) base_dir = ".";
    }
    RunConfig cfg = config_from_json(raw, base_dir);
    if (seed) cfg.seed = *seed;
    if (!window.empty()) {
      try {
        cfg.window = ingest::parse_granularity(window);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    if (!subgraph.empty()) {
      if (subgraph != "customers" && subgraph != "rated" && subgraph != "all")
        throw ConfigError("--subgraph must be customers, rated or all");
      cfg.subgraph = subgraph;
    }
    if (!out_dir.empty()) cfg.out = out_dir;
    Context ctx{cfg, cfg.hash(), out, err};

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "build") return cmd_build(ctx);
    if (name == "synth") return cmd_synth(ctx);
    if (name == "metrics") return cmd_metrics(ctx);
    if (name == "risk") return cmd_risk(ctx);
    if (name == "partition") return cmd_partition(ctx);
    if (name == "report") return cmd_report(ctx);
    if (name == "classify") {
      ca.action = cls->get_subcommands().front()->get_name();
      return cmd_classify(ctx, ca);
    }
    throw ConfigError("unknown subcommand " + name);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DependencyError& e) {
    err << "dependency error: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace paynet::cli
