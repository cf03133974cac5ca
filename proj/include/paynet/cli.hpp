#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "paynet/graph.hpp"
#include "paynet/ingest.hpp"

namespace paynet::cli {

/// Effective run configuration: the config file merged with command-line
/// overrides. Relative input paths are resolved against the config file.
struct RunConfig {
  std::string transactions;
  std::string firms;
  std::filesystem::path base_dir = ".";
  ingest::Granularity window = ingest::Granularity::monthly;
  std::string subgraph = "customers";  // customers | rated | all

  double p_s = 0.01;
  std::size_t min_rated = 500;
  std::uint32_t k_max = 13;
  std::size_t min_module_size = 500;
  std::size_t distance_max_sources = 2000;
  std::size_t louvain_restarts = 1;
  bool distance_tables = true;
  bool powerlaw = true;

  double train_fraction = 0.75;
  std::string objective = "ws_acc";

  nlohmann::json synth = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::filesystem::path out = "paynet-out";

  /// Everything that influences results (the output directory excluded).
  nlohmann::json canonical() const;
  /// FNV-1a of canonical().dump(), as 16 hex digits.
  std::string hash() const;
};

RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

std::uint64_t fnv1a(std::string_view bytes);

/// One row of the basic-metrics table.
struct SummaryRow {
  std::string label;
  std::size_t n = 0;
  std::size_t m = 0;
  double mean_in_all = 0, mean_out_all = 0;
  double mean_in_active = 0, mean_out_active = 0;
  double density = 0;
  std::uint32_t diameter_lower = 0, diameter_upper = 0;
  std::size_t gc_size = 0, gc_edges = 0;
  double gc_density = 0;
  std::size_t scc_size = 0, scc_edges = 0;
  double scc_density = 0;
  double scc_volume_share = 0;
  std::size_t payers_only = 0;
};

/// Diameter is exact up to exact_diameter_limit nodes, a double-sweep
/// bound above.
SummaryRow summarize(const std::string& label, const graph::PaymentGraph& g, std::uint64_t seed,
                     std::size_t exact_diameter_limit = 5000);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
nlohmann::json to_json(const SummaryRow& r);

/// Entry point of the `paynet` tool. Returns the process exit status:
/// 0 success, 2 config error, 3 dependency error, 4 data error, 1 otherwise.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args);

}  // namespace paynet::cli
