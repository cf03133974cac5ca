#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paynet/graph.hpp"
#include "paynet/types.hpp"

namespace paynet::ingest {

using Date = std::chrono::sys_days;

std::optional<Date> parse_date(std::string_view iso);
std::string format_date(Date d);

struct TransactionRecord {
  std::string payer;
  std::string payee;
  Date date{};
  std::int64_t cents = 0;  // amount in hundredths, exact
  std::uint32_t count = 1;
  std::string kind;

  double amount() const { return static_cast<double>(cents) / 100.0; }
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

template <class T>
struct ParseReport {
  std::vector<T> rows;
  std::vector<RowError> errors;
  std::size_t rows_read = 0;
};

/// Reads `payer,payee,date,amount,count,kind`. Columns may appear in any
/// order; a missing required column throws DataError, bad rows are skipped
/// and reported with their line number.
ParseReport<TransactionRecord> parse_transactions(std::istream& in);

/// Reads `id,status,rating,sector`.
ParseReport<FirmMeta> parse_firms(std::istream& in);

enum class Granularity { daily, weekly, monthly };

std::string_view to_string(Granularity g);
Granularity parse_granularity(std::string_view text);

/// Calendar window. `index` is an absolute ordinal: days since 1970-01-01,
/// ISO weeks since the week of 1970-01-01, or months since year 0.
struct TimeWindow {
  Granularity granularity = Granularity::monthly;
  std::int64_t index = 0;

  auto operator<=>(const TimeWindow&) const = default;
};

TimeWindow window_of(Date d, Granularity g);
bool contains(const TimeWindow& w, Date d);
// "2014-01-15", "2014-W03" (ISO week-year) or "2014-01".
std::string window_label(const TimeWindow& w);

struct BuildDiagnostics {
  std::size_t records_in_window = 0;
  std::size_t self_loops_dropped = 0;
  double self_loop_volume = 0.0;
  std::size_t firms_without_metadata = 0;
};

struct BuildResult {
  graph::PaymentGraph graph;
  BuildDiagnostics diagnostics;
};

/// Aggregates records into one edge per ordered firm pair, weight = summed
/// amount. Nodes are the firms touched by at least one kept edge, ordered by
/// id. Firms missing from `firms` get status unknown and rating NA. With no
/// window every record is used.
BuildResult build_network(const std::vector<TransactionRecord>& records,
                          const std::vector<FirmMeta>& firms,
                          std::optional<TimeWindow> window = std::nullopt);

/// Distinct windows touched by the records, ascending.
std::vector<TimeWindow> windows_spanned(const std::vector<TransactionRecord>& records, Granularity g);

struct WindowActivity {
  TimeWindow window;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double volume = 0.0;
  std::uint64_t transactions = 0;
};

struct ActivitySeries {
  Granularity granularity = Granularity::monthly;
  // One entry per window from the first to the last record, empty ones included.
  std::vector<WindowActivity> windows;
  // windows-active -> number of nodes (edges) active in exactly that many windows
  std::map<std::uint32_t, std::size_t> node_persistence;
  std::map<std::uint32_t, std::size_t> edge_persistence;
};

ActivitySeries activity_summary(const std::vector<TransactionRecord>& records, Granularity g);

}  // namespace paynet::ingest
