#include "paynet/ingest.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <istream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "paynet/text.hpp"

namespace paynet::ingest {

using namespace std::chrono;

std::optional<Date> parse_date(std::string_view iso) {
  iso = text::trim(iso);
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  auto y = text::parse_int(iso.substr(0, 4));
  auto m = text::parse_int(iso.substr(5, 2));
  auto d = text::parse_int(iso.substr(8, 2));
  if (!y || !m || !d || *m < 1 || *d < 1) return std::nullopt;
  year_month_day ymd{year{static_cast<int>(*y)}, month{static_cast<unsigned>(*m)},
                     day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

std::string format_date(Date d) {
  year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

namespace {

// Amount with at most two decimals, no sign, as exact cents.
std::optional<std::int64_t> parse_cents(std::string_view s) {
  s = text::trim(s);
  if (s.empty()) return std::nullopt;
  const auto dot = s.find('.');
  auto whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (frac.size() > 2) return std::nullopt;
  auto digits = [](std::string_view t) {
    return std::all_of(t.begin(), t.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!digits(whole) || !digits(frac) || whole.size() > 15) return std::nullopt;
  std::int64_t cents = 0;
  for (char c : whole) cents = cents * 10 + (c - '0');
  cents *= 100;
  if (frac.size() >= 1) cents += 10 * (frac[0] - '0');
  if (frac.size() == 2) cents += frac[1] - '0';
  return cents;
}

struct Header {
  std::unordered_map<std::string, std::size_t> columns;

  std::size_t require(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) throw DataError("missing required column '" + name + "'");
    return it->second;
  }
  std::optional<std::size_t> optional(const std::string& name) const {
    auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  }
};

Header read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input: header row expected");
  Header h;
  auto fields = text::split_csv(line);
  for (std::size_t i = 0; i < fields.size(); ++i) h.columns.emplace(std::string(text::trim(fields[i])), i);
  return h;
}

}  // namespace

ParseReport<TransactionRecord> parse_transactions(std::istream& in) {
  const Header h = read_header(in);
  const std::size_t c_payer = h.require("payer"), c_payee = h.require("payee"),
                    c_date = h.require("date"), c_amount = h.require("amount");
  const auto c_count = h.optional("count");
  const auto c_kind = h.optional("kind");

  ParseReport<TransactionRecord> report;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++report.rows_read;
    auto f = text::split_csv(line);
    auto fail = [&](std::string msg) { report.errors.push_back({line_no, std::move(msg)}); };
    const std::size_t needed = std::max({c_payer, c_payee, c_date, c_amount, c_count.value_or(0), c_kind.value_or(0)});
    if (f.size() <= needed) {
      fail("too few fields");
      continue;
    }
    TransactionRecord r;
    r.payer = std::string(text::trim(f[c_payer]));
    r.payee = std::string(text::trim(f[c_payee]));
    if (r.payer.empty() || r.payee.empty()) {
      fail("empty firm id");
      continue;
    }
    auto date = parse_date(f[c_date]);
    if (!date) {
      fail("malformed date '" + f[c_date] + "'");
      continue;
    }
    r.date = *date;
    auto cents = parse_cents(f[c_amount]);
    if (!cents) {
      fail("malformed amount '" + f[c_amount] + "'");
      continue;
    }
    r.cents = *cents;
    if (c_count) {
      auto n = text::parse_int(f[*c_count]);
      if (!n || *n < 1 || *n > UINT32_MAX) {
        fail("count must be a positive integer");
        continue;
      }
      r.count = static_cast<std::uint32_t>(*n);
    }
    if (c_kind) r.kind = f[*c_kind];
    report.rows.push_back(std::move(r));
  }
  return report;
}

ParseReport<FirmMeta> parse_firms(std::istream& in) {
  const Header h = read_header(in);
  const std::size_t c_id = h.require("id");
  const auto c_status = h.optional("status");
  const auto c_rating = h.optional("rating");
  const auto c_sector = h.optional("sector");

  ParseReport<FirmMeta> report;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    ++report.rows_read;
    auto f = text::split_csv(line);
    auto field = [&](std::optional<std::size_t> c) -> std::string_view {
      return c && *c < f.size() ? text::trim(f[*c]) : std::string_view{};
    };
    if (c_id >= f.size() || text::trim(f[c_id]).empty()) {
      report.errors.push_back({line_no, "missing firm id"});
      continue;
    }
    try {
      FirmMeta m;
      m.id = std::string(text::trim(f[c_id]));
      m.status = parse_status(field(c_status));
      m.rating = parse_rating(field(c_rating));
      if (auto s = field(c_sector); !s.empty()) m.sector = std::string(s);
      report.rows.push_back(std::move(m));
    } catch (const DataError& e) {
      report.errors.push_back({line_no, e.what()});
    }
  }
  return report;
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::daily: return "daily";
    case Granularity::weekly: return "weekly";
    case Granularity::monthly: return "monthly";
  }
  return "monthly";
}

Granularity parse_granularity(std::string_view text) {
  if (text == "daily") return Granularity::daily;
  if (text == "weekly") return Granularity::weekly;
  if (text == "monthly") return Granularity::monthly;
  throw ConfigError("unknown window granularity '" + std::string(text) + "'");
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

TimeWindow window_of(Date d, Granularity g) {
  const std::int64_t days = d.time_since_epoch().count();
  switch (g) {
    case Granularity::daily: return {g, days};
    // 1970-01-01 was a Thursday, so ISO weeks start three days earlier.
    case Granularity::weekly: return {g, floor_div(days + 3, 7)};
    case Granularity::monthly: {
      year_month_day ymd{d};
      return {g, static_cast<std::int64_t>(static_cast<int>(ymd.year())) * 12 +
                     static_cast<unsigned>(ymd.month()) - 1};
    }
  }
  return {g, 0};
}

bool contains(const TimeWindow& w, Date d) { return window_of(d, w.granularity) == w; }

std::string window_label(const TimeWindow& w) {
  char buf[64];
  switch (w.granularity) {
    case Granularity::daily: return format_date(Date{days{w.index}});
    case Granularity::weekly: {
      const Date thursday{days{w.index * 7 - 3 + 3}};
      const year_month_day ymd{thursday};
      const Date jan1{ymd.year() / January / 1};
      const auto week = (thursday - jan1).count() / 7 + 1;
      std::snprintf(buf, sizeof(buf), "%04d-W%02lld", static_cast<int>(ymd.year()),
                    static_cast<long long>(week));
      return buf;
    }
    case Granularity::monthly: {
      std::snprintf(buf, sizeof(buf), "%04lld-%02lld", static_cast<long long>(floor_div(w.index, 12)),
                    static_cast<long long>(w.index - floor_div(w.index, 12) * 12 + 1));
      return buf;
    }
  }
  return "";
}

BuildResult build_network(const std::vector<TransactionRecord>& records,
                          const std::vector<FirmMeta>& firms, std::optional<TimeWindow> window) {
  std::unordered_map<std::string_view, const FirmMeta*> meta;
  meta.reserve(firms.size());
  for (const FirmMeta& f : firms)
    if (!meta.emplace(f.id, &f).second) throw DataError("duplicate firm id '" + f.id + "' in metadata");

  BuildResult out;
  // Exact integer sums keep the result independent of record order.
  struct PairHash {
    std::size_t operator()(const std::pair<std::string_view, std::string_view>& p) const {
      return std::hash<std::string_view>{}(p.first) * 1000003u ^ std::hash<std::string_view>{}(p.second);
    }
  };
  std::unordered_map<std::pair<std::string_view, std::string_view>, std::int64_t, PairHash> pairs;
  std::int64_t self_cents = 0;
  for (const TransactionRecord& r : records) {
    if (window && !contains(*window, r.date)) continue;
    ++out.diagnostics.records_in_window;
    if (r.payer == r.payee) {
      ++out.diagnostics.self_loops_dropped;
      self_cents += r.cents;
      continue;
    }
    if (r.cents == 0) continue;  // zero-amount rows carry no flow
    pairs[{r.payer, r.payee}] += r.cents;
  }
  out.diagnostics.self_loop_volume = static_cast<double>(self_cents) / 100.0;

  std::set<std::string_view> ids;
  for (const auto& [key, cents] : pairs) {
    ids.insert(key.first);
    ids.insert(key.second);
  }
  std::vector<FirmMeta> nodes;
  nodes.reserve(ids.size());
  std::unordered_map<std::string_view, graph::NodeId> index;
  for (std::string_view id : ids) {
    index.emplace(id, static_cast<graph::NodeId>(nodes.size()));
    if (auto it = meta.find(id); it != meta.end()) {
      nodes.push_back(*it->second);
    } else {
      nodes.push_back(FirmMeta{std::string(id), Status::unknown, Rating::NA, std::nullopt});
      ++out.diagnostics.firms_without_metadata;
    }
  }
  std::vector<graph::Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [key, cents] : pairs)
    edges.push_back({index.at(key.first), index.at(key.second), static_cast<double>(cents) / 100.0});
  out.graph = graph::PaymentGraph::from_edges(std::move(nodes), std::move(edges));
  return out;
}

std::vector<TimeWindow> windows_spanned(const std::vector<TransactionRecord>& records, Granularity g) {
  std::set<TimeWindow> seen;
  for (const auto& r : records) seen.insert(window_of(r.date, g));
  return {seen.begin(), seen.end()};
}

ActivitySeries activity_summary(const std::vector<TransactionRecord>& records, Granularity g) {
  ActivitySeries s;
  s.granularity = g;
  if (records.empty()) return s;

  std::int64_t lo = INT64_MAX, hi = INT64_MIN;
  for (const auto& r : records) {
    const auto w = window_of(r.date, g).index;
    lo = std::min(lo, w);
    hi = std::max(hi, w);
  }
  const std::size_t span = static_cast<std::size_t>(hi - lo + 1);
  s.windows.resize(span);
  for (std::size_t i = 0; i < span; ++i) s.windows[i].window = {g, lo + static_cast<std::int64_t>(i)};

  std::vector<std::unordered_set<std::string_view>> nodes(span);
  std::vector<std::set<std::pair<std::string_view, std::string_view>>> edges(span);
  std::vector<std::int64_t> cents(span, 0);
  for (const auto& r : records) {
    const std::size_t w = static_cast<std::size_t>(window_of(r.date, g).index - lo);
    s.windows[w].transactions += r.count;
    if (r.payer == r.payee) continue;
    cents[w] += r.cents;
    nodes[w].insert(r.payer);
    nodes[w].insert(r.payee);
    edges[w].insert({r.payer, r.payee});
  }
  std::unordered_map<std::string_view, std::uint32_t> node_windows;
  std::map<std::pair<std::string_view, std::string_view>, std::uint32_t> edge_windows;
  for (std::size_t w = 0; w < span; ++w) {
    s.windows[w].nodes = nodes[w].size();
    s.windows[w].edges = edges[w].size();
    s.windows[w].volume = static_cast<double>(cents[w]) / 100.0;
    for (auto id : nodes[w]) ++node_windows[id];
    for (const auto& e : edges[w]) ++edge_windows[e];
  }
  for (const auto& [id, k] : node_windows) ++s.node_persistence[k];
  for (const auto& [e, k] : edge_windows) ++s.edge_persistence[k];
  return s;
}

}  // namespace paynet::ingest
