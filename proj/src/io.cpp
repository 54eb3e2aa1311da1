#include "mfvol/io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "mfvol/error.hpp"

namespace mfvol {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '"' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_int(std::string_view s, long long& out) {
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_number(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool is_missing(std::string_view s) {
  return s.empty() || s == "null" || s == "NA" || s == "N/A" || s == "nan" || s == "NaN" ||
         s == "." || s == "-";
}

// Three integer fields separated by `sep`.
bool parse_triplet(std::string_view s, char sep, long long& a, long long& b, long long& c) {
  const auto p1 = s.find(sep);
  if (p1 == std::string_view::npos) return false;
  const auto p2 = s.find(sep, p1 + 1);
  if (p2 == std::string_view::npos) return false;
  return parse_int(s.substr(0, p1), a) && parse_int(s.substr(p1 + 1, p2 - p1 - 1), b) &&
         parse_int(s.substr(p2 + 1), c);
}

bool parse_stamp(std::string_view s, DateFormat fmt, std::int64_t& out) {
  long long y = 0, m = 0, d = 0;
  switch (fmt) {
    case DateFormat::index: {
      long long v = 0;
      if (!parse_int(s, v)) return false;
      out = v;
      return true;
    }
    case DateFormat::iso:
      if (!parse_triplet(s, '-', y, m, d)) return false;
      break;
    case DateFormat::ymd_slash:
      if (!parse_triplet(s, '/', y, m, d)) return false;
      break;
    case DateFormat::mdy_slash:
      if (!parse_triplet(s, '/', m, d, y)) return false;
      break;
    case DateFormat::dmy_slash:
      if (!parse_triplet(s, '/', d, m, y)) return false;
      break;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)},
                                        std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return false;
  out = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return true;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  return in;
}

double field_number(std::string_view s, const std::filesystem::path& path, std::size_t line) {
  double v = 0.0;
  if (!parse_number(s, v)) {
    throw DataError(path.string() + ":" + std::to_string(line) + ": bad number '" +
                    std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(DateFormat f) {
  switch (f) {
    case DateFormat::iso: return "iso";
    case DateFormat::ymd_slash: return "ymd-slash";
    case DateFormat::mdy_slash: return "mdy-slash";
    case DateFormat::dmy_slash: return "dmy-slash";
    case DateFormat::index: return "index";
  }
  return "iso";
}

DateFormat parse_date_format(std::string_view name) {
  for (auto f : {DateFormat::iso, DateFormat::ymd_slash, DateFormat::mdy_slash,
                 DateFormat::dmy_slash, DateFormat::index}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown date format '" + std::string(name) + "'");
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LoadedPrices parse_csv(std::istream& in, const MarketCsvSchema& schema, std::string_view source) {
  const std::string src(source);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string_view> fields;

  // Header: first non-empty line.
  std::ptrdiff_t date_idx = -1, price_idx = -1;
  std::size_t header_width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    fields = split(line, schema.delimiter);
    header_width = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (fields[i] == schema.date_column) date_idx = static_cast<std::ptrdiff_t>(i);
      if (fields[i] == schema.price_column) price_idx = static_cast<std::ptrdiff_t>(i);
    }
    break;
  }
  if (header_width == 0) throw DataError(src + ": empty file, no header row");
  if (date_idx < 0 || price_idx < 0) {
    throw DataError(src + ":" + std::to_string(line_no) + ": header lacks column '" +
                    (date_idx < 0 ? schema.date_column : schema.price_column) + "'");
  }

  struct Row {
    std::int64_t stamp;
    double price;
    std::size_t line;
  };
  std::vector<Row> rows;
  std::size_t skipped = 0;
  const auto need = static_cast<std::size_t>(std::max(date_idx, price_idx));
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    fields = split(line, schema.delimiter);
    if (fields.size() <= need) {
      throw DataError(src + ":" + std::to_string(line_no) + ": expected at least " +
                      std::to_string(need + 1) + " fields");
    }
    std::int64_t stamp = 0;
    const auto date_text = fields[static_cast<std::size_t>(date_idx)];
    if (!parse_stamp(date_text, schema.date_format, stamp)) {
      throw DataError(src + ":" + std::to_string(line_no) + ": bad date '" +
                      std::string(date_text) + "' for format " +
                      std::string(to_string(schema.date_format)));
    }
    const auto price_text = fields[static_cast<std::size_t>(price_idx)];
    if (is_missing(price_text)) {
      ++skipped;
      continue;
    }
    double price = 0.0;
    if (!parse_number(price_text, price) || std::isnan(price)) {
      throw DataError(src + ":" + std::to_string(line_no) + ": bad price '" +
                      std::string(price_text) + "'");
    }
    if (!(price > 0.0) || !std::isfinite(price)) {
      ++skipped;
      continue;
    }
    rows.push_back({stamp, price, line_no});
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.stamp < b.stamp; });
  const TimeAxis axis =
      schema.date_format == DateFormat::index ? TimeAxis::steps : TimeAxis::calendar_days;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].stamp == rows[i - 1].stamp) {
      throw DataError(src + ":" + std::to_string(rows[i].line) + ": duplicate date " +
                      format_stamp(rows[i].stamp, axis));
    }
  }
  if (rows.size() < 2) {
    throw DataError(src + ": fewer than 2 usable price rows");
  }
  std::vector<double> prices;
  std::vector<std::int64_t> stamps;
  prices.reserve(rows.size());
  stamps.reserve(rows.size());
  for (const auto& r : rows) {
    prices.push_back(r.price);
    stamps.push_back(r.stamp);
  }
  return {PriceSeries(std::move(prices), std::move(stamps), axis), skipped};
}

LoadedPrices load_csv(const std::filesystem::path& path, const MarketCsvSchema& schema) {
  auto in = open_in(path);
  return parse_csv(in, schema, path.string());
}

void write_decomposition(const std::filesystem::path& path, const Decomposition& d) {
  auto out = open_out(path);
  out << "# mu=" << format_double(d.mu) << '\n';
  out << "step,dlnS,sigma,dW,dln_sigma\n";
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << i << ',' << format_double(d.dlns[i]) << ',' << format_double(d.sigma[i]) << ','
        << format_double(d.dw[i]) << ',';
    if (i < d.dln_sigma.size()) out << format_double(d.dln_sigma[i]);
    out << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

Decomposition read_decomposition(const std::filesystem::path& path) {
  auto in = open_in(path);
  Decomposition d;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.starts_with("#")) {
      const auto pos = t.find("mu=");
      if (pos != std::string_view::npos) d.mu = field_number(trim(t.substr(pos + 3)), path, line_no);
      continue;
    }
    if (!header_seen) {
      if (t != "step,dlnS,sigma,dW,dln_sigma") {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": not a decomposition file (expected header "
                        "step,dlnS,sigma,dW,dln_sigma)");
      }
      header_seen = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 5) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
    }
    d.dlns.push_back(field_number(f[1], path, line_no));
    d.sigma.push_back(field_number(f[2], path, line_no));
    d.dw.push_back(field_number(f[3], path, line_no));
    if (!f[4].empty()) d.dln_sigma.push_back(field_number(f[4], path, line_no));
  }
  if (!header_seen || d.sigma.empty()) {
    throw DataError(path.string() + ": no decomposition rows");
  }
  d.validate();
  return d;
}

void write_returns(const std::filesystem::path& path, std::span<const double> values) {
  auto out = open_out(path);
  out << "step,dlnS\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << i << ',' << format_double(values[i]) << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

ReturnSeries read_returns(const std::filesystem::path& path) {
  auto in = open_in(path);
  ReturnSeries r;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t.starts_with("#")) continue;
    if (!header_seen) {
      if (t != "step,dlnS") {
        throw DataError(path.string() + ":" + std::to_string(line_no) +
                        ": not a returns file (expected header step,dlnS)");
      }
      header_seen = true;
      continue;
    }
    const auto f = split(t, ',');
    if (f.size() != 2) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 2 fields");
    }
    r.values.push_back(field_number(f[1], path, line_no));
  }
  if (r.values.size() < 2) throw DataError(path.string() + ": fewer than 2 returns");
  return r;
}

void write_plot(const std::filesystem::path& path, std::span<const Column> columns) {
  auto out = open_out(path);
  out << '#';
  std::size_t rows = 0;
  for (const auto& c : columns) {
    out << ' ' << c.name;
    rows = std::max(rows, c.values.size());
  }
  out << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k > 0) out << ' ';
      const auto& v = columns[k].values;
      out << (i < v.size() ? format_double(v[i]) : std::string("nan"));
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace mfvol
