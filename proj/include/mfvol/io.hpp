#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mfvol/decomposition.hpp"
#include "mfvol/series.hpp"

namespace mfvol {

enum class DateFormat {
  iso,        // 2012-06-13
  ymd_slash,  // 2012/06/13
  mdy_slash,  // 06/13/2012
  dmy_slash,  // 13/06/2012
  index,      // plain integer step
};

std::string_view to_string(DateFormat f);
DateFormat parse_date_format(std::string_view name);

struct MarketCsvSchema {
  std::string date_column = "date";
  std::string price_column = "open";
  char delimiter = ',';
  DateFormat date_format = DateFormat::iso;
};

struct LoadedPrices {
  PriceSeries series;
  // Rows dropped for a missing or non-positive price.
  std::size_t skipped_rows = 0;
};

// Rows are sorted by date. Blank, "null", "NA" or non-positive prices are
// skipped and counted; unparseable fields throw DataError with the line
// number, as do duplicate dates and fewer than 2 usable rows.
LoadedPrices load_csv(const std::filesystem::path& path, const MarketCsvSchema& schema);
LoadedPrices parse_csv(std::istream& in, const MarketCsvSchema& schema,
                       std::string_view source = "<stream>");

// step,dlnS,sigma,dW,dln_sigma with 17 significant digits; mu on a leading
// "# mu=" comment line. The last row leaves dln_sigma empty.
void write_decomposition(const std::filesystem::path& path, const Decomposition& d);
Decomposition read_decomposition(const std::filesystem::path& path);

// step,dlnS.
void write_returns(const std::filesystem::path& path, std::span<const double> values);
ReturnSeries read_returns(const std::filesystem::path& path);

struct Column {
  std::string name;
  std::span<const double> values;
};

// Whitespace-separated plot file with a "# name name ..." header.
void write_plot(const std::filesystem::path& path, std::span<const Column> columns);

std::string format_double(double v);

}  // namespace mfvol
