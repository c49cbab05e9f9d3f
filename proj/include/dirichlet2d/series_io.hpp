#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "dirichlet2d/series.hpp"

namespace dirichlet2d {

struct SeriesParseError : std::runtime_error {
  SeriesParseError(const std::string& source, std::size_t line, const std::string& msg)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_number(line) {}
  std::size_t line_number;
};

/// Text format, one coefficient per line:
///   # mode exact|float
///   # p <value>
///   # weight <spec>
///   m n re [im]
/// Exact mode uses rational literals ("-1/2"); float mode uses decimals.
/// Exact files round-trip bit-exactly.
struct SeriesFileHeader {
  bool exact = false;
  std::optional<double> p;
  std::optional<std::string> weight_spec;
};

struct LoadedSeries {
  SeriesFileHeader header;
  std::variant<SeriesQ, SeriesD> table;

  bool exact() const { return header.exact; }
  const SeriesQ& exact_table() const { return std::get<SeriesQ>(table); }
  const SeriesD& float_table() const { return std::get<SeriesD>(table); }
  SeriesD as_float() const {
    return header.exact ? to_float(std::get<SeriesQ>(table)) : std::get<SeriesD>(table);
  }
};

LoadedSeries parse_series(std::istream& in, const std::string& source_name);
LoadedSeries read_series_file(const std::string& path);

void write_series(std::ostream& out, const SeriesQ& a, const SeriesFileHeader& header);
void write_series(std::ostream& out, const SeriesD& a, const SeriesFileHeader& header);
void write_series_file(const std::string& path, const LoadedSeries& loaded);

}  // namespace dirichlet2d
