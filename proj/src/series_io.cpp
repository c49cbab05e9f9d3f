#include "dirichlet2d/series_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dirichlet2d {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_header(std::ostream& out, const SeriesFileHeader& header) {
  out << "# mode " << (header.exact ? "exact" : "float") << "\n";
  if (header.p) out << "# p " << format_double(*header.p) << "\n";
  if (header.weight_spec) out << "# weight " << *header.weight_spec << "\n";
}

}  // namespace

LoadedSeries parse_series(std::istream& in, const std::string& source_name) {
  SeriesFileHeader header;
  std::vector<std::tuple<std::size_t, std::uint64_t, std::uint64_t, std::string, std::string>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string key;
      hs >> key;
      if (key == "mode") {
        std::string mode;
        hs >> mode;
        if (mode == "exact")
          header.exact = true;
        else if (mode == "float")
          header.exact = false;
        else
          throw SeriesParseError(source_name, lineno, "mode must be 'exact' or 'float'");
      } else if (key == "p") {
        double p;
        if (!(hs >> p)) throw SeriesParseError(source_name, lineno, "malformed p header");
        header.p = p;
      } else if (key == "weight") {
        std::string spec;
        std::getline(hs, spec);
        std::size_t start = spec.find_first_not_of(" \t");
        if (start == std::string::npos)
          throw SeriesParseError(source_name, lineno, "empty weight header");
        header.weight_spec = spec.substr(start);
      }
      continue;
    }
    std::istringstream ls(line);
    std::uint64_t m, n;
    std::string re, im;
    if (!(ls >> m >> n >> re))
      throw SeriesParseError(source_name, lineno, "expected 'm n re [im]'");
    ls >> im;
    if (m == 0 || n == 0)
      throw SeriesParseError(source_name, lineno, "indices must be >= 1");
    rows.emplace_back(lineno, m, n, re, im);
  }

  LoadedSeries loaded;
  loaded.header = header;
  if (header.exact) {
    SeriesQ table;
    for (const auto& [ln, m, n, re, im] : rows) {
      try {
        RatC value(rat_from_string(re), im.empty() ? Rat(0) : rat_from_string(im));
        if (table.find({m, n}))
          throw std::domain_error("duplicate index " + index2_to_string({m, n}));
        table.set(m, n, std::move(value));
      } catch (const std::domain_error& e) {
        throw SeriesParseError(source_name, ln, e.what());
      }
    }
    loaded.table = std::move(table);
  } else {
    SeriesD table;
    for (const auto& [ln, m, n, re, im] : rows) {
      char* end = nullptr;
      double r = std::strtod(re.c_str(), &end);
      if (end == re.c_str() || *end != '\0' || !std::isfinite(r))
        throw SeriesParseError(source_name, ln, "malformed coefficient '" + re + "'");
      double i = 0.0;
      if (!im.empty()) {
        i = std::strtod(im.c_str(), &end);
        if (end == im.c_str() || *end != '\0' || !std::isfinite(i))
          throw SeriesParseError(source_name, ln, "malformed coefficient '" + im + "'");
      }
      if (table.find({m, n}))
        throw SeriesParseError(source_name, ln, "duplicate index " + index2_to_string({m, n}));
      table.set(m, n, Cpx{r, i});
    }
    loaded.table = std::move(table);
  }
  return loaded;
}

LoadedSeries read_series_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open series file: " + path);
  return parse_series(in, path);
}

void write_series(std::ostream& out, const SeriesQ& a, const SeriesFileHeader& header) {
  SeriesFileHeader h = header;
  h.exact = true;
  write_header(out, h);
  for (const auto& [idx, v] : a.entries()) {
    out << idx.m << " " << idx.n << " " << rat_to_string(v.re);
    if (sgn(v.im) != 0) out << " " << rat_to_string(v.im);
    out << "\n";
  }
}

void write_series(std::ostream& out, const SeriesD& a, const SeriesFileHeader& header) {
  SeriesFileHeader h = header;
  h.exact = false;
  write_header(out, h);
  for (const auto& [idx, v] : a.entries()) {
    out << idx.m << " " << idx.n << " " << format_double(v.real());
    if (v.imag() != 0.0) out << " " << format_double(v.imag());
    out << "\n";
  }
}

void write_series_file(const std::string& path, const LoadedSeries& loaded) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write series file: " + path);
  if (loaded.header.exact)
    write_series(out, loaded.exact_table(), loaded.header);
  else
    write_series(out, loaded.float_table(), loaded.header);
}

}  // namespace dirichlet2d
