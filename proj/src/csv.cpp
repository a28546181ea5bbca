#include "minpred/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "minpred/errors.hpp"

namespace minpred {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

double parse_number(const std::string& cell, std::size_t line_number) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("csv: non-numeric cell '" + cell + "' at line " +
                    std::to_string(line_number));
  }
  return value;
}

long parse_segment_id(const std::string& cell, std::size_t line_number) {
  long value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("csv: non-integer segment id '" + cell + "' at line " +
                    std::to_string(line_number));
  }
  return value;
}

}  // namespace

TimeSeriesBundle load_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw DataError("csv: cannot open " + path);

  std::string line;
  if (!std::getline(file, line) || line.empty()) {
    throw DataError("csv: empty file " + path);
  }
  std::vector<std::string> header = split_line(line);
  std::size_t first_data_column = 0;
  const bool has_segment_column = !header.empty() && header[0] == "segment";
  if (has_segment_column) first_data_column = 1;
  if (header.size() <= first_data_column) {
    throw DataError("csv: header has no series columns");
  }

  // Group columns into series: plain names give M=1; name.0, name.1, ...
  // give one multi-dimensional series. Dimensions of one series must be
  // adjacent, start at .0 and count up.
  struct SeriesSpec {
    std::string name;
    std::size_t dims = 0;
  };
  std::vector<SeriesSpec> series;
  for (std::size_t c = first_data_column; c < header.size(); ++c) {
    const std::string& column = header[c];
    if (column.empty()) {
      throw DataError("csv: empty column name at position " +
                      std::to_string(c + 1));
    }
    const auto dot = column.rfind('.');
    std::string base = column;
    long dim = -1;
    if (dot != std::string::npos && dot + 1 < column.size()) {
      const std::string suffix = column.substr(dot + 1);
      bool numeric = !suffix.empty();
      for (char ch : suffix) numeric = numeric && ch >= '0' && ch <= '9';
      if (numeric) {
        base = column.substr(0, dot);
        dim = std::stol(suffix);
      }
    }
    if (dim < 0) {
      series.push_back({column, 1});
    } else if (!series.empty() && series.back().name == base &&
               static_cast<long>(series.back().dims) == dim) {
      series.back().dims += 1;
    } else if (dim == 0) {
      series.push_back({base, 1});
    } else {
      throw DataError("csv: dimension suffix of column '" + column +
                      "' does not continue a series (expected " + base +
                      "." + std::to_string(series.empty() ? 0
                                                          : series.back().dims) +
                      ")");
    }
  }
  for (std::size_t a = 0; a < series.size(); ++a) {
    for (std::size_t b = a + 1; b < series.size(); ++b) {
      if (series[a].name == series[b].name) {
        throw DataError("csv: duplicate series name '" + series[a].name + "'");
      }
    }
  }
  const std::size_t M = series.front().dims;
  for (const auto& s : series) {
    if (s.dims != M) {
      throw DataError("csv: series '" + s.name + "' has " +
                      std::to_string(s.dims) + " dimensions, expected " +
                      std::to_string(M) + " (all series must agree)");
    }
  }
  const std::size_t N = series.size();

  // Rows, grouped into segments by the optional id column.
  std::vector<std::vector<double>> rows;  // row-major data cells
  std::vector<long> segment_ids;
  std::size_t line_number = 1;
  while (std::getline(file, line)) {
    ++line_number;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("csv: line " + std::to_string(line_number) + " has " +
                      std::to_string(cells.size()) + " cells, header has " +
                      std::to_string(header.size()));
    }
    segment_ids.push_back(
        has_segment_column ? parse_segment_id(cells[0], line_number) : 0);
    std::vector<double> row(header.size() - first_data_column);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = parse_number(cells[first_data_column + c], line_number);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("csv: no data rows in " + path);

  TimeSeriesBundle bundle;
  bundle.n_series = N;
  bundle.M = M;
  for (const auto& s : series) bundle.names.push_back(s.name);
  bundle.generator = "csv:" + path;

  std::size_t begin = 0;
  for (std::size_t r = 1; r <= rows.size(); ++r) {
    if (r == rows.size() || segment_ids[r] != segment_ids[begin]) {
      TimeSeriesBundle::Segment seg;
      seg.length = r - begin;
      seg.values.assign(N * seg.length * M, 0.0);
      for (std::size_t t = 0; t < seg.length; ++t) {
        const auto& row = rows[begin + t];
        for (std::size_t j = 0; j < N; ++j) {
          for (std::size_t m = 0; m < M; ++m) {
            seg.at(j, t, m, M) = row[j * M + m];
          }
        }
      }
      bundle.segments.push_back(std::move(seg));
      begin = r;
    }
  }
  bundle.validate();
  return bundle;
}

void save_csv(const TimeSeriesBundle& bundle, const std::string& path) {
  bundle.validate();
  std::ofstream file(path);
  if (!file) throw DataError("csv: cannot write " + path);

  const bool multi_segment = bundle.segments.size() > 1;
  std::ostringstream header;
  if (multi_segment) header << "segment";
  for (std::size_t j = 0; j < bundle.n_series; ++j) {
    for (std::size_t m = 0; m < bundle.M; ++m) {
      if (header.tellp() > 0) header << ',';
      header << bundle.names[j];
      if (bundle.M > 1) header << '.' << m;
    }
  }
  file << header.str() << '\n';

  char buffer[64];
  for (std::size_t s = 0; s < bundle.segments.size(); ++s) {
    const auto& seg = bundle.segments[s];
    for (std::size_t t = 0; t < seg.length; ++t) {
      bool first = true;
      if (multi_segment) {
        file << s;
        first = false;
      }
      for (std::size_t j = 0; j < bundle.n_series; ++j) {
        for (std::size_t m = 0; m < bundle.M; ++m) {
          if (!first) file << ',';
          first = false;
          std::snprintf(buffer, sizeof(buffer), "%.17g",
                        seg.at(j, t, m, bundle.M));
          file << buffer;
        }
      }
      file << '\n';
    }
  }
  if (!file) throw DataError("csv: write failed for " + path);
}

}  // namespace minpred
