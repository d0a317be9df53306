#pragma once

// Geo-EAS / GSLIB ASCII grids and "row,col,facies" point files.
//
// Grid layout:
//   line 1   title; the first two consecutive positive-integer tokens are nx (columns) and ny (rows)
//   line 2   number of variables V
//   V lines  variable names
//   rest     whitespace-separated values, V per cell, cells in row-major order from the top row
//
// Only the first variable is read. LF and CRLF are accepted; LF is emitted.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "facies_qc/error.hpp"
#include "facies_qc/grid.hpp"

namespace facies_qc {

struct GslibReadOptions {
  /// Overrides dimensions found in the title line.
  std::optional<GridShape> dims;
  /// Categorical only. Defaults to max(2, largest code + 1).
  std::optional<std::size_t> alphabet_size;
};

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

template <typename T>
std::optional<T> parse_integer(std::string_view tok) {
  T value{};
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

inline std::optional<double> parse_double(std::string_view tok) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) return std::nullopt;
  return value;
}

struct RawGslib {
  GridShape shape;
  std::vector<std::string_view> values;  // first variable only
};

inline RawGslib read_gslib_tokens(std::string_view text, const std::optional<GridShape>& dims) {
  auto lines = split_lines(text);
  if (lines.size() < 2) throw parse_error("gslib: missing header lines");

  RawGslib raw;
  if (dims) {
    raw.shape = *dims;
  } else {
    auto title = split_ws(lines[0]);
    bool found = false;
    for (std::size_t i = 0; i + 1 < title.size(); ++i) {
      auto nx = parse_integer<std::size_t>(title[i]);
      auto ny = parse_integer<std::size_t>(title[i + 1]);
      if (nx && ny && *nx > 0 && *ny > 0) {
        raw.shape = GridShape{*ny, *nx};
        found = true;
        break;
      }
    }
    if (!found) throw parse_error("gslib: title line carries no \"nx ny\" dimensions");
  }
  if (raw.shape.n_rows < 1 || raw.shape.n_cols < 1) throw parse_error("gslib: dimensions must be positive");

  auto count_tokens = split_ws(lines[1]);
  std::optional<std::size_t> n_vars;
  if (!count_tokens.empty()) n_vars = parse_integer<std::size_t>(count_tokens[0]);
  if (!n_vars || *n_vars < 1) throw parse_error("gslib: second line must hold the variable count");
  if (lines.size() < 2 + *n_vars) throw parse_error("gslib: missing variable name lines");

  std::vector<std::string_view> tokens;
  for (std::size_t i = 2 + *n_vars; i < lines.size(); ++i) {
    for (auto t : split_ws(lines[i])) tokens.push_back(t);
  }
  const std::size_t expected = raw.shape.size() * *n_vars;
  if (tokens.size() != expected) {
    throw parse_error("gslib: value count mismatch: expected " + std::to_string(expected) + " for " +
                      to_string(raw.shape) + ", got " + std::to_string(tokens.size()));
  }
  raw.values.reserve(raw.shape.size());
  for (std::size_t i = 0; i < tokens.size(); i += *n_vars) raw.values.push_back(tokens[i]);
  return raw;
}

inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace detail

inline CategoricalGrid parse_gslib_categorical(std::string_view text, const GslibReadOptions& opts = {}) {
  auto raw = detail::read_gslib_tokens(text, opts.dims);
  std::vector<FaciesCode> cells;
  cells.reserve(raw.values.size());
  std::size_t max_code = 0;
  for (auto tok : raw.values) {
    std::optional<long long> code = detail::parse_integer<long long>(tok);
    if (!code) {
      // Accept integral decimals such as "1.000".
      auto d = detail::parse_double(tok);
      if (d && std::isfinite(*d) && *d == std::floor(*d) && std::fabs(*d) < 1e9) {
        code = static_cast<long long>(*d);
      }
    }
    if (!code) throw parse_error("gslib: non-integer value \"" + std::string(tok) + "\" in categorical grid");
    if (*code < 0 || *code > 255) {
      throw parse_error("gslib: facies code " + std::to_string(*code) + " outside [0, 255]");
    }
    cells.push_back(static_cast<FaciesCode>(*code));
    max_code = std::max<std::size_t>(max_code, static_cast<std::size_t>(*code));
  }
  std::size_t alphabet = opts.alphabet_size.value_or(std::max<std::size_t>(2, max_code + 1));
  if (max_code >= alphabet) {
    throw parse_error("gslib: facies code " + std::to_string(max_code) + " not in alphabet of size " +
                      std::to_string(alphabet));
  }
  return CategoricalGrid(raw.shape, std::move(cells), alphabet);
}

inline RealGrid parse_gslib_real(std::string_view text, const GslibReadOptions& opts = {}) {
  auto raw = detail::read_gslib_tokens(text, opts.dims);
  std::vector<double> cells;
  cells.reserve(raw.values.size());
  for (auto tok : raw.values) {
    auto v = detail::parse_double(tok);
    if (!v) throw parse_error("gslib: unparseable value \"" + std::string(tok) + "\"");
    if (!std::isfinite(*v)) throw parse_error("gslib: non-finite value \"" + std::string(tok) + "\"");
    cells.push_back(*v);
  }
  return RealGrid(raw.shape, std::move(cells));
}

inline std::string write_gslib_grid(const CategoricalGrid& g) {
  std::string out = std::to_string(g.n_cols()) + " " + std::to_string(g.n_rows()) + " 1\n1\nfacies\n";
  out.reserve(out.size() + g.size() * 2);
  for (FaciesCode c : g.cells()) {
    out += std::to_string(static_cast<unsigned>(c));
    out += '\n';
  }
  return out;
}

/// Values carry 17 significant digits so the text round-trips bit-exactly.
inline std::string write_gslib_grid(const RealGrid& g) {
  std::string out = std::to_string(g.n_cols()) + " " + std::to_string(g.n_rows()) + " 1\n1\nvalue\n";
  for (double v : g.cells()) {
    out += detail::format_double(v);
    out += '\n';
  }
  return out;
}

inline ConditioningSet parse_points_csv(std::string_view text, GridShape bounds) {
  auto lines = detail::split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  if (i == lines.size()) throw parse_error("points csv: missing header \"row,col,facies\"");
  {
    std::string header;
    for (char c : lines[i]) {
      if (!detail::is_space(c)) header += c;
    }
    if (!header.empty() && static_cast<unsigned char>(header[0]) == 0xEF && header.size() >= 3) {
      header.erase(0, 3);  // UTF-8 BOM
    }
    if (header != "row,col,facies") {
      throw parse_error("points csv: expected header \"row,col,facies\", got \"" + std::string(lines[i]) + "\"");
    }
  }
  std::vector<ConditioningPoint> points;
  for (++i; i < lines.size(); ++i) {
    auto line = detail::trim(lines[i]);
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      fields.push_back(detail::trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const std::string where = "points csv line " + std::to_string(i + 1);
    if (fields.size() != 3) throw parse_error(where + ": expected 3 fields");
    auto row = detail::parse_integer<std::size_t>(fields[0]);
    auto col = detail::parse_integer<std::size_t>(fields[1]);
    auto val = detail::parse_integer<unsigned>(fields[2]);
    if (!row || !col || !val || *val > 255) throw parse_error(where + ": unparseable field");
    points.push_back({*row, *col, static_cast<FaciesCode>(*val)});
  }
  try {
    return ConditioningSet(std::move(points), bounds);
  } catch (const invalid_argument& e) {
    throw parse_error(std::string("points csv: ") + e.what());
  }
}

inline std::string write_points_csv(const ConditioningSet& data) {
  std::string out = "row,col,facies\n";
  for (const auto& p : data.points()) {
    out += std::to_string(p.row) + "," + std::to_string(p.col) + "," + std::to_string(static_cast<unsigned>(p.value)) + "\n";
  }
  return out;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw error("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw error("failed writing " + path.string());
}

}  // namespace facies_qc
