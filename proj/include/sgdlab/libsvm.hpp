#pragma once

#include "sgdlab/dataset.hpp"

#include <zlib.h>

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace sgdlab {

struct ParseOptions {
  /// Explicit raw-label -> {-1,+1} mapping. Without it, labels already in
  /// {-1,+1} pass through and {0,1} maps 0 -> -1; any other label set is
  /// rejected.
  std::optional<std::map<double, double>> label_map;
  /// Force the dimension upward (e.g. to share d with a held-out split).
  std::optional<int32_t> dimension_override;
  /// Divide each feature column by its max absolute value. Off by default;
  /// raw LIBSVM values are the convention.
  bool max_abs_scale = false;
};

namespace detail {

inline bool parse_double_token(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end == tok.c_str() + tok.size();
}

inline bool parse_index_token(const std::string& tok, long& out) {
  if (tok.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtol(tok.c_str(), &end, 10);
  return errno == 0 && end == tok.c_str() + tok.size();
}

inline void apply_label_rule(Dataset& data, const ParseOptions& opts) {
  std::set<double> raw;
  for (const auto& ex : data.examples) raw.insert(ex.label);

  std::map<double, double> map;
  if (opts.label_map) {
    map = *opts.label_map;
    for (double r : raw) {
      if (!map.count(r))
        throw ParseError("label " + format_double(r) + " not covered by the supplied label map");
    }
    for (const auto& [from, to] : map) {
      if (to != 1.0 && to != -1.0)
        throw ParseError("label map must target {-1,+1}");
    }
  } else {
    bool pm_one = true, zero_one = true;
    for (double r : raw) {
      if (r != 1.0 && r != -1.0) pm_one = false;
      if (r != 0.0 && r != 1.0) zero_one = false;
    }
    if (pm_one) return;
    if (zero_one) {
      map = {{0.0, -1.0}, {1.0, 1.0}};
    } else {
      std::string seen;
      for (double r : raw) seen += " " + format_double(r);
      throw ParseError("label set {" + seen + " } needs an explicit label map");
    }
  }
  for (auto& ex : data.examples) ex.label = map.at(ex.label);
}

inline void max_abs_scale(Dataset& data) {
  std::vector<double> col_max(static_cast<size_t>(data.dimension), 0.0);
  for (const auto& ex : data.examples)
    for (const auto& [idx, val] : ex.features)
      col_max[idx] = std::max(col_max[idx], std::fabs(val));
  for (auto& ex : data.examples)
    for (auto& [idx, val] : ex.features)
      if (col_max[idx] > 0) val /= col_max[idx];
}

}  // namespace detail

/// Parse LIBSVM text: `<label> <idx>:<val> ...` per line, 1-based strictly
/// increasing indices. Dimension is the max index seen unless overridden
/// upward. Malformed input reports the offending line number.
inline Dataset parse_libsvm(std::istream& in, const ParseOptions& opts = {}) {
  Dataset data;
  std::string line;
  long line_no = 0;
  int32_t max_index = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) continue;  // blank line

    SparseExample ex;
    if (!detail::parse_double_token(tok, ex.label) || !std::isfinite(ex.label))
      throw ParseError("bad label token '" + tok + "'", line_no);

    long prev_idx = 0;
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError("bad feature token '" + tok + "'", line_no);
      long idx;
      double val;
      if (!detail::parse_index_token(tok.substr(0, colon), idx) || idx < 1 ||
          idx > 0x7fffffffL)
        throw ParseError("bad feature index in '" + tok + "'", line_no);
      if (!detail::parse_double_token(tok.substr(colon + 1), val) || !std::isfinite(val))
        throw ParseError("bad feature value in '" + tok + "'", line_no);
      if (idx <= prev_idx)
        throw ParseError("duplicate or non-increasing feature index " + std::to_string(idx),
                         line_no);
      prev_idx = idx;
      if (idx > max_index) max_index = static_cast<int32_t>(idx);
      ex.features.emplace_back(static_cast<int32_t>(idx - 1), val);
    }
    data.examples.push_back(std::move(ex));
  }

  if (data.examples.empty()) throw ParseError("empty input");

  data.dimension = max_index;
  if (opts.dimension_override) {
    if (*opts.dimension_override < max_index)
      throw ParseError("dimension override " + std::to_string(*opts.dimension_override) +
                       " below max feature index " + std::to_string(max_index));
    data.dimension = *opts.dimension_override;
  }
  if (data.dimension == 0) data.dimension = 1;  // all-empty feature lists

  detail::apply_label_rule(data, opts);
  if (opts.max_abs_scale) detail::max_abs_scale(data);
  data.validate();
  return data;
}

inline Dataset parse_libsvm(const std::string& text, const ParseOptions& opts = {}) {
  std::istringstream in(text);
  return parse_libsvm(in, opts);
}

namespace detail {

inline std::string read_gzip(const std::string& path) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw ParseError("cannot open gzip file " + path);
  std::string out;
  char buf[1 << 16];
  int got;
  while ((got = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<size_t>(got));
  const bool failed = got < 0;
  gzclose(f);
  if (failed) throw ParseError("gzip read error in " + path);
  return out;
}

}  // namespace detail

/// Load a LIBSVM file; transparently inflates when the name ends in ".gz".
inline Dataset load_libsvm_file(const std::string& path, const ParseOptions& opts = {}) {
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    return parse_libsvm(detail::read_gzip(path), opts);
  }
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse_libsvm(in, opts);
}

}  // namespace sgdlab
