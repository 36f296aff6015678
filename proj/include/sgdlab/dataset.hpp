#pragma once

#include "sgdlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace sgdlab {

/// One labeled sparse sample. Feature indices are 0-based internally and
/// strictly increasing; on disk (LIBSVM) they are 1-based.
struct SparseExample {
  double label = 0.0;
  std::vector<std::pair<int32_t, double>> features;

  double dot(const Vector& w) const {
    double s = 0.0;
    for (const auto& [idx, val] : features) s += val * w[idx];
    return s;
  }

  /// out += scale * x
  void add_scaled_to(double scale, Vector& out) const {
    for (const auto& [idx, val] : features) out[idx] += scale * val;
  }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [idx, val] : features) s += val * val;
    return s;
  }

  bool operator==(const SparseExample& other) const = default;
};

struct Dataset {
  std::vector<SparseExample> examples;
  int32_t dimension = 0;

  size_t n() const { return examples.size(); }

  void validate() const {
    if (examples.empty()) throw PreconditionError("Dataset: n must be >= 1");
    if (dimension <= 0) throw PreconditionError("Dataset: dimension must be positive");
    for (size_t i = 0; i < examples.size(); ++i) {
      const auto& ex = examples[i];
      if (!std::isfinite(ex.label)) throw PreconditionError("Dataset: non-finite label");
      int32_t prev = -1;
      for (const auto& [idx, val] : ex.features) {
        if (idx <= prev)
          throw PreconditionError("Dataset: feature indices must be strictly increasing (example " +
                                  std::to_string(i) + ")");
        if (idx >= dimension)
          throw PreconditionError("Dataset: feature index exceeds dimension (example " +
                                  std::to_string(i) + ")");
        if (!std::isfinite(val)) throw PreconditionError("Dataset: non-finite feature value");
        prev = idx;
      }
    }
  }

  double max_squared_norm() const {
    double m = 0.0;
    for (const auto& ex : examples) m = std::max(m, ex.squared_norm());
    return m;
  }

  bool operator==(const Dataset& other) const = default;
};

/// LIBSVM text form; indices written 1-based, values at full precision so a
/// parse round-trip is exact.
inline std::string write_libsvm(const Dataset& data) {
  std::ostringstream out;
  for (const auto& ex : data.examples) {
    out << (ex.label > 0 ? "+1" : "-1");
    for (const auto& [idx, val] : ex.features) {
      out << ' ' << (idx + 1) << ':' << format_double(val);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace sgdlab
