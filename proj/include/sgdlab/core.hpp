#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgdlab {

using Vector = Eigen::VectorXd;

/// Thrown when an operation's stated precondition is violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown on malformed input data (carries a line number when known).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, long line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Compensated accumulator (Kahan, Neumaier variant); keeps relative error
/// near machine epsilon independent of the number of terms and survives
/// terms larger than the running sum.
struct KahanAccumulator {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) {
    const double t = sum + value;
    if (std::fabs(sum) >= std::fabs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + compensation; }
};

/// Per-coordinate compensated accumulation for dense vectors.
class KahanVectorAccumulator {
 public:
  explicit KahanVectorAccumulator(Eigen::Index dim)
      : sum_(Vector::Zero(dim)), compensation_(Vector::Zero(dim)) {}

  void add(const Vector& v) {
    for (Eigen::Index k = 0; k < sum_.size(); ++k) {
      const double t = sum_[k] + v[k];
      if (std::fabs(sum_[k]) >= std::fabs(v[k])) {
        compensation_[k] += (sum_[k] - t) + v[k];
      } else {
        compensation_[k] += (v[k] - t) + sum_[k];
      }
      sum_[k] = t;
    }
  }

  Vector value() const { return sum_ + compensation_; }

 private:
  Vector sum_;
  Vector compensation_;
};

/// Pairwise tree reduction; deterministic order, O(log n) error growth.
inline double pairwise_sum(std::span<const double> values) {
  const size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    KahanAccumulator acc;
    for (double v : values) acc.add(v);
    return acc.value();
  }
  const size_t half = n / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

inline double pairwise_mean(std::span<const double> values) {
  if (values.empty()) throw PreconditionError("pairwise_mean: empty input");
  return pairwise_sum(values) / static_cast<double>(values.size());
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

/// FNV-1a 64-bit over raw bytes.
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 14695981039346656037ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline uint64_t hash_bytes(const std::string& s) { return fnv1a64(s.data(), s.size()); }

/// Hash of a vector's IEEE-754 payload; used to key stored solution files.
inline uint64_t hash_vector(const Vector& v) {
  return fnv1a64(v.data(), static_cast<size_t>(v.size()) * sizeof(double));
}

inline std::string hash_hex(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

/// Shortest round-trippable decimal form of a double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

}  // namespace sgdlab
