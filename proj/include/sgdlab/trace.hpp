#pragma once

#include "sgdlab/core.hpp"
#include "sgdlab/objective.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace sgdlab {

/// One logged point of an optimizer run. `evals` is the cumulative count of
/// component-gradient evaluations spent by the optimizer itself (trace
/// instrumentation is not charged), which is the fair x-axis for comparing
/// methods. rt_numerator/rt_denominator are the running sums defining the
/// ratio r_t when a reference point is being tracked.
struct TraceRecord {
  int64_t t = 0;
  uint64_t evals = 0;
  double f_value = 0.0;
  double grad_norm_sq = 0.0;
  std::optional<double> dist_sq;
  std::optional<double> rt_numerator;
  std::optional<double> rt_denominator;

  std::optional<double> rt() const {
    if (!rt_numerator || !rt_denominator) return std::nullopt;
    if (*rt_denominator == 0.0) return 0.0;
    return *rt_numerator / *rt_denominator;
  }
};

struct Trace {
  std::vector<TraceRecord> rows;

  static constexpr const char* kCsvHeader = "t,evals,F,grad_norm_sq,dist_sq,rt";

  void to_csv(std::ostream& out) const {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
      out << r.t << ',' << r.evals << ',' << format_double(r.f_value) << ','
          << format_double(r.grad_norm_sq) << ',';
      if (r.dist_sq) out << format_double(*r.dist_sq);
      out << ',';
      if (auto ratio = r.rt()) out << format_double(*ratio);
      out << '\n';
    }
  }

  std::string to_csv() const {
    std::ostringstream out;
    to_csv(out);
    return out.str();
  }

  /// Reads the exported schema back; the rt column is a ratio, so it lands in
  /// rt_numerator with denominator 1.
  static Trace from_csv(std::istream& in) {
    Trace trace;
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty trace CSV");
    long line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string field;
      TraceRecord rec;
      auto next = [&](bool required) -> std::optional<std::string> {
        if (!std::getline(row, field, ',')) {
          if (required) throw ParseError("short trace row", line_no);
          return std::nullopt;
        }
        if (field.empty()) return std::nullopt;
        return field;
      };
      rec.t = std::stoll(*next(true));
      rec.evals = std::stoull(*next(true));
      rec.f_value = std::stod(*next(true));
      rec.grad_norm_sq = std::stod(*next(true));
      if (auto f = next(false)) rec.dist_sq = std::stod(*f);
      if (auto f = next(false)) {
        rec.rt_numerator = std::stod(*f);
        rec.rt_denominator = 1.0;
      }
      trace.rows.push_back(rec);
    }
    return trace;
  }
};

/// Per-run instrumentation knobs shared by the iterative solvers.
struct TraceOptions {
  /// Reference point (known solution); enables dist_sq and r_t tracking.
  std::optional<Vector> reference;
  /// Accumulate the r_t sums at every iterate. Costs a full component pass
  /// per step, so enable only on small instances.
  bool accumulate_rt = false;
  /// Keep a copy of every k-th iterate (0 = none) for post-hoc diagnostics.
  int64_t keep_every = 0;
};

struct RunResult {
  Vector final_w;
  Trace trace;
  uint64_t evals = 0;
  bool diverged = false;
  std::string message;
  /// Iterates retained per TraceOptions::keep_every (w_0 included).
  std::vector<Vector> kept_iterates;
  std::vector<int64_t> kept_steps;
};

namespace detail {

/// Shared bookkeeping: logging rows, r_t accumulation, divergence checks.
class RunRecorder {
 public:
  RunRecorder(const ComponentObjective& problem, TraceOptions opts)
      : problem_(problem), opts_(std::move(opts)), grad_buf_(problem.dim()) {
    if (opts_.accumulate_rt && !opts_.reference)
      throw PreconditionError("r_t accumulation requires a reference point");
    if (opts_.reference && opts_.reference->size() != problem.dim())
      throw PreconditionError("reference point has wrong dimension");
    if (opts_.accumulate_rt) {
      ref_grads_.reserve(problem.n());
      Vector g(problem.dim());
      for (size_t i = 0; i < problem.n(); ++i) {
        problem.component_grad(i, *opts_.reference, g);
        ref_grads_.push_back(g);
      }
    }
  }

  /// Call once per iterate w_k, k = 0..T, in order.
  void visit(int64_t t, const Vector& w) {
    if (opts_.accumulate_rt) {
      KahanAccumulator num;
      Vector g(problem_.dim());
      for (size_t i = 0; i < problem_.n(); ++i) {
        problem_.component_grad(i, w, g);
        num.add((g - ref_grads_[i]).squaredNorm());
      }
      rt_num_.add(num.value() / static_cast<double>(problem_.n()));
      problem_.full_grad(w, grad_buf_);
      rt_den_.add(grad_buf_.squaredNorm());
    }
    if (opts_.keep_every > 0 && t % opts_.keep_every == 0) {
      result_.kept_iterates.push_back(w);
      result_.kept_steps.push_back(t);
    }
  }

  void log(int64_t t, uint64_t evals, const Vector& w) {
    // Keep t strictly increasing; a divergence abort may ask to log an
    // iterate that a periodic row already captured.
    if (!result_.trace.rows.empty() && result_.trace.rows.back().t >= t) return;
    TraceRecord rec;
    rec.t = t;
    rec.evals = evals;
    rec.f_value = problem_.full_value(w);
    problem_.full_grad(w, grad_buf_);
    rec.grad_norm_sq = grad_buf_.squaredNorm();
    if (opts_.reference) rec.dist_sq = (w - *opts_.reference).squaredNorm();
    if (opts_.accumulate_rt) {
      rec.rt_numerator = rt_num_.value();
      rec.rt_denominator = rt_den_.value();
    }
    result_.trace.rows.push_back(rec);
    last_f_ = rec.f_value;
  }

  bool diverged(const Vector& w) const {
    if (!w.allFinite()) return true;
    return w.norm() > 1e12;
  }

  double last_logged_f() const { return last_f_; }

  RunResult take(Vector final_w, uint64_t evals, bool diverged, std::string message) {
    result_.final_w = std::move(final_w);
    result_.evals = evals;
    result_.diverged = diverged;
    result_.message = std::move(message);
    return std::move(result_);
  }

 private:
  const ComponentObjective& problem_;
  TraceOptions opts_;
  Vector grad_buf_;
  std::vector<Vector> ref_grads_;
  KahanAccumulator rt_num_;
  KahanAccumulator rt_den_;
  RunResult result_;
  double last_f_ = 0.0;
};

}  // namespace detail
}  // namespace sgdlab
