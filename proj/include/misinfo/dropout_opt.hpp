// Copyright 2026 The Misinfo Dropout Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Block-level dropouts and the per-step optimizers that choose them.
//
// A dropout matrix d scales every class-u to class-v transfer probability:
// b_uv becomes d_uv * b_uv, so d_uv = 1 leaves the transfer untouched and
// d_uv = 0 suppresses it. Given the current front (|S_t^v|, |I_t^u|) the
// optimizers pick d to minimize expected false-content growth while keeping
// expected true-content growth at or above alpha * |I_t|.
//
// Notation used below, with w_uv = |S_t^v| * |I_t^u|:
//   linear benefit  a_uv = w_uv * b+_uv
//   linear cost     c_uv = w_uv * b-_uv
//   exponential     F(d) = sum_v |S^v| (1 - exp(-sum_u |I^u| d_uv b-_uv))
//                   G(d) = same with b+

#ifndef MISINFO_DROPOUT_OPT_HPP_
#define MISINFO_DROPOUT_OPT_HPP_

#include <limits>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "misinfo/cascade_sim.hpp"

namespace misinfo {

class DropoutMatrix {
 public:
  DropoutMatrix() = default;
  explicit DropoutMatrix(BlockMatrix d) : d_(std::move(d)) {
    require_probabilities(d_, "dropout matrix");
  }
  static DropoutMatrix ones(std::size_t k) { return DropoutMatrix(BlockMatrix(k, 1.0)); }
  static DropoutMatrix zeros(std::size_t k) { return DropoutMatrix(BlockMatrix(k, 0.0)); }

  std::size_t size() const { return d_.size(); }
  double operator()(std::size_t u, std::size_t v) const { return d_(u, v); }
  const BlockMatrix& matrix() const { return d_; }

  friend bool operator==(const DropoutMatrix&, const DropoutMatrix&) = default;

 private:
  BlockMatrix d_;
};

inline SbmModel apply_dropout(const SbmModel& model, const DropoutMatrix& d) {
  const std::size_t k = model.num_classes();
  if (d.size() != k)
    throw InvalidArgument(detail::concat("dropout matrix is ", d.size(), "x", d.size(),
                                         " but model has ", k, " classes"));
  BlockMatrix altered(k);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v) altered(u, v) = d(u, v) * model.block()(u, v);
  return SbmModel(model.partition_ptr(), std::move(altered));
}

// |S_t^v| and |I_t^u| per class.
struct StepCounts {
  std::vector<double> s;
  std::vector<double> i;
  double i_total = 0.0;

  static StepCounts make(std::vector<double> s, std::vector<double> i) {
    if (s.size() != i.size()) throw InvalidArgument("step count vectors differ in length");
    for (double x : s)
      if (!(x >= 0.0)) throw InvalidArgument("susceptible counts must be non-negative");
    for (double x : i)
      if (!(x >= 0.0)) throw InvalidArgument("infected counts must be non-negative");
    StepCounts c{std::move(s), std::move(i), 0.0};
    c.i_total = std::accumulate(c.i.begin(), c.i.end(), 0.0);
    return c;
  }

  static StepCounts from_state(const SirState& state) {
    const auto& sc = state.susceptible_counts();
    const auto& ic = state.infected_counts();
    return make(std::vector<double>(sc.begin(), sc.end()), std::vector<double>(ic.begin(), ic.end()));
  }

  std::size_t size() const { return s.size(); }
};

namespace detail {

inline void check_dims(const StepCounts& counts, const BlockMatrix& m, const char* what) {
  if (m.size() != counts.size())
    throw InvalidArgument(concat(what, " is ", m.size(), "x", m.size(), " but counts have ",
                                 counts.size(), " classes"));
}

inline double pair_weight(const StepCounts& c, std::size_t u, std::size_t v) {
  return c.s[v] * c.i[u];
}

}  // namespace detail

inline double expected_next_infected_exact(const StepCounts& counts, const BlockMatrix& block,
                                           const DropoutMatrix& d) {
  detail::check_dims(counts, block, "block matrix");
  detail::check_dims(counts, d.matrix(), "dropout matrix");
  const std::size_t k = counts.size();
  double total = 0.0;
  for (std::size_t v = 0; v < k; ++v) {
    double log_escape = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
      if (counts.i[u] == 0.0) continue;
      const double p = d(u, v) * block(u, v);
      if (p >= 1.0) {
        log_escape = -std::numeric_limits<double>::infinity();
        break;
      }
      log_escape += counts.i[u] * std::log1p(-p);
    }
    total += counts.s[v] * -std::expm1(log_escape);
  }
  return total;
}

inline double expected_next_infected_asymptotic(const StepCounts& counts, const BlockMatrix& block,
                                                const DropoutMatrix& d) {
  detail::check_dims(counts, block, "block matrix");
  detail::check_dims(counts, d.matrix(), "dropout matrix");
  const std::size_t k = counts.size();
  double total = 0.0;
  for (std::size_t v = 0; v < k; ++v) {
    double z = 0.0;
    for (std::size_t u = 0; u < k; ++u) z += counts.i[u] * d(u, v) * block(u, v);
    total += counts.s[v] * -std::expm1(-z);
  }
  return total;
}

// Linear surrogate sum_uv w_uv d_uv b_uv of the expected next front.
inline double expected_next_infected_linear(const StepCounts& counts, const BlockMatrix& block,
                                            const DropoutMatrix& d) {
  detail::check_dims(counts, block, "block matrix");
  detail::check_dims(counts, d.matrix(), "dropout matrix");
  double total = 0.0;
  for (std::size_t u = 0; u < counts.size(); ++u)
    for (std::size_t v = 0; v < counts.size(); ++v)
      total += detail::pair_weight(counts, u, v) * d(u, v) * block(u, v);
  return total;
}

// d = all-ones meets the exponential constraint.
inline bool feasibility_convex(const StepCounts& counts, const BlockMatrix& b_plus, double alpha) {
  if (alpha < 0.0) throw InvalidArgument("alpha must be non-negative");
  return expected_next_infected_asymptotic(counts, b_plus, DropoutMatrix::ones(counts.size())) >=
         alpha * counts.i_total;
}

// d = all-ones meets the linear constraint. This is the branch test of the
// LP-with-soft-fallback controller.
inline bool feasibility_lp(const StepCounts& counts, const BlockMatrix& b_plus, double alpha) {
  if (alpha < 0.0) throw InvalidArgument("alpha must be non-negative");
  return expected_next_infected_linear(counts, b_plus, DropoutMatrix::ones(counts.size())) >=
         alpha * counts.i_total;
}

enum class Branch { kNone, kConvex, kLp, kSoftLp };

inline std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::kConvex: return "convex";
    case Branch::kLp: return "lp";
    case Branch::kSoftLp: return "soft-lp";
    case Branch::kNone: break;
  }
  return "none";
}

struct SolverReport {
  DropoutMatrix d_star;
  double objective = 0.0;
  double constraint_value = 0.0;
  Branch branch = Branch::kNone;
  std::optional<double> kkt_residual;
  std::optional<double> multiplier;
  // Convex branch only: linear program objective on the same step, and
  // whether the two objectives differ by more than 5%.
  std::optional<double> lp_objective;
  bool lp_disagreement = false;
};

// Exact solution of
//   min sum c_uv d_uv  s.t.  sum a_uv d_uv >= alpha |I_t|,  d in [0,1]^{k x k}
// by the continuous-knapsack greedy: zero-cost coordinates are opened first,
// then the rest in ascending cost/benefit order (ties by (u, v)), the last
// one fractionally. Benefit-free coordinates with positive cost stay closed.
inline SolverReport solve_lp(const StepCounts& counts, const BlockMatrix& b_minus,
                             const BlockMatrix& b_plus, double alpha) {
  detail::check_dims(counts, b_minus, "false-content block matrix");
  detail::check_dims(counts, b_plus, "true-content block matrix");
  if (!feasibility_lp(counts, b_plus, alpha)) {
    throw InfeasibleError(
        "linear program is infeasible at this step (true-content growth cannot reach "
        "alpha * |I_t|); use solve_soft");
  }
  const std::size_t k = counts.size();
  const double target = alpha * counts.i_total;
  BlockMatrix d(k, 0.0);
  double reached = 0.0;

  struct Coord {
    std::size_t u, v;
    double benefit, cost;
  };
  std::vector<Coord> priced;
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t v = 0; v < k; ++v) {
      const double w = detail::pair_weight(counts, u, v);
      const double a = w * b_plus(u, v);
      const double c = w * b_minus(u, v);
      if (c == 0.0) {
        d(u, v) = 1.0;
        reached += a;
      } else if (a > 0.0) {
        priced.push_back({u, v, a, c});
      }
    }
  }
  // c1/a1 < c2/a2 without dividing; stable sort keeps (u, v) order on ties.
  std::stable_sort(priced.begin(), priced.end(), [](const Coord& x, const Coord& y) {
    return x.cost * y.benefit < y.cost * x.benefit;
  });
  for (const Coord& c : priced) {
    if (reached >= target) break;
    const double need = target - reached;
    if (c.benefit <= need) {
      d(c.u, c.v) = 1.0;
      reached += c.benefit;
    } else {
      double frac = need / c.benefit;
      while (reached + c.benefit * frac < target && frac < 1.0)
        frac = std::nextafter(frac, 2.0);
      d(c.u, c.v) = std::min(frac, 1.0);
      reached = target;
    }
  }

  SolverReport r;
  r.d_star = DropoutMatrix(std::move(d));
  r.objective = expected_next_infected_linear(counts, b_minus, r.d_star);
  r.constraint_value = expected_next_infected_linear(counts, b_plus, r.d_star);
  r.branch = Branch::kLp;
  return r;
}

// Softened program: minimize sum_uv w_uv d_uv (b-_uv - lambda b+_uv) over the
// box. Separable, so each coordinate opens iff suppressing it gains nothing:
// d_uv = 1 when b-_uv <= lambda b+_uv, otherwise 0.
inline SolverReport solve_soft(const StepCounts& counts, const BlockMatrix& b_minus,
                               const BlockMatrix& b_plus, double lambda) {
  detail::check_dims(counts, b_minus, "false-content block matrix");
  detail::check_dims(counts, b_plus, "true-content block matrix");
  if (lambda < 0.0) throw InvalidArgument("lambda must be non-negative");
  const std::size_t k = counts.size();
  BlockMatrix d(k, 0.0);
  double objective = 0.0;
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t v = 0; v < k; ++v) {
      const double net = b_minus(u, v) - lambda * b_plus(u, v);
      if (net <= 0.0) {
        d(u, v) = 1.0;
        objective += detail::pair_weight(counts, u, v) * net;
      }
    }
  }
  SolverReport r;
  r.d_star = DropoutMatrix(std::move(d));
  r.objective = objective;
  r.constraint_value = expected_next_infected_linear(counts, b_plus, r.d_star);
  r.branch = Branch::kSoftLp;
  return r;
}

inline double soft_objective(const StepCounts& counts, const BlockMatrix& b_minus,
                             const BlockMatrix& b_plus, double lambda, const DropoutMatrix& d) {
  double total = 0.0;
  for (std::size_t u = 0; u < counts.size(); ++u)
    for (std::size_t v = 0; v < counts.size(); ++v)
      total += detail::pair_weight(counts, u, v) * d(u, v) * (b_minus(u, v) - lambda * b_plus(u, v));
  return total;
}

struct ConvexOptions {
  double tolerance = 1e-6;  // on the KKT residual
  int max_iterations = 10000;
};

namespace detail {

// F, G and their gradients for the exponential program.
class ExponentialProgram {
 public:
  ExponentialProgram(const StepCounts& counts, const BlockMatrix& b_minus, const BlockMatrix& b_plus,
                     double alpha)
      : k_(counts.size()), s_(counts.s), cost_(k_), benefit_(k_), target_(alpha * counts.i_total) {
    for (std::size_t u = 0; u < k_; ++u) {
      for (std::size_t v = 0; v < k_; ++v) {
        cost_(u, v) = counts.i[u] * b_minus(u, v);
        benefit_(u, v) = counts.i[u] * b_plus(u, v);
      }
    }
  }

  std::size_t k() const { return k_; }
  double target() const { return target_; }
  double s(std::size_t v) const { return s_[v]; }
  double cost_rate(std::size_t u, std::size_t v) const { return cost_(u, v); }
  double benefit_rate(std::size_t u, std::size_t v) const { return benefit_(u, v); }

  double exposure(const BlockMatrix& rate, const BlockMatrix& d, std::size_t v) const {
    double z = 0.0;
    for (std::size_t u = 0; u < k_; ++u) z += rate(u, v) * d(u, v);
    return z;
  }

  double objective(const BlockMatrix& d) const { return total(cost_, d); }
  double constraint(const BlockMatrix& d) const { return total(benefit_, d); }

  // dF/dd_uv and dG/dd_uv.
  void gradients(const BlockMatrix& d, BlockMatrix& grad_f, BlockMatrix& grad_g) const {
    grad_f = BlockMatrix(k_);
    grad_g = BlockMatrix(k_);
    for (std::size_t v = 0; v < k_; ++v) {
      const double ef = std::exp(-exposure(cost_, d, v));
      const double eg = std::exp(-exposure(benefit_, d, v));
      for (std::size_t u = 0; u < k_; ++u) {
        grad_f(u, v) = s_[v] * cost_(u, v) * ef;
        grad_g(u, v) = s_[v] * benefit_(u, v) * eg;
      }
    }
  }

 private:
  double total(const BlockMatrix& rate, const BlockMatrix& d) const {
    double sum = 0.0;
    for (std::size_t v = 0; v < k_; ++v) sum += s_[v] * -std::expm1(-exposure(rate, d, v));
    return sum;
  }

  std::size_t k_;
  std::vector<double> s_;
  BlockMatrix cost_, benefit_;
  double target_;
};

// Dimensionless first-order optimality measure at (d, mu): projected
// Lagrangian gradient, constraint violation and complementarity.
inline double kkt_residual(const ExponentialProgram& prog, const BlockMatrix& d, double mu) {
  BlockMatrix gf, gg;
  prog.gradients(d, gf, gg);
  double scale = 0.0, gg_max = 0.0;
  for (std::size_t u = 0; u < prog.k(); ++u)
    for (std::size_t v = 0; v < prog.k(); ++v) {
      scale = std::max({scale, gf(u, v), mu * gg(u, v)});
      gg_max = std::max(gg_max, gg(u, v));
    }
  if (scale <= 0.0) scale = 1.0;
  double stationarity = 0.0;
  for (std::size_t u = 0; u < prog.k(); ++u)
    for (std::size_t v = 0; v < prog.k(); ++v) {
      const double g = (gf(u, v) - mu * gg(u, v)) / scale;
      stationarity = std::max(stationarity, std::abs(d(u, v) - std::clamp(d(u, v) - g, 0.0, 1.0)));
    }
  const double level = std::max(1.0, prog.target());
  const double gap = prog.constraint(d) - prog.target();
  const double violation = std::max(0.0, -gap) / level;
  const double complementarity = std::min(std::abs(gap) / level, mu * gg_max / scale);
  return std::max({stationarity, violation, complementarity});
}

// Multiplier minimizing the KKT residual for a fixed d. The residual is
// piecewise smooth in mu with breakpoints at the per-coordinate gradient
// ratios, so those ratios (and 0) are the candidates, refined by golden
// section on the best bracket.
inline std::pair<double, double> best_multiplier(const ExponentialProgram& prog, const BlockMatrix& d,
                                                 double hint) {
  BlockMatrix gf, gg;
  prog.gradients(d, gf, gg);
  std::vector<double> cand{0.0, hint};
  for (std::size_t u = 0; u < prog.k(); ++u)
    for (std::size_t v = 0; v < prog.k(); ++v)
      if (gg(u, v) > 0.0) cand.push_back(gf(u, v) / gg(u, v));
  std::sort(cand.begin(), cand.end());
  double best_mu = hint, best = kkt_residual(prog, d, hint);
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const double r = kkt_residual(prog, d, cand[i]);
    if (r < best) best = r, best_mu = cand[i];
    if (i + 1 < cand.size() && cand[i + 1] > cand[i]) {
      double lo = cand[i], hi = cand[i + 1];
      for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) * 0.381966;
        const double m2 = hi - (hi - lo) * 0.381966;
        if (kkt_residual(prog, d, m1) < kkt_residual(prog, d, m2)) hi = m2;
        else lo = m1;
      }
      const double mid = 0.5 * (lo + hi);
      const double r2 = kkt_residual(prog, d, mid);
      if (r2 < best) best = r2, best_mu = mid;
    }
  }
  return {best_mu, best};
}

// Exact minimization of F - mu G along each coordinate in turn. Along one
// coordinate the Lagrangian is a sum of two exponentials with at most one
// stationary point, so the minimizer is one of {0, 1, stationary point}.
// Returns the number of sweeps used.
inline int coordinate_descent(const ExponentialProgram& prog, double mu, BlockMatrix& d, int max_sweeps) {
  const std::size_t k = prog.k();
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t v = 0; v < k; ++v) {
      for (std::size_t u = 0; u < k; ++u) {
        const double am = prog.cost_rate(u, v), ap = prog.benefit_rate(u, v);
        double zm = 0.0, zp = 0.0;
        for (std::size_t w = 0; w < k; ++w) {
          if (w == u) continue;
          zm += prog.cost_rate(w, v) * d(w, v);
          zp += prog.benefit_rate(w, v) * d(w, v);
        }
        const double sv = prog.s(v);
        auto phi = [&](double t) {
          return sv * (-std::expm1(-(zm + am * t)) + mu * std::expm1(-(zp + ap * t)));
        };
        std::vector<double> cand{1.0, 0.0};
        if (mu > 0.0 && am > 0.0 && ap > 0.0 && ap != am) {
          const double t = (std::log(mu * ap / am) + zm - zp) / (ap - am);
          if (t > 0.0 && t < 1.0) cand.push_back(t);
        }
        double best_t = d(u, v), best = phi(best_t);
        for (double t : cand) {
          const double f = phi(t);
          // strict improvement beyond rounding; on ties prefer the larger d
          const double slack = 1e-14 * (std::abs(best) + sv);
          if (f < best - slack || (std::abs(f - best) <= slack && t > best_t)) {
            best = f;
            best_t = t;
          }
        }
        moved = std::max(moved, std::abs(best_t - d(u, v)));
        d(u, v) = best_t;
      }
    }
    if (moved < 1e-13) return sweep;
  }
  return max_sweeps;
}

}  // namespace detail

inline double lp_objective_if_feasible(const StepCounts& counts, const BlockMatrix& b_minus,
                                       const BlockMatrix& b_plus, double alpha, bool& feasible) {
  feasible = feasibility_lp(counts, b_plus, alpha);
  return feasible ? solve_lp(counts, b_minus, b_plus, alpha).objective : 0.0;
}

// KKT point of the exponential program
//   min F(d)  s.t.  G(d) >= alpha |I_t|,  d in [0,1]^{k x k}.
// F is concave in d, so this is concave minimization over a convex set and
// only a first-order point is promised. Strategy: bisection on the constraint
// multiplier mu with exact coordinate minimization of F - mu G inside; the
// bracket end that meets the constraint is interpolated towards the other end
// until G hits the target; then an augmented-Lagrangian projected-gradient
// polish drives the KKT residual below tolerance.
inline SolverReport solve_convex(const StepCounts& counts, const BlockMatrix& b_minus,
                                 const BlockMatrix& b_plus, double alpha,
                                 const ConvexOptions& opts = {}) {
  detail::check_dims(counts, b_minus, "false-content block matrix");
  detail::check_dims(counts, b_plus, "true-content block matrix");
  if (!feasibility_convex(counts, b_plus, alpha))
    throw InfeasibleError("exponential program is infeasible at this step; use solve_soft");
  const detail::ExponentialProgram prog(counts, b_minus, b_plus, alpha);
  const std::size_t k = prog.k();
  const double target = prog.target();
  int budget = opts.max_iterations;
  auto spend = [&](int n) {
    budget -= n;
    if (budget < 0)
      throw ConvergenceError(detail::concat("convex solver exceeded ", opts.max_iterations,
                                            " iterations"));
  };
  constexpr int kSweeps = 200;

  BlockMatrix d(k, 1.0);
  double mu = 0.0;
  spend(detail::coordinate_descent(prog, 0.0, d, kSweeps));
  if (prog.constraint(d) < target) {
    double lo = 0.0, hi = 1.0;
    BlockMatrix d_lo = d, d_hi(k, 1.0);
    for (;;) {
      spend(detail::coordinate_descent(prog, hi, d_hi, kSweeps));
      if (prog.constraint(d_hi) >= target) break;
      lo = hi;
      d_lo = d_hi;
      hi *= 2.0;
      if (hi > 1e300) throw ConvergenceError("could not bracket the constraint multiplier");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      BlockMatrix d_mid = d_hi;
      spend(detail::coordinate_descent(prog, mid, d_mid, kSweeps));
      if (prog.constraint(d_mid) >= target) {
        hi = mid;
        d_hi = std::move(d_mid);
      } else {
        lo = mid;
        d_lo = std::move(d_mid);
      }
    }
    mu = hi;
    d = d_hi;
    // G is concave along the segment, so {G >= target} is a sub-interval
    // containing theta = 1 and bisection finds its left end.
    if (prog.constraint(d_hi) > target) {
      auto blend = [&](double theta) {
        BlockMatrix x(k);
        for (std::size_t u = 0; u < k; ++u)
          for (std::size_t v = 0; v < k; ++v)
            x(u, v) = std::clamp(d_lo(u, v) + theta * (d_hi(u, v) - d_lo(u, v)), 0.0, 1.0);
        return x;
      };
      double a = 0.0, b = 1.0;
      for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
        const double m = 0.5 * (a + b);
        if (prog.constraint(blend(m)) >= target) b = m;
        else a = m;
      }
      d = blend(b);
    }
  }

  auto [best_mu, residual] = detail::best_multiplier(prog, d, mu);
  mu = best_mu;

  // Augmented Lagrangian polish:
  //   L(d) = F(d) + (max(0, mu - rho (G - target))^2 - mu^2) / (2 rho).
  if (residual > opts.tolerance) {
    BlockMatrix gf, gg;
    prog.gradients(d, gf, gg);
    double g_max = 0.0, f_curv = 0.0;
    for (std::size_t u = 0; u < k; ++u)
      for (std::size_t v = 0; v < k; ++v) {
        g_max = std::max(g_max, gg(u, v));
        f_curv = std::max(f_curv, prog.s(v) * prog.cost_rate(u, v) * prog.cost_rate(u, v));
      }
    double rho = g_max > 0.0 ? 10.0 * std::max(f_curv, 1e-12) / (g_max * g_max) : 1.0;
    auto augmented = [&](const BlockMatrix& x, double m) {
      const double shifted = std::max(0.0, m - rho * (prog.constraint(x) - target));
      return prog.objective(x) + (shifted * shifted - m * m) / (2.0 * rho);
    };
    double step = 1.0;
    while (residual > opts.tolerance) {
      // inner projected gradient with backtracking
      for (int inner = 0; inner < 200; ++inner) {
        spend(1);
        prog.gradients(d, gf, gg);
        const double shifted = std::max(0.0, mu - rho * (prog.constraint(d) - target));
        BlockMatrix grad(k);
        double gnorm = 0.0;
        for (std::size_t u = 0; u < k; ++u)
          for (std::size_t v = 0; v < k; ++v) {
            grad(u, v) = gf(u, v) - shifted * gg(u, v);
            gnorm = std::max(gnorm, std::abs(grad(u, v)));
          }
        if (gnorm == 0.0) break;
        const double base = augmented(d, mu);
        step = std::min(step * 4.0, 1e6 / gnorm);
        BlockMatrix trial(k);
        double moved = 0.0;
        for (;;) {
          moved = 0.0;
          double decrease = 0.0;
          for (std::size_t u = 0; u < k; ++u)
            for (std::size_t v = 0; v < k; ++v) {
              trial(u, v) = std::clamp(d(u, v) - step * grad(u, v), 0.0, 1.0);
              const double delta = trial(u, v) - d(u, v);
              moved = std::max(moved, std::abs(delta));
              decrease += grad(u, v) * delta;
            }
          if (augmented(trial, mu) <= base + 1e-4 * decrease || moved < 1e-16) break;
          step *= 0.5;
        }
        d = trial;
        if (moved < 1e-14) break;
      }
      mu = std::max(0.0, mu - rho * (prog.constraint(d) - target));
      residual = detail::kkt_residual(prog, d, mu);
      if (residual > opts.tolerance && prog.constraint(d) < target) {
        // nudge back onto the feasible side along the all-ones direction
        double a = 0.0, b = 1.0;
        auto toward_ones = [&](double theta) {
          BlockMatrix x(k);
          for (std::size_t u = 0; u < k; ++u)
            for (std::size_t v = 0; v < k; ++v) x(u, v) = d(u, v) + theta * (1.0 - d(u, v));
          return x;
        };
        for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
          const double m = 0.5 * (a + b);
          if (prog.constraint(toward_ones(m)) >= target) b = m;
          else a = m;
        }
        const BlockMatrix repaired = toward_ones(b);
        const auto [m2, r2] = detail::best_multiplier(prog, repaired, mu);
        if (r2 <= opts.tolerance) {
          d = repaired;
          mu = m2;
          residual = r2;
          break;
        }
        rho *= 2.0;
      }
    }
  }

  SolverReport r;
  r.d_star = DropoutMatrix(d);
  r.objective = prog.objective(d);
  r.constraint_value = prog.constraint(d);
  r.branch = Branch::kConvex;
  r.kkt_residual = residual;
  r.multiplier = mu;
  bool lp_ok = false;
  const double lp = lp_objective_if_feasible(counts, b_minus, b_plus, alpha, lp_ok);
  if (lp_ok) {
    r.lp_objective = lp;
    const double scale = std::max({std::abs(lp), std::abs(r.objective), 1e-12});
    r.lp_disagreement = std::abs(r.objective - lp) > 0.05 * scale;
  }
  return r;
}

struct MgfBound {
  double bound = 1.0;
  double std_error = 0.0;
};

// Monte Carlo estimate of E[exp(-lambda |I_T| / alpha^T)], which bounds the
// probability that the front dies out by step T when every step up to T met
// the growth constraint on the true-content network.
inline MgfBound lemma1_bound(std::span<const double> front_sizes_at_T, double alpha, double lambda,
                             int horizon) {
  if (front_sizes_at_T.empty()) throw InvalidArgument("bound needs at least one sample");
  if (lambda < 0.0) throw InvalidArgument("lambda must be non-negative");
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (horizon < 1) throw InvalidArgument("horizon must be >= 1");
  const double scale = lambda / std::pow(alpha, horizon);
  std::vector<double> xs;
  xs.reserve(front_sizes_at_T.size());
  for (double c : front_sizes_at_T) xs.push_back(std::exp(-scale * c));
  const auto [mean, se] = detail::mean_and_se(xs);
  return {mean, se};
}

}  // namespace misinfo

#endif  // MISINFO_DROPOUT_OPT_HPP_
