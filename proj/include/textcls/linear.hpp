#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textcls/sparse.hpp"

namespace textcls {

enum class Loss { hinge, squared_hinge };

std::string to_string(Loss loss);
Loss parse_loss(std::string_view s);

using WeightVector = std::vector<double>;

/// One L2-regularized binary problem:
///
///   min_w  1/2 w'w + sum_i C_i loss(y_i w'x_i)
///
/// with C_i = C * positive_weight for y_i = +1 and C otherwise. There is no
/// bias term; the decision value is exactly w'x.
struct BinaryProblem {
  const SparseMatrix& X;
  std::vector<std::int8_t> y;  // +1 / -1, one per row of X
  double C = 1.0;
  double positive_weight = 1.0;
  Loss loss = Loss::squared_hinge;

  void validate() const;
  double cost(std::size_t i) const { return y[i] > 0 ? C * positive_weight : C; }
};

struct SolverOptions {
  double tol = 1e-4;            // relative duality gap
  std::size_t max_iter = 1000;  // epochs
  std::uint64_t seed = 1;       // coordinate order
  bool record_dual_trace = false;
};

struct ConvergenceReport {
  std::size_t epochs = 0;
  double primal = 0.0;
  double dual = 0.0;
  double relative_gap = 0.0;
  bool converged = false;
  double seconds = 0.0;
  std::vector<double> dual_trace;  // dual objective after each epoch, if recorded
};

struct BinarySolution {
  WeightVector w;
  std::vector<double> alpha;
  ConvergenceReport report;
};

/// Dual coordinate descent. Each epoch visits every coordinate once in a
/// fresh random order and then checks the relative duality gap against
/// `tol`. Stops early on convergence, otherwise after max_iter epochs with
/// report.converged = false.
BinarySolution train_binary(const BinaryProblem& p, const SolverOptions& opts = {});

/// Entry i = w'x_i. Throws DataError if w.size() != X.n_cols().
std::vector<double> decision_values(std::span<const double> w, const SparseMatrix& X);

double primal_objective(const BinaryProblem& p, std::span<const double> w);

/// Gradient of the primal objective; squared hinge only (hinge is not
/// differentiable and raises ConfigError).
std::vector<double> primal_gradient(const BinaryProblem& p, std::span<const double> w);

// Upper bound of alpha_i: C_i for hinge, +inf for squared hinge.
double dual_upper_bound(const BinaryProblem& p, std::size_t i);

WeightVector weights_from_dual(const BinaryProblem& p, std::span<const double> alpha);

/// Dual objective sum(alpha) - 1/2 |w(alpha)|^2 - 1/2 sum D_ii alpha_i^2,
/// with D_ii = 1/(2 C_i) for squared hinge and 0 for hinge.
double dual_objective(const BinaryProblem& p, std::span<const double> alpha);

/// primal(w(alpha)) - dual(alpha). Throws DataError for infeasible alpha.
double duality_gap(const BinaryProblem& p, std::span<const double> alpha);

}  // namespace textcls
