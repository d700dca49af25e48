#include "textcls/linear.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "textcls/error.hpp"

namespace textcls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double loss_value(Loss loss, double margin) {
  const double slack = std::max(0.0, 1.0 - margin);
  return loss == Loss::hinge ? slack : slack * slack;
}

double diag_term(const BinaryProblem& p, std::size_t i) {
  return p.loss == Loss::squared_hinge ? 0.5 / p.cost(i) : 0.0;
}

double squared_norm(std::span<const double> w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

void check_feasible(const BinaryProblem& p, std::span<const double> alpha) {
  if (alpha.size() != p.y.size()) throw DataError("dual vector length does not match the problem");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0) || alpha[i] > dual_upper_bound(p, i)) {
      throw DataError("infeasible dual variable at index " + std::to_string(i));
    }
  }
}

// Dual objective given w = w(alpha).
double dual_from_w(const BinaryProblem& p, std::span<const double> alpha, std::span<const double> w) {
  double d = -0.5 * squared_norm(w);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    d += alpha[i] - 0.5 * diag_term(p, i) * alpha[i] * alpha[i];
  }
  return d;
}

}  // namespace

std::string to_string(Loss loss) { return loss == Loss::hinge ? "hinge" : "squared_hinge"; }

Loss parse_loss(std::string_view s) {
  if (s == "hinge") return Loss::hinge;
  if (s == "squared_hinge") return Loss::squared_hinge;
  throw ConfigError("unknown loss '" + std::string(s) + "'");
}

void BinaryProblem::validate() const {
  if (X.n_rows() == 0) throw DataError("binary problem has no rows");
  if (y.size() != X.n_rows()) throw DataError("label vector length does not match feature rows");
  for (auto v : y) {
    if (v != 1 && v != -1) throw DataError("binary labels must be +1 or -1");
  }
  if (!(C > 0.0) || !std::isfinite(C)) throw ConfigError("C must be a positive finite number");
  if (!(positive_weight >= 1.0) || !std::isfinite(positive_weight)) {
    throw ConfigError("positive_weight must be a finite number >= 1");
  }
}

double dual_upper_bound(const BinaryProblem& p, std::size_t i) {
  return p.loss == Loss::hinge ? p.cost(i) : kInf;
}

BinarySolution train_binary(const BinaryProblem& p, const SolverOptions& opts) {
  p.validate();
  if (!(opts.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  if (opts.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  const auto start = std::chrono::steady_clock::now();

  const std::size_t n = p.X.n_rows();
  BinarySolution sol;
  sol.w.assign(p.X.n_cols(), 0.0);
  sol.alpha.assign(n, 0.0);

  std::vector<double> qd(n), diag(n), upper(n);
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = diag_term(p, i);
    upper[i] = dual_upper_bound(p, i);
    qd[i] = diag[i] + textcls::squared_norm(p.X.row(i));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(opts.seed);

  auto& rep = sol.report;
  for (std::size_t epoch = 0; epoch < opts.max_iter; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto xi = p.X.row(i);
      const double yi = p.y[i];
      const double g = yi * dot(xi, sol.w) - 1.0 + diag[i] * sol.alpha[i];
      double next;
      if (qd[i] > 0.0) {
        next = std::clamp(sol.alpha[i] - g / qd[i], 0.0, upper[i]);
      } else {
        // Empty row under hinge loss: the dual is linear in alpha_i.
        next = g < 0.0 ? upper[i] : (g > 0.0 ? 0.0 : sol.alpha[i]);
      }
      const double delta = next - sol.alpha[i];
      if (delta != 0.0) {
        sol.alpha[i] = next;
        axpy(delta * yi, xi, sol.w);
      }
    }
    rep.epochs = epoch + 1;
    rep.primal = primal_objective(p, sol.w);
    rep.dual = dual_from_w(p, sol.alpha, sol.w);
    rep.relative_gap = (rep.primal - rep.dual) / rep.primal;
    if (opts.record_dual_trace) rep.dual_trace.push_back(rep.dual);
    if (!std::isfinite(rep.primal) || !std::isfinite(rep.dual)) {
      throw NumericError("solver diverged: non-finite objective at epoch " + std::to_string(rep.epochs));
    }
    if (rep.relative_gap <= opts.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

std::vector<double> decision_values(std::span<const double> w, const SparseMatrix& X) {
  if (w.size() != X.n_cols()) {
    throw DataError("dimension mismatch: weights have " + std::to_string(w.size()) +
                    " entries, features have " + std::to_string(X.n_cols()) + " columns");
  }
  std::vector<double> out(X.n_rows());
  for (std::size_t i = 0; i < X.n_rows(); ++i) out[i] = dot(X.row(i), w);
  return out;
}

double primal_objective(const BinaryProblem& p, std::span<const double> w) {
  if (w.size() != p.X.n_cols()) throw DataError("dimension mismatch in primal objective");
  double obj = 0.5 * squared_norm(w);
  for (std::size_t i = 0; i < p.X.n_rows(); ++i) {
    obj += p.cost(i) * loss_value(p.loss, p.y[i] * dot(p.X.row(i), w));
  }
  return obj;
}

std::vector<double> primal_gradient(const BinaryProblem& p, std::span<const double> w) {
  if (p.loss != Loss::squared_hinge) throw ConfigError("primal gradient requires the squared hinge loss");
  if (w.size() != p.X.n_cols()) throw DataError("dimension mismatch in primal gradient");
  std::vector<double> g(w.begin(), w.end());
  for (std::size_t i = 0; i < p.X.n_rows(); ++i) {
    const auto xi = p.X.row(i);
    const double yi = p.y[i];
    const double slack = 1.0 - yi * dot(xi, w);
    if (slack > 0.0) axpy(-2.0 * p.cost(i) * slack * yi, xi, g);
  }
  return g;
}

WeightVector weights_from_dual(const BinaryProblem& p, std::span<const double> alpha) {
  if (alpha.size() != p.X.n_rows()) throw DataError("dual vector length does not match the problem");
  WeightVector w(p.X.n_cols(), 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] != 0.0) axpy(alpha[i] * p.y[i], p.X.row(i), w);
  }
  return w;
}

double dual_objective(const BinaryProblem& p, std::span<const double> alpha) {
  check_feasible(p, alpha);
  const auto w = weights_from_dual(p, alpha);
  return dual_from_w(p, alpha, w);
}

double duality_gap(const BinaryProblem& p, std::span<const double> alpha) {
  p.validate();
  check_feasible(p, alpha);
  const auto w = weights_from_dual(p, alpha);
  return primal_objective(p, w) - dual_from_w(p, alpha, w);
}

}  // namespace textcls
