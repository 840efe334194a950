#include "dspdhg/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dspdhg {

namespace {

void check_metric(const WeightedMetric& m) {
  if (!(m.tau > 0.0) || !(m.sigma > 0.0) || !(m.p > 0.0) || m.p > 1.0 || !(m.q > 0.0) || m.q > 1.0)
    throw std::invalid_argument("WeightedMetric: need tau, sigma > 0 and p, q in (0, 1]");
}

}  // namespace

double v_norm_sq(const WeightedMetric& m, std::span<const double> x, std::span<const double> y) {
  check_metric(m);
  return norm_sq(x) / (m.tau * m.p) + norm_sq(y) / (m.sigma * m.q);
}

double lyapunov_V(const WeightedMetric& m, const BlockMatrix& A, std::span<const double> dx,
                  std::span<const double> dy_prev) {
  check_metric(m);
  const Vec adx = A.matvec(dx);
  return 0.25 * norm_sq(dx) / (m.tau * m.p) + 0.25 * norm_sq(dy_prev) / (m.sigma * m.q) +
         dot(adx, dy_prev) / (m.p * m.q);
}

double lyapunov_Vk(const WeightedMetric& m, const BlockMatrix& A, std::span<const double> x,
                   std::span<const double> y, std::span<const double> dy_k) {
  check_metric(m);
  const Vec ax = A.matvec(x);
  return 0.5 * norm_sq(x) / (m.tau * m.p) + 0.5 * norm_sq(y) / (m.sigma * m.q) +
         0.25 * norm_sq(dy_k) / (m.sigma * m.q) - dot(ax, dy_k) / m.q;
}

double smoothed_gap(const SaddleProblem& problem, const WeightedMetric& m,
                    const PrimalDualPoint& zbar, const PrimalDualPoint& zdot, double mu) {
  check_metric(m);
  if (!(mu > 0.0)) throw std::invalid_argument("smoothed_gap: mu must be positive");
  const BlockPartition& cp = problem.A.col_partition();
  const BlockPartition& rp = problem.A.row_partition();
  if (static_cast<int>(zbar.x.size()) != cp.dim() || static_cast<int>(zbar.y.size()) != rp.dim() ||
      static_cast<int>(zdot.x.size()) != cp.dim() || static_cast<int>(zdot.y.size()) != rp.dim())
    throw std::invalid_argument("smoothed_gap: dimension mismatch");

  double head = 0.0;  // g(xbar) + f*(ybar); may push the gap to +inf
  for (int j = 0; j < cp.count(); ++j)
    head += problem.g[j].eval(std::span<const double>(zbar.x).subspan(cp.begin(j), cp.size(j)));
  for (int i = 0; i < rp.count(); ++i)
    head += problem.fstar[i].eval(std::span<const double>(zbar.y).subspan(rp.begin(i), rp.size(i)));
  if (head == std::numeric_limits<double>::infinity()) return head;

  const double cy = mu / (m.sigma * m.q);
  const double cx = mu / (m.tau * m.p);
  const Vec axbar = problem.A.matvec(zbar.x);
  const Vec atybar = problem.A.rmatvec(zbar.y);

  // sup_y <A xbar, y> - f*(y) - (cy/2) ||y - ydot||^2, maximized blockwise by
  // the prox of f* at step 1/cy.
  double dual_part = 0.0;
  Vec in, out;
  for (int i = 0; i < rp.count(); ++i) {
    const int b = rp.begin(i);
    const int d = rp.size(i);
    in.resize(d);
    for (int k = 0; k < d; ++k) in[k] = zdot.y[b + k] + axbar[b + k] / cy;
    out.resize(d);
    problem.fstar[i].prox(1.0 / cy, in, out);
    dual_part -= problem.fstar[i].eval(out, 1e-9);
    for (int k = 0; k < d; ++k) {
      const double dev = out[k] - zdot.y[b + k];
      dual_part += axbar[b + k] * out[k] - 0.5 * cy * dev * dev;
    }
  }

  // sup_x -g(x) - <x, A^T ybar> - (cx/2) ||x - xdot||^2.
  double primal_part = 0.0;
  for (int j = 0; j < cp.count(); ++j) {
    const int b = cp.begin(j);
    const int d = cp.size(j);
    in.resize(d);
    for (int k = 0; k < d; ++k) in[k] = zdot.x[b + k] - atybar[b + k] / cx;
    out.resize(d);
    problem.g[j].prox(1.0 / cx, in, out);
    primal_part -= problem.g[j].eval(out, 1e-9);
    for (int k = 0; k < d; ++k) {
      const double dev = out[k] - zdot.x[b + k];
      primal_part += -atybar[b + k] * out[k] - 0.5 * cx * dev * dev;
    }
  }

  return head + dual_part + primal_part;
}

std::optional<double> restricted_gap(const SaddleProblem& problem, const PrimalDualPoint& zbar,
                                     const std::vector<PrimalDualPoint>& candidates) {
  std::optional<double> best;
  for (const PrimalDualPoint& z : candidates) {
    const std::optional<double> h = gap_kernel(problem, zbar, z);
    if (!h) continue;
    if (!best || *h > *best) best = *h;
  }
  return best;
}

}  // namespace dspdhg
