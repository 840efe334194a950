#include "support.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "dspdhg/rng.hpp"

namespace testsupport {

using dspdhg::BlockMatrix;
using dspdhg::BlockPartition;
using dspdhg::LibsvmDataset;
using dspdhg::PrimalDualPoint;
using dspdhg::ProxAtom;
using dspdhg::SaddleProblem;
using dspdhg::SamplingPlan;
using dspdhg::StepSizes;
using dspdhg::Triplet;
using dspdhg::Vec;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd to_dense(const BlockMatrix& A) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  for (const Triplet& t : A.to_triplets()) M(t.row, t.col) += t.value;
  return M;
}

Eigen::VectorXd to_eigen(const Vec& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Vec from_eigen(const Eigen::VectorXd& v) {
  return Vec(v.data(), v.data() + v.size());
}

Vec oracle_prox(const ProxAtom& atom, const Vec& v, double t) {
  const int d = atom.dim();
  Vec out(v.size());
  auto clamp = [&](double u, int i) {
    const double lo = atom.lo().empty() ? -kInf : atom.lo()[i];
    const double hi = atom.hi().empty() ? kInf : atom.hi()[i];
    return std::min(hi, std::max(lo, u));
  };
  for (int i = 0; i < d; ++i) {
    switch (atom.kind()) {
      case ProxAtom::Kind::zero:
        out[i] = v[i];
        break;
      case ProxAtom::Kind::half_square:
        out[i] = v[i] / (1.0 + t);
        break;
      case ProxAtom::Kind::diag_quadratic:
        out[i] = v[i] / (1.0 + 2.0 * t * atom.w()[i]);
        break;
      case ProxAtom::Kind::linear_over_box:
        out[i] = clamp(v[i] - t * atom.c()[i], i);
        break;
      case ProxAtom::Kind::diag_quad_over_box:
        out[i] = clamp(v[i] / (1.0 + 2.0 * t * atom.w()[i]), i);
        break;
      case ProxAtom::Kind::hinge: {
        const double slid = v[i] + t * atom.scale();
        out[i] = v[i] > 1.0 ? v[i] : (slid < 1.0 ? slid : 1.0);
        break;
      }
    }
  }
  return out;
}

double grid_prox_1d(const std::function<double(double)>& value, double v, double t, double lo,
                    double hi, int points) {
  double best = lo;
  double best_val = kInf;
  for (int i = 0; i < points; ++i) {
    const double u = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    const double val = value(u) + (u - v) * (u - v) / (2.0 * t);
    if (val < best_val) {
      best_val = val;
      best = u;
    }
  }
  return best;
}

DenseReference::DenseReference(const SaddleProblem& problem, const StepSizes& steps,
                               const SamplingPlan& plan)
    : prob_(&problem),
      A_(to_dense(problem.A)),
      st_(steps),
      p_(plan.p),
      q_(plan.q),
      sampler_(plan),
      x_(Eigen::VectorXd::Zero(problem.A.cols())),
      y_(Eigen::VectorXd::Zero(problem.A.rows())),
      ybar_(Eigen::VectorXd::Zero(problem.A.rows())),
      esum_x_(Eigen::VectorXd::Zero(problem.A.cols())),
      esum_y_(Eigen::VectorXd::Zero(problem.A.rows())) {}

void DenseReference::step() {
  const BlockPartition& cp = prob_->A.col_partition();
  const BlockPartition& rp = prob_->A.row_partition();

  const Eigen::VectorXd aty_bar = A_.transpose() * ybar_;
  Eigen::VectorXd x_new = x_;
  for (int j : sampler_.primal(k_)) {
    const int b = cp.begin(j);
    const int d = cp.size(j);
    Vec in(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) in[i] = x_[b + i] - st_.tau * aty_bar[b + i];
    const Vec out = oracle_prox(prob_->g[j], in, st_.tau);
    for (int i = 0; i < d; ++i) x_new[b + i] = out[i];
  }

  const Eigen::VectorXd xbar = x_ + (x_new - x_) / p_;
  const Eigen::VectorXd ax_bar = A_ * xbar;
  Eigen::VectorXd y_new = y_;
  for (int i : sampler_.dual(k_)) {
    const int b = rp.begin(i);
    const int d = rp.size(i);
    Vec in(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r) in[r] = y_[b + r] + st_.sigma * ax_bar[b + r];
    const Vec out = oracle_prox(prob_->fstar[i], in, st_.sigma);
    for (int r = 0; r < d; ++r) y_new[b + r] = out[r];
  }

  ybar_ = y_new + (y_new - y_) / q_;
  x_ = x_new;
  y_ = y_new;
  esum_x_ += x_;
  esum_y_ += y_;
  ++ecount_;
  ++k_;
}

void DenseReference::restart_from(const PrimalDualPoint& z) {
  x_ = to_eigen(z.x);
  y_ = to_eigen(z.y);
  ybar_ = y_;
  esum_x_.setZero();
  esum_y_.setZero();
  ecount_ = 0;
}

PrimalDualPoint DenseReference::point() const {
  return {from_eigen(x_), from_eigen(y_)};
}

PrimalDualPoint DenseReference::ergodic() const {
  if (ecount_ == 0) return point();
  const double inv = 1.0 / static_cast<double>(ecount_);
  return {from_eigen(esum_x_ * inv), from_eigen(esum_y_ * inv)};
}

SaddleProblem tiny_scalar_problem() {
  const BlockPartition part = BlockPartition::scalar(1);
  const BlockMatrix A(part, part, {{0, 0, 1.0}});
  std::vector<ProxAtom> g{ProxAtom::half_square(1)};
  std::vector<ProxAtom> fstar{ProxAtom::linear_over_box({0.0}, {-1.0}, {1.0})};
  return dspdhg::make_problem(A, std::move(g), std::move(fstar), {}, "tiny-scalar");
}

SaddleProblem random_problem(std::uint64_t seed, int m_blocks, int n_blocks, int max_block_dim,
                             double density) {
  using dspdhg::RngStream;
  using dspdhg::fnv1a;
  using dspdhg::stream_key;

  RngStream dims(stream_key(seed, 0, fnv1a("dims")));
  std::vector<int> col_sizes, row_sizes;
  std::vector<int> col_bounds{0}, row_bounds{0};
  for (int j = 0; j < m_blocks; ++j) {
    col_sizes.push_back(1 + static_cast<int>(dims.next_below(max_block_dim)));
    col_bounds.push_back(col_bounds.back() + col_sizes.back());
  }
  for (int i = 0; i < n_blocks; ++i) {
    row_sizes.push_back(1 + static_cast<int>(dims.next_below(max_block_dim)));
    row_bounds.push_back(row_bounds.back() + row_sizes.back());
  }
  const BlockPartition cp(col_bounds);
  const BlockPartition rp(row_bounds);

  RngStream entries(stream_key(seed, 1, fnv1a("entries")));
  std::vector<Triplet> trips;
  for (int r = 0; r < rp.dim(); ++r)
    for (int c = 0; c < cp.dim(); ++c)
      if (entries.next_double() < density)
        trips.push_back({r, c, entries.next_uniform(-1.0, 1.0)});
  // Guarantee no empty row or column so every block participates.
  for (int r = 0; r < rp.dim(); ++r) trips.push_back({r, r % cp.dim(), 0.5});
  const BlockMatrix A(rp, cp, trips);

  RngStream atom_rng(stream_key(seed, 2, fnv1a("atoms")));
  std::vector<ProxAtom> g, fstar;
  for (int j = 0; j < m_blocks; ++j) {
    const int d = col_sizes[j];
    switch (j % 3) {
      case 0:
        g.push_back(ProxAtom::half_square(d));
        break;
      case 1: {
        Vec w(static_cast<std::size_t>(d));
        for (double& v : w) v = atom_rng.next_uniform(0.1, 2.0);
        g.push_back(ProxAtom::diag_quadratic(std::move(w)));
        break;
      }
      default:
        g.push_back(ProxAtom::zero(d));
    }
  }
  for (int i = 0; i < n_blocks; ++i) {
    const int d = row_sizes[i];
    switch (i % 3) {
      case 0: {
        Vec c(static_cast<std::size_t>(d)), lo(static_cast<std::size_t>(d), -1.5),
            hi(static_cast<std::size_t>(d), 0.5);
        for (double& v : c) v = atom_rng.next_uniform(-1.0, 1.0);
        fstar.push_back(ProxAtom::linear_over_box(std::move(c), std::move(lo), std::move(hi)));
        break;
      }
      case 1:
        fstar.push_back(ProxAtom::half_square(d));
        break;
      default: {
        Vec w(static_cast<std::size_t>(d));
        for (double& v : w) v = atom_rng.next_uniform(0.1, 2.0);
        fstar.push_back(ProxAtom::diag_quadratic(std::move(w)));
      }
    }
  }
  return dspdhg::make_problem(A, std::move(g), std::move(fstar), {},
                              "random(" + std::to_string(seed) + ")");
}

LibsvmDataset synth_dataset(std::uint64_t seed, int samples, int features, double density) {
  using dspdhg::RngStream;
  using dspdhg::fnv1a;
  using dspdhg::stream_key;

  RngStream plane(stream_key(seed, 0, fnv1a("plane")));
  Eigen::VectorXd w(features);
  for (int j = 0; j < features; ++j) w[j] = plane.next_normal();

  LibsvmDataset data;
  data.dim = features;
  for (int i = 0; i < samples; ++i) {
    RngStream row(stream_key(seed, static_cast<std::uint64_t>(i) + 1, fnv1a("sample")));
    std::vector<std::pair<int, double>> feats;
    double margin = 0.0;
    for (int j = 0; j < features; ++j) {
      if (row.next_double() >= density) continue;
      const double v = row.next_uniform(-1.0, 1.0);
      feats.emplace_back(j, v);
      margin += v * w[j];
    }
    if (feats.empty()) {
      const int j = i % features;
      const double v = row.next_uniform(-1.0, 1.0);
      feats.emplace_back(j, v);
      margin = v * w[j];
    }
    data.samples.push_back(std::move(feats));
    data.labels.push_back(margin >= 0.0 ? 1 : -1);
  }
  // Classification data needs both classes.
  if (std::all_of(data.labels.begin(), data.labels.end(),
                  [&](int l) { return l == data.labels[0]; }))
    data.labels[0] = -data.labels[0];
  return data;
}

std::optional<SvmOracle> svm_enumeration_oracle(const LibsvmDataset& data, double C) {
  const int n = static_cast<int>(data.samples.size());
  if (n > 10) throw std::invalid_argument("svm_enumeration_oracle: instance too large");

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, data.dim);
  for (int i = 0; i < n; ++i)
    for (const auto& [j, v] : data.samples[i]) X(i, j) += v;
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = data.labels[i];
  const Eigen::MatrixXd Q =
      b.asDiagonal() * (X * X.transpose()) * b.asDiagonal();  // Q_ij = b_i b_j <a_i, a_j>

  const double tol = 1e-9;
  double best = -kInf;
  Eigen::VectorXd best_alpha;
  bool found = false;

  std::vector<int> pattern(n, 0);  // 0 = at 0, 1 = free, 2 = at C
  const long total = static_cast<long>(std::pow(3.0, n));
  for (long code = 0; code < total; ++code) {
    long rem = code;
    for (int i = 0; i < n; ++i) {
      pattern[i] = static_cast<int>(rem % 3);
      rem /= 3;
    }
    std::vector<int> F;
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (pattern[i] == 1) F.push_back(i);
      if (pattern[i] == 2) alpha[i] = C;
    }

    double nu = 0.0;
    if (!F.empty()) {
      // Stationarity on F plus the balance constraint sum_i alpha_i b_i = 0.
      const int nf = static_cast<int>(F.size());
      Eigen::MatrixXd K(nf + 1, nf + 1);
      Eigen::VectorXd rhs(nf + 1);
      for (int a = 0; a < nf; ++a) {
        for (int c = 0; c < nf; ++c) K(a, c) = Q(F[a], F[c]);
        K(a, nf) = b[F[a]];
        K(nf, a) = b[F[a]];
        double fixed = 0.0;
        for (int i = 0; i < n; ++i)
          if (pattern[i] == 2) fixed += Q(F[a], i) * C;
        rhs[a] = 1.0 - fixed;
      }
      K(nf, nf) = 0.0;
      double bound_sum = 0.0;
      for (int i = 0; i < n; ++i)
        if (pattern[i] == 2) bound_sum += b[i] * C;
      rhs[nf] = -bound_sum;

      const Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd sol = lu.solve(rhs);
      bool ok = true;
      for (int a = 0; a < nf; ++a) {
        alpha[F[a]] = sol[a];
        if (sol[a] < -tol || sol[a] > C + tol) ok = false;
      }
      if (!ok) continue;
      nu = sol[nf];
    } else {
      double bound_sum = 0.0;
      for (int i = 0; i < n; ++i) bound_sum += alpha[i] * b[i];
      if (std::fabs(bound_sum) > tol) continue;
      // nu only has to satisfy the sign conditions below; intersect them.
      double lo = -kInf, hi = kInf;
      const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - Q * alpha;
      for (int i = 0; i < n; ++i) {
        // at 0: grad_i - nu b_i <= 0; at C: >= 0
        if (pattern[i] == 0) {
          if (b[i] > 0) lo = std::max(lo, grad[i]); else hi = std::min(hi, -grad[i]);
        } else {
          if (b[i] > 0) hi = std::min(hi, grad[i]); else lo = std::max(lo, -grad[i]);
        }
      }
      if (lo > hi + tol) continue;
      nu = std::min(std::max(0.0, lo), hi);
    }

    // Sign conditions at the bounds.
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(n) - Q * alpha;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      const double gi = grad[i] - nu * b[i];
      if (pattern[i] == 0 && gi > tol) ok = false;
      if (pattern[i] == 2 && gi < -tol) ok = false;
    }
    if (!ok) continue;

    const double value = alpha.sum() - 0.5 * alpha.dot(Q * alpha);
    if (value > best) {
      best = value;
      best_alpha = alpha;
      found = true;
    }
  }
  if (!found) return std::nullopt;

  SvmOracle oracle;
  oracle.objective = best;
  oracle.alpha = best_alpha;
  oracle.w = X.transpose() * (b.asDiagonal() * best_alpha);
  // The bias minimizes the piecewise-linear hinge sum; a breakpoint attains it.
  const Eigen::VectorXd margins = X * oracle.w;
  double best_bias = 0.0, best_primal = kInf;
  for (int i = 0; i < n; ++i) {
    const double d = b[i] - margins[i];
    double hinges = 0.0;
    for (int r = 0; r < n; ++r) hinges += std::max(0.0, 1.0 - b[r] * (margins[r] + d));
    const double primal = 0.5 * oracle.w.squaredNorm() + C * hinges;
    if (primal < best_primal) {
      best_primal = primal;
      best_bias = d;
    }
  }
  oracle.bias = best_bias;
  return oracle;
}

MpcOracle mpc_condensed_oracle(const dspdhg::MpcSpec& spec, int iterations) {
  const int nx = spec.n_x;
  const int nu = spec.n_u;
  const int T = spec.horizon;

  Eigen::MatrixXd Asys(nx, nx), Bsys(nx, nu);
  for (int r = 0; r < nx; ++r)
    for (int c = 0; c < nx; ++c) Asys(r, c) = spec.a_sys[static_cast<std::size_t>(r) * nx + c];
  for (int r = 0; r < nx; ++r)
    for (int c = 0; c < nu; ++c) Bsys(r, c) = spec.b_sys[static_cast<std::size_t>(r) * nu + c];

  // Stack x_t = A^t x_init + sum_{j<t} A^{t-1-j} B u_j as x = F u + base.
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(T * nx, T * nu);
  Eigen::VectorXd base(T * nx);
  Eigen::MatrixXd Apow = Eigen::MatrixXd::Identity(nx, nx);
  const Eigen::VectorXd x0 = to_eigen(spec.x_init);
  for (int t = 0; t < T; ++t) {
    Apow = Asys * Apow;  // A^{t+1}
    base.segment(t * nx, nx) = Apow * x0;
    Eigen::MatrixXd AjB = Bsys;
    for (int j = t; j >= 0; --j) {
      F.block(t * nx, j * nu, nx, nu) = AjB;
      if (j > 0) AjB = Asys * AjB;
    }
  }

  Eigen::VectorXd hstack(T * nx);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < nx; ++i) hstack[t * nx + i] = spec.h[static_cast<std::size_t>(i)];

  // Objective (no 1/2 convention): (Fu+base)' H (Fu+base) + r u'u over the input box.
  const Eigen::MatrixXd H = hstack.asDiagonal();
  const Eigen::MatrixXd Gq = 2.0 * (F.transpose() * H * F) +
                             2.0 * spec.r_weight * Eigen::MatrixXd::Identity(T * nu, T * nu);
  const Eigen::VectorXd gl = 2.0 * F.transpose() * (H * base);
  const double L = Gq.operatorNorm();

  Eigen::VectorXd ulo(T * nu), uhi(T * nu);
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < nu; ++i) {
      ulo[t * nu + i] = -spec.u_bar[static_cast<std::size_t>(i)];
      uhi[t * nu + i] = spec.u_bar[static_cast<std::size_t>(i)];
    }
  auto project = [&](Eigen::VectorXd v) {
    return v.cwiseMax(ulo).cwiseMin(uhi);
  };

  // FISTA on the strongly convex condensed problem.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(T * nu);
  Eigen::VectorXd z = u;
  double tk = 1.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd grad = Gq * z + gl;
    const Eigen::VectorXd u_next = project(z - grad / L);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    z = u_next + ((tk - 1.0) / t_next) * (u_next - u);
    u = u_next;
    tk = t_next;
  }

  MpcOracle oracle;
  oracle.grad_map_norm = (u - project(u - (Gq * u + gl) / L)).norm();
  const Eigen::VectorXd xs = F * u + base;
  oracle.objective = xs.dot(H * xs) + spec.r_weight * u.squaredNorm();

  oracle.state_box_margin = kInf;
  for (int t = 0; t < T; ++t)
    for (int i = 0; i < nx; ++i)
      oracle.state_box_margin = std::min(
          oracle.state_box_margin, spec.x_bar[static_cast<std::size_t>(i)] - std::fabs(xs[t * nx + i]));

  oracle.primal.assign(static_cast<std::size_t>(T * (nx + nu)), 0.0);
  for (int i = 0; i < T * nx; ++i) oracle.primal[static_cast<std::size_t>(i)] = xs[i];
  for (int i = 0; i < T * nu; ++i) oracle.primal[static_cast<std::size_t>(T * nx + i)] = u[i];
  return oracle;
}

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw std::invalid_argument("fit_line: need >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * xs[i];
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - my) * (ys[i] - my);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median: empty");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string temp_path(const std::string& name) {
  static std::uint64_t counter = 0;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("dspdhg_tests_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return (dir / (std::to_string(counter++) + "_" + name)).string();
}

}  // namespace testsupport
