#include "dspdhg/prox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dspdhg/rng.hpp"

namespace dspdhg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void check_box(const Vec& lo, const Vec& hi) {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw std::invalid_argument("ProxAtom: empty box (lo > hi)");
}

void check_weights(const Vec& w) {
  for (double wi : w)
    if (!(wi >= 0.0)) throw std::invalid_argument("ProxAtom: quadratic weights must be >= 0");
}

}  // namespace

ProxAtom ProxAtom::zero(int dim) {
  if (dim <= 0) throw std::invalid_argument("ProxAtom: dim must be positive");
  return ProxAtom(Kind::zero, dim);
}

ProxAtom ProxAtom::half_square(int dim) {
  if (dim <= 0) throw std::invalid_argument("ProxAtom: dim must be positive");
  return ProxAtom(Kind::half_square, dim);
}

ProxAtom ProxAtom::diag_quadratic(Vec w) {
  if (w.empty()) throw std::invalid_argument("ProxAtom: dim must be positive");
  check_weights(w);
  ProxAtom a(Kind::diag_quadratic, static_cast<int>(w.size()));
  a.w_ = std::move(w);
  return a;
}

ProxAtom ProxAtom::linear_over_box(Vec c, Vec lo, Vec hi) {
  if (c.empty() || c.size() != lo.size() || c.size() != hi.size())
    throw std::invalid_argument("ProxAtom: parameter dimensions disagree");
  check_box(lo, hi);
  ProxAtom a(Kind::linear_over_box, static_cast<int>(c.size()));
  a.c_ = std::move(c);
  a.lo_ = std::move(lo);
  a.hi_ = std::move(hi);
  return a;
}

ProxAtom ProxAtom::diag_quad_over_box(Vec w, Vec lo, Vec hi) {
  if (w.empty() || w.size() != lo.size() || w.size() != hi.size())
    throw std::invalid_argument("ProxAtom: parameter dimensions disagree");
  check_weights(w);
  check_box(lo, hi);
  ProxAtom a(Kind::diag_quad_over_box, static_cast<int>(w.size()));
  a.w_ = std::move(w);
  a.lo_ = std::move(lo);
  a.hi_ = std::move(hi);
  return a;
}

ProxAtom ProxAtom::hinge(int dim, double scale) {
  if (dim <= 0) throw std::invalid_argument("ProxAtom: dim must be positive");
  if (!(scale >= 0.0)) throw std::invalid_argument("ProxAtom: hinge scale must be >= 0");
  ProxAtom a(Kind::hinge, dim);
  a.scale_ = scale;
  return a;
}

void ProxAtom::prox(double t, std::span<const double> v, std::span<double> out) const {
  if (static_cast<int>(v.size()) != dim_ || static_cast<int>(out.size()) != dim_)
    throw std::invalid_argument("ProxAtom::prox: dimension mismatch");
  if (!(t > 0.0)) throw std::invalid_argument("ProxAtom::prox: step must be positive");
  switch (kind_) {
    case Kind::zero:
      for (int i = 0; i < dim_; ++i) out[i] = v[i];
      break;
    case Kind::half_square:
      for (int i = 0; i < dim_; ++i) out[i] = v[i] / (1.0 + t);
      break;
    case Kind::diag_quadratic:
      for (int i = 0; i < dim_; ++i) out[i] = v[i] / (1.0 + 2.0 * t * w_[i]);
      break;
    case Kind::linear_over_box:
      for (int i = 0; i < dim_; ++i) out[i] = clamp(v[i] - t * c_[i], lo_[i], hi_[i]);
      break;
    case Kind::diag_quad_over_box:
      for (int i = 0; i < dim_; ++i) out[i] = clamp(v[i] / (1.0 + 2.0 * t * w_[i]), lo_[i], hi_[i]);
      break;
    case Kind::hinge:
      // Flat for v > 1, kink at 1, slope -scale below: shift by t*scale,
      // then cap the crossing region at 1.
      for (int i = 0; i < dim_; ++i) {
        if (v[i] > 1.0)
          out[i] = v[i];
        else if (v[i] + t * scale_ < 1.0)
          out[i] = v[i] + t * scale_;
        else
          out[i] = 1.0;
      }
      break;
  }
}

Vec ProxAtom::prox(double t, std::span<const double> v) const {
  Vec out(static_cast<std::size_t>(dim_));
  prox(t, v, out);
  return out;
}

double ProxAtom::eval(std::span<const double> v, double slack) const {
  if (static_cast<int>(v.size()) != dim_)
    throw std::invalid_argument("ProxAtom::eval: dimension mismatch");
  if (has_box()) {
    for (int i = 0; i < dim_; ++i)
      if (v[i] < lo_[i] - slack || v[i] > hi_[i] + slack) return kInf;
  }
  return eval_projected(v);
}

double ProxAtom::box_distance_sq(std::span<const double> v) const {
  if (!has_box()) return 0.0;
  double d = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double r = v[i] - clamp(v[i], lo_[i], hi_[i]);
    d += r * r;
  }
  return d;
}

double ProxAtom::eval_projected(std::span<const double> v) const {
  double s = 0.0;
  switch (kind_) {
    case Kind::zero:
      break;
    case Kind::half_square:
      for (int i = 0; i < dim_; ++i) s += 0.5 * v[i] * v[i];
      break;
    case Kind::diag_quadratic:
      for (int i = 0; i < dim_; ++i) s += w_[i] * v[i] * v[i];
      break;
    case Kind::linear_over_box:
      for (int i = 0; i < dim_; ++i) s += c_[i] * clamp(v[i], lo_[i], hi_[i]);
      break;
    case Kind::diag_quad_over_box:
      for (int i = 0; i < dim_; ++i) {
        const double u = clamp(v[i], lo_[i], hi_[i]);
        s += w_[i] * u * u;
      }
      break;
    case Kind::hinge:
      for (int i = 0; i < dim_; ++i) s += scale_ * std::max(0.0, 1.0 - v[i]);
      break;
  }
  return s;
}

std::string ProxAtom::kind_name() const {
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::half_square: return "half_square";
    case Kind::diag_quadratic: return "diag_quadratic";
    case Kind::linear_over_box: return "linear_over_box";
    case Kind::diag_quad_over_box: return "diag_quad_over_box";
    case Kind::hinge: return "hinge";
  }
  return "?";
}

void check_prox_first_order(const ProxAtom& atom, double t, std::span<const double> v, int probes,
                            std::uint64_t seed, double tol) {
  const Vec p = atom.prox(t, v);
  const double fp = atom.eval(p, 1e-9);
  if (!std::isfinite(fp)) throw std::runtime_error("prox output violates its own box");
  double obj = fp;
  for (int i = 0; i < atom.dim(); ++i) obj += (p[i] - v[i]) * (p[i] - v[i]) / (2.0 * t);

  RngStream rng(stream_key(seed, fnv1a("prox_check")));
  Vec q(p.size());
  for (int k = 0; k < probes; ++k) {
    const double radius = (k % 2 == 0) ? 1e-3 : 1.0;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = p[i] + radius * rng.next_normal();
    if (atom.has_box())
      for (std::size_t i = 0; i < q.size(); ++i)
        q[i] = std::min(std::max(q[i], atom.lo()[i]), atom.hi()[i]);
    double alt = atom.eval(q, 1e-9);
    for (std::size_t i = 0; i < q.size(); ++i) alt += (q[i] - v[i]) * (q[i] - v[i]) / (2.0 * t);
    if (alt < obj - tol * (1.0 + std::fabs(obj)))
      throw std::runtime_error("prox output is not a minimizer (atom " + atom.kind_name() + ")");
  }
}

}  // namespace dspdhg
