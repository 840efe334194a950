#include "dspdhg/problem.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dspdhg/rng.hpp"

namespace dspdhg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_atom_dims(const std::vector<ProxAtom>& atoms, const BlockPartition& part,
                     const char* side) {
  if (static_cast<int>(atoms.size()) != part.count())
    throw std::invalid_argument(std::string("SaddleProblem: ") + side +
                                " atom count does not match block count");
  for (int b = 0; b < part.count(); ++b)
    if (atoms[b].dim() != part.size(b))
      throw std::invalid_argument(std::string("SaddleProblem: ") + side + " atom " +
                                  std::to_string(b) + " dimension does not match its block");
}

}  // namespace

void validate_problem(const SaddleProblem& problem) {
  check_atom_dims(problem.g, problem.A.col_partition(), "primal");
  check_atom_dims(problem.fstar, problem.A.row_partition(), "dual");
  if (!problem.f.empty()) check_atom_dims(problem.f, problem.A.row_partition(), "reporting");

  RngStream rng(stream_key(0x5eedULL, fnv1a("problem_probe")));
  auto spot_check = [&rng](const ProxAtom& atom) {
    Vec v(static_cast<std::size_t>(atom.dim()));
    for (double& vi : v) vi = rng.next_normal();
    check_prox_first_order(atom, 0.7, v, 4, rng.next_u64());
  };
  for (const ProxAtom& atom : problem.g) spot_check(atom);
  for (const ProxAtom& atom : problem.fstar) spot_check(atom);
}

SaddleProblem make_problem(BlockMatrix A, std::vector<ProxAtom> g, std::vector<ProxAtom> fstar,
                           std::vector<ProxAtom> f, std::string name) {
  SaddleProblem p{std::move(A), std::move(g), std::move(fstar), std::move(f), std::move(name)};
  validate_problem(p);
  return p;
}

double saddle_value(const SaddleProblem& problem, std::span<const double> x,
                    std::span<const double> y, const Vec* ax_hint) {
  const BlockPartition& cp = problem.A.col_partition();
  const BlockPartition& rp = problem.A.row_partition();
  if (static_cast<int>(x.size()) != cp.dim() || static_cast<int>(y.size()) != rp.dim())
    throw std::invalid_argument("saddle_value: dimension mismatch");

  double gx = 0.0;
  for (int j = 0; j < cp.count(); ++j)
    gx += problem.g[j].eval(x.subspan(cp.begin(j), cp.size(j)));

  double fy = 0.0;
  for (int i = 0; i < rp.count(); ++i)
    fy += problem.fstar[i].eval(y.subspan(rp.begin(i), rp.size(i)));

  // <Ax, y> is finite; the indicators decide the extended value.
  if (gx == kInf && fy == kInf) return std::numeric_limits<double>::quiet_NaN();
  if (gx == kInf) return kInf;
  if (fy == kInf) return -kInf;

  Vec ax_local;
  const Vec* ax = ax_hint;
  if (ax == nullptr) {
    ax_local = problem.A.matvec(x);
    ax = &ax_local;
  }
  return gx + dot(*ax, y) - fy;
}

std::optional<double> gap_kernel(const SaddleProblem& problem, const PrimalDualPoint& zbar,
                                 const PrimalDualPoint& z) {
  const double a = saddle_value(problem, zbar.x, z.y);
  const double b = saddle_value(problem, z.x, zbar.y);
  if (std::isnan(a) || std::isnan(b)) return std::nullopt;
  if (std::isinf(a) && std::isinf(b) && a == b) return std::nullopt;  // inf - inf
  return a - b;
}

double kkt_residual(const SaddleProblem& problem, const PrimalDualPoint& z, double ref_step) {
  if (!(ref_step > 0.0)) throw std::invalid_argument("kkt_residual: ref_step must be positive");
  const BlockPartition& cp = problem.A.col_partition();
  const BlockPartition& rp = problem.A.row_partition();
  if (static_cast<int>(z.x.size()) != cp.dim() || static_cast<int>(z.y.size()) != rp.dim())
    throw std::invalid_argument("kkt_residual: dimension mismatch");

  const Vec ax = problem.A.matvec(z.x);
  const Vec aty = problem.A.rmatvec(z.y);

  double r2 = 0.0;
  Vec in, out;
  for (int j = 0; j < cp.count(); ++j) {
    const int b = cp.begin(j);
    const int d = cp.size(j);
    in.resize(d);
    out.resize(d);
    for (int i = 0; i < d; ++i) in[i] = z.x[b + i] - ref_step * aty[b + i];
    problem.g[j].prox(ref_step, in, out);
    for (int i = 0; i < d; ++i) {
      const double diff = z.x[b + i] - out[i];
      r2 += diff * diff;
    }
  }
  for (int i = 0; i < rp.count(); ++i) {
    const int b = rp.begin(i);
    const int d = rp.size(i);
    in.resize(d);
    out.resize(d);
    for (int k = 0; k < d; ++k) in[k] = z.y[b + k] + ref_step * ax[b + k];
    problem.fstar[i].prox(ref_step, in, out);
    for (int k = 0; k < d; ++k) {
      const double diff = z.y[b + k] - out[k];
      r2 += diff * diff;
    }
  }
  return std::sqrt(r2) / (1.0 + norm2(z.x) + norm2(z.y));
}

ObjectiveReport primal_objective(const SaddleProblem& problem, std::span<const double> x) {
  const BlockPartition& cp = problem.A.col_partition();
  if (static_cast<int>(x.size()) != cp.dim())
    throw std::invalid_argument("primal_objective: dimension mismatch");

  ObjectiveReport rep;
  if (problem.f.empty()) return rep;

  double value = 0.0;
  for (int j = 0; j < cp.count(); ++j)
    value += problem.g[j].eval(x.subspan(cp.begin(j), cp.size(j)));

  const Vec ax = problem.A.matvec(x);
  const BlockPartition& rp = problem.A.row_partition();
  double viol2 = 0.0;
  for (int i = 0; i < rp.count(); ++i) {
    const auto axi = std::span<const double>(ax).subspan(rp.begin(i), rp.size(i));
    value += problem.f[i].eval_projected(axi);
    viol2 += problem.f[i].box_distance_sq(axi);
  }
  rep.value = value;
  rep.infeasibility = std::sqrt(viol2);
  return rep;
}

}  // namespace dspdhg
