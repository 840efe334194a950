#include "dspdhg/instances.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dspdhg/rng.hpp"
#include "dspdhg/sampling.hpp"

namespace dspdhg {

namespace {

[[noreturn]] void parse_error(const std::string& path, long line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

LibsvmDataset load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);

  LibsvmDataset data;
  std::vector<double> raw_labels;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    std::istringstream ls(line);
    double label;
    if (!(ls >> label)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;  // blank
      parse_error(path, line_no, "expected a numeric label");
    }
    raw_labels.push_back(label);
    std::vector<std::pair<int, double>> feats;
    std::string tok;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) parse_error(path, line_no, "expected idx:value, got '" + tok + "'");
      int idx = 0;
      double val = 0.0;
      try {
        std::size_t used = 0;
        idx = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument("");
        const std::string vs = tok.substr(colon + 1);
        val = std::stod(vs, &used);
        if (used != vs.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        parse_error(path, line_no, "malformed feature '" + tok + "'");
      }
      if (idx < 1) parse_error(path, line_no, "feature indices are 1-based");
      feats.emplace_back(idx - 1, val);
      data.dim = std::max(data.dim, idx);
    }
    data.samples.push_back(std::move(feats));
  }
  if (data.samples.empty()) throw std::runtime_error(path + ": no samples");

  std::set<double> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() != 2)
    throw std::runtime_error(path + ": expected exactly two label values, found " +
                             std::to_string(distinct.size()));
  const double neg = *distinct.begin();
  data.labels.reserve(raw_labels.size());
  for (double l : raw_labels) data.labels.push_back(l == neg ? -1 : +1);
  return data;
}

void save_libsvm(const LibsvmDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[64];
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    out << (data.labels[i] > 0 ? "+1" : "-1");
    for (const auto& [idx, val] : data.samples[i]) {
      std::snprintf(buf, sizeof(buf), " %d:%.17g", idx + 1, val);
      out << buf;
    }
    out << "\n";
  }
}

SaddleProblem build_svm(const LibsvmDataset& data, double C) {
  if (!(C > 0.0)) throw std::invalid_argument("build_svm: C must be positive");
  const int n = static_cast<int>(data.samples.size());
  const int m = data.dim;

  std::vector<Triplet> entries;
  for (int i = 0; i < n; ++i) {
    const double b = data.labels[i];
    for (const auto& [idx, val] : data.samples[i]) entries.push_back({i, idx, b * val});
    entries.push_back({i, m, b});  // intercept column
  }
  BlockMatrix A(BlockPartition::scalar(n), BlockPartition::scalar(m + 1), entries);

  std::vector<ProxAtom> g;
  g.reserve(m + 1);
  for (int j = 0; j < m; ++j) g.push_back(ProxAtom::half_square(1));
  g.push_back(ProxAtom::zero(1));  // intercept is free

  std::vector<ProxAtom> fstar, f;
  fstar.reserve(n);
  f.reserve(n);
  for (int i = 0; i < n; ++i) {
    fstar.push_back(ProxAtom::linear_over_box({1.0}, {-C}, {0.0}));
    f.push_back(ProxAtom::hinge(1, C));
  }
  return make_problem(std::move(A), std::move(g), std::move(fstar), std::move(f),
                      "svm(n=" + std::to_string(n) + ",m=" + std::to_string(m) + ")");
}

MpcSpec make_mpc_spec(std::uint64_t seed, int n_x, int n_u, int horizon) {
  if (n_x < 1 || n_u < 1 || horizon < 1)
    throw std::invalid_argument("make_mpc_spec: dimensions and horizon must be >= 1");

  MpcSpec spec;
  spec.n_x = n_x;
  spec.n_u = n_u;
  spec.horizon = horizon;
  spec.seed = seed;

  // Stable dynamics by rejection on the spectral radius.
  bool stable = false;
  for (int attempt = 0; attempt < 1000 && !stable; ++attempt) {
    RngStream rng(stream_key(seed, fnv1a("a_sys"), static_cast<std::uint64_t>(attempt)));
    spec.a_sys.assign(static_cast<std::size_t>(n_x) * n_x, 0.0);
    for (int i = 0; i < n_x; ++i)
      for (int j = 0; j < n_x; ++j)
        spec.a_sys[i * n_x + j] = (i == j ? 0.5 : 0.0) + 0.1 * rng.next_normal();
    Eigen::MatrixXd M(n_x, n_x);
    for (int i = 0; i < n_x; ++i)
      for (int j = 0; j < n_x; ++j) M(i, j) = spec.a_sys[i * n_x + j];
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(M, false).eigenvalues();
    double radius = 0.0;
    for (int i = 0; i < n_x; ++i) radius = std::max(radius, std::abs(ev[i]));
    stable = radius < 1.0;
  }
  if (!stable) throw std::runtime_error("make_mpc_spec: no stable dynamics found in 1000 draws");

  {
    RngStream rng(stream_key(seed, fnv1a("b_sys")));
    spec.b_sys.resize(static_cast<std::size_t>(n_x) * n_u);
    for (double& v : spec.b_sys) v = rng.next_normal();
  }
  {
    RngStream rng(stream_key(seed, fnv1a("h")));
    spec.h.resize(static_cast<std::size_t>(n_x));
    for (double& v : spec.h) v = rng.next_uniform(0.0, 10.0);
    const int zeros = n_x - static_cast<int>(std::lround(0.7 * n_x));
    if (zeros > 0) {
      RngStream mask_rng(stream_key(seed, fnv1a("h_mask")));
      for (int i : draw_subset(mask_rng, n_x, zeros)) spec.h[i] = 0.0;
    }
  }
  {
    RngStream rng(stream_key(seed, fnv1a("x_bar")));
    spec.x_bar.resize(static_cast<std::size_t>(n_x));
    for (double& v : spec.x_bar) v = rng.next_uniform(1.0, 2.0);
  }
  {
    RngStream rng(stream_key(seed, fnv1a("u_bar")));
    spec.u_bar.resize(static_cast<std::size_t>(n_u));
    for (double& v : spec.u_bar) v = rng.next_uniform(0.0, 0.1);
  }
  {
    RngStream rng(stream_key(seed, fnv1a("x_init")));
    spec.x_init.resize(static_cast<std::size_t>(n_x));
    for (int i = 0; i < n_x; ++i)
      spec.x_init[i] = rng.next_uniform(-0.5 * spec.x_bar[i], 0.5 * spec.x_bar[i]);
  }
  return spec;
}

SaddleProblem build_mpc(const MpcSpec& spec) {
  const int nx = spec.n_x;
  const int nu = spec.n_u;
  const int T = spec.horizon;
  if (static_cast<int>(spec.a_sys.size()) != nx * nx ||
      static_cast<int>(spec.b_sys.size()) != nx * nu)
    throw std::invalid_argument("build_mpc: system matrices do not match the dimensions");

  // Primal blocks: states x_1..x_T, then controls u_0..u_{T-1}.
  std::vector<int> col_bounds{0};
  for (int t = 0; t < T; ++t) col_bounds.push_back(col_bounds.back() + nx);
  for (int t = 0; t < T; ++t) col_bounds.push_back(col_bounds.back() + nu);
  BlockPartition col_part(col_bounds);
  BlockPartition row_part = BlockPartition::uniform(T, nx);

  const auto state_col = [&](int t) { return t * nx; };        // column of x_{t+1} block t
  const auto control_col = [&](int t) { return T * nx + t * nu; };

  std::vector<Triplet> entries;
  for (int t = 0; t < T; ++t) {
    const int row0 = t * nx;
    for (int i = 0; i < nx; ++i) entries.push_back({row0 + i, state_col(t) + i, 1.0});
    if (t >= 1)
      for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nx; ++j)
          entries.push_back({row0 + i, state_col(t - 1) + j, -spec.a_sys[i * nx + j]});
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nu; ++j)
        entries.push_back({row0 + i, control_col(t) + j, -spec.b_sys[i * nu + j]});
  }
  BlockMatrix A(row_part, col_part, entries);

  std::vector<ProxAtom> g;
  g.reserve(2 * T);
  Vec neg_xbar(spec.x_bar.size()), neg_ubar(spec.u_bar.size());
  for (std::size_t i = 0; i < neg_xbar.size(); ++i) neg_xbar[i] = -spec.x_bar[i];
  for (std::size_t i = 0; i < neg_ubar.size(); ++i) neg_ubar[i] = -spec.u_bar[i];
  for (int t = 0; t < T; ++t) g.push_back(ProxAtom::diag_quad_over_box(spec.h, neg_xbar, spec.x_bar));
  const Vec r_weights(static_cast<std::size_t>(nu), spec.r_weight);
  for (int t = 0; t < T; ++t)
    g.push_back(ProxAtom::diag_quad_over_box(r_weights, neg_ubar, spec.u_bar));

  // c_0 = A_sys x_init absorbs the known initial state; later stages are
  // homogeneous.
  Vec c0(static_cast<std::size_t>(nx), 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j) c0[i] += spec.a_sys[i * nx + j] * spec.x_init[j];

  const double inf = std::numeric_limits<double>::infinity();
  const Vec c_zero(static_cast<std::size_t>(nx), 0.0);
  std::vector<ProxAtom> fstar, f;
  fstar.reserve(T);
  f.reserve(T);
  for (int t = 0; t < T; ++t) {
    const Vec& ct = (t == 0) ? c0 : c_zero;
    fstar.push_back(ProxAtom::linear_over_box(ct, Vec(static_cast<std::size_t>(nx), -inf),
                                              Vec(static_cast<std::size_t>(nx), inf)));
    f.push_back(ProxAtom::linear_over_box(Vec(static_cast<std::size_t>(nx), 0.0), ct, ct));
  }

  return make_problem(std::move(A), std::move(g), std::move(fstar), std::move(f),
                      "mpc(nx=" + std::to_string(nx) + ",nu=" + std::to_string(nu) +
                          ",T=" + std::to_string(T) + ",seed=" + std::to_string(spec.seed) + ")");
}

SaddleProblem build_mpc(std::uint64_t seed, int n_x, int n_u, int horizon) {
  return build_mpc(make_mpc_spec(seed, n_x, n_u, horizon));
}

}  // namespace dspdhg
