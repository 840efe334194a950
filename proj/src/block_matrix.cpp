#include "dspdhg/block_matrix.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "dspdhg/rng.hpp"

namespace dspdhg {

BlockMatrix::BlockMatrix(BlockPartition row_partition, BlockPartition col_partition,
                         const std::vector<Triplet>& entries)
    : row_part_(std::move(row_partition)), col_part_(std::move(col_partition)) {
  const int nr = rows();
  const int nc = cols();
  std::vector<Triplet> t = entries;
  for (const Triplet& e : t) {
    if (e.row < 0 || e.row >= nr || e.col < 0 || e.col >= nc)
      throw std::invalid_argument("BlockMatrix: triplet index out of range");
  }

  std::sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> merged;
  merged.reserve(t.size());
  for (const Triplet& e : t) {
    if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
      merged.back().value += e.value;
    else
      merged.push_back(e);
  }

  row_ptr_.assign(static_cast<std::size_t>(nr) + 1, 0);
  csr_col_.resize(merged.size());
  csr_val_.resize(merged.size());
  for (const Triplet& e : merged) ++row_ptr_[e.row + 1];
  for (int i = 0; i < nr; ++i) row_ptr_[i + 1] += row_ptr_[i];
  for (std::size_t k = 0; k < merged.size(); ++k) {
    csr_col_[k] = merged[k].col;
    csr_val_[k] = merged[k].value;
  }

  // CSC view of the same entries, sorted by (col, row).
  std::sort(merged.begin(), merged.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  col_ptr_.assign(static_cast<std::size_t>(nc) + 1, 0);
  csc_row_.resize(merged.size());
  csc_val_.resize(merged.size());
  for (const Triplet& e : merged) ++col_ptr_[e.col + 1];
  for (int j = 0; j < nc; ++j) col_ptr_[j + 1] += col_ptr_[j];
  for (std::size_t k = 0; k < merged.size(); ++k) {
    csc_row_[k] = merged[k].row;
    csc_val_[k] = merged[k].value;
  }
}

std::int64_t BlockMatrix::row_block_nnz(int i) const {
  return row_ptr_[row_part_.end(i)] - row_ptr_[row_part_.begin(i)];
}

std::int64_t BlockMatrix::col_block_nnz(int j) const {
  return col_ptr_[col_part_.end(j)] - col_ptr_[col_part_.begin(j)];
}

void BlockMatrix::matvec(std::span<const double> x, std::span<double> y) const {
  if (static_cast<int>(x.size()) != cols() || static_cast<int>(y.size()) != rows())
    throw std::invalid_argument("BlockMatrix::matvec: dimension mismatch");
  for (int i = 0; i < rows(); ++i) {
    double s = 0.0;
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += csr_val_[k] * x[csr_col_[k]];
    y[i] = s;
  }
}

void BlockMatrix::rmatvec(std::span<const double> y, std::span<double> x) const {
  if (static_cast<int>(y.size()) != rows() || static_cast<int>(x.size()) != cols())
    throw std::invalid_argument("BlockMatrix::rmatvec: dimension mismatch");
  for (int j = 0; j < cols(); ++j) {
    double s = 0.0;
    for (std::int64_t k = col_ptr_[j]; k < col_ptr_[j + 1]; ++k) s += csc_val_[k] * y[csc_row_[k]];
    x[j] = s;
  }
}

Vec BlockMatrix::matvec(std::span<const double> x) const {
  Vec y(static_cast<std::size_t>(rows()));
  matvec(x, y);
  return y;
}

Vec BlockMatrix::rmatvec(std::span<const double> y) const {
  Vec x(static_cast<std::size_t>(cols()));
  rmatvec(y, x);
  return x;
}

void BlockMatrix::accumulate_col_block(int j, const double* delta, double scale,
                                       SparseAccumulator& out) const {
  const int c0 = col_part_.begin(j);
  const int c1 = col_part_.end(j);
  for (int c = c0; c < c1; ++c) {
    const double d = scale * delta[c - c0];
    if (d == 0.0) continue;
    for (std::int64_t k = col_ptr_[c]; k < col_ptr_[c + 1]; ++k) out.add(csc_row_[k], csc_val_[k] * d);
  }
}

void BlockMatrix::accumulate_row_block_transpose(int i, const double* dy, double scale,
                                                 SparseAccumulator& out) const {
  const int r0 = row_part_.begin(i);
  const int r1 = row_part_.end(i);
  for (int r = r0; r < r1; ++r) {
    const double d = scale * dy[r - r0];
    if (d == 0.0) continue;
    for (std::int64_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.add(csr_col_[k], csr_val_[k] * d);
  }
}

std::vector<Triplet> BlockMatrix::to_triplets() const {
  std::vector<Triplet> t;
  t.reserve(csr_val_.size());
  for (int i = 0; i < rows(); ++i)
    for (std::int64_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      t.push_back({i, csr_col_[k], csr_val_[k]});
  return t;
}

void incremental_matvec_update(const BlockMatrix& A, Vec& cache, std::span<const int> changed_cols,
                               std::span<const double> delta, double scale) {
  if (static_cast<int>(cache.size()) != A.rows() || static_cast<int>(delta.size()) != A.cols())
    throw std::invalid_argument("incremental_matvec_update: dimension mismatch");
  const BlockPartition& cp = A.col_partition();
  for (int j : changed_cols) {
    if (j < 0 || j >= A.col_blocks())
      throw std::invalid_argument("incremental_matvec_update: column block out of range");
    SparseAccumulator acc;  // block-local scatter kept simple; see solver for the fused path
    acc.resize(A.rows());
    A.accumulate_col_block(j, delta.data() + cp.begin(j), scale, acc);
    for (int r : acc.touched()) cache[r] += acc[r];
  }
}

namespace {

// Power iteration on A^T A restricted to (row_mask, col support listed in
// col_coords). Estimates sigma_max from the Rayleigh quotient ||A v||.
PowerResult restricted_power(const BlockMatrix& A, const std::vector<char>& row_mask,
                             const std::vector<char>& col_mask, const std::vector<int>& row_coords,
                             const std::vector<int>& col_coords, double tol, int max_iter,
                             std::uint64_t seed) {
  auto row_ptr = A.row_ptr();
  auto csr_col = A.csr_col();
  auto csr_val = A.csr_val();

  std::int64_t sub_nnz = 0;
  for (int r : row_coords)
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
      if (col_mask[csr_col[k]]) ++sub_nnz;
  if (sub_nnz == 0) return {0.0, true, 0};

  Vec v(static_cast<std::size_t>(A.cols()), 0.0);
  Vec w(static_cast<std::size_t>(A.rows()), 0.0);
  RngStream rng(stream_key(seed, fnv1a("spectral_norm")));
  double nv = 0.0;
  for (int c : col_coords) {
    v[c] = rng.next_normal();
    nv += v[c] * v[c];
  }
  nv = std::sqrt(nv);
  for (int c : col_coords) v[c] /= nv;

  double est = 0.0;
  double prev = -1.0;
  int it = 0;
  while (it < max_iter) {
    ++it;
    double nw = 0.0;
    for (int r : row_coords) {
      double s = 0.0;
      for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += csr_val[k] * v[csr_col[k]];
      w[r] = s;
      nw += s * s;
    }
    est = std::sqrt(nw);
    if (est == 0.0) return {0.0, true, it};  // start vector hit the null space

    for (int c : col_coords) v[c] = 0.0;
    for (int r : row_coords) {
      const double wr = w[r];
      for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
        const int c = csr_col[k];
        if (col_mask[c]) v[c] += csr_val[k] * wr;
      }
    }
    double nu = 0.0;
    for (int c : col_coords) nu += v[c] * v[c];
    nu = std::sqrt(nu);
    if (nu == 0.0) return {est, true, it};
    for (int c : col_coords) v[c] /= nu;

    if (prev >= 0.0 && std::fabs(est - prev) <= tol * est) return {est, true, it};
    prev = est;
  }
  (void)row_mask;
  return {est, false, it};
}

std::vector<int> block_coords(const BlockPartition& part, std::span<const int> blocks) {
  std::vector<int> coords;
  for (int b : blocks) {
    if (b < 0 || b >= part.count())
      throw std::invalid_argument("block set index out of range");
    for (int c = part.begin(b); c < part.end(b); ++c) coords.push_back(c);
  }
  return coords;
}

std::vector<char> coord_mask(int dim, const std::vector<int>& coords) {
  std::vector<char> mask(static_cast<std::size_t>(dim), 0);
  for (int c : coords) mask[c] = 1;
  return mask;
}

bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  int i = k - 1;
  while (i >= 0 && comb[i] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[i];
  for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  return true;
}

std::vector<int> iota_vec(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

PowerResult spectral_norm(const BlockMatrix& A, double tol, int max_iter, std::uint64_t seed) {
  if (A.nnz() == 0) return {0.0, true, 0};
  const std::vector<int> all_rows = iota_vec(A.rows());
  const std::vector<int> all_cols = iota_vec(A.cols());
  const std::vector<char> rmask(static_cast<std::size_t>(A.rows()), 1);
  const std::vector<char> cmask(static_cast<std::size_t>(A.cols()), 1);
  return restricted_power(A, rmask, cmask, all_rows, all_cols, tol, max_iter, seed);
}

PowerResult submatrix_spectral_norm(const BlockMatrix& A, std::span<const int> row_block_set,
                                    std::span<const int> col_block_set, double tol, int max_iter,
                                    std::uint64_t seed) {
  if (row_block_set.empty() || col_block_set.empty())
    throw std::invalid_argument("submatrix_spectral_norm: block sets must be nonempty");
  const std::vector<int> rc = block_coords(A.row_partition(), row_block_set);
  const std::vector<int> cc = block_coords(A.col_partition(), col_block_set);
  return restricted_power(A, coord_mask(A.rows(), rc), coord_mask(A.cols(), cc), rc, cc, tol,
                          max_iter, seed);
}

std::int64_t binomial_capped(int n, int k, std::int64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) stays exact: C(n-k+i, i) is an integer at every step.
    if (r > cap) return cap;
    r = r * (n - k + i) / i;
  }
  return std::min(r, cap);
}

namespace {

NormBound lambda_r_impl(const BlockMatrix& A, int r, std::int64_t enum_budget, double tol,
                        int max_iter, const PowerResult& full) {
  const int n = A.row_blocks();
  if (r < 1 || r > n) throw std::invalid_argument("lambda_r: r out of range");
  if (r == n) return {full.value, full.converged, full.iterations};
  if (binomial_capped(n, r, enum_budget + 1) > enum_budget)
    return {full.value, false, full.iterations};

  const std::vector<int> all_cols = iota_vec(A.col_blocks());
  NormBound out{0.0, true, full.iterations};
  std::vector<int> I = iota_vec(r);
  std::uint64_t idx = 0;
  do {
    const PowerResult p =
        submatrix_spectral_norm(A, I, all_cols, tol, max_iter, stream_key(1, fnv1a("lambda_r"), idx));
    out.value = std::max(out.value, p.value);
    out.iterations += p.iterations;
    out.exact = out.exact && p.converged;
    ++idx;
  } while (next_combination(I, n));
  return out;
}

NormBound lambda_rs_impl(const BlockMatrix& A, int r, int s, std::int64_t enum_budget, double tol,
                         int max_iter, const PowerResult& full) {
  const int n = A.row_blocks();
  const int m = A.col_blocks();
  if (r < 1 || r > n) throw std::invalid_argument("lambda_rs: r out of range");
  if (s < 1 || s > m) throw std::invalid_argument("lambda_rs: s out of range");
  if (r == n && s == m) return {full.value, full.converged, full.iterations};
  const std::int64_t ci = binomial_capped(n, r, enum_budget + 1);
  const std::int64_t cj = binomial_capped(m, s, enum_budget + 1);
  if (ci > enum_budget || cj > enum_budget || ci * cj > enum_budget)
    return {full.value, false, full.iterations};

  NormBound out{0.0, true, full.iterations};
  std::vector<int> I = iota_vec(r);
  std::uint64_t idx = 0;
  do {
    std::vector<int> J = iota_vec(s);
    do {
      const PowerResult p =
          submatrix_spectral_norm(A, I, J, tol, max_iter, stream_key(1, fnv1a("lambda_rs"), idx));
      out.value = std::max(out.value, p.value);
      out.iterations += p.iterations;
      out.exact = out.exact && p.converged;
      ++idx;
    } while (next_combination(J, m));
  } while (next_combination(I, n));
  return out;
}

}  // namespace

NormBound lambda_r(const BlockMatrix& A, int r, std::int64_t enum_budget, double tol, int max_iter) {
  return lambda_r_impl(A, r, enum_budget, tol, max_iter, spectral_norm(A, tol, max_iter));
}

NormBound lambda_rs(const BlockMatrix& A, int r, int s, std::int64_t enum_budget, double tol,
                    int max_iter) {
  return lambda_rs_impl(A, r, s, enum_budget, tol, max_iter, spectral_norm(A, tol, max_iter));
}

NormReport compute_norms(const BlockMatrix& A, int r, int s, std::int64_t enum_budget, double tol,
                         int max_iter) {
  const PowerResult full = spectral_norm(A, tol, max_iter);
  const NormBound lr = lambda_r_impl(A, r, enum_budget, tol, max_iter, full);
  const NormBound lrs = lambda_rs_impl(A, r, s, enum_budget, tol, max_iter, full);
  NormReport rep;
  rep.lambda = full.value;
  rep.lambda_exact = full.converged;
  rep.lambda_r = lr.value;
  rep.lambda_r_exact = lr.exact;
  rep.lambda_rs = lrs.value;
  rep.lambda_rs_exact = lrs.exact;
  rep.iterations_used = full.iterations + (lr.iterations - full.iterations) +
                        (lrs.iterations - full.iterations);
  return rep;
}

void write_matrix_market(std::ostream& out, int rows, int cols, const std::vector<Triplet>& entries) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << rows << " " << cols << " " << entries.size() << "\n";
  char buf[64];
  for (const Triplet& e : entries) {
    std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", e.row + 1, e.col + 1, e.value);
    out << buf;
  }
}

void write_matrix_market(std::ostream& out, const BlockMatrix& A) {
  write_matrix_market(out, A.rows(), A.cols(), A.to_triplets());
}

MatrixMarketData read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("matrix market: empty input");
  {
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    auto lower = [](std::string s) {
      for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return s;
    };
    if (tag != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate" ||
        lower(field) != "real" || lower(symmetry) != "general")
      throw std::runtime_error("matrix market: unsupported banner: " + line);
  }
  long line_no = 1;
  MatrixMarketData data;
  std::int64_t nnz = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ls(line);
    if (nnz < 0) {
      if (!(ls >> data.rows >> data.cols >> nnz) || data.rows < 0 || data.cols < 0 || nnz < 0)
        throw std::runtime_error("matrix market: bad size line " + std::to_string(line_no));
      data.entries.reserve(static_cast<std::size_t>(nnz));
      continue;
    }
    Triplet t;
    if (!(ls >> t.row >> t.col >> t.value))
      throw std::runtime_error("matrix market: bad entry at line " + std::to_string(line_no));
    if (t.row < 1 || t.row > data.rows || t.col < 1 || t.col > data.cols)
      throw std::runtime_error("matrix market: index out of range at line " + std::to_string(line_no));
    --t.row;
    --t.col;
    data.entries.push_back(t);
    if (static_cast<std::int64_t>(data.entries.size()) == nnz) break;
  }
  if (nnz < 0 || static_cast<std::int64_t>(data.entries.size()) != nnz)
    throw std::runtime_error("matrix market: truncated entry list");
  return data;
}

}  // namespace dspdhg
