#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dspdhg/partition.hpp"
#include "dspdhg/vectors.hpp"

namespace dspdhg {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

// Sparse coupling matrix with row and column block structure. Stores both a
// CSR and a CSC view (2x memory) so that row-block slices A_i and
// column-block slices A^j are each contiguous to walk. Duplicate triplets
// are summed; entry order inside a row (resp. column) is ascending, which
// fixes the accumulation order of every product.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(BlockPartition row_partition, BlockPartition col_partition,
              const std::vector<Triplet>& entries);

  int rows() const { return row_part_.dim(); }
  int cols() const { return col_part_.dim(); }
  int row_blocks() const { return row_part_.count(); }
  int col_blocks() const { return col_part_.count(); }
  const BlockPartition& row_partition() const { return row_part_; }
  const BlockPartition& col_partition() const { return col_part_; }

  std::int64_t nnz() const { return static_cast<std::int64_t>(csr_val_.size()); }
  std::int64_t row_block_nnz(int i) const;
  std::int64_t col_block_nnz(int j) const;

  // y = A x and x = A^T y, dense.
  void matvec(std::span<const double> x, std::span<double> y) const;
  void rmatvec(std::span<const double> y, std::span<double> x) const;
  Vec matvec(std::span<const double> x) const;
  Vec rmatvec(std::span<const double> y) const;

  // out += scale * A^j * delta, where delta is indexed from the start of
  // column block j. Touches only rows with a nonzero in that block.
  void accumulate_col_block(int j, const double* delta, double scale, SparseAccumulator& out) const;

  // out += scale * A_i^T * dy, where dy is indexed from the start of row
  // block i.
  void accumulate_row_block_transpose(int i, const double* dy, double scale,
                                      SparseAccumulator& out) const;

  // Raw CSR access (rows ascending, columns ascending within a row).
  std::span<const std::int64_t> row_ptr() const { return row_ptr_; }
  std::span<const int> csr_col() const { return csr_col_; }
  std::span<const double> csr_val() const { return csr_val_; }

  std::vector<Triplet> to_triplets() const;

 private:
  BlockPartition row_part_;
  BlockPartition col_part_;

  std::vector<std::int64_t> row_ptr_;
  std::vector<int> csr_col_;
  std::vector<double> csr_val_;

  std::vector<std::int64_t> col_ptr_;
  std::vector<int> csc_row_;
  std::vector<double> csc_val_;
};

// Updates cache += scale * A * delta restricted to the given column blocks;
// delta is a full primal-dimension vector but only the coordinates of
// changed_cols are read. Cost is proportional to the nonzeros of those
// column blocks.
void incremental_matvec_update(const BlockMatrix& A, Vec& cache, std::span<const int> changed_cols,
                               std::span<const double> delta, double scale = 1.0);

struct PowerResult {
  double value = 0.0;
  bool converged = true;
  int iterations = 0;
};

// Largest singular value by power iteration on A^T A. Deterministic start
// vector derived from seed. A zero matrix reports 0.
PowerResult spectral_norm(const BlockMatrix& A, double tol = 1e-9, int max_iter = 5000,
                          std::uint64_t seed = 0);

// Largest singular value of the submatrix given by row-block set I and
// column-block set J (block indices, each nonempty and duplicate-free).
PowerResult submatrix_spectral_norm(const BlockMatrix& A, std::span<const int> row_block_set,
                                    std::span<const int> col_block_set, double tol = 1e-9,
                                    int max_iter = 5000, std::uint64_t seed = 0);

struct NormBound {
  double value = 0.0;
  bool exact = false;     // exhaustive enumeration vs. the ||A|| upper bound
  long iterations = 0;    // total power-iteration sweeps spent
};

// min(C(n, k), cap) without overflow.
std::int64_t binomial_capped(int n, int k, std::int64_t cap);

// max ||A_{I,.}|| over all row-block sets of size r; falls back to ||A||
// (exact = false) when C(row_blocks, r) exceeds enum_budget.
NormBound lambda_r(const BlockMatrix& A, int r, std::int64_t enum_budget = 10000,
                   double tol = 1e-9, int max_iter = 5000);

// max ||A_{I,J}|| over row-block sets of size r and column-block sets of
// size s; falls back to ||A|| when C(n,r)*C(m,s) exceeds enum_budget.
NormBound lambda_rs(const BlockMatrix& A, int r, int s, std::int64_t enum_budget = 10000,
                    double tol = 1e-9, int max_iter = 5000);

struct NormReport {
  double lambda = 0.0;
  double lambda_r = 0.0;
  double lambda_rs = 0.0;
  bool lambda_exact = false;
  bool lambda_r_exact = false;
  bool lambda_rs_exact = false;
  long iterations_used = 0;
};

NormReport compute_norms(const BlockMatrix& A, int r, int s, std::int64_t enum_budget = 10000,
                         double tol = 1e-9, int max_iter = 5000);

// Matrix Market exchange format (coordinate real general, 1-based).
struct MatrixMarketData {
  int rows = 0;
  int cols = 0;
  std::vector<Triplet> entries;
};

void write_matrix_market(std::ostream& out, int rows, int cols, const std::vector<Triplet>& entries);
void write_matrix_market(std::ostream& out, const BlockMatrix& A);
MatrixMarketData read_matrix_market(std::istream& in);

}  // namespace dspdhg
