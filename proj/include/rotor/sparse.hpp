#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "rotor/basis.hpp"
#include "rotor/execution.hpp"

namespace rotor {

/// Compressed-row complex matrix with entries sorted by (row, column).
/// Entry order is fixed so every reduction over it is reproducible.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t row = 0;
    std::size_t col = 0;
    cplx value;
  };

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  SparseMatrix() = default;
  /// Duplicate (row, col) pairs are summed; exact zeros are dropped.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return col_.size(); }
  bool is_real() const noexcept { return !real_.empty() || col_.empty(); }

  cplx element(std::size_t row, std::size_t col) const;
  std::vector<Entry> entries() const;

  std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
  std::span<const std::size_t> col_index() const noexcept { return col_; }
  std::span<const cplx> values() const noexcept { return value_; }

  /// y[r] = sum_c A[r,c] x[c] for r in [row_begin, row_end); other rows of y
  /// are left untouched.
  void multiply(std::span<const cplx> x, std::span<cplx> y, std::size_t row_begin = 0,
                std::size_t row_end = npos, Execution exec = Execution::serial) const;

  /// x^H A y, accumulated row by row in ascending order.
  cplx bilinear(std::span<const cplx> x, std::span<const cplx> y) const;

  SparseMatrix adjoint() const;
  SparseMatrix scaled(cplx factor) const;

  /// Largest |A - B| over the union of both sparsity patterns.
  double max_abs_difference(const SparseMatrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_;
  std::vector<cplx> value_;
  std::vector<double> real_;  // populated when every value is real
};

/// Hermitian operator over a truncated spherical-harmonic basis.
class SparseHermitianOperator {
 public:
  SparseHermitianOperator() : basis_(0) {}
  /// Throws NumericalError when the entries are not Hermitian to 1e-14.
  SparseHermitianOperator(Basis basis, std::vector<SparseMatrix::Entry> entries);

  const Basis& basis() const noexcept { return basis_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dimension() const noexcept { return basis_.size(); }

  /// Largest |m' - m| over stored couplings.
  int m_bandwidth() const noexcept { return m_bandwidth_; }

  cplx element(const BasisIndex& row, const BasisIndex& col) const;

  /// <psi|A|psi>.  The imaginary part is discarded; callers that care about
  /// it can use matrix().bilinear().
  double expectation(std::span<const cplx> psi) const;

  /// Rows of y that can be nonzero when x is supported on m in
  /// [m_lo, m_hi] are computed; y outside that range is left untouched.
  void apply(std::span<const cplx> x, std::span<cplx> y, int m_lo, int m_hi,
             Execution exec = Execution::serial) const;
  void apply(std::span<const cplx> x, std::span<cplx> y,
             Execution exec = Execution::serial) const;

  double hermiticity_defect() const;

  /// sum_k c_k A_k for operators on the same basis.
  static SparseHermitianOperator combine(
      std::span<const std::pair<double, const SparseHermitianOperator*>> terms);

 private:
  Basis basis_;
  SparseMatrix matrix_;
  int m_bandwidth_ = 0;
};

}  // namespace rotor
