#include "rotor/sparse.hpp"

#include <algorithm>
#include <cmath>

#include "rotor/errors.hpp"

namespace rotor {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
    : rows_(rows), cols_(cols) {
  for (const auto& e : entries) {
    if (e.row >= rows || e.col >= cols) throw DomainError("sparse: entry outside matrix shape");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  row_ptr_.assign(rows + 1, 0);
  col_.reserve(entries.size());
  value_.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size();) {
    const auto r = entries[k].row;
    const auto c = entries[k].col;
    cplx sum = 0.0;
    for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k) {
      sum += entries[k].value;
    }
    if (sum == cplx(0.0)) continue;
    col_.push_back(c);
    value_.push_back(sum);
    ++row_ptr_[r + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr_[r + 1] += row_ptr_[r];

  const bool real = std::all_of(value_.begin(), value_.end(),
                                [](const cplx& v) { return v.imag() == 0.0; });
  if (real && !value_.empty()) {
    real_.resize(value_.size());
    std::transform(value_.begin(), value_.end(), real_.begin(),
                   [](const cplx& v) { return v.real(); });
  }
}

cplx SparseMatrix::element(std::size_t row, std::size_t col) const {
  if (row >= rows_ || col >= cols_) throw DomainError("sparse: element index out of range");
  const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
  const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
  const auto it = std::lower_bound(first, last, col);
  if (it == last || *it != col) return 0.0;
  return value_[static_cast<std::size_t>(it - col_.begin())];
}

std::vector<SparseMatrix::Entry> SparseMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) out.push_back({r, col_[k], value_[k]});
  }
  return out;
}

void SparseMatrix::multiply(std::span<const cplx> x, std::span<cplx> y, std::size_t row_begin,
                            std::size_t row_end, Execution exec) const {
  if (x.size() != cols_ || y.size() != rows_) throw DomainError("sparse: multiply shape mismatch");
  row_end = std::min(row_end, rows_);
  if (row_begin >= row_end) return;
  const auto begin = static_cast<std::ptrdiff_t>(row_begin);
  const auto end = static_cast<std::ptrdiff_t>(row_end);

  if (!real_.empty()) {
    const double* v = real_.data();
    if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
      for (std::ptrdiff_t r = begin; r < end; ++r) {
        double re = 0.0;
        double im = 0.0;
        for (auto k = row_ptr_[static_cast<std::size_t>(r)];
             k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
          re += v[k] * x[col_[k]].real();
          im += v[k] * x[col_[k]].imag();
        }
        y[static_cast<std::size_t>(r)] = {re, im};
      }
    } else {
      for (std::ptrdiff_t r = begin; r < end; ++r) {
        double re = 0.0;
        double im = 0.0;
        for (auto k = row_ptr_[static_cast<std::size_t>(r)];
             k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
          re += v[k] * x[col_[k]].real();
          im += v[k] * x[col_[k]].imag();
        }
        y[static_cast<std::size_t>(r)] = {re, im};
      }
    }
    return;
  }

  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = begin; r < end; ++r) {
      cplx acc = 0.0;
      for (auto k = row_ptr_[static_cast<std::size_t>(r)];
           k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
        acc += value_[k] * x[col_[k]];
      }
      y[static_cast<std::size_t>(r)] = acc;
    }
  } else {
    for (std::ptrdiff_t r = begin; r < end; ++r) {
      cplx acc = 0.0;
      for (auto k = row_ptr_[static_cast<std::size_t>(r)];
           k < row_ptr_[static_cast<std::size_t>(r) + 1]; ++k) {
        acc += value_[k] * x[col_[k]];
      }
      y[static_cast<std::size_t>(r)] = acc;
    }
  }
}

cplx SparseMatrix::bilinear(std::span<const cplx> x, std::span<const cplx> y) const {
  if (x.size() != rows_ || y.size() != cols_) throw DomainError("sparse: bilinear shape mismatch");
  cplx total = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    if (x[r] == cplx(0.0)) continue;
    cplx acc = 0.0;
    for (auto k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += value_[k] * y[col_[k]];
    total += std::conj(x[r]) * acc;
  }
  return total;
}

SparseMatrix SparseMatrix::adjoint() const {
  auto list = entries();
  for (auto& e : list) {
    std::swap(e.row, e.col);
    e.value = std::conj(e.value);
  }
  return SparseMatrix(cols_, rows_, std::move(list));
}

SparseMatrix SparseMatrix::scaled(cplx factor) const {
  auto list = entries();
  for (auto& e : list) e.value *= factor;
  return SparseMatrix(rows_, cols_, std::move(list));
}

double SparseMatrix::max_abs_difference(const SparseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DomainError("sparse: comparing matrices of different shape");
  }
  double worst = 0.0;
  for (const auto& e : entries()) worst = std::max(worst, std::abs(e.value - other.element(e.row, e.col)));
  for (const auto& e : other.entries()) worst = std::max(worst, std::abs(e.value - element(e.row, e.col)));
  return worst;
}

SparseHermitianOperator::SparseHermitianOperator(Basis basis,
                                                 std::vector<SparseMatrix::Entry> entries)
    : basis_(std::move(basis)),
      matrix_(basis_.size(), basis_.size(), std::move(entries)) {
  for (const auto& e : matrix_.entries()) {
    const int dm = std::abs(basis_.label(e.row).m - basis_.label(e.col).m);
    m_bandwidth_ = std::max(m_bandwidth_, dm);
  }
  if (const double defect = hermiticity_defect(); defect > 1e-14) {
    throw NumericalError("operator is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

cplx SparseHermitianOperator::element(const BasisIndex& row, const BasisIndex& col) const {
  return matrix_.element(basis_.index(row.l, row.m), basis_.index(col.l, col.m));
}

double SparseHermitianOperator::expectation(std::span<const cplx> psi) const {
  return matrix_.bilinear(psi, psi).real();
}

void SparseHermitianOperator::apply(std::span<const cplx> x, std::span<cplx> y, int m_lo, int m_hi,
                                    Execution exec) const {
  const int l_max = basis_.l_max();
  const int lo = std::max(-l_max, m_lo - m_bandwidth_);
  const int hi = std::min(l_max, m_hi + m_bandwidth_);
  if (lo > hi) return;
  matrix_.multiply(x, y, basis_.block_begin(lo), basis_.block_end(hi), exec);
}

void SparseHermitianOperator::apply(std::span<const cplx> x, std::span<cplx> y,
                                    Execution exec) const {
  matrix_.multiply(x, y, 0, SparseMatrix::npos, exec);
}

double SparseHermitianOperator::hermiticity_defect() const {
  double worst = 0.0;
  for (const auto& e : matrix_.entries()) {
    worst = std::max(worst, std::abs(e.value - std::conj(matrix_.element(e.col, e.row))));
  }
  return worst;
}

SparseHermitianOperator SparseHermitianOperator::combine(
    std::span<const std::pair<double, const SparseHermitianOperator*>> terms) {
  if (terms.empty()) throw DomainError("combine: no terms");
  const Basis& basis = terms.front().second->basis();
  std::vector<SparseMatrix::Entry> all;
  for (const auto& [coef, op] : terms) {
    if (!(op->basis() == basis)) throw DomainError("combine: operators on different bases");
    if (coef == 0.0) continue;
    for (auto e : op->matrix().entries()) {
      e.value *= coef;
      all.push_back(e);
    }
  }
  return SparseHermitianOperator(basis, std::move(all));
}

}  // namespace rotor
