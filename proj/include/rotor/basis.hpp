#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace rotor {

using cplx = std::complex<double>;

/// Label of a spherical harmonic Y_l^m.
struct BasisIndex {
  int l = 0;
  int m = 0;

  friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

/// Truncated spherical-harmonic basis {Y_l^m : 0 <= l <= l_max}.
///
/// Flat enumeration is m-major: blocks for m = -l_max, ..., l_max in ascending
/// order, and inside a block l runs from |m| to l_max.  Every operator that
/// conserves m (cos^2 theta, free evolution, J_z) is block diagonal in this
/// ordering, and operators changing m by at most k couple only blocks at most
/// k apart, which keeps row ranges contiguous for support-restricted products.
class Basis {
 public:
  explicit Basis(int l_max);

  int l_max() const noexcept { return l_max_; }
  std::size_t size() const noexcept { return offsets_.back(); }

  bool contains(int l, int m) const noexcept {
    return l >= 0 && l <= l_max_ && (m < 0 ? -m : m) <= l;
  }

  /// Throws DomainError when (l, m) is outside the basis.
  std::size_t index(int l, int m) const;

  std::size_t index_unchecked(int l, int m) const noexcept {
    return offsets_[static_cast<std::size_t>(m + l_max_)] +
           static_cast<std::size_t>(l - (m < 0 ? -m : m));
  }

  BasisIndex label(std::size_t flat) const;

  /// First flat index of the m block.
  std::size_t block_begin(int m) const noexcept {
    return offsets_[static_cast<std::size_t>(m + l_max_)];
  }
  std::size_t block_end(int m) const noexcept {
    return offsets_[static_cast<std::size_t>(m + l_max_ + 1)];
  }

  friend bool operator==(const Basis& a, const Basis& b) noexcept {
    return a.l_max_ == b.l_max_;
  }

 private:
  int l_max_;
  std::vector<std::size_t> offsets_;  // 2*l_max + 2 entries
};

}  // namespace rotor
