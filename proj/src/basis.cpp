#include "rotor/basis.hpp"

#include <algorithm>
#include <string>

#include "rotor/errors.hpp"

namespace rotor {

Basis::Basis(int l_max) : l_max_(l_max) {
  if (l_max < 0) throw DomainError("basis: l_max must be non-negative");
  offsets_.resize(static_cast<std::size_t>(2 * l_max + 2));
  offsets_[0] = 0;
  for (int m = -l_max; m <= l_max; ++m) {
    const auto block = static_cast<std::size_t>(l_max - std::abs(m) + 1);
    offsets_[static_cast<std::size_t>(m + l_max + 1)] =
        offsets_[static_cast<std::size_t>(m + l_max)] + block;
  }
}

std::size_t Basis::index(int l, int m) const {
  if (!contains(l, m)) {
    throw DomainError("basis: (l=" + std::to_string(l) + ", m=" + std::to_string(m) +
                      ") outside basis with l_max=" + std::to_string(l_max_));
  }
  return index_unchecked(l, m);
}

BasisIndex Basis::label(std::size_t flat) const {
  if (flat >= size()) throw DomainError("basis: flat index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
  const auto block = static_cast<int>(it - offsets_.begin()) - 1;
  const int m = block - l_max_;
  const int l = std::abs(m) + static_cast<int>(flat - offsets_[static_cast<std::size_t>(block)]);
  return {l, m};
}

}  // namespace rotor
