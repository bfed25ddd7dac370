#include "rotor/series.hpp"

#include <cmath>

#include "rotor/errors.hpp"

namespace rotor {

void ObservableSeries::validate() const {
  if (times.size() != values.size()) throw DomainError("series '" + name + "': times and values differ in length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("series '" + name + "': times must increase strictly");
  for (double v : values)
    if (!std::isfinite(v)) throw DomainError("series '" + name + "': non-finite value");
}

}  // namespace rotor
