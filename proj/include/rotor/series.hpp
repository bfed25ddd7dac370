#pragma once

#include <map>
#include <string>
#include <vector>

namespace rotor {

/// A named observable sampled on a dimensionless time grid.
struct ObservableSeries {
  std::string name;  // cos2theta | cos2phi | jx | jy | jz
  std::vector<double> times;
  std::vector<double> values;
  std::map<std::string, std::string> meta;

  /// Throws DomainError unless times increase strictly and all values are finite.
  void validate() const;

  friend bool operator==(const ObservableSeries&, const ObservableSeries&) = default;
};

}  // namespace rotor
