#pragma once

#include <optional>
#include <utility>

#include "jumpldp/errors.hpp"
#include "jumpldp/types.hpp"

namespace jumpldp {

/// Probability weights on the state set. Immutable after construction; the
/// optional density field is filled in when a base model is attached.
struct ProbMeasure {
  Vec w;
  std::optional<Vec> theta;  // d(eta)/d(pi) relative to the attached model

  int n() const { return static_cast<int>(w.size()); }
};

/// Validates nonnegativity and normalization (within tol), then rescales so
/// the weights sum to one up to rounding.
inline ProbMeasure make_measure(Vec w, double tol = kDefaultTol) {
  if (w.size() == 0) throw DimensionError("measure: empty weight vector");
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(w[i] >= 0.0)) throw DomainError("measure: negative or NaN weight");
  const double s = w.sum();
  if (std::abs(s - 1.0) > tol) throw DomainError("measure: weights do not sum to 1 within tolerance");
  w /= s;
  return ProbMeasure{std::move(w), std::nullopt};
}

}  // namespace jumpldp
