#pragma once

#include "finsler/errors.hpp"

namespace finsler {

// Numeric knobs shared across the library. Definiteness and rank decisions
// are always relative: a matrix passes "< 0" when lambda_max <= -def_tol *
// (1 + max-abs norm), and a singular value counts as zero when
// sigma <= rank_tol * sigma_max. Bisection stops on bracket width
// <= bisect_abs + bisect_rel * max(|lo|, |hi|).
struct Tolerances {
  double def_tol = 1e-9;
  double rank_tol = 1e-10;
  double bisect_abs = 1e-10;
  double bisect_rel = 1e-10;

  void validate() const {
    if (!(def_tol >= 0) || !(rank_tol >= 0) || !(bisect_abs >= 0) || !(bisect_rel >= 0))
      throw InvalidInput("Tolerances: all tolerances must be nonnegative");
  }
};

}  // namespace finsler
