#pragma once

#include <cstddef>

#include "hidsym/expr.hpp"

namespace hidsym {

struct SimplifyOptions {
  /// Abandon (and return the input unchanged) once any intermediate
  /// polynomial exceeds this many terms.
  std::size_t max_terms = 5000;
  bool pythagorean = true;
};

/// Rewrites `e` as a reduced rational function over its atoms (coordinates,
/// parameters, function applications and radicals). Numerators are expanded
/// with like terms collected, common polynomial factors are cancelled by exact
/// division, sqrt(u)^2 reduces to u and sin^2 + cos^2 collapses when that
/// shortens the result. Sound but not complete.
Expr simplify(const Expr& e, const SimplifyOptions& opt = {});

}  // namespace hidsym
