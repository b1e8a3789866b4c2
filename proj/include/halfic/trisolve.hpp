#pragma once

#include <optional>
#include <span>
#include <vector>

#include "halfic/factor.hpp"

namespace halfic {

/// native_low: every operation is rounded into the factor's format and guarded
/// against overflow. cast_f64: factor entries are promoted one at a time and
/// everything accumulates in a single fp64 work vector.
enum class Exec { native_low, cast_f64 };

const char* to_string(Exec exec);

/// Solutions are std::nullopt when a native_low guard refused a step (the
/// overflow signal). cast_f64 never returns nullopt.
using SolveResult = std::optional<std::vector<double>>;

/// L y = w, column oriented: once y_j is final it is scattered into the rows
/// below it; columns with y_j == 0 are skipped.
/// Throws std::invalid_argument on a length mismatch or a zero diagonal.
SolveResult forward_solve(const IcFactor& l, std::span<const double> w, Exec exec);

/// L^T y = w over the same column storage, each y_j as a dot product with
/// column j of L.
SolveResult backward_solve(const IcFactor& l, std::span<const double> w, Exec exec);

/// (L L^T)^{-1} r. In native_low the right-hand side is first divided by
/// ||r||_inf and the result multiplied back, both in fp64.
SolveResult apply_preconditioner(const IcFactor& l, std::span<const double> r, Exec exec);

}  // namespace halfic
