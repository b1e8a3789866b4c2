#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "halfic/precision.hpp"
#include "halfic/sparse.hpp"
#include "halfic/symbolic.hpp"

namespace halfic {

/// B1: pivot below tau. B2: scaling the pivot column could overflow.
/// B3: an outer-product update could overflow.
enum class BreakdownKind { B1, B2, B3 };

const char* to_string(BreakdownKind kind);

struct Breakdown {
  BreakdownKind kind = BreakdownKind::B1;
  int step = 0;         // column being eliminated
  double value = 0.0;   // B1: the pivot; B2: the pivot after sqrt; B3: target entry
  double detail = 0.0;  // B2: largest column entry; B3: the product operand
  double alpha = 0.0;   // shift in force when it happened
};

struct FactorStats {
  int nmod = 0;   // B1 occurrences over all attempts
  int nscal = 0;  // B2 occurrences
  int nofl = 0;   // B3 occurrences
  int restarts = 0;
  std::size_t flushed_subnormal = 0;  // off-diagonal factor entries replaced by 0
};

/// L with S^{-1} A S^{-1} + alpha I ~= L L^T. `values` follow `pattern`
/// entry for entry and hold fp64 carriers of numbers representable in
/// `format`.
struct IcFactor {
  FillPattern pattern;
  std::vector<double> values;
  FpFormat format;
  double alpha = 0.0;
  FactorStats stats;
  std::vector<Breakdown> history;

  int n() const { return pattern.n; }
  double diag(int j) const { return values[pattern.col_ptr[j]]; }
};

/// Either the factor values or the breakdown that stopped the attempt.
struct AttemptResult {
  std::vector<double> values;
  std::optional<Breakdown> breakdown;
  std::size_t flushed_subnormal = 0;

  bool ok() const { return !breakdown.has_value(); }
};

/// One right-looking incomplete Cholesky factorization of `a_low` restricted
/// to `pattern`, every operation rounded into `f`.
///
/// With `safe_checks` the column scaling and every update are guarded (B2,
/// B3). Without them only the pivot test runs; an overflow that then slips
/// through throws std::overflow_error, since nothing predicted it.
/// Off-diagonal results that land in the subnormal range are replaced by 0.
///
/// Preconditions (std::invalid_argument): pattern covers a_low, tau > 0.
/// The fp16 default of 1e-5 lies below x_min, so a passing pivot may be
/// subnormal; its square root is always normalized.
AttemptResult ic_attempt(const SparseSpd& a_low, const FillPattern& pattern, double tau,
                         const FpFormat& f, bool safe_checks);

/// Identity factor in `f` on the diagonal-only pattern.
IcFactor identity_factor(int n, const FpFormat& f);

struct ShiftedIcOptions {
  std::optional<double> tau;  // default_tau(format) when unset
  double initial_shift = 1e-3;
  int max_restarts = 40;
  std::optional<bool> safe_checks;  // format.is_half_width() when unset
};

/// 1e-5 for half-width formats, otherwise 1e-20 but never below 4 x_min.
double default_tau(const FpFormat& f);

class FactorizationFailure : public std::runtime_error {
 public:
  FactorizationFailure(const std::string& what, std::vector<Breakdown> history)
      : std::runtime_error(what), history_(std::move(history)) {}
  const std::vector<Breakdown>& history() const { return history_; }

 private:
  std::vector<Breakdown> history_;
};

/// Squeeze `a_hat` into `f` once, then factorize a_low + alpha_i I for
/// alpha_0 = 0, alpha_{i+1} = max(2 alpha_i, initial_shift) until an attempt
/// succeeds. Breakdown counts accumulate over every attempt.
///
/// Throws FactorizationFailure once max_restarts restarts have failed.
IcFactor shifted_ic(const SparseSpd& a_hat, const FillPattern& pattern, const FpFormat& f,
                    const ShiftedIcOptions& options = {});

/// Same as shifted_ic for a matrix that has already been squeezed into `f`.
IcFactor shifted_ic_squeezed(const SparseSpd& a_low, const FillPattern& pattern,
                             const FpFormat& f, const ShiftedIcOptions& options = {});

}  // namespace halfic
