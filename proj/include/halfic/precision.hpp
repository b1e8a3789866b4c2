#pragma once

// Simulated reduced-precision floating point.
//
// Every simulated value lives in an fp64 carrier that is exactly
// representable in the target format. An arithmetic operation is simulated by
// computing it in fp64 and rounding the fp64 result once into the target
// format (round to nearest, ties to even).
//
// For +, -, *, / and sqrt this double rounding is harmless: a format with p
// significand bits is simulated exactly by a wider format with q >= 2p + 2
// bits (Figueroa's theorem). fp64 has q = 53, which covers fp16 (p = 11),
// bfloat16 (p = 8) and fp32 (p = 24). Products of two such operands are in
// fact exact in fp64, so only a single rounding ever happens for them.
//
// Overflow never produces an infinity. It is reported through a flag and the
// caller decides what to do.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace halfic {

/// A binary floating-point format described by its significand width
/// (including the implicit bit) and exponent width, IEEE biased.
struct FpFormat {
  std::string name;
  int significand_bits = 53;
  int exponent_bits = 11;
  bool supports_subnormals = true;

  int e_min = -1022;
  int e_max = 1023;
  double u = 0.0;        // unit roundoff, 2^-significand_bits
  double x_s_min = 0.0;  // smallest positive subnormal, 0 when unsupported
  double x_min = 0.0;    // smallest positive normalized
  double x_max = 0.0;    // largest finite

  /// Throws std::invalid_argument unless 2 <= significand_bits <= 53 and
  /// 2 <= exponent_bits <= 11.
  static FpFormat custom(int significand_bits, int exponent_bits,
                         bool supports_subnormals, std::string name = "custom");

  static FpFormat fp16();
  static FpFormat bf16();
  static FpFormat fp32();
  static FpFormat fp64();

  /// "fp16", "bf16", "fp32" or "fp64"; throws std::invalid_argument otherwise.
  static FpFormat from_name(std::string_view name);

  /// True when the format is IEEE double itself, so simulation is a no-op.
  bool is_fp64() const { return significand_bits == 53 && exponent_bits == 11; }

  /// Narrower than fp32. These are the formats that need overflow guards.
  bool is_half_width() const { return significand_bits < 24; }

  /// True iff x is finite, within range and has no bits below the format's
  /// resolution.
  bool representable(double x) const;
};

bool operator==(const FpFormat& a, const FpFormat& b);

enum RoundFlag : unsigned {
  kNoFlags = 0,
  kOverflow = 1u << 0,
  kUnderflowToZero = 1u << 1,
  kBecameSubnormal = 1u << 2,
};

struct RoundOutcome {
  double value = 0.0;  // meaningless (zero) when overflow is set
  unsigned flags = kNoFlags;

  bool overflow() const { return (flags & kOverflow) != 0; }
  bool underflow_to_zero() const { return (flags & kUnderflowToZero) != 0; }
  bool became_subnormal() const { return (flags & kBecameSubnormal) != 0; }
};

/// Round a finite fp64 value into `f`.
///
/// Formats without subnormals round magnitudes below x_min to 0 or x_min,
/// whichever is nearer; an exact tie at x_min/2 goes to 0.
RoundOutcome round_to(double x, const FpFormat& f);

enum class Op { add, sub, mul, div, sqrt };

/// a (op) b computed in fp64, then rounded into `f`. For sqrt `b` is ignored.
/// Division by zero reports overflow. sqrt of a negative number throws
/// std::domain_error.
RoundOutcome sim_op(Op op, double a, double b, const FpFormat& f);
inline RoundOutcome sim_sqrt(double a, const FpFormat& f) {
  return sim_op(Op::sqrt, a, 0.0, f);
}

/// Whether every quotient l/d with |l| <= a is at most x_max, i.e. whether a
/// column with largest off-diagonal magnitude `a` can be scaled by the pivot
/// `d` without overflow. The d >= 1 branch never needs `a`.
bool safe_scale_check(double d, double a, const FpFormat& f);

/// a - b*c in format `f`, or nullopt if either the product or the difference
/// could overflow.
///
/// The guards are evaluated on exact fp64 quantities (b*c is exact in fp64
/// for every format up to fp32) so they can only be stricter than the same
/// tests on rounded values. The product and the difference themselves are
/// rounded into `f`, and an overflow flag from either still refuses the update.
std::optional<double> safe_update(double a, double b, double c, const FpFormat& f);

}  // namespace halfic
