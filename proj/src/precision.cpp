#include "halfic/precision.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace halfic {

FpFormat FpFormat::custom(int significand_bits, int exponent_bits,
                          bool supports_subnormals, std::string name) {
  if (significand_bits < 2 || significand_bits > 53)
    throw std::invalid_argument("significand_bits must be in [2, 53]");
  if (exponent_bits < 2 || exponent_bits > 11)
    throw std::invalid_argument("exponent_bits must be in [2, 11]");

  FpFormat f;
  f.name = std::move(name);
  f.significand_bits = significand_bits;
  f.exponent_bits = exponent_bits;
  f.supports_subnormals = supports_subnormals;
  f.e_max = (1 << (exponent_bits - 1)) - 1;
  f.e_min = 1 - f.e_max;
  f.u = std::ldexp(1.0, -significand_bits);
  f.x_min = std::ldexp(1.0, f.e_min);
  f.x_s_min = supports_subnormals ? std::ldexp(1.0, f.e_min - significand_bits + 1) : 0.0;
  f.x_max = std::ldexp(2.0 - std::ldexp(1.0, 1 - significand_bits), f.e_max);
  return f;
}

FpFormat FpFormat::fp16() { return custom(11, 5, true, "fp16"); }
FpFormat FpFormat::bf16() { return custom(8, 8, false, "bf16"); }
FpFormat FpFormat::fp32() { return custom(24, 8, true, "fp32"); }
FpFormat FpFormat::fp64() { return custom(53, 11, true, "fp64"); }

FpFormat FpFormat::from_name(std::string_view name) {
  if (name == "fp16") return fp16();
  if (name == "bf16") return bf16();
  if (name == "fp32") return fp32();
  if (name == "fp64") return fp64();
  throw std::invalid_argument("unknown floating-point format '" + std::string(name) + "'");
}

bool FpFormat::representable(double x) const {
  if (!std::isfinite(x) || std::fabs(x) > x_max) return false;
  const RoundOutcome r = round_to(x, *this);
  return !r.overflow() && r.value == x;
}

bool operator==(const FpFormat& a, const FpFormat& b) {
  return a.significand_bits == b.significand_bits && a.exponent_bits == b.exponent_bits &&
         a.supports_subnormals == b.supports_subnormals;
}

RoundOutcome round_to(double x, const FpFormat& f) {
  if (!std::isfinite(x)) return {0.0, kOverflow};
  if (x == 0.0) return {x, kNoFlags};

  const double ax = std::fabs(x);
  if (f.is_fp64()) {
    return {x, ax < std::numeric_limits<double>::min() ? unsigned{kBecameSubnormal}
                                                       : unsigned{kNoFlags}};
  }

  double r;
  if (ax >= f.x_min) {
    // Normal range of the target: round the fp64 significand in place.
    // A carry out of the significand bumps the exponent field, which is the
    // correct result (and may become +inf, caught below as overflow).
    auto bits = std::bit_cast<std::uint64_t>(ax);
    const int drop = 52 - (f.significand_bits - 1);
    if (drop > 0) {
      const std::uint64_t lsb = (bits >> drop) & 1u;
      bits += ((std::uint64_t{1} << (drop - 1)) - 1) + lsb;
      bits &= ~((std::uint64_t{1} << drop) - 1);
    }
    r = std::bit_cast<double>(bits);
  } else if (f.supports_subnormals) {
    // Fixed quantum x_s_min below x_min. Scaling by a power of two is exact.
    const int q = f.e_min - f.significand_bits + 1;
    r = std::ldexp(std::nearbyint(std::ldexp(ax, -q)), q);
  } else {
    r = ax > 0.5 * f.x_min ? f.x_min : 0.0;
  }

  if (!(r <= f.x_max)) return {0.0, kOverflow};
  unsigned flags = kNoFlags;
  if (r == 0.0)
    flags |= kUnderflowToZero;
  else if (r < f.x_min)
    flags |= kBecameSubnormal;
  return {std::copysign(r, x), flags};
}

RoundOutcome sim_op(Op op, double a, double b, const FpFormat& f) {
  double r = 0.0;
  switch (op) {
    case Op::add: r = a + b; break;
    case Op::sub: r = a - b; break;
    case Op::mul: r = a * b; break;
    case Op::div:
      if (b == 0.0) return {0.0, kOverflow};
      r = a / b;
      break;
    case Op::sqrt:
      if (a < 0.0) throw std::domain_error("sim_op: sqrt of a negative value");
      r = std::sqrt(a);
      break;
  }
  return round_to(r, f);
}

bool safe_scale_check(double d, double a, const FpFormat& f) {
  return d >= 1.0 || d >= a / f.x_max;
}

std::optional<double> safe_update(double a, double b, double c, const FpFormat& f) {
  const double ab = std::fabs(b);
  const double ac = std::fabs(c);
  if (!(ab <= 1.0 || ac <= 1.0 || ab <= f.x_max / ac)) return std::nullopt;

  const double p = b * c;
  if (std::fabs(p) > f.x_max) return std::nullopt;
  if (a >= 0.0) {
    if (!(p >= 0.0 || f.x_max - a >= -p)) return std::nullopt;
  } else {
    if (!(p < 0.0 || f.x_max + a >= p)) return std::nullopt;
  }

  const RoundOutcome w = sim_op(Op::mul, b, c, f);
  if (w.overflow()) return std::nullopt;
  const RoundOutcome v = sim_op(Op::sub, a, w.value, f);
  if (v.overflow()) return std::nullopt;
  return v.value;
}

}  // namespace halfic
