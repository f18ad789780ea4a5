#pragma once

#include "roundoff/rational.hpp"

#include <array>
#include <string>

namespace roundoff {

struct FpFormat {
  int precision = 53;
  Rational eps = pow2(-53);
  // Relative error multiplier for special functions, indexed by Fn.
  std::array<Rational, 8> transc_factor{Rational(3, 2), Rational(3, 2), Rational(3, 2), Rational(3, 2),
                                        Rational(3, 2), Rational(3, 2), Rational(3, 2), Rational(3, 2)};

  static FpFormat with_precision(int p);
  static FpFormat binary32() { return with_precision(24); }
  static FpFormat binary64() { return with_precision(53); }
  static FpFormat binary128() { return with_precision(113); }
  // "single", "double", "quad" or a bit count.
  static FpFormat parse(const std::string& name);

  std::string name() const;
};

}  // namespace roundoff
