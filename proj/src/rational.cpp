// Copyright 2026 The wtan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wtan/rational.hpp"

#include <cmath>

#include "wtan/error.hpp"

namespace wtan {

Rational exact_rational(double value) {
  if (!std::isfinite(value)) fail(ErrorCode::kInvalidArgument, "non-finite value has no rational form");
  int exponent = 0;
  double mantissa = std::frexp(value, &exponent);
  // 53 bits of mantissa fit in an int64 after scaling.
  auto scaled = static_cast<long long>(std::ldexp(mantissa, 53));
  exponent -= 53;
  Rational r(scaled);
  boost::multiprecision::cpp_int two_pow = 1;
  two_pow <<= std::abs(exponent);
  if (exponent >= 0) {
    r *= Rational(two_pow);
  } else {
    r /= Rational(two_pow);
  }
  return r;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash == std::string::npos) {
      return Rational(boost::multiprecision::cpp_int(text));
    }
    boost::multiprecision::cpp_int num(text.substr(0, slash));
    boost::multiprecision::cpp_int den(text.substr(slash + 1));
    if (den == 0) fail(ErrorCode::kParse, "zero denominator in '" + text + "'");
    return Rational(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    fail(ErrorCode::kParse, "not a rational: '" + text + "'");
  }
}

std::string format_rational(const Rational& value) {
  auto num = boost::multiprecision::numerator(value);
  auto den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational sum(const std::vector<Rational>& values) {
  Rational total = 0;
  for (const auto& v : values) total += v;
  return total;
}

}  // namespace wtan
