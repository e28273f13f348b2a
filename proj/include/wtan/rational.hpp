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

#ifndef WTAN_RATIONAL_HPP_
#define WTAN_RATIONAL_HPP_

#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wtan {

// Arbitrary precision rational used by the exact (vertex enumeration) paths.
using Rational = boost::multiprecision::cpp_rational;

// Every finite double is a dyadic rational; this conversion is exact.
Rational exact_rational(double value);

double to_double(const Rational& value);

// "p/q" or "p" (integers, optional sign).
Rational parse_rational(const std::string& text);
std::string format_rational(const Rational& value);

Rational sum(const std::vector<Rational>& values);

}  // namespace wtan

#endif  // WTAN_RATIONAL_HPP_
