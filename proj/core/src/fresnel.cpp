// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gmimo/fresnel.hpp"

#include <cmath>
#include <limits>

#include "gmimo/errors.hpp"
#include "gmimo/geometry.hpp"

namespace gmimo {

namespace {

constexpr double kEps = 4.0 * std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 2000;
// Below this the power series converges quickly; above it the continued
// fraction does.
constexpr double kSeriesLimit = 1.5;

// Interleaved power series: the k-th term of (pi/2 x^2)^k / (k! (2k+1)) goes to
// C for even k and to S for odd k, with alternating signs inside each.
std::complex<double> fresnel_series(double x) {
    const double t = 0.5 * kPi * x * x;
    double sum_c = x;
    double sum_s = 0.0;
    double fact = x;  // x * t^k / k!
    double sign = 1.0;
    bool odd = true;
    for (int k = 1; k < kMaxIter; ++k) {
        fact *= t / k;
        const double term = fact / (2 * k + 1);
        if (odd) {
            sum_s += sign * term;
            sign = -sign;
        } else {
            sum_c += sign * term;
        }
        odd = !odd;
        if (k > 2 && term < kEps * (std::abs(sum_c) + std::abs(sum_s))) {
            return {sum_c, sum_s};
        }
    }
    throw NumericalError("fresnel: power series failed to converge");
}

// Modified Lentz evaluation of the continued fraction for erfc of the complex
// argument sqrt(pi)/2 (1 - j) x.
std::complex<double> fresnel_continued_fraction(double x) {
    using C = std::complex<double>;
    const double pix2 = kPi * x * x;
    C b(1.0, -pix2);
    C cc(1.0 / kTiny, 0.0);
    C d = 1.0 / b;
    C h = d;
    int n = -1;
    for (int k = 2; k <= kMaxIter; ++k) {
        n += 2;
        const double a = -static_cast<double>(n) * (n + 1);
        b += 4.0;
        d = 1.0 / (a * d + b);
        cc = b + a / cc;
        const C del = cc * d;
        h *= del;
        if (std::abs(del.real() - 1.0) + std::abs(del.imag()) < kEps) {
            h *= C(x, -x);
            return C(0.5, 0.5) * (1.0 - C(std::cos(0.5 * pix2), std::sin(0.5 * pix2)) * h);
        }
    }
    throw NumericalError("fresnel: continued fraction failed to converge");
}

}  // namespace

std::complex<double> fresnel(double x) {
    if (x == 0.0) return {0.0, 0.0};
    if (!std::isfinite(x)) {
        if (std::isnan(x)) throw NumericalError("fresnel: NaN argument");
        return x > 0 ? std::complex<double>(0.5, 0.5) : std::complex<double>(-0.5, -0.5);
    }
    const double ax = std::abs(x);
    const std::complex<double> f = ax < kSeriesLimit ? fresnel_series(ax) : fresnel_continued_fraction(ax);
    return x < 0.0 ? -f : f;
}

}  // namespace gmimo
