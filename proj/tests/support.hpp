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

#pragma once

#include <cmath>
#include <complex>

#include "gmimo/channel.hpp"
#include "gmimo/geometry.hpp"

namespace gmimo::test {

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline CMatrix random_channels(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    CMatrix h(rows, cols);
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        h.data()[i] = Complex(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    }
    return h;
}

inline UserPosition random_user(Rng& rng, double r_min, double r_max, double theta_max = kPi / 3.0) {
    return UserPosition{uniform(rng, r_min, r_max), uniform(rng, -theta_max, theta_max)};
}

inline double deg(double degrees) { return degrees * kPi / 180.0; }

}  // namespace gmimo::test
