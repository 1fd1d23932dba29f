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

#include <cstdint>
#include <string>
#include <vector>

namespace gmimo {

struct ValidationCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Self-checks of the library invariants on randomised inputs: Gram-inverse
// agreement with direct inversion, ZF orthogonality of every scheduler's
// output, waterfilling optimality, far-field factorisation, Fresnel limits,
// preset apertures and replay determinism. Takes a few seconds.
std::vector<ValidationCheck> run_invariant_suite(std::uint64_t seed);

}  // namespace gmimo
