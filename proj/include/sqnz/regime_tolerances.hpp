// Copyright (c) 2026 The sqnz authors
//
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

#pragma once

// Agreement between each regime formula and the closed form at the centre of
// its window. Values come from calibration runs at the parameter points listed
// here (Omega = 1, A = 1); measured deviations are shown for reference.
//
// st is compared pointwise. ns is compared through its phase envelope
// |ns(theta = 0) + i ns(theta = pi/2)|, which removes the cos(phi - theta) zero
// crossings from the relative error.

#include "sqnz/asymptotics.hpp"

#include <array>

namespace sqnz {

struct RegimeTolerance {
  Regime regime;
  double xi;
  double delta;
  double gamma;
  double st_rel; ///< tolerance on st (0 when the formula has no st part)
  double ns_rel; ///< tolerance on the ns envelope (0 when it has no ns part)
};

inline constexpr std::array<RegimeTolerance, 8> kRegimeTolerances{{
    // measured: st 6e-4, ns 1e-3
    {Regime::very_early, 1000.0, 10.0, 4e-3, 0.10, 0.10},
    // measured: st 2.6e-3, ns 1.1e-2
    {Regime::early_plateau, 1e5, 1e3, 4e-3, 0.10, 0.10},
    // measured: st 8.5e-2, ns 8.5e-2
    {Regime::onres_quadratic, 1.0, 0.01, 1e-4, 0.15, 0.15},
    // measured: st 7.6e-2
    {Regime::onres_linear, 1.0, 0.1, 1e-4, 0.15, 0.0},
    // measured: ns 1.2e-1
    {Regime::onres_ns_flat, 1.0, 0.1, 1e-4, 0.0, 0.25},
    // measured: st 1.3e-2, ns 2.5e-2
    {Regime::onres_late, 1.0, 0.02, 2e-4, 0.10, 0.10},
    // measured: st 7.6e-3, ns 7.5e-3
    {Regime::offres_early, 20.0, 1e-3, 1e-4, 0.15, 0.15},
    // measured: st 7.8e-2, ns 7.8e-2
    {Regime::offres_late, 5.0, 0.01, 1e-3, 0.15, 0.15},
}};

inline const RegimeTolerance* regime_tolerance(Regime r) {
  for (const auto& t : kRegimeTolerances)
    if (t.regime == r) return &t;
  return nullptr;
}

} // namespace sqnz
