// SPDX-License-Identifier: Apache-2.0
//
// isac-uav: beam-pattern synthesis and learned beamforming for sensing/communication UAVs
// Copyright (C) 2026 The isac-uav authors
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
// ------------------------------------------------------------------------

#ifndef ISAC_TAPER_HPP
#define ISAC_TAPER_HPP

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace isac
{
    // Chebyshev polynomial T_n(x) valid on the whole real line
    inline double chebyshev_polynomial(int n, double x)
    {
        if (std::abs(x) <= 1.0)
            return std::cos(n * std::acos(x));
        if (x > 1.0)
            return std::cosh(n * std::acosh(x));
        const double v = std::cosh(n * std::acosh(-x));
        return (n % 2 == 0) ? v : -v;
    }

    // Dolph-Chebyshev amplitude window with equiripple sidelobes `sll_db` below the main lobe.
    //
    // The array polynomial AF(psi) = T_{n-1}(x0 cos(psi / 2)) is sampled at psi_k = 2 pi k / n and
    // inverted with an n-point DFT; the result is normalized to unit peak amplitude.
    inline std::vector<double> chebyshev_taper(int n, double sll_db)
    {
        if (n < 2)
            throw Error(ErrorCode::invalid_config, "Chebyshev taper needs at least two elements");
        if (!(sll_db > 0.0))
            throw Error(ErrorCode::invalid_config, "Chebyshev sidelobe level must be positive");

        const double R = std::pow(10.0, sll_db / 20.0);
        const double x0 = std::cosh(std::acosh(R) / (n - 1));
        const double center = 0.5 * (n - 1);
        constexpr double pi = std::numbers::pi;

        std::vector<double> af(n);
        for (int k = 0; k < n; ++k)
            af[k] = chebyshev_polynomial(n - 1, x0 * std::cos(pi * k / n));

        std::vector<double> w(n, 0.0);
        for (int i = 0; i < n; ++i)
        {
            double s = 0.0;
            for (int k = 0; k < n; ++k)
                s += af[k] * std::cos((i - center) * 2.0 * pi * k / n);
            w[i] = s / n;
        }

        // Enforce exact symmetry before normalizing
        for (int i = 0; i < n / 2; ++i)
        {
            const double avg = 0.5 * (w[i] + w[n - 1 - i]);
            w[i] = w[n - 1 - i] = avg;
        }
        const double peak = *std::max_element(w.begin(), w.end());
        for (auto &v : w)
            v /= peak;
        return w;
    }

    // Uniform for a single element, Chebyshev otherwise
    inline std::vector<double> taper_or_uniform(int n, double sll_db)
    {
        if (n <= 1)
            return std::vector<double>(std::max(n, 0), 1.0);
        return chebyshev_taper(n, sll_db);
    }

} // namespace isac

#endif
