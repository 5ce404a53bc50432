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

#ifndef ISAC_WEIGHTS_HPP
#define ISAC_WEIGHTS_HPP

#include "geometry.hpp"

#include <span>

namespace isac
{
    // Per-element complex excitation. Entries carry the normalized taper and phase (max |entry| <= 1),
    // the transmitted excitation of element m is sqrt(power_per_element) * entries[m].
    struct BeamWeights
    {
        std::vector<cdouble> entries;
        double power_per_element = 1.0; // mW

        std::size_t size() const { return entries.size(); }

        double norm2() const
        {
            double s = 0.0;
            for (const auto &e : entries)
                s += std::norm(e);
            return s;
        }

        double max_abs() const
        {
            double m = 0.0;
            for (const auto &e : entries)
                m = std::max(m, std::abs(e));
            return m;
        }

        // Total transmit power of this beam, mW
        double power() const { return norm2() * power_per_element; }

        // Rescales entries to unit peak amplitude while keeping the radiated field unchanged
        void normalize_peak()
        {
            const double m = max_abs();
            if (!(m > 0.0))
                return;
            for (auto &e : entries)
                e /= m;
            power_per_element *= m * m;
        }

        static BeamWeights zeros(std::size_t n) { return {std::vector<cdouble>(n, cdouble{}), 1.0}; }
    };

    // Sensing beam w0 and communication beam wk
    struct BeamformingMatrix
    {
        BeamWeights sensing;
        BeamWeights comm;

        double total_power() const { return sensing.power() + comm.power(); }
    };

    // a^H w
    inline cdouble inner(std::span<const cdouble> a, std::span<const cdouble> w)
    {
        if (a.size() != w.size())
            throw Error(ErrorCode::dimension_mismatch, "vector lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(w.size()));
        cdouble s{};
        for (std::size_t i = 0; i < a.size(); ++i)
            s += std::conj(a[i]) * w[i];
        return s;
    }

} // namespace isac

#endif
