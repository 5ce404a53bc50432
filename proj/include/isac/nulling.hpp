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

#ifndef ISAC_NULLING_HPP
#define ISAC_NULLING_HPP

#include "weights.hpp"

#include <optional>

namespace isac
{
    inline constexpr double null_conflict_tolerance = deg2rad(1.0);

    // Least-squares projection of the weights onto the orthogonal complement of the null steering vectors.
    // The basis is orthonormalized with two Gram-Schmidt passes, which keeps a^H w at round-off level.
    inline BeamWeights apply_nulls(const BeamWeights &weights, const ArrayConfig &config, const Pose &pose,
                                   const std::vector<DirectionAngles> &nulls,
                                   const std::optional<DirectionAngles> &pointing = std::nullopt)
    {
        config.validate();
        if (weights.size() != config.num_elements)
            throw Error(ErrorCode::dimension_mismatch, "weight vector does not match the array size");
        if (nulls.size() >= config.num_elements)
            throw Error(ErrorCode::invalid_config, "number of nulls must be smaller than the number of elements");
        if (pointing)
            for (const auto &n : nulls)
                if (angular_separation(n, *pointing) < null_conflict_tolerance)
                    throw Error(ErrorCode::null_conflict, "null direction coincides with the pointing direction");

        BeamWeights out = weights;
        if (nulls.empty())
            return out;

        std::vector<std::vector<cdouble>> basis;
        for (const auto &n : nulls)
        {
            auto q = steering_vector(config, pose.orientation, n);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto &b : basis)
                {
                    const cdouble c = inner(b, q);
                    for (std::size_t m = 0; m < q.size(); ++m)
                        q[m] -= c * b[m];
                }
            double nrm = 0.0;
            for (const auto &e : q)
                nrm += std::norm(e);
            nrm = std::sqrt(nrm);
            if (nrm < 1e-9 * std::sqrt(static_cast<double>(q.size())))
                continue; // linearly dependent on earlier nulls
            for (auto &e : q)
                e /= nrm;
            basis.push_back(std::move(q));
        }

        for (int pass = 0; pass < 2; ++pass)
            for (const auto &b : basis)
            {
                const cdouble c = inner(b, out.entries);
                for (std::size_t m = 0; m < out.entries.size(); ++m)
                    out.entries[m] -= c * b[m];
            }
        return out;
    }

} // namespace isac

#endif
