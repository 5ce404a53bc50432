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

#ifndef ISAC_BEAM_METRICS_HPP
#define ISAC_BEAM_METRICS_HPP

#include "weights.hpp"

#include <span>

namespace isac
{
    // Transmit beampattern gain towards a focal point, B = a^H (w0 w0^H + wk wk^H) a with the
    // transmitted excitations sqrt(PPE) * entries
    inline double beampattern_gain(const BeamformingMatrix &W, const ArrayConfig &config, const Pose &pose, const Vec3 &target)
    {
        const auto a = steering_vector(config, pose.position, pose.orientation, target);
        return std::norm(inner(a, W.sensing.entries)) * W.sensing.power_per_element +
               std::norm(inner(a, W.comm.entries)) * W.comm.power_per_element;
    }

    // Matching error along a trajectory, sum_n |B*(n) - B(n)|^2 with B* from the reference matrices
    inline double beampattern_error(std::span<const Pose> poses, std::span<const BeamformingMatrix> predicted,
                                    std::span<const BeamformingMatrix> reference, const ArrayConfig &config, const Vec3 &target)
    {
        if (predicted.size() != poses.size() || reference.size() != poses.size())
            throw Error(ErrorCode::dimension_mismatch, "trajectory, predicted and reference lengths differ");
        double err = 0.0;
        for (std::size_t n = 0; n < poses.size(); ++n)
        {
            const double d = beampattern_gain(reference[n], config, poses[n], target) -
                             beampattern_gain(predicted[n], config, poses[n], target);
            err += d * d;
        }
        return err;
    }

} // namespace isac

#endif
