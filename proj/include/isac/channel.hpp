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

#ifndef ISAC_CHANNEL_HPP
#define ISAC_CHANNEL_HPP

#include "geometry.hpp"
#include "weights.hpp"

#include <limits>

namespace isac
{
    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double linear_to_db(double lin)
    {
        if (lin <= 0.0)
            return -std::numeric_limits<double>::infinity();
        return 10.0 * std::log10(lin);
    }

    // Large-scale THz air-to-ground channel constants
    struct ChannelParams
    {
        double kappa1 = 0.9, kappa2 = 3.5, kappa3 = 0.9; // NLoS probability shape
        double absorption = 0.0033;                      // K_fc, 1/m
        double nlos_loss = 0.1;                          // K_N, amplitude factor in (0, 1]
        double radar_cross_section = 1.0;                // m^2
        double noise_power = 1e-11;                      // mW (-110 dBm)
        double bandwidth = 100e6;                        // Hz
        double carrier_frequency = 0.3e12;               // Hz
        double rx_gain_db = 20.0;                        // ground station receive antenna gain

        double wavelength() const { return speed_of_light / carrier_frequency; }

        void validate() const
        {
            if (!(absorption >= 0.0))
                throw Error(ErrorCode::invalid_config, "absorption coefficient must be non-negative");
            if (!(nlos_loss > 0.0 && nlos_loss <= 1.0))
                throw Error(ErrorCode::invalid_config, "NLoS attenuation must lie in (0, 1]");
            if (!(noise_power > 0.0))
                throw Error(ErrorCode::invalid_config, "noise power must be positive");
            if (!(radar_cross_section > 0.0))
                throw Error(ErrorCode::invalid_config, "radar cross-section must be positive");
            if (!(carrier_frequency > 0.0) || !(bandwidth > 0.0))
                throw Error(ErrorCode::invalid_config, "carrier frequency and bandwidth must be positive");
        }
    };

    // P_NLoS = kappa3 - kappa1 * exp(-kappa2 * atan(dz / horizontal)), clamped to [0, 1]
    inline double nlos_probability(const ChannelParams &p, const Vec3 &uav_pos, const Vec3 &dest)
    {
        const double dz = uav_pos.z - dest.z;
        if (!(dz > 0.0))
            throw Error(ErrorCode::degenerate_geometry, "UAV must be above the destination");
        // d * sin(theta) is the horizontal distance; atan2 covers the vertical case
        const double elevation = std::atan2(dz, horizontal_distance(uav_pos, dest));
        const double v = -p.kappa1 * std::exp(-p.kappa2 * elevation) + p.kappa3;
        return std::clamp(v, 0.0, 1.0);
    }

    inline double los_probability(const ChannelParams &p, const Vec3 &uav_pos, const Vec3 &dest)
    {
        return 1.0 - nlos_probability(p, uav_pos, dest);
    }

    enum class PathlossMode
    {
        comm_los,
        radar_los,
        comm_nlos,
        expected
    };

    // Channel power gain (linear, <= 1); absorption always attenuates
    inline double pathloss(const ChannelParams &p, PathlossMode mode, const Vec3 &uav_pos, const Vec3 &dest)
    {
        const double d = distance(uav_pos, dest);
        if (!(d > 0.0))
            throw Error(ErrorCode::degenerate_geometry, "path loss at zero distance is undefined");
        const double lambda = p.wavelength();
        const double fourpi = 4.0 * pi;
        auto comm_los = [&]
        { return lambda * lambda / (std::pow(fourpi * d, 2) * std::exp(2.0 * p.absorption * d)); };

        switch (mode)
        {
        case PathlossMode::comm_los:
            return comm_los();
        case PathlossMode::radar_los:
            return lambda * lambda * p.radar_cross_section /
                   (std::pow(fourpi, 3) * std::pow(d, 4) * std::exp(4.0 * p.absorption * d));
        case PathlossMode::comm_nlos:
            return comm_los() * p.nlos_loss * p.nlos_loss;
        case PathlossMode::expected:
        {
            const double pn = nlos_probability(p, uav_pos, dest);
            const double los = comm_los();
            return (1.0 - pn) * los + pn * los * p.nlos_loss * p.nlos_loss;
        }
        }
        return 0.0;
    }

    struct ChannelVector
    {
        std::vector<cdouble> entries;
        double pathloss_linear = 0.0;
    };

    // h = sqrt(PL) * exp(j 2 pi f d / c) * a
    inline ChannelVector channel_vector(const ChannelParams &p, const ArrayConfig &config, const Vec3 &uav_pos,
                                        const RotationAngles &angles, const Vec3 &dest, PathlossMode mode)
    {
        ChannelVector h;
        h.pathloss_linear = pathloss(p, mode, uav_pos, dest);
        const double d = distance(uav_pos, dest);
        const cdouble common = std::sqrt(h.pathloss_linear) * std::polar(1.0, 2.0 * pi * p.carrier_frequency * d / speed_of_light);
        h.entries = steering_vector(config, uav_pos, angles, dest);
        for (auto &e : h.entries)
            e *= common;
        return h;
    }

    // Received power |h^H x|^2 of a beam, mW
    inline double received_power(const ChannelVector &h, const BeamWeights &w)
    {
        return std::norm(inner(h.entries, w.entries)) * w.power_per_element;
    }

    // Worst case: the radar waveform is not cancelled at the ground station
    inline double sinr(const ChannelVector &h_comm, const ChannelVector &h_sense, const BeamWeights &w_comm,
                       const BeamWeights &w_sense, double noise_power)
    {
        if (h_comm.entries.size() != w_comm.size() || h_sense.entries.size() != w_sense.size())
            throw Error(ErrorCode::dimension_mismatch, "channel and weight dimensions differ");
        return received_power(h_comm, w_comm) / (noise_power + received_power(h_sense, w_sense));
    }

    // Shannon rate, bit/s
    inline double achievable_rate(double sinr_linear, double bandwidth)
    {
        return bandwidth * std::log2(1.0 + std::max(0.0, sinr_linear));
    }

} // namespace isac

#endif
