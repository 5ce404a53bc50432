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

#ifndef ISAC_GEOMETRY_HPP
#define ISAC_GEOMETRY_HPP

#include "errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

namespace isac
{
    using cdouble = std::complex<double>;

    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double pi = std::numbers::pi;

    inline constexpr double deg2rad(double deg) { return deg * pi / 180.0; }
    inline constexpr double rad2deg(double rad) { return rad * 180.0 / pi; }

    // Wraps an angle into (-pi, pi]
    inline double wrap_angle(double a)
    {
        a = std::remainder(a, 2.0 * pi);
        if (a <= -pi)
            a += 2.0 * pi;
        return a;
    }

    struct Vec3
    {
        double x = 0.0, y = 0.0, z = 0.0; // meters

        Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
        Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
        Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
        bool operator==(const Vec3 &) const = default;

        double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
        double norm() const { return std::sqrt(dot(*this)); }
        bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    };

    inline double distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }
    inline double horizontal_distance(const Vec3 &a, const Vec3 &b) { return std::hypot(a.x - b.x, a.y - b.y); }

    // Rotation angles about x, y and z, radians
    struct RotationAngles
    {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        bool operator==(const RotationAngles &) const = default;
    };

    // Position and orientation of the array center
    struct Pose
    {
        Vec3 position;
        RotationAngles orientation;
    };

    using Mat3 = std::array<std::array<double, 3>, 3>;

    inline Vec3 operator*(const Mat3 &R, const Vec3 &v)
    {
        return {R[0][0] * v.x + R[0][1] * v.y + R[0][2] * v.z,
                R[1][0] * v.x + R[1][1] * v.y + R[1][2] * v.z,
                R[2][0] * v.x + R[2][1] * v.y + R[2][2] * v.z};
    }

    // R^T v, i.e. world vector expressed in the rotated frame
    inline Vec3 transpose_times(const Mat3 &R, const Vec3 &v)
    {
        return {R[0][0] * v.x + R[1][0] * v.y + R[2][0] * v.z,
                R[0][1] * v.x + R[1][1] * v.y + R[2][1] * v.z,
                R[0][2] * v.x + R[1][2] * v.y + R[2][2] * v.z};
    }

    // Yaw-pitch-roll matrix; entries follow the explicit element formulas, alpha about z, beta about y, gamma about x
    inline Mat3 rotation_matrix(const RotationAngles &a)
    {
        const double ca = std::cos(a.alpha), sa = std::sin(a.alpha);
        const double cb = std::cos(a.beta), sb = std::sin(a.beta);
        const double cg = std::cos(a.gamma), sg = std::sin(a.gamma);
        Mat3 R{};
        R[0] = {ca * cb, ca * sb * sg - sa * cg, ca * sb * cg + sa * sg};
        R[1] = {sa * cb, sa * sb * sg + ca * cg, sa * sb * cg - ca * sg};
        R[2] = {-sb, cb * sg, cb * cg};
        return R;
    }

    inline double determinant(const Mat3 &R)
    {
        return R[0][0] * (R[1][1] * R[2][2] - R[1][2] * R[2][1]) -
               R[0][1] * (R[1][0] * R[2][2] - R[1][2] * R[2][0]) +
               R[0][2] * (R[1][0] * R[2][1] - R[1][1] * R[2][0]);
    }

    enum class ElementModel
    {
        cardioid,
        isotropic
    };

    // Square planar array on a half-wavelength grid in the local XZ plane, broadside +y
    struct ArrayConfig
    {
        std::size_t num_elements = 100;
        double carrier_frequency = 0.3e12; // Hz
        ElementModel element = ElementModel::cardioid;

        double wavelength() const { return speed_of_light / carrier_frequency; }
        double spacing() const { return 0.5 * wavelength(); }

        std::size_t side() const
        {
            auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(num_elements))));
            return s;
        }

        void validate() const
        {
            if (num_elements == 0)
                throw Error(ErrorCode::invalid_config, "array must have at least one element");
            const std::size_t s = side();
            if (s * s != num_elements)
                throw Error(ErrorCode::invalid_config, "number of elements " + std::to_string(num_elements) + " is not a perfect square");
            if (!(carrier_frequency > 0.0) || !std::isfinite(carrier_frequency))
                throw Error(ErrorCode::invalid_config, "carrier frequency must be positive");
        }
    };

    // Integer grid indices (m_x, m_z), both starting at 1
    struct GridIndex
    {
        std::size_t mx, mz;
    };

    inline GridIndex grid_index(std::size_t m, std::size_t side) { return {1 + m / side, 1 + m % side}; }

    // Unrotated element offsets relative to the array center point
    inline std::vector<Vec3> local_element_offsets(const ArrayConfig &config)
    {
        config.validate();
        const std::size_t S = config.side();
        const double d = config.spacing();
        std::vector<Vec3> out(config.num_elements);
        for (std::size_t m = 0; m < config.num_elements; ++m)
        {
            const auto [mx, mz] = grid_index(m, S);
            out[m] = {static_cast<double>(mx) * d, 0.0, static_cast<double>(mz) * d};
        }
        return out;
    }

    inline std::vector<Vec3> element_positions(const ArrayConfig &config, const Vec3 &center, const RotationAngles &angles)
    {
        const Mat3 R = rotation_matrix(angles);
        auto out = local_element_offsets(config);
        for (auto &p : out)
            p = center + R * p;
        return out;
    }

    // theta in [0, pi] measured from +z, phi in (-pi, pi]
    struct DirectionAngles
    {
        double theta = 0.0;
        double phi = 0.0;
    };

    inline Vec3 direction_vector(const DirectionAngles &d)
    {
        const double st = std::sin(d.theta);
        return {std::cos(d.phi) * st, std::sin(d.phi) * st, std::cos(d.theta)};
    }

    // Angles of a unit vector; vertical vectors get phi = 0
    inline DirectionAngles angles_of(const Vec3 &u)
    {
        const double n = u.norm();
        if (!(n > 0.0))
            throw Error(ErrorCode::degenerate_geometry, "zero-length direction");
        DirectionAngles d;
        d.theta = std::acos(std::clamp(u.z / n, -1.0, 1.0));
        if (u.x == 0.0 && u.y == 0.0)
            d.phi = 0.0;
        else
        {
            d.phi = std::atan2(u.y, u.x);
            if (d.phi <= -pi)
                d.phi = pi;
        }
        return d;
    }

    // Direction of the vector from `to_pos` towards `from_pos`: theta = acos((from_z - to_z) / d), phi = atan2(dy, dx)
    inline DirectionAngles direction_angles(const Vec3 &from_pos, const Vec3 &to_pos)
    {
        const Vec3 diff = from_pos - to_pos;
        if (!(diff.norm() > 0.0))
            throw Error(ErrorCode::degenerate_geometry, "direction between coincident points is undefined");
        return angles_of(diff);
    }

    // Angular separation between two directions, radians
    inline double angular_separation(const DirectionAngles &a, const DirectionAngles &b)
    {
        return std::acos(std::clamp(direction_vector(a).dot(direction_vector(b)), -1.0, 1.0));
    }

    // Polar angles in the array frame: theta off broadside (+y), phi around broadside measured from +x towards +z.
    // (0, 0) is boresight, the reference used for pattern plots and principal cuts.
    struct ArrayAngles
    {
        double theta = 0.0; // [0, pi]
        double phi = 0.0;   // (-pi, pi]
    };

    inline ArrayAngles array_angles_of_local(const Vec3 &l)
    {
        ArrayAngles a;
        a.theta = std::acos(std::clamp(l.y, -1.0, 1.0));
        a.phi = std::hypot(l.x, l.z) < 1e-12 ? 0.0 : std::atan2(l.z, l.x); // on-axis round-off must not pick a cut plane
        if (a.phi <= -pi)
            a.phi = pi;
        return a;
    }

    inline Vec3 local_vector(const ArrayAngles &a)
    {
        const double st = std::sin(a.theta);
        return {st * std::cos(a.phi), std::cos(a.theta), st * std::sin(a.phi)};
    }

    inline ArrayAngles array_angles(const RotationAngles &orientation, const DirectionAngles &dir)
    {
        return array_angles_of_local(transpose_times(rotation_matrix(orientation), direction_vector(dir)));
    }

    inline DirectionAngles from_array_angles(const RotationAngles &orientation, const ArrayAngles &a)
    {
        return angles_of(rotation_matrix(orientation) * local_vector(a));
    }

    using SteeringVector = std::vector<cdouble>;

    // Inter-element delays tau_m for a direction given as unit vector in world coordinates
    inline std::vector<double> element_delays(const ArrayConfig &config, const RotationAngles &angles, const Vec3 &unit_dir)
    {
        const Mat3 R = rotation_matrix(angles);
        auto offsets = local_element_offsets(config);
        std::vector<double> tau(offsets.size());
        for (std::size_t m = 0; m < offsets.size(); ++m)
            tau[m] = (R * offsets[m]).dot(unit_dir) / speed_of_light;
        return tau;
    }

    inline SteeringVector steering_vector(const ArrayConfig &config, const RotationAngles &angles, const DirectionAngles &dir)
    {
        const auto tau = element_delays(config, angles, direction_vector(dir));
        SteeringVector a(tau.size());
        const double w = 2.0 * pi * config.carrier_frequency;
        for (std::size_t m = 0; m < tau.size(); ++m)
            a[m] = std::polar(1.0, w * tau[m]);
        return a;
    }

    inline SteeringVector steering_vector(const ArrayConfig &config, const Vec3 &uav_pos, const RotationAngles &angles, const Vec3 &dest)
    {
        return steering_vector(config, angles, direction_angles(uav_pos, dest));
    }

    // Time of arrival from element m to the destination, seconds
    inline double toa(const ArrayConfig &config, const Vec3 &uav_pos, const RotationAngles &angles, const Vec3 &dest, std::size_t m)
    {
        if (m >= config.num_elements)
            throw Error(ErrorCode::dimension_mismatch, "element index out of range");
        const auto tau = element_delays(config, angles, direction_vector(direction_angles(uav_pos, dest)));
        return tau[m] + distance(dest, uav_pos) / speed_of_light;
    }

} // namespace isac

#endif
