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

#ifndef ISAC_PATTERN_HPP
#define ISAC_PATTERN_HPP

#include "channel.hpp"
#include "weights.hpp"

#include <limits>
#include <ostream>

namespace isac
{
    // Cardioid power pattern of a patch element, off_broadside in [0, pi]
    inline double element_gain(double off_broadside)
    {
        const double a = 0.5 * (1.0 + std::cos(off_broadside));
        return a * a;
    }

    inline double element_gain(ElementModel model, double off_broadside)
    {
        return model == ElementModel::isotropic ? 1.0 : element_gain(off_broadside);
    }

    // Angle between a direction and the rotated broadside (+y of the unrotated frame). The same unit vector
    // enters the steering phase, so element and array factor are evaluated on one convention.
    inline double off_broadside_angle(const RotationAngles &orientation, const DirectionAngles &dir)
    {
        const Vec3 local = transpose_times(rotation_matrix(orientation), direction_vector(dir));
        return std::acos(std::clamp(local.y, -1.0, 1.0));
    }

    // Fast evaluation of |a(dir)^H w|^2 * g_e(dir) for a fixed weight vector and orientation.
    //
    // With element offsets on the half-wavelength grid the phase of element (mx, mz) towards a direction
    // with array-frame unit vector l is pi * (mx * l.x + mz * l.z), so the sum factorizes per row.
    class PatternEvaluator
    {
    public:
        PatternEvaluator(std::span<const cdouble> weights, const ArrayConfig &config, const RotationAngles &orientation)
            : side_(config.side()), model_(config.element), R_(rotation_matrix(orientation)),
              weights_(weights.begin(), weights.end()), ex_(side_), ez_(side_)
        {
            config.validate();
            if (weights.size() != config.num_elements)
                throw Error(ErrorCode::dimension_mismatch, "weights have " + std::to_string(weights.size()) +
                                                               " entries, array has " + std::to_string(config.num_elements));
        }

        // a^H w for a direction in the array frame
        cdouble array_factor_local(const Vec3 &l) const
        {
            fill_phasors(ex_, -pi * l.x);
            fill_phasors(ez_, -pi * l.z);
            cdouble total{};
            for (std::size_t ix = 0; ix < side_; ++ix)
            {
                const cdouble *row = weights_.data() + ix * side_;
                cdouble s{};
                for (std::size_t iz = 0; iz < side_; ++iz)
                    s += row[iz] * ez_[iz];
                total += ex_[ix] * s;
            }
            return total;
        }

        double gain_local(const Vec3 &l) const
        {
            const double ge = model_ == ElementModel::isotropic ? 1.0 : square(0.5 * (1.0 + l.y));
            return std::norm(array_factor_local(l)) * ge;
        }

        Vec3 to_local(const DirectionAngles &dir) const { return transpose_times(R_, direction_vector(dir)); }

        double gain(const DirectionAngles &dir) const { return gain_local(to_local(dir)); }

    private:
        static double square(double v) { return v * v; }

        static void fill_phasors(std::vector<cdouble> &out, double step)
        {
            const cdouble base = std::polar(1.0, step);
            cdouble cur = base;
            for (auto &e : out)
            {
                e = cur;
                cur *= base;
            }
        }

        std::size_t side_;
        ElementModel model_;
        Mat3 R_;
        std::vector<cdouble> weights_;
        mutable std::vector<cdouble> ex_, ez_;
    };

    // Linear power gain of the normalized entries towards `dir` (power per element not included)
    inline double array_gain(const BeamWeights &weights, const ArrayConfig &config, const Pose &pose, const DirectionAngles &dir)
    {
        return PatternEvaluator(weights.entries, config, pose.orientation).gain(dir);
    }

    // Effective isotropic radiated power towards `pointing`, dBm
    inline double eirp(const BeamWeights &weights, const ArrayConfig &config, const Pose &pose, const DirectionAngles &pointing)
    {
        return linear_to_db(weights.power_per_element * array_gain(weights, config, pose, pointing));
    }

    enum class CutPlane
    {
        azimuth,  // phi sweeps (-pi, pi] on the cone theta = theta0 around broadside
        elevation // signed theta sweeps [-pi/2, pi/2] along the great circle through broadside and the pointing
    };

    // Principal cut in array-frame polar angles. The planar aperture radiates a mirror image of every lobe into the
    // opposite half-space, so the elevation cut stays in the half-space that contains the pointing.
    struct PatternCut
    {
        CutPlane plane = CutPlane::azimuth;
        std::vector<double> angles;   // radians, strictly increasing
        std::vector<double> gains_db; // normalized to a 0 dB peak
        bool periodic = false;
    };

    inline constexpr double default_cut_step_deg = 0.05;
    inline constexpr double db_floor = -400.0;

    // Local unit vector of a cut sample. Pointings behind the array plane (theta0 > pi/2) are cut around -y.
    inline Vec3 cut_local_vector(CutPlane plane, const ArrayAngles &pointing, double angle)
    {
        if (plane == CutPlane::azimuth)
            return local_vector({pointing.theta, angle});
        const double side = pointing.theta <= 0.5 * pi ? 1.0 : -1.0;
        const double c = std::cos(angle), s = std::sin(angle);
        return {s * std::cos(pointing.phi), side * c, s * std::sin(pointing.phi)};
    }

    // Position of the pointing direction on a cut's angle axis
    inline double cut_coordinate(CutPlane plane, const ArrayAngles &pointing)
    {
        if (plane == CutPlane::azimuth)
            return pointing.phi;
        return pointing.theta <= 0.5 * pi ? pointing.theta : pi - pointing.theta;
    }

    inline bool cut_is_periodic(CutPlane plane) { return plane == CutPlane::azimuth; }

    // Azimuth cuts sample (-pi, pi], elevation cuts [-pi/2, pi/2]
    inline std::vector<double> cut_angles(CutPlane plane, double step_deg)
    {
        if (!(step_deg > 0.0 && step_deg <= 0.1 + 1e-12))
            throw Error(ErrorCode::invalid_config, "cut grid step must lie in (0, 0.1] degrees");
        if (plane == CutPlane::azimuth)
        {
            const auto n = static_cast<std::size_t>(std::llround(360.0 / step_deg));
            const double step = 2.0 * pi / static_cast<double>(n);
            std::vector<double> a(n);
            for (std::size_t k = 0; k < n; ++k)
                a[k] = -pi + static_cast<double>(k + 1) * step;
            return a;
        }
        const auto n = static_cast<std::size_t>(std::llround(180.0 / step_deg));
        const double step = pi / static_cast<double>(n);
        std::vector<double> a(n + 1);
        for (std::size_t k = 0; k <= n; ++k)
            a[k] = -0.5 * pi + static_cast<double>(k) * step;
        return a;
    }

    inline PatternCut normalized_cut(CutPlane plane, std::vector<double> angles, const std::vector<double> &linear)
    {
        PatternCut cut;
        cut.plane = plane;
        cut.periodic = cut_is_periodic(plane);
        cut.angles = std::move(angles);
        cut.gains_db.resize(linear.size());
        const double peak = linear.empty() ? 0.0 : *std::max_element(linear.begin(), linear.end());
        for (std::size_t k = 0; k < linear.size(); ++k)
            cut.gains_db[k] = (peak > 0.0 && linear[k] > 0.0) ? std::max(db_floor, 10.0 * std::log10(linear[k] / peak)) : db_floor;
        return cut;
    }

    inline PatternCut pattern_cut(const PatternEvaluator &eval, CutPlane plane, const DirectionAngles &pointing,
                                  double step_deg = default_cut_step_deg)
    {
        const ArrayAngles p = array_angles_of_local(eval.to_local(pointing));
        auto angles = cut_angles(plane, step_deg);
        std::vector<double> lin(angles.size());
        for (std::size_t k = 0; k < lin.size(); ++k)
            lin[k] = eval.gain_local(cut_local_vector(plane, p, angles[k]));
        return normalized_cut(plane, std::move(angles), lin);
    }

    inline PatternCut pattern_cut(const BeamWeights &weights, const ArrayConfig &config, const Pose &pose, CutPlane plane,
                                  const DirectionAngles &pointing, double step_deg = default_cut_step_deg)
    {
        return pattern_cut(PatternEvaluator(weights.entries, config, pose.orientation), plane, pointing, step_deg);
    }

    struct SllResult
    {
        double sll_db = std::numeric_limits<double>::infinity(); // positive: sidelobes are this far below the peak
        bool found = false;                                      // false: no sidelobe outside the main lobe
    };

    // Main lobe spans from the global peak down to the first local minimum on each side; the SLL is the
    // distance from the peak to the highest local maximum outside that region.
    inline SllResult extract_sll(const PatternCut &cut)
    {
        const auto &g = cut.gains_db;
        const std::size_t n = g.size();
        SllResult out;
        if (n < 3)
            return out;
        const auto p = static_cast<std::size_t>(std::max_element(g.begin(), g.end()) - g.begin());
        const double peak = g[p];

        auto next = [&](std::size_t i) { return cut.periodic ? (i + 1) % n : i + 1; };
        auto prev = [&](std::size_t i) { return cut.periodic ? (i + n - 1) % n : i - 1; };
        auto in_range = [&](std::size_t i) { return cut.periodic || i < n; };

        // walk outwards while the pattern keeps falling
        std::size_t right = p, steps_r = 0;
        while (steps_r < n - 1)
        {
            if (!cut.periodic && right + 1 >= n)
                break;
            const std::size_t j = next(right);
            if (g[j] > g[right])
                break;
            right = j;
            ++steps_r;
        }
        std::size_t left = p, steps_l = 0;
        while (steps_l < n - 1)
        {
            if (!cut.periodic && left == 0)
                break;
            const std::size_t j = prev(left);
            if (g[j] > g[left])
                break;
            left = j;
            ++steps_l;
        }
        if (steps_l + steps_r + 1 >= n)
            return out; // main lobe covers the whole cut

        // indices strictly outside [left, right] going right from `right`
        double best = -std::numeric_limits<double>::infinity();
        std::size_t i = next(right);
        const std::size_t remaining = n - (steps_l + steps_r + 1);
        for (std::size_t c = 0; c < remaining && in_range(i); ++c, i = next(i))
        {
            const bool has_prev = cut.periodic || i > 0;
            const bool has_next = cut.periodic || i + 1 < n;
            const double gp = has_prev ? g[prev(i)] : -std::numeric_limits<double>::infinity();
            const double gn = has_next ? g[next(i)] : -std::numeric_limits<double>::infinity();
            if (g[i] >= gp && g[i] >= gn && g[i] > db_floor)
                best = std::max(best, g[i]);
        }
        if (!std::isfinite(best))
            return out;
        out.found = true;
        out.sll_db = peak - best;
        return out;
    }

    inline const char *to_string(CutPlane p) { return p == CutPlane::azimuth ? "azimuth" : "elevation"; }

    inline void write_cuts_csv(std::ostream &os, std::span<const PatternCut> cuts)
    {
        os << "plane,angle_deg,gain_db\n";
        char buf[80];
        for (const auto &cut : cuts)
            for (std::size_t k = 0; k < cut.angles.size(); ++k)
            {
                std::snprintf(buf, sizeof buf, "%s,%.4f,%.6f\n", to_string(cut.plane), rad2deg(cut.angles[k]), cut.gains_db[k]);
                os << buf;
            }
    }

    // Full-sphere gain grid, normalized to the grid peak
    inline void write_pattern_grid_csv(std::ostream &os, const BeamWeights &weights, const ArrayConfig &config,
                                       const Pose &pose, double step_deg = 1.0)
    {
        const PatternEvaluator eval(weights.entries, config, pose.orientation);
        const auto n_az = static_cast<std::size_t>(std::llround(360.0 / step_deg));
        const auto n_el = static_cast<std::size_t>(std::llround(180.0 / step_deg)) + 1;
        std::vector<double> g(n_az * n_el);
        double peak = 0.0;
        for (std::size_t i = 0; i < n_az; ++i)
            for (std::size_t j = 0; j < n_el; ++j)
            {
                const double az = -180.0 + static_cast<double>(i + 1) * step_deg;
                const double el = static_cast<double>(j) * step_deg;
                g[i * n_el + j] = eval.gain({deg2rad(el), deg2rad(az)});
                peak = std::max(peak, g[i * n_el + j]);
            }
        os << "az_deg,el_deg,gain_db\n";
        char buf[96];
        for (std::size_t i = 0; i < n_az; ++i)
            for (std::size_t j = 0; j < n_el; ++j)
            {
                const double v = g[i * n_el + j];
                const double db = (peak > 0.0 && v > 0.0) ? std::max(db_floor, 10.0 * std::log10(v / peak)) : db_floor;
                std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.6f\n", -180.0 + static_cast<double>(i + 1) * step_deg,
                              static_cast<double>(j) * step_deg, db);
                os << buf;
            }
    }

} // namespace isac

#endif
