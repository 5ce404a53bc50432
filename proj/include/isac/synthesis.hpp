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

#ifndef ISAC_SYNTHESIS_HPP
#define ISAC_SYNTHESIS_HPP

#include "nulling.hpp"
#include "pattern.hpp"
#include "taper.hpp"

#include <tuple>

namespace isac
{
    struct SynthesisRequest
    {
        DirectionAngles pointing;
        double sll_min_az = 15.0;  // dB
        double sll_min_el = 15.0;  // dB
        double eirp_target = 15.0; // dBm
        std::vector<DirectionAngles> nulls;

        double k1 = 1.0, k2 = 1.0;
        double eta = 0.05;
        int counter_max = 200;
        int stall_limit = 30; // stop after this many evaluations without a better candidate; 0 disables

        double eirp_max = 37.0;                                          // dBm
        double power_cap = std::numeric_limits<double>::infinity();      // mW available to this beam
        double eirp_tolerance = 0.5;                                     // dB
        double cut_step_deg = default_cut_step_deg;
        bool sll_two_sided = false; // also penalize SLL above the minimum

        void validate(const ArrayConfig &config) const
        {
            if (!(sll_min_az > 0.0) || !(sll_min_el > 0.0))
                throw Error(ErrorCode::invalid_config, "SLL minima must be positive");
            if (!std::isfinite(eirp_target) || eirp_target > eirp_max + 1e-9)
                throw Error(ErrorCode::invalid_config, "EIRP target must be finite and not exceed the maximum EIRP");
            if (nulls.size() >= config.num_elements)
                throw Error(ErrorCode::invalid_config, "too many nulls for the array");
            if (!(k1 >= 0.0) || !(k2 >= 0.0) || !(eta > 0.0) || counter_max < 1 || stall_limit < 0)
                throw Error(ErrorCode::invalid_config, "invalid cost weights, threshold or iteration budget");
            if (!(power_cap > 0.0))
                throw Error(ErrorCode::invalid_config, "power cap must be positive");
            if (!(pointing.theta >= 0.0 && pointing.theta <= pi))
                throw Error(ErrorCode::invalid_config, "pointing theta outside [0, pi]");
        }
    };

    struct SynthesisResult
    {
        BeamWeights weights;
        double achieved_sll_az = 0.0; // dB, +inf when the cut shows no sidelobe
        double achieved_sll_el = 0.0;
        double achieved_eirp = 0.0; // dBm
        std::size_t active_rows = 0, active_cols = 0;
        int iterations = 0;
        double cost = 0.0;
        bool converged = false;
        double taper_sll_az = 0.0, taper_sll_el = 0.0; // Chebyshev setpoints of the chosen candidate

        double achieved_sll() const { return std::min(achieved_sll_az, achieved_sll_el); }
        std::size_t active_elements() const { return active_rows * active_cols; }
    };

    // Chebyshev-tapered, phase-steered excitation over a centered block of `rows` x `cols` active elements.
    // Rows run along the local x index, columns along z; the phase is referenced to the array centroid.
    inline BeamWeights steered_taper(const ArrayConfig &config, const RotationAngles &orientation, const DirectionAngles &pointing,
                                     std::size_t rows, std::size_t cols, double sll_az, double sll_el)
    {
        config.validate();
        const std::size_t S = config.side();
        if (rows < 1 || cols < 1 || rows > S || cols > S)
            throw Error(ErrorCode::invalid_config, "active block exceeds the array");
        const auto tx = taper_or_uniform(static_cast<int>(rows), sll_az);
        const auto tz = taper_or_uniform(static_cast<int>(cols), sll_el);
        const std::size_t x0 = (S - rows) / 2, z0 = (S - cols) / 2;
        const Vec3 l = transpose_times(rotation_matrix(orientation), direction_vector(pointing));
        const double c = 0.5 * static_cast<double>(S + 1);

        BeamWeights w = BeamWeights::zeros(config.num_elements);
        for (std::size_t ix = 0; ix < rows; ++ix)
            for (std::size_t iz = 0; iz < cols; ++iz)
            {
                const std::size_t m = (x0 + ix) * S + (z0 + iz);
                const auto [mx, mz] = grid_index(m, S);
                const double phase = pi * ((static_cast<double>(mx) - c) * l.x + (static_cast<double>(mz) - c) * l.z);
                w.entries[m] = tx[ix] * tz[iz] * std::polar(1.0, phase);
            }
        return w;
    }

    namespace detail
    {
        struct CutSamples
        {
            CutPlane plane;
            std::vector<double> angles;
            std::vector<Vec3> local;
        };

        inline CutSamples cut_samples(CutPlane plane, const ArrayAngles &pointing, double step_deg)
        {
            CutSamples s{plane, cut_angles(plane, step_deg), {}};
            s.local.reserve(s.angles.size());
            for (double a : s.angles)
                s.local.push_back(cut_local_vector(plane, pointing, a));
            return s;
        }

        inline PatternCut evaluate_cut(const PatternEvaluator &eval, const CutSamples &s)
        {
            std::vector<double> lin(s.local.size());
            for (std::size_t k = 0; k < s.local.size(); ++k)
                lin[k] = eval.gain_local(s.local[k]);
            return normalized_cut(s.plane, s.angles, lin);
        }

        struct Evaluation
        {
            SynthesisResult result;
            bool feasible = false; // SLL minima and EIRP tolerance met
        };

        // Relative SLL error of one plane; a plane without sidelobes contributes nothing
        inline double sll_term(double achieved, double minimum, bool two_sided)
        {
            if (!std::isfinite(achieved))
                return 0.0;
            const double gap = two_sided ? std::abs(achieved - minimum) : std::max(0.0, minimum - achieved);
            return gap / minimum;
        }

        // Ordering used to keep the best candidate: feasible first, then lower cost
        inline bool better(const Evaluation &a, const Evaluation &b)
        {
            return std::make_tuple(!a.feasible, a.result.cost) < std::make_tuple(!b.feasible, b.result.cost);
        }
    } // namespace detail

    inline double synthesis_cost(const SynthesisRequest &req, double sll_az, double sll_el, double eirp_dbm)
    {
        const double z1 = req.k1 * (detail::sll_term(sll_az, req.sll_min_az, req.sll_two_sided) +
                                    detail::sll_term(sll_el, req.sll_min_el, req.sll_two_sided));
        const double z2 = std::isfinite(eirp_dbm)
                              ? req.k2 * std::abs(eirp_dbm - req.eirp_target) / std::max(std::abs(req.eirp_target), 1.0)
                              : std::numeric_limits<double>::infinity();
        return z1 + z2;
    }

    // Beam-pattern optimizer: searches active rows/columns, Chebyshev setpoints and power per element
    // until the cost drops below eta or the evaluation budget is spent.
    inline SynthesisResult synthesize(const SynthesisRequest &req, const ArrayConfig &config, const Pose &pose)
    {
        config.validate();
        req.validate(config);
        const std::size_t S = config.side();

        // cut sample directions depend only on geometry
        const PatternEvaluator geom(std::vector<cdouble>(config.num_elements), config, pose.orientation);
        const Vec3 l0 = geom.to_local(req.pointing);
        const ArrayAngles p0 = array_angles_of_local(l0);
        const auto az_samples = detail::cut_samples(CutPlane::azimuth, p0, req.cut_step_deg);
        const auto el_samples = detail::cut_samples(CutPlane::elevation, p0, req.cut_step_deg);
        const double target_lin = db_to_linear(req.eirp_target);
        const double cap_lin = db_to_linear(req.eirp_max);

        int counter = 0;
        auto evaluate = [&](std::size_t g, std::size_t v, double s_az, double s_el)
        {
            ++counter;
            BeamWeights w = steered_taper(config, pose.orientation, req.pointing, g, v, s_az, s_el);
            w = apply_nulls(w, config, pose, req.nulls, req.pointing);
            w.normalize_peak();

            const PatternEvaluator eval(w.entries, config, pose.orientation);
            const double gain = eval.gain_local(l0);
            double ppe = 0.0;
            if (gain > 0.0 && w.norm2() > 0.0)
                ppe = std::min({target_lin / gain, cap_lin / gain, req.power_cap / w.norm2()});
            w.power_per_element = ppe;

            detail::Evaluation e;
            auto &r = e.result;
            r.achieved_sll_az = extract_sll(detail::evaluate_cut(eval, az_samples)).sll_db;
            r.achieved_sll_el = extract_sll(detail::evaluate_cut(eval, el_samples)).sll_db;
            r.achieved_eirp = linear_to_db(ppe * gain);
            r.weights = std::move(w);
            r.active_rows = g;
            r.active_cols = v;
            r.taper_sll_az = s_az;
            r.taper_sll_el = s_el;
            r.iterations = counter;
            r.cost = synthesis_cost(req, r.achieved_sll_az, r.achieved_sll_el, r.achieved_eirp);
            e.feasible = r.achieved_sll_az >= req.sll_min_az && r.achieved_sll_el >= req.sll_min_el &&
                         std::abs(r.achieved_eirp - req.eirp_target) <= req.eirp_tolerance;
            r.converged = e.feasible && r.cost < req.eta;
            return e;
        };

        auto finish = [&](detail::Evaluation best)
        {
            best.result.iterations = counter;
            return best.result;
        };

        detail::Evaluation best = evaluate(S, S, req.sll_min_az, req.sll_min_el);
        if (best.result.converged || counter >= req.counter_max)
            return finish(best);

        int since_better = 0;
        auto consider = [&](const detail::Evaluation &e)
        {
            if (detail::better(e, best))
            {
                best = e;
                since_better = 0;
            }
            else
                ++since_better;
            return best.result.converged || counter >= req.counter_max || (req.stall_limit > 0 && since_better >= req.stall_limit);
        };
        auto sll_ok = [&](const detail::Evaluation &e)
        { return e.result.achieved_sll_az >= req.sll_min_az && e.result.achieved_sll_el >= req.sll_min_el; };

        // coarse setpoint sweep on the full aperture, then on reduced apertures only if SLL is still unmet
        bool any_sll_ok = sll_ok(best);
        for (double off : {5.0, 10.0, 15.0, 20.0})
        {
            const auto e = evaluate(S, S, req.sll_min_az + off, req.sll_min_el + off);
            any_sll_ok = any_sll_ok || sll_ok(e);
            if (consider(e))
                return finish(best);
        }
        if (!any_sll_ok)
            for (std::size_t shrink = 1; shrink <= 2 && shrink < S; ++shrink)
                for (double off : {0.0, 5.0, 10.0, 15.0, 20.0})
                    if (consider(evaluate(S - shrink, S - shrink, req.sll_min_az + off, req.sll_min_el + off)))
                        return finish(best);

        // quasi-Newton refinement of the two setpoints towards a level just above the minima
        const std::size_t g = best.result.active_rows, v = best.result.active_cols;
        const double t_az = req.sll_min_az * (1.0 + 0.2 * req.eta / std::max(req.k1, 1e-12));
        const double t_el = req.sll_min_el * (1.0 + 0.2 * req.eta / std::max(req.k1, 1e-12));
        constexpr double lo = 3.0, hi = 90.0, fd_step = 1.5, max_step = 8.0;

        auto residual = [&](const detail::Evaluation &e)
        {
            auto one = [&](double sll, double t)
            {
                if (!std::isfinite(sll))
                    return 0.0;
                return req.sll_two_sided ? sll - t : std::min(0.0, sll - t);
            };
            return std::array<double, 2>{one(e.result.achieved_sll_az, t_az), one(e.result.achieved_sll_el, t_el)};
        };

        detail::Evaluation cur = best;
        double sa = cur.result.taper_sll_az, se = cur.result.taper_sll_el;
        auto r = residual(cur);

        // finite-difference Jacobian
        std::array<std::array<double, 2>, 2> J{};
        {
            const double da = sa + fd_step <= hi ? fd_step : -fd_step;
            const auto ea = evaluate(g, v, sa + da, se);
            if (consider(ea))
                return finish(best);
            const double de = se + fd_step <= hi ? fd_step : -fd_step;
            const auto ee = evaluate(g, v, sa, se + de);
            if (consider(ee))
                return finish(best);
            const auto ra = residual(ea), re = residual(ee);
            J[0] = {(ra[0] - r[0]) / da, (re[0] - r[0]) / de};
            J[1] = {(ra[1] - r[1]) / da, (re[1] - r[1]) / de};
        }

        double compass = 4.0;
        while (counter < req.counter_max && !(req.stall_limit > 0 && since_better >= req.stall_limit))
        {
            // Newton step from the current Jacobian, falling back to a diagonal secant when singular
            double step_a = 0.0, step_e = 0.0;
            const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
            if (std::abs(det) > 1e-6)
            {
                step_a = -(J[1][1] * r[0] - J[0][1] * r[1]) / det;
                step_e = -(-J[1][0] * r[0] + J[0][0] * r[1]) / det;
            }
            else
            {
                step_a = std::abs(J[0][0]) > 1e-3 ? -r[0] / J[0][0] : (r[0] < 0.0 ? compass : -compass);
                step_e = std::abs(J[1][1]) > 1e-3 ? -r[1] / J[1][1] : (r[1] < 0.0 ? compass : -compass);
            }
            if (!std::isfinite(step_a) || !std::isfinite(step_e))
                step_a = step_e = 0.0;
            step_a = std::clamp(step_a, -max_step, max_step);
            step_e = std::clamp(step_e, -max_step, max_step);
            const double na = std::clamp(sa + step_a, lo, hi), ne = std::clamp(se + step_e, lo, hi);
            step_a = na - sa;
            step_e = ne - se;

            if (std::abs(step_a) < 1e-6 && std::abs(step_e) < 1e-6)
            {
                // stalled: compass probe around the current point
                bool moved = false;
                for (auto [da, de] : {std::pair{compass, 0.0}, {-compass, 0.0}, {0.0, compass}, {0.0, -compass}})
                {
                    const double pa = std::clamp(sa + da, lo, hi), pe = std::clamp(se + de, lo, hi);
                    const auto e = evaluate(g, v, pa, pe);
                    const bool improved = e.result.cost < cur.result.cost;
                    if (consider(e))
                        return finish(best);
                    if (improved)
                    {
                        cur = e;
                        sa = pa;
                        se = pe;
                        r = residual(cur);
                        moved = true;
                        break;
                    }
                    if (counter >= req.counter_max)
                        break;
                }
                if (!moved)
                {
                    compass *= 0.5;
                    if (compass < 0.05)
                        break;
                }
                continue;
            }

            const auto e = evaluate(g, v, na, ne);
            if (consider(e))
                return finish(best);
            const auto rn = residual(e);

            // Broyden rank-one update J += (dr - J ds) ds^T / |ds|^2
            const double dr0 = rn[0] - r[0], dr1 = rn[1] - r[1];
            const double ds2 = step_a * step_a + step_e * step_e;
            const double u0 = dr0 - (J[0][0] * step_a + J[0][1] * step_e);
            const double u1 = dr1 - (J[1][0] * step_a + J[1][1] * step_e);
            J[0][0] += u0 * step_a / ds2;
            J[0][1] += u0 * step_e / ds2;
            J[1][0] += u1 * step_a / ds2;
            J[1][1] += u1 * step_e / ds2;

            sa = na;
            se = ne;
            cur = e;
            r = rn;
        }
        return finish(best);
    }

} // namespace isac

#endif
