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

#ifndef ISAC_SCENARIO_HPP
#define ISAC_SCENARIO_HPP

#include "channel.hpp"
#include "pattern.hpp"
#include "synthesis.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <sstream>

namespace isac
{
    inline constexpr int scenario_format_version = 1;

    // Optimizer knobs shared by every synthesis call of a scenario
    struct OptimizerParams
    {
        double k1 = 1.0, k2 = 1.0;
        double eta = 0.05;
        int counter_max = 200;
        int stall_limit = 30;
        double cut_step_deg = default_cut_step_deg;
    };

    struct Scenario
    {
        double area_width = 1500.0, area_height = 1500.0; // m
        std::vector<Vec3> gbs{{200, 200, 2}, {1200, 200, 2}, {700, 750, 2}, {200, 1300, 2}, {1200, 1300, 2}};
        Vec3 target{350, 400, 0};
        Vec3 start{0, 0, 100}, end{700, 800, 100};
        double uav_altitude = 100.0; // m
        double v_max = 10.0;         // m/s
        double slot_duration = 1.0;  // s
        std::size_t max_slots = 300;
        std::size_t num_trajectories = 100;
        double cone_half_angle_deg = 40.0;

        ChannelParams channel;
        ArrayConfig array;
        OptimizerParams optimizer;

        double p_max = 1000.0;      // mW
        double gamma_sinr_db = 0.3; // dB
        double eirp_max_dbm = 37.0;
        double comm_sll_min_db = 15.0;
        double sensing_sll_min_db = 20.0;
        double sensing_eirp_dbm = 20.0;

        double step_length() const { return slot_duration * v_max; }

        bool inside(const Vec3 &p) const { return p.x >= 0.0 && p.x <= area_width && p.y >= 0.0 && p.y <= area_height; }

        void validate() const
        {
            if (!(area_width > 0.0) || !(area_height > 0.0))
                throw Error(ErrorCode::invalid_config, "area dimensions must be positive");
            if (gbs.empty())
                throw Error(ErrorCode::invalid_config, "at least one ground base station is required");
            for (const auto &g : gbs)
                if (!g.finite() || !(uav_altitude > g.z))
                    throw Error(ErrorCode::invalid_config, "UAV altitude must exceed every base-station height");
            if (!(uav_altitude > target.z))
                throw Error(ErrorCode::invalid_config, "UAV altitude must exceed the target height");
            if (!inside(start) || !inside(end))
                throw Error(ErrorCode::invalid_config, "start and end points must lie inside the area");
            if (start.z != uav_altitude || end.z != uav_altitude)
                throw Error(ErrorCode::invalid_config, "start and end points must be at the flight altitude");
            if (!(v_max > 0.0) || !(slot_duration > 0.0) || max_slots < 1)
                throw Error(ErrorCode::invalid_config, "speed, slot duration and slot budget must be positive");
            if (!(cone_half_angle_deg >= 0.0 && cone_half_angle_deg < 90.0))
                throw Error(ErrorCode::invalid_config, "cone half angle must lie in [0, 90) degrees");
            if (!(p_max > 0.0))
                throw Error(ErrorCode::invalid_config, "maximum power must be positive");
            if (!(comm_sll_min_db > 0.0) || !(sensing_sll_min_db > 0.0))
                throw Error(ErrorCode::invalid_config, "SLL minima must be positive");
            if (sensing_eirp_dbm > eirp_max_dbm)
                throw Error(ErrorCode::invalid_config, "sensing EIRP exceeds the EIRP cap");
            if (array.carrier_frequency != channel.carrier_frequency)
                throw Error(ErrorCode::invalid_config, "array and channel carrier frequencies differ");
            array.validate();
            channel.validate();
        }
    };

    // ---- scenario file -------------------------------------------------------------------------------------

    inline nlohmann::ordered_json to_json_vec(const Vec3 &v) { return nlohmann::ordered_json::array({v.x, v.y, v.z}); }

    inline Vec3 vec_from_json(const nlohmann::json &j)
    {
        if (!j.is_array() || j.size() != 3)
            throw Error(ErrorCode::parse, "expected a 3-element position array");
        return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    }

    inline nlohmann::ordered_json scenario_to_json(const Scenario &s)
    {
        nlohmann::ordered_json j;
        j["format_version"] = scenario_format_version;
        j["area_width_m"] = s.area_width;
        j["area_height_m"] = s.area_height;
        auto g = nlohmann::ordered_json::array();
        for (const auto &p : s.gbs)
            g.push_back(to_json_vec(p));
        j["gbs_positions_m"] = g;
        j["target_position_m"] = to_json_vec(s.target);
        j["start_position_m"] = to_json_vec(s.start);
        j["end_position_m"] = to_json_vec(s.end);
        j["uav_altitude_m"] = s.uav_altitude;
        j["max_speed_mps"] = s.v_max;
        j["slot_duration_s"] = s.slot_duration;
        j["max_slots"] = s.max_slots;
        j["num_trajectories"] = s.num_trajectories;
        j["cone_half_angle_deg"] = s.cone_half_angle_deg;
        j["carrier_frequency_hz"] = s.array.carrier_frequency;
        j["num_elements"] = s.array.num_elements;
        j["element_pattern"] = s.array.element == ElementModel::cardioid ? "cardioid" : "isotropic";
        j["bandwidth_hz"] = s.channel.bandwidth;
        j["noise_power_dbm"] = linear_to_db(s.channel.noise_power);
        j["kappa"] = {s.channel.kappa1, s.channel.kappa2, s.channel.kappa3};
        j["absorption_per_m"] = s.channel.absorption;
        j["nlos_loss"] = s.channel.nlos_loss;
        j["radar_cross_section_m2"] = s.channel.radar_cross_section;
        j["rx_gain_db"] = s.channel.rx_gain_db;
        j["max_power_mw"] = s.p_max;
        j["gamma_sinr_db"] = s.gamma_sinr_db;
        j["eirp_max_dbm"] = s.eirp_max_dbm;
        j["comm_sll_min_db"] = s.comm_sll_min_db;
        j["sensing_sll_min_db"] = s.sensing_sll_min_db;
        j["sensing_eirp_dbm"] = s.sensing_eirp_dbm;
        j["optimizer"] = {{"k1", s.optimizer.k1},
                          {"k2", s.optimizer.k2},
                          {"eta", s.optimizer.eta},
                          {"counter_max", s.optimizer.counter_max},
                          {"stall_limit", s.optimizer.stall_limit},
                          {"cut_step_deg", s.optimizer.cut_step_deg}};
        return j;
    }

    inline Scenario scenario_from_json(const nlohmann::json &j)
    {
        try
        {
            if (j.value("format_version", 0) != scenario_format_version)
                throw Error(ErrorCode::parse, "unsupported scenario format_version");
            Scenario s;
            s.area_width = j.at("area_width_m").get<double>();
            s.area_height = j.at("area_height_m").get<double>();
            s.gbs.clear();
            for (const auto &g : j.at("gbs_positions_m"))
                s.gbs.push_back(vec_from_json(g));
            s.target = vec_from_json(j.at("target_position_m"));
            s.start = vec_from_json(j.at("start_position_m"));
            s.end = vec_from_json(j.at("end_position_m"));
            s.uav_altitude = j.at("uav_altitude_m").get<double>();
            s.v_max = j.at("max_speed_mps").get<double>();
            s.slot_duration = j.at("slot_duration_s").get<double>();
            s.max_slots = j.at("max_slots").get<std::size_t>();
            s.num_trajectories = j.at("num_trajectories").get<std::size_t>();
            s.cone_half_angle_deg = j.at("cone_half_angle_deg").get<double>();
            s.array.carrier_frequency = s.channel.carrier_frequency = j.at("carrier_frequency_hz").get<double>();
            s.array.num_elements = j.at("num_elements").get<std::size_t>();
            const auto elem = j.at("element_pattern").get<std::string>();
            if (elem != "cardioid" && elem != "isotropic")
                throw Error(ErrorCode::parse, "element_pattern must be cardioid or isotropic");
            s.array.element = elem == "cardioid" ? ElementModel::cardioid : ElementModel::isotropic;
            s.channel.bandwidth = j.at("bandwidth_hz").get<double>();
            s.channel.noise_power = db_to_linear(j.at("noise_power_dbm").get<double>());
            const auto &k = j.at("kappa");
            s.channel.kappa1 = k.at(0).get<double>();
            s.channel.kappa2 = k.at(1).get<double>();
            s.channel.kappa3 = k.at(2).get<double>();
            s.channel.absorption = j.at("absorption_per_m").get<double>();
            s.channel.nlos_loss = j.at("nlos_loss").get<double>();
            s.channel.radar_cross_section = j.at("radar_cross_section_m2").get<double>();
            s.channel.rx_gain_db = j.at("rx_gain_db").get<double>();
            s.p_max = j.at("max_power_mw").get<double>();
            s.gamma_sinr_db = j.at("gamma_sinr_db").get<double>();
            s.eirp_max_dbm = j.at("eirp_max_dbm").get<double>();
            s.comm_sll_min_db = j.at("comm_sll_min_db").get<double>();
            s.sensing_sll_min_db = j.at("sensing_sll_min_db").get<double>();
            s.sensing_eirp_dbm = j.at("sensing_eirp_dbm").get<double>();
            const auto &o = j.at("optimizer");
            s.optimizer.k1 = o.at("k1").get<double>();
            s.optimizer.k2 = o.at("k2").get<double>();
            s.optimizer.eta = o.at("eta").get<double>();
            s.optimizer.counter_max = o.at("counter_max").get<int>();
            s.optimizer.stall_limit = o.value("stall_limit", s.optimizer.stall_limit);
            s.optimizer.cut_step_deg = o.at("cut_step_deg").get<double>();
            s.validate();
            return s;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::parse, std::string("scenario file: ") + e.what());
        }
    }

    inline std::string read_text_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorCode::io, "cannot open " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    inline void write_text_file(const std::string &path, const std::string &text)
    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw Error(ErrorCode::io, "cannot write " + path);
        out << text;
        if (!out)
            throw Error(ErrorCode::io, "write failed for " + path);
    }

    inline Scenario load_scenario(const std::string &path)
    {
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(read_text_file(path));
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::parse, path + ": " + e.what());
        }
        return scenario_from_json(j);
    }

    inline void save_scenario(const std::string &path, const Scenario &s) { write_text_file(path, scenario_to_json(s).dump(2) + "\n"); }

    // FNV-1a over the canonical scenario dump
    inline std::string scenario_hash(const Scenario &s)
    {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : scenario_to_json(s).dump())
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    // ---- trajectories --------------------------------------------------------------------------------------

    struct TrajectoryPoint
    {
        std::size_t slot = 0;
        Vec3 pos;
        RotationAngles orientation;

        Pose pose() const { return {pos, orientation}; }
    };

    struct Trajectory
    {
        std::size_t id = 0;
        std::vector<TrajectoryPoint> points;
    };

    // Heading from the motion: yaw = atan2(dy, dx), pitch = atan2(dz, horizontal), no roll
    inline RotationAngles orientation_from_motion(const Vec3 &prev, const Vec3 &next, const RotationAngles &held = {})
    {
        const Vec3 d = next - prev;
        if (d.x == 0.0 && d.y == 0.0 && d.z == 0.0)
            return held;
        return {std::atan2(d.y, d.x), std::atan2(d.z, std::hypot(d.x, d.y)), 0.0};
    }

    // Portable uniform draw in [0, 1) from a 64-bit engine
    inline double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

    inline std::size_t slots_needed(double dist, double step) { return static_cast<std::size_t>(std::ceil(dist / step - 1e-9)); }

    // Forward-cone random walks from start to end at constant altitude. Each step has length v_max * dt in a
    // direction drawn within the cone around the bearing to the end point; candidates leaving the area or the
    // slot budget are redrawn, and a straight step is taken when none fits.
    inline std::vector<Trajectory> generate_trajectories(const Scenario &sc, std::size_t count, std::uint64_t seed)
    {
        sc.validate();
        if (count < 1)
            throw Error(ErrorCode::invalid_config, "trajectory count must be at least 1");
        const double step = sc.step_length();
        if (slots_needed(distance(sc.start, sc.end), step) + 1 > sc.max_slots)
            throw Error(ErrorCode::infeasible, "end point unreachable within max_slots at the maximum speed");

        std::mt19937_64 rng(seed);
        const double cone = deg2rad(sc.cone_half_angle_deg);
        std::vector<Trajectory> out(count);
        for (std::size_t t = 0; t < count; ++t)
        {
            auto &traj = out[t];
            traj.id = t;
            std::vector<Vec3> pts{sc.start};
            while (!(pts.back() == sc.end))
            {
                const Vec3 cur = pts.back();
                const Vec3 r = sc.end - cur;
                const double dist = r.norm();
                if (dist <= step)
                {
                    pts.push_back(sc.end);
                    break;
                }
                const std::size_t left = sc.max_slots - pts.size(); // points that may still be appended
                const double bearing = std::atan2(r.y, r.x);
                Vec3 next = cur + r * (step / dist);
                for (int attempt = 0; attempt < 32 && cone > 0.0; ++attempt)
                {
                    const double h = bearing + (2.0 * uniform01(rng) - 1.0) * cone;
                    const Vec3 cand{cur.x + step * std::cos(h), cur.y + step * std::sin(h), cur.z};
                    if (sc.inside(cand) && slots_needed(distance(cand, sc.end), step) + 1 <= left)
                    {
                        next = cand;
                        break;
                    }
                }
                pts.push_back(next);
            }

            traj.points.resize(pts.size());
            RotationAngles held{};
            for (std::size_t n = 0; n < pts.size(); ++n)
            {
                auto &p = traj.points[n];
                p.slot = n;
                p.pos = pts[n];
                if (n + 1 < pts.size())
                    held = orientation_from_motion(pts[n], pts[n + 1], held);
                p.orientation = held;
            }
        }
        return out;
    }

    // ---- links -------------------------------------------------------------------------------------------

    inline DirectionAngles gbs_direction(const Scenario &sc, const Vec3 &uav, std::size_t k) { return direction_angles(uav, sc.gbs.at(k)); }
    inline DirectionAngles target_direction(const Scenario &sc, const Vec3 &uav) { return direction_angles(uav, sc.target); }

    // Two closest base stations other than k (fewer when K < 3); ties go to the lower index
    inline std::vector<std::size_t> null_stations(const Scenario &sc, const Vec3 &uav, std::size_t k)
    {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < sc.gbs.size(); ++i)
            if (i != k)
                idx.push_back(i);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b)
                         { return distance(uav, sc.gbs[a]) < distance(uav, sc.gbs[b]); });
        if (idx.size() > 2)
            idx.resize(2);
        return idx;
    }

    inline std::vector<DirectionAngles> null_directions(const Scenario &sc, const Vec3 &uav, std::size_t k)
    {
        std::vector<DirectionAngles> out;
        for (std::size_t i : null_stations(sc, uav, k))
            out.push_back(gbs_direction(sc, uav, i));
        return out;
    }

    // Channel seen through the element pattern and the station's receive gain, so that |h^H x|^2 is the received power
    inline ChannelVector comm_channel(const Scenario &sc, const Pose &pose, std::size_t k)
    {
        auto h = channel_vector(sc.channel, sc.array, pose.position, pose.orientation, sc.gbs.at(k), PathlossMode::expected);
        const double ge = element_gain(sc.array.element, off_broadside_angle(pose.orientation, gbs_direction(sc, pose.position, k)));
        const double s = std::sqrt(ge * db_to_linear(sc.channel.rx_gain_db));
        for (auto &e : h.entries)
            e *= s;
        return h;
    }

    // Radar path towards the target, seen through the element pattern
    inline ChannelVector sensing_channel(const Scenario &sc, const Pose &pose)
    {
        auto h = channel_vector(sc.channel, sc.array, pose.position, pose.orientation, sc.target, PathlossMode::radar_los);
        const double ge = element_gain(sc.array.element, off_broadside_angle(pose.orientation, target_direction(sc, pose.position)));
        const double s = std::sqrt(ge);
        for (auto &e : h.entries)
            e *= s;
        return h;
    }

    // Minimum comm EIRP (dBm) meeting the SINR threshold at station k given the sensing interference (mW)
    inline double required_comm_eirp_dbm(const Scenario &sc, const Pose &pose, std::size_t k, double interference_mw)
    {
        const double pl = pathloss(sc.channel, PathlossMode::expected, pose.position, sc.gbs.at(k));
        const double gamma = db_to_linear(sc.gamma_sinr_db);
        return linear_to_db(gamma * (sc.channel.noise_power + interference_mw) / (pl * db_to_linear(sc.channel.rx_gain_db)));
    }

    inline SynthesisRequest base_request(const Scenario &sc)
    {
        SynthesisRequest r;
        r.k1 = sc.optimizer.k1;
        r.k2 = sc.optimizer.k2;
        r.eta = sc.optimizer.eta;
        r.counter_max = sc.optimizer.counter_max;
        r.stall_limit = sc.optimizer.stall_limit;
        r.cut_step_deg = sc.optimizer.cut_step_deg;
        r.eirp_max = sc.eirp_max_dbm;
        r.power_cap = sc.p_max;
        return r;
    }

    inline SynthesisRequest sensing_request(const Scenario &sc, const Pose &pose)
    {
        auto r = base_request(sc);
        r.pointing = target_direction(sc, pose.position);
        r.sll_min_az = r.sll_min_el = sc.sensing_sll_min_db;
        r.eirp_target = sc.sensing_eirp_dbm;
        return r;
    }

    inline SynthesisRequest comm_request(const Scenario &sc, const Pose &pose, std::size_t k, double eirp_dbm, double power_cap)
    {
        auto r = base_request(sc);
        r.pointing = gbs_direction(sc, pose.position, k);
        r.nulls = null_directions(sc, pose.position, k);
        r.sll_min_az = r.sll_min_el = sc.comm_sll_min_db;
        r.eirp_target = std::min(eirp_dbm, sc.eirp_max_dbm);
        r.power_cap = power_cap;
        return r;
    }

    // ---- association ---------------------------------------------------------------------------------------

    enum class AssociationPolicy
    {
        closest,
        min_target_angle,
        max_sinr,
        nn_model
    };

    inline const char *to_string(AssociationPolicy p)
    {
        switch (p)
        {
        case AssociationPolicy::closest:
            return "closest";
        case AssociationPolicy::min_target_angle:
            return "angle";
        case AssociationPolicy::max_sinr:
            return "sinr";
        case AssociationPolicy::nn_model:
            return "nn";
        }
        return "unknown";
    }

    using AssociationPredictor = std::function<std::size_t(const TrajectoryPoint &)>;

    // Probe used by the max-SINR scan: matched weights radiating the maximum EIRP at broadside-equivalent gain
    inline BeamWeights sinr_probe(const Scenario &sc, const Pose &pose, std::size_t k)
    {
        BeamWeights w;
        w.entries = steering_vector(sc.array, pose.position, pose.orientation, sc.gbs.at(k));
        const double m = static_cast<double>(sc.array.num_elements);
        w.power_per_element = db_to_linear(sc.eirp_max_dbm) / (m * m);
        return w;
    }

    inline std::size_t associate(const Scenario &sc, const TrajectoryPoint &point, AssociationPolicy policy,
                                 const BeamWeights *sensing = nullptr, const AssociationPredictor &predictor = {})
    {
        const std::size_t K = sc.gbs.size();
        if (K == 0)
            throw Error(ErrorCode::invalid_config, "no base stations");
        const Pose pose = point.pose();
        std::size_t best = 0;
        switch (policy)
        {
        case AssociationPolicy::closest:
        {
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k)
                if (const double d = distance(pose.position, sc.gbs[k]); d < bd)
                {
                    bd = d;
                    best = k;
                }
            return best;
        }
        case AssociationPolicy::min_target_angle:
        {
            const double phi_t = target_direction(sc, pose.position).phi;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < K; ++k)
                if (const double d = std::abs(wrap_angle(gbs_direction(sc, pose.position, k).phi - phi_t)); d < bd)
                {
                    bd = d;
                    best = k;
                }
            return best;
        }
        case AssociationPolicy::max_sinr:
        {
            const auto hs = sensing_channel(sc, pose);
            const BeamWeights w0 = sensing ? *sensing : BeamWeights::zeros(sc.array.num_elements);
            double bs = -1.0;
            for (std::size_t k = 0; k < K; ++k)
                if (const double s = sinr(comm_channel(sc, pose, k), hs, sinr_probe(sc, pose, k), w0, sc.channel.noise_power); s > bs)
                {
                    bs = s;
                    best = k;
                }
            return best;
        }
        case AssociationPolicy::nn_model:
            if (!predictor)
                throw Error(ErrorCode::invalid_config, "NN association requires a trained model");
            return std::min(predictor(point), K - 1);
        }
        return best;
    }

    struct OptimalLabel
    {
        std::size_t gbs = 0;
        double min_eirp_dbm = 0.0; // required comm EIRP at the chosen station
        bool feasible = false;
        std::vector<double> required_dbm; // per station
        std::vector<double> capability_dbm;
    };

    // Best station in rate subject to the SINR threshold and the EIRP/power caps; capability per station is the
    // EIRP the initial steered, nulled taper can radiate with the power left after the sensing beam.
    inline OptimalLabel label_optimal_association(const Scenario &sc, const TrajectoryPoint &point, const BeamWeights &sensing)
    {
        const Pose pose = point.pose();
        const std::size_t K = sc.gbs.size();
        const double interference = received_power(sensing_channel(sc, pose), sensing);
        const double p_avail = std::max(0.0, sc.p_max - sensing.power());

        OptimalLabel lab;
        lab.required_dbm.resize(K);
        lab.capability_dbm.resize(K);
        std::optional<std::size_t> best;
        double best_rate = -1.0;
        double best_sinr = -1.0;
        std::size_t best_sinr_k = 0;
        for (std::size_t k = 0; k < K; ++k)
        {
            const auto dir = gbs_direction(sc, pose.position, k);
            double cap = sc.eirp_max_dbm;
            try
            {
                auto w = steered_taper(sc.array, pose.orientation, dir, sc.array.side(), sc.array.side(), sc.comm_sll_min_db, sc.comm_sll_min_db);
                w = apply_nulls(w, sc.array, pose, null_directions(sc, pose.position, k), dir);
                w.normalize_peak();
                const double gain = array_gain(w, sc.array, pose, dir);
                cap = std::min(cap, linear_to_db(p_avail * gain / w.norm2()));
            }
            catch (const Error &e)
            {
                if (e.code() != ErrorCode::null_conflict)
                    throw;
                cap = -std::numeric_limits<double>::infinity();
            }
            const double req = required_comm_eirp_dbm(sc, pose, k, interference);
            lab.required_dbm[k] = req;
            lab.capability_dbm[k] = cap;

            const double pl = pathloss(sc.channel, PathlossMode::expected, pose.position, sc.gbs[k]) * db_to_linear(sc.channel.rx_gain_db);
            const double s_cap = std::isfinite(cap) ? pl * db_to_linear(cap) / (sc.channel.noise_power + interference) : 0.0;
            if (s_cap > best_sinr)
            {
                best_sinr = s_cap;
                best_sinr_k = k;
            }
            if (!(req <= cap))
                continue;
            const double rate = achievable_rate(s_cap, sc.channel.bandwidth);
            if (!best || rate > best_rate || (rate == best_rate && req < lab.required_dbm[*best]))
            {
                best = k;
                best_rate = rate;
            }
        }
        lab.feasible = best.has_value();
        lab.gbs = best.value_or(best_sinr_k);
        lab.min_eirp_dbm = lab.required_dbm[lab.gbs];
        return lab;
    }

} // namespace isac

#endif
