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

#ifndef ISAC_PIPELINE_HPP
#define ISAC_PIPELINE_HPP

#include "beam_metrics.hpp"
#include "neuralnet.hpp"
#include "scenario.hpp"

#include <map>
#include <ostream>

namespace isac
{
    inline constexpr std::size_t feature_count = 7;
    inline constexpr int bundle_format_version = 1;

    // Dataset policies: the three baselines plus the optimal labels themselves
    enum class DatasetPolicy
    {
        closest,
        angle,
        sinr,
        optimal
    };

    inline DatasetPolicy dataset_policy_from_string(const std::string &s)
    {
        if (s == "closest")
            return DatasetPolicy::closest;
        if (s == "angle")
            return DatasetPolicy::angle;
        if (s == "sinr")
            return DatasetPolicy::sinr;
        if (s == "optimal")
            return DatasetPolicy::optimal;
        throw Error(ErrorCode::invalid_config, "unknown policy '" + s + "' (closest|angle|sinr|optimal)");
    }

    inline const char *to_string(DatasetPolicy p)
    {
        switch (p)
        {
        case DatasetPolicy::closest:
            return "closest";
        case DatasetPolicy::angle:
            return "angle";
        case DatasetPolicy::sinr:
            return "sinr";
        case DatasetPolicy::optimal:
            return "optimal";
        }
        return "unknown";
    }

    struct Sample
    {
        std::size_t trajectory = 0, slot = 0;
        Vec3 pos;
        RotationAngles orientation;
        std::size_t gbs = 0;
        std::array<double, feature_count> comm_features{};
        std::array<double, feature_count> sensing_features{};
        std::vector<double> comm_target, sensing_target; // interleaved (Re, Im) of normalized entries
        std::size_t optimal_gbs = 0;
        bool label_feasible = false;
        double comm_eirp_dbm = 0.0, sensing_eirp_dbm = 0.0;

        Pose pose() const { return {pos, orientation}; }
    };

    inline std::vector<double> encode_weights(const BeamWeights &w)
    {
        std::vector<double> out(2 * w.size());
        for (std::size_t m = 0; m < w.size(); ++m)
        {
            out[2 * m] = w.entries[m].real();
            out[2 * m + 1] = w.entries[m].imag();
        }
        return out;
    }

    inline BeamWeights decode_weights(std::span<const double> v)
    {
        if (v.size() % 2 != 0)
            throw Error(ErrorCode::dimension_mismatch, "encoded weights must have even length");
        BeamWeights w = BeamWeights::zeros(v.size() / 2);
        for (std::size_t m = 0; m < w.size(); ++m)
            w.entries[m] = {v[2 * m], v[2 * m + 1]};
        return w;
    }

    // Features are array-frame polar angles (radians) so that the network sees the geometry the weights depend on
    inline std::array<double, feature_count> comm_features(const Scenario &sc, const Pose &pose, std::size_t k, double eirp_dbm)
    {
        std::array<double, feature_count> f{};
        const auto a = array_angles(pose.orientation, gbs_direction(sc, pose.position, k));
        f[0] = a.phi;
        f[1] = a.theta;
        const auto nulls = null_directions(sc, pose.position, k);
        for (std::size_t i = 0; i < nulls.size() && i < 2; ++i)
        {
            const auto n = array_angles(pose.orientation, nulls[i]);
            f[2 + 2 * i] = n.phi;
            f[3 + 2 * i] = n.theta;
        }
        f[6] = eirp_dbm;
        return f;
    }

    inline std::array<double, feature_count> sensing_features(const Scenario &sc, const Pose &pose)
    {
        std::array<double, feature_count> f{};
        const auto a = array_angles(pose.orientation, target_direction(sc, pose.position));
        f[0] = a.phi;
        f[1] = a.theta;
        f[2] = sc.sensing_eirp_dbm;
        return f;
    }

    // (x / width, y / height, phi_target / pi, theta_target / pi)
    inline std::vector<double> association_features(const Scenario &sc, const Vec3 &pos)
    {
        const auto t = target_direction(sc, pos);
        return {pos.x / sc.area_width, pos.y / sc.area_height, t.phi / pi, t.theta / pi};
    }

    // Comm synthesis with nulls that would collide with the pointing dropped
    inline SynthesisResult synthesize_comm(const Scenario &sc, const Pose &pose, std::size_t k, double eirp_dbm, double power_cap)
    {
        auto req = comm_request(sc, pose, k, eirp_dbm, power_cap);
        std::erase_if(req.nulls, [&](const DirectionAngles &n)
                      { return angular_separation(n, req.pointing) < null_conflict_tolerance; });
        return synthesize(req, sc.array, pose);
    }

    struct DatasetResult
    {
        std::vector<Sample> samples;
        std::size_t skipped = 0;
        std::vector<std::string> log; // one line per skipped point
    };

    inline DatasetResult generate_dataset(const Scenario &sc, const std::vector<Trajectory> &trajectories, DatasetPolicy policy)
    {
        sc.validate();
        if (trajectories.empty())
            throw Error(ErrorCode::empty_input, "no trajectories");
        DatasetResult out;
        for (const auto &traj : trajectories)
            for (const auto &pt : traj.points)
            {
                const Pose pose = pt.pose();
                auto skip = [&](const std::string &why)
                {
                    ++out.skipped;
                    out.log.push_back("trajectory " + std::to_string(traj.id) + " slot " + std::to_string(pt.slot) + ": " + why);
                };
                const auto s0 = synthesize(sensing_request(sc, pose), sc.array, pose);
                if (!s0.converged)
                {
                    skip("sensing beam did not converge");
                    continue;
                }
                const auto label = label_optimal_association(sc, pt, s0.weights);
                std::size_t k = label.gbs;
                if (policy == DatasetPolicy::closest)
                    k = associate(sc, pt, AssociationPolicy::closest);
                else if (policy == DatasetPolicy::angle)
                    k = associate(sc, pt, AssociationPolicy::min_target_angle);
                else if (policy == DatasetPolicy::sinr)
                    k = associate(sc, pt, AssociationPolicy::max_sinr, &s0.weights);

                const double interference = received_power(sensing_channel(sc, pose), s0.weights);
                const double eirp = std::min(required_comm_eirp_dbm(sc, pose, k, interference), sc.eirp_max_dbm);
                const auto sk = synthesize_comm(sc, pose, k, eirp, std::max(1e-12, sc.p_max - s0.weights.power()));
                if (!sk.converged)
                {
                    skip("comm beam did not converge");
                    continue;
                }
                Sample s;
                s.trajectory = traj.id;
                s.slot = pt.slot;
                s.pos = pt.pos;
                s.orientation = pt.orientation;
                s.gbs = k;
                s.comm_eirp_dbm = eirp;
                s.sensing_eirp_dbm = sc.sensing_eirp_dbm;
                s.comm_features = comm_features(sc, pose, k, eirp);
                s.sensing_features = sensing_features(sc, pose);
                s.comm_target = encode_weights(sk.weights);
                s.sensing_target = encode_weights(s0.weights);
                s.optimal_gbs = label.gbs;
                s.label_feasible = label.feasible;
                out.samples.push_back(std::move(s));
            }
        if (out.samples.empty())
            throw Error(ErrorCode::empty_input, "dataset is empty: no trajectory point converged");
        return out;
    }

    // ---- JSONL ---------------------------------------------------------------------------------------------

    inline nlohmann::ordered_json sample_to_json(const Sample &s)
    {
        nlohmann::ordered_json j;
        j["trajectory"] = s.trajectory;
        j["slot"] = s.slot;
        j["pos"] = {s.pos.x, s.pos.y, s.pos.z};
        j["orientation"] = {s.orientation.alpha, s.orientation.beta, s.orientation.gamma};
        j["gbs"] = s.gbs;
        j["comm_features"] = s.comm_features;
        j["sensing_features"] = s.sensing_features;
        j["comm_eirp_dbm"] = s.comm_eirp_dbm;
        j["sensing_eirp_dbm"] = s.sensing_eirp_dbm;
        j["optimal_gbs"] = s.optimal_gbs;
        j["label_feasible"] = s.label_feasible;
        j["comm_target"] = s.comm_target;
        j["sensing_target"] = s.sensing_target;
        return j;
    }

    inline Sample sample_from_json(const nlohmann::json &j)
    {
        try
        {
            Sample s;
            s.trajectory = j.at("trajectory").get<std::size_t>();
            s.slot = j.at("slot").get<std::size_t>();
            s.pos = vec_from_json(j.at("pos"));
            const auto o = j.at("orientation").get<std::vector<double>>();
            if (o.size() != 3)
                throw Error(ErrorCode::parse, "orientation must have 3 angles");
            s.orientation = {o[0], o[1], o[2]};
            s.gbs = j.at("gbs").get<std::size_t>();
            s.comm_features = j.at("comm_features").get<std::array<double, feature_count>>();
            s.sensing_features = j.at("sensing_features").get<std::array<double, feature_count>>();
            s.comm_eirp_dbm = j.at("comm_eirp_dbm").get<double>();
            s.sensing_eirp_dbm = j.at("sensing_eirp_dbm").get<double>();
            s.optimal_gbs = j.at("optimal_gbs").get<std::size_t>();
            s.label_feasible = j.at("label_feasible").get<bool>();
            s.comm_target = j.at("comm_target").get<std::vector<double>>();
            s.sensing_target = j.at("sensing_target").get<std::vector<double>>();
            if (s.comm_target.size() != s.sensing_target.size() || s.comm_target.empty())
                throw Error(ErrorCode::parse, "weight targets have inconsistent lengths");
            return s;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::parse, std::string("sample: ") + e.what());
        }
    }

    inline void write_jsonl(std::ostream &os, const std::vector<Sample> &samples)
    {
        for (const auto &s : samples)
            os << sample_to_json(s).dump() << '\n';
    }

    inline std::vector<Sample> read_jsonl(const std::string &path)
    {
        std::istringstream in(read_text_file(path));
        std::vector<Sample> out;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            if (line.empty())
                continue;
            try
            {
                out.push_back(sample_from_json(nlohmann::json::parse(line)));
            }
            catch (const nlohmann::json::exception &e)
            {
                throw Error(ErrorCode::parse, path + ":" + std::to_string(lineno) + ": " + e.what());
            }
        }
        return out;
    }

    // ---- training ------------------------------------------------------------------------------------------

    struct TrainOptions
    {
        nn::TrainConfig train;
        bool grid_beampattern_error = false; // evaluate the validation metric on an angular grid instead of the target
    };

    struct ModelBundle
    {
        nn::Network beamformer;
        nn::Network association;
        std::size_t num_gbs = 1;
        std::string scenario_hash;
        nlohmann::ordered_json metadata;
        nn::TrainReport beamformer_report;
        nn::TrainReport association_report; // val_metric holds the held-out exact-match accuracy
        nn::Split association_split;
    };

    inline nn::NetworkConfig beamformer_config(std::size_t num_elements, std::uint64_t seed)
    {
        return {{feature_count, 50, 2 * num_elements}, nn::Activation::relu, nn::Activation::linear, seed};
    }

    inline nn::NetworkConfig association_config(std::uint64_t seed)
    {
        return {{4, 64, 32, 1}, nn::Activation::relu, nn::Activation::linear, seed};
    }

    inline std::size_t decode_association(double y, std::size_t K)
    {
        if (K <= 1 || !std::isfinite(y))
            return 0;
        const double idx = std::round(y * static_cast<double>(K - 1));
        return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(K - 1)));
    }

    // Beampattern error metric of a set of predicted excitations against reference ones, both taken with unit PPE
    // (shape only): mean |B* - B|^2 / mean B*^2
    class BeampatternErrorMetric
    {
    public:
        BeampatternErrorMetric(const Scenario &sc, const std::vector<Sample> &samples, const std::vector<std::vector<double>> &inputs,
                               const std::vector<std::vector<double>> &targets, const std::vector<std::size_t> &row_sample, bool grid)
            : inputs_(inputs), targets_(targets), row_sample_(row_sample)
        {
            const std::size_t S = sc.array.side();
            // per sample: phasor rows ex, ez for each probe direction
            probes_.resize(samples.size());
            for (std::size_t i = 0; i < samples.size(); ++i)
            {
                const Pose pose = samples[i].pose();
                std::vector<Vec3> dirs;
                if (grid)
                {
                    for (int t = 5; t < 90; t += 10)
                        for (int p = -175; p < 180; p += 10)
                            dirs.push_back(local_vector({deg2rad(t), deg2rad(p)}));
                }
                else
                    dirs.push_back(transpose_times(rotation_matrix(pose.orientation), direction_vector(target_direction(sc, pose.position))));
                for (const auto &l : dirs)
                {
                    Probe pr{std::vector<cdouble>(S), std::vector<cdouble>(S)};
                    for (std::size_t n = 0; n < S; ++n)
                    {
                        pr.ex[n] = std::polar(1.0, -pi * static_cast<double>(n + 1) * l.x);
                        pr.ez[n] = std::polar(1.0, -pi * static_cast<double>(n + 1) * l.z);
                    }
                    probes_[i].push_back(std::move(pr));
                }
            }
            side_ = S;
        }

        double operator()(const nn::Network &net, std::span<const std::size_t> rows) const
        {
            double num = 0.0, den = 0.0;
            for (auto r : rows)
            {
                const auto y = net.forward(inputs_[r]);
                for (const auto &pr : probes_[row_sample_[r]])
                {
                    const double b_ref = gain(targets_[r], pr), b = gain(y, pr);
                    num += (b_ref - b) * (b_ref - b);
                    den += b_ref * b_ref;
                }
            }
            return den > 0.0 ? num / den : 0.0;
        }

    private:
        struct Probe
        {
            std::vector<cdouble> ex, ez;
        };

        double gain(const std::vector<double> &enc, const Probe &pr) const
        {
            cdouble total{};
            for (std::size_t ix = 0; ix < side_; ++ix)
            {
                cdouble s{};
                for (std::size_t iz = 0; iz < side_; ++iz)
                {
                    const std::size_t m = ix * side_ + iz;
                    s += cdouble(enc[2 * m], enc[2 * m + 1]) * pr.ez[iz];
                }
                total += pr.ex[ix] * s;
            }
            return std::norm(total);
        }

        const std::vector<std::vector<double>> &inputs_;
        const std::vector<std::vector<double>> &targets_;
        const std::vector<std::size_t> &row_sample_;
        std::vector<std::vector<Probe>> probes_;
        std::size_t side_ = 0;
    };

    inline ModelBundle train_models(const Scenario &sc, const std::vector<Sample> &samples, const TrainOptions &opt)
    {
        if (samples.size() < 10)
            throw Error(ErrorCode::empty_input, "dataset too small: need at least 10 samples");
        const std::size_t K = sc.gbs.size();
        const auto &cfg = opt.train;

        // beamformer: comm and sensing rows pooled
        std::vector<std::vector<double>> bx, by;
        std::vector<std::size_t> row_sample;
        for (std::size_t i = 0; i < samples.size(); ++i)
        {
            const auto &s = samples[i];
            if (s.comm_target.size() != 2 * sc.array.num_elements)
                throw Error(ErrorCode::dimension_mismatch, "sample weights do not match the scenario array");
            bx.emplace_back(s.comm_features.begin(), s.comm_features.end());
            by.push_back(s.comm_target);
            row_sample.push_back(i);
            bx.emplace_back(s.sensing_features.begin(), s.sensing_features.end());
            by.push_back(s.sensing_target);
            row_sample.push_back(i);
        }
        const BeampatternErrorMetric metric(sc, samples, bx, by, row_sample, opt.grid_beampattern_error);
        auto bf = nn::train(nn::Network(beamformer_config(sc.array.num_elements, cfg.seed)), bx, by, cfg,
                            [&](const nn::Network &net, std::span<const std::size_t> rows)
                            { return metric(net, rows); });

        // association: one row per sample
        std::vector<std::vector<double>> ax, ay;
        for (const auto &s : samples)
        {
            ax.push_back(association_features(sc, s.pos));
            ay.push_back({K > 1 ? static_cast<double>(s.optimal_gbs) / static_cast<double>(K - 1) : 0.0});
        }
        auto accuracy = [&](const nn::Network &net, std::span<const std::size_t> rows)
        {
            if (rows.empty())
                return 0.0;
            std::size_t hit = 0;
            for (auto r : rows)
                hit += decode_association(net.forward(ax[r])[0], K) == samples[r].optimal_gbs;
            return static_cast<double>(hit) / static_cast<double>(rows.size());
        };
        nn::TrainConfig acfg = cfg;
        acfg.seed = cfg.seed + 1;
        auto as = nn::train(nn::Network(association_config(cfg.seed + 1)), ax, ay, acfg, accuracy);

        ModelBundle b;
        b.beamformer = std::move(bf.network);
        b.association = std::move(as.network);
        b.beamformer_report = std::move(bf.report);
        b.association_report = std::move(as.report);
        b.association_split = std::move(as.split);
        b.num_gbs = K;
        b.scenario_hash = scenario_hash(sc);
        b.metadata = {{"epochs", cfg.epochs},
                      {"batch_size", cfg.batch_size},
                      {"learning_rate", cfg.learning_rate},
                      {"train_fraction", cfg.train_fraction},
                      {"seed", cfg.seed},
                      {"num_samples", samples.size()},
                      {"beampattern_error", opt.grid_beampattern_error ? "grid" : "target"}};
        return b;
    }

    inline nlohmann::ordered_json bundle_to_json(const ModelBundle &b)
    {
        nlohmann::ordered_json j;
        j["format_version"] = bundle_format_version;
        j["scenario_hash"] = b.scenario_hash;
        j["num_gbs"] = b.num_gbs;
        j["metadata"] = b.metadata;
        j["beamformer"] = nn::to_json(b.beamformer);
        j["association"] = nn::to_json(b.association);
        return j;
    }

    inline ModelBundle bundle_from_json(const nlohmann::json &j)
    {
        try
        {
            if (j.value("format_version", 0) != bundle_format_version)
                throw Error(ErrorCode::parse, "unsupported bundle format_version");
            ModelBundle b;
            b.scenario_hash = j.at("scenario_hash").get<std::string>();
            b.num_gbs = j.at("num_gbs").get<std::size_t>();
            b.metadata = j.at("metadata");
            b.beamformer = nn::network_from_json(j.at("beamformer"));
            b.association = nn::network_from_json(j.at("association"));
            if (b.beamformer.input_size() != feature_count || b.association.input_size() != 4 || b.association.output_size() != 1)
                throw Error(ErrorCode::parse, "bundle networks have unexpected shapes");
            return b;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::parse, std::string("bundle: ") + e.what());
        }
    }

    inline ModelBundle load_bundle(const std::string &path)
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
        return bundle_from_json(j);
    }

    inline std::string fmt(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return buf;
    }

    inline void write_train_report_csv(std::ostream &os, const nn::TrainReport &r, const char *metric_name)
    {
        os << "epoch,train_loss,val_loss," << metric_name << '\n';
        for (std::size_t e = 0; e < r.train_loss.size(); ++e)
            os << e + 1 << ',' << fmt(r.train_loss[e]) << ',' << fmt(r.val_loss[e]) << ',' << fmt(r.val_metric[e]) << '\n';
    }

    inline std::size_t predict_association(const ModelBundle &b, const Scenario &sc, const TrajectoryPoint &point)
    {
        const std::size_t K = sc.gbs.size();
        if (K <= 1)
            return 0;
        return decode_association(b.association.forward(association_features(sc, point.pos))[0], K);
    }

    // Beam excitation predicted by the beamformer network, peak-normalized, PPE solved for the requested EIRP
    inline BeamWeights predict_weights(const ModelBundle &b, const ArrayConfig &config, const Pose &pose,
                                       const std::array<double, feature_count> &features, const DirectionAngles &pointing, double eirp_dbm)
    {
        BeamWeights w = decode_weights(b.beamformer.forward(features));
        if (w.size() != config.num_elements)
            throw Error(ErrorCode::dimension_mismatch, "beamformer output does not match the array");
        w.normalize_peak();
        const double g = array_gain(w, config, pose, pointing);
        w.power_per_element = g > 0.0 ? db_to_linear(eirp_dbm) / g : 0.0;
        return w;
    }

    // Scales a beamforming matrix into the EIRP cap and the total power budget; the comm beam yields first
    inline void enforce_limits(BeamformingMatrix &W, const Scenario &sc, const Pose &pose, const DirectionAngles &comm_dir,
                               const DirectionAngles &sense_dir)
    {
        const double cap = db_to_linear(sc.eirp_max_dbm);
        auto clamp_eirp = [&](BeamWeights &w, const DirectionAngles &d)
        {
            const double g = array_gain(w, sc.array, pose, d);
            if (g > 0.0 && w.power_per_element * g > cap)
                w.power_per_element = cap / g;
        };
        clamp_eirp(W.comm, comm_dir);
        clamp_eirp(W.sensing, sense_dir);
        const double ps = W.sensing.power();
        if (ps > sc.p_max)
            W.sensing.power_per_element *= sc.p_max / ps;
        const double room = sc.p_max - W.sensing.power();
        const double pc = W.comm.power();
        if (pc > room)
            W.comm.power_per_element = room > 0.0 && pc > 0.0 ? W.comm.power_per_element * room / pc : 0.0;
    }

    enum class WeightSource
    {
        optimizer,
        nn
    };

    // Evaluation association: the three baselines, the optimal labels, or the trained association network
    enum class EvalPolicy
    {
        closest,
        angle,
        sinr,
        optimal,
        nn
    };

    inline EvalPolicy eval_policy_from_string(const std::string &s)
    {
        if (s == "closest")
            return EvalPolicy::closest;
        if (s == "angle")
            return EvalPolicy::angle;
        if (s == "sinr")
            return EvalPolicy::sinr;
        if (s == "optimal")
            return EvalPolicy::optimal;
        if (s == "nn")
            return EvalPolicy::nn;
        throw Error(ErrorCode::invalid_config, "unknown policy '" + s + "' (closest|angle|sinr|optimal|nn)");
    }

    inline const char *to_string(EvalPolicy p)
    {
        switch (p)
        {
        case EvalPolicy::closest:
            return "closest";
        case EvalPolicy::angle:
            return "angle";
        case EvalPolicy::sinr:
            return "sinr";
        case EvalPolicy::optimal:
            return "optimal";
        case EvalPolicy::nn:
            return "nn";
        }
        return "unknown";
    }

    struct EvalRecord
    {
        std::size_t trajectory = 0, slot = 0;
        std::string policy;
        std::size_t gbs = 0;
        double eirp_dbm = 0.0;
        double sinr_db = 0.0;
        double rate_bps = 0.0;
        double beampattern_gain = 0.0;
        double total_power_mw = 0.0;
        double sensing_eirp_dbm = 0.0;
    };

    inline std::vector<EvalRecord> evaluate_trajectory(const Scenario &sc, const Trajectory &traj, EvalPolicy policy,
                                                       WeightSource source, const ModelBundle *bundle = nullptr)
    {
        if ((source == WeightSource::nn || policy == EvalPolicy::nn) && !bundle)
            throw Error(ErrorCode::invalid_config, "a trained bundle is required for NN weights or NN association");
        std::vector<EvalRecord> out;
        out.reserve(traj.points.size());
        for (const auto &pt : traj.points)
        {
            const Pose pose = pt.pose();
            const auto sense_dir = target_direction(sc, pose.position);
            BeamformingMatrix W;
            if (source == WeightSource::optimizer)
                W.sensing = synthesize(sensing_request(sc, pose), sc.array, pose).weights;
            else
                W.sensing = predict_weights(*bundle, sc.array, pose, sensing_features(sc, pose), sense_dir, sc.sensing_eirp_dbm);
            if (W.sensing.power() > sc.p_max)
                W.sensing.power_per_element *= sc.p_max / W.sensing.power();

            std::size_t k = 0;
            switch (policy)
            {
            case EvalPolicy::closest:
                k = associate(sc, pt, AssociationPolicy::closest);
                break;
            case EvalPolicy::angle:
                k = associate(sc, pt, AssociationPolicy::min_target_angle);
                break;
            case EvalPolicy::sinr:
                k = associate(sc, pt, AssociationPolicy::max_sinr, &W.sensing);
                break;
            case EvalPolicy::optimal:
                k = label_optimal_association(sc, pt, W.sensing).gbs;
                break;
            case EvalPolicy::nn:
                k = predict_association(*bundle, sc, pt);
                break;
            }

            const auto hs = sensing_channel(sc, pose);
            const double interference = received_power(hs, W.sensing);
            const double eirp = std::min(required_comm_eirp_dbm(sc, pose, k, interference), sc.eirp_max_dbm);
            const auto comm_dir = gbs_direction(sc, pose.position, k);
            const double room = std::max(1e-12, sc.p_max - W.sensing.power());
            if (source == WeightSource::optimizer)
                W.comm = synthesize_comm(sc, pose, k, eirp, room).weights;
            else
                W.comm = predict_weights(*bundle, sc.array, pose, comm_features(sc, pose, k, eirp), comm_dir, eirp);
            enforce_limits(W, sc, pose, comm_dir, sense_dir);

            EvalRecord r;
            r.trajectory = traj.id;
            r.slot = pt.slot;
            r.policy = to_string(policy);
            r.gbs = k;
            const double s = sinr(comm_channel(sc, pose, k), hs, W.comm, W.sensing, sc.channel.noise_power);
            r.sinr_db = linear_to_db(s);
            r.rate_bps = achievable_rate(s, sc.channel.bandwidth);
            r.eirp_dbm = isac::eirp(W.comm, sc.array, pose, comm_dir);
            r.sensing_eirp_dbm = isac::eirp(W.sensing, sc.array, pose, sense_dir);
            r.beampattern_gain = beampattern_gain(W, sc.array, pose, sc.target);
            r.total_power_mw = W.total_power();
            out.push_back(std::move(r));
        }
        return out;
    }

    inline void write_records_csv(std::ostream &os, const std::vector<EvalRecord> &records)
    {
        os << "trajectory,slot,policy,gbs,eirp_dbm,sinr_db,rate_bps,beampattern_gain,total_power_mw,sensing_eirp_dbm\n";
        for (const auto &r : records)
            os << r.trajectory << ',' << r.slot << ',' << r.policy << ',' << r.gbs << ',' << fmt(r.eirp_dbm) << ',' << fmt(r.sinr_db)
               << ',' << fmt(r.rate_bps) << ',' << fmt(r.beampattern_gain) << ',' << fmt(r.total_power_mw) << ','
               << fmt(r.sensing_eirp_dbm) << '\n';
    }

    inline double parse_double(const std::string &s)
    {
        if (s == "-inf")
            return -std::numeric_limits<double>::infinity();
        if (s == "inf")
            return std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        double v = 0.0;
        try
        {
            v = std::stod(s, &used);
        }
        catch (const std::exception &)
        {
            throw Error(ErrorCode::parse, "not a number: '" + s + "'");
        }
        if (used != s.size())
            throw Error(ErrorCode::parse, "not a number: '" + s + "'");
        return v;
    }

    inline std::vector<EvalRecord> read_records_csv(const std::string &path)
    {
        std::istringstream in(read_text_file(path));
        std::string line;
        std::vector<EvalRecord> out;
        if (!std::getline(in, line) || line.rfind("trajectory,slot,policy,gbs,eirp_dbm,sinr_db,rate_bps,beampattern_gain", 0) != 0)
            throw Error(ErrorCode::parse, path + ": missing record header");
        while (std::getline(in, line))
        {
            if (line.empty() || line.rfind("trajectory,", 0) == 0)
                continue;
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ','))
                f.push_back(cell);
            if (f.size() < 8)
                throw Error(ErrorCode::parse, path + ": short record line");
            EvalRecord r;
            r.trajectory = static_cast<std::size_t>(parse_double(f[0]));
            r.slot = static_cast<std::size_t>(parse_double(f[1]));
            r.policy = f[2];
            r.gbs = static_cast<std::size_t>(parse_double(f[3]));
            r.eirp_dbm = parse_double(f[4]);
            r.sinr_db = parse_double(f[5]);
            r.rate_bps = parse_double(f[6]);
            r.beampattern_gain = parse_double(f[7]);
            if (f.size() >= 10)
            {
                r.total_power_mw = parse_double(f[8]);
                r.sensing_eirp_dbm = parse_double(f[9]);
            }
            out.push_back(std::move(r));
        }
        return out;
    }

    struct EirpStats
    {
        std::vector<std::pair<double, double>> ecdf;    // (eirp_dbm, F)
        std::vector<std::pair<double, double>> outage;  // (threshold_dbm, fraction)
        double mean_rate = 0.0;
    };

    inline EirpStats eirp_stats(const std::vector<EvalRecord> &records, const std::vector<double> &thresholds)
    {
        if (records.empty())
            throw Error(ErrorCode::empty_input, "no evaluation records");
        std::vector<double> e;
        double rate = 0.0;
        for (const auto &r : records)
        {
            e.push_back(r.eirp_dbm);
            rate += r.rate_bps;
        }
        std::sort(e.begin(), e.end());
        EirpStats s;
        const double n = static_cast<double>(e.size());
        for (std::size_t i = 0; i < e.size(); ++i)
            if (i + 1 == e.size() || e[i + 1] != e[i])
                s.ecdf.emplace_back(e[i], static_cast<double>(i + 1) / n);
        for (double t : thresholds)
        {
            const auto above = static_cast<double>(e.end() - std::upper_bound(e.begin(), e.end(), t));
            s.outage.emplace_back(t, above / n);
        }
        s.mean_rate = rate / n;
        return s;
    }

    // Statistics per policy, in order of first appearance
    inline std::vector<std::pair<std::string, EirpStats>> eirp_stats_by_policy(const std::vector<EvalRecord> &records,
                                                                                const std::vector<double> &thresholds)
    {
        std::vector<std::string> order;
        std::map<std::string, std::vector<EvalRecord>> groups;
        for (const auto &r : records)
        {
            if (!groups.count(r.policy))
                order.push_back(r.policy);
            groups[r.policy].push_back(r);
        }
        std::vector<std::pair<std::string, EirpStats>> out;
        for (const auto &p : order)
            out.emplace_back(p, eirp_stats(groups[p], thresholds));
        return out;
    }

    inline void write_stats_csv(std::ostream &os, const std::vector<std::pair<std::string, EirpStats>> &stats)
    {
        os << "kind,policy,x,value\n";
        for (const auto &[p, s] : stats)
        {
            for (const auto &[x, v] : s.ecdf)
                os << "ecdf," << p << ',' << fmt(x) << ',' << fmt(v) << '\n';
            for (const auto &[x, v] : s.outage)
                os << "outage," << p << ',' << fmt(x) << ',' << fmt(v) << '\n';
            os << "mean_rate," << p << ",," << fmt(s.mean_rate) << '\n';
        }
    }

} // namespace isac

#endif
