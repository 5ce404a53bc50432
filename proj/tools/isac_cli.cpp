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

#include <CLI11.hpp>
#include <isac/isac.hpp>

#include <chrono>
#include <iostream>

using namespace isac;

namespace
{
    void print_error(const std::string &code, const std::string &message)
    {
        std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << std::endl;
    }

    std::string sibling_path(const std::string &path, const std::string &suffix)
    {
        const auto slash = path.find_last_of('/');
        const auto dot = path.find_last_of('.');
        const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
        return (has_ext ? path.substr(0, dot) : path) + suffix;
    }

    Scenario scenario_or_default(const std::string &path) { return path.empty() ? Scenario{} : load_scenario(path); }

    struct PointingArgs
    {
        double az = 0.0, el = 0.0;
        double yaw = 0.0, pitch = 0.0, roll = 0.0;
    };

    DirectionAngles parse_null(const std::string &s, const RotationAngles &o)
    {
        const auto comma = s.find(',');
        if (comma == std::string::npos)
            throw Error(ErrorCode::parse, "--null expects <az,el> in degrees, got '" + s + "'");
        const double az = parse_double(s.substr(0, comma)), el = parse_double(s.substr(comma + 1));
        return from_array_angles(o, {deg2rad(el), deg2rad(az)});
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"isac: beam-pattern synthesis, learned beamforming and GBS association for sensing/communication UAVs"};
    app.require_subcommand(1);

    // scenario init
    auto *scenario_cmd = app.add_subcommand("scenario", "scenario files")->require_subcommand(1);
    auto *init_cmd = scenario_cmd->add_subcommand("init", "write the default scenario JSON");
    std::string init_out;
    init_cmd->add_option("--out", init_out, "output path")->required();

    // dataset generate
    auto *dataset_cmd = app.add_subcommand("dataset", "training data")->require_subcommand(1);
    auto *gen_cmd = dataset_cmd->add_subcommand("generate", "run the optimizer along random trajectories");
    std::string gen_scenario, gen_policy = "optimal", gen_out;
    std::size_t gen_trajectories = 1;
    std::uint64_t gen_seed = 0;
    bool gen_verbose = false;
    gen_cmd->add_option("--scenario", gen_scenario, "scenario JSON")->required();
    gen_cmd->add_option("--trajectories", gen_trajectories, "number of trajectories")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--policy", gen_policy, "closest|angle|sinr|optimal");
    gen_cmd->add_option("--seed", gen_seed, "master seed")->required();
    gen_cmd->add_option("--out", gen_out, "output JSONL")->required();
    gen_cmd->add_flag("--verbose", gen_verbose, "log skipped points to stderr");

    // train
    auto *train_cmd = app.add_subcommand("train", "train the beamformer and association networks");
    std::string train_data, train_out, train_scenario;
    TrainOptions topt;
    train_cmd->add_option("--data", train_data, "dataset JSONL")->required();
    train_cmd->add_option("--scenario", train_scenario, "scenario JSON the dataset was generated with (default scenario if omitted)");
    train_cmd->add_option("--epochs", topt.train.epochs, "epochs");
    train_cmd->add_option("--batch", topt.train.batch_size, "mini-batch size");
    train_cmd->add_option("--lr", topt.train.learning_rate, "learning rate");
    train_cmd->add_option("--split", topt.train.train_fraction, "training fraction");
    train_cmd->add_option("--seed", topt.train.seed, "seed")->required();
    train_cmd->add_option("--out", train_out, "bundle JSON")->required();
    train_cmd->add_flag("--grid-error", topt.grid_beampattern_error, "validation beampattern error over an angular grid");

    // synthesize
    auto *syn_cmd = app.add_subcommand("synthesize", "single-point beam-pattern synthesis");
    std::string syn_scenario, syn_cuts;
    PointingArgs pa;
    double sll_az = 15.0, sll_el = 15.0, syn_eirp = 20.0;
    std::vector<std::string> syn_nulls;
    syn_cmd->add_option("--scenario", syn_scenario, "scenario JSON")->required();
    syn_cmd->add_option("--az", pa.az, "pointing azimuth around broadside (deg)")->required();
    syn_cmd->add_option("--el", pa.el, "pointing angle off broadside (deg)")->required();
    syn_cmd->add_option("--sll-az", sll_az, "minimum azimuth-cut SLL (dB)");
    syn_cmd->add_option("--sll-el", sll_el, "minimum elevation-cut SLL (dB)");
    syn_cmd->add_option("--eirp", syn_eirp, "target EIRP (dBm)");
    syn_cmd->add_option("--null", syn_nulls, "null direction <az,el> in degrees (repeatable)")->allow_extra_args(false);
    syn_cmd->add_option("--out-cuts", syn_cuts, "CSV of the two principal cuts");
    syn_cmd->add_option("--yaw", pa.yaw, "array yaw (deg)");
    syn_cmd->add_option("--pitch", pa.pitch, "array pitch (deg)");
    syn_cmd->add_option("--roll", pa.roll, "array roll (deg)");

    // eval trajectory / eval eirp
    auto *eval_cmd = app.add_subcommand("eval", "evaluation")->require_subcommand(1);
    auto *evt_cmd = eval_cmd->add_subcommand("trajectory", "per-slot records along random trajectories");
    std::string evt_scenario, evt_bundle, evt_policy = "closest", evt_source = "optimizer", evt_out;
    std::uint64_t evt_seed = 0;
    std::size_t evt_trajectories = 1;
    evt_cmd->add_option("--scenario", evt_scenario, "scenario JSON")->required();
    evt_cmd->add_option("--bundle", evt_bundle, "trained bundle (needed for --source nn or --policy nn)");
    evt_cmd->add_option("--policy", evt_policy, "closest|angle|sinr|optimal|nn");
    evt_cmd->add_option("--source", evt_source, "optimizer|nn");
    evt_cmd->add_option("--seed", evt_seed, "master seed")->required();
    evt_cmd->add_option("--trajectories", evt_trajectories, "number of trajectories")->check(CLI::PositiveNumber);
    evt_cmd->add_option("--out", evt_out, "records CSV")->required();

    auto *eve_cmd = eval_cmd->add_subcommand("eirp", "EIRP ECDF, outage and mean rate");
    std::vector<std::string> eve_records;
    std::vector<double> eve_thresholds{10.0, 15.0};
    std::string eve_out;
    eve_cmd->add_option("--records", eve_records, "records CSV (repeatable)")->required();
    eve_cmd->add_option("--thresholds", eve_thresholds, "outage thresholds (dBm)")->delimiter(',');
    eve_cmd->add_option("--out", eve_out, "stats CSV")->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        print_error("usage", e.what());
        return 2;
    }

    try
    {
        if (init_cmd->parsed())
        {
            save_scenario(init_out, Scenario{});
            std::cout << nlohmann::json{{"scenario", init_out}, {"hash", scenario_hash(Scenario{})}}.dump() << '\n';
        }
        else if (gen_cmd->parsed())
        {
            const auto sc = load_scenario(gen_scenario);
            const auto trajs = generate_trajectories(sc, gen_trajectories, gen_seed);
            const auto ds = generate_dataset(sc, trajs, dataset_policy_from_string(gen_policy));
            if (gen_verbose)
                for (const auto &l : ds.log)
                    std::cerr << "skipped " << l << '\n';
            std::ostringstream os;
            write_jsonl(os, ds.samples);
            write_text_file(gen_out, os.str());
            std::cout << nlohmann::json{{"samples", ds.samples.size()}, {"skipped", ds.skipped}}.dump() << '\n';
        }
        else if (train_cmd->parsed())
        {
            const auto sc = scenario_or_default(train_scenario);
            const auto samples = read_jsonl(train_data);
            const auto b = train_models(sc, samples, topt);
            write_text_file(train_out, bundle_to_json(b).dump() + "\n");
            std::ostringstream rep, arep;
            write_train_report_csv(rep, b.beamformer_report, "val_beampattern_error");
            write_train_report_csv(arep, b.association_report, "val_accuracy");
            write_text_file(sibling_path(train_out, ".report.csv"), rep.str());
            write_text_file(sibling_path(train_out, ".association.csv"), arep.str());
            const auto &r = b.beamformer_report;
            std::cout << nlohmann::json{{"bundle", train_out},
                                        {"val_beampattern_error_first", r.val_metric.front()},
                                        {"val_beampattern_error_last", r.val_metric.back()},
                                        {"association_val_accuracy", b.association_report.val_metric.back()}}
                             .dump()
                      << '\n';
        }
        else if (syn_cmd->parsed())
        {
            const auto sc = load_scenario(syn_scenario);
            const RotationAngles o{deg2rad(pa.yaw), deg2rad(pa.pitch), deg2rad(pa.roll)};
            const Pose pose{sc.start, o};
            auto req = base_request(sc);
            req.pointing = from_array_angles(o, {deg2rad(pa.el), deg2rad(pa.az)});
            req.sll_min_az = sll_az;
            req.sll_min_el = sll_el;
            req.eirp_target = syn_eirp;
            req.power_cap = sc.p_max;
            for (const auto &n : syn_nulls)
                req.nulls.push_back(parse_null(n, o));
            const auto t0 = std::chrono::steady_clock::now();
            const auto r = synthesize(req, sc.array, pose);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            if (!syn_cuts.empty())
            {
                const std::array<PatternCut, 2> cuts{pattern_cut(r.weights, sc.array, pose, CutPlane::azimuth, req.pointing),
                                                     pattern_cut(r.weights, sc.array, pose, CutPlane::elevation, req.pointing)};
                std::ostringstream os;
                write_cuts_csv(os, cuts);
                write_text_file(syn_cuts, os.str());
            }
            auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"); };
            std::cout << nlohmann::ordered_json{{"sll_az_db", num(r.achieved_sll_az)},
                                                {"sll_el_db", num(r.achieved_sll_el)},
                                                {"eirp_dbm", r.achieved_eirp},
                                                {"active_elements", r.active_elements()},
                                                {"active_rows", r.active_rows},
                                                {"active_cols", r.active_cols},
                                                {"power_per_element_mw", r.weights.power_per_element},
                                                {"iterations", r.iterations},
                                                {"cost", r.cost},
                                                {"converged", r.converged},
                                                {"runtime_ms", ms}}
                             .dump()
                      << '\n';
        }
        else if (evt_cmd->parsed())
        {
            const auto sc = load_scenario(evt_scenario);
            const auto policy = eval_policy_from_string(evt_policy);
            WeightSource source;
            if (evt_source == "optimizer")
                source = WeightSource::optimizer;
            else if (evt_source == "nn")
                source = WeightSource::nn;
            else
                throw Error(ErrorCode::invalid_config, "unknown source '" + evt_source + "' (optimizer|nn)");
            std::optional<ModelBundle> bundle;
            if (!evt_bundle.empty())
            {
                bundle = load_bundle(evt_bundle);
                if (bundle->scenario_hash != scenario_hash(sc))
                    throw Error(ErrorCode::invalid_config, "bundle was trained for a different scenario");
            }
            std::vector<EvalRecord> records;
            for (const auto &t : generate_trajectories(sc, evt_trajectories, evt_seed))
            {
                auto r = evaluate_trajectory(sc, t, policy, source, bundle ? &*bundle : nullptr);
                records.insert(records.end(), r.begin(), r.end());
            }
            std::ostringstream os;
            write_records_csv(os, records);
            write_text_file(evt_out, os.str());
            std::cout << nlohmann::json{{"records", records.size()}}.dump() << '\n';
        }
        else if (eve_cmd->parsed())
        {
            std::vector<EvalRecord> records;
            for (const auto &p : eve_records)
            {
                auto r = read_records_csv(p);
                records.insert(records.end(), r.begin(), r.end());
            }
            const auto stats = eirp_stats_by_policy(records, eve_thresholds);
            std::ostringstream os;
            write_stats_csv(os, stats);
            write_text_file(eve_out, os.str());
            std::cout << nlohmann::json{{"policies", stats.size()}, {"records", records.size()}}.dump() << '\n';
        }
    }
    catch (const Error &e)
    {
        print_error(to_string(e.code()), e.what());
        return 1;
    }
    catch (const std::exception &e)
    {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
