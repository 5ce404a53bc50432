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

// Acceptance run: one PASS/FAIL line per criterion on stdout and in acceptance_report.txt.
// Exit status is 0 when every criterion ran to completion; --strict also fails on any FAIL line.

#include "oracles.hpp"
#include <isac/isac.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>

using namespace isac;
namespace fs = std::filesystem;

namespace
{
    using Clock = std::chrono::steady_clock;
    double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

    struct Outcome
    {
        bool pass = false;
        std::string detail;
    };

    std::string format(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    std::string run_cli(const std::string &args)
    {
        const std::string cmd = std::string(ISAC_CLI_PATH) + " " + args + " 2>&1";
        std::FILE *p = popen(cmd.c_str(), "r");
        if (!p)
            throw std::runtime_error("cannot start " + cmd);
        std::string out;
        char buf[4096];
        while (std::fgets(buf, sizeof buf, p))
            out += buf;
        if (pclose(p) != 0)
            throw std::runtime_error("command failed: " + cmd + "\n" + out);
        return out;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    // ---- 1: optimizer reference points through the CLI ------------------------------------------------------

    Outcome optimizer_reference(const fs::path &work)
    {
        const auto sc = (work / "scenario.json").string();
        run_cli("scenario init --out " + sc);
        struct Ref
        {
            const char *args;
            double sll, eirp;
        };
        const Ref refs[] = {{"--az 43.6 --el 16.2 --null 12.61,42.63 --null 76.64,42.4 --sll-az 15 --sll-el 15 --eirp 15.38", 15.0, 15.38},
                            {"--az -58.4 --el 8.4 --null 57.09,25.47 --null 33.85,27.30 --sll-az 23 --sll-el 23 --eirp 18", 23.0, 18.0}};
        Outcome o{true, ""};
        for (const auto &r : refs)
        {
            const auto t0 = Clock::now();
            const auto j = nlohmann::json::parse(run_cli("synthesize --scenario " + sc + " " + r.args));
            const double wall = seconds_since(t0);
            auto num = [](const nlohmann::json &v) { return v.is_string() ? std::numeric_limits<double>::infinity() : v.get<double>(); };
            const double az = num(j["sll_az_db"]), el = num(j["sll_el_db"]), e = j["eirp_dbm"].get<double>();
            const auto active = j["active_elements"].get<std::size_t>();
            const bool ok = std::abs(e - r.eirp) <= 0.5 && az >= r.sll && el >= r.sll && active == 100 && wall < 60.0;
            o.pass = o.pass && ok;
            o.detail += format("[eirp %.3f dBm, sll %.2f/%.2f dB, %zu elements, %.2f s] ", e, az, el, active, wall);
        }
        return o;
    }

    // ---- 2: Chebyshev taper against a brute-force scan ----------------------------------------------------

    Outcome chebyshev_oracle()
    {
        const auto t0 = Clock::now();
        const auto w = chebyshev_taper(8, 30.0);
        const double sll = oracle::scanned_sll_db(w, 0.05);
        const auto two = chebyshev_taper(2, 30.0);
        const bool uniform = two.size() == 2 && two[0] == two[1];
        const double t = seconds_since(t0);
        return {std::abs(sll - 30.0) <= 0.5 && uniform && t < 1.0, format("scanned SLL %.3f dB, 2-element uniform %s, %.3f s", sll, uniform ? "yes" : "no", t)};
    }

    // ---- 3: null steering in random scenes ----------------------------------------------------------------

    Outcome null_steering()
    {
        const auto t0 = Clock::now();
        ArrayConfig cfg;
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        double worst_ratio = 0.0, worst_loss = 0.0;
        for (int scene = 0; scene < 100; ++scene)
        {
            const Pose pose{{0, 0, 100}, {2 * pi * u01(rng), 0.2 * (u01(rng) - 0.5), 0.2 * (u01(rng) - 0.5)}};
            const auto dir = from_array_angles(pose.orientation, {deg2rad(60.0 * u01(rng)), pi * (2 * u01(rng) - 1)});
            std::vector<DirectionAngles> nulls;
            while (nulls.size() < 2)
            {
                const auto n = from_array_angles(pose.orientation, {deg2rad(85.0 * u01(rng)), pi * (2 * u01(rng) - 1)});
                if (angular_separation(n, dir) >= deg2rad(10.0))
                    nulls.push_back(n);
            }
            const auto w = steered_taper(cfg, pose.orientation, dir, 10, 10, 20.0, 20.0);
            const auto out = apply_nulls(w, cfg, pose, nulls, dir);
            const double bound = std::sqrt(out.norm2()) * std::sqrt(static_cast<double>(cfg.num_elements));
            for (const auto &n : nulls)
                worst_ratio = std::max(worst_ratio, std::abs(oracle::hdot(steering_vector(cfg, pose.orientation, n), out.entries)) / bound);
            worst_loss = std::max(worst_loss, linear_to_db(array_gain(w, cfg, pose, dir) / array_gain(out, cfg, pose, dir)));
        }
        const double t = seconds_since(t0);
        return {worst_ratio <= 1e-10 && worst_loss < 3.0 && t < 10.0,
                format("max |a^H w|/(|w| sqrt M) %.2e, max main-lobe loss %.3f dB, %.2f s", worst_ratio, worst_loss, t)};
    }

    // ---- 4: geometry invariants ---------------------------------------------------------------------------

    Outcome geometry_invariants()
    {
        std::mt19937_64 rng(77);
        std::uniform_real_distribution<double> ang(-pi, pi), th(0.0, pi);
        double worst_orth = 0.0, worst_aa = 0.0, worst_gain = 0.0;
        ArrayConfig cfg;
        const double M = static_cast<double>(cfg.num_elements);
        for (int k = 0; k < 1000; ++k)
        {
            const RotationAngles o{ang(rng), ang(rng), ang(rng)};
            const auto R = rotation_matrix(o);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                {
                    double s = 0.0;
                    for (int l = 0; l < 3; ++l)
                        s += R[l][i] * R[l][j];
                    worst_orth = std::max(worst_orth, std::abs(s - (i == j ? 1.0 : 0.0)));
                }
            worst_orth = std::max(worst_orth, std::abs(determinant(R) - 1.0));

            const DirectionAngles d{th(rng), ang(rng)};
            const auto a = steering_vector(cfg, o, d);
            worst_aa = std::max(worst_aa, std::abs(oracle::hdot(a, a) - M));
            const BeamWeights w{a, 1.0};
            const double ge = element_gain(cfg.element, off_broadside_angle(o, d));
            if (ge > 1e-6)
                worst_gain = std::max(worst_gain, std::abs(array_gain(w, cfg, {{}, o}, d) / (M * M * ge) - 1.0));
        }
        return {worst_orth <= 1e-12 && worst_aa <= 1e-12 * M && worst_gain <= 1e-9,
                format("orthogonality/det %.2e, |a^H a - M| %.2e, coherent gain rel. error %.2e", worst_orth, worst_aa, worst_gain)};
    }

    // ---- 5: gradient correctness on both architectures ----------------------------------------------------

    Outcome gradients_check()
    {
        double worst = 0.0;
        for (const auto &cfg : {beamformer_config(100, 0), association_config(0)})
            for (std::uint64_t draw = 0; draw < 10; ++draw)
            {
                auto c = cfg;
                c.seed = 1000 + draw;
                const nn::Network net(c);
                std::mt19937_64 rng(draw);
                std::normal_distribution<double> g;
                std::vector<std::vector<double>> x(4, std::vector<double>(net.input_size())), y(4, std::vector<double>(net.output_size()));
                for (auto &r : x)
                    for (auto &v : r)
                        v = g(rng);
                for (auto &r : y)
                    for (auto &v : r)
                        v = g(rng);
                const std::vector<std::size_t> rows{0, 1, 2, 3};
                worst = std::max(worst, nn::gradient_check(net, x, y, rows));
            }
        return {worst < 1e-4, format("worst relative error %.2e over 20 draws", worst)};
    }

    // ---- shared learning run for 6 to 9 -------------------------------------------------------------------

    struct LearningRun
    {
        Scenario sc;
        std::vector<Sample> samples;
        std::size_t skipped = 0;
        ModelBundle bundle;
        double dataset_s = 0.0, train_s = 0.0;
    };

    LearningRun learning_run()
    {
        LearningRun r;
        auto t0 = Clock::now();
        const auto ds = generate_dataset(r.sc, generate_trajectories(r.sc, 10, 11), DatasetPolicy::optimal);
        r.dataset_s = seconds_since(t0);
        r.samples = ds.samples;
        r.skipped = ds.skipped;
        t0 = Clock::now();
        TrainOptions opt; // 200 epochs, batch 128, Adam at 1e-3
        opt.train.seed = 11;
        r.bundle = train_models(r.sc, r.samples, opt);
        r.train_s = seconds_since(t0);
        return r;
    }

    Outcome learning_curve(const LearningRun &r)
    {
        const auto &c = r.bundle.beamformer_report.val_metric;
        std::vector<double> ma;
        for (std::size_t e = 9; e < c.size(); ++e)
        {
            double s = 0.0;
            for (std::size_t k = e - 9; k <= e; ++k)
                s += c[k];
            ma.push_back(s / 10.0);
        }
        std::size_t rises = 0;
        for (std::size_t i = 1; i < ma.size(); ++i)
            rises += ma[i] > ma[i - 1];
        const double ratio = c.back() / c.front();
        const double runtime = r.dataset_s + r.train_s;
        return {rises == 0 && ratio < 0.25 && runtime < 600.0,
                format("%zu samples (%zu skipped), error %.4f -> %.4f (ratio %.3f), moving-average rises %zu, %.0f s", r.samples.size(), r.skipped,
                       c.front(), c.back(), ratio, rises, runtime)};
    }

    Outcome inference_speedup(const LearningRun &r)
    {
        std::vector<Pose> poses;
        for (std::size_t i = 0; i < r.samples.size() && poses.size() < 20; i += std::max<std::size_t>(1, r.samples.size() / 20))
            poses.push_back(r.samples[i].pose());
        auto t0 = Clock::now();
        for (const auto &p : poses)
            (void)synthesize(sensing_request(r.sc, p), r.sc.array, p);
        const double opt = seconds_since(t0) / static_cast<double>(poses.size());

        constexpr int reps = 50;
        double sink = 0.0;
        t0 = Clock::now();
        for (int k = 0; k < reps; ++k)
            for (const auto &p : poses)
                sink += predict_weights(r.bundle, r.sc.array, p, sensing_features(r.sc, p), target_direction(r.sc, p.position), r.sc.sensing_eirp_dbm)
                            .power_per_element;
        const double inf = seconds_since(t0) / static_cast<double>(reps * poses.size());
        const double ratio = opt / inf;
        return {ratio >= 10.0 && std::isfinite(sink), format("optimizer %.3f ms, network %.4f ms per point, speedup %.0fx", 1e3 * opt, 1e3 * inf, ratio)};
    }

    struct PolicyRuns
    {
        std::vector<EvalRecord> records; // all policies, optimizer weights
        std::vector<EvalRecord> nn_weights;
        std::vector<Trajectory> trajectories;
    };

    PolicyRuns policy_runs(const LearningRun &r)
    {
        PolicyRuns p;
        p.trajectories = generate_trajectories(r.sc, 2, 1011);
        for (auto pol : {EvalPolicy::closest, EvalPolicy::angle, EvalPolicy::sinr, EvalPolicy::nn})
            for (const auto &t : p.trajectories)
            {
                auto rec = evaluate_trajectory(r.sc, t, pol, WeightSource::optimizer, &r.bundle);
                p.records.insert(p.records.end(), rec.begin(), rec.end());
            }
        for (const auto &t : p.trajectories)
        {
            auto rec = evaluate_trajectory(r.sc, t, EvalPolicy::nn, WeightSource::nn, &r.bundle);
            p.nn_weights.insert(p.nn_weights.end(), rec.begin(), rec.end());
        }
        return p;
    }

    Outcome association_quality(const LearningRun &r, const PolicyRuns &p)
    {
        const auto &val = r.bundle.association_split.validation;
        std::map<std::size_t, std::size_t> hist;
        std::size_t hit = 0;
        for (auto i : val)
        {
            const auto &s = r.samples[i];
            ++hist[s.optimal_gbs];
            hit += predict_association(r.bundle, r.sc, {s.slot, s.pos, s.orientation}) == s.optimal_gbs;
        }
        std::size_t majority = 0;
        for (const auto &[k, n] : hist)
            majority = std::max(majority, n);
        const double acc = static_cast<double>(hit) / static_cast<double>(val.size());
        const double base = static_cast<double>(majority) / static_cast<double>(val.size());

        const std::vector<double> th{10.0, 15.0};
        const auto stats = eirp_stats_by_policy(p.records, th);
        const EirpStats *nn = nullptr;
        for (const auto &[name, s] : stats)
            if (name == "nn")
                nn = &s;
        bool outage_ok = nn != nullptr;
        std::string detail = format("held-out accuracy %.3f vs majority %.3f;", acc, base);
        for (std::size_t t = 0; nn && t < th.size(); ++t)
        {
            double best_outage = 1.0;
            for (const auto &[name, s] : stats)
                if (name != "nn")
                    best_outage = std::min(best_outage, s.outage[t].second);
            bool ok = nn->outage[t].second <= best_outage;
            if (!ok)
                for (const auto &[name, s] : stats)
                    if (name != "nn" && s.outage[t].second == nn->outage[t].second && nn->mean_rate >= s.mean_rate)
                        ok = true;
            outage_ok = outage_ok && ok;
            detail += format(" outage@%.0f nn %.3f best baseline %.3f;", th[t], nn->outage[t].second, best_outage);
        }
        for (const auto &[name, s] : stats)
            detail += format(" %s %.3g bps", name.c_str(), s.mean_rate);
        return {acc > base && outage_ok, detail};
    }

    Outcome constraint_compliance(const LearningRun &r, const PolicyRuns &p)
    {
        std::size_t n = 0, bad = 0;
        for (const auto *set : {&p.records, &p.nn_weights})
            for (const auto &rec : *set)
            {
                ++n;
                bad += !(rec.total_power_mw <= r.sc.p_max * (1.0 + 1e-12) && rec.eirp_dbm <= r.sc.eirp_max_dbm + 1e-9 &&
                         rec.sensing_eirp_dbm <= r.sc.eirp_max_dbm + 1e-9);
            }
        const auto trajs = generate_trajectories(r.sc, r.sc.num_trajectories, 5);
        std::size_t bad_traj = 0;
        for (const auto &t : trajs)
        {
            bool ok = t.points.front().pos == r.sc.start && t.points.back().pos == r.sc.end && t.points.size() <= r.sc.max_slots;
            for (std::size_t k = 1; k < t.points.size(); ++k)
                ok = ok && distance(t.points[k].pos, t.points[k - 1].pos) <= r.sc.v_max * r.sc.slot_duration * (1.0 + 1e-12);
            bad_traj += !ok;
        }
        return {bad == 0 && bad_traj == 0,
                format("%zu/%zu matrices within power and EIRP limits, %zu/%zu trajectories within endpoint and speed limits", n - bad, n,
                       trajs.size() - bad_traj, trajs.size())};
    }

    // ---- 10: end-to-end determinism through the CLI ---------------------------------------------------------

    Outcome determinism(const fs::path &work)
    {
        const std::vector<std::string> files{"data.jsonl", "bundle.json", "bundle.report.csv", "bundle.association.csv", "records.csv", "stats.csv"};
        for (const char *run : {"run_a", "run_b"})
        {
            const auto d = work / run;
            fs::remove_all(d);
            fs::create_directories(d);
            const std::string s = d.string() + "/";
            run_cli("scenario init --out " + s + "scenario.json");
            run_cli("dataset generate --scenario " + s + "scenario.json --trajectories 1 --seed 5 --out " + s + "data.jsonl");
            run_cli("train --data " + s + "data.jsonl --scenario " + s + "scenario.json --epochs 20 --seed 5 --out " + s + "bundle.json");
            run_cli("eval trajectory --scenario " + s + "scenario.json --bundle " + s + "bundle.json --policy nn --source nn --seed 6 --out " + s +
                    "records.csv");
            run_cli("eval eirp --records " + s + "records.csv --out " + s + "stats.csv");
        }
        std::size_t same = 0;
        for (const auto &f : files)
        {
            const auto a = slurp(work / "run_a" / f), b = slurp(work / "run_b" / f);
            same += !a.empty() && a == b;
        }
        return {same == files.size(), format("%zu/%zu output files byte-identical", same, files.size())};
    }
} // namespace

int main(int argc, char **argv)
{
    const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
    const fs::path work = fs::current_path() / "acceptance_work";
    fs::create_directories(work);
    std::ofstream report("acceptance_report.txt");
    int failed = 0, errors = 0;

    auto run = [&](int id, const char *name, const std::function<Outcome()> &f)
    {
        const auto t0 = Clock::now();
        std::string line;
        try
        {
            const auto o = f();
            failed += !o.pass;
            line = format("criterion %2d %-28s %s  %s (%.1f s)", id, name, o.pass ? "PASS" : "FAIL", o.detail.c_str(), seconds_since(t0));
        }
        catch (const std::exception &e)
        {
            ++errors;
            ++failed;
            line = format("criterion %2d %-28s FAIL  error: %s", id, name, e.what());
        }
        std::cout << line << std::endl;
        report << line << '\n';
    };

    run(1, "optimizer reference points", [&] { return optimizer_reference(work); });
    run(2, "chebyshev oracle", chebyshev_oracle);
    run(3, "null steering", null_steering);
    run(4, "geometry invariants", geometry_invariants);
    run(5, "gradient correctness", gradients_check);

    std::optional<LearningRun> lr;
    std::optional<PolicyRuns> pr;
    auto need_learning = [&]() -> const LearningRun &
    {
        if (!lr)
            lr = learning_run();
        return *lr;
    };
    auto need_policies = [&]() -> const PolicyRuns &
    {
        if (!pr)
            pr = policy_runs(need_learning());
        return *pr;
    };
    run(6, "desk-scale learning", [&] { return learning_curve(need_learning()); });
    run(7, "inference speedup", [&] { return inference_speedup(need_learning()); });
    run(8, "association quality", [&] { return association_quality(need_learning(), need_policies()); });
    run(9, "constraint compliance", [&] { return constraint_compliance(need_learning(), need_policies()); });
    run(10, "determinism", [&] { return determinism(work); });

    const auto summary = format("%d of 10 criteria passed", 10 - failed);
    std::cout << summary << std::endl;
    report << summary << '\n';
    if (errors > 0)
        return 2;
    return strict && failed > 0 ? 1 : 0;
}
