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

#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include <isac/pipeline.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace isac;
using Catch::Approx;

namespace
{
    // Eastbound leg south of the target, so the array broadside (left of the heading) faces it
    Trajectory east_leg(std::size_t n = 8)
    {
        Trajectory t;
        t.id = 3;
        for (std::size_t i = 0; i < n; ++i)
        {
            TrajectoryPoint p;
            p.slot = i;
            p.pos = {300.0 + 10.0 * static_cast<double>(i), 200.0, 100.0};
            p.orientation = {0.0, 0.0, 0.0};
            t.points.push_back(p);
        }
        return t;
    }

    const DatasetResult &leg_dataset()
    {
        static const DatasetResult ds = generate_dataset(Scenario{}, {east_leg()}, DatasetPolicy::optimal);
        return ds;
    }

    std::string temp_path(const char *name) { return (std::filesystem::temp_directory_path() / name).string(); }
} // namespace

TEST_CASE("weight encoding round trip")
{
    BeamWeights w = BeamWeights::zeros(3);
    w.entries = {{1.0, -2.0}, {0.5, 0.25}, {0.0, 3.0}};
    const auto v = encode_weights(w);
    CHECK(v == std::vector<double>{1.0, -2.0, 0.5, 0.25, 0.0, 3.0});
    const auto back = decode_weights(v);
    CHECK(back.entries == w.entries);
    const std::vector<double> odd{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(decode_weights(odd), Error);
}

TEST_CASE("input features")
{
    Scenario sc;
    const Pose pose{{400, 300, 100}, {0.3, 0.0, 0.0}};
    const auto f = comm_features(sc, pose, 2, 12.5);
    const auto a = array_angles(pose.orientation, gbs_direction(sc, pose.position, 2));
    CHECK(f[0] == a.phi);
    CHECK(f[1] == a.theta);
    const auto n0 = array_angles(pose.orientation, gbs_direction(sc, pose.position, null_stations(sc, pose.position, 2)[0]));
    CHECK(f[2] == n0.phi);
    CHECK(f[3] == n0.theta);
    CHECK(f[6] == 12.5);

    const auto s = sensing_features(sc, pose);
    CHECK(s[2] == sc.sensing_eirp_dbm);
    CHECK(s[5] == 0.0);

    // with two stations only one null exists; the second slot is zero
    sc.gbs = {{200, 200, 2}, {1200, 200, 2}};
    const auto g = comm_features(sc, pose, 0, 10.0);
    CHECK(g[4] == 0.0);
    CHECK(g[5] == 0.0);
    CHECK(g[2] != 0.0);

    const auto af = association_features(sc, {750, 300, 100});
    REQUIRE(af.size() == 4);
    CHECK(af[0] == Approx(0.5));
    CHECK(af[1] == Approx(0.2));
    const auto t = target_direction(sc, {750, 300, 100});
    CHECK(af[2] == Approx(t.phi / pi));
    CHECK(af[3] == Approx(t.theta / pi));
}

TEST_CASE("association decoding")
{
    CHECK(decode_association(0.7, 1) == 0);
    CHECK(decode_association(0.0, 5) == 0);
    CHECK(decode_association(1.0, 5) == 4);
    CHECK(decode_association(0.49, 5) == 2);
    CHECK(decode_association(0.63, 5) == 3);
    CHECK(decode_association(-3.0, 5) == 0);
    CHECK(decode_association(7.0, 5) == 4);
    CHECK(decode_association(std::nan(""), 5) == 0);
}

TEST_CASE("dataset samples satisfy the synthesis constraints")
{
    const Scenario sc;
    const auto &ds = leg_dataset();
    REQUIRE(ds.samples.size() >= 4);
    CHECK(ds.samples.size() + ds.skipped == 8);
    CHECK(ds.log.size() == ds.skipped);
    for (const auto &s : ds.samples)
    {
        CHECK(s.trajectory == 3);
        CHECK(s.gbs == s.optimal_gbs);
        CHECK(s.comm_target.size() == 200);
        CHECK(s.sensing_target.size() == 200);
        CHECK(s.comm_eirp_dbm <= sc.eirp_max_dbm);
        const Pose pose = s.pose();
        const auto label = label_optimal_association(sc, {s.slot, s.pos, s.orientation}, decode_weights(s.sensing_target));
        CHECK(label.gbs == s.optimal_gbs);

        // targets are peak-normalized excitations
        CHECK(decode_weights(s.comm_target).max_abs() == Approx(1.0));
        CHECK(decode_weights(s.sensing_target).max_abs() == Approx(1.0));

        // the stored sensing excitation still meets the sidelobe constraint
        const auto w0 = decode_weights(s.sensing_target);
        const auto dir = target_direction(sc, pose.position);
        CHECK(extract_sll(pattern_cut(w0, sc.array, pose, CutPlane::azimuth, dir)).sll_db >= sc.sensing_sll_min_db);
        CHECK(extract_sll(pattern_cut(w0, sc.array, pose, CutPlane::elevation, dir)).sll_db >= sc.sensing_sll_min_db);
    }
}

TEST_CASE("dataset JSONL round trip and determinism")
{
    const auto &ds = leg_dataset();
    std::ostringstream a;
    write_jsonl(a, ds.samples);
    const auto path = temp_path("isac_pipeline_test.jsonl");
    std::ofstream(path) << a.str();
    const auto back = read_jsonl(path);
    REQUIRE(back.size() == ds.samples.size());
    std::ostringstream b;
    write_jsonl(b, back);
    CHECK(a.str() == b.str());
    CHECK(back[0].comm_target == ds.samples[0].comm_target);

    const auto again = generate_dataset(Scenario{}, {east_leg()}, DatasetPolicy::optimal);
    std::ostringstream c;
    write_jsonl(c, again.samples);
    CHECK(c.str() == a.str());

    std::ofstream(path) << a.str() << "{\"trajectory\": 1}\n";
    CHECK_THROWS_AS(read_jsonl(path), Error);
    std::filesystem::remove(path);
}

TEST_CASE("dataset policies")
{
    CHECK(dataset_policy_from_string("closest") == DatasetPolicy::closest);
    CHECK(std::string(to_string(DatasetPolicy::sinr)) == "sinr");
    CHECK_THROWS_AS(dataset_policy_from_string("random"), Error);

    Trajectory t = east_leg(2);
    const auto ds = generate_dataset(Scenario{}, {t}, DatasetPolicy::closest);
    for (const auto &s : ds.samples)
        CHECK(s.gbs == associate(Scenario{}, {s.slot, s.pos, s.orientation}, AssociationPolicy::closest));
    CHECK_THROWS_AS(generate_dataset(Scenario{}, {}, DatasetPolicy::optimal), Error);
}

TEST_CASE("evaluated slots obey the limits and the SINR audits")
{
    const Scenario sc;
    const auto leg = east_leg(3);
    const auto recs = evaluate_trajectory(sc, leg, EvalPolicy::optimal, WeightSource::optimizer);
    REQUIRE(recs.size() == 3);
    for (const auto &r : recs)
    {
        CHECK(r.policy == "optimal");
        CHECK(r.trajectory == 3);
        CHECK(r.total_power_mw <= sc.p_max * (1.0 + 1e-9));
        CHECK(r.eirp_dbm <= sc.eirp_max_dbm + 1e-9);
        CHECK(r.sensing_eirp_dbm <= sc.eirp_max_dbm + 1e-9);
        CHECK(r.rate_bps == Approx(sc.channel.bandwidth * std::log2(1.0 + db_to_linear(r.sinr_db))).epsilon(1e-9));
        CHECK(r.beampattern_gain > 0.0);
    }

    // recompute one slot by hand: SINR from explicit inner products of the synthesized beams
    const auto &pt = leg.points[1];
    const Pose pose = pt.pose();
    const auto s0 = synthesize(sensing_request(sc, pose), sc.array, pose).weights;
    const std::size_t k = recs[1].gbs;
    const auto hs = sensing_channel(sc, pose);
    const double interference = std::norm(oracle::hdot(hs.entries, s0.entries)) * s0.power_per_element;
    const double eirp_req = std::min(required_comm_eirp_dbm(sc, pose, k, interference), sc.eirp_max_dbm);
    BeamformingMatrix W{s0, synthesize_comm(sc, pose, k, eirp_req, std::max(1e-12, sc.p_max - s0.power())).weights};
    enforce_limits(W, sc, pose, gbs_direction(sc, pose.position, k), target_direction(sc, pose.position));
    const auto hc = comm_channel(sc, pose, k);
    const double sig = std::norm(oracle::hdot(hc.entries, W.comm.entries)) * W.comm.power_per_element;
    const double intf = std::norm(oracle::hdot(hs.entries, W.sensing.entries)) * W.sensing.power_per_element;
    CHECK(linear_to_db(sig / (sc.channel.noise_power + intf)) == Approx(recs[1].sinr_db).margin(1e-9));

    CHECK_THROWS_AS(evaluate_trajectory(sc, leg, EvalPolicy::nn, WeightSource::optimizer), Error);
    CHECK_THROWS_AS(evaluate_trajectory(sc, leg, EvalPolicy::closest, WeightSource::nn), Error);
}

TEST_CASE("silent comm beam has zero rate")
{
    const Scenario sc;
    const Pose pose{{400, 200, 100}, {}};
    const auto w0 = synthesize(sensing_request(sc, pose), sc.array, pose).weights;
    const double s = sinr(comm_channel(sc, pose, 0), sensing_channel(sc, pose), BeamWeights::zeros(100), w0, sc.channel.noise_power);
    CHECK(s == 0.0);
    CHECK(achievable_rate(s, sc.channel.bandwidth) == 0.0);
}

TEST_CASE("limit enforcement")
{
    const Scenario sc;
    const Pose pose{{400, 200, 100}, {}};
    const auto cd = gbs_direction(sc, pose.position, 0), sd = target_direction(sc, pose.position);
    BeamformingMatrix W{steered_taper(sc.array, {}, sd, 10, 10, 20, 20), steered_taper(sc.array, {}, cd, 10, 10, 15, 15)};
    W.sensing.power_per_element = 30.0; // over the EIRP cap and the power budget
    W.comm.power_per_element = 30.0;
    enforce_limits(W, sc, pose, cd, sd);
    CHECK(eirp(W.sensing, sc.array, pose, sd) <= sc.eirp_max_dbm + 1e-9);
    CHECK(eirp(W.comm, sc.array, pose, cd) <= sc.eirp_max_dbm + 1e-9);
    CHECK(W.total_power() <= sc.p_max * (1.0 + 1e-12));

    // a sensing beam above the budget alone silences the comm beam
    BeamformingMatrix hog{BeamWeights::zeros(100), steered_taper(sc.array, {}, cd, 10, 10, 15, 15)};
    hog.sensing.entries[0] = 1.0;
    hog.sensing.power_per_element = 5000.0;
    enforce_limits(hog, sc, pose, cd, sd);
    CHECK(hog.sensing.power() == Approx(sc.p_max));
    CHECK(hog.comm.power_per_element == 0.0);
}

TEST_CASE("EIRP statistics")
{
    std::vector<EvalRecord> recs;
    for (double e : {12.0, 10.0, 20.0, 12.0})
    {
        EvalRecord r;
        r.policy = "closest";
        r.eirp_dbm = e;
        r.rate_bps = e * 1e6;
        recs.push_back(r);
    }
    const auto s = eirp_stats(recs, {9.0, 12.0, 25.0});
    const std::vector<std::pair<double, double>> ecdf{{10.0, 0.25}, {12.0, 0.75}, {20.0, 1.0}};
    CHECK(s.ecdf == ecdf);
    REQUIRE(s.outage.size() == 3);
    CHECK(s.outage[0].second == 1.0);
    CHECK(s.outage[1].second == 0.25); // strictly above the threshold
    CHECK(s.outage[2].second == 0.0);
    CHECK(s.mean_rate == Approx(13.5e6));

    auto more = recs;
    more[1].policy = "nn";
    const auto by = eirp_stats_by_policy(more, {15.0});
    REQUIRE(by.size() == 2);
    CHECK(by[0].first == "closest");
    CHECK(by[1].first == "nn");
    CHECK(by[1].second.mean_rate == Approx(10e6));

    std::ostringstream os;
    write_stats_csv(os, by);
    CHECK(os.str().rfind("kind,policy,x,value\n", 0) == 0);
    CHECK(os.str().find("mean_rate,nn,,10000000\n") != std::string::npos);
    CHECK_THROWS_AS(eirp_stats({}, {10.0}), Error);
}

TEST_CASE("record CSV round trip")
{
    EvalRecord r;
    r.trajectory = 4;
    r.slot = 17;
    r.policy = "sinr";
    r.gbs = 2;
    r.eirp_dbm = 13.25;
    r.sinr_db = -std::numeric_limits<double>::infinity();
    r.rate_bps = 0.0;
    r.beampattern_gain = 1.5e-3;
    r.total_power_mw = 812.5;
    r.sensing_eirp_dbm = 20.0;
    const auto path = temp_path("isac_pipeline_records.csv");
    {
        std::ofstream os(path);
        write_records_csv(os, {r, r});
    }
    const auto back = read_records_csv(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].slot == 17);
    CHECK(back[0].policy == "sinr");
    CHECK(back[0].eirp_dbm == 13.25);
    CHECK(std::isinf(back[0].sinr_db));
    CHECK(back[0].total_power_mw == 812.5);
    std::ofstream(path) << "a,b\n";
    CHECK_THROWS_AS(read_records_csv(path), Error);
    std::filesystem::remove(path);
}

TEST_CASE("identical samples are memorized and the bundle round trips")
{
    const Scenario sc;
    const auto &ds = leg_dataset();
    std::vector<Sample> same(24, ds.samples.front());
    CHECK_THROWS_AS(train_models(sc, std::vector<Sample>(same.begin(), same.begin() + 9), {}), Error);

    TrainOptions opt;
    opt.train.epochs = 400;
    opt.train.batch_size = 8;
    opt.train.learning_rate = 1e-2;
    opt.train.seed = 3;
    const auto b = train_models(sc, same, opt);
    CHECK(b.beamformer_report.val_loss.back() < 1e-3 * b.beamformer_report.val_loss.front());
    CHECK(b.beamformer_report.val_metric.back() < 0.05);
    CHECK(b.association_report.val_metric.back() == 1.0);
    CHECK(b.scenario_hash == scenario_hash(sc));
    CHECK(b.num_gbs == 5);

    const auto &s = same.front();
    const Pose pose = s.pose();
    const auto w = predict_weights(b, sc.array, pose, s.sensing_features, target_direction(sc, pose.position), 20.0);
    CHECK(eirp(w, sc.array, pose, target_direction(sc, pose.position)) == Approx(20.0).margin(1e-9));
    CHECK(predict_association(b, sc, {s.slot, s.pos, s.orientation}) == s.optimal_gbs);

    const auto j = nlohmann::json::parse(bundle_to_json(b).dump());
    const auto back = bundle_from_json(j);
    CHECK(back.beamformer.forward(s.comm_features) == b.beamformer.forward(s.comm_features));
    CHECK(back.scenario_hash == b.scenario_hash);
    auto wrong = j;
    wrong["format_version"] = 99;
    CHECK_THROWS_AS(bundle_from_json(wrong), Error);

    std::ostringstream os;
    write_train_report_csv(os, b.beamformer_report, "val_beampattern_error");
    CHECK(os.str().rfind("epoch,train_loss,val_loss,val_beampattern_error\n1,", 0) == 0);
}
