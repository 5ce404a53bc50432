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

#ifndef ISAC_NEURALNET_HPP
#define ISAC_NEURALNET_HPP

#include "errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace isac::nn
{
    enum class Activation
    {
        relu,
        tanh,
        linear
    };

    inline const char *to_string(Activation a)
    {
        switch (a)
        {
        case Activation::relu:
            return "relu";
        case Activation::tanh:
            return "tanh";
        case Activation::linear:
            return "linear";
        }
        return "linear";
    }

    inline Activation activation_from_string(const std::string &s)
    {
        if (s == "relu")
            return Activation::relu;
        if (s == "tanh")
            return Activation::tanh;
        if (s == "linear")
            return Activation::linear;
        throw Error(ErrorCode::parse, "unknown activation '" + s + "'");
    }

    inline double activate(Activation a, double x)
    {
        switch (a)
        {
        case Activation::relu:
            return x > 0.0 ? x : 0.0;
        case Activation::tanh:
            return std::tanh(x);
        case Activation::linear:
            return x;
        }
        return x;
    }

    // Derivative expressed through the pre-activation z
    inline double activate_grad(Activation a, double z)
    {
        switch (a)
        {
        case Activation::relu:
            return z > 0.0 ? 1.0 : 0.0;
        case Activation::tanh:
        {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::linear:
            return 1.0;
        }
        return 1.0;
    }

    struct NetworkConfig
    {
        std::vector<std::size_t> layer_sizes;
        Activation hidden_activation = Activation::relu;
        Activation output_activation = Activation::linear;
        std::uint64_t seed = 0;

        void validate() const
        {
            if (layer_sizes.size() < 2)
                throw Error(ErrorCode::invalid_config, "a network needs at least an input and an output layer");
            for (auto s : layer_sizes)
                if (s == 0)
                    throw Error(ErrorCode::invalid_config, "layer sizes must be positive");
            if (output_activation != Activation::linear)
                throw Error(ErrorCode::invalid_config, "only a linear output layer is supported");
        }
    };

    struct Layer
    {
        std::size_t in = 0, out = 0;
        std::vector<double> weights; // out x in, row-major
        std::vector<double> biases;
    };

    inline double uniform01(std::mt19937_64 &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

    class Network
    {
    public:
        Network() = default;

        // Glorot-uniform weights, zero biases, identity normalization
        explicit Network(const NetworkConfig &config) : config_(config)
        {
            config.validate();
            std::mt19937_64 rng(config.seed);
            const auto &ls = config.layer_sizes;
            for (std::size_t l = 0; l + 1 < ls.size(); ++l)
            {
                Layer L{ls[l], ls[l + 1], std::vector<double>(ls[l] * ls[l + 1]), std::vector<double>(ls[l + 1], 0.0)};
                const double lim = std::sqrt(6.0 / static_cast<double>(L.in + L.out));
                for (auto &w : L.weights)
                    w = (2.0 * uniform01(rng) - 1.0) * lim;
                layers_.push_back(std::move(L));
            }
            mean_.assign(ls.front(), 0.0);
            std_.assign(ls.front(), 1.0);
        }

        const NetworkConfig &config() const { return config_; }
        std::size_t input_size() const { return config_.layer_sizes.front(); }
        std::size_t output_size() const { return config_.layer_sizes.back(); }
        std::vector<Layer> &layers() { return layers_; }
        const std::vector<Layer> &layers() const { return layers_; }
        const std::vector<double> &input_mean() const { return mean_; }
        const std::vector<double> &input_std() const { return std_; }

        std::size_t parameter_count() const
        {
            std::size_t n = 0;
            for (const auto &L : layers_)
                n += L.weights.size() + L.biases.size();
            return n;
        }

        void set_normalization(std::vector<double> mean, std::vector<double> stdev)
        {
            if (mean.size() != input_size() || stdev.size() != input_size())
                throw Error(ErrorCode::dimension_mismatch, "normalization statistics do not match the input size");
            for (double s : stdev)
                if (!(s > 0.0))
                    throw Error(ErrorCode::invalid_config, "normalization std must be positive");
            mean_ = std::move(mean);
            std_ = std::move(stdev);
        }

        // z-score statistics of the given rows; near-constant features keep unit scale
        void fit_normalization(const std::vector<std::vector<double>> &rows, std::span<const std::size_t> subset)
        {
            const std::size_t d = input_size();
            std::vector<double> mu(d, 0.0), sd(d, 0.0);
            if (subset.empty())
                throw Error(ErrorCode::empty_input, "cannot fit normalization on an empty set");
            for (auto i : subset)
                for (std::size_t f = 0; f < d; ++f)
                    mu[f] += rows[i][f];
            for (auto &m : mu)
                m /= static_cast<double>(subset.size());
            for (auto i : subset)
                for (std::size_t f = 0; f < d; ++f)
                    sd[f] += (rows[i][f] - mu[f]) * (rows[i][f] - mu[f]);
            for (auto &s : sd)
            {
                s = std::sqrt(s / static_cast<double>(subset.size()));
                if (s < 1e-12)
                    s = 1.0;
            }
            set_normalization(std::move(mu), std::move(sd));
        }

        std::vector<double> normalize(std::span<const double> x) const
        {
            if (x.size() != input_size())
                throw Error(ErrorCode::dimension_mismatch, "input has " + std::to_string(x.size()) + " features, network expects " + std::to_string(input_size()));
            std::vector<double> z(x.size());
            for (std::size_t f = 0; f < x.size(); ++f)
                z[f] = (x[f] - mean_[f]) / std_[f];
            return z;
        }

        std::vector<double> forward(std::span<const double> x) const
        {
            std::vector<double> a = normalize(x), z;
            for (std::size_t l = 0; l < layers_.size(); ++l)
            {
                const auto &L = layers_[l];
                const Activation act = l + 1 == layers_.size() ? config_.output_activation : config_.hidden_activation;
                z.assign(L.out, 0.0);
                for (std::size_t o = 0; o < L.out; ++o)
                {
                    const double *w = L.weights.data() + o * L.in;
                    double s = L.biases[o];
                    for (std::size_t i = 0; i < L.in; ++i)
                        s += w[i] * a[i];
                    z[o] = activate(act, s);
                }
                a.swap(z);
            }
            return a;
        }

    private:
        NetworkConfig config_;
        std::vector<Layer> layers_;
        std::vector<double> mean_, std_;
    };

    struct Gradients
    {
        std::vector<std::vector<double>> weights, biases;

        static Gradients zeros_like(const Network &net)
        {
            Gradients g;
            for (const auto &L : net.layers())
            {
                g.weights.emplace_back(L.weights.size(), 0.0);
                g.biases.emplace_back(L.biases.size(), 0.0);
            }
            return g;
        }
    };

    // Batch-mean squared error over all outputs and its exact gradient; returns the loss
    inline double gradients(const Network &net, const std::vector<std::vector<double>> &inputs,
                            const std::vector<std::vector<double>> &targets, std::span<const std::size_t> batch, Gradients &g)
    {
        if (batch.empty())
            throw Error(ErrorCode::empty_input, "empty batch");
        if (inputs.size() != targets.size())
            throw Error(ErrorCode::dimension_mismatch, "inputs and targets differ in length");
        g = Gradients::zeros_like(net);
        const auto &layers = net.layers();
        const std::size_t nl = layers.size();
        const double scale = 1.0 / static_cast<double>(batch.size() * net.output_size());
        const Activation hid = net.config().hidden_activation, outa = net.config().output_activation;

        std::vector<std::vector<double>> acts(nl + 1), pre(nl);
        std::vector<double> delta, next;
        double loss = 0.0;
        for (auto idx : batch)
        {
            const auto &t = targets.at(idx);
            if (t.size() != net.output_size())
                throw Error(ErrorCode::dimension_mismatch, "target has the wrong length");
            acts[0] = net.normalize(inputs.at(idx));
            for (std::size_t l = 0; l < nl; ++l)
            {
                const auto &L = layers[l];
                const Activation act = l + 1 == nl ? outa : hid;
                pre[l].assign(L.out, 0.0);
                acts[l + 1].assign(L.out, 0.0);
                for (std::size_t o = 0; o < L.out; ++o)
                {
                    const double *w = L.weights.data() + o * L.in;
                    double s = L.biases[o];
                    for (std::size_t i = 0; i < L.in; ++i)
                        s += w[i] * acts[l][i];
                    pre[l][o] = s;
                    acts[l + 1][o] = activate(act, s);
                }
            }
            const auto &y = acts[nl];
            delta.assign(y.size(), 0.0);
            for (std::size_t o = 0; o < y.size(); ++o)
            {
                const double r = y[o] - t[o];
                loss += r * r;
                delta[o] = 2.0 * r * scale * activate_grad(outa, pre[nl - 1][o]);
            }
            for (std::size_t l = nl; l-- > 0;)
            {
                const auto &L = layers[l];
                auto &gw = g.weights[l];
                auto &gb = g.biases[l];
                for (std::size_t o = 0; o < L.out; ++o)
                {
                    gb[o] += delta[o];
                    double *row = gw.data() + o * L.in;
                    for (std::size_t i = 0; i < L.in; ++i)
                        row[i] += delta[o] * acts[l][i];
                }
                if (l == 0)
                    break;
                next.assign(L.in, 0.0);
                for (std::size_t o = 0; o < L.out; ++o)
                {
                    const double *w = L.weights.data() + o * L.in;
                    for (std::size_t i = 0; i < L.in; ++i)
                        next[i] += w[i] * delta[o];
                }
                for (std::size_t i = 0; i < L.in; ++i)
                    next[i] *= activate_grad(hid, pre[l - 1][i]);
                delta.swap(next);
            }
        }
        return loss * scale;
    }

    inline double batch_loss(const Network &net, const std::vector<std::vector<double>> &inputs,
                             const std::vector<std::vector<double>> &targets, std::span<const std::size_t> rows)
    {
        if (rows.empty())
            return 0.0;
        double s = 0.0;
        for (auto i : rows)
        {
            const auto y = net.forward(inputs.at(i));
            for (std::size_t o = 0; o < y.size(); ++o)
                s += (y[o] - targets[i][o]) * (y[o] - targets[i][o]);
        }
        return s / static_cast<double>(rows.size() * net.output_size());
    }

    // Largest norm-wise relative error between analytic and central-difference gradients over all layers
    inline double gradient_check(const Network &net, const std::vector<std::vector<double>> &inputs,
                                 const std::vector<std::vector<double>> &targets, std::span<const std::size_t> rows, double h = 1e-5)
    {
        Gradients g;
        gradients(net, inputs, targets, rows, g);
        Network probe = net;
        double worst = 0.0;
        auto check = [&](std::vector<double> &params, const std::vector<double> &analytic)
        {
            double diff = 0.0, na = 0.0, nf = 0.0;
            for (std::size_t p = 0; p < params.size(); ++p)
            {
                const double keep = params[p];
                params[p] = keep + h;
                const double lp = batch_loss(probe, inputs, targets, rows);
                params[p] = keep - h;
                const double lm = batch_loss(probe, inputs, targets, rows);
                params[p] = keep;
                const double fd = (lp - lm) / (2.0 * h);
                diff += (fd - analytic[p]) * (fd - analytic[p]);
                na += analytic[p] * analytic[p];
                nf += fd * fd;
            }
            const double denom = std::sqrt(na) + std::sqrt(nf);
            worst = std::max(worst, denom > 0.0 ? std::sqrt(diff) / denom : 0.0);
        };
        for (std::size_t l = 0; l < probe.layers().size(); ++l)
        {
            check(probe.layers()[l].weights, g.weights[l]);
            check(probe.layers()[l].biases, g.biases[l]);
        }
        return worst;
    }

    struct TrainConfig
    {
        int epochs = 200;
        std::size_t batch_size = 128;
        double learning_rate = 1e-3;
        double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
        double train_fraction = 0.7;
        std::uint64_t seed = 0;

        void validate() const
        {
            if (epochs < 0 || batch_size < 1)
                throw Error(ErrorCode::invalid_config, "epochs must be non-negative and batch size positive");
            if (!(train_fraction > 0.0 && train_fraction < 1.0))
                throw Error(ErrorCode::invalid_config, "train fraction must lie in (0, 1)");
            if (!(learning_rate >= 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0))
                throw Error(ErrorCode::invalid_config, "invalid Adam hyperparameters");
        }
    };

    struct TrainReport
    {
        std::vector<double> train_loss, val_loss, val_metric;
    };

    struct Split
    {
        std::vector<std::size_t> train, validation;
    };

    // Seeded row-level shuffle split; both parts non-empty whenever n >= 2
    inline Split split_rows(std::size_t n, double train_fraction, std::uint64_t seed)
    {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i)
            idx[i] = i;
        std::mt19937_64 rng(seed);
        for (std::size_t i = n; i > 1; --i)
            std::swap(idx[i - 1], idx[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
        auto nt = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
        if (n >= 2)
            nt = std::clamp<std::size_t>(nt, 1, n - 1);
        else
            nt = n;
        Split s;
        s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(nt));
        s.validation.assign(idx.begin() + static_cast<std::ptrdiff_t>(nt), idx.end());
        return s;
    }

    // Optional per-epoch metric on the validation rows (e.g. beampattern error)
    using ValidationMetric = std::function<double(const Network &, std::span<const std::size_t>)>;

    struct TrainResult
    {
        Network network;
        TrainReport report;
        Split split;
    };

    // Mini-batch Adam on the batch-mean squared error. Normalization statistics are fitted on the training rows.
    inline TrainResult train(Network net, const std::vector<std::vector<double>> &inputs, const std::vector<std::vector<double>> &targets,
                             const TrainConfig &cfg, const ValidationMetric &metric = {})
    {
        cfg.validate();
        if (inputs.empty())
            throw Error(ErrorCode::empty_input, "training set is empty");
        if (inputs.size() != targets.size())
            throw Error(ErrorCode::dimension_mismatch, "inputs and targets differ in length");
        for (std::size_t i = 0; i < inputs.size(); ++i)
            if (inputs[i].size() != net.input_size() || targets[i].size() != net.output_size())
                throw Error(ErrorCode::dimension_mismatch, "row " + std::to_string(i) + " does not match the network shape");

        TrainResult res;
        res.split = split_rows(inputs.size(), cfg.train_fraction, cfg.seed);
        net.fit_normalization(inputs, res.split.train);

        auto m = Gradients::zeros_like(net), v = Gradients::zeros_like(net);
        Gradients g;
        std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
        std::vector<std::size_t> order = res.split.train;
        long step = 0;

        auto adam = [&](std::vector<double> &p, const std::vector<double> &gr, std::vector<double> &mm, std::vector<double> &vv)
        {
            const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
            const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
            for (std::size_t i = 0; i < p.size(); ++i)
            {
                mm[i] = cfg.beta1 * mm[i] + (1.0 - cfg.beta1) * gr[i];
                vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * gr[i] * gr[i];
                p[i] -= cfg.learning_rate * (mm[i] / c1) / (std::sqrt(vv[i] / c2) + cfg.epsilon);
            }
        };

        for (int epoch = 0; epoch < cfg.epochs; ++epoch)
        {
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
            double epoch_loss = 0.0;
            for (std::size_t b = 0; b < order.size(); b += cfg.batch_size)
            {
                const std::size_t e = std::min(order.size(), b + cfg.batch_size);
                const std::span<const std::size_t> batch(order.data() + b, e - b);
                epoch_loss += gradients(net, inputs, targets, batch, g) * static_cast<double>(batch.size());
                ++step;
                for (std::size_t l = 0; l < net.layers().size(); ++l)
                {
                    adam(net.layers()[l].weights, g.weights[l], m.weights[l], v.weights[l]);
                    adam(net.layers()[l].biases, g.biases[l], m.biases[l], v.biases[l]);
                }
            }
            res.report.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));
            res.report.val_loss.push_back(batch_loss(net, inputs, targets, res.split.validation));
            res.report.val_metric.push_back(metric ? metric(net, res.split.validation) : 0.0);
        }
        res.network = std::move(net);
        return res;
    }

    inline nlohmann::ordered_json to_json(const Network &net)
    {
        nlohmann::ordered_json j;
        j["layer_sizes"] = net.config().layer_sizes;
        j["hidden_activation"] = to_string(net.config().hidden_activation);
        j["output_activation"] = to_string(net.config().output_activation);
        j["seed"] = net.config().seed;
        auto w = nlohmann::ordered_json::array(), b = nlohmann::ordered_json::array();
        for (const auto &L : net.layers())
        {
            w.push_back(L.weights);
            b.push_back(L.biases);
        }
        j["weights"] = w;
        j["biases"] = b;
        j["input_mean"] = net.input_mean();
        j["input_std"] = net.input_std();
        return j;
    }

    inline Network network_from_json(const nlohmann::json &j)
    {
        try
        {
            NetworkConfig cfg;
            cfg.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
            cfg.hidden_activation = activation_from_string(j.at("hidden_activation").get<std::string>());
            cfg.output_activation = activation_from_string(j.at("output_activation").get<std::string>());
            cfg.seed = j.at("seed").get<std::uint64_t>();
            Network net(cfg);
            const auto &w = j.at("weights");
            const auto &b = j.at("biases");
            if (w.size() != net.layers().size() || b.size() != net.layers().size())
                throw Error(ErrorCode::parse, "layer count does not match layer_sizes");
            for (std::size_t l = 0; l < net.layers().size(); ++l)
            {
                auto &L = net.layers()[l];
                auto wl = w[l].get<std::vector<double>>();
                auto bl = b[l].get<std::vector<double>>();
                if (wl.size() != L.weights.size() || bl.size() != L.biases.size())
                    throw Error(ErrorCode::parse, "layer " + std::to_string(l) + " has the wrong shape");
                L.weights = std::move(wl);
                L.biases = std::move(bl);
            }
            net.set_normalization(j.at("input_mean").get<std::vector<double>>(), j.at("input_std").get<std::vector<double>>());
            return net;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw Error(ErrorCode::parse, std::string("network: ") + e.what());
        }
    }

} // namespace isac::nn

#endif
