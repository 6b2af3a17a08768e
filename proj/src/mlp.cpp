#include "occurlens/model.hpp"

#include "occurlens/error.hpp"
#include "occurlens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace occurlens {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Fully-connected ReLU network with a sigmoid output unit.
struct Net {
    std::vector<int> sizes;                        // input, hidden..., 1
    std::vector<std::vector<double>> w;            // per layer, row-major (out x in)
    std::vector<std::vector<double>> b;

    double forward(const double* x, std::vector<std::vector<double>>* acts = nullptr) const {
        std::vector<double> cur(x, x + sizes[0]);
        if (acts) {
            acts->clear();
            acts->push_back(cur);
        }
        for (std::size_t l = 0; l < w.size(); ++l) {
            const int in = sizes[l], out = sizes[l + 1];
            std::vector<double> nxt(out);
            for (int o = 0; o < out; ++o) {
                double z = b[l][o];
                const double* row = w[l].data() + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) z += row[i] * cur[i];
                nxt[o] = (l + 1 == w.size()) ? z : std::max(0.0, z); // linear pre-sigmoid output
            }
            cur = std::move(nxt);
            if (acts) acts->push_back(cur);
        }
        return sigmoid(cur[0]);
    }
};

class MlpModel final : public Model {
public:
    MlpParams params;
    Net net;

    std::string kind() const override { return "mlp"; }
    double predict_row(const double* x) const override { return net.forward(x); }
    nlohmann::ordered_json to_json() const override;
};

struct Adam {
    double lr, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    std::vector<std::vector<double>> mw, vw, mb, vb;
    long long t = 0;

    void init(const Net& net, double learning_rate) {
        lr = learning_rate;
        for (std::size_t l = 0; l < net.w.size(); ++l) {
            mw.emplace_back(net.w[l].size(), 0.0);
            vw.emplace_back(net.w[l].size(), 0.0);
            mb.emplace_back(net.b[l].size(), 0.0);
            vb.emplace_back(net.b[l].size(), 0.0);
        }
    }

    void step(Net& net, const std::vector<std::vector<double>>& gw,
              const std::vector<std::vector<double>>& gb) {
        ++t;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
        for (std::size_t l = 0; l < net.w.size(); ++l) {
            for (std::size_t i = 0; i < net.w[l].size(); ++i) {
                mw[l][i] = b1 * mw[l][i] + (1 - b1) * gw[l][i];
                vw[l][i] = b2 * vw[l][i] + (1 - b2) * gw[l][i] * gw[l][i];
                net.w[l][i] -= lr * (mw[l][i] / c1) / (std::sqrt(vw[l][i] / c2) + eps);
            }
            for (std::size_t i = 0; i < net.b[l].size(); ++i) {
                mb[l][i] = b1 * mb[l][i] + (1 - b1) * gb[l][i];
                vb[l][i] = b2 * vb[l][i] + (1 - b2) * gb[l][i] * gb[l][i];
                net.b[l][i] -= lr * (mb[l][i] / c1) / (std::sqrt(vb[l][i] / c2) + eps);
            }
        }
    }
};

} // namespace

std::unique_ptr<Model> train_mlp(const Dense& data, const MlpParams& hp,
                                 std::uint64_t seed) {
    if (data.n < 2) throw DegenerateInputError("train_mlp: need >= 2 rows");
    long long pos = std::accumulate(data.y.begin(), data.y.end(), 0LL);
    if (pos == 0 || pos == static_cast<long long>(data.n))
        throw DegenerateInputError("train_mlp: labels contain a single class");

    auto model = std::make_unique<MlpModel>();
    model->feature_names = data.names;
    model->seed = seed;
    model->params = hp;

    Net& net = model->net;
    net.sizes.push_back(static_cast<int>(data.m));
    for (int l : hp.layers) net.sizes.push_back(l);
    net.sizes.push_back(1);

    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < net.sizes.size(); ++l) {
        const int in = net.sizes[l], out = net.sizes[l + 1];
        std::normal_distribution<double> init(0.0, std::sqrt(2.0 / in)); // He init
        std::vector<double> wl(static_cast<std::size_t>(out) * in);
        for (auto& v : wl) v = init(rng);
        net.w.push_back(std::move(wl));
        net.b.emplace_back(out, 0.0);
    }

    // Time-ordered 80/20 train/validation split for early stopping.
    const std::size_t n_val = std::max<std::size_t>(1, data.n / 5);
    const std::size_t n_tr = data.n - n_val;
    bool val_usable = false;
    {
        long long vp = 0;
        for (std::size_t i = n_tr; i < data.n; ++i) vp += data.y[i];
        val_usable = n_val >= 2 && vp > 0 && vp < static_cast<long long>(n_val);
    }

    Adam opt;
    opt.init(net, hp.learning_rate);
    std::vector<std::size_t> order(n_tr);
    std::iota(order.begin(), order.end(), 0);

    Net best_net = net;
    double best_auc = -1.0;
    int since_best = 0;

    std::vector<std::vector<double>> acts;
    std::vector<std::vector<double>> gw, gb, delta;
    for (const auto& wl : net.w) gw.emplace_back(wl.size(), 0.0);
    for (const auto& bl : net.b) gb.emplace_back(bl.size(), 0.0);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double keep = 1.0 - hp.dropout;

    for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n_tr; start += hp.batch_size) {
            const std::size_t end = std::min(n_tr, start + hp.batch_size);
            for (auto& g : gw) std::fill(g.begin(), g.end(), 0.0);
            for (auto& g : gb) std::fill(g.begin(), g.end(), 0.0);
            const double inv_batch = 1.0 / static_cast<double>(end - start);

            for (std::size_t k = start; k < end; ++k) {
                const std::size_t r = order[k];
                // Forward with inverted dropout on hidden activations.
                std::vector<std::vector<double>> masks;
                acts.clear();
                acts.emplace_back(data.row(r), data.row(r) + data.m);
                for (std::size_t l = 0; l < net.w.size(); ++l) {
                    const int in = net.sizes[l], out = net.sizes[l + 1];
                    std::vector<double> nxt(out);
                    for (int o = 0; o < out; ++o) {
                        double z = net.b[l][o];
                        const double* row = net.w[l].data() + static_cast<std::size_t>(o) * in;
                        for (int i = 0; i < in; ++i) z += row[i] * acts[l][i];
                        nxt[o] = (l + 1 == net.w.size()) ? z : std::max(0.0, z);
                    }
                    if (l + 1 < net.w.size() && hp.dropout > 0.0) {
                        std::vector<double> mask(out);
                        for (int o = 0; o < out; ++o) {
                            mask[o] = unif(rng) < keep ? 1.0 / keep : 0.0;
                            nxt[o] *= mask[o];
                        }
                        masks.push_back(std::move(mask));
                    } else if (l + 1 < net.w.size()) {
                        masks.emplace_back();
                    }
                    acts.push_back(std::move(nxt));
                }
                const double z_out = acts.back()[0];
                const double p = sigmoid(z_out);
                const int y = data.y[r];
                epoch_loss += -(y * std::log(std::max(p, 1e-15)) +
                                (1 - y) * std::log(std::max(1.0 - p, 1e-15)));
                if (!std::isfinite(epoch_loss))
                    throw DomainError("mlp training diverged at epoch " + std::to_string(epoch));

                // Backward pass; dL/dz_out = p - y for BCE on a sigmoid unit.
                delta.assign(net.w.size(), {});
                delta.back() = {(p - y) * inv_batch};
                for (int l = static_cast<int>(net.w.size()) - 1; l >= 0; --l) {
                    const int in = net.sizes[l], out = net.sizes[l + 1];
                    for (int o = 0; o < out; ++o) {
                        const double d = delta[l][o];
                        if (d == 0.0) continue;
                        gb[l][o] += d;
                        double* grow = gw[l].data() + static_cast<std::size_t>(o) * in;
                        for (int i = 0; i < in; ++i) grow[i] += d * acts[l][i];
                    }
                    if (l == 0) break;
                    std::vector<double>& prev = delta[l - 1];
                    prev.assign(net.sizes[l], 0.0);
                    for (int o = 0; o < out; ++o) {
                        const double d = delta[l][o];
                        if (d == 0.0) continue;
                        const double* row = net.w[l].data() + static_cast<std::size_t>(o) * in;
                        for (int i = 0; i < in; ++i) prev[i] += d * row[i];
                    }
                    for (int i = 0; i < net.sizes[l]; ++i) {
                        if (acts[l][i] <= 0.0)
                            prev[i] = 0.0; // ReLU gate (dropout zeros already give act 0)
                        else if (hp.dropout > 0.0 && !masks[l - 1].empty())
                            prev[i] *= masks[l - 1][i];
                    }
                }
            }
            opt.step(net, gw, gb);
        }

        if (val_usable) {
            std::vector<double> scores(n_val);
            std::vector<int> vy(data.y.begin() + n_tr, data.y.end());
            for (std::size_t i = 0; i < n_val; ++i) scores[i] = net.forward(data.row(n_tr + i));
            const double auc = roc_auc(scores, vy);
            if (auc > best_auc + 1e-9) {
                best_auc = auc;
                best_net = net;
                since_best = 0;
            } else if (++since_best >= hp.patience) {
                break;
            }
        }
    }
    if (val_usable && best_auc >= 0.0) net = best_net;
    return model;
}

nlohmann::ordered_json MlpModel::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["kind"] = "mlp";
    j["feature_names"] = feature_names;
    j["seed"] = seed;
    j["training_span"] = training_span;
    j["params"] = {{"layers", params.layers},
                   {"dropout", params.dropout},
                   {"learning_rate", params.learning_rate},
                   {"batch_size", params.batch_size},
                   {"max_epochs", params.max_epochs},
                   {"patience", params.patience}};
    j["sizes"] = net.sizes;
    j["weights"] = net.w; // row-major (out x in) per layer
    j["biases"] = net.b;
    return j;
}

std::unique_ptr<Model> mlp_from_json(const nlohmann::ordered_json& j) {
    auto m = std::make_unique<MlpModel>();
    m->feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m->seed = j.at("seed").get<std::uint64_t>();
    m->training_span = j.value("training_span", std::string{});
    const auto& p = j.at("params");
    m->params.layers = p.at("layers").get<std::vector<int>>();
    m->params.dropout = p.at("dropout").get<double>();
    m->params.learning_rate = p.at("learning_rate").get<double>();
    m->params.batch_size = p.at("batch_size").get<int>();
    m->params.max_epochs = p.at("max_epochs").get<int>();
    m->params.patience = p.at("patience").get<int>();
    m->net.sizes = j.at("sizes").get<std::vector<int>>();
    m->net.w = j.at("weights").get<std::vector<std::vector<double>>>();
    m->net.b = j.at("biases").get<std::vector<std::vector<double>>>();
    return m;
}

} // namespace occurlens
