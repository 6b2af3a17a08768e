#include "occurlens/model.hpp"

#include "occurlens/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace occurlens {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct TreeNode {
    int feature = -1; // -1 for leaves
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaf weight, learning rate applied
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const double* x) const {
        int i = 0;
        while (nodes[i].feature >= 0)
            i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
        return nodes[i].value;
    }
};

class GbdtModel final : public Model {
public:
    double base_score = 0.0; // log-odds
    GbdtParams params;
    std::vector<Tree> trees;

    std::string kind() const override { return "gbdt"; }

    double predict_row(const double* x) const override {
        double z = base_score;
        for (const auto& t : trees) z += t.predict(x);
        return sigmoid(z);
    }

    nlohmann::ordered_json to_json() const override;
};

struct SplitCandidate {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool valid = false;
};

double leaf_objective(double g, double h, double lambda) {
    return g * g / (h + lambda);
}

// Level-wise exact greedy tree growth on precomputed per-feature sort orders.
Tree build_tree(const Dense& data, const std::vector<std::vector<std::size_t>>& sorted,
                const std::vector<double>& grad, const std::vector<double>& hess,
                const GbdtParams& hp) {
    Tree tree;
    std::vector<int> node_of(data.n, 0);

    double g0 = std::accumulate(grad.begin(), grad.end(), 0.0);
    double h0 = std::accumulate(hess.begin(), hess.end(), 0.0);
    tree.nodes.push_back(TreeNode{});
    std::vector<int> active = {0};
    std::vector<double> node_g = {g0};
    std::vector<double> node_h = {h0};

    struct Scan {
        double gl, hl;
        double last_value;
        bool any;
        SplitCandidate best;
    };

    for (int depth = 0; depth < hp.max_depth && !active.empty(); ++depth) {
        const int n_nodes = static_cast<int>(tree.nodes.size());
        std::vector<SplitCandidate> best(n_nodes);
        std::vector<char> is_active(n_nodes, 0);
        for (int nid : active) is_active[nid] = 1;
        for (std::size_t f = 0; f < data.m; ++f) {
            std::vector<Scan> scans(n_nodes);
            for (int nid : active) scans[nid] = Scan{0.0, 0.0, 0.0, false, {}};
            for (std::size_t r : sorted[f]) {
                const int nid = node_of[r];
                if (!is_active[nid]) continue;
                Scan& sc = scans[nid];
                const double v = data.x[r * data.m + f];
                if (sc.any && v > sc.last_value) {
                    const double gr = node_g[nid] - sc.gl;
                    const double hr = node_h[nid] - sc.hl;
                    if (sc.hl >= hp.min_child_weight && hr >= hp.min_child_weight) {
                        const double gain =
                            0.5 * (leaf_objective(sc.gl, sc.hl, hp.l2_lambda) +
                                   leaf_objective(gr, hr, hp.l2_lambda) -
                                   leaf_objective(node_g[nid], node_h[nid], hp.l2_lambda));
                        if (!sc.best.valid || gain > sc.best.gain + 1e-12) {
                            sc.best.gain = gain;
                            sc.best.feature = static_cast<int>(f);
                            sc.best.threshold = 0.5 * (sc.last_value + v);
                            sc.best.valid = true;
                        }
                    }
                }
                sc.gl += grad[r];
                sc.hl += hess[r];
                sc.last_value = v;
                sc.any = true;
            }
            for (int nid : active) {
                const SplitCandidate& c = scans[nid].best;
                if (c.valid && (!best[nid].valid || c.gain > best[nid].gain + 1e-12))
                    best[nid] = c;
            }
        }

        std::vector<int> next_active;
        bool any_split = false;
        for (int nid : active) {
            if (!best[nid].valid || best[nid].gain <= 0.0) continue;
            any_split = true;
            TreeNode& nd = tree.nodes[nid];
            nd.feature = best[nid].feature;
            nd.threshold = best[nid].threshold;
            nd.left = static_cast<int>(tree.nodes.size());
            nd.right = nd.left + 1;
            tree.nodes.push_back(TreeNode{});
            tree.nodes.push_back(TreeNode{});
            next_active.push_back(nd.left);
            next_active.push_back(nd.right);
        }
        if (!any_split) break;

        std::vector<double> next_g(tree.nodes.size(), 0.0);
        std::vector<double> next_h(tree.nodes.size(), 0.0);
        for (std::size_t r = 0; r < data.n; ++r) {
            const int nid = node_of[r];
            const TreeNode& nd = tree.nodes[nid];
            if (nd.feature < 0) continue;
            const int child =
                data.x[r * data.m + nd.feature] < nd.threshold ? nd.left : nd.right;
            node_of[r] = child;
            next_g[child] += grad[r];
            next_h[child] += hess[r];
        }
        node_g.resize(tree.nodes.size(), 0.0);
        node_h.resize(tree.nodes.size(), 0.0);
        for (int nid : next_active) {
            node_g[nid] = next_g[nid];
            node_h[nid] = next_h[nid];
        }
        active = std::move(next_active);
    }

    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        TreeNode& nd = tree.nodes[i];
        if (nd.feature < 0)
            nd.value = -hp.learning_rate * node_g[i] / (node_h[i] + hp.l2_lambda);
    }
    return tree;
}

} // namespace

std::unique_ptr<Model> train_gbdt(const Dense& data, const GbdtParams& hp,
                                  std::uint64_t seed) {
    if (data.n < 2) throw DegenerateInputError("train_gbdt: need >= 2 rows");
    long long pos = 0;
    for (int y : data.y) pos += y;
    if (pos == 0 || pos == static_cast<long long>(data.n))
        throw DegenerateInputError("train_gbdt: labels contain a single class");

    auto model = std::make_unique<GbdtModel>();
    model->feature_names = data.names;
    model->seed = seed;
    model->params = hp;
    const double base_rate = static_cast<double>(pos) / static_cast<double>(data.n);
    model->base_score = std::log(base_rate / (1.0 - base_rate));

    // Per-feature sort orders, stable in row index for determinism.
    std::vector<std::vector<std::size_t>> sorted(data.m);
    for (std::size_t f = 0; f < data.m; ++f) {
        sorted[f].resize(data.n);
        std::iota(sorted[f].begin(), sorted[f].end(), 0);
        std::stable_sort(sorted[f].begin(), sorted[f].end(),
                         [&](std::size_t a, std::size_t b) {
                             return data.x[a * data.m + f] < data.x[b * data.m + f];
                         });
    }

    std::vector<double> margin(data.n, model->base_score);
    std::vector<double> grad(data.n), hess(data.n);
    for (int t = 0; t < hp.n_trees; ++t) {
        for (std::size_t i = 0; i < data.n; ++i) {
            const double p = sigmoid(margin[i]);
            grad[i] = p - data.y[i];
            hess[i] = p * (1.0 - p);
        }
        Tree tree = build_tree(data, sorted, grad, hess, hp);
        if (tree.nodes.size() == 1 && tree.nodes[0].value == 0.0) break; // no useful split
        for (std::size_t i = 0; i < data.n; ++i) margin[i] += tree.predict(data.row(i));
        model->trees.push_back(std::move(tree));
    }
    return model;
}

namespace {

nlohmann::ordered_json tree_to_json(const Tree& t) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& nd : t.nodes) {
        nlohmann::ordered_json n;
        n["feature"] = nd.feature;
        n["threshold"] = nd.threshold;
        n["left"] = nd.left;
        n["right"] = nd.right;
        n["value"] = nd.value;
        nodes.push_back(std::move(n));
    }
    return nodes;
}

Tree tree_from_json(const nlohmann::ordered_json& j) {
    Tree t;
    for (const auto& n : j) {
        TreeNode nd;
        nd.feature = n.at("feature").get<int>();
        nd.threshold = n.at("threshold").get<double>();
        nd.left = n.at("left").get<int>();
        nd.right = n.at("right").get<int>();
        nd.value = n.at("value").get<double>();
        t.nodes.push_back(nd);
    }
    return t;
}

} // namespace

nlohmann::ordered_json GbdtModel::to_json() const {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["kind"] = "gbdt";
    j["feature_names"] = feature_names;
    j["seed"] = seed;
    j["training_span"] = training_span;
    j["base_score"] = base_score;
    j["params"] = {{"n_trees", params.n_trees},
                   {"max_depth", params.max_depth},
                   {"learning_rate", params.learning_rate},
                   {"l2_lambda", params.l2_lambda},
                   {"min_child_weight", params.min_child_weight}};
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& t : trees) arr.push_back(tree_to_json(t));
    j["trees"] = std::move(arr);
    return j;
}

std::unique_ptr<Model> gbdt_from_json(const nlohmann::ordered_json& j) {
    auto m = std::make_unique<GbdtModel>();
    m->feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m->seed = j.at("seed").get<std::uint64_t>();
    m->training_span = j.value("training_span", std::string{});
    m->base_score = j.at("base_score").get<double>();
    const auto& p = j.at("params");
    m->params.n_trees = p.at("n_trees").get<int>();
    m->params.max_depth = p.at("max_depth").get<int>();
    m->params.learning_rate = p.at("learning_rate").get<double>();
    m->params.l2_lambda = p.at("l2_lambda").get<double>();
    m->params.min_child_weight = p.at("min_child_weight").get<double>();
    for (const auto& t : j.at("trees")) m->trees.push_back(tree_from_json(t));
    return m;
}

} // namespace occurlens
