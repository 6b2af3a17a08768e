#include "occurlens/model.hpp"

#include "occurlens/error.hpp"

#include <cmath>

namespace occurlens {

Dense Dense::slice(std::size_t begin, std::size_t end) const {
    Dense out;
    out.m = m;
    out.n = end - begin;
    out.names = names;
    out.x.assign(x.begin() + begin * m, x.begin() + end * m);
    out.y.assign(y.begin() + begin, y.begin() + end);
    if (!timestamps.empty())
        out.timestamps.assign(timestamps.begin() + begin, timestamps.begin() + end);
    return out;
}

Dense to_dense(const FeatureTable& table) {
    table.validate();
    Dense d;
    d.n = table.n_rows();
    d.m = table.n_features();
    d.names.reserve(d.m);
    for (const auto& meta : table.meta) d.names.push_back(meta.name);
    d.x.resize(d.n * d.m);
    for (std::size_t c = 0; c < d.m; ++c) {
        const auto& col = table.columns[c];
        for (std::size_t i = 0; i < d.n; ++i) {
            if (!col.present[i])
                throw SchemaError("column '" + table.meta[c].name +
                                  "' still has missing cells; impute before modeling");
            d.x[i * d.m + c] = col.values[i];
        }
    }
    d.y = table.labels;
    d.timestamps = table.timestamps;
    return d;
}

void Hyperparams::validate() const {
    if (gbdt.n_trees < 0 || gbdt.max_depth < 1 || gbdt.learning_rate <= 0.0 ||
        gbdt.l2_lambda < 0.0 || gbdt.min_child_weight < 0.0)
        throw DomainError("invalid gbdt hyperparameters");
    if (mlp.layers.empty() || mlp.dropout < 0.0 || mlp.dropout >= 1.0 ||
        mlp.learning_rate <= 0.0 || mlp.batch_size < 1 || mlp.max_epochs < 0 ||
        mlp.patience < 1)
        throw DomainError("invalid mlp hyperparameters");
    for (int l : mlp.layers)
        if (l < 1) throw DomainError("invalid mlp layer size");
}

std::vector<double> Model::predict_proba(const Dense& data) const {
    if (data.names != feature_names)
        throw SchemaError("prediction rows do not carry the model's feature names");
    std::vector<double> out(data.n);
    for (std::size_t i = 0; i < data.n; ++i) out[i] = predict_row(data.row(i));
    return out;
}

std::vector<int> hours_from(const Dense& data) {
    int idx = -1;
    for (std::size_t c = 0; c < data.names.size(); ++c)
        if (data.names[c] == "hour") idx = static_cast<int>(c);
    if (idx < 0) throw SchemaError("table has no 'hour' column");
    std::vector<int> hours(data.n);
    for (std::size_t i = 0; i < data.n; ++i) {
        int h = static_cast<int>(std::lround(data.x[i * data.m + idx] * 23.0));
        if (h < 0 || h > 23) throw DomainError("hour encoding out of range");
        hours[i] = h;
    }
    return hours;
}

} // namespace occurlens
