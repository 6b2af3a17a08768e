#include "occurlens/model.hpp"

#include "occurlens/error.hpp"

#include <array>
#include <cmath>

namespace occurlens {

namespace {

// Hour-of-day empirical-rate baseline: score(row) = P[Y = 1 | hour].
class PriorModel final : public Model {
public:
    std::array<double, 24> rates{};
    int hour_feature = -1;

    std::string kind() const override { return "prior"; }

    double predict_row(const double* x) const override {
        int h = static_cast<int>(std::lround(x[hour_feature] * 23.0));
        if (h < 0) h = 0;
        if (h > 23) h = 23;
        return rates[h];
    }

    nlohmann::ordered_json to_json() const override {
        nlohmann::ordered_json j;
        j["version"] = 1;
        j["kind"] = "prior";
        j["feature_names"] = feature_names;
        j["seed"] = seed;
        j["training_span"] = training_span;
        j["hour_feature"] = hour_feature;
        j["rates"] = rates;
        return j;
    }
};

} // namespace

std::unique_ptr<Model> fit_prior(const std::vector<int>& hours, const std::vector<int>& labels) {
    if (hours.size() != labels.size() || hours.empty())
        throw DomainError("fit_prior: misaligned inputs");
    std::array<long long, 24> seen{};
    std::array<long long, 24> events{};
    long long total_events = 0;
    for (std::size_t i = 0; i < hours.size(); ++i) {
        const int h = hours[i];
        if (h < 0 || h > 23) throw DomainError("hour out of 0..23");
        if (labels[i] != 0 && labels[i] != 1) throw DomainError("labels must be binary");
        seen[h] += 1;
        events[h] += labels[i];
        total_events += labels[i];
    }
    auto m = std::make_unique<PriorModel>();
    const double global_rate = static_cast<double>(total_events) / static_cast<double>(hours.size());
    for (int h = 0; h < 24; ++h)
        m->rates[h] = seen[h] > 0 ? static_cast<double>(events[h]) / static_cast<double>(seen[h])
                                  : global_rate;
    m->feature_names = {"hour"};
    m->hour_feature = 0;
    return m;
}

std::unique_ptr<Model> fit_prior_from(const Dense& data) {
    auto m = fit_prior(hours_from(data), data.y);
    auto* pm = static_cast<PriorModel*>(m.get());
    pm->feature_names = data.names;
    for (std::size_t c = 0; c < data.names.size(); ++c)
        if (data.names[c] == "hour") pm->hour_feature = static_cast<int>(c);
    return m;
}

std::unique_ptr<Model> prior_from_json(const nlohmann::ordered_json& j) {
    auto m = std::make_unique<PriorModel>();
    m->feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m->seed = j.at("seed").get<std::uint64_t>();
    m->training_span = j.value("training_span", std::string{});
    m->hour_feature = j.at("hour_feature").get<int>();
    auto r = j.at("rates").get<std::vector<double>>();
    if (r.size() != 24) throw SchemaError("prior model must carry 24 rates");
    std::copy(r.begin(), r.end(), m->rates.begin());
    return m;
}

std::unique_ptr<Model> gbdt_from_json(const nlohmann::ordered_json& j);
std::unique_ptr<Model> mlp_from_json(const nlohmann::ordered_json& j);

std::unique_ptr<Model> model_from_json(const nlohmann::ordered_json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (j.at("version").get<int>() != 1)
        throw SchemaError("unsupported model artifact version");
    if (kind == "gbdt") return gbdt_from_json(j);
    if (kind == "mlp") return mlp_from_json(j);
    if (kind == "prior") return prior_from_json(j);
    throw SchemaError("unknown model kind '" + kind + "'");
}

} // namespace occurlens
