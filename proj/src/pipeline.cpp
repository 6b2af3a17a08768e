#include "occurlens/pipeline.hpp"

#include "occurlens/csv.hpp"
#include "occurlens/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace occurlens {

namespace {

// ---------------------------------------------------------------------------
// Small utilities

std::string repr(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

// Per-station, per-component RNG streams derived from the run seed.
enum SeedComponent : std::uint64_t {
    kSeedTuneGbdt = 1,
    kSeedTuneMlp = 2,
    kSeedGbdt = 3,
    kSeedMlp = 4,
    kSeedShap = 10, // + model index
    kSeedPerm = 20, // + model index
};

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw IoError("short write: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec)
        throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

std::string csv_content(const std::vector<std::string>& header,
                        const std::vector<std::vector<std::string>>& rows) {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) s += ',';
        s += header[i];
    }
    s += '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) s += ',';
            s += r[i];
        }
        s += '\n';
    }
    return s;
}

ordered_json read_json_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open: " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    return j;
}

// ---------------------------------------------------------------------------
// Persisted intermediates: <out>/<station>/table.csv + schema.json

void write_table(const fs::path& dir, const FeatureTable& t) {
    ordered_json schema;
    schema["station_id"] = t.station_id;
    schema["features"] = ordered_json::array();
    for (const auto& m : t.meta) {
        ordered_json f;
        f["name"] = m.name;
        f["kind"] = m.kind == FeatureKind::Categorical ? "categorical" : "continuous";
        f["n_classes"] = m.n_classes;
        schema["features"].push_back(f);
    }
    write_atomic(dir / "schema.json", schema.dump(2) + "\n");

    std::vector<std::string> header = {"timestamp"};
    for (const auto& m : t.meta)
        header.push_back(m.name);
    header.push_back("event_count");

    std::string body;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) body += ',';
        body += header[i];
    }
    body += '\n';
    for (std::size_t r = 0; r < t.n_rows(); ++r) {
        body += format_hour_iso(t.timestamps[r]);
        for (std::size_t c = 0; c < t.n_features(); ++c) {
            body += ',';
            if (t.columns[c].present[r])
                body += repr(t.columns[c].values[r]);
        }
        body += ',';
        body += std::to_string(t.event_counts[r]);
        body += '\n';
    }
    write_atomic(dir / "table.csv", body);
}

FeatureTable read_table(const fs::path& dir) {
    const ordered_json schema = read_json_file(dir / "schema.json");
    FeatureTable t;
    t.station_id = schema.at("station_id").get<std::string>();
    for (const auto& f : schema.at("features")) {
        FeatureMeta m;
        m.name = f.at("name").get<std::string>();
        m.kind = f.at("kind").get<std::string>() == "categorical" ? FeatureKind::Categorical
                                                                  : FeatureKind::Continuous;
        m.n_classes = f.at("n_classes").get<int>();
        t.meta.push_back(m);
    }

    const std::string path = (dir / "table.csv").string();
    const CsvTable csv = read_csv(path);
    if (csv.header.size() != t.meta.size() + 2)
        throw SchemaError(path + ": header does not match schema.json");
    const std::size_t n = csv.rows.size();
    t.timestamps.reserve(n);
    t.columns.assign(t.meta.size(), Series{});
    for (auto& col : t.columns) {
        col.values.assign(n, 0.0);
        col.present.assign(n, 0);
    }
    t.event_counts.reserve(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto& row = csv.rows[r];
        t.timestamps.push_back(parse_hour_iso(row[0]));
        for (std::size_t c = 0; c < t.meta.size(); ++c) {
            const std::string& cell = row[c + 1];
            if (cell.empty()) continue;
            t.columns[c].values[r] = parse_double_cell(cell, path, r + 2);
            t.columns[c].present[r] = 1;
        }
        t.event_counts.push_back(parse_int_cell(row.back(), path, r + 2));
    }
    t.labels = binarize_labels(t.event_counts);
    t.validate();
    return t;
}

ordered_json read_stations_index(const RunConfig& cfg) {
    return read_json_file(fs::path(cfg.out_dir) / "stations.json");
}

std::vector<std::string> retained_stations(const RunConfig& cfg) {
    const ordered_json idx = read_stations_index(cfg);
    std::vector<std::string> ids;
    for (const auto& s : idx.at("retained"))
        ids.push_back(s.get<std::string>());
    if (!cfg.only_station.empty()) {
        if (std::find(ids.begin(), ids.end(), cfg.only_station) == ids.end())
            throw DomainError("station not in retained set: " + cfg.only_station);
        ids = {cfg.only_station};
    }
    return ids;
}

// Station index used for seed derivation must not depend on --station.
std::size_t station_ordinal(const RunConfig& cfg, const std::string& id) {
    const ordered_json idx = read_stations_index(cfg);
    std::size_t k = 0;
    for (const auto& s : idx.at("retained")) {
        if (s.get<std::string>() == id) return k;
        ++k;
    }
    throw DomainError("station not in retained set: " + id);
}

// ---------------------------------------------------------------------------
// Split + normalization

FeatureTable subset_rows(const FeatureTable& t, std::size_t lo, std::size_t hi) {
    FeatureTable s;
    s.station_id = t.station_id;
    s.meta = t.meta;
    s.timestamps.assign(t.timestamps.begin() + lo, t.timestamps.begin() + hi);
    for (const auto& col : t.columns) {
        Series c;
        c.values.assign(col.values.begin() + lo, col.values.begin() + hi);
        c.present.assign(col.present.begin() + lo, col.present.begin() + hi);
        s.columns.push_back(std::move(c));
    }
    s.labels.assign(t.labels.begin() + lo, t.labels.begin() + hi);
    s.event_counts.assign(t.event_counts.begin() + lo, t.event_counts.begin() + hi);
    return s;
}

struct SplitData {
    FeatureTable train;
    FeatureTable eval;
    std::vector<ColumnBounds> bounds;
    HourStamp boundary = 0;
};

HourStamp resolve_boundary(const FeatureTable& t, const RunConfig& cfg) {
    if (!cfg.split_boundary.empty())
        return parse_hour_iso(cfg.split_boundary);
    const CivilTime last = from_hour_stamp(t.timestamps.back());
    return to_hour_stamp(CivilTime{last.year, 1, 1, 0});
}

SplitData split_and_normalize(const FeatureTable& full, const RunConfig& cfg) {
    SplitData s;
    s.boundary = resolve_boundary(full, cfg);
    const auto it = std::lower_bound(full.timestamps.begin(), full.timestamps.end(), s.boundary);
    const std::size_t cut = static_cast<std::size_t>(it - full.timestamps.begin());
    if (cut == 0 || cut == full.n_rows())
        throw DomainError("split boundary " + format_hour_iso(s.boundary) +
                          " leaves an empty train or eval set for station " + full.station_id);
    s.train = subset_rows(full, 0, cut);
    s.eval = subset_rows(full, cut, full.n_rows());
    s.bounds = normalize_minmax(s.train);
    apply_bounds(s.eval, s.bounds);
    return s;
}

int category_of(double x, int n_classes) {
    if (n_classes <= 1) return 0;
    return static_cast<int>(std::lround(x * (n_classes - 1)));
}

bool single_class(const std::vector<int>& labels) {
    return std::all_of(labels.begin(), labels.end(), [&](int v) { return v == labels.front(); });
}

// ---------------------------------------------------------------------------
// Stage computations

struct StatsPart {
    CorrMatrix corr;
    std::vector<TestResult> tests;
    std::vector<IvResult> ivs;
};

StatsPart compute_stats(const FeatureTable& train, const RunConfig& cfg) {
    StatsPart p;
    p.corr = pearson_corr_matrix(train, true);
    for (std::size_t c = 0; c < train.n_features(); ++c) {
        const auto& m = train.meta[c];
        const auto& vals = train.columns[c].values;
        if (m.kind == FeatureKind::Categorical) {
            std::vector<int> cats(vals.size());
            for (std::size_t i = 0; i < vals.size(); ++i)
                cats[i] = category_of(vals[i], m.n_classes);
            p.tests.push_back(chi_squared_test(cats, train.labels, m.name));
        } else {
            p.tests.push_back(t_test_two_sample(vals, train.labels, TTestVariant::Welch, m.name));
        }
        const int bins = m.kind == FeatureKind::Categorical ? m.n_classes : cfg.iv_bins;
        p.ivs.push_back(information_value(vals, train.labels, bins, m.kind, m.name));
    }
    return p;
}

std::vector<std::unique_ptr<Model>> train_models(const SplitData& s, const RunConfig& cfg,
                                                 std::size_t si) {
    const Dense train = to_dense(s.train);
    std::vector<std::unique_ptr<Model>> out;
    for (const auto& kind : cfg.models) {
        if (kind == "gbdt") {
            GbdtParams hp = cfg.gbdt;
            if (cfg.tune_budget > 0) {
                hp = tune_random_search(train, SearchSpace{}, ModelKindSel::Gbdt, 3,
                                        cfg.tune_budget, mix_seed(cfg.seed, si, kSeedTuneGbdt))
                         .gbdt;
            }
            out.push_back(train_gbdt(train, hp, mix_seed(cfg.seed, si, kSeedGbdt)));
        } else if (kind == "mlp") {
            MlpParams hp = cfg.mlp;
            if (cfg.tune_budget > 0) {
                hp = tune_random_search(train, SearchSpace{}, ModelKindSel::Mlp, 3,
                                        cfg.tune_budget, mix_seed(cfg.seed, si, kSeedTuneMlp))
                         .mlp;
            }
            out.push_back(train_mlp(train, hp, mix_seed(cfg.seed, si, kSeedMlp)));
        } else if (kind == "prior") {
            out.push_back(fit_prior_from(train));
        } else {
            throw DomainError("unknown model kind: " + kind);
        }
        out.back()->training_span =
            format_hour_iso(s.train.timestamps.front()) + "/" +
            format_hour_iso(s.train.timestamps.back());
    }
    return out;
}

std::vector<double> column_means(const Dense& d) {
    std::vector<double> mu(d.m, 0.0);
    for (std::size_t i = 0; i < d.n; ++i)
        for (std::size_t j = 0; j < d.m; ++j)
            mu[j] += d.row(i)[j];
    for (double& v : mu)
        v /= static_cast<double>(d.n);
    return mu;
}

void explain_model(ModelReport& mr, const Model& model, const Dense& train, const Dense& eval,
                   const RunConfig& cfg, std::size_t si, std::size_t model_index) {
    ShapConfig sc;
    sc.mode = cfg.shap_mode;
    sc.sample_count = cfg.shap_samples;
    sc.background = column_means(train);
    sc.seed = mix_seed(cfg.seed, si, kSeedShap + model_index);
    sc.max_rows = cfg.shap_max_rows;
    mr.shap = mean_shap(model, eval, sc);

    PermConfig pc;
    pc.repeats = cfg.perm_repeats;
    pc.seed = mix_seed(cfg.seed, si, kSeedPerm + model_index);
    mr.perm = permutation_importance(model, eval, pc);
}

void eval_model(ModelReport& mr, const Model& model, const Dense& eval, const RunConfig& cfg) {
    const std::vector<double> scores = model.predict_proba(eval);
    try {
        mr.auc = roc_auc(scores, eval.y);
        mr.roc = roc_curve(scores, eval.y);
    } catch (const DegenerateInputError&) {
        mr.degenerate = true;
        return;
    }
    std::vector<double> prob_zero(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i)
        prob_zero[i] = 1.0 - scores[i];
    mr.precision = precision_curve(prob_zero, eval.y);
    mr.gammas = cfg.gammas;
    for (double g : cfg.gammas)
        mr.gamma_precisions.push_back(gamma_precision(mr.precision, g));
}

// ---------------------------------------------------------------------------
// Report writers (6 significant digits in every report CSV)

void write_corr(const fs::path& dir, const CorrMatrix& corr) {
    std::vector<std::string> header = {"feature"};
    header.insert(header.end(), corr.names.begin(), corr.names.end());
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < corr.names.size(); ++i) {
        std::vector<std::string> row = {corr.names[i]};
        for (double v : corr.r[i])
            row.push_back(format_sig6(v));
        rows.push_back(std::move(row));
    }
    write_atomic(dir / "corr.csv", csv_content(header, rows));
}

void write_tests(const fs::path& dir, const std::vector<TestResult>& tests) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& t : tests)
        rows.push_back({t.feature_name, t.method, format_sig6(t.statistic), format_sig6(t.dof),
                        format_sig6(t.p_value)});
    write_atomic(dir / "tests.csv",
                 csv_content({"feature", "method", "statistic", "dof", "p_value"}, rows));
}

void write_iv(const fs::path& dir, const std::vector<IvResult>& ivs) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : ivs)
        rows.push_back({r.feature_name, format_sig6(r.iv), iv_band_name(r.band),
                        std::to_string(r.bins.size())});
    write_atomic(dir / "iv.csv", csv_content({"feature", "iv", "band", "n_bins"}, rows));
}

void write_bounds(const fs::path& dir, const std::vector<ColumnBounds>& bounds) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& b : bounds)
        rows.push_back({b.name, repr(b.min), repr(b.max)});
    write_atomic(dir / "bounds.csv", csv_content({"feature", "min", "max"}, rows));
}

void write_model(const fs::path& dir, const std::string& kind, const ordered_json& j) {
    write_atomic(dir / ("model_" + kind + ".json"), j.dump(2) + "\n");
}

void write_shap(const fs::path& dir, const std::vector<ModelReport>& models) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : models)
        for (const auto& f : m.shap.features)
            rows.push_back({m.kind, f.feature, format_sig6(f.mean_abs_shap),
                            format_sig6(f.mean_signed_shap)});
    write_atomic(dir / "shap.csv",
                 csv_content({"model", "feature", "mean_abs_shap", "mean_signed_shap"}, rows));
}

void write_perm(const fs::path& dir, const std::vector<ModelReport>& models) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : models)
        for (std::size_t i = 0; i < m.perm.features.size(); ++i)
            rows.push_back({m.kind, m.perm.features[i], format_sig6(m.perm.mean[i]),
                            format_sig6(m.perm.stddev[i])});
    write_atomic(dir / "perm.csv",
                 csv_content({"model", "feature", "importance_mean", "importance_std"}, rows));
}

void write_roc(const fs::path& dir, const std::vector<ModelReport>& models) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : models)
        for (const auto& p : m.roc)
            rows.push_back({m.kind, format_sig6(p.fpr), format_sig6(p.tpr)});
    write_atomic(dir / "roc.csv", csv_content({"model", "fpr", "tpr"}, rows));
}

void write_precision_curve(const fs::path& dir, const std::vector<ModelReport>& models) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& m : models)
        for (std::size_t i = 0; i < m.precision.thresholds.size(); ++i)
            rows.push_back({m.kind, format_sig6(m.precision.thresholds[i]),
                            format_sig6(m.precision.precision[i]),
                            format_sig6(m.precision.frac_predicted_zero[i])});
    write_atomic(dir / "precision_curve.csv",
                 csv_content({"model", "threshold", "precision", "frac_predicted_zero"}, rows));
}

void write_metrics(const fs::path& dir, const StationReport& st) {
    ordered_json j;
    j["station_id"] = st.station_id;
    j["degenerate"] = st.degenerate;
    j["split_boundary"] = st.split_boundary;
    j["n_train"] = st.n_train;
    j["n_eval"] = st.n_eval;
    j["models"] = ordered_json::object();
    for (const auto& m : st.models) {
        ordered_json mj;
        mj["degenerate"] = m.degenerate;
        if (!m.degenerate) {
            mj["auc"] = m.auc;
            mj["gamma_precision"] = ordered_json::array();
            for (std::size_t i = 0; i < m.gammas.size(); ++i) {
                ordered_json g;
                g["gamma"] = m.gammas[i];
                g["feasible"] = m.gamma_precisions[i].feasible;
                if (m.gamma_precisions[i].feasible) {
                    g["p_star"] = m.gamma_precisions[i].p_star;
                    g["c"] = m.gamma_precisions[i].achieving_c;
                }
                mj["gamma_precision"].push_back(g);
            }
            mj["perm_degenerate"] = m.perm.degenerate;
        }
        j["models"][m.kind] = mj;
    }
    j["warnings"] = st.warnings;
    write_atomic(dir / "metrics.json", j.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Full per-station computation (the "all" path)

StationReport compute_station(const FeatureTable& full, const RunConfig& cfg, std::size_t si,
                              std::vector<std::unique_ptr<Model>>* models_out) {
    StationReport st;
    st.station_id = full.station_id;
    const SplitData s = split_and_normalize(full, cfg);
    st.split_boundary = format_hour_iso(s.boundary);
    st.n_train = s.train.n_rows();
    st.n_eval = s.eval.n_rows();

    if (single_class(s.train.labels)) {
        st.degenerate = true;
        st.warnings.push_back("single-class training labels; models and stats skipped");
        return st;
    }

    const StatsPart stats = compute_stats(s.train, cfg);
    st.corr = stats.corr;
    st.tests = stats.tests;
    st.ivs = stats.ivs;
    for (const auto& w : st.corr.warnings)
        st.warnings.push_back(w);

    auto trained = train_models(s, cfg, si);
    const Dense train = to_dense(s.train);
    const Dense eval = to_dense(s.eval);
    const bool eval_degenerate = single_class(s.eval.labels);
    if (eval_degenerate) {
        st.degenerate = true;
        st.warnings.push_back("single-class evaluation labels; metrics degenerate");
    }
    for (std::size_t k = 0; k < trained.size(); ++k) {
        ModelReport mr;
        mr.kind = trained[k]->kind();
        mr.model_json = trained[k]->to_json();
        if (!eval_degenerate) {
            explain_model(mr, *trained[k], train, eval, cfg, si, k);
            eval_model(mr, *trained[k], eval, cfg);
        } else {
            mr.degenerate = true;
        }
        st.models.push_back(std::move(mr));
    }
    if (models_out)
        *models_out = std::move(trained);
    return st;
}

void emit_station(const fs::path& dir, const StationReport& st) {
    fs::create_directories(dir);
    write_corr(dir, st.corr);
    write_tests(dir, st.tests);
    write_iv(dir, st.ivs);
    for (const auto& m : st.models)
        if (!m.model_json.is_null())
            write_model(dir, m.kind, m.model_json);
    write_shap(dir, st.models);
    write_perm(dir, st.models);
    write_roc(dir, st.models);
    write_precision_curve(dir, st.models);
    write_metrics(dir, st);
}

ordered_json build_manifest(const RunConfig& cfg, const std::vector<StationReport>& stations) {
    ordered_json m;
    m["tool"] = "occurlens";
    m["version"] = "0.1.0";
    m["config_hash"] = hex64(fnv1a64(cfg.canonical.dump()));
    m["config"] = cfg.canonical;
    m["stations"] = ordered_json::array();
    m["degenerate_stations"] = ordered_json::array();
    for (const auto& st : stations) {
        m["stations"].push_back(st.station_id);
        if (st.degenerate)
            m["degenerate_stations"].push_back(st.station_id);
    }
    m["models"] = cfg.models;
    m["notes"] = ordered_json::array();
    const std::set<std::string> requested(cfg.models.begin(), cfg.models.end());
    if (requested != std::set<std::string>{"gbdt", "mlp", "prior"})
        m["notes"].push_back("models restricted to the configured subset");
    if (!cfg.only_station.empty())
        m["notes"].push_back("run restricted to station " + cfg.only_station);
    return m;
}

int thread_cap() {
    const char* env = std::getenv("OCCURLENS_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
}

template <typename Fn>
void for_each_station(const std::vector<std::string>& ids, Fn&& fn) {
    const int cap = std::min<int>(thread_cap(), static_cast<int>(ids.size()));
    if (cap <= 1) {
        for (std::size_t i = 0; i < ids.size(); ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cap));
    for (int w = 0; w < cap; ++w) {
        pool.emplace_back([&, w] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= ids.size()) return;
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace

// ---------------------------------------------------------------------------
// Config

void RunConfig::validate() const {
    if (out_dir.empty())
        throw DomainError("out_dir must be set");
    if (models.empty())
        throw DomainError("models list must not be empty");
    for (const auto& m : models)
        if (m != "gbdt" && m != "mlp" && m != "prior")
            throw DomainError("unknown model kind: " + m);
    if (!(station_filter_threshold > 0.0))
        throw DomainError("station_filter_threshold must be positive");
    for (double g : gammas)
        if (g < 0.0 || g >= 1.0)
            throw DomainError("gamma must lie in [0, 1)");
    if (iv_bins < 2)
        throw DomainError("iv_bins must be >= 2");
    if (perm_repeats < 1)
        throw DomainError("perm_repeats must be >= 1");
    if (!split_boundary.empty())
        parse_hour_iso(split_boundary); // throws on malformed input
    if (synthetic) {
        scenario.validate();
    } else {
        for (const std::string* p : {&paths.stations_csv, &paths.sensors_csv,
                                     &paths.readings_csv, &paths.events_csv}) {
            if (p->empty())
                throw DomainError("csv source requires stations/sensors/readings/events paths");
            if (!fs::exists(*p))
                throw DomainError("input path not found: " + *p);
        }
    }
    Hyperparams hp;
    hp.gbdt = gbdt;
    hp.mlp = mlp;
    hp.validate();
}

RunConfig parse_run_config(const ordered_json& j) {
    if (!j.is_object())
        throw DomainError("config must be a JSON object");
    if (!j.contains("seed"))
        throw DomainError("config requires a seed");
    RunConfig cfg;
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.out_dir = j.value("out_dir", cfg.out_dir);

    const ordered_json source = j.value("source", ordered_json{{"type", "synth"}});
    const std::string type = source.value("type", std::string("synth"));
    if (type == "synth") {
        cfg.synthetic = true;
        const std::size_t n_hours = source.value("n_hours", std::size_t{52560});
        const std::uint64_t sseed = source.value("scenario_seed", cfg.seed);
        cfg.scenario = default_diurnal_scenario(n_hours, sseed);
        if (source.contains("station_id"))
            cfg.scenario.station_id = source.at("station_id").get<std::string>();
    } else if (type == "csv") {
        cfg.synthetic = false;
        cfg.paths.stations_csv = source.at("stations").get<std::string>();
        cfg.paths.sensors_csv = source.at("sensors").get<std::string>();
        cfg.paths.readings_csv = source.at("readings").get<std::string>();
        cfg.paths.events_csv = source.at("events").get<std::string>();
        cfg.paths.travel_time_csv = source.value("travel_time", std::string{});
    } else {
        throw DomainError("source.type must be synth or csv");
    }

    cfg.station_filter_threshold = j.value("station_filter_threshold", cfg.station_filter_threshold);
    cfg.split_boundary = j.value("split_boundary", cfg.split_boundary);
    if (j.contains("models"))
        cfg.models = j.at("models").get<std::vector<std::string>>();
    cfg.tune_budget = j.value("tune_budget", cfg.tune_budget);
    cfg.iv_bins = j.value("iv_bins", cfg.iv_bins);

    const ordered_json shap = j.value("shap", ordered_json::object());
    const std::string mode = shap.value("mode", std::string("exact"));
    if (mode == "exact")
        cfg.shap_mode = ShapMode::Exact;
    else if (mode == "sampled")
        cfg.shap_mode = ShapMode::Sampled;
    else
        throw DomainError("shap.mode must be exact or sampled");
    cfg.shap_samples = shap.value("samples", cfg.shap_samples);
    cfg.shap_max_rows = shap.value("max_rows", cfg.shap_max_rows);
    cfg.perm_repeats = j.value("perm_repeats", cfg.perm_repeats);
    if (j.contains("gammas"))
        cfg.gammas = j.at("gammas").get<std::vector<double>>();

    const ordered_json hp = j.value("hyperparams", ordered_json::object());
    if (hp.contains("gbdt")) {
        const auto& g = hp.at("gbdt");
        cfg.gbdt.n_trees = g.value("n_trees", cfg.gbdt.n_trees);
        cfg.gbdt.max_depth = g.value("max_depth", cfg.gbdt.max_depth);
        cfg.gbdt.learning_rate = g.value("learning_rate", cfg.gbdt.learning_rate);
        cfg.gbdt.l2_lambda = g.value("l2_lambda", cfg.gbdt.l2_lambda);
        cfg.gbdt.min_child_weight = g.value("min_child_weight", cfg.gbdt.min_child_weight);
    }
    if (hp.contains("mlp")) {
        const auto& m = hp.at("mlp");
        if (m.contains("layers"))
            cfg.mlp.layers = m.at("layers").get<std::vector<int>>();
        cfg.mlp.dropout = m.value("dropout", cfg.mlp.dropout);
        cfg.mlp.learning_rate = m.value("learning_rate", cfg.mlp.learning_rate);
        cfg.mlp.batch_size = m.value("batch_size", cfg.mlp.batch_size);
        cfg.mlp.max_epochs = m.value("max_epochs", cfg.mlp.max_epochs);
        cfg.mlp.patience = m.value("patience", cfg.mlp.patience);
    }

    // Canonical document: every effective value, in a fixed key order.
    ordered_json c;
    c["seed"] = cfg.seed;
    c["out_dir"] = cfg.out_dir;
    if (cfg.synthetic) {
        c["source"] = {{"type", "synth"},
                       {"n_hours", cfg.scenario.n_hours},
                       {"scenario_seed", cfg.scenario.seed},
                       {"station_id", cfg.scenario.station_id}};
    } else {
        c["source"] = {{"type", "csv"},
                       {"stations", cfg.paths.stations_csv},
                       {"sensors", cfg.paths.sensors_csv},
                       {"readings", cfg.paths.readings_csv},
                       {"events", cfg.paths.events_csv},
                       {"travel_time", cfg.paths.travel_time_csv}};
    }
    c["station_filter_threshold"] = cfg.station_filter_threshold;
    c["split_boundary"] = cfg.split_boundary;
    c["models"] = cfg.models;
    c["tune_budget"] = cfg.tune_budget;
    c["iv_bins"] = cfg.iv_bins;
    c["shap"] = {{"mode", cfg.shap_mode == ShapMode::Exact ? "exact" : "sampled"},
                 {"samples", cfg.shap_samples},
                 {"max_rows", cfg.shap_max_rows}};
    c["perm_repeats"] = cfg.perm_repeats;
    c["gammas"] = cfg.gammas;
    c["hyperparams"] = {
        {"gbdt",
         {{"n_trees", cfg.gbdt.n_trees},
          {"max_depth", cfg.gbdt.max_depth},
          {"learning_rate", cfg.gbdt.learning_rate},
          {"l2_lambda", cfg.gbdt.l2_lambda},
          {"min_child_weight", cfg.gbdt.min_child_weight}}},
        {"mlp",
         {{"layers", cfg.mlp.layers},
          {"dropout", cfg.mlp.dropout},
          {"learning_rate", cfg.mlp.learning_rate},
          {"batch_size", cfg.mlp.batch_size},
          {"max_epochs", cfg.mlp.max_epochs},
          {"patience", cfg.mlp.patience}}}};
    cfg.canonical = std::move(c);
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    return parse_run_config(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Stages

void stage_source(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    ordered_json idx;
    idx["source"] = cfg.synthetic ? "synth" : "csv";
    idx["threshold"] = cfg.station_filter_threshold;
    idx["retained"] = ordered_json::array();
    idx["filtered_out"] = ordered_json::array();

    if (cfg.synthetic) {
        const FeatureTable t = generate(cfg.scenario);
        const fs::path dir = fs::path(cfg.out_dir) / t.station_id;
        fs::create_directories(dir);
        write_table(dir, t);
        idx["retained"].push_back(t.station_id);
    } else {
        const StationCatalog catalog = load_catalog(cfg.paths);
        const auto stats = station_stats_from_events(cfg.paths.events_csv, catalog);
        const auto retained = filter_stations(stats, cfg.station_filter_threshold);
        for (const auto& s : stats) {
            if (std::find(retained.begin(), retained.end(), s.station_id) == retained.end())
                idx["filtered_out"].push_back(
                    {{"station_id", s.station_id}, {"pct_multi_hours", s.pct_multi_hours}});
        }
        for (const auto& id : retained) {
            if (!cfg.only_station.empty() && id != cfg.only_station) {
                idx["retained"].push_back(id);
                continue;
            }
            const FeatureTable t = load_feature_table(cfg.paths, catalog, id);
            const fs::path dir = fs::path(cfg.out_dir) / id;
            fs::create_directories(dir);
            write_table(dir, t);
            idx["retained"].push_back(id);
        }
    }
    write_atomic(fs::path(cfg.out_dir) / "stations.json", idx.dump(2) + "\n");
}

void stage_stats(const RunConfig& cfg) {
    const auto ids = retained_stations(cfg);
    for_each_station(ids, [&](std::size_t i) {
        const fs::path dir = fs::path(cfg.out_dir) / ids[i];
        const FeatureTable full = read_table(dir);
        const SplitData s = split_and_normalize(full, cfg);
        if (single_class(s.train.labels)) {
            write_corr(dir, CorrMatrix{});
            write_tests(dir, {});
            write_iv(dir, {});
            return;
        }
        const StatsPart p = compute_stats(s.train, cfg);
        write_corr(dir, p.corr);
        write_tests(dir, p.tests);
        write_iv(dir, p.ivs);
    });
}

void stage_train(const RunConfig& cfg) {
    const auto ids = retained_stations(cfg);
    for_each_station(ids, [&](std::size_t i) {
        const fs::path dir = fs::path(cfg.out_dir) / ids[i];
        const FeatureTable full = read_table(dir);
        const SplitData s = split_and_normalize(full, cfg);
        write_bounds(dir, s.bounds);
        if (single_class(s.train.labels))
            return;
        const std::size_t si = station_ordinal(cfg, ids[i]);
        const auto models = train_models(s, cfg, si);
        for (const auto& m : models)
            write_model(dir, m->kind(), m->to_json());
    });
}

namespace {

std::vector<std::unique_ptr<Model>> load_models(const fs::path& dir, const RunConfig& cfg) {
    std::vector<std::unique_ptr<Model>> out;
    for (const auto& kind : cfg.models) {
        const fs::path p = dir / ("model_" + kind + ".json");
        if (!fs::exists(p))
            throw IoError("missing model file (run the train stage first): " + p.string());
        out.push_back(model_from_json(read_json_file(p)));
    }
    return out;
}

} // namespace

void stage_explain(const RunConfig& cfg) {
    const auto ids = retained_stations(cfg);
    for_each_station(ids, [&](std::size_t i) {
        const fs::path dir = fs::path(cfg.out_dir) / ids[i];
        const FeatureTable full = read_table(dir);
        const SplitData s = split_and_normalize(full, cfg);
        std::vector<ModelReport> reports;
        if (!single_class(s.train.labels) && !single_class(s.eval.labels)) {
            const std::size_t si = station_ordinal(cfg, ids[i]);
            const auto models = load_models(dir, cfg);
            const Dense train = to_dense(s.train);
            const Dense eval = to_dense(s.eval);
            for (std::size_t k = 0; k < models.size(); ++k) {
                ModelReport mr;
                mr.kind = models[k]->kind();
                explain_model(mr, *models[k], train, eval, cfg, si, k);
                reports.push_back(std::move(mr));
            }
        }
        write_shap(dir, reports);
        write_perm(dir, reports);
    });
}

void stage_eval(const RunConfig& cfg) {
    const auto ids = retained_stations(cfg);
    for_each_station(ids, [&](std::size_t i) {
        const fs::path dir = fs::path(cfg.out_dir) / ids[i];
        const FeatureTable full = read_table(dir);
        const SplitData s = split_and_normalize(full, cfg);
        StationReport st;
        st.station_id = full.station_id;
        st.split_boundary = format_hour_iso(s.boundary);
        st.n_train = s.train.n_rows();
        st.n_eval = s.eval.n_rows();
        if (single_class(s.train.labels)) {
            st.degenerate = true;
            st.warnings.push_back("single-class training labels; models and stats skipped");
        } else {
            const bool eval_degenerate = single_class(s.eval.labels);
            if (eval_degenerate) {
                st.degenerate = true;
                st.warnings.push_back("single-class evaluation labels; metrics degenerate");
            }
            const auto models = load_models(dir, cfg);
            const Dense eval = to_dense(s.eval);
            for (const auto& m : models) {
                ModelReport mr;
                mr.kind = m->kind();
                if (eval_degenerate)
                    mr.degenerate = true;
                else
                    eval_model(mr, *m, eval, cfg);
                st.models.push_back(std::move(mr));
            }
        }
        write_metrics(dir, st);
        write_roc(dir, st.models);
        write_precision_curve(dir, st.models);
    });
}

void stage_report(const RunConfig& cfg) {
    const auto ids = retained_stations(cfg);
    std::vector<StationReport> stations;
    for (const auto& id : ids) {
        StationReport st;
        st.station_id = id;
        const fs::path mj = fs::path(cfg.out_dir) / id / "metrics.json";
        if (fs::exists(mj))
            st.degenerate = read_json_file(mj).value("degenerate", false);
        stations.push_back(std::move(st));
    }
    write_atomic(fs::path(cfg.out_dir) / "manifest.json",
                 build_manifest(cfg, stations).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// End-to-end

ReportBundle run_pipeline(const RunConfig& cfg) {
    stage_source(cfg);
    const auto ids = retained_stations(cfg);
    ReportBundle bundle;
    bundle.stations.resize(ids.size());
    for_each_station(ids, [&](std::size_t i) {
        const fs::path dir = fs::path(cfg.out_dir) / ids[i];
        const FeatureTable full = read_table(dir);
        const std::size_t si = station_ordinal(cfg, ids[i]);
        bundle.stations[i] = compute_station(full, cfg, si, nullptr);
        const SplitData s = split_and_normalize(full, cfg);
        write_bounds(dir, s.bounds);
        emit_station(dir, bundle.stations[i]);
    });
    bundle.manifest = build_manifest(cfg, bundle.stations);
    write_atomic(fs::path(cfg.out_dir) / "manifest.json", bundle.manifest.dump(2) + "\n");
    return bundle;
}

void emit_report(const ReportBundle& bundle, const std::string& out_dir) {
    fs::create_directories(out_dir);
    for (const auto& st : bundle.stations)
        emit_station(fs::path(out_dir) / st.station_id, st);
    write_atomic(fs::path(out_dir) / "manifest.json", bundle.manifest.dump(2) + "\n");
}

} // namespace occurlens
