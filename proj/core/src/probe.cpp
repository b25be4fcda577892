#include "taxoprobe/probe.hpp"

#include "taxoprobe/tsv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace taxoprobe {

FeatureVector flatten(const AttentionMatrix &matrix, int label) {
    FeatureVector v;
    v.values.assign(matrix.values.begin(), matrix.values.end());
    v.label = label;
    v.example_id = matrix.example_id;
    return v;
}

AttentionMatrix reshape(const FeatureVector &v, std::uint32_t layers, std::uint32_t heads) {
    if (v.values.size() != static_cast<std::size_t>(layers) * heads)
        throw std::invalid_argument("reshape: size mismatch");
    AttentionMatrix m;
    m.layers = layers;
    m.heads = heads;
    m.example_id = v.example_id;
    m.values.resize(v.values.size());
    for (std::size_t i = 0; i < v.values.size(); ++i)
        m.values[i] = static_cast<float>(v.values[i]);
    return m;
}

std::vector<double> ProbeModel::logits(const std::vector<double> &x) const {
    if (x.size() != n_features) throw std::invalid_argument("logits: feature size mismatch");
    std::vector<double> z(n_classes, 0.0);
    for (int k = 0; k < n_classes; ++k) {
        const double *w = weights.data() + static_cast<std::size_t>(k) * n_features;
        double dot = bias[k];
        for (std::size_t j = 0; j < n_features; ++j) dot += w[j] * x[j];
        z[k] = dot;
    }
    return z;
}

int ProbeModel::predict(const std::vector<double> &x) const {
    const auto z = logits(x);
    std::size_t best = 0;
    for (std::size_t k = 1; k < z.size(); ++k) {
        if (z[k] > z[best]) best = k;
    }
    return class_ids[best];
}

namespace {

std::size_t param_count(std::size_t n_classes, std::size_t n_features) {
    return n_classes * n_features + n_classes;
}

// index of a label within class_ids
int class_position(const std::vector<int> &class_ids, int label) {
    for (std::size_t k = 0; k < class_ids.size(); ++k) {
        if (class_ids[k] == label) return static_cast<int>(k);
    }
    throw std::invalid_argument("label " + std::to_string(label) +
                                " not present in trained classes");
}

} // namespace

double probe_objective(const std::vector<FeatureVector> &data, const std::vector<int> &class_ids,
                       std::size_t n_features, double c, const std::vector<double> &params) {
    const std::size_t k_classes = class_ids.size();
    const double *w = params.data();
    const double *b = params.data() + k_classes * n_features;

    double penalty = 0.0;
    for (std::size_t i = 0; i < k_classes * n_features; ++i) penalty += w[i] * w[i];
    penalty *= 0.5;

    double loss = 0.0;
    std::vector<double> z(k_classes);
    for (const auto &row : data) {
        double zmax = -HUGE_VAL;
        for (std::size_t k = 0; k < k_classes; ++k) {
            const double *wk = w + k * n_features;
            double dot = b[k];
            for (std::size_t j = 0; j < n_features; ++j) dot += wk[j] * row.values[j];
            z[k] = dot;
            zmax = std::max(zmax, dot);
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < k_classes; ++k) sum += std::exp(z[k] - zmax);
        const double lse = zmax + std::log(sum);
        loss += lse - z[static_cast<std::size_t>(class_position(class_ids, row.label))];
    }
    return penalty + c * loss;
}

void probe_gradient(const std::vector<FeatureVector> &data, const std::vector<int> &class_ids,
                    std::size_t n_features, double c, const std::vector<double> &params,
                    std::vector<double> *grad) {
    const std::size_t k_classes = class_ids.size();
    const double *w = params.data();
    const double *b = params.data() + k_classes * n_features;

    grad->assign(params.size(), 0.0);
    double *gw = grad->data();
    double *gb = grad->data() + k_classes * n_features;
    for (std::size_t i = 0; i < k_classes * n_features; ++i) gw[i] = w[i];

    std::vector<double> z(k_classes), p(k_classes);
    for (const auto &row : data) {
        double zmax = -HUGE_VAL;
        for (std::size_t k = 0; k < k_classes; ++k) {
            const double *wk = w + k * n_features;
            double dot = b[k];
            for (std::size_t j = 0; j < n_features; ++j) dot += wk[j] * row.values[j];
            z[k] = dot;
            zmax = std::max(zmax, dot);
        }
        double sum = 0.0;
        for (std::size_t k = 0; k < k_classes; ++k) {
            p[k] = std::exp(z[k] - zmax);
            sum += p[k];
        }
        const auto y = static_cast<std::size_t>(class_position(class_ids, row.label));
        for (std::size_t k = 0; k < k_classes; ++k) {
            const double coef = c * (p[k] / sum - (k == y ? 1.0 : 0.0));
            double *gwk = gw + k * n_features;
            for (std::size_t j = 0; j < n_features; ++j) gwk[j] += coef * row.values[j];
            gb[k] += coef;
        }
    }
}

namespace {

double max_abs(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Canonical row order: training must not depend on how callers shuffled the
// data, so gradient sums always run over the same sequence.
std::vector<FeatureVector> canonical_order(const std::vector<FeatureVector> &data) {
    std::vector<FeatureVector> sorted = data;
    std::sort(sorted.begin(), sorted.end(), [](const FeatureVector &a, const FeatureVector &b) {
        if (a.example_id != b.example_id) return a.example_id < b.example_id;
        if (a.label != b.label) return a.label < b.label;
        return a.values < b.values;
    });
    return sorted;
}

} // namespace

ProbeModel train(const std::vector<FeatureVector> &data, const ProbeConfig &config,
                 TrainTrace *trace) {
    if (data.empty()) throw std::invalid_argument("train: empty data");
    if (config.c <= 0.0) throw std::invalid_argument("train: C must be positive");

    const std::size_t n_features = data[0].values.size();
    std::set<int> labels;
    for (const auto &row : data) {
        if (row.values.size() != n_features)
            throw std::invalid_argument("train: inconsistent feature dimensions");
        labels.insert(row.label);
    }
    if (labels.size() < 2) throw std::invalid_argument("train: need at least two classes");

    const std::vector<int> class_ids(labels.begin(), labels.end());
    const std::size_t k_classes = class_ids.size();
    const auto rows = canonical_order(data);

    std::vector<double> x(param_count(k_classes, n_features), 0.0);
    std::vector<double> g, g_new, d, x_new;
    probe_gradient(rows, class_ids, n_features, config.c, x, &g);
    double fx = probe_objective(rows, class_ids, n_features, config.c, x);

    TrainTrace local_trace;
    local_trace.objective.push_back(fx);

    // L-BFGS with an Armijo backtracking line search; the sufficient
    // decrease condition keeps the objective non-increasing.
    constexpr std::size_t history = 10;
    constexpr double armijo_c1 = 1e-4;
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    int iter = 0;
    bool converged = max_abs(g) <= config.tolerance;
    while (!converged && iter < config.max_iterations) {
        // two-loop recursion
        d = g;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t i = s_hist.size(); i-- > 0;) {
            alpha[i] = rho_hist[i] * dot(s_hist[i], d);
            for (std::size_t j = 0; j < d.size(); ++j) d[j] -= alpha[i] * y_hist[i][j];
        }
        if (!s_hist.empty()) {
            const double gamma =
                dot(s_hist.back(), y_hist.back()) / dot(y_hist.back(), y_hist.back());
            for (double &v : d) v *= gamma;
        }
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * dot(y_hist[i], d);
            for (std::size_t j = 0; j < d.size(); ++j) d[j] += s_hist[i][j] * (alpha[i] - beta);
        }
        for (double &v : d) v = -v;

        double gd = dot(g, d);
        if (gd >= 0.0) { // not a descent direction; fall back to steepest descent
            for (std::size_t j = 0; j < d.size(); ++j) d[j] = -g[j];
            gd = dot(g, d);
        }

        double step = (iter == 0) ? std::min(1.0, 1.0 / std::max(1.0, max_abs(g))) : 1.0;
        double fx_new = fx;
        x_new = x;
        bool improved = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t j = 0; j < x.size(); ++j) x_new[j] = x[j] + step * d[j];
            fx_new = probe_objective(rows, class_ids, n_features, config.c, x_new);
            if (fx_new <= fx + armijo_c1 * step * gd) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break; // no further progress representable

        probe_gradient(rows, class_ids, n_features, config.c, x_new, &g_new);

        std::vector<double> s(x.size()), y(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            s[j] = x_new[j] - x[j];
            y[j] = g_new[j] - g[j];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > history) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }

        x.swap(x_new);
        g.swap(g_new);
        fx = fx_new;
        ++iter;
        local_trace.objective.push_back(fx);
        converged = max_abs(g) <= config.tolerance;
    }

    local_trace.iterations = iter;
    local_trace.converged = converged;
    if (trace) *trace = local_trace;

    ProbeModel model;
    model.n_classes = static_cast<int>(k_classes);
    model.n_features = n_features;
    model.class_ids = class_ids;
    model.weights.assign(x.begin(), x.begin() + static_cast<long>(k_classes * n_features));
    model.bias.assign(x.begin() + static_cast<long>(k_classes * n_features), x.end());
    return model;
}

ProbeResult evaluate(const ProbeModel &model, const std::vector<FeatureVector> &test) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    const std::size_t k = static_cast<std::size_t>(model.n_classes);

    ProbeResult result;
    result.class_ids = model.class_ids;
    result.confusion.assign(k * k, 0);
    result.n_test = test.size();

    std::size_t correct = 0;
    for (const auto &row : test) {
        const int truth = class_position(model.class_ids, row.label);
        const int pred = class_position(model.class_ids, model.predict(row.values));
        ++result.confusion[static_cast<std::size_t>(truth) * k + static_cast<std::size_t>(pred)];
        if (truth == pred) ++correct;
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());

    result.precision.assign(k, 0.0);
    result.recall.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uint64_t row_sum = 0, col_sum = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row_sum += result.confusion[i * k + j];
            col_sum += result.confusion[j * k + i];
        }
        const auto diag = result.confusion[i * k + i];
        result.recall[i] = row_sum ? static_cast<double>(diag) / row_sum : 0.0;
        result.precision[i] = col_sum ? static_cast<double>(diag) / col_sum : 0.0;
    }
    return result;
}

void stratified_split(const std::vector<FeatureVector> &data, double train_fraction,
                      std::uint64_t seed, std::vector<FeatureVector> *train,
                      std::vector<FeatureVector> *test) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("train fraction must be in (0,1)");
    train->clear();
    test->clear();

    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < data.size(); ++i) by_label[data[i].label].push_back(i);

    for (auto &[label, indices] : by_label) {
        std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            return data[a].example_id < data[b].example_id;
        });
        // per-label engine: each label's partition is identical no matter
        // which other labels participate in the experiment
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(label)};
        std::mt19937_64 gen(seq);
        std::shuffle(indices.begin(), indices.end(), gen);
        const std::size_t n_train =
            static_cast<std::size_t>(train_fraction * static_cast<double>(indices.size()));
        for (std::size_t i = 0; i < indices.size(); ++i) {
            (i < n_train ? train : test)->push_back(data[indices[i]]);
        }
    }
}

namespace {

struct ExperimentSpec {
    std::string name;
    std::vector<int> labels;
};

const std::vector<ExperimentSpec> &experiment_specs() {
    static const std::vector<ExperimentSpec> specs = {
        {"All three", {0, 1, 2}},
        {"Pos. vs. Neg.", {0, 1}},
        {"Pos. vs. Sisters", {0, 2}},
        {"Neg. vs. Sisters", {1, 2}},
    };
    return specs;
}

ProbeResult run_one(const std::vector<FeatureVector> &subset, const std::string &name,
                    const ProbeConfig &config) {
    std::vector<FeatureVector> train_rows, test_rows;
    stratified_split(subset, config.train_fraction, config.split_seed, &train_rows, &test_rows);
    ProbeModel model = train(train_rows, config);
    ProbeResult result = evaluate(model, test_rows);
    result.experiment = name;
    result.n_train = train_rows.size();
    result.seed = config.split_seed;
    return result;
}

ProbeResult run_cv(const std::vector<FeatureVector> &subset, const std::string &name,
                   const ProbeConfig &config) {
    const int folds = config.cv_folds;
    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < subset.size(); ++i) by_label[subset[i].label].push_back(i);

    std::vector<int> fold_of(subset.size(), 0);
    for (auto &[label, indices] : by_label) {
        std::sort(indices.begin(), indices.end(), [&](std::size_t a, std::size_t b) {
            return subset[a].example_id < subset[b].example_id;
        });
        std::seed_seq seq{static_cast<std::uint32_t>(config.split_seed),
                          static_cast<std::uint32_t>(config.split_seed >> 32),
                          static_cast<std::uint32_t>(label)};
        std::mt19937_64 gen(seq);
        std::shuffle(indices.begin(), indices.end(), gen);
        for (std::size_t i = 0; i < indices.size(); ++i)
            fold_of[indices[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    }

    ProbeResult agg;
    agg.experiment = name + " (cv)";
    agg.seed = config.split_seed;
    std::size_t correct = 0;
    for (int f = 0; f < folds; ++f) {
        std::vector<FeatureVector> train_rows, test_rows;
        for (std::size_t i = 0; i < subset.size(); ++i)
            (fold_of[i] == f ? test_rows : train_rows).push_back(subset[i]);
        if (test_rows.empty() || train_rows.empty()) continue;
        ProbeModel model = train(train_rows, config);
        ProbeResult r = evaluate(model, test_rows);
        if (agg.confusion.empty()) {
            agg.class_ids = r.class_ids;
            agg.confusion.assign(r.confusion.size(), 0);
        }
        const std::size_t kk = r.class_ids.size();
        for (std::size_t i = 0; i < r.confusion.size(); ++i) agg.confusion[i] += r.confusion[i];
        for (std::size_t i = 0; i < kk; ++i) correct += r.confusion[i * kk + i];
        agg.n_test += r.n_test;
        agg.n_train = train_rows.size();
    }
    agg.accuracy = agg.n_test ? static_cast<double>(correct) / static_cast<double>(agg.n_test) : 0.0;
    const std::size_t k = agg.class_ids.size();
    agg.precision.assign(k, 0.0);
    agg.recall.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        std::uint64_t row_sum = 0, col_sum = 0;
        for (std::size_t j = 0; j < k; ++j) {
            row_sum += agg.confusion[i * k + j];
            col_sum += agg.confusion[j * k + i];
        }
        const auto diag = agg.confusion[i * k + i];
        agg.recall[i] = row_sum ? static_cast<double>(diag) / row_sum : 0.0;
        agg.precision[i] = col_sum ? static_cast<double>(diag) / col_sum : 0.0;
    }
    return agg;
}

} // namespace

std::vector<ProbeResult> run_experiments(const MatrixStoreReader &store,
                                         const ProbeConfig &config) {
    for (SetLabel label : {SetLabel::positive, SetLabel::negative, SetLabel::sister}) {
        if (!store.has_set(label))
            throw StoreError(std::string("store is missing the ") + to_string(label) + " set");
    }

    std::vector<FeatureVector> all;
    for (const auto &entry : store.select(std::nullopt, std::nullopt, config.direction)) {
        all.push_back(flatten(store.read(entry), static_cast<int>(entry.set_label)));
    }

    std::vector<ProbeResult> results;
    for (const auto &spec : experiment_specs()) {
        std::vector<FeatureVector> subset;
        for (const auto &row : all) {
            if (std::find(spec.labels.begin(), spec.labels.end(), row.label) != spec.labels.end())
                subset.push_back(row);
        }
        results.push_back(run_one(subset, spec.name, config));
        if (config.cv_folds > 1) results.push_back(run_cv(subset, spec.name, config));
    }
    return results;
}

void write_results_tsv(const std::vector<ProbeResult> &results, const std::string &path) {
    std::string out = "experiment\taccuracy\tn_train\tn_test\tseed\n";
    char buf[64];
    for (const auto &r : results) {
        std::snprintf(buf, sizeof buf, "%.6f", r.accuracy);
        out += r.experiment;
        out += '\t';
        out += buf;
        out += '\t';
        out += std::to_string(r.n_train);
        out += '\t';
        out += std::to_string(r.n_test);
        out += '\t';
        out += std::to_string(r.seed);
        out += '\n';
    }
    write_text_file(path, out);
}

std::string format_results_table(const std::vector<ProbeResult> &results) {
    std::string out = "Sets                      Acc.\n";
    char buf[64];
    for (const auto &r : results) {
        std::snprintf(buf, sizeof buf, "%-26s%.2f\n", r.experiment.c_str(), r.accuracy);
        out += buf;
    }
    return out;
}

} // namespace taxoprobe
