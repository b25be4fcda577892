#pragma once

#include "taxoprobe/attention.hpp"
#include "taxoprobe/store.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace taxoprobe {

struct FeatureVector {
    std::vector<double> values; // L*H, layer-major
    int label = 0;              // positive=0, negative=1, sister=2
    std::uint64_t example_id = 0;
};

FeatureVector flatten(const AttentionMatrix &matrix, int label);
AttentionMatrix reshape(const FeatureVector &v, std::uint32_t layers, std::uint32_t heads);

struct ProbeConfig {
    double c = 1.0;              // inverse regularization strength
    int max_iterations = 1000;
    double tolerance = 1e-4;     // on the max-abs gradient component
    double train_fraction = 0.8;
    std::uint64_t split_seed = 42;
    Direction direction = Direction::forward;
    int cv_folds = 0;            // 0 = off; >1 adds stratified k-fold rows
};

struct ProbeModel {
    int n_classes = 0;
    std::size_t n_features = 0;
    std::vector<int> class_ids;   // ascending global labels present in training
    std::vector<double> weights;  // n_classes x n_features, class-major
    std::vector<double> bias;     // n_classes

    // Decision scores per class, in class_ids order.
    std::vector<double> logits(const std::vector<double> &x) const;
    int predict(const std::vector<double> &x) const; // global label id
};

// Objective over (weights, bias) packed class-major, weights first:
//   f = 0.5*||W||^2 + C * sum_i -log softmax(z_i)[y_i]
// Bias is not penalized. Exposed for the finite-difference oracle.
double probe_objective(const std::vector<FeatureVector> &data, const std::vector<int> &class_ids,
                       std::size_t n_features, double c, const std::vector<double> &params);
void probe_gradient(const std::vector<FeatureVector> &data, const std::vector<int> &class_ids,
                    std::size_t n_features, double c, const std::vector<double> &params,
                    std::vector<double> *grad);

struct TrainTrace {
    std::vector<double> objective; // value after each accepted iteration
    int iterations = 0;
    bool converged = false;
};

// Deterministic full-batch L-BFGS from zero init. Rows are summed in a
// canonical order (sorted by example_id) so training is exactly
// permutation-invariant. Throws std::invalid_argument on single-class data
// or inconsistent dimensions.
ProbeModel train(const std::vector<FeatureVector> &data, const ProbeConfig &config,
                 TrainTrace *trace = nullptr);

struct ProbeResult {
    std::string experiment;
    double accuracy = 0.0;
    std::vector<int> class_ids;
    std::vector<std::uint64_t> confusion; // n_classes x n_classes, row = true class
    std::vector<double> precision;        // per class
    std::vector<double> recall;           // per class
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::uint64_t seed = 0;
};

ProbeResult evaluate(const ProbeModel &model, const std::vector<FeatureVector> &test);

// Stratified split: per label, shuffle with mt19937_64(seed) over rows
// sorted by example_id, first floor(fraction*n) go to train.
void stratified_split(const std::vector<FeatureVector> &data, double train_fraction,
                      std::uint64_t seed, std::vector<FeatureVector> *train,
                      std::vector<FeatureVector> *test);

// The four experiments of the results table: all three sets, then the three
// pairwise comparisons, all under the same split seed. cv_folds > 1 appends
// a "<name> (cv)" row per experiment with the mean k-fold accuracy.
std::vector<ProbeResult> run_experiments(const MatrixStoreReader &store,
                                         const ProbeConfig &config);

void write_results_tsv(const std::vector<ProbeResult> &results, const std::string &path);
std::string format_results_table(const std::vector<ProbeResult> &results);

} // namespace taxoprobe
