#pragma once

// =============================================================================
// Feed-forward classifier for imitation of the MPC expert.
//
// One tanh hidden layer, softmax output over the eight switching states,
// cross-entropy loss minimized full-batch by scaled conjugate gradient with
// early stopping on validation error. The previous-state feature expands to
// an 8-wide one-hot block; per-component standardization statistics are
// computed on the training split and stored with the model.
// =============================================================================

#include "fcmli/dataset.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace fcmli {

struct MlpModel {
    static constexpr int kClasses = 8;

    FeatureVariant variant = FeatureVariant::X2;
    int input_size = 0;   // expanded feature dimension
    int hidden_size = 0;
    std::string hidden_activation = "tanh";
    std::string output_activation = "softmax";
    std::vector<double> w1;          // hidden_size x input_size, row-major
    std::vector<double> b1;          // hidden_size
    std::vector<double> w2;          // kClasses x hidden_size, row-major
    std::vector<double> b2;          // kClasses
    std::vector<double> feat_mean;   // input_size
    std::vector<double> feat_scale;  // input_size

    void validate() const;
};

/// Expanded input dimension of a variant: the raw components with the
/// previous-state index replaced by an 8-wide one-hot block.
int expanded_input_size(FeatureVariant v);

/// Expands raw features (previous state stored as an index) into the model
/// input layout.
std::vector<double> expand_features(FeatureVariant v, std::span<const double> raw);

/// Standardizes an expanded input in place using the model's statistics.
void normalize_input(const MlpModel& m, std::span<double> x);

/// Class probabilities for a normalized, expanded input of length
/// input_size. Softmax output: components in (0,1) summing to 1.
std::array<double, MlpModel::kClasses> forward(const MlpModel& m, std::span<const double> x);

/// Convenience: expand + normalize + forward on raw features.
std::array<double, MlpModel::kClasses> policy_probabilities(const MlpModel& m,
                                                            std::span<const double> raw);

/// Index of the largest component; ties break to the lowest index.
int argmax_class(const std::array<double, MlpModel::kClasses>& probs);

struct TrainConfig {
    std::vector<int> hidden_sizes = {8, 16, 24, 32};
    int max_epochs = 500;
    int patience = 25;
    std::uint64_t seed = 1;
    double sigma0 = 1e-4;
    double lambda0 = 1e-6;
    double grad_tol = 1e-7;
    int threads = 0;  // 0 = hardware concurrency
};

struct EvalResult {
    std::size_t count = 0;
    double accuracy = 0.0;
    std::array<std::array<std::size_t, 8>, 8> confusion{};  // [actual][predicted]
    std::array<double, 8> precision{};
    std::array<double, 8> recall{};
};

struct SweepPoint {
    int hidden_size = 0;
    double best_val_error = 0.0;
    int best_epoch = 0;
    int epochs_run = 0;
    double final_train_loss = 0.0;
    bool diverged = false;
};

struct TrainReport {
    std::string optimizer = "scg";
    std::uint64_t seed = 0;
    int best_hidden_size = 0;
    double best_val_error = 0.0;  // mean cross-entropy on the validation split
    int best_epoch = 0;
    std::vector<SweepPoint> sweep;
    std::size_t train_count = 0;
    std::size_t val_count = 0;
    EvalResult test;  // filled in by evaluate()
};

/// Sweeps the configured hidden sizes, each trained by SCG with early
/// stopping on validation cross-entropy, and returns the model with the
/// lowest validation error. Deterministic given the seed. A sweep point
/// whose loss turns non-finite is marked diverged and skipped.
std::pair<MlpModel, TrainReport> train(const Dataset& train_set, const Dataset& val_set,
                                       const TrainConfig& cfg);

/// Confusion matrix, accuracy and per-class precision/recall on a labeled set.
EvalResult evaluate(const MlpModel& m, const Dataset& test_set);

/// Compares the analytic loss gradient against central finite differences
/// on a small batch; returns the worst relative deviation. `perturb` (when
/// given) mutates the analytic gradient before comparison, for fault
/// injection in tests.
double gradient_check(const MlpModel& m, const Dataset& batch,
                      const std::function<void(std::vector<double>&)>& perturb = {});

/// Versioned plain-text model file with full round-trip precision.
void save_model(const MlpModel& m, const std::string& path);
MlpModel load_model(const std::string& path);

nlohmann::json eval_to_json(const EvalResult& e);
nlohmann::json report_to_json(const TrainReport& r);

}  // namespace fcmli
