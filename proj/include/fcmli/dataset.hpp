#pragma once

// =============================================================================
// Expert-labeled training corpus.
//
// Runs the MPC expert across the built-in training conditions, logging one
// record per phase per controller period: the feature encoding of the
// measured snapshot plus the switching state the expert applies at the next
// sampling instant. Five candidate feature encodings (X1..X5) are supported;
// the previous optimal state is stored as its raw table index and expanded
// to one-hot only at training time.
// =============================================================================

#include "fcmli/mpc.hpp"
#include "fcmli/scenarios.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace fcmli {

enum class FeatureVariant { X1, X2, X3, X4, X5 };

FeatureVariant parse_variant(const std::string& name);
std::string variant_name(FeatureVariant v);

/// Number of components of the raw encoding (the previous optimal state
/// counts as one component).
int feature_count(FeatureVariant v);

/// Column names of the raw encoding, in stored order.
std::vector<std::string> feature_names(FeatureVariant v);

/// Position of the previous-optimal-state component within the encoding.
int s_opt_position(FeatureVariant v);

/// Everything measurable about one phase at a sampling instant.
struct PhaseSnapshot {
    double v1 = 0.0;       // inner capacitor voltage [V]
    double v2 = 0.0;       // outer capacitor voltage [V]
    double i_ref = 0.0;    // instantaneous reference current [A]
    double i = 0.0;        // measured current [A]
    double vdc = 0.0;      // dc-link voltage [V]
    double v_ph = 0.0;     // pole voltage under the applied state [V]
    int s_opt_prev = 0;    // switching state applied at this instant (0..7)
};

/// Raw ordered feature values for one phase; the previous optimal state is
/// stored as its index. Up to 9 components depending on the variant.
std::vector<double> extract_features(FeatureVariant variant, const PhaseSnapshot& snap);

struct LabeledRecord {
    std::array<double, 9> features{};  // first feature_count(variant) entries used
    std::uint8_t label = 0;            // expert's next-step switching state (0..7)
    std::uint16_t scenario = 0;        // index into the manifest's scenario list
    std::uint8_t phase = 0;            // 0=a, 1=b, 2=c
};

struct Dataset {
    FeatureVariant variant = FeatureVariant::X2;
    std::vector<std::string> scenario_ids;
    std::vector<LabeledRecord> records;
};

struct SplitSpec {
    double train_fraction = 0.70;
    double val_fraction = 0.15;
    double test_fraction = 0.15;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SplitResult {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Seed-deterministic shuffle then partition; val and test take
/// floor(fraction*n) records each and the remainder goes to train.
SplitResult split_dataset(const Dataset& data, const SplitSpec& spec);

struct GenerateOptions {
    double duration = 0.28;   // recorded span per scenario [s]; <0 keeps per-scenario values
    double warmup = 0.02;     // discarded transient per scenario [s]; <0 keeps per-scenario values
    CostWeights weights;
    double audit_fraction = 0.01;  // share of records re-checked against the expert
    bool parallel = true;
    std::uint64_t seed = 0;   // provenance only; generation itself is deterministic
};

struct GenerationResult {
    Dataset dataset;
    nlohmann::json manifest;
};

/// Runs the MPC expert closed loop over every scenario and collects labeled
/// records. A scenario whose simulation blows up is dropped and reported in
/// the manifest; the audit re-runs the expert on a deterministic sample of
/// stored snapshots and counts label mismatches.
GenerationResult generate_dataset(const std::vector<ScenarioConfig>& scenarios,
                                  FeatureVariant variant, const GenerateOptions& opts = {});

void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

void write_manifest(const nlohmann::json& manifest, const std::string& path);

/// Per-class label counts.
std::array<std::size_t, 8> class_histogram(const Dataset& data);

}  // namespace fcmli
