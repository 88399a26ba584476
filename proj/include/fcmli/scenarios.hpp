#pragma once

// =============================================================================
// Built-in operating conditions.
//
// Two named families ship with the toolkit: the S1..S16 absolute-value
// operating points used for the feature-set study and the THD comparison,
// and the C1..C11 training conditions given as multipliers on the nominal
// converter parameters. Both are frozen verbatim; the golden test asserts
// them entry by entry.
// =============================================================================

#include "fcmli/plant.hpp"

#include <string>
#include <vector>

namespace fcmli {

/// Fully resolved operating condition for one closed-loop run.
struct ScenarioConfig {
    std::string id;
    SystemParams params;
    double duration = 0.28;  // recorded span [s]
    double warmup = 0.02;    // discarded leading transient [s]
    std::uint64_t seed = 0;

    void validate() const;
};

/// Absolute-value row of the feature-set study table (S1..S16).
struct OperatingPointRow {
    const char* id;
    double vdc;     // [V]
    double ts_us;   // [us]
    double r;       // [ohm]
    double l_mh;    // [mH]
    double iref;    // [A]
};

/// Multiplier row of the training-condition table (C1..C11). Multipliers
/// apply to the nominal set {vdc 360 V, c 680 uF, l 10 mH, r 15 ohm,
/// iref 15 A}; the sampling period is absolute.
struct TrainingConditionRow {
    const char* id;
    double m_vdc;
    double m_c;
    double m_l;
    double m_r;
    double m_iref;
    double ts_us;
};

/// Nominal converter parameters (the steady-state experiment set).
SystemParams nominal_params();

const std::vector<OperatingPointRow>& operating_point_rows();     // S1..S16
const std::vector<TrainingConditionRow>& training_condition_rows();  // C1..C11

/// Scenario ids plotted in the THD comparison bars (a fixed 12-element
/// subset of S1..S16).
const std::vector<std::string>& thd_comparison_ids();

/// Resolves a built-in scenario by id: "S1".."S16", "C1".."C11" or
/// "nominal". Throws std::invalid_argument for unknown ids.
ScenarioConfig builtin_scenario(const std::string& id);

/// All eleven training conditions resolved against the nominal parameters.
std::vector<ScenarioConfig> training_scenarios();

}  // namespace fcmli
