#include "fcmli/scenarios.hpp"

#include <stdexcept>

namespace fcmli {

void ScenarioConfig::validate() const {
    params.validate();
    if (duration < 0.0 || warmup < 0.0) {
        throw std::invalid_argument("ScenarioConfig: duration and warmup must be non-negative");
    }
}

SystemParams nominal_params() {
    SystemParams p;
    p.vdc = 360.0;
    p.r = 15.0;
    p.l = 10e-3;
    p.c1 = 680e-6;
    p.c2 = 680e-6;
    p.ts = 30e-6;
    p.f0 = 50.0;
    p.iref_amp = 10.0;
    p.plant_substep = 1e-6;
    return p;
}

const std::vector<OperatingPointRow>& operating_point_rows() {
    static const std::vector<OperatingPointRow> rows = {
        {"S1", 360, 30, 10.0, 5.0, 17.0},
        {"S2", 360, 30, 15.0, 10.0, 12.0},
        {"S3", 360, 30, 25.0, 12.0, 5.0},
        {"S4", 342, 20, 7.5, 8.0, 12.0},
        {"S5", 378, 20, 15.0, 4.5, 10.0},
        {"S6", 360, 45, 15.0, 9.0, 4.0},
        {"S7", 360, 45, 8.0, 10.0, 5.0},
        {"S8", 350, 50, 9.0, 9.5, 6.0},
        {"S9", 340, 50, 11.0, 5.0, 6.0},
        {"S10", 360, 50, 10.0, 5.5, 4.35},
        {"S11", 360, 20, 10.0, 5.0, 12.0},
        {"S12", 340, 25, 10.0, 5.0, 10.0},
        {"S13", 350, 20, 12.0, 7.0, 8.0},
        {"S14", 360, 20, 7.0, 5.0, 15.0},
        {"S15", 350, 25, 9.0, 5.0, 12.0},
        {"S16", 350, 40, 9.0, 5.0, 12.0},
    };
    return rows;
}

const std::vector<TrainingConditionRow>& training_condition_rows() {
    static const std::vector<TrainingConditionRow> rows = {
        {"C1", 0.95, 0.95, 1.00, 0.80, 0.95, 30},
        {"C2", 0.90, 0.85, 0.95, 0.70, 0.90, 10},
        {"C3", 1.25, 0.90, 1.20, 1.10, 1.15, 50},
        {"C4", 1.10, 1.05, 1.50, 1.23, 1.05, 60},
        {"C5", 1.00, 1.10, 1.05, 1.40, 0.75, 15},
        {"C6", 1.00, 0.98, 0.75, 1.30, 0.65, 18},
        {"C7", 1.15, 1.20, 0.80, 1.17, 0.55, 50},
        {"C8", 1.00, 1.07, 0.88, 0.77, 0.85, 30},
        {"C9", 1.00, 1.00, 0.98, 0.87, 0.50, 40},
        {"C10", 1.00, 1.00, 0.90, 0.10, 2.00, 5},
        {"C11", 1.00, 1.00, 0.90, 0.10, 2.00, 15},
    };
    return rows;
}

const std::vector<std::string>& thd_comparison_ids() {
    static const std::vector<std::string> ids = {"S1", "S2", "S4", "S5", "S6", "S7",
                                                 "S9", "S11", "S13", "S14", "S15", "S16"};
    return ids;
}

namespace {

ScenarioConfig from_operating_point(const OperatingPointRow& row) {
    ScenarioConfig sc;
    sc.id = row.id;
    sc.params = nominal_params();
    sc.params.vdc = row.vdc;
    sc.params.ts = row.ts_us / 1e6;
    sc.params.r = row.r;
    sc.params.l = row.l_mh / 1e3;
    sc.params.iref_amp = row.iref;
    return sc;
}

ScenarioConfig from_training_condition(const TrainingConditionRow& row) {
    const SystemParams nominal = nominal_params();
    ScenarioConfig sc;
    sc.id = row.id;
    sc.params = nominal;
    sc.params.vdc = nominal.vdc * row.m_vdc;
    sc.params.c1 = nominal.c1 * row.m_c;
    sc.params.c2 = nominal.c2 * row.m_c;
    sc.params.l = nominal.l * row.m_l;
    sc.params.r = nominal.r * row.m_r;
    sc.params.iref_amp = 15.0 * row.m_iref;
    sc.params.ts = row.ts_us / 1e6;
    return sc;
}

}  // namespace

ScenarioConfig builtin_scenario(const std::string& id) {
    if (id == "nominal") {
        ScenarioConfig sc;
        sc.id = "nominal";
        sc.params = nominal_params();
        return sc;
    }
    for (const auto& row : operating_point_rows()) {
        if (id == row.id) {
            return from_operating_point(row);
        }
    }
    for (const auto& row : training_condition_rows()) {
        if (id == row.id) {
            return from_training_condition(row);
        }
    }
    throw std::invalid_argument("unknown scenario id: " + id);
}

std::vector<ScenarioConfig> training_scenarios() {
    std::vector<ScenarioConfig> out;
    out.reserve(training_condition_rows().size());
    for (const auto& row : training_condition_rows()) {
        out.push_back(from_training_condition(row));
    }
    return out;
}

}  // namespace fcmli
