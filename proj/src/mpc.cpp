#include "fcmli/mpc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fcmli {

void CostWeights::validate() const {
    if (current_weight < 0.0 || voltage_weight < 0.0) {
        throw std::invalid_argument("CostWeights: weights must be non-negative");
    }
    if (current_weight == 0.0 && voltage_weight == 0.0) {
        throw std::invalid_argument("CostWeights: weights must not both be zero");
    }
}

ControllerModel ControllerModel::from_params(const SystemParams& p, CostWeights w) {
    ControllerModel m;
    m.vdc = p.vdc;
    m.r = p.r;
    m.l = p.l;
    m.c1 = p.c1;
    m.c2 = p.c2;
    m.ts = p.ts;
    m.weights = w;
    return m;
}

Prediction predict(const PhaseMeasurement& meas, SwitchingState candidate, double v_common,
                   const PredictorConstants& consts, const ControllerModel& model) {
    const double d12 = static_cast<double>(candidate.s2) - static_cast<double>(candidate.s1);
    const double d23 = static_cast<double>(candidate.s3) - static_cast<double>(candidate.s2);
    Prediction p;
    p.v1_next = meas.v1 + (model.ts / model.c1) * meas.i * d12;
    p.v2_next = meas.v2 + (model.ts / model.c2) * meas.i * d23;
    const double vph = phase_output_voltage(candidate, meas.v1, meas.v2, model.vdc);
    p.i_next = (vph - v_common) * consts.gain + meas.i * consts.decay;
    return p;
}

double cost(const Prediction& pred, const References& refs, const CostWeights& w) {
    const double ei = refs.i_ref - pred.i_next;
    const double e1 = refs.v1_ref - pred.v1_next;
    const double e2 = refs.v2_ref - pred.v2_next;
    return w.current_weight * ei * ei + w.voltage_weight * e1 * e1 + w.voltage_weight * e2 * e2;
}

Selection select_optimal(const PhaseMeasurement& meas, const References& refs,
                         const CostWeights& w, const PredictorConstants& consts,
                         const ControllerModel& model, double v_common) {
    Selection best{SwitchingState::from_index(0), 0.0};
    bool first = true;
    for (int idx = 0; idx < 8; ++idx) {
        const SwitchingState cand = SwitchingState::from_index(idx);
        const double j = cost(predict(meas, cand, v_common, consts, model), refs, w);
        if (first || j < best.cost) {
            best = Selection{cand, j};
            first = false;
        }
    }
    return best;
}

double applied_common_mode(const PlantState& meas, const SwitchTriple& applied, double vdc) {
    std::array<double, 3> vph{};
    for (int x = 0; x < 3; ++x) {
        vph[x] = phase_output_voltage(applied[x], meas.v1[x], meas.v2[x], vdc);
    }
    return common_mode_voltage(vph[0], vph[1], vph[2]);
}

SwitchTriple mpc_step(const PlantState& meas, const std::array<References, 3>& refs,
                      const ControllerModel& model, const PredictorConstants& consts,
                      const SwitchTriple& last_applied) {
    const double v_common = applied_common_mode(meas, last_applied, model.vdc);
    SwitchTriple out{};
    for (int x = 0; x < 3; ++x) {
        const PhaseMeasurement pm{meas.i[x], meas.v1[x], meas.v2[x]};
        out[x] = select_optimal(pm, refs[x], model.weights, consts, model, v_common).state;
    }
    return out;
}

std::array<double, 3> reference_currents(double t, double iref_amp, double f0) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double third = 2.0 * std::numbers::pi / 3.0;
    const double wt = two_pi * f0 * t;
    return {iref_amp * std::sin(wt), iref_amp * std::sin(wt - third),
            iref_amp * std::sin(wt + third)};
}

}  // namespace fcmli
