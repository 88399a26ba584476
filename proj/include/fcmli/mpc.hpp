#pragma once

// =============================================================================
// Finite-control-set model predictive control for the FC inverter.
//
// One-step discrete predictor, weighted quadratic cost, exhaustive argmin
// over the eight per-phase switching states. The controller keeps its own
// copy of the model parameters so plant/controller mismatch is expressible.
// =============================================================================

#include "fcmli/plant.hpp"

#include <array>

namespace fcmli {

/// Discrete-predictor constants. gain = ts/l converts volt-seconds to amps,
/// decay = 1 - r*ts/l is the per-period current retention. Recompute whenever
/// the controller's model parameters change.
struct PredictorConstants {
    double gain = 0.0;
    double decay = 0.0;

    static PredictorConstants from_model(double r, double l, double ts) {
        return {ts / l, 1.0 - r * ts / l};
    }
};

/// Weights on the squared tracking errors of the cost: current term and the
/// (shared) capacitor-voltage terms. Both >= 0, not both zero.
struct CostWeights {
    double current_weight = 1.0;
    double voltage_weight = 1.0;

    void validate() const;
};

/// Per-phase setpoints at the sampling instant. The capacitor references are
/// tied to the balanced pre-charge ratio: v2_ref = 2*v1_ref.
struct References {
    double i_ref = 0.0;
    double v1_ref = 0.0;
    double v2_ref = 0.0;
};

/// One-step-ahead estimate for a candidate switching state.
struct Prediction {
    double i_next = 0.0;
    double v1_next = 0.0;
    double v2_next = 0.0;
};

/// Measurements of one phase at the sampling instant.
struct PhaseMeasurement {
    double i = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
};

/// The controller's internal model of the converter. Defaults are copied
/// from the plant parameters; mismatch studies change the plant only.
struct ControllerModel {
    double vdc = 360.0;
    double r = 15.0;
    double l = 10e-3;
    double c1 = 680e-6;
    double c2 = 680e-6;
    double ts = 30e-6;
    CostWeights weights;

    static ControllerModel from_params(const SystemParams& p, CostWeights w = {});

    [[nodiscard]] PredictorConstants constants() const {
        return PredictorConstants::from_model(r, l, ts);
    }

    [[nodiscard]] References references(double i_ref) const {
        return References{i_ref, vdc / 3.0, 2.0 * vdc / 3.0};
    }
};

struct Selection {
    SwitchingState state;
    double cost = 0.0;
};

/// One-step prediction of current and capacitor voltages for a candidate,
/// with the common-mode voltage v_common held fixed over the period.
Prediction predict(const PhaseMeasurement& meas, SwitchingState candidate, double v_common,
                   const PredictorConstants& consts, const ControllerModel& model);

/// Weighted quadratic tracking cost of a prediction against the references.
double cost(const Prediction& pred, const References& refs, const CostWeights& w);

/// Evaluates all eight candidates and returns the cost minimizer; ties break
/// to the lowest switching-state index.
Selection select_optimal(const PhaseMeasurement& meas, const References& refs,
                         const CostWeights& w, const PredictorConstants& consts,
                         const ControllerModel& model, double v_common);

/// Full three-phase controller step: the common-mode voltage is frozen at
/// the value produced by the last applied switching states (evaluated at the
/// measured capacitor voltages), then each phase is optimized independently.
SwitchTriple mpc_step(const PlantState& meas, const std::array<References, 3>& refs,
                      const ControllerModel& model, const PredictorConstants& consts,
                      const SwitchTriple& last_applied);

/// Common-mode voltage implied by a switching-state triple at the measured
/// capacitor voltages.
double applied_common_mode(const PlantState& meas, const SwitchTriple& applied, double vdc);

/// Instantaneous three-phase reference currents: iref_amp * sin(2*pi*f0*t + phi)
/// with phases {0, -2pi/3, +2pi/3}.
std::array<double, 3> reference_currents(double t, double iref_amp, double f0);

}  // namespace fcmli
