#pragma once

// =============================================================================
// Closed-loop sequencer.
//
// Alternates one controller decision per period with plant sub-stepping,
// running either the MPC expert or a trained network policy. A decision made
// at instant k takes effect at instant k+1. Scripted events mutate the plant
// (or, for ablations, the controller model) mid-run without touching the
// other side, which is how parameter-mismatch studies are expressed.
// =============================================================================

#include "fcmli/ann.hpp"
#include "fcmli/dataset.hpp"
#include "fcmli/mpc.hpp"
#include "fcmli/scenarios.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fcmli {

enum class ControllerKind { mpc, ann };

std::string controller_name(ControllerKind k);

struct RunEvent {
    enum class Kind { set_iref_amp, set_plant_l, set_plant_r, set_model_l, set_model_r };

    double time = 0.0;  // seconds from run start
    Kind kind = Kind::set_iref_amp;
    double value = 0.0;
};

RunEvent::Kind parse_event_kind(const std::string& name);
std::string event_kind_name(RunEvent::Kind kind);

struct RunScript {
    ControllerKind kind = ControllerKind::mpc;
    ScenarioConfig scenario;
    std::string model_path;       // recorded in metadata for ann runs
    std::vector<RunEvent> events;
    CostWeights weights;          // expert cost weights (mpc runs)
    bool record_substeps = true;

    /// Event times must be strictly increasing and inside the simulated span.
    void validate() const;
};

/// Full recording of one closed-loop run: every plant channel at the
/// sub-step rate plus the applied reference currents, with metadata
/// sufficient to reproduce the run.
struct TimeSeriesRun {
    TimeSeries series;
    std::array<std::vector<double>, 3> i_ref;
    nlohmann::json meta;
};

/// Per-controller-period context handed to observers (dataset generation,
/// audits). `applied` is the switching state in force at the sampling
/// instant; `next` takes effect one period later.
struct StepContext {
    int step = 0;
    double t = 0.0;
    const PlantState& meas;
    std::array<References, 3> refs;
    SwitchTriple applied;
    SwitchTriple next;
    double v_common = 0.0;
    bool recorded = false;  // past the warmup span
};

using StepCallback = std::function<void(const StepContext&)>;

/// One network-policy decision: per phase, extract features, normalize,
/// forward, argmax. No converter model and no cost function on this path.
SwitchTriple ann_control_step(const MlpModel& model, const PlantState& meas,
                              const std::array<References, 3>& refs,
                              const SwitchTriple& last_applied, double vdc);

/// Runs the scripted closed loop. `model` is required for ann scripts and
/// must match the script's feature variant expectations. Throws
/// std::runtime_error on numerical blow-up, reporting how far the run got.
TimeSeriesRun run_closed_loop(const RunScript& script, const MlpModel* model = nullptr,
                              const StepCallback& on_step = {});

/// Writes run.csv (plant schema) and the metadata sidecar run.meta.json.
void write_run(const TimeSeriesRun& run, const std::string& csv_path);

/// Reconstructs the reference-current channels from a metadata sidecar (the
/// references are an analytic function of time, amplitude and events).
std::array<std::vector<double>, 3> reconstruct_references(const nlohmann::json& meta,
                                                          const std::vector<double>& t);

nlohmann::json script_to_json(const RunScript& script);
RunScript script_from_json(const nlohmann::json& j);

/// FNV-1a hash of a string, used to fingerprint run configurations.
std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace fcmli
