#include "fcmli/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fcmli {

std::string controller_name(ControllerKind k) {
    return k == ControllerKind::mpc ? "mpc" : "ann";
}

RunEvent::Kind parse_event_kind(const std::string& name) {
    if (name == "set_iref_amp") return RunEvent::Kind::set_iref_amp;
    if (name == "set_plant_l") return RunEvent::Kind::set_plant_l;
    if (name == "set_plant_r") return RunEvent::Kind::set_plant_r;
    if (name == "set_model_l") return RunEvent::Kind::set_model_l;
    if (name == "set_model_r") return RunEvent::Kind::set_model_r;
    throw std::invalid_argument("unknown event kind: " + name);
}

std::string event_kind_name(RunEvent::Kind kind) {
    switch (kind) {
        case RunEvent::Kind::set_iref_amp: return "set_iref_amp";
        case RunEvent::Kind::set_plant_l: return "set_plant_l";
        case RunEvent::Kind::set_plant_r: return "set_plant_r";
        case RunEvent::Kind::set_model_l: return "set_model_l";
        case RunEvent::Kind::set_model_r: return "set_model_r";
    }
    throw std::logic_error("unreachable event kind");
}

void RunScript::validate() const {
    scenario.validate();
    weights.validate();
    const double span = scenario.warmup + scenario.duration;
    double prev = -1.0;
    for (const auto& ev : events) {
        if (ev.time <= prev) {
            throw std::invalid_argument("RunScript: event times must be strictly increasing");
        }
        if (ev.time < 0.0 || ev.time >= span) {
            throw std::invalid_argument("RunScript: event time outside the simulated span");
        }
        if (ev.value <= 0.0) {
            throw std::invalid_argument("RunScript: event values must be positive");
        }
        prev = ev.time;
    }
    if (kind == ControllerKind::ann && model_path.empty()) {
        // A preloaded model may still be supplied at run time; the path is
        // only metadata, so this is not an error.
    }
}

SwitchTriple ann_control_step(const MlpModel& model, const PlantState& meas,
                              const std::array<References, 3>& refs,
                              const SwitchTriple& last_applied, double vdc) {
    SwitchTriple out{};
    for (int x = 0; x < 3; ++x) {
        PhaseSnapshot snap;
        snap.v1 = meas.v1[x];
        snap.v2 = meas.v2[x];
        snap.i_ref = refs[x].i_ref;
        snap.i = meas.i[x];
        snap.vdc = vdc;
        snap.v_ph = phase_output_voltage(last_applied[x], meas.v1[x], meas.v2[x], vdc);
        snap.s_opt_prev = last_applied[x].index();
        const auto raw = extract_features(model.variant, snap);
        const auto probs = policy_probabilities(model, raw);
        out[x] = SwitchingState::from_index(argmax_class(probs));
    }
    return out;
}

namespace {

struct EventCursor {
    const std::vector<RunEvent>* events;
    std::size_t next = 0;

    /// Applies every event with time <= t (half-substep tolerance).
    void apply_up_to(double t, double half_substep, SystemParams& plant, ControllerModel& model,
                     PredictorConstants& consts, double& iref_amp) {
        while (next < events->size() && (*events)[next].time <= t + half_substep) {
            const RunEvent& ev = (*events)[next];
            switch (ev.kind) {
                case RunEvent::Kind::set_iref_amp: iref_amp = ev.value; break;
                case RunEvent::Kind::set_plant_l: plant.l = ev.value; break;
                case RunEvent::Kind::set_plant_r: plant.r = ev.value; break;
                case RunEvent::Kind::set_model_l:
                    model.l = ev.value;
                    consts = model.constants();
                    break;
                case RunEvent::Kind::set_model_r:
                    model.r = ev.value;
                    consts = model.constants();
                    break;
            }
            ++next;
        }
    }
};

}  // namespace

TimeSeriesRun run_closed_loop(const RunScript& script, const MlpModel* model,
                              const StepCallback& on_step) {
    script.validate();
    if (script.kind == ControllerKind::ann && model == nullptr) {
        throw std::invalid_argument("run_closed_loop: ann script without a model");
    }

    SystemParams plant_params = script.scenario.params;
    ControllerModel ctrl_model = ControllerModel::from_params(plant_params, script.weights);
    PredictorConstants consts = ctrl_model.constants();
    double iref_amp = plant_params.iref_amp;

    const double ts = plant_params.ts;
    const double dt = plant_params.plant_substep;
    const int substeps = plant_params.substeps_per_period();
    const int warmup_steps = static_cast<int>(std::ceil(script.scenario.warmup / ts - 1e-9));
    const int recorded_steps = static_cast<int>(std::floor(script.scenario.duration / ts + 1e-9));
    const int total_steps = warmup_steps + recorded_steps;

    TimeSeriesRun run;
    TimeSeries* recorder = script.record_substeps ? &run.series : nullptr;

    PlantState state = init_plant(plant_params);
    SwitchTriple applied{};  // all phases start parked at V0

    EventCursor cursor{&script.events};

    if (recorder != nullptr) {
        const std::size_t samples = static_cast<std::size_t>(total_steps) * substeps + 1;
        run.series.reserve(samples);
        for (auto& ch : run.i_ref) {
            ch.reserve(samples);
        }
        std::array<double, 3> vph0{};
        for (int x = 0; x < 3; ++x) {
            vph0[x] = phase_output_voltage(applied[x], state.v1[x], state.v2[x], plant_params.vdc);
        }
        run.series.append(state, vph0, applied);
        const auto r0 = reference_currents(0.0, iref_amp, plant_params.f0);
        for (int x = 0; x < 3; ++x) {
            run.i_ref[x].push_back(r0[x]);
        }
    }

    long long substep_counter = 0;
    for (int k = 0; k < total_steps; ++k) {
        const double t_k = static_cast<double>(k) * ts;
        cursor.apply_up_to(t_k, 0.5 * dt, plant_params, ctrl_model, consts, iref_amp);

        const auto iref = reference_currents(t_k, iref_amp, plant_params.f0);
        std::array<References, 3> refs{};
        for (int x = 0; x < 3; ++x) {
            refs[x] = ctrl_model.references(iref[x]);
        }

        SwitchTriple next{};
        double v_common = applied_common_mode(state, applied, ctrl_model.vdc);
        if (script.kind == ControllerKind::mpc) {
            next = mpc_step(state, refs, ctrl_model, consts, applied);
        } else {
            next = ann_control_step(*model, state, refs, applied, ctrl_model.vdc);
        }

        if (on_step) {
            StepContext ctx{k, t_k, state, refs, applied, next, v_common, k >= warmup_steps};
            on_step(ctx);
        }

        // Hold the in-force states over [t_k, t_k + ts); the new decision
        // takes effect at the next sampling instant.
        if (!state.finite()) {
            throw std::runtime_error("run_closed_loop: numerical blow-up at t=" +
                                     std::to_string(state.t) + " (" + script.scenario.id + ")");
        }
        for (int j = 0; j < substeps; ++j) {
            cursor.apply_up_to(t_k + j * dt, 0.5 * dt, plant_params, ctrl_model, consts, iref_amp);
            advance_substep(state, applied, plant_params, recorder);
            ++substep_counter;
            state.t = static_cast<double>(substep_counter) * dt;
            if (recorder != nullptr) {
                run.series.t.back() = state.t;
                const auto r = reference_currents(state.t, iref_amp, plant_params.f0);
                for (int x = 0; x < 3; ++x) {
                    run.i_ref[x].push_back(r[x]);
                }
            }
        }
        if (!state.finite()) {
            throw std::runtime_error("run_closed_loop: numerical blow-up at t=" +
                                     std::to_string(state.t) + " (" + script.scenario.id + ")");
        }
        applied = next;
    }

    nlohmann::json meta = script_to_json(script);
    meta["format_version"] = 1;
    meta["total_steps"] = total_steps;
    meta["warmup_steps"] = warmup_steps;
    meta["samples"] = run.series.size();
    meta["config_hash"] = fnv1a_hash(script_to_json(script).dump());
    if (model != nullptr) {
        meta["model_variant"] = variant_name(model->variant);
        meta["model_hidden_size"] = model->hidden_size;
    }
    run.meta = std::move(meta);
    return run;
}

void write_run(const TimeSeriesRun& run, const std::string& csv_path) {
    write_timeseries_csv(run.series, csv_path);
    const std::string meta_path = csv_path + ".meta.json";
    std::FILE* f = std::fopen(meta_path.c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open for writing: " + meta_path);
    }
    const std::string text = run.meta.dump(2);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fputc('\n', f);
    std::fclose(f);
}

std::array<std::vector<double>, 3> reconstruct_references(const nlohmann::json& meta,
                                                          const std::vector<double>& t) {
    const double f0 = meta.at("scenario").at("f0").get<double>();
    double amp = meta.at("scenario").at("iref_amp").get<double>();
    struct AmpChange {
        double time;
        double value;
    };
    std::vector<AmpChange> changes;
    for (const auto& ev : meta.at("events")) {
        if (ev.at("kind").get<std::string>() == "set_iref_amp") {
            changes.push_back({ev.at("time").get<double>(), ev.at("value").get<double>()});
        }
    }
    std::array<std::vector<double>, 3> out;
    for (auto& ch : out) {
        ch.reserve(t.size());
    }
    std::size_t next = 0;
    const double tol = t.size() > 1 ? 0.5 * (t[1] - t[0]) : 0.0;
    for (const double tk : t) {
        // A sample recorded exactly at the event time still carries the old
        // amplitude; the change shows up from the following sub-step on.
        while (next < changes.size() && changes[next].time <= tk - tol) {
            amp = changes[next].value;
            ++next;
        }
        const auto r = reference_currents(tk, amp, f0);
        for (int x = 0; x < 3; ++x) {
            out[x].push_back(r[x]);
        }
    }
    return out;
}

nlohmann::json script_to_json(const RunScript& script) {
    nlohmann::json j;
    j["controller"] = controller_name(script.kind);
    j["model_path"] = script.model_path;
    const SystemParams& p = script.scenario.params;
    j["scenario"] = {{"id", script.scenario.id},
                     {"vdc", p.vdc},
                     {"r", p.r},
                     {"l", p.l},
                     {"c1", p.c1},
                     {"c2", p.c2},
                     {"ts", p.ts},
                     {"f0", p.f0},
                     {"iref_amp", p.iref_amp},
                     {"plant_substep", p.plant_substep},
                     {"duration", script.scenario.duration},
                     {"warmup", script.scenario.warmup},
                     {"seed", script.scenario.seed}};
    j["weights"] = {{"current", script.weights.current_weight},
                    {"voltage", script.weights.voltage_weight}};
    j["events"] = nlohmann::json::array();
    for (const auto& ev : script.events) {
        j["events"].push_back(
            {{"time", ev.time}, {"kind", event_kind_name(ev.kind)}, {"value", ev.value}});
    }
    j["record_substeps"] = script.record_substeps;
    return j;
}

RunScript script_from_json(const nlohmann::json& j) {
    RunScript s;
    const std::string kind = j.at("controller").get<std::string>();
    if (kind == "mpc") {
        s.kind = ControllerKind::mpc;
    } else if (kind == "ann") {
        s.kind = ControllerKind::ann;
    } else {
        throw std::invalid_argument("unknown controller kind: " + kind);
    }
    s.model_path = j.value("model_path", std::string{});
    const auto& sc = j.at("scenario");
    s.scenario.id = sc.value("id", std::string{"custom"});
    SystemParams& p = s.scenario.params;
    p.vdc = sc.at("vdc").get<double>();
    p.r = sc.at("r").get<double>();
    p.l = sc.at("l").get<double>();
    p.c1 = sc.at("c1").get<double>();
    p.c2 = sc.at("c2").get<double>();
    p.ts = sc.at("ts").get<double>();
    p.f0 = sc.at("f0").get<double>();
    p.iref_amp = sc.at("iref_amp").get<double>();
    p.plant_substep = sc.value("plant_substep", 1e-6);
    s.scenario.duration = sc.value("duration", 0.28);
    s.scenario.warmup = sc.value("warmup", 0.02);
    s.scenario.seed = sc.value("seed", std::uint64_t{0});
    if (j.contains("weights")) {
        s.weights.current_weight = j["weights"].value("current", 1.0);
        s.weights.voltage_weight = j["weights"].value("voltage", 1.0);
    }
    if (j.contains("events")) {
        for (const auto& ev : j["events"]) {
            s.events.push_back(RunEvent{ev.at("time").get<double>(),
                                        parse_event_kind(ev.at("kind").get<std::string>()),
                                        ev.at("value").get<double>()});
        }
    }
    s.record_substeps = j.value("record_substeps", true);
    return s;
}

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace fcmli
