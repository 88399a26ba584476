#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fcmli/controller.hpp"
#include "fcmli/scenarios.hpp"

#include <cmath>
#include <vector>

using namespace fcmli;

namespace {

MlpModel constant_policy(FeatureVariant variant, int cls) {
    MlpModel m;
    m.variant = variant;
    m.input_size = expanded_input_size(variant);
    m.hidden_size = 2;
    m.w1.assign(static_cast<std::size_t>(m.hidden_size) * m.input_size, 0.0);
    m.b1.assign(m.hidden_size, 0.0);
    m.w2.assign(static_cast<std::size_t>(MlpModel::kClasses) * m.hidden_size, 0.0);
    m.b2.assign(MlpModel::kClasses, 0.0);
    m.b2[cls] = 25.0;
    m.feat_mean.assign(m.input_size, 0.0);
    m.feat_scale.assign(m.input_size, 1.0);
    return m;
}

RunScript nominal_script(ControllerKind kind, double duration) {
    RunScript s;
    s.kind = kind;
    s.scenario = builtin_scenario("nominal");
    s.scenario.duration = duration;
    s.scenario.warmup = 0.0;
    return s;
}

}  // namespace

TEST_CASE("a constant class-7 policy applies (1,1,1) on every phase") {
    const MlpModel m = constant_policy(FeatureVariant::X2, 7);
    SystemParams p;
    PlantState meas = init_plant(p);
    meas.i = {3.0, -2.0, -1.0};
    const std::array<References, 3> refs = {References{3.0, 120.0, 240.0},
                                            References{-2.0, 120.0, 240.0},
                                            References{-1.0, 120.0, 240.0}};
    SwitchTriple last{};

    const SwitchTriple out = ann_control_step(m, meas, refs, last, p.vdc);
    for (int x = 0; x < 3; ++x) {
        CHECK(out[x] == SwitchingState{1, 1, 1});
    }

    const SwitchTriple again = ann_control_step(m, meas, refs, last, p.vdc);
    for (int x = 0; x < 3; ++x) {
        CHECK(out[x] == again[x]);
    }
}

TEST_CASE("run script validation") {
    RunScript s = nominal_script(ControllerKind::mpc, 0.05);
    CHECK_NOTHROW(s.validate());

    s.events = {{0.02, RunEvent::Kind::set_iref_amp, 5.0},
                {0.01, RunEvent::Kind::set_plant_r, 10.0}};
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s.events = {{0.06, RunEvent::Kind::set_iref_amp, 5.0}};  // beyond the span
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    CHECK_THROWS_AS(parse_event_kind("warp_factor"), std::invalid_argument);
}

TEST_CASE("null drive keeps the currents near zero") {
    RunScript s = nominal_script(ControllerKind::mpc, 0.03);
    s.scenario.params.iref_amp = 0.0;
    const TimeSeriesRun run = run_closed_loop(s);
    for (int x = 0; x < 3; ++x) {
        for (const double i : run.series.i[x]) {
            REQUIRE(std::abs(i) < 0.1);
        }
    }
}

TEST_CASE("switching states change only at controller-period boundaries") {
    RunScript s = nominal_script(ControllerKind::mpc, 0.02);
    const TimeSeriesRun run = run_closed_loop(s);
    const int substeps = s.scenario.params.substeps_per_period();
    // Sample 0 is the initial condition; samples 1..substeps share the first
    // period's switches, and so on.
    for (int x = 0; x < 3; ++x) {
        for (std::size_t k = 1; k < run.series.size(); ++k) {
            if (static_cast<long long>(k - 1) % substeps != 0) {
                REQUIRE(run.series.state[x][k] == run.series.state[x][k - 1]);
            }
        }
    }
}

TEST_CASE("replay of the same script is bit identical") {
    RunScript s = nominal_script(ControllerKind::mpc, 0.04);
    s.events = {{0.02, RunEvent::Kind::set_iref_amp, 6.0}};
    const TimeSeriesRun a = run_closed_loop(s);
    const TimeSeriesRun b = run_closed_loop(s);
    REQUIRE(a.series.size() == b.series.size());
    CHECK(a.series.t == b.series.t);
    for (int x = 0; x < 3; ++x) {
        CHECK(a.series.i[x] == b.series.i[x]);
        CHECK(a.series.v1[x] == b.series.v1[x]);
        CHECK(a.series.v2[x] == b.series.v2[x]);
        CHECK(a.series.state[x] == b.series.state[x]);
        CHECK(a.i_ref[x] == b.i_ref[x]);
    }
}

TEST_CASE("expert run re-labels offline to exactly the applied states") {
    RunScript s = nominal_script(ControllerKind::mpc, 0.03);

    struct Snapshot {
        PlantState meas;
        std::array<References, 3> refs;
        SwitchTriple applied;
        SwitchTriple next;
    };
    std::vector<Snapshot> log;
    const StepCallback on_step = [&log](const StepContext& ctx) {
        log.push_back({ctx.meas, ctx.refs, ctx.applied, ctx.next});
    };
    run_closed_loop(s, nullptr, on_step);
    REQUIRE(log.size() == 1000);

    const ControllerModel model = ControllerModel::from_params(s.scenario.params, s.weights);
    const PredictorConstants consts = model.constants();
    for (const auto& snap : log) {
        const SwitchTriple redo = mpc_step(snap.meas, snap.refs, model, consts, snap.applied);
        for (int x = 0; x < 3; ++x) {
            REQUIRE(redo[x] == snap.next[x]);
        }
    }
}

TEST_CASE("reference events land exactly on their timestamps") {
    RunScript s = nominal_script(ControllerKind::mpc, 0.04);
    s.events = {{0.02, RunEvent::Kind::set_iref_amp, 5.0}};
    const TimeSeriesRun run = run_closed_loop(s);

    const double f0 = s.scenario.params.f0;
    for (std::size_t k = 0; k < run.series.size(); ++k) {
        const double t = run.series.t[k];
        const double amp = t <= 0.02 ? 10.0 : 5.0;
        const double expected = amp * std::sin(2.0 * std::numbers::pi * f0 * t);
        REQUIRE(run.i_ref[0][k] == expected);
    }

    // The reconstruction from the metadata sidecar matches the recording.
    const auto rebuilt = reconstruct_references(run.meta, run.series.t);
    for (int x = 0; x < 3; ++x) {
        REQUIRE(rebuilt[x] == run.i_ref[x]);
    }
}

TEST_CASE("plant-parameter events mutate the plant but not the controller model") {
    // After halving the plant inductance the loop keeps tracking: the
    // mismatch study depends on exactly this separation.
    RunScript s = nominal_script(ControllerKind::mpc, 0.16);
    s.events = {{0.1, RunEvent::Kind::set_plant_l, 5e-3}};
    const TimeSeriesRun run = run_closed_loop(s);

    // Pre-event amplitude from the settled span.
    double pre_peak = 0.0, post_peak = 0.0;
    for (std::size_t k = 0; k < run.series.size(); ++k) {
        const double mag = std::abs(run.series.i[0][k]);
        if (run.series.t[k] > 0.04 && run.series.t[k] <= 0.1) {
            pre_peak = std::max(pre_peak, mag);
        }
        if (run.series.t[k] > 0.1) {
            post_peak = std::max(post_peak, mag);
        }
    }
    CHECK(post_peak < 2.0 * pre_peak);
    CHECK(post_peak > 0.5 * pre_peak);
}

TEST_CASE("numerical blow-up aborts with a diagnostic") {
    // An Euler-unstable plant: r * dt / l >> 2.
    RunScript s = nominal_script(ControllerKind::mpc, 0.01);
    s.scenario.params.l = 1e-6;
    CHECK_THROWS_AS(run_closed_loop(s), std::runtime_error);
}

TEST_CASE("run script json round trip") {
    RunScript s = nominal_script(ControllerKind::ann, 0.05);
    s.model_path = "model.txt";
    s.scenario.params.r = 12.5;
    s.weights.voltage_weight = 0.75;
    s.events = {{0.01, RunEvent::Kind::set_plant_r, 20.0},
                {0.02, RunEvent::Kind::set_model_l, 7e-3}};

    const RunScript back = script_from_json(script_to_json(s));
    CHECK(back.kind == s.kind);
    CHECK(back.model_path == s.model_path);
    CHECK(back.scenario.params.r == s.scenario.params.r);
    CHECK(back.scenario.duration == s.scenario.duration);
    CHECK(back.weights.voltage_weight == s.weights.voltage_weight);
    REQUIRE(back.events.size() == 2);
    CHECK(back.events[1].kind == RunEvent::Kind::set_model_l);
    CHECK(back.events[1].value == 7e-3);
}

TEST_CASE("ann closed loop with a constant policy stays finite and aligned") {
    const MlpModel m = constant_policy(FeatureVariant::X2, 0);
    RunScript s = nominal_script(ControllerKind::ann, 0.01);
    const TimeSeriesRun run = run_closed_loop(s, &m);
    // Constant V0 everywhere (after the initial parked state).
    for (int x = 0; x < 3; ++x) {
        for (std::size_t k = 40; k < run.series.size(); ++k) {
            REQUIRE(run.series.state[x][k] == 0);
        }
    }
    CHECK(run.meta.at("controller") == "ann");
}
