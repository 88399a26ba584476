#include "fcmli/recipes.hpp"

#include "fcmli/analysis.hpp"
#include "fcmli/ann.hpp"
#include "fcmli/controller.hpp"
#include "fcmli/dataset.hpp"
#include "fcmli/scenarios.hpp"

#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "json.hpp"

namespace fcmli {

namespace {

namespace fs = std::filesystem;

std::string make_out_dir(const RecipeContext& ctx, const std::string& name) {
    const fs::path dir = fs::path(ctx.out_dir) / name;
    fs::create_directories(dir);
    return dir.string();
}

void write_json(const nlohmann::json& j, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    const std::string text = j.dump(2);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fputc('\n', f);
    std::fclose(f);
}

MlpModel require_model(const RecipeContext& ctx) {
    if (ctx.model_path.empty()) {
        throw std::invalid_argument("this recipe needs --model <trained model file>");
    }
    return load_model(ctx.model_path);
}

RunScript steady_script(const ScenarioConfig& scenario, ControllerKind kind, double duration) {
    RunScript script;
    script.kind = kind;
    script.scenario = scenario;
    script.scenario.duration = duration;
    script.scenario.warmup = 0.0;
    return script;
}

/// Reference step 10 A -> 5 A at 0.05 s on the nominal converter; reports
/// per-phase settling of the current amplitude into a 5 % band.
std::string step_recipe(const RecipeContext& ctx, const std::string& name, ControllerKind kind) {
    const std::string dir = make_out_dir(ctx, name);
    const MlpModel model = kind == ControllerKind::ann ? require_model(ctx) : MlpModel{};

    RunScript script = steady_script(builtin_scenario("nominal"), kind, 0.1);
    script.model_path = ctx.model_path;
    script.events.push_back({0.05, RunEvent::Kind::set_iref_amp, 5.0});

    const TimeSeriesRun run =
        run_closed_loop(script, kind == ControllerKind::ann ? &model : nullptr);
    write_run(run, dir + "/run.csv");

    const double dt = script.scenario.params.plant_substep;
    const double f0 = script.scenario.params.f0;
    nlohmann::json settle;
    for (int x = 0; x < 3; ++x) {
        const auto amps = amplitude_estimates(run.series.i[x], dt, f0, 0.05);
        std::vector<double> amp_vals, target(amps.size(), 5.0);
        amp_vals.reserve(amps.size());
        for (const auto& [t, a] : amps) {
            amp_vals.push_back(a);
        }
        const auto res = settling_time(amp_vals, target, 0.5 / f0, 0.0, 0.05, 5.0);
        const char phase = static_cast<char>('a' + x);
        settle[std::string{"phase_"} + phase] = {{"settled", res.settled},
                                                 {"time_s", res.time},
                                                 {"cycles", res.time * f0}};
    }
    settle["band"] = 0.05;
    settle["target_amplitude"] = 5.0;
    write_json(settle, dir + "/settling.json");
    return dir;
}

/// Steady state on the nominal converter: full recording, THD report and
/// the harmonic spectrum of phase a.
std::string steady_recipe(const RecipeContext& ctx, const std::string& name,
                          ControllerKind kind) {
    const std::string dir = make_out_dir(ctx, name);
    const MlpModel model = kind == ControllerKind::ann ? require_model(ctx) : MlpModel{};

    RunScript script = steady_script(builtin_scenario("nominal"), kind, 0.2);
    script.model_path = ctx.model_path;
    const TimeSeriesRun run =
        run_closed_loop(script, kind == ControllerKind::ann ? &model : nullptr);
    write_run(run, dir + "/run.csv");

    const double dt = script.scenario.params.plant_substep;
    const double f0 = script.scenario.params.f0;
    constexpr int kCycles = 5;
    constexpr int kMaxHarmonic = 100;

    const auto& ia = run.series.i[0];
    const ThdReport rep = thd(ia, dt, f0, kCycles, kMaxHarmonic);
    write_json({{"thd_percent", rep.thd_percent},
                {"fundamental_amp", rep.fundamental},
                {"cycles", rep.cycles},
                {"max_harmonic", rep.max_harmonic},
                {"window_start", rep.window_start}},
               dir + "/thd.json");

    // Harmonic spectrum of phase a over the same window (plot-ready).
    std::FILE* f = std::fopen((dir + "/spectrum.csv").c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open spectrum.csv in " + dir);
    }
    std::fputs("harmonic,freq_hz,amplitude,percent_of_fundamental\n", f);
    const std::size_t per_cycle = static_cast<std::size_t>(std::llround(1.0 / (f0 * dt)));
    const std::size_t n_window = per_cycle * kCycles;
    const std::span<const double> window(ia.data() + (ia.size() - n_window), n_window);
    for (int h = 1; h <= kMaxHarmonic; ++h) {
        const double mag =
            2.0 * dft_bin_magnitude(window, static_cast<std::size_t>(h) * kCycles) /
            static_cast<double>(n_window);
        std::fprintf(f, "%d,%g,%.9g,%.6f\n", h, h * f0, mag, 100.0 * mag / rep.fundamental);
    }
    std::fclose(f);
    return dir;
}

/// Load inductance 10 mH -> 5 mH at 0.1 s with the controller model left
/// untouched; reports THD before and after the event.
std::string mismatch_recipe(const RecipeContext& ctx, const std::string& name,
                            ControllerKind kind) {
    const std::string dir = make_out_dir(ctx, name);
    const MlpModel model = kind == ControllerKind::ann ? require_model(ctx) : MlpModel{};

    RunScript script = steady_script(builtin_scenario("nominal"), kind, 0.2);
    script.model_path = ctx.model_path;
    script.events.push_back({0.1, RunEvent::Kind::set_plant_l, 5e-3});

    const TimeSeriesRun run =
        run_closed_loop(script, kind == ControllerKind::ann ? &model : nullptr);
    write_run(run, dir + "/run.csv");

    const double dt = script.scenario.params.plant_substep;
    const double f0 = script.scenario.params.f0;
    constexpr int kMaxHarmonic = 100;
    const std::size_t pre_samples = static_cast<std::size_t>(std::llround(0.1 / dt)) + 1;

    // Five pre-event cycles would reach back to the start transient (five
    // cycles is exactly the 0.1 s lead-in), so the pre-event window is the
    // last three cycles before the event.
    nlohmann::json out;
    for (int x = 0; x < 3; ++x) {
        const auto& ch = run.series.i[x];
        const ThdReport pre =
            thd(std::span<const double>(ch.data(), pre_samples), dt, f0, 3, kMaxHarmonic);
        const ThdReport post = thd(ch, dt, f0, 5, kMaxHarmonic);
        const char phase = static_cast<char>('a' + x);
        out[std::string{"phase_"} + phase] = {{"thd_pre_percent", pre.thd_percent},
                                              {"pre_cycles", 3},
                                              {"thd_post_percent", post.thd_percent},
                                              {"post_cycles", 5}};
    }
    out["event"] = {{"time", 0.1}, {"kind", "set_plant_l"}, {"value", 5e-3}};
    write_json(out, dir + "/thd_pre_post.json");
    return dir;
}

std::string thd_bars_recipe(const RecipeContext& ctx) {
    const std::string dir = make_out_dir(ctx, "fig13_thd_bars");
    const MlpModel model = require_model(ctx);

    std::vector<TimeSeriesRun> runs;
    std::vector<RunForComparison> rows;
    runs.reserve(thd_comparison_ids().size() * 2);
    for (const auto& id : thd_comparison_ids()) {
        const ScenarioConfig scenario = builtin_scenario(id);
        for (const ControllerKind kind : {ControllerKind::ann, ControllerKind::mpc}) {
            RunScript script = steady_script(scenario, kind, 0.2);
            script.model_path = kind == ControllerKind::ann ? ctx.model_path : "";
            runs.push_back(
                run_closed_loop(script, kind == ControllerKind::ann ? &model : nullptr));
            std::printf("  %s / %s: done\n", id.c_str(), controller_name(kind).c_str());
        }
    }
    std::size_t k = 0;
    for (const auto& id : thd_comparison_ids()) {
        for (const char* ctrl : {"ann", "mpc"}) {
            rows.push_back({id, ctrl, &runs[k++]});
        }
    }
    write_comparison_csv(compare_runs(rows), dir + "/comparison.csv");
    return dir;
}

std::string feature_study_recipe(const RecipeContext& ctx) {
    const std::string dir = make_out_dir(ctx, "table2_feature_study");
    if (ctx.models_dir.empty()) {
        throw std::invalid_argument(
            "table2_feature_study needs --models <dir> holding model_X1.txt .. model_X5.txt");
    }

    std::FILE* f = std::fopen((dir + "/feature_study.csv").c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open feature_study.csv in " + dir);
    }
    std::fputs("variant,scenario_id,thd_percent\n", f);

    for (const auto& row : operating_point_rows()) {
        RunScript script = steady_script(builtin_scenario(row.id), ControllerKind::mpc, 0.2);
        const TimeSeriesRun run = run_closed_loop(script);
        const std::vector<RunForComparison> one = {{row.id, "mpc", &run}};
        const auto rows = compare_runs(one);
        std::fprintf(f, "mpc,%s,%.6f\n", row.id, rows[0].thd_mean);
        std::printf("  mpc / %s: done\n", row.id);
    }
    for (const FeatureVariant v : {FeatureVariant::X1, FeatureVariant::X2, FeatureVariant::X3,
                                   FeatureVariant::X4, FeatureVariant::X5}) {
        const std::string model_path =
            (fs::path(ctx.models_dir) / ("model_" + variant_name(v) + ".txt")).string();
        const MlpModel model = load_model(model_path);
        for (const auto& row : operating_point_rows()) {
            RunScript script = steady_script(builtin_scenario(row.id), ControllerKind::ann, 0.2);
            script.model_path = model_path;
            const TimeSeriesRun run = run_closed_loop(script, &model);
            const std::vector<RunForComparison> one = {{row.id, "ann", &run}};
            const auto rows = compare_runs(one);
            std::fprintf(f, "%s,%s,%.6f\n", variant_name(v).c_str(), row.id, rows[0].thd_mean);
            std::printf("  %s / %s: done\n", variant_name(v).c_str(), row.id);
        }
    }
    std::fclose(f);
    return dir;
}

std::string switching_table_recipe(const RecipeContext& ctx) {
    const std::string dir = make_out_dir(ctx, "table1_switching_states");
    static const char* kExpressions[8] = {
        "-vdc/2",         "v1-vdc/2", "v2-v1-vdc/2", "v2-vdc/2",
        "vdc/2-v2",       "vdc/2-v2+v1", "vdc/2-v1", "vdc/2"};
    std::FILE* f = std::fopen((dir + "/switching_states.csv").c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open switching_states.csv in " + dir);
    }
    std::fputs("index,s1,s2,s3,expression,v_balanced_360\n", f);
    for (int idx = 0; idx < 8; ++idx) {
        const SwitchingState s = SwitchingState::from_index(idx);
        const double v = phase_output_voltage(s, 120.0, 240.0, 360.0);
        std::fprintf(f, "%d,%d,%d,%d,%s,%g\n", idx, s.s1, s.s2, s.s3, kExpressions[idx], v);
    }
    std::fclose(f);
    return dir;
}

std::string gen_dataset_recipe(const RecipeContext& ctx) {
    const std::string dir = make_out_dir(ctx, "table3_gen_dataset");
    GenerateOptions opts;
    opts.duration = ctx.duration;
    opts.warmup = ctx.warmup;
    opts.seed = ctx.seed;
    const GenerationResult gen = generate_dataset(training_scenarios(), FeatureVariant::X2, opts);
    write_dataset_csv(gen.dataset, dir + "/dataset.csv");
    write_manifest(gen.manifest, dir + "/manifest.json");
    std::printf("  %zu records across %zu conditions\n", gen.dataset.records.size(),
                gen.dataset.scenario_ids.size());
    return dir;
}

std::string train_recipe(const RecipeContext& ctx) {
    const std::string dir = make_out_dir(ctx, "table4_train");

    Dataset data;
    if (!ctx.input_path.empty()) {
        data = read_dataset_csv(ctx.input_path);
    } else {
        GenerateOptions opts;
        opts.duration = ctx.duration;
        opts.warmup = ctx.warmup;
        opts.seed = ctx.seed;
        GenerationResult gen = generate_dataset(training_scenarios(), FeatureVariant::X2, opts);
        write_dataset_csv(gen.dataset, dir + "/dataset.csv");
        write_manifest(gen.manifest, dir + "/manifest.json");
        data = std::move(gen.dataset);
    }

    SplitSpec spec;
    spec.seed = ctx.seed;
    const SplitResult split = split_dataset(data, spec);

    TrainConfig cfg;
    cfg.seed = ctx.seed == 0 ? 1 : ctx.seed;
    if (!ctx.hidden_sizes.empty()) {
        cfg.hidden_sizes = ctx.hidden_sizes;
    }
    if (ctx.max_epochs > 0) {
        cfg.max_epochs = ctx.max_epochs;
    }
    if (ctx.patience > 0) {
        cfg.patience = ctx.patience;
    }
    cfg.threads = ctx.threads;

    auto [model, report] = train(split.train, split.val, cfg);
    report.test = evaluate(model, split.test);
    save_model(model, dir + "/model.txt");
    write_json(report_to_json(report), dir + "/train_report.json");
    std::printf("  hidden=%d val_error=%.4f (epoch %d) test_accuracy=%.2f%%\n",
                report.best_hidden_size, report.best_val_error, report.best_epoch,
                100.0 * report.test.accuracy);
    return dir;
}

}  // namespace

const std::vector<std::string>& recipe_names() {
    static const std::vector<std::string> names = {
        "table1_switching_states", "fig5_ann_step",       "fig6_mpc_step",
        "fig7_ann_steady",         "fig8_mpc_steady",     "fig11_ann_mismatch",
        "fig12_mpc_mismatch",      "fig13_thd_bars",      "table2_feature_study",
        "table3_gen_dataset",      "table4_train",
    };
    return names;
}

std::string run_recipe(const std::string& name, const RecipeContext& ctx) {
    std::printf("recipe %s\n", name.c_str());
    if (name == "table1_switching_states") return switching_table_recipe(ctx);
    if (name == "fig5_ann_step") return step_recipe(ctx, name, ControllerKind::ann);
    if (name == "fig6_mpc_step") return step_recipe(ctx, name, ControllerKind::mpc);
    if (name == "fig7_ann_steady") return steady_recipe(ctx, name, ControllerKind::ann);
    if (name == "fig8_mpc_steady") return steady_recipe(ctx, name, ControllerKind::mpc);
    if (name == "fig11_ann_mismatch") return mismatch_recipe(ctx, name, ControllerKind::ann);
    if (name == "fig12_mpc_mismatch") return mismatch_recipe(ctx, name, ControllerKind::mpc);
    if (name == "fig13_thd_bars") return thd_bars_recipe(ctx);
    if (name == "table2_feature_study") return feature_study_recipe(ctx);
    if (name == "table3_gen_dataset") return gen_dataset_recipe(ctx);
    if (name == "table4_train") return train_recipe(ctx);
    throw std::invalid_argument("unknown recipe: " + name + " (see `fcmli run-recipe --list`)");
}

}  // namespace fcmli
