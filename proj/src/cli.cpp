#include "fcmli/cli.hpp"

#include "fcmli/analysis.hpp"
#include "fcmli/ann.hpp"
#include "fcmli/controller.hpp"
#include "fcmli/dataset.hpp"
#include "fcmli/recipes.hpp"
#include "fcmli/scenarios.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

namespace fcmli {

namespace {

namespace fs = std::filesystem;

/// Expands "C1..C11", "S2", comma lists and "all-C"/"all-S" into scenario ids.
std::vector<std::string> expand_conditions(const std::string& spec) {
    std::vector<std::string> out;
    std::string token;
    std::stringstream ss(spec);
    while (std::getline(ss, token, ',')) {
        if (token.empty()) {
            continue;
        }
        if (token == "all-C") {
            for (const auto& row : training_condition_rows()) out.emplace_back(row.id);
            continue;
        }
        if (token == "all-S") {
            for (const auto& row : operating_point_rows()) out.emplace_back(row.id);
            continue;
        }
        const auto range = token.find("..");
        if (range != std::string::npos) {
            const std::string lo = token.substr(0, range);
            const std::string hi = token.substr(range + 2);
            if (lo.empty() || hi.empty() || lo[0] != hi[0]) {
                throw std::invalid_argument("bad condition range: " + token);
            }
            const char family = lo[0];
            const int a = std::stoi(lo.substr(1));
            const int b = std::stoi(hi.substr(1));
            for (int k = a; k <= b; ++k) {
                out.push_back(family + std::to_string(k));
            }
            continue;
        }
        out.push_back(token);
    }
    if (out.empty()) {
        throw std::invalid_argument("no conditions given");
    }
    return out;
}

/// "kind@time=value", e.g. "set_iref_amp@0.05=5".
RunEvent parse_event_flag(const std::string& text) {
    const auto at = text.find('@');
    const auto eq = text.find('=', at == std::string::npos ? 0 : at);
    if (at == std::string::npos || eq == std::string::npos) {
        throw std::invalid_argument("event must look like kind@time=value: " + text);
    }
    RunEvent ev;
    ev.kind = parse_event_kind(text.substr(0, at));
    ev.time = std::stod(text.substr(at + 1, eq - at - 1));
    ev.value = std::stod(text.substr(eq + 1));
    return ev;
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    out << text;
}

int cmd_simulate(const std::string& scenario_id, const std::string& controller,
                 const std::string& model_path, const std::string& config_path,
                 const std::vector<std::string>& event_flags, double duration, double warmup,
                 double lambda1, double lambda2, const std::string& out_dir) {
    RunScript script;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            throw std::runtime_error("cannot open config: " + config_path);
        }
        nlohmann::json j;
        in >> j;
        script = script_from_json(j);
    } else {
        script.scenario = builtin_scenario(scenario_id);
        script.kind = controller == "ann" ? ControllerKind::ann : ControllerKind::mpc;
        script.scenario.warmup = 0.0;
    }
    if (!model_path.empty()) {
        script.model_path = model_path;
    }
    if (duration >= 0.0) script.scenario.duration = duration;
    if (warmup >= 0.0) script.scenario.warmup = warmup;
    script.weights.current_weight = lambda1;
    script.weights.voltage_weight = lambda2;
    for (const auto& flag : event_flags) {
        script.events.push_back(parse_event_flag(flag));
    }

    MlpModel model;
    const MlpModel* model_ptr = nullptr;
    if (script.kind == ControllerKind::ann) {
        if (script.model_path.empty()) {
            throw std::invalid_argument("simulate: ann controller needs --model");
        }
        model = load_model(script.model_path);
        model_ptr = &model;
    }

    fs::create_directories(out_dir);
    const TimeSeriesRun run = run_closed_loop(script, model_ptr);
    const std::string csv = out_dir + "/run.csv";
    write_run(run, csv);
    std::printf("wrote %s (%zu samples)\n", csv.c_str(), run.series.size());
    return 0;
}

int cmd_gen_dataset(const std::string& conditions, const std::string& variant_name_in,
                    std::uint64_t seed, double duration, double warmup, int steps_per_condition,
                    const std::string& out_dir) {
    const FeatureVariant variant = parse_variant(variant_name_in);
    std::vector<ScenarioConfig> scenarios;
    for (const auto& id : expand_conditions(conditions)) {
        scenarios.push_back(builtin_scenario(id));
    }
    GenerateOptions opts;
    opts.duration = duration;
    opts.warmup = warmup;
    opts.seed = seed;
    if (steps_per_condition > 0) {
        // Equal record count per condition: duration scales with the
        // condition's sampling period.
        for (auto& sc : scenarios) {
            sc.duration = steps_per_condition * sc.params.ts;
        }
        opts.duration = -1.0;
    }
    const GenerationResult gen = generate_dataset(scenarios, variant, opts);

    fs::create_directories(out_dir);
    write_dataset_csv(gen.dataset, out_dir + "/dataset.csv");
    write_manifest(gen.manifest, out_dir + "/manifest.json");
    std::printf("wrote %s/dataset.csv (%zu records)\n", out_dir.c_str(),
                gen.dataset.records.size());
    return 0;
}

int cmd_split(const std::string& input, std::uint64_t seed, const std::string& out_dir) {
    const Dataset data = read_dataset_csv(input);
    SplitSpec spec;
    spec.seed = seed;
    const SplitResult split = split_dataset(data, spec);
    fs::create_directories(out_dir);
    write_dataset_csv(split.train, out_dir + "/train.csv");
    write_dataset_csv(split.val, out_dir + "/val.csv");
    write_dataset_csv(split.test, out_dir + "/test.csv");
    std::printf("split %zu -> %zu/%zu/%zu\n", data.records.size(), split.train.records.size(),
                split.val.records.size(), split.test.records.size());
    return 0;
}

int cmd_train(const std::string& train_path, const std::string& val_path,
              const std::string& test_path, const std::vector<int>& hidden, int max_epochs,
              int patience, std::uint64_t seed, int threads, const std::string& out_dir) {
    const Dataset train_set = read_dataset_csv(train_path);
    const Dataset val_set = read_dataset_csv(val_path);

    TrainConfig cfg;
    if (!hidden.empty()) {
        cfg.hidden_sizes = hidden;
    }
    if (max_epochs > 0) cfg.max_epochs = max_epochs;
    if (patience > 0) cfg.patience = patience;
    cfg.seed = seed;
    cfg.threads = threads;

    auto [model, report] = train(train_set, val_set, cfg);
    if (!test_path.empty()) {
        const Dataset test_set = read_dataset_csv(test_path);
        report.test = evaluate(model, test_set);
    }

    fs::create_directories(out_dir);
    save_model(model, out_dir + "/model.txt");
    write_text(report_to_json(report).dump(2) + "\n", out_dir + "/train_report.json");
    std::printf("hidden=%d val_error=%.6f (epoch %d)", report.best_hidden_size,
                report.best_val_error, report.best_epoch);
    if (!test_path.empty()) {
        std::printf(" test_accuracy=%.2f%%", 100.0 * report.test.accuracy);
    }
    std::printf("\nwrote %s/model.txt\n", out_dir.c_str());
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& out_dir) {
    const MlpModel model = load_model(model_path);
    const Dataset data = read_dataset_csv(data_path);
    const EvalResult res = evaluate(model, data);
    const nlohmann::json j = eval_to_json(res);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text(j.dump(2) + "\n", out_dir + "/eval.json");
    }
    std::printf("accuracy %.4f on %zu records\n", res.accuracy, res.count);
    return 0;
}

int cmd_thd(const std::string& input, const std::string& channel, double f0, int cycles,
            int max_harmonic, const std::string& out_path) {
    const TimeSeries series = read_timeseries_csv(input);
    const std::vector<double>* ch = nullptr;
    static const char* names[] = {"i_a", "i_b", "i_c"};
    for (int x = 0; x < 3; ++x) {
        if (channel == names[x]) {
            ch = &series.i[x];
        }
    }
    if (ch == nullptr) {
        throw std::invalid_argument("thd: channel must be one of i_a, i_b, i_c");
    }
    if (series.t.size() < 2) {
        throw std::runtime_error("thd: input too short");
    }
    const double dt = series.t[1] - series.t[0];
    const ThdReport rep = thd(*ch, dt, f0, cycles, max_harmonic);
    const nlohmann::json j = {{"thd_percent", rep.thd_percent},
                              {"fundamental_amp", rep.fundamental},
                              {"cycles", rep.cycles},
                              {"max_harmonic", rep.max_harmonic},
                              {"window_start", rep.window_start},
                              {"f0", rep.f0}};
    if (!out_path.empty()) {
        write_text(j.dump(2) + "\n", out_path);
    }
    std::printf("%.17g\n", rep.thd_percent);
    return 0;
}

int cmd_compare(const std::vector<std::string>& run_paths, int cycles, int max_harmonic,
                const std::string& out_dir) {
    std::vector<TimeSeriesRun> runs(run_paths.size());
    std::vector<RunForComparison> inputs;
    for (std::size_t k = 0; k < run_paths.size(); ++k) {
        runs[k].series = read_timeseries_csv(run_paths[k]);
        std::ifstream meta_in(run_paths[k] + ".meta.json");
        if (!meta_in) {
            throw std::runtime_error("missing metadata sidecar: " + run_paths[k] + ".meta.json");
        }
        meta_in >> runs[k].meta;
        inputs.push_back({runs[k].meta.at("scenario").at("id").get<std::string>(),
                          runs[k].meta.at("controller").get<std::string>(), &runs[k]});
    }
    const auto rows = compare_runs(inputs, cycles, max_harmonic);
    fs::create_directories(out_dir);
    write_comparison_csv(rows, out_dir + "/comparison.csv");
    std::printf("wrote %s/comparison.csv (%zu rows)\n", out_dir.c_str(), rows.size());
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Flying-capacitor inverter toolkit: MPC expert, network policy, experiments"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string out_dir = "out";
    app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--out", out_dir, "Artifact directory")->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run one closed-loop scenario");
    std::string sim_scenario = "nominal", sim_controller = "mpc", sim_model, sim_config;
    std::vector<std::string> sim_events;
    double sim_duration = -1.0, sim_warmup = -1.0, lambda1 = 1.0, lambda2 = 1.0;
    sim->add_option("--scenario", sim_scenario, "Built-in scenario id (nominal, S1..S16, C1..C11)")
        ->capture_default_str();
    sim->add_option("--controller", sim_controller, "mpc or ann")->capture_default_str();
    sim->add_option("--model", sim_model, "Trained model file (ann)");
    sim->add_option("--config", sim_config, "Run script JSON (overrides --scenario)");
    sim->add_option("--event", sim_events, "Scripted event kind@time=value (repeatable)");
    sim->add_option("--duration", sim_duration, "Recorded span [s]");
    sim->add_option("--warmup", sim_warmup, "Discarded leading span [s]");
    sim->add_option("--lambda1", lambda1, "Current-error weight")->capture_default_str();
    sim->add_option("--lambda2", lambda2, "Capacitor-error weight")->capture_default_str();

    // gen-dataset
    auto* gen = app.add_subcommand("gen-dataset", "Generate the expert-labeled corpus");
    std::string gen_conditions = "C1..C11", gen_variant = "X2";
    double gen_duration = 0.28, gen_warmup = 0.02;
    int gen_steps = 0;
    gen->add_option("--conditions", gen_conditions, "Ids, ranges or all-C/all-S")
        ->capture_default_str();
    gen->add_option("--variant", gen_variant, "Feature encoding X1..X5")->capture_default_str();
    gen->add_option("--duration", gen_duration, "Recorded span per condition [s]")
        ->capture_default_str();
    gen->add_option("--warmup", gen_warmup, "Discarded transient per condition [s]")
        ->capture_default_str();
    gen->add_option("--steps-per-condition", gen_steps,
                    "Recorded controller periods per condition (0 = use --duration)")
        ->capture_default_str();

    // split
    auto* split = app.add_subcommand("split", "Shuffle and partition a dataset 70/15/15");
    std::string split_input;
    split->add_option("--input", split_input, "Dataset CSV")->required();

    // train
    auto* tr = app.add_subcommand("train", "Train the classifier on a split corpus");
    std::string train_path, val_path, test_path;
    std::vector<int> hidden;
    int max_epochs = -1, patience = -1, threads = 0;
    tr->add_option("--train", train_path, "Training split CSV")->required();
    tr->add_option("--val", val_path, "Validation split CSV")->required();
    tr->add_option("--test", test_path, "Held-out test split CSV");
    tr->add_option("--hidden", hidden, "Hidden sizes to sweep");
    tr->add_option("--max-epochs", max_epochs, "Epoch cap per sweep point");
    tr->add_option("--patience", patience, "Early-stop patience (epochs)");
    tr->add_option("--threads", threads, "Worker threads (0 = hardware)");

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a model on a labeled dataset");
    std::string eval_model, eval_data;
    ev->add_option("--model", eval_model, "Model file")->required();
    ev->add_option("--data", eval_data, "Labeled dataset CSV")->required();

    // thd
    auto* th = app.add_subcommand("thd", "THD of one current channel of a run CSV");
    std::string thd_input, thd_channel = "i_a", thd_out;
    double thd_f0 = 50.0;
    int thd_cycles = 5, thd_harmonics = 100;
    th->add_option("--input", thd_input, "Run CSV")->required();
    th->add_option("--channel", thd_channel, "i_a, i_b or i_c")->capture_default_str();
    th->add_option("--f0", thd_f0, "Fundamental frequency [Hz]")->capture_default_str();
    th->add_option("--cycles", thd_cycles, "Window length in fundamental cycles")
        ->capture_default_str();
    th->add_option("--max-harmonic", thd_harmonics, "Highest harmonic order")
        ->capture_default_str();
    th->add_option("--report", thd_out, "Write the full report JSON here");

    // compare
    auto* cmp = app.add_subcommand("compare", "Comparison table over recorded runs");
    std::vector<std::string> cmp_runs;
    int cmp_cycles = 5, cmp_harmonics = 100;
    cmp->add_option("--runs", cmp_runs, "Run CSVs (need .meta.json sidecars)")->required();
    cmp->add_option("--cycles", cmp_cycles, "Analysis window [cycles]")->capture_default_str();
    cmp->add_option("--max-harmonic", cmp_harmonics, "Highest harmonic order")
        ->capture_default_str();

    // run-recipe
    auto* rec = app.add_subcommand("run-recipe", "Reproduce one figure/table of the study");
    std::string recipe_name, rec_model, rec_models_dir, rec_input;
    double rec_duration = -1.0, rec_warmup = -1.0;
    std::vector<int> rec_hidden;
    int rec_epochs = -1, rec_patience = -1, rec_threads = 0;
    bool rec_list = false;
    rec->add_option("name", recipe_name, "Recipe name");
    rec->add_flag("--list", rec_list, "List available recipes");
    rec->add_option("--model", rec_model, "Trained model file");
    rec->add_option("--models", rec_models_dir, "Directory with model_X1.txt .. model_X5.txt");
    rec->add_option("--input", rec_input, "Pre-built dataset CSV (training recipe)");
    rec->add_option("--duration", rec_duration, "Recorded span override [s]");
    rec->add_option("--warmup", rec_warmup, "Warmup override [s]");
    rec->add_option("--hidden", rec_hidden, "Hidden sizes to sweep (training recipe)");
    rec->add_option("--max-epochs", rec_epochs, "Epoch cap (training recipe)");
    rec->add_option("--patience", rec_patience, "Early-stop patience (training recipe)");
    rec->add_option("--threads", rec_threads, "Worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_scenario, sim_controller, sim_model, sim_config, sim_events,
                                sim_duration, sim_warmup, lambda1, lambda2, out_dir);
        }
        if (gen->parsed()) {
            return cmd_gen_dataset(gen_conditions, gen_variant, seed, gen_duration, gen_warmup,
                                   gen_steps, out_dir);
        }
        if (split->parsed()) {
            return cmd_split(split_input, seed, out_dir);
        }
        if (tr->parsed()) {
            return cmd_train(train_path, val_path, test_path, hidden, max_epochs, patience, seed,
                             threads, out_dir);
        }
        if (ev->parsed()) {
            return cmd_eval(eval_model, eval_data, out_dir);
        }
        if (th->parsed()) {
            return cmd_thd(thd_input, thd_channel, thd_f0, thd_cycles, thd_harmonics, thd_out);
        }
        if (cmp->parsed()) {
            return cmd_compare(cmp_runs, cmp_cycles, cmp_harmonics, out_dir);
        }
        if (rec->parsed()) {
            if (rec_list) {
                for (const auto& name : recipe_names()) {
                    std::printf("%s\n", name.c_str());
                }
                return 0;
            }
            if (recipe_name.empty()) {
                std::fprintf(stderr, "run-recipe: missing recipe name (try --list)\n");
                return 1;
            }
            RecipeContext ctx;
            ctx.out_dir = out_dir;
            ctx.model_path = rec_model;
            ctx.models_dir = rec_models_dir;
            ctx.input_path = rec_input;
            ctx.seed = seed;
            ctx.duration = rec_duration;
            ctx.warmup = rec_warmup;
            ctx.hidden_sizes = rec_hidden;
            ctx.max_epochs = rec_epochs;
            ctx.patience = rec_patience;
            ctx.threads = rec_threads;
            const std::string dir = run_recipe(recipe_name, ctx);
            std::printf("artifacts in %s\n", dir.c_str());
            return 0;
        }
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return 1;
    }
    return 1;
}

}  // namespace fcmli
