#include "fcmli/dataset.hpp"

#include "fcmli/controller.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <future>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fcmli {

FeatureVariant parse_variant(const std::string& name) {
    if (name == "X1") return FeatureVariant::X1;
    if (name == "X2") return FeatureVariant::X2;
    if (name == "X3") return FeatureVariant::X3;
    if (name == "X4") return FeatureVariant::X4;
    if (name == "X5") return FeatureVariant::X5;
    throw std::invalid_argument("unknown feature variant: " + name);
}

std::string variant_name(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::X1: return "X1";
        case FeatureVariant::X2: return "X2";
        case FeatureVariant::X3: return "X3";
        case FeatureVariant::X4: return "X4";
        case FeatureVariant::X5: return "X5";
    }
    throw std::logic_error("unreachable feature variant");
}

int feature_count(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::X1: return 9;
        case FeatureVariant::X2: return 8;
        case FeatureVariant::X3: return 8;
        case FeatureVariant::X4: return 7;
        case FeatureVariant::X5: return 6;
    }
    throw std::logic_error("unreachable feature variant");
}

std::vector<std::string> feature_names(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::X1:
            return {"v1", "v2", "i_ref", "i", "dv1", "dv2", "di", "s_opt_prev", "v_ph"};
        case FeatureVariant::X2:
            return {"v1", "v2", "i_ref", "i", "dv1", "dv2", "di2", "s_opt_prev"};
        case FeatureVariant::X3:
            return {"v1", "v2", "i_ref", "i", "dv1", "dv2", "di", "s_opt_prev"};
        case FeatureVariant::X4:
            return {"v2", "i_ref", "i", "dv1", "dv2", "di", "s_opt_prev"};
        case FeatureVariant::X5:
            return {"i_ref", "i", "dv1", "dv2", "di", "s_opt_prev"};
    }
    throw std::logic_error("unreachable feature variant");
}

int s_opt_position(FeatureVariant v) {
    switch (v) {
        case FeatureVariant::X1: return 7;
        case FeatureVariant::X2: return 7;
        case FeatureVariant::X3: return 7;
        case FeatureVariant::X4: return 6;
        case FeatureVariant::X5: return 5;
    }
    throw std::logic_error("unreachable feature variant");
}

std::vector<double> extract_features(FeatureVariant variant, const PhaseSnapshot& snap) {
    const double dv1 = snap.vdc / 3.0 - snap.v1;
    const double dv2 = 2.0 * snap.vdc / 3.0 - snap.v2;
    const double di = snap.i_ref - snap.i;
    const auto s_opt = static_cast<double>(snap.s_opt_prev);
    switch (variant) {
        case FeatureVariant::X1:
            return {snap.v1, snap.v2, snap.i_ref, snap.i, dv1, dv2, di, s_opt, snap.v_ph};
        case FeatureVariant::X2:
            return {snap.v1, snap.v2, snap.i_ref, snap.i, dv1, dv2, 2.0 * di, s_opt};
        case FeatureVariant::X3:
            return {snap.v1, snap.v2, snap.i_ref, snap.i, dv1, dv2, di, s_opt};
        case FeatureVariant::X4:
            return {snap.v2, snap.i_ref, snap.i, dv1, dv2, di, s_opt};
        case FeatureVariant::X5:
            return {snap.i_ref, snap.i, dv1, dv2, di, s_opt};
    }
    throw std::logic_error("unreachable feature variant");
}

void SplitSpec::validate() const {
    if (train_fraction <= 0.0 || val_fraction < 0.0 || test_fraction < 0.0) {
        throw std::invalid_argument("SplitSpec: fractions must be non-negative, train positive");
    }
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        throw std::invalid_argument("SplitSpec: fractions must sum to 1");
    }
}

SplitResult split_dataset(const Dataset& data, const SplitSpec& spec) {
    spec.validate();
    if (data.records.empty()) {
        throw std::invalid_argument("split_dataset: dataset is empty");
    }
    const std::size_t n = data.records.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    // Hand-rolled Fisher-Yates: identical stream on every standard library.
    std::mt19937_64 rng(spec.seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = rng() % (i + 1);
        std::swap(order[i], order[j]);
    }

    const auto n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * n));
    const auto n_test = static_cast<std::size_t>(std::floor(spec.test_fraction * n));
    const std::size_t n_train = n - n_val - n_test;

    SplitResult out;
    for (Dataset* part : {&out.train, &out.val, &out.test}) {
        part->variant = data.variant;
        part->scenario_ids = data.scenario_ids;
    }
    out.train.records.reserve(n_train);
    out.val.records.reserve(n_val);
    out.test.records.reserve(n_test);
    for (std::size_t k = 0; k < n; ++k) {
        const LabeledRecord& rec = data.records[order[k]];
        if (k < n_train) {
            out.train.records.push_back(rec);
        } else if (k < n_train + n_val) {
            out.val.records.push_back(rec);
        } else {
            out.test.records.push_back(rec);
        }
    }
    return out;
}

namespace {

struct ScenarioOutput {
    std::vector<LabeledRecord> records;
    std::array<std::size_t, 8> histogram{};
    std::size_t audit_checked = 0;
    std::size_t audit_mismatches = 0;
    bool aborted = false;
    std::string error;
};

ScenarioOutput run_scenario(const ScenarioConfig& scenario, FeatureVariant variant,
                            const GenerateOptions& opts, std::uint16_t scenario_index) {
    ScenarioOutput out;

    RunScript script;
    script.kind = ControllerKind::mpc;
    script.scenario = scenario;
    if (opts.duration >= 0.0) {
        script.scenario.duration = opts.duration;
    }
    if (opts.warmup >= 0.0) {
        script.scenario.warmup = opts.warmup;
    }
    script.weights = opts.weights;
    script.record_substeps = false;

    const ControllerModel model = ControllerModel::from_params(script.scenario.params, opts.weights);
    const PredictorConstants consts = model.constants();
    const std::size_t audit_stride =
        opts.audit_fraction > 0.0
            ? std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / opts.audit_fraction)))
            : 0;

    std::size_t record_counter = 0;
    auto on_step = [&](const StepContext& ctx) {
        if (!ctx.recorded) {
            return;
        }
        for (int x = 0; x < 3; ++x) {
            PhaseSnapshot snap;
            snap.v1 = ctx.meas.v1[x];
            snap.v2 = ctx.meas.v2[x];
            snap.i_ref = ctx.refs[x].i_ref;
            snap.i = ctx.meas.i[x];
            snap.vdc = script.scenario.params.vdc;
            snap.v_ph = phase_output_voltage(ctx.applied[x], ctx.meas.v1[x], ctx.meas.v2[x],
                                             script.scenario.params.vdc);
            snap.s_opt_prev = ctx.applied[x].index();

            LabeledRecord rec;
            const auto feats = extract_features(variant, snap);
            std::copy(feats.begin(), feats.end(), rec.features.begin());
            rec.label = static_cast<std::uint8_t>(ctx.next[x].index());
            rec.scenario = scenario_index;
            rec.phase = static_cast<std::uint8_t>(x);
            out.records.push_back(rec);
            out.histogram[rec.label]++;

            if (audit_stride != 0 && record_counter % audit_stride == 0) {
                const PhaseMeasurement pm{ctx.meas.i[x], ctx.meas.v1[x], ctx.meas.v2[x]};
                const Selection sel = select_optimal(pm, ctx.refs[x], opts.weights, consts, model,
                                                     ctx.v_common);
                ++out.audit_checked;
                if (sel.state.index() != ctx.next[x].index()) {
                    ++out.audit_mismatches;
                }
            }
            ++record_counter;
        }
    };

    try {
        run_closed_loop(script, nullptr, on_step);
    } catch (const std::exception& ex) {
        out.aborted = true;
        out.error = ex.what();
        out.records.clear();
        out.histogram = {};
        out.audit_checked = 0;
        out.audit_mismatches = 0;
    }
    return out;
}

nlohmann::json params_json(const SystemParams& p) {
    return {{"vdc", p.vdc},       {"r", p.r},
            {"l", p.l},           {"c1", p.c1},
            {"c2", p.c2},         {"ts", p.ts},
            {"f0", p.f0},         {"iref_amp", p.iref_amp},
            {"plant_substep", p.plant_substep}};
}

}  // namespace

GenerationResult generate_dataset(const std::vector<ScenarioConfig>& scenarios,
                                  FeatureVariant variant, const GenerateOptions& opts) {
    for (const auto& sc : scenarios) {
        sc.validate();
    }

    std::vector<ScenarioOutput> outputs(scenarios.size());
    if (opts.parallel && scenarios.size() > 1) {
        std::vector<std::future<ScenarioOutput>> futures;
        futures.reserve(scenarios.size());
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            futures.push_back(std::async(std::launch::async, run_scenario, scenarios[s], variant,
                                         opts, static_cast<std::uint16_t>(s)));
        }
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            outputs[s] = futures[s].get();
        }
    } else {
        for (std::size_t s = 0; s < scenarios.size(); ++s) {
            outputs[s] = run_scenario(scenarios[s], variant, opts, static_cast<std::uint16_t>(s));
        }
    }

    GenerationResult result;
    result.dataset.variant = variant;
    nlohmann::json scenarios_json = nlohmann::json::array();
    std::array<std::size_t, 8> total_hist{};
    std::size_t total_records = 0;
    std::size_t audit_checked = 0, audit_mismatches = 0;

    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        const ScenarioOutput& so = outputs[s];
        result.dataset.scenario_ids.push_back(scenarios[s].id);
        result.dataset.records.insert(result.dataset.records.end(), so.records.begin(),
                                      so.records.end());
        nlohmann::json sj;
        sj["id"] = scenarios[s].id;
        sj["params"] = params_json(scenarios[s].params);
        sj["duration"] = opts.duration >= 0.0 ? opts.duration : scenarios[s].duration;
        sj["warmup"] = opts.warmup >= 0.0 ? opts.warmup : scenarios[s].warmup;
        sj["records"] = so.records.size();
        sj["class_histogram"] = so.histogram;
        sj["audit_checked"] = so.audit_checked;
        sj["audit_mismatches"] = so.audit_mismatches;
        sj["aborted"] = so.aborted;
        if (so.aborted) {
            sj["error"] = so.error;
        }
        scenarios_json.push_back(sj);

        total_records += so.records.size();
        for (int c = 0; c < 8; ++c) {
            total_hist[c] += so.histogram[c];
        }
        audit_checked += so.audit_checked;
        audit_mismatches += so.audit_mismatches;
    }

    nlohmann::json manifest;
    manifest["format_version"] = 1;
    manifest["variant"] = variant_name(variant);
    manifest["weights"] = {{"current", opts.weights.current_weight},
                           {"voltage", opts.weights.voltage_weight}};
    manifest["seed"] = opts.seed;
    manifest["scenarios"] = scenarios_json;
    manifest["total_records"] = total_records;
    manifest["class_histogram"] = total_hist;
    manifest["audit_checked"] = audit_checked;
    manifest["audit_mismatches"] = audit_mismatches;
    result.manifest = std::move(manifest);
    return result;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    std::fprintf(f, "scenario_id,phase");
    for (const auto& name : feature_names(data.variant)) {
        std::fprintf(f, ",%s", name.c_str());
    }
    std::fprintf(f, ",s_opt_next\n");
    const int count = feature_count(data.variant);
    for (const auto& rec : data.records) {
        const char* sid = rec.scenario < data.scenario_ids.size()
                              ? data.scenario_ids[rec.scenario].c_str()
                              : "?";
        std::fprintf(f, "%s,%c", sid, static_cast<char>('a' + rec.phase));
        for (int c = 0; c < count; ++c) {
            std::fprintf(f, ",%.17g", rec.features[c]);
        }
        std::fprintf(f, ",%d\n", static_cast<int>(rec.label));
    }
    std::fclose(f);
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset file: " + path);
    }
    std::string header;
    if (!std::getline(in, header)) {
        throw std::runtime_error("empty dataset file: " + path);
    }

    // Infer the variant from the feature block of the header.
    FeatureVariant variant = FeatureVariant::X2;
    bool matched = false;
    for (const FeatureVariant v : {FeatureVariant::X1, FeatureVariant::X2, FeatureVariant::X3,
                                   FeatureVariant::X4, FeatureVariant::X5}) {
        std::string expect = "scenario_id,phase";
        for (const auto& name : feature_names(v)) {
            expect += "," + name;
        }
        expect += ",s_opt_next";
        if (header == expect) {
            variant = v;
            matched = true;
            break;
        }
    }
    if (!matched) {
        throw std::runtime_error("dataset header does not match any feature variant: " + path);
    }

    Dataset data;
    data.variant = variant;
    const int count = feature_count(variant);
    std::string line;
    std::vector<std::string> ids;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        LabeledRecord rec;
        const char* p = line.c_str();
        const char* comma = std::strchr(p, ',');
        if (comma == nullptr) {
            throw std::runtime_error("malformed dataset row in " + path);
        }
        const std::string sid(p, comma - p);
        auto it = std::find(ids.begin(), ids.end(), sid);
        if (it == ids.end()) {
            ids.push_back(sid);
            rec.scenario = static_cast<std::uint16_t>(ids.size() - 1);
        } else {
            rec.scenario = static_cast<std::uint16_t>(it - ids.begin());
        }
        p = comma + 1;
        if (*p == '\0' || *(p + 1) != ',') {
            throw std::runtime_error("malformed phase tag in " + path);
        }
        rec.phase = static_cast<std::uint8_t>(*p - 'a');
        p += 2;
        char* end = nullptr;
        for (int c = 0; c < count; ++c) {
            rec.features[c] = std::strtod(p, &end);
            if (end == p) {
                throw std::runtime_error("malformed dataset row in " + path);
            }
            p = (*end == ',') ? end + 1 : end;
        }
        rec.label = static_cast<std::uint8_t>(std::strtol(p, &end, 10));
        data.records.push_back(rec);
    }
    data.scenario_ids = std::move(ids);
    return data;
}

void write_manifest(const nlohmann::json& manifest, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    const std::string text = manifest.dump(2);
    std::fwrite(text.data(), 1, text.size(), f);
    std::fputc('\n', f);
    std::fclose(f);
}

std::array<std::size_t, 8> class_histogram(const Dataset& data) {
    std::array<std::size_t, 8> hist{};
    for (const auto& rec : data.records) {
        hist[rec.label]++;
    }
    return hist;
}

}  // namespace fcmli
