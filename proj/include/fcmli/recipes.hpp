#pragma once

// =============================================================================
// Experiment recipes.
//
// Each recipe reproduces one figure or table of the study as plot-ready CSV
// (no rendering): step response, steady state plus spectrum, inductance
// mismatch, the THD bar comparison, the feature-set study, the training
// corpus and the training run itself. Recipes are deterministic given their
// seed and write everything below <out>/<recipe-name>/.
// =============================================================================

#include <cstdint>
#include <string>
#include <vector>

namespace fcmli {

struct RecipeContext {
    std::string out_dir = "out";
    std::string model_path;   // recipes driving the network policy
    std::string models_dir;   // feature study: model_X1.txt .. model_X5.txt
    std::string input_path;   // optional pre-built dataset for training
    std::uint64_t seed = 0;
    double duration = -1.0;   // <0 keeps the recipe default
    double warmup = -1.0;
    std::vector<int> hidden_sizes;  // empty keeps the training default
    int max_epochs = -1;
    int patience = -1;
    int threads = 0;
};

const std::vector<std::string>& recipe_names();

/// Runs one named recipe; returns the artifact directory.
std::string run_recipe(const std::string& name, const RecipeContext& ctx);

}  // namespace fcmli
