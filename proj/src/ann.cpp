#include "fcmli/ann.hpp"

#include "fcmli/scg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fcmli {

namespace {

constexpr int kClasses = MlpModel::kClasses;

std::size_t param_count(int input_size, int hidden_size) {
    return static_cast<std::size_t>(hidden_size) * input_size + hidden_size +
           static_cast<std::size_t>(kClasses) * hidden_size + kClasses;
}

struct ParamLayout {
    int input_size;
    int hidden_size;
    std::size_t w1_off = 0;
    std::size_t b1_off;
    std::size_t w2_off;
    std::size_t b2_off;

    ParamLayout(int m, int j) : input_size(m), hidden_size(j) {
        b1_off = static_cast<std::size_t>(j) * m;
        w2_off = b1_off + j;
        b2_off = w2_off + static_cast<std::size_t>(kClasses) * j;
    }

    [[nodiscard]] std::size_t total() const { return b2_off + kClasses; }
};

void pack_params(const MlpModel& m, std::vector<double>& theta) {
    theta.clear();
    theta.reserve(param_count(m.input_size, m.hidden_size));
    theta.insert(theta.end(), m.w1.begin(), m.w1.end());
    theta.insert(theta.end(), m.b1.begin(), m.b1.end());
    theta.insert(theta.end(), m.w2.begin(), m.w2.end());
    theta.insert(theta.end(), m.b2.begin(), m.b2.end());
}

void unpack_params(const std::vector<double>& theta, MlpModel& m) {
    const ParamLayout lay(m.input_size, m.hidden_size);
    m.w1.assign(theta.begin(), theta.begin() + lay.b1_off);
    m.b1.assign(theta.begin() + lay.b1_off, theta.begin() + lay.w2_off);
    m.w2.assign(theta.begin() + lay.w2_off, theta.begin() + lay.b2_off);
    m.b2.assign(theta.begin() + lay.b2_off, theta.end());
}

/// Design matrix: expanded, standardized features plus labels.
struct DesignMatrix {
    int input_size = 0;
    std::size_t count = 0;
    std::vector<double> x;        // count x input_size, row-major
    std::vector<std::uint8_t> y;  // count
};

DesignMatrix build_matrix(const Dataset& data, const std::vector<double>& mean,
                          const std::vector<double>& scale) {
    const int m = expanded_input_size(data.variant);
    DesignMatrix dm;
    dm.input_size = m;
    dm.count = data.records.size();
    dm.x.resize(dm.count * m);
    dm.y.resize(dm.count);
    const int raw_count = feature_count(data.variant);
    for (std::size_t r = 0; r < dm.count; ++r) {
        const auto& rec = data.records[r];
        auto expanded = expand_features(
            data.variant, std::span<const double>(rec.features.data(), raw_count));
        for (int c = 0; c < m; ++c) {
            dm.x[r * m + c] = (expanded[c] - mean[c]) / scale[c];
        }
        dm.y[r] = rec.label;
    }
    return dm;
}

/// Mean and standard deviation per expanded component; near-constant
/// components get unit scale so standardization stays well-defined.
void compute_stats(const Dataset& data, std::vector<double>& mean, std::vector<double>& scale) {
    const int m = expanded_input_size(data.variant);
    const int raw_count = feature_count(data.variant);
    mean.assign(m, 0.0);
    scale.assign(m, 1.0);
    if (data.records.empty()) {
        return;
    }
    std::vector<double> sum(m, 0.0), sum_sq(m, 0.0);
    for (const auto& rec : data.records) {
        auto expanded = expand_features(
            data.variant, std::span<const double>(rec.features.data(), raw_count));
        for (int c = 0; c < m; ++c) {
            sum[c] += expanded[c];
            sum_sq[c] += expanded[c] * expanded[c];
        }
    }
    const double n = static_cast<double>(data.records.size());
    for (int c = 0; c < m; ++c) {
        mean[c] = sum[c] / n;
        const double var = std::max(0.0, sum_sq[c] / n - mean[c] * mean[c]);
        const double sd = std::sqrt(var);
        scale[c] = (sd > 1e-12) ? sd : 1.0;
    }
}

/// Full-batch cross-entropy objective over a design matrix. Work splits
/// into a fixed number of chunks reduced in chunk order, so results do not
/// depend on the thread count.
class CrossEntropyObjective {
public:
    static constexpr int kChunks = 16;

    CrossEntropyObjective(const DesignMatrix& dm, int hidden_size, int threads)
        : dm_(dm),
          lay_(dm.input_size, hidden_size),
          threads_(std::max(1, threads)) {}

    [[nodiscard]] std::size_t num_params() const { return lay_.total(); }

    double loss_and_grad(const std::vector<double>& theta, std::vector<double>& grad) const {
        grad.assign(lay_.total(), 0.0);
        std::array<double, kChunks> chunk_loss{};
        std::vector<std::vector<double>> chunk_grad(kChunks);
        run_chunks([&](int c, std::size_t lo, std::size_t hi) {
            chunk_grad[c].assign(lay_.total(), 0.0);
            chunk_loss[c] = chunk_pass(theta, lo, hi, &chunk_grad[c]);
        });
        double loss = 0.0;
        for (int c = 0; c < kChunks; ++c) {
            loss += chunk_loss[c];
            if (!chunk_grad[c].empty()) {
                for (std::size_t k = 0; k < grad.size(); ++k) {
                    grad[k] += chunk_grad[c][k];
                }
            }
        }
        const double inv_n = dm_.count > 0 ? 1.0 / static_cast<double>(dm_.count) : 0.0;
        for (auto& g : grad) {
            g *= inv_n;
        }
        return loss * inv_n;
    }

    double loss_only(const std::vector<double>& theta) const {
        std::array<double, kChunks> chunk_loss{};
        run_chunks([&](int c, std::size_t lo, std::size_t hi) {
            chunk_loss[c] = chunk_pass(theta, lo, hi, nullptr);
        });
        double loss = 0.0;
        for (int c = 0; c < kChunks; ++c) {
            loss += chunk_loss[c];
        }
        return dm_.count > 0 ? loss / static_cast<double>(dm_.count) : 0.0;
    }

private:
    template <typename Fn>
    void run_chunks(const Fn& fn) const {
        const int t_count = std::min(threads_, kChunks);
        if (t_count <= 1) {
            for (int c = 0; c < kChunks; ++c) {
                auto [lo, hi] = chunk_range(c);
                fn(c, lo, hi);
            }
            return;
        }
        std::vector<std::thread> pool;
        pool.reserve(t_count);
        for (int tid = 0; tid < t_count; ++tid) {
            pool.emplace_back([&, tid] {
                for (int c = tid; c < kChunks; c += t_count) {
                    auto [lo, hi] = chunk_range(c);
                    fn(c, lo, hi);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    [[nodiscard]] std::pair<std::size_t, std::size_t> chunk_range(int c) const {
        const std::size_t lo = dm_.count * c / kChunks;
        const std::size_t hi = dm_.count * (c + 1) / kChunks;
        return {lo, hi};
    }

    /// Sum of per-record losses over [lo, hi); accumulates the (unscaled)
    /// gradient when `grad` is non-null.
    double chunk_pass(const std::vector<double>& theta, std::size_t lo, std::size_t hi,
                      std::vector<double>* grad) const {
        const int m = lay_.input_size;
        const int j_count = lay_.hidden_size;
        const double* w1 = theta.data();
        const double* b1 = theta.data() + lay_.b1_off;
        const double* w2 = theta.data() + lay_.w2_off;
        const double* b2 = theta.data() + lay_.b2_off;

        std::vector<double> hidden(j_count);
        std::array<double, kClasses> z{}, p{};
        std::vector<double> dhidden(grad != nullptr ? j_count : 0);

        double loss = 0.0;
        for (std::size_t r = lo; r < hi; ++r) {
            const double* x = dm_.x.data() + r * m;
            for (int j = 0; j < j_count; ++j) {
                double a = b1[j];
                const double* w = w1 + static_cast<std::size_t>(j) * m;
                for (int c = 0; c < m; ++c) {
                    a += w[c] * x[c];
                }
                hidden[j] = std::tanh(a);
            }
            double z_max = -std::numeric_limits<double>::infinity();
            for (int n = 0; n < kClasses; ++n) {
                double a = b2[n];
                const double* w = w2 + static_cast<std::size_t>(n) * j_count;
                for (int j = 0; j < j_count; ++j) {
                    a += w[j] * hidden[j];
                }
                z[n] = a;
                z_max = std::max(z_max, a);
            }
            double denom = 0.0;
            for (int n = 0; n < kClasses; ++n) {
                p[n] = std::exp(z[n] - z_max);
                denom += p[n];
            }
            const int label = dm_.y[r];
            loss += std::log(denom) - (z[label] - z_max);

            if (grad != nullptr) {
                const double inv_denom = 1.0 / denom;
                double* g_w1 = grad->data();
                double* g_b1 = grad->data() + lay_.b1_off;
                double* g_w2 = grad->data() + lay_.w2_off;
                double* g_b2 = grad->data() + lay_.b2_off;
                std::fill(dhidden.begin(), dhidden.end(), 0.0);
                for (int n = 0; n < kClasses; ++n) {
                    const double dz = p[n] * inv_denom - (n == label ? 1.0 : 0.0);
                    g_b2[n] += dz;
                    double* gw = g_w2 + static_cast<std::size_t>(n) * j_count;
                    const double* w = w2 + static_cast<std::size_t>(n) * j_count;
                    for (int j = 0; j < j_count; ++j) {
                        gw[j] += dz * hidden[j];
                        dhidden[j] += dz * w[j];
                    }
                }
                for (int j = 0; j < j_count; ++j) {
                    const double da = dhidden[j] * (1.0 - hidden[j] * hidden[j]);
                    g_b1[j] += da;
                    double* gw = g_w1 + static_cast<std::size_t>(j) * m;
                    for (int c = 0; c < m; ++c) {
                        gw[c] += da * x[c];
                    }
                }
            }
        }
        return loss;
    }

    const DesignMatrix& dm_;
    ParamLayout lay_;
    int threads_;
};

/// Symmetric uniform init scaled by fan-in, fully determined by the seed.
std::vector<double> init_params(int input_size, int hidden_size, std::uint64_t seed) {
    const ParamLayout lay(input_size, hidden_size);
    std::vector<double> theta(lay.total());
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        // 53-bit mantissa draw in [0,1); avoids distribution objects so the
        // stream is identical across standard libraries.
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    const double lim1 = 1.0 / std::sqrt(static_cast<double>(input_size));
    const double lim2 = 1.0 / std::sqrt(static_cast<double>(hidden_size));
    for (std::size_t k = 0; k < lay.b1_off; ++k) {
        theta[k] = (2.0 * uniform() - 1.0) * lim1;
    }
    for (std::size_t k = lay.b1_off; k < lay.w2_off; ++k) {
        theta[k] = 0.0;
    }
    for (std::size_t k = lay.w2_off; k < lay.b2_off; ++k) {
        theta[k] = (2.0 * uniform() - 1.0) * lim2;
    }
    for (std::size_t k = lay.b2_off; k < lay.total(); ++k) {
        theta[k] = 0.0;
    }
    return theta;
}

}  // namespace

void MlpModel::validate() const {
    if (input_size <= 0 || hidden_size <= 0) {
        throw std::invalid_argument("MlpModel: layer sizes must be positive");
    }
    const auto m = static_cast<std::size_t>(input_size);
    const auto j = static_cast<std::size_t>(hidden_size);
    if (w1.size() != j * m || b1.size() != j || w2.size() != kClasses * j ||
        b2.size() != kClasses) {
        throw std::invalid_argument("MlpModel: weight dimensions inconsistent with layer sizes");
    }
    if (feat_mean.size() != m || feat_scale.size() != m) {
        throw std::invalid_argument("MlpModel: normalization statistics must have input_size entries");
    }
    if (input_size != expanded_input_size(variant)) {
        throw std::invalid_argument("MlpModel: input size does not match the feature variant");
    }
}

int expanded_input_size(FeatureVariant v) {
    return feature_count(v) - 1 + kClasses;
}

std::vector<double> expand_features(FeatureVariant v, std::span<const double> raw) {
    const int count = feature_count(v);
    if (static_cast<int>(raw.size()) != count) {
        throw std::invalid_argument("expand_features: raw feature length mismatch");
    }
    const int pos = s_opt_position(v);
    std::vector<double> out;
    out.reserve(expanded_input_size(v));
    for (int c = 0; c < count; ++c) {
        if (c == pos) {
            const int idx = static_cast<int>(raw[c]);
            if (idx < 0 || idx > 7 || static_cast<double>(idx) != raw[c]) {
                throw std::invalid_argument("expand_features: previous-state index out of range");
            }
            for (int k = 0; k < kClasses; ++k) {
                out.push_back(k == idx ? 1.0 : 0.0);
            }
        } else {
            out.push_back(raw[c]);
        }
    }
    return out;
}

void normalize_input(const MlpModel& m, std::span<double> x) {
    if (static_cast<int>(x.size()) != m.input_size) {
        throw std::invalid_argument("normalize_input: length mismatch");
    }
    for (int c = 0; c < m.input_size; ++c) {
        x[c] = (x[c] - m.feat_mean[c]) / m.feat_scale[c];
    }
}

std::array<double, kClasses> forward(const MlpModel& m, std::span<const double> x) {
    if (static_cast<int>(x.size()) != m.input_size) {
        throw std::invalid_argument("forward: input length must equal the model input size");
    }
    std::vector<double> hidden(m.hidden_size);
    for (int j = 0; j < m.hidden_size; ++j) {
        double a = m.b1[j];
        const double* w = m.w1.data() + static_cast<std::size_t>(j) * m.input_size;
        for (int c = 0; c < m.input_size; ++c) {
            a += w[c] * x[c];
        }
        hidden[j] = std::tanh(a);
    }
    std::array<double, kClasses> z{};
    double z_max = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < kClasses; ++n) {
        double a = m.b2[n];
        const double* w = m.w2.data() + static_cast<std::size_t>(n) * m.hidden_size;
        for (int j = 0; j < m.hidden_size; ++j) {
            a += w[j] * hidden[j];
        }
        z[n] = a;
        z_max = std::max(z_max, a);
    }
    double denom = 0.0;
    for (int n = 0; n < kClasses; ++n) {
        z[n] = std::exp(z[n] - z_max);
        denom += z[n];
    }
    for (int n = 0; n < kClasses; ++n) {
        z[n] /= denom;
    }
    return z;
}

std::array<double, kClasses> policy_probabilities(const MlpModel& m,
                                                  std::span<const double> raw) {
    auto x = expand_features(m.variant, raw);
    normalize_input(m, x);
    return forward(m, x);
}

int argmax_class(const std::array<double, kClasses>& probs) {
    int best = 0;
    for (int n = 1; n < kClasses; ++n) {
        if (probs[n] > probs[best]) {
            best = n;
        }
    }
    return best;
}

std::pair<MlpModel, TrainReport> train(const Dataset& train_set, const Dataset& val_set,
                                       const TrainConfig& cfg) {
    if (train_set.records.empty() || val_set.records.empty()) {
        throw std::invalid_argument("train: training and validation sets must be non-empty");
    }
    if (train_set.variant != val_set.variant) {
        throw std::invalid_argument("train: split variants differ");
    }
    if (cfg.hidden_sizes.empty() || cfg.max_epochs < 1) {
        throw std::invalid_argument("train: need at least one hidden size and one epoch");
    }

    std::vector<double> mean, scale;
    compute_stats(train_set, mean, scale);
    const DesignMatrix train_dm = build_matrix(train_set, mean, scale);
    const DesignMatrix val_dm = build_matrix(val_set, mean, scale);

    const int threads = cfg.threads > 0
                            ? cfg.threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    TrainReport report;
    report.seed = cfg.seed;
    report.train_count = train_set.records.size();
    report.val_count = val_set.records.size();

    std::vector<double> winner_theta;
    int winner_hidden = 0;
    double winner_val = std::numeric_limits<double>::infinity();
    int winner_epoch = 0;

    for (std::size_t point = 0; point < cfg.hidden_sizes.size(); ++point) {
        const int hidden = cfg.hidden_sizes[point];
        if (hidden < 1) {
            throw std::invalid_argument("train: hidden sizes must be positive");
        }
        CrossEntropyObjective train_obj(train_dm, hidden, threads);
        CrossEntropyObjective val_obj(val_dm, hidden, threads);

        const std::uint64_t point_seed = cfg.seed * 0x9e3779b97f4a7c15ULL + point + 1;
        std::vector<double> theta0 = init_params(train_dm.input_size, hidden, point_seed);

        SweepPoint sp;
        sp.hidden_size = hidden;
        sp.best_val_error = std::numeric_limits<double>::infinity();

        std::vector<double> best_theta = theta0;
        int since_best = 0;

        ScgOptions opts;
        opts.max_iters = cfg.max_epochs;
        opts.sigma0 = cfg.sigma0;
        opts.lambda0 = cfg.lambda0;
        opts.grad_tol = cfg.grad_tol;

        auto objective = [&](const std::vector<double>& theta, std::vector<double>& grad) {
            return train_obj.loss_and_grad(theta, grad);
        };
        auto on_step = [&](int iter, double loss, const std::vector<double>& theta) {
            if (!std::isfinite(loss)) {
                sp.diverged = true;
                return false;
            }
            sp.epochs_run = iter;
            const double val_loss = val_obj.loss_only(theta);
            if (!std::isfinite(val_loss)) {
                sp.diverged = true;
                return false;
            }
            if (val_loss < sp.best_val_error) {
                sp.best_val_error = val_loss;
                sp.best_epoch = iter;
                best_theta = theta;
                since_best = 0;
            } else if (++since_best >= cfg.patience) {
                return false;
            }
            return true;
        };

        const ScgResult res = scg_minimize(objective, std::move(theta0), opts, on_step);
        sp.final_train_loss = res.loss;
        if (!std::isfinite(res.loss)) {
            sp.diverged = true;
        }
        report.sweep.push_back(sp);

        if (!sp.diverged && sp.best_val_error < winner_val) {
            winner_val = sp.best_val_error;
            winner_hidden = hidden;
            winner_epoch = sp.best_epoch;
            winner_theta = std::move(best_theta);
        }
    }

    if (winner_theta.empty()) {
        throw std::runtime_error("train: every sweep point diverged");
    }

    MlpModel model;
    model.variant = train_set.variant;
    model.input_size = train_dm.input_size;
    model.hidden_size = winner_hidden;
    model.feat_mean = mean;
    model.feat_scale = scale;
    unpack_params(winner_theta, model);
    model.validate();

    report.best_hidden_size = winner_hidden;
    report.best_val_error = winner_val;
    report.best_epoch = winner_epoch;
    return {std::move(model), std::move(report)};
}

EvalResult evaluate(const MlpModel& m, const Dataset& test_set) {
    m.validate();
    if (test_set.variant != m.variant) {
        throw std::invalid_argument("evaluate: dataset variant does not match the model");
    }
    EvalResult out;
    out.count = test_set.records.size();
    const int raw_count = feature_count(test_set.variant);
    std::size_t correct = 0;
    for (const auto& rec : test_set.records) {
        const auto probs = policy_probabilities(
            m, std::span<const double>(rec.features.data(), raw_count));
        const int pred = argmax_class(probs);
        out.confusion[rec.label][pred]++;
        if (pred == rec.label) {
            ++correct;
        }
    }
    out.accuracy = out.count > 0 ? static_cast<double>(correct) / static_cast<double>(out.count)
                                 : 0.0;
    for (int c = 0; c < kClasses; ++c) {
        std::size_t row = 0, col = 0;
        for (int k = 0; k < kClasses; ++k) {
            row += out.confusion[c][k];
            col += out.confusion[k][c];
        }
        out.recall[c] = row > 0 ? static_cast<double>(out.confusion[c][c]) / row : 0.0;
        out.precision[c] = col > 0 ? static_cast<double>(out.confusion[c][c]) / col : 0.0;
    }
    return out;
}

double gradient_check(const MlpModel& m, const Dataset& batch,
                      const std::function<void(std::vector<double>&)>& perturb) {
    m.validate();
    if (batch.records.empty()) {
        throw std::invalid_argument("gradient_check: batch must be non-empty");
    }
    const DesignMatrix dm = build_matrix(batch, m.feat_mean, m.feat_scale);
    CrossEntropyObjective obj(dm, m.hidden_size, 1);

    std::vector<double> theta;
    pack_params(m, theta);

    std::vector<double> analytic;
    obj.loss_and_grad(theta, analytic);
    if (perturb) {
        perturb(analytic);
    }

    double worst = 0.0;
    std::vector<double> probe = theta;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double h = 1e-5 * std::max(1.0, std::abs(theta[k]));
        probe[k] = theta[k] + h;
        const double up = obj.loss_only(probe);
        probe[k] = theta[k] - h;
        const double down = obj.loss_only(probe);
        probe[k] = theta[k];
        const double numeric = (up - down) / (2.0 * h);
        const double rel = std::abs(analytic[k] - numeric) /
                           std::max(1.0, std::abs(analytic[k]) + std::abs(numeric));
        worst = std::max(worst, rel);
    }
    return worst;
}

void save_model(const MlpModel& m, const std::string& path) {
    m.validate();
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    std::fprintf(f, "fcmli-mlp 1\n");
    std::fprintf(f, "variant %s\n", variant_name(m.variant).c_str());
    std::fprintf(f, "layers %d %d %d\n", m.input_size, m.hidden_size, kClasses);
    std::fprintf(f, "hidden_activation %s\n", m.hidden_activation.c_str());
    std::fprintf(f, "output_activation %s\n", m.output_activation.c_str());
    auto write_block = [f](const char* name, const std::vector<double>& v, int per_line) {
        std::fprintf(f, "%s", name);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const char sep = (per_line > 0 && k % per_line == 0) ? '\n' : ' ';
            std::fprintf(f, "%c%.17g", sep, v[k]);
        }
        std::fputc('\n', f);
    };
    write_block("feature_mean", m.feat_mean, 0);
    write_block("feature_scale", m.feat_scale, 0);
    write_block("w1", m.w1, m.input_size);
    write_block("b1", m.b1, 0);
    write_block("w2", m.w2, m.hidden_size);
    write_block("b2", m.b2, 0);
    std::fclose(f);
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open model file: " + path);
    }
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "fcmli-mlp" || version != 1) {
        throw std::runtime_error("unsupported model file format: " + path);
    }
    MlpModel m;
    std::string key, value;
    in >> key >> value;
    if (key != "variant") throw std::runtime_error("model file: expected variant");
    m.variant = parse_variant(value);
    int classes = 0;
    in >> key >> m.input_size >> m.hidden_size >> classes;
    if (key != "layers" || classes != kClasses) {
        throw std::runtime_error("model file: bad layer header");
    }
    in >> key >> m.hidden_activation;
    if (key != "hidden_activation") throw std::runtime_error("model file: expected hidden_activation");
    in >> key >> m.output_activation;
    if (key != "output_activation") throw std::runtime_error("model file: expected output_activation");

    auto read_block = [&in, &path](const char* name, std::vector<double>& v, std::size_t n) {
        std::string k;
        in >> k;
        if (k != name) {
            throw std::runtime_error("model file " + path + ": expected block " + name);
        }
        v.resize(n);
        for (auto& x : v) {
            in >> x;
        }
        if (!in) {
            throw std::runtime_error("model file " + path + ": truncated block " + name);
        }
    };
    const auto ms = static_cast<std::size_t>(m.input_size);
    const auto js = static_cast<std::size_t>(m.hidden_size);
    read_block("feature_mean", m.feat_mean, ms);
    read_block("feature_scale", m.feat_scale, ms);
    read_block("w1", m.w1, js * ms);
    read_block("b1", m.b1, js);
    read_block("w2", m.w2, kClasses * js);
    read_block("b2", m.b2, kClasses);
    m.validate();
    return m;
}

nlohmann::json eval_to_json(const EvalResult& e) {
    nlohmann::json j;
    j["count"] = e.count;
    j["accuracy"] = e.accuracy;
    j["confusion"] = e.confusion;
    j["precision"] = e.precision;
    j["recall"] = e.recall;
    return j;
}

nlohmann::json report_to_json(const TrainReport& r) {
    nlohmann::json j;
    j["optimizer"] = r.optimizer;
    j["seed"] = r.seed;
    j["best_hidden_size"] = r.best_hidden_size;
    j["best_val_error"] = r.best_val_error;
    j["best_epoch"] = r.best_epoch;
    j["train_count"] = r.train_count;
    j["val_count"] = r.val_count;
    j["sweep"] = nlohmann::json::array();
    for (const auto& sp : r.sweep) {
        j["sweep"].push_back({{"hidden_size", sp.hidden_size},
                              {"best_val_error", sp.best_val_error},
                              {"best_epoch", sp.best_epoch},
                              {"epochs_run", sp.epochs_run},
                              {"final_train_loss", sp.final_train_loss},
                              {"diverged", sp.diverged}});
    }
    j["test"] = eval_to_json(r.test);
    return j;
}

}  // namespace fcmli
