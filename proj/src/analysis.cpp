#include "fcmli/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace fcmli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Number of samples in one fundamental period; throws unless it is an
/// integer to high accuracy.
std::size_t samples_per_cycle(double sample_period, double f0) {
    const double exact = 1.0 / (f0 * sample_period);
    const auto n = static_cast<long long>(std::llround(exact));
    if (n < 2 || std::abs(exact - static_cast<double>(n)) > 1e-6 * exact) {
        throw std::invalid_argument(
            "analysis: sample rate does not give an integer number of samples per cycle");
    }
    return static_cast<std::size_t>(n);
}

/// Sum of x[n]*exp(-i*2*pi*k*n/N) over the window, evaluated with an
/// incremental phasor resynchronized from the exact rational phase every few
/// hundred samples so rounding never accumulates.
void dft_bin(std::span<const double> window, std::size_t bin, double& re, double& im) {
    const std::size_t n_samples = window.size();
    const double step = kTwoPi * static_cast<double>(bin) / static_cast<double>(n_samples);
    const double rot_re = std::cos(step);
    const double rot_im = -std::sin(step);
    constexpr std::size_t kResync = 512;

    re = 0.0;
    im = 0.0;
    double ph_re = 1.0, ph_im = 0.0;
    for (std::size_t n = 0; n < n_samples; ++n) {
        if (n % kResync == 0) {
            const auto r = static_cast<double>((bin * n) % n_samples);
            const double phase = -kTwoPi * r / static_cast<double>(n_samples);
            ph_re = std::cos(phase);
            ph_im = std::sin(phase);
        }
        re += window[n] * ph_re;
        im += window[n] * ph_im;
        const double next_re = ph_re * rot_re - ph_im * rot_im;
        ph_im = ph_re * rot_im + ph_im * rot_re;
        ph_re = next_re;
    }
}

}  // namespace

double dft_bin_magnitude(std::span<const double> window, std::size_t bin) {
    double re = 0.0, im = 0.0;
    dft_bin(window, bin, re, im);
    return std::hypot(re, im);
}

ThdReport thd(std::span<const double> signal, double sample_period, double f0, int cycles,
              int max_harmonic) {
    if (cycles < 1 || max_harmonic < 1) {
        throw std::invalid_argument("thd: cycles and max_harmonic must be positive");
    }
    const std::size_t per_cycle = samples_per_cycle(sample_period, f0);
    const std::size_t n_window = per_cycle * static_cast<std::size_t>(cycles);
    if (signal.size() < n_window) {
        throw std::invalid_argument("thd: signal shorter than the analysis window");
    }
    if (static_cast<std::size_t>(max_harmonic) >= per_cycle / 2) {
        throw std::invalid_argument("thd: harmonic range exceeds Nyquist");
    }
    const std::span<const double> window = signal.subspan(signal.size() - n_window);

    const double scale = 2.0 / static_cast<double>(n_window);
    const double fundamental =
        scale * dft_bin_magnitude(window, static_cast<std::size_t>(cycles));
    if (fundamental < 1e-9) {
        throw std::runtime_error("thd: fundamental magnitude below the numeric floor");
    }
    double harmonics_sq = 0.0;
    for (int h = 2; h <= max_harmonic; ++h) {
        const double mag =
            scale * dft_bin_magnitude(window, static_cast<std::size_t>(h) * cycles);
        harmonics_sq += mag * mag;
    }

    ThdReport report;
    report.fundamental = fundamental;
    report.thd_percent = 100.0 * std::sqrt(harmonics_sq) / fundamental;
    report.max_harmonic = max_harmonic;
    report.cycles = cycles;
    report.window_start =
        static_cast<double>(signal.size() - n_window) * sample_period;
    report.f0 = f0;
    return report;
}

double Spectrum::spectral_mean_square() const {
    // Amplitude bins: dc and Nyquist carry their full power, interior bins
    // carry amplitude^2 / 2.
    double total = 0.0;
    for (std::size_t k = 0; k < magnitude.size(); ++k) {
        if (k == 0 || (has_nyquist_bin && k == magnitude.size() - 1)) {
            total += magnitude[k] * magnitude[k];
        } else {
            total += magnitude[k] * magnitude[k] / 2.0;
        }
    }
    return total;
}

Spectrum full_spectrum(std::span<const double> window, double sample_period) {
    const std::size_t n = window.size();
    if (n < 2) {
        throw std::invalid_argument("full_spectrum: window too short");
    }
    Spectrum sp;
    sp.resolution_hz = 1.0 / (static_cast<double>(n) * sample_period);
    const std::size_t n_bins = n / 2 + 1;
    sp.freq.resize(n_bins);
    sp.magnitude.resize(n_bins);
    const bool has_nyquist = (n % 2 == 0);
    for (std::size_t k = 0; k < n_bins; ++k) {
        sp.freq[k] = sp.resolution_hz * static_cast<double>(k);
        const double mag = dft_bin_magnitude(window, k);
        const bool edge = (k == 0) || (has_nyquist && k == n_bins - 1);
        sp.magnitude[k] = (edge ? 1.0 : 2.0) * mag / static_cast<double>(n);
    }
    double ms = 0.0;
    for (const double x : window) {
        ms += x * x;
    }
    sp.mean_square = ms / static_cast<double>(n);
    sp.has_nyquist_bin = has_nyquist;
    return sp;
}

SettlingResult settling_time(std::span<const double> current, std::span<const double> reference,
                             double sample_period, double step_time, double band,
                             double amplitude) {
    if (current.size() != reference.size() || current.empty()) {
        throw std::invalid_argument("settling_time: channels must be non-empty and equal length");
    }
    const double threshold = band * amplitude;
    const auto start = static_cast<std::size_t>(
        std::max(0.0, std::ceil(step_time / sample_period - 1e-9)));
    if (start >= current.size()) {
        throw std::invalid_argument("settling_time: step time outside the window");
    }
    std::size_t last_violation = 0;
    bool violated = false;
    for (std::size_t k = start; k < current.size(); ++k) {
        if (std::abs(current[k] - reference[k]) > threshold) {
            violated = true;
            last_violation = k;
        }
    }
    if (!violated) {
        return {true, 0.0};
    }
    if (last_violation == current.size() - 1) {
        return {false, 0.0};
    }
    const double settle_at = static_cast<double>(last_violation + 1) * sample_period;
    return {true, settle_at - step_time};
}

std::vector<std::pair<double, double>> half_cycle_peaks(std::span<const double> signal,
                                                        double sample_period, double f0,
                                                        double from_time) {
    const std::size_t per_half = samples_per_cycle(sample_period, f0) / 2;
    const auto start = static_cast<std::size_t>(
        std::max(0.0, std::ceil(from_time / sample_period - 1e-9)));
    std::vector<std::pair<double, double>> peaks;
    for (std::size_t lo = start; lo + per_half <= signal.size(); lo += per_half) {
        double peak = 0.0;
        for (std::size_t k = lo; k < lo + per_half; ++k) {
            peak = std::max(peak, std::abs(signal[k]));
        }
        peaks.emplace_back(static_cast<double>(lo + per_half) * sample_period, peak);
    }
    return peaks;
}

std::vector<std::pair<double, double>> amplitude_estimates(std::span<const double> signal,
                                                           double sample_period, double f0,
                                                           double from_time) {
    const std::size_t per_half = samples_per_cycle(sample_period, f0) / 2;
    const auto start = static_cast<std::size_t>(
        std::max(0.0, std::ceil(from_time / sample_period - 1e-9)));
    std::vector<std::pair<double, double>> out;
    for (std::size_t lo = start; lo + per_half <= signal.size(); lo += per_half) {
        double sq = 0.0;
        for (std::size_t k = lo; k < lo + per_half; ++k) {
            sq += signal[k] * signal[k];
        }
        const double amp = std::sqrt(2.0 * sq / static_cast<double>(per_half));
        out.emplace_back(static_cast<double>(lo + per_half) * sample_period, amp);
    }
    return out;
}

std::vector<ComparisonRow> compare_runs(const std::vector<RunForComparison>& runs, int cycles,
                                        int max_harmonic) {
    std::vector<ComparisonRow> rows;
    double shared_f0 = 0.0;
    for (const auto& rfc : runs) {
        if (rfc.run == nullptr) {
            throw std::invalid_argument("compare_runs: null run");
        }
        const TimeSeriesRun& run = *rfc.run;
        const double f0 = run.meta.at("scenario").at("f0").get<double>();
        const double dt = run.meta.at("scenario").at("plant_substep").get<double>();
        if (shared_f0 == 0.0) {
            shared_f0 = f0;
        } else if (f0 != shared_f0) {
            throw std::invalid_argument("compare_runs: runs do not share the fundamental frequency");
        }
        const std::size_t n_window =
            samples_per_cycle(dt, f0) * static_cast<std::size_t>(cycles);
        if (run.series.size() < n_window) {
            throw std::invalid_argument("compare_runs: run shorter than the analysis window (" +
                                        rfc.scenario_id + ")");
        }

        const auto refs = run.i_ref[0].empty()
                              ? reconstruct_references(run.meta, run.series.t)
                              : run.i_ref;

        ComparisonRow row;
        row.scenario_id = rfc.scenario_id;
        row.controller = rfc.controller;
        std::array<double, 3> thd_ph{};
        double err_sq = 0.0;
        const std::size_t lo = run.series.size() - n_window;
        for (int x = 0; x < 3; ++x) {
            const auto& ch = run.series.i[x];
            thd_ph[x] = thd(std::span<const double>(ch.data(), ch.size()), dt, f0, cycles,
                            max_harmonic)
                            .thd_percent;
            for (std::size_t k = lo; k < ch.size(); ++k) {
                const double e = ch[k] - refs[x][k];
                err_sq += e * e;
            }
        }
        row.thd_a = thd_ph[0];
        row.thd_b = thd_ph[1];
        row.thd_c = thd_ph[2];
        row.thd_mean = (thd_ph[0] + thd_ph[1] + thd_ph[2]) / 3.0;
        row.rms_err = std::sqrt(err_sq / (3.0 * static_cast<double>(n_window)));

        auto ripple = [&](const std::array<std::vector<double>, 3>& chans) {
            double worst = 0.0;
            for (int x = 0; x < 3; ++x) {
                const auto [mn, mx] =
                    std::minmax_element(chans[x].begin() + static_cast<std::ptrdiff_t>(lo),
                                        chans[x].end());
                worst = std::max(worst, (*mx - *mn) / 2.0);
            }
            return worst;
        };
        row.v1_ripple = ripple(run.series.v1);
        row.v2_ripple = ripple(run.series.v2);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    std::fputs("scenario_id,controller,thd_a,thd_b,thd_c,thd_mean,rms_err,v1_ripple,v2_ripple\n",
               f);
    for (const auto& r : rows) {
        std::fprintf(f, "%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.scenario_id.c_str(),
                     r.controller.c_str(), r.thd_a, r.thd_b, r.thd_c, r.thd_mean, r.rms_err,
                     r.v1_ripple, r.v2_ripple);
    }
    std::fclose(f);
}

}  // namespace fcmli
