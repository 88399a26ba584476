#pragma once

// =============================================================================
// Spectral and tracking metrics.
//
// Rectangular-window Fourier analysis over an integer number of fundamental
// cycles (no leakage, no tapering). Harmonic bins are evaluated directly --
// phasors resynchronized from exact rational phases -- rather than through a
// full FFT. THD, settling detection and the MPC-vs-ANN comparison table all
// live here.
// =============================================================================

#include "fcmli/controller.hpp"

#include <span>
#include <string>
#include <vector>

namespace fcmli {

/// Single-sided amplitude spectrum of one analysis window.
struct Spectrum {
    double resolution_hz = 0.0;     // 1 / window length
    std::vector<double> freq;       // bin frequencies [Hz]
    std::vector<double> magnitude;  // amplitude (peak) per bin
    double mean_square = 0.0;       // time-domain mean square of the window
    bool has_nyquist_bin = false;   // last bin sits at Nyquist (even window)

    /// Mean square reconstructed from the bins; equals mean_square up to
    /// rounding (Parseval).
    [[nodiscard]] double spectral_mean_square() const;
};

struct ThdReport {
    double fundamental = 0.0;   // amplitude at f0 [signal units]
    double thd_percent = 0.0;
    int max_harmonic = 0;
    int cycles = 0;
    double window_start = 0.0;  // offset of the window within the signal [s]
    double f0 = 0.0;
};

/// Magnitude |X_k| of one DFT bin of the window (no scaling).
double dft_bin_magnitude(std::span<const double> window, std::size_t bin);

/// THD over the final `cycles` fundamental periods of the signal:
/// sqrt(sum of squared harmonic amplitudes, h = 2..max_harmonic) divided by
/// the fundamental amplitude, in percent. Throws if the window does not
/// contain an integer number of samples, the harmonics exceed Nyquist, or
/// the fundamental is below the numeric floor.
ThdReport thd(std::span<const double> signal, double sample_period, double f0, int cycles,
              int max_harmonic);

/// Every bin up to Nyquist. Direct evaluation -- O(N^2) -- intended for
/// analysis windows of test scale.
Spectrum full_spectrum(std::span<const double> window, double sample_period);

struct SettlingResult {
    bool settled = false;
    double time = 0.0;  // seconds after the step
};

/// First time after `step_time` from which |current - reference| stays
/// within band*amplitude through the end of the window. A violation at the
/// very end means the signal never settled.
SettlingResult settling_time(std::span<const double> current, std::span<const double> reference,
                             double sample_period, double step_time, double band,
                             double amplitude);

/// Peak of |signal| over each half fundamental cycle starting at
/// `from_time`; returns (window end time, peak) pairs.
std::vector<std::pair<double, double>> half_cycle_peaks(std::span<const double> signal,
                                                        double sample_period, double f0,
                                                        double from_time);

/// Amplitude of a tracking sinusoid estimated per half cycle as
/// sqrt(2)*RMS, which is insensitive to switching ripple; returns
/// (window end time, amplitude) pairs.
std::vector<std::pair<double, double>> amplitude_estimates(std::span<const double> signal,
                                                           double sample_period, double f0,
                                                           double from_time);

struct RunForComparison {
    std::string scenario_id;
    std::string controller;
    const TimeSeriesRun* run = nullptr;
};

struct ComparisonRow {
    std::string scenario_id;
    std::string controller;
    double thd_a = 0.0;
    double thd_b = 0.0;
    double thd_c = 0.0;
    double thd_mean = 0.0;
    double rms_err = 0.0;    // RMS of i - i_ref across phases over the window [A]
    double v1_ripple = 0.0;  // worst-phase half peak-to-peak [V]
    double v2_ripple = 0.0;
};

/// Per-run THD, tracking error and capacitor ripple over the final `cycles`
/// fundamental periods. All runs must share the fundamental frequency.
std::vector<ComparisonRow> compare_runs(const std::vector<RunForComparison>& runs,
                                        int cycles = 5, int max_harmonic = 100);

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path);

}  // namespace fcmli
