#pragma once

// =============================================================================
// Three-phase four-level flying-capacitor inverter plant.
//
// Ground-truth emulator: two flying capacitors per phase, ideal switches,
// series RL load with a floating neutral. Integrated with forward Euler at a
// sub-step much finer than the controller period, so the controller's own
// one-step model is never the plant.
// =============================================================================

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fcmli {

/// Per-phase switch commands for the three cells (complements implicit).
/// index() = s1 + 2*s2 + 4*s3 enumerates the eight voltage vectors V0..V7.
struct SwitchingState {
    std::uint8_t s1 = 0;
    std::uint8_t s2 = 0;
    std::uint8_t s3 = 0;

    [[nodiscard]] int index() const { return s1 + 2 * s2 + 4 * s3; }

    static SwitchingState from_index(int idx);

    bool operator==(const SwitchingState&) const = default;
};

using SwitchTriple = std::array<SwitchingState, 3>;

/// Electrical parameters of the converter and load plus the two time bases
/// (controller period ts, plant integration sub-step).
struct SystemParams {
    double vdc = 360.0;         // dc-link voltage [V]
    double r = 15.0;            // load resistance [ohm]
    double l = 10e-3;           // load inductance [H]
    double c1 = 680e-6;         // inner flying capacitor [F]
    double c2 = 680e-6;         // outer flying capacitor [F]
    double ts = 30e-6;          // controller period [s]
    double f0 = 50.0;           // fundamental frequency [Hz]
    double iref_amp = 10.0;     // reference current amplitude [A]
    double plant_substep = 1e-6;  // integration sub-step [s]

    /// Throws std::invalid_argument unless all values are strictly positive,
    /// plant_substep <= ts and ts is an integer multiple of plant_substep.
    void validate() const;

    /// Number of integration sub-steps per controller period.
    [[nodiscard]] int substeps_per_period() const;
};

/// Phase currents, flying-capacitor voltages and the simulation clock.
struct PlantState {
    std::array<double, 3> i{};    // phase currents [A]
    std::array<double, 3> v1{};   // inner capacitor voltages [V]
    std::array<double, 3> v2{};   // outer capacitor voltages [V]
    double t = 0.0;               // simulation time [s]

    [[nodiscard]] bool finite() const;
};

/// Sub-step recording of every plant channel. Column order matches the CSV
/// emission schema exactly.
struct TimeSeries {
    std::vector<double> t;
    std::array<std::vector<double>, 3> i;
    std::array<std::vector<double>, 3> v1;
    std::array<std::vector<double>, 3> v2;
    std::array<std::vector<double>, 3> vph;
    std::array<std::vector<std::uint8_t>, 3> state;

    [[nodiscard]] std::size_t size() const { return t.size(); }
    void reserve(std::size_t n);
    void append(const PlantState& s, const std::array<double, 3>& vph_applied,
                const SwitchTriple& switches);
};

/// Pole voltage v_xN of one phase for a given switching state and capacitor
/// voltages. The eight cases follow the switching-state table row by row.
double phase_output_voltage(SwitchingState state, double v1, double v2, double vdc);

/// Mean of the three pole voltages (the common-mode voltage of an RL load
/// with floating neutral).
double common_mode_voltage(double van, double vbn, double vcn);

/// Rest start: zero currents, capacitors pre-charged to the balanced ratio
/// vdc/3 and 2*vdc/3, t = 0.
PlantState init_plant(const SystemParams& params);

/// Advances the plant by exactly one sub-step with the given switches held.
/// Appends the post-step sample to `recorder` when non-null; the recorded
/// vph/state columns are the drive that produced the sample.
void advance_substep(PlantState& state, const SwitchTriple& switches,
                     const SystemParams& params, TimeSeries* recorder);

/// Advances the plant by one controller period ts (switches held constant),
/// sub-stepping at plant_substep. Throws std::runtime_error on non-finite
/// state before or after the step.
PlantState step_plant(const PlantState& state, const SwitchTriple& switches,
                      const SystemParams& params, TimeSeries* recorder = nullptr);

/// Writes the recording as CSV with the fixed column order
/// t,i_a,i_b,i_c,v1_a,v2_a,v1_b,v2_b,v1_c,v2_c,vph_a,vph_b,vph_c,state_a,state_b,state_c.
void write_timeseries_csv(const TimeSeries& series, const std::string& path);

/// Reads a CSV produced by write_timeseries_csv.
TimeSeries read_timeseries_csv(const std::string& path);

}  // namespace fcmli
