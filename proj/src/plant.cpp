#include "fcmli/plant.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fcmli {

SwitchingState SwitchingState::from_index(int idx) {
    if (idx < 0 || idx > 7) {
        throw std::invalid_argument("switching-state index out of range: " + std::to_string(idx));
    }
    return SwitchingState{static_cast<std::uint8_t>(idx & 1),
                          static_cast<std::uint8_t>((idx >> 1) & 1),
                          static_cast<std::uint8_t>((idx >> 2) & 1)};
}

void SystemParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string("SystemParams: ") + name +
                                        " must be strictly positive");
        }
    };
    positive(vdc, "vdc");
    positive(r, "r");
    positive(l, "l");
    positive(c1, "c1");
    positive(c2, "c2");
    positive(ts, "ts");
    positive(f0, "f0");
    // Zero reference amplitude is a legitimate null drive.
    if (iref_amp < 0.0 || !std::isfinite(iref_amp)) {
        throw std::invalid_argument("SystemParams: iref_amp must be non-negative");
    }
    positive(plant_substep, "plant_substep");
    if (plant_substep > ts) {
        throw std::invalid_argument("SystemParams: plant_substep must not exceed ts");
    }
    const double ratio = ts / plant_substep;
    const auto n = static_cast<long long>(std::llround(ratio));
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio) {
        throw std::invalid_argument("SystemParams: ts must be an integer multiple of plant_substep");
    }
}

int SystemParams::substeps_per_period() const {
    return static_cast<int>(std::llround(ts / plant_substep));
}

bool PlantState::finite() const {
    for (int x = 0; x < 3; ++x) {
        if (!std::isfinite(i[x]) || !std::isfinite(v1[x]) || !std::isfinite(v2[x])) {
            return false;
        }
    }
    return std::isfinite(t);
}

void TimeSeries::reserve(std::size_t n) {
    t.reserve(n);
    for (int x = 0; x < 3; ++x) {
        i[x].reserve(n);
        v1[x].reserve(n);
        v2[x].reserve(n);
        vph[x].reserve(n);
        state[x].reserve(n);
    }
}

void TimeSeries::append(const PlantState& s, const std::array<double, 3>& vph_applied,
                        const SwitchTriple& switches) {
    t.push_back(s.t);
    for (int x = 0; x < 3; ++x) {
        i[x].push_back(s.i[x]);
        v1[x].push_back(s.v1[x]);
        v2[x].push_back(s.v2[x]);
        vph[x].push_back(vph_applied[x]);
        state[x].push_back(static_cast<std::uint8_t>(switches[x].index()));
    }
}

double phase_output_voltage(SwitchingState state, double v1, double v2, double vdc) {
    switch (state.index()) {
        case 0: return -vdc / 2.0;
        case 1: return v1 - vdc / 2.0;
        case 2: return v2 - v1 - vdc / 2.0;
        case 3: return v2 - vdc / 2.0;
        case 4: return vdc / 2.0 - v2;
        case 5: return vdc / 2.0 - v2 + v1;
        case 6: return vdc / 2.0 - v1;
        case 7: return vdc / 2.0;
        default: break;
    }
    throw std::logic_error("unreachable switching-state index");
}

double common_mode_voltage(double van, double vbn, double vcn) {
    return (van + vbn + vcn) / 3.0;
}

PlantState init_plant(const SystemParams& params) {
    params.validate();
    PlantState s;
    for (int x = 0; x < 3; ++x) {
        s.i[x] = 0.0;
        s.v1[x] = params.vdc / 3.0;
        s.v2[x] = 2.0 * params.vdc / 3.0;
    }
    s.t = 0.0;
    return s;
}

void advance_substep(PlantState& state, const SwitchTriple& switches,
                     const SystemParams& params, TimeSeries* recorder) {
    const double dt = params.plant_substep;

    std::array<double, 3> vph{};
    for (int x = 0; x < 3; ++x) {
        vph[x] = phase_output_voltage(switches[x], state.v1[x], state.v2[x], params.vdc);
    }
    const double v_common = common_mode_voltage(vph[0], vph[1], vph[2]);

    // Explicit Euler: all derivatives from the pre-step state.
    std::array<double, 3> di{}, dv1{}, dv2{};
    for (int x = 0; x < 3; ++x) {
        di[x] = (vph[x] - v_common - params.r * state.i[x]) / params.l;
        const double d12 = static_cast<double>(switches[x].s2) - static_cast<double>(switches[x].s1);
        const double d23 = static_cast<double>(switches[x].s3) - static_cast<double>(switches[x].s2);
        dv1[x] = state.i[x] * d12 / params.c1;
        dv2[x] = state.i[x] * d23 / params.c2;
    }
    for (int x = 0; x < 3; ++x) {
        state.i[x] += di[x] * dt;
        state.v1[x] += dv1[x] * dt;
        state.v2[x] += dv2[x] * dt;
    }
    state.t += dt;

    if (recorder != nullptr) {
        recorder->append(state, vph, switches);
    }
}

PlantState step_plant(const PlantState& state, const SwitchTriple& switches,
                      const SystemParams& params, TimeSeries* recorder) {
    if (!state.finite()) {
        throw std::runtime_error("step_plant: non-finite plant state at t=" + std::to_string(state.t) +
                                 " (numerical blow-up)");
    }
    const int n = params.substeps_per_period();
    PlantState next = state;
    const double t_base = state.t;
    for (int j = 0; j < n; ++j) {
        advance_substep(next, switches, params, recorder);
        next.t = t_base + (j + 1) * params.plant_substep;
        if (recorder != nullptr) {
            recorder->t.back() = next.t;
        }
    }
    if (!next.finite()) {
        throw std::runtime_error("step_plant: non-finite plant state after stepping to t=" +
                                 std::to_string(next.t) + " (numerical blow-up)");
    }
    return next;
}

void write_timeseries_csv(const TimeSeries& series, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) {
        throw std::runtime_error("cannot open for writing: " + path);
    }
    std::fputs(
        "t,i_a,i_b,i_c,v1_a,v2_a,v1_b,v2_b,v1_c,v2_c,vph_a,vph_b,vph_c,state_a,state_b,state_c\n",
        f);
    for (std::size_t k = 0; k < series.size(); ++k) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d\n",
                     series.t[k], series.i[0][k], series.i[1][k], series.i[2][k],
                     series.v1[0][k], series.v2[0][k], series.v1[1][k], series.v2[1][k],
                     series.v1[2][k], series.v2[2][k], series.vph[0][k], series.vph[1][k],
                     series.vph[2][k], static_cast<int>(series.state[0][k]),
                     static_cast<int>(series.state[1][k]), static_cast<int>(series.state[2][k]));
    }
    std::fclose(f);
}

TimeSeries read_timeseries_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open for reading: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty time-series file: " + path);
    }
    TimeSeries out;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::array<double, 13> num{};
        std::array<int, 3> st{};
        const char* p = line.c_str();
        char* end = nullptr;
        for (int c = 0; c < 13; ++c) {
            num[c] = std::strtod(p, &end);
            if (end == p) throw std::runtime_error("malformed time-series row in " + path);
            p = (*end == ',') ? end + 1 : end;
        }
        for (int c = 0; c < 3; ++c) {
            st[c] = static_cast<int>(std::strtol(p, &end, 10));
            if (end == p) throw std::runtime_error("malformed time-series row in " + path);
            p = (*end == ',') ? end + 1 : end;
        }
        out.t.push_back(num[0]);
        for (int x = 0; x < 3; ++x) {
            out.i[x].push_back(num[1 + x]);
        }
        out.v1[0].push_back(num[4]);
        out.v2[0].push_back(num[5]);
        out.v1[1].push_back(num[6]);
        out.v2[1].push_back(num[7]);
        out.v1[2].push_back(num[8]);
        out.v2[2].push_back(num[9]);
        for (int x = 0; x < 3; ++x) {
            out.vph[x].push_back(num[10 + x]);
            out.state[x].push_back(static_cast<std::uint8_t>(st[x]));
        }
    }
    return out;
}

}  // namespace fcmli
