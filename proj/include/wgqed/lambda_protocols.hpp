// Detection-level observables for the Lambda emitter

#pragma once

#include <cstddef>

#include "wgqed/effective_dynamics.hpp"

namespace wgqed {

// Perfect frequency filter: red keeps the Raman (|0> -> |1>) channel, blue the elastic one.
enum class Filter { none, red_only, blue_only };

struct DetectionConfig {
    double efficiency{1.0};
    Filter filter{Filter::none};
    double phase_offset{0.0}; // phi_z

    bool operator==(const DetectionConfig&) const = default;
};

struct FidelityParams {
    LambdaParams lambda;
    PulseSpec pulse;
    DetectionConfig detection;
};

struct FilteredProbs {
    double p_red_r{0.0};
    double p_red_l{0.0};
    double p_blue_r{0.0};
    double p_blue_l{0.0};
};

struct ClickProbs {
    double p_click_single{0.0};
    double p_click_coherent{0.0};
    double p_click_coherent_small_nbar{0.0}; // eta * nbar * (single-photon transmission)
};

struct AverageFidelity {
    double closed_form{0.0};
    double numeric{0.0};
    double discrepancy{0.0};
};

FilteredProbs filtered_photon_probs(const LambdaParams& p);

double output_intensity(const LambdaParams& p, const PulseSpec& pulse, double t);

ClickProbs click_probabilities(const LambdaParams& p, const PulseSpec& pulse, const DetectionConfig& detection);

double conditional_fidelity(const FidelityParams& fp, double t_c);

// Composite Simpson with at least min_panels panels (rounded up to even).
AverageFidelity average_fidelity(const FidelityParams& fp, std::size_t min_panels = 2000);

} // namespace wgqed
