// Effective ground-manifold dynamics of a driven Lambda emitter

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "wgqed/emitter_model.hpp"

namespace wgqed {

// |0> -> |2> is driven from the left by a right-going field; |2> decays to |0> and |1>.
struct LambdaParams {
    double gamma0_1d_right{0.0};
    double gamma0_1d_left{0.0};
    double gamma1_1d_right{0.0};
    double gamma1_1d_left{0.0};
    double gamma0_prime{0.0};
    double gamma1_prime{0.0};
    double delta{0.0};
    double omega01{0.0};

    double gamma0_1d() const { return gamma0_1d_right + gamma0_1d_left; }
    double gamma1_1d() const { return gamma1_1d_right + gamma1_1d_left; }
    double gamma0() const { return gamma0_1d() + gamma0_prime; }
    double gamma1() const { return gamma1_1d() + gamma1_prime; }
    double gamma_total() const { return gamma0() + gamma1(); }
    double beta0() const { return gamma0_1d() / gamma_total(); }
    double beta1() const { return gamma1_1d() / gamma_total(); }
    double detuning_norm2() const { return delta * delta + 0.25 * gamma_total() * gamma_total(); }
    bool symmetric() const { return gamma0_1d_right == gamma0_1d_left && gamma1_1d_right == gamma1_1d_left; }
    bool operator==(const LambdaParams&) const = default;
};

struct Rates {
    double p_d{0.0};
    double p_r{0.0};
    double p_sc{0.0};
};

struct GroundDensity {
    double rho00{1.0};
    double rho11{0.0};
    std::complex<double> rho01{0.0, 0.0};
    double time{0.0};
};

enum class PulseShape { square };

struct PulseSpec {
    PulseShape shape{PulseShape::square};
    double intensity{0.0}; // |alpha|^2
    double duration{1.0};  // T

    double nbar() const { return intensity * duration; }
    double intensity_at(double t) const { return (t >= 0.0 && t <= duration) ? intensity : 0.0; }
    bool operator==(const PulseSpec&) const = default;
};

struct StarkElements {
    double h00_shift{0.0};
    double h11{0.0};
    double omega01_prime{0.0};
};

struct EvolveOptions {
    std::size_t max_steps{10'000'000};
};

void validate_lambda(const LambdaParams& p);

// Extract Lambda parameters from a one-emitter system with two ground levels and one excited level.
// The first ground level is the driven one; delta = (E_e - E_g0) + detuning.
LambdaParams lambda_params_from_system(const SystemSpec& system, double detuning);

Rates compute_rates(const LambdaParams& p);

StarkElements effective_hamiltonian_elements(const LambdaParams& p, double intensity);

std::vector<GroundDensity> evolve_ground_state(const LambdaParams& p, const PulseSpec& pulse,
                                               const std::vector<double>& t_grid,
                                               const GroundDensity& initial = GroundDensity{},
                                               const EvolveOptions& options = EvolveOptions{});

// Exact solution for a square pulse.
GroundDensity closed_form_ground_state(const LambdaParams& p, const PulseSpec& pulse, double t,
                                       const GroundDensity& initial = GroundDensity{});

} // namespace wgqed
