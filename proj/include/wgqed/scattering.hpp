// Scattering kernel, elastic amplitudes, spectra and closed-form oracles

#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wgqed/emitter_model.hpp"
#include "wgqed/nh_hamiltonian.hpp"
#include "wgqed/waveguide.hpp"

namespace wgqed {

// S^{out,in}_{g_out,g_in}; amplitudes referenced at the emitters.
struct ScatteringKernel {
    std::size_t n_ground{0};
    std::vector<cplx> amplitudes;
    double evaluation_detuning{0.0};
    double reference_position{0.0}; // phase position of the first emitter

    cplx at(Direction out, Direction in, std::size_t g_out, std::size_t g_in) const
    {
        return amplitudes[index(out, in, g_out, g_in)];
    }
    std::size_t index(Direction out, Direction in, std::size_t g_out, std::size_t g_in) const
    {
        const std::size_t o = out == Direction::right ? 0 : 1;
        const std::size_t i = in == Direction::right ? 0 : 1;
        return ((o * 2 + i) * n_ground + g_out) * n_ground + g_in;
    }
};

struct AmplitudePair {
    cplx t{1.0, 0.0};
    std::optional<cplx> r; // absent when a closed form only provides t
};

struct SweepWarning {
    std::size_t index{0};
    double detuning{0.0};
    std::string message;
};

struct Spectrum {
    std::vector<double> detuning_grid;
    std::vector<double> transmission;
    std::vector<double> reflection;
    std::vector<double> loss;
    std::vector<SweepWarning> warnings; // singular points (NaN rows) and dark-state limits
};

ScatteringKernel scattering_kernel(const SystemSpec& system, const CombinedBasis& basis, const NhInverse& inverse,
                                   double detuning);

// t = 1 + i S^{in,in}, r = i S^{opposite,in}. phase_offset multiplies r by e^{i phase_offset}.
AmplitudePair output_amplitudes(const ScatteringKernel& kernel, Direction input, std::size_t ground_state = 0,
                                double phase_offset = 0.0);

// Assemble -> invert -> kernel at one detuning. When the Hamiltonian is singular because a
// zero-width dark state sits exactly on resonance, the kernel is taken as the mean of the
// kernels at detuning +/- eps; the divergent part must then vanish, else SingularMatrix.
ScatteringKernel evaluate_kernel(const SystemSpec& system, const CombinedBasis& basis, double detuning,
                                 bool* dark_limit = nullptr);

AmplitudePair evaluate_amplitudes(const SystemSpec& system, const CombinedBasis& basis, double detuning,
                                  Direction input, double phase_offset = 0.0, bool* dark_limit = nullptr);

// Grid points are independent; threads > 1 splits them without changing results.
Spectrum sweep_spectrum(const SystemSpec& system, const std::vector<double>& detuning_grid, Direction input,
                        unsigned threads = 1);

AmplitudePair closed_form_two_level(double delta, double gamma1d, double gamma_total);

// Two degenerate-width excited levels with equal symmetric couplings.
AmplitudePair closed_form_v_system(double delta1, double delta2, double gamma1d, double gamma_total, double omega,
                                   double dphi);

// Two identical two-level emitters; t only.
AmplitudePair closed_form_two_emitters(double delta, double gamma1d, double gamma_prime, double k_dz);

struct DipolePairParams {
    double delta_a{0.0};
    double delta_b{0.0};
    double gamma1d_a{0.0};
    double gamma1d_b{0.0};
    double gamma_a{0.0}; // total decay
    double gamma_b{0.0};
    double v{0.0};
    double phi{0.0};
};

// Co-located dipole-coupled emitters; t only.
AmplitudePair closed_form_dipole_pair(const DipolePairParams& p);

// Two-level emitter A plus degenerate V-type emitter B, Gamma' = 0; t only.
AmplitudePair closed_form_two_plus_v(double delta_a, double delta_b, double gamma1d, double omega, double k_dz);

} // namespace wgqed
