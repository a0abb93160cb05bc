// Non-Hermitian Hamiltonian over the single-excitation manifold

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wgqed/emitter_model.hpp"

namespace wgqed {

using cplx = std::complex<double>;

struct NhMatrix {
    Eigen::MatrixXcd entries;
    std::vector<cplx> input_detunings; // delta_e - i Gamma_e / 2 per excited state
    double detuning{0.0};

    Eigen::Index dim() const { return entries.rows(); }
};

struct NhInverse {
    Eigen::MatrixXcd entries;
    double condition_estimate{1.0}; // 1-norm estimate
};

// Detuning convention: diagonal = (E_e - E_g0) + detuning - i Gamma_e / 2, where
// g0 is the first ground level of the host emitter.
NhMatrix assemble_nh(const SystemSpec& system, const CombinedBasis& basis, double detuning);

NhInverse invert_nh(const NhMatrix& m);

// V-system closed forms for H = [[d1, g], [g_bar, d2]].
// Effective couplings are absent when the corresponding bare coupling vanishes.
struct EffectiveParamsV {
    cplx delta1_eff;
    cplx delta2_eff;
    std::optional<cplx> g_eff;       // 1 / inv(0,1)
    std::optional<cplx> g_prime_eff; // 1 / inv(1,0)
};

EffectiveParamsV effective_params_v(cplx delta1, cplx delta2, cplx g, cplx g_bar);

// Two-level emitter plus V-type emitter. Matrix layout:
//   [[d1, -i g12/2, -i g13/2],
//    [-i g12/2, d2, omega/2 - i g23/2],
//    [-i g13/2, omega/2 - i g23/2, d3]]
struct TwoEmitterParams {
    cplx delta1, delta2, delta3;
    cplx gamma12, gamma13, gamma23;
    double omega{0.0};
};

struct EffectiveParams3 {
    cplx delta1_eff, delta2_eff, delta3_eff;
    cplx gamma12_eff, gamma13_eff, gamma23_eff;
};

EffectiveParams3 effective_params_two_emitter(const TwoEmitterParams& p);

} // namespace wgqed
