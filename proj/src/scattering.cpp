#include "wgqed/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "wgqed/error.hpp"

namespace wgqed {

ScatteringKernel scattering_kernel(const SystemSpec& s, const CombinedBasis& basis, const NhInverse& inv,
                                   double detuning)
{
    const auto n = static_cast<Eigen::Index>(basis.dim());
    if (inv.entries.rows() != n || inv.entries.cols() != n)
        throw Error(ErrorCode::BasisMismatch, "inverse dimension does not match the basis");

    ScatteringKernel k;
    k.n_ground = basis.ground_states.size();
    k.evaluation_detuning = detuning;
    k.reference_position = s.emitters.front().phase_position;
    k.amplitudes.assign(4 * k.n_ground * k.n_ground, cplx(0.0, 0.0));

    for (Eigen::Index a = 0; a < n; ++a) {
        const auto& sa = basis.excited_states[a];
        const auto& ea = s.emitters[sa.emitter];
        for (Eigen::Index b = 0; b < n; ++b) {
            const cplx h = inv.entries(a, b);
            if (h == cplx(0.0, 0.0)) continue;
            const auto& sb = basis.excited_states[b];
            const auto& eb = s.emitters[sb.emitter];
            for (const auto& ca : sa.channels) {
                for (const auto& cb : sb.channels) {
                    for (Direction out : {Direction::right, Direction::left}) {
                        const cplx left = std::conj(coupling(ea.transitions[ca.transition], out, ea.phase_position));
                        for (Direction in : {Direction::right, Direction::left}) {
                            const cplx right = coupling(eb.transitions[cb.transition], in, eb.phase_position);
                            k.amplitudes[k.index(out, in, ca.ground_state, cb.ground_state)] += left * h * right;
                        }
                    }
                }
            }
        }
    }
    return k;
}

AmplitudePair output_amplitudes(const ScatteringKernel& k, Direction input, std::size_t ground_state,
                                double phase_offset)
{
    if (k.n_ground != 1)
        throw Error(ErrorCode::MultiGroundElastic,
                    "multi-ground elastic: elastic amplitudes need a single ground state");
    if (ground_state != 0) throw Error(ErrorCode::OutOfRange, "ground state index out of range");
    const cplx i(0.0, 1.0);
    AmplitudePair out;
    out.t = 1.0 + i * k.at(input, input, 0, 0);
    const double ref = -2.0 * wave_sign(input) * k.reference_position + phase_offset;
    out.r = i * k.at(opposite(input), input, 0, 0) * std::polar(1.0, ref);
    return out;
}

ScatteringKernel evaluate_kernel(const SystemSpec& s, const CombinedBasis& basis, double detuning, bool* dark_limit)
{
    if (dark_limit) *dark_limit = false;
    const auto m = assemble_nh(s, basis, detuning);
    try {
        return scattering_kernel(s, basis, invert_nh(m), detuning);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::SingularMatrix) throw;
    }
    const double eps = 1e-6 * std::max(1.0, m.entries.cwiseAbs().maxCoeff());
    const auto kp = scattering_kernel(s, basis, invert_nh(assemble_nh(s, basis, detuning + eps)), detuning);
    const auto km = scattering_kernel(s, basis, invert_nh(assemble_nh(s, basis, detuning - eps)), detuning);
    ScatteringKernel k = kp;
    double regular = 0.0, divergent = 0.0;
    for (std::size_t i = 0; i < k.amplitudes.size(); ++i) {
        k.amplitudes[i] = 0.5 * (kp.amplitudes[i] + km.amplitudes[i]);
        regular = std::max(regular, std::abs(k.amplitudes[i]));
        divergent = std::max(divergent, std::abs(0.5 * eps * (kp.amplitudes[i] - km.amplitudes[i])));
    }
    if (divergent > 1e-8 * (1.0 + regular))
        throw Error(ErrorCode::SingularMatrix, "singular non-Hermitian Hamiltonian at detuning " +
                                                   std::to_string(detuning) + ": zero-width state couples to the waveguide");
    if (dark_limit) *dark_limit = true;
    return k;
}

AmplitudePair evaluate_amplitudes(const SystemSpec& s, const CombinedBasis& basis, double detuning, Direction input,
                                  double phase_offset, bool* dark_limit)
{
    return output_amplitudes(evaluate_kernel(s, basis, detuning, dark_limit), input, 0, phase_offset);
}

Spectrum sweep_spectrum(const SystemSpec& s, const std::vector<double>& grid, Direction input, unsigned threads)
{
    const auto basis = build_single_excitation_basis(s);
    if (basis.ground_states.size() != 1)
        throw Error(ErrorCode::MultiGroundElastic,
                    "multi-ground elastic: spectra need a single ground state");
    for (double x : grid)
        if (!std::isfinite(x)) throw Error(ErrorCode::OutOfRange, "detuning grid contains a non-finite value");

    const std::size_t n = grid.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Spectrum sp;
    sp.detuning_grid = grid;
    sp.transmission.assign(n, nan);
    sp.reflection.assign(n, nan);
    sp.loss.assign(n, nan);
    std::vector<std::string> failures(n);
    std::vector<char> limits(n, 0);

    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t idx = first; idx < n; idx += stride) {
            try {
                bool dark = false;
                const auto amp = evaluate_amplitudes(s, basis, grid[idx], input, 0.0, &dark);
                limits[idx] = dark;
                const double t2 = std::norm(amp.t);
                const double r2 = std::norm(*amp.r);
                sp.transmission[idx] = t2;
                sp.reflection[idx] = r2;
                sp.loss[idx] = 1.0 - t2 - r2;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::SingularMatrix) throw;
                failures[idx] = e.what();
            }
        }
    };

    const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (nt == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(nt);
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&, t] {
                try {
                    work(t, nt);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    for (std::size_t idx = 0; idx < n; ++idx) {
        if (!failures[idx].empty()) sp.warnings.push_back({idx, grid[idx], failures[idx]});
        if (limits[idx]) sp.warnings.push_back({idx, grid[idx], "dark-state limit: decoupled zero-width state on resonance"});
    }
    return sp;
}

namespace {

cplx checked_div(cplx num, cplx den, const char* what)
{
    if (den == cplx(0.0, 0.0)) throw Error(ErrorCode::DivisionByZero, std::string("vanishing denominator ") + what);
    return num / den;
}

} // namespace

AmplitudePair closed_form_two_level(double delta, double gamma1d, double gamma_total)
{
    const cplx r = -checked_div(gamma1d, cplx(gamma_total, 2.0 * delta), "Gamma + 2i delta");
    return {1.0 + r, r};
}

AmplitudePair closed_form_v_system(double delta1, double delta2, double gamma1d, double gamma_total, double omega,
                                   double dphi)
{
    const cplx i(0.0, 1.0);
    const cplx d1(delta1, -0.5 * gamma_total);
    const cplx d2(delta2, -0.5 * gamma_total);
    const cplx gg = omega * omega - i * gamma1d * omega * std::cos(dphi) - 0.25 * gamma1d * gamma1d;
    const cplx num = d1 + d2 + i * gamma1d - 2.0 * omega * std::cos(dphi);
    const cplx r = 0.5 * i * gamma1d * checked_div(num, d1 * d2 - gg, "delta1 delta2 - G Gbar");
    return {1.0 + r, r};
}

AmplitudePair closed_form_two_emitters(double delta, double gamma1d, double gamma_prime, double k_dz)
{
    const cplx i(0.0, 1.0);
    const cplx q = (1.0 - std::exp(2.0 * i * k_dz)) *
                   checked_div(gamma1d * gamma1d, cplx(gamma_prime, 2.0 * delta), "Gamma' + 2i delta");
    const cplx den = cplx(gamma_prime + 2.0 * gamma1d, 2.0 * delta) + q;
    return {1.0 - checked_div(2.0 * gamma1d + q, den, "two-emitter denominator"), std::nullopt};
}

AmplitudePair closed_form_dipole_pair(const DipolePairParams& p)
{
    const cplx i(0.0, 1.0);
    const double s = std::sqrt(p.gamma1d_a * p.gamma1d_b);
    const double c = std::cos(p.phi);
    const cplx la(p.gamma_a, 2.0 * p.delta_a);
    const cplx lb(p.gamma_b, 2.0 * p.delta_b);
    const cplx num = 4.0 * i * s * p.v * c + 2.0 * p.gamma1d_a * p.gamma1d_b - p.gamma1d_a * lb - p.gamma1d_b * la;
    const cplx den = la * lb - p.gamma1d_a * p.gamma1d_b - 4.0 * i * s * p.v * c + 4.0 * p.v * p.v;
    return {1.0 + checked_div(num, den, "dipole-pair denominator"), std::nullopt};
}

AmplitudePair closed_form_two_plus_v(double delta_a, double delta_b, double gamma1d, double omega, double k_dz)
{
    const cplx i(0.0, 1.0);
    const cplx den = std::exp(2.0 * i * k_dz) * gamma1d * gamma1d -
                     cplx(gamma1d, 2.0 * delta_a) * (gamma1d + i * (omega + delta_b));
    return {checked_div(2.0 * delta_a * (omega + delta_b), den, "two-plus-V denominator"), std::nullopt};
}

} // namespace wgqed
