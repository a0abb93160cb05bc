#include "wgqed/nh_hamiltonian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wgqed/error.hpp"
#include "wgqed/waveguide.hpp"

namespace wgqed {

namespace {

void check_basis(const SystemSpec& s, const CombinedBasis& basis)
{
    std::size_t expected = 0;
    for (const auto& em : s.emitters)
        for (const auto& lv : em.levels)
            if (lv.kind == LevelKind::excited) ++expected;
    if (expected != basis.dim())
        throw Error(ErrorCode::BasisMismatch, "basis has " + std::to_string(basis.dim()) +
                                                  " excited states, system has " + std::to_string(expected));
    for (const auto& st : basis.excited_states) {
        if (st.emitter >= s.emitters.size() || st.level >= s.emitters[st.emitter].levels.size() ||
            s.emitters[st.emitter].levels[st.level].kind != LevelKind::excited)
            throw Error(ErrorCode::BasisMismatch, "basis state does not match an excited level of the system");
        for (const auto& ch : st.channels)
            if (ch.transition >= s.emitters[st.emitter].transitions.size() ||
                ch.ground_state >= basis.ground_states.size())
                throw Error(ErrorCode::BasisMismatch, "basis decay channel out of range");
    }
}

std::size_t excited_of(const SystemSpec& s, const CombinedBasis& basis, const LevelRef& r)
{
    auto j = s.find_emitter(r.emitter);
    if (j) {
        auto l = s.emitters[*j].find_level(r.level);
        if (l) {
            auto idx = basis.excited_index(*j, *l);
            if (idx) return *idx;
        }
    }
    throw Error(ErrorCode::UnknownLevel, "coupling references unknown excited level " + r.emitter + "." + r.level);
}

} // namespace

NhMatrix assemble_nh(const SystemSpec& s, const CombinedBasis& basis, double detuning)
{
    check_basis(s, basis);
    const auto n = static_cast<Eigen::Index>(basis.dim());
    NhMatrix m;
    m.detuning = detuning;
    m.entries = Eigen::MatrixXcd::Zero(n, n);
    m.input_detunings.resize(basis.dim());

    for (Eigen::Index a = 0; a < n; ++a) {
        const auto& st = basis.excited_states[a];
        const auto& em = s.emitters[st.emitter];
        const auto& lv = em.levels[st.level];
        const double delta = lv.energy - em.levels[em.first_ground()].energy + detuning;
        const double gamma = total_decay_rate(em, lv.id);
        m.input_detunings[a] = cplx(delta, -0.5 * gamma);
        m.entries(a, a) = m.input_detunings[a];
    }

    // Waveguide exchange between distinct excited states that decay to the same ground.
    for (Eigen::Index a = 0; a < n; ++a) {
        const auto& sa = basis.excited_states[a];
        const double za = s.emitters[sa.emitter].phase_position;
        for (Eigen::Index b = 0; b < n; ++b) {
            if (a == b) continue;
            const auto& sb = basis.excited_states[b];
            const double zb = s.emitters[sb.emitter].phase_position;
            for (const auto& ca : sa.channels) {
                const auto& ta = s.emitters[sa.emitter].transitions[ca.transition];
                for (const auto& cb : sb.channels) {
                    if (ca.ground_state != cb.ground_state) continue;
                    const auto& tb = s.emitters[sb.emitter].transitions[cb.transition];
                    for (Direction d : {Direction::right, Direction::left}) {
                        const double w = propagation_weight(d, za, zb);
                        if (w == 0.0) continue;
                        m.entries(a, b) += cplx(0.0, -w) * coupling(ta, d, za) * std::conj(coupling(tb, d, zb));
                    }
                }
            }
        }
    }

    auto place = [&](const LevelRef& ra, const LevelRef& rb, double mag, double phase) {
        const auto a = static_cast<Eigen::Index>(excited_of(s, basis, ra));
        const auto b = static_cast<Eigen::Index>(excited_of(s, basis, rb));
        m.entries(a, b) += std::polar(mag, phase);
        m.entries(b, a) += std::polar(mag, -phase);
    };
    for (const auto& c : s.coherent_couplings) place(c.a, c.b, c.magnitude, c.phase);
    for (const auto& c : s.dipole_couplings) place(c.a, c.b, c.magnitude, c.phase);

    if (!m.entries.allFinite())
        throw Error(ErrorCode::NonfiniteEntry, "non-finite entry in the non-Hermitian Hamiltonian");
    return m;
}

NhInverse invert_nh(const NhMatrix& m)
{
    if (!m.entries.allFinite())
        throw Error(ErrorCode::NonfiniteEntry, "cannot invert a matrix with non-finite entries");
    const double scale = m.entries.cwiseAbs().maxCoeff();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m.entries);
    const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (scale == 0.0 || pivot < 1e-12 * scale)
        throw Error(ErrorCode::SingularMatrix,
                    "singular non-Hermitian Hamiltonian at detuning " + std::to_string(m.detuning) +
                        " (lossless dark state on resonance)");
    NhInverse inv;
    inv.entries = lu.inverse();
    const double rc = lu.rcond();
    inv.condition_estimate = rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    return inv;
}

namespace {

cplx checked_div(cplx num, cplx den, const char* symbol)
{
    if (den == cplx(0.0, 0.0)) throw Error(ErrorCode::DivisionByZero, std::string("vanishing denominator ") + symbol);
    return num / den;
}

} // namespace

EffectiveParamsV effective_params_v(cplx d1, cplx d2, cplx g, cplx g_bar)
{
    EffectiveParamsV out;
    const cplx gg = g * g_bar;
    out.delta1_eff = d1 - checked_div(gg, d2, "delta2");
    out.delta2_eff = d2 - checked_div(gg, d1, "delta1");
    const cplx num = gg - d1 * d2;
    if (g != cplx(0.0, 0.0)) out.g_eff = num / g;
    if (g_bar != cplx(0.0, 0.0)) out.g_prime_eff = num / g_bar;
    return out;
}

EffectiveParams3 effective_params_two_emitter(const TwoEmitterParams& p)
{
    const cplx d1 = p.delta1, d2 = p.delta2, d3 = p.delta3;
    const cplx g12 = p.gamma12, g13 = p.gamma13, g23 = p.gamma23;
    const cplx i(0.0, 1.0);
    const cplx x = p.omega - i * g23;      // full coupling combination
    const cplx y = 0.5 * x;                // matrix entry between levels 2 and 3
    const auto q = [](cplx a, cplx b, const char* sym) { return checked_div(a, b, sym); };

    EffectiveParams3 e;
    const cplx s12 = q(g12 * g12, 4.0 * d2, "delta2");
    const cplx s13 = q(g13 * g13, 4.0 * d3, "delta3");
    e.delta1_eff = d1 + s12 + s13 -
                   q(x * (s12 + s13) - g12 * g13, x - q(4.0 * d2 * d3, x, "Omega - i Gamma23"),
                     "(Omega - i Gamma23) - 4 delta2 delta3 / (Omega - i Gamma23)");

    const cplx a12 = q(g12 * g12, 4.0 * d1, "delta1");
    const cplx a13 = q(g13 * g13, 4.0 * d1, "delta1");
    const cplx x3 = q(x * x, 4.0 * d3, "delta3");
    const cplx x2 = q(x * x, 4.0 * d2, "delta2");
    e.delta2_eff = d2 + a12 - x3 -
                   q(g13 * (a12 - x3) + g12 * x, g13 + q(4.0 * d1 * d3, g13, "Gamma13"),
                     "Gamma13 + 4 delta1 delta3 / Gamma13");
    e.delta3_eff = d3 + a13 - x2 -
                   q(g12 * (a13 - x2) + g13 * x, g12 + q(4.0 * d1 * d2, g12, "Gamma12"),
                     "Gamma12 + 4 delta1 delta2 / Gamma12");

    const cplx r12 = q(4.0 * d1 * d2, g12, "Gamma12");
    const cplx r13 = q(4.0 * d1 * d3, g13, "Gamma13");
    e.gamma12_eff =
        -0.5 * i *
        (g12 + r12 +
         q(q(g13 * g13, g12, "Gamma12") * d2 - q(4.0 * y * y, g12, "Gamma12") * d1 - y * g13 * (1.0 - r12 / g12),
           d3 - q(y * g13, g12, "Gamma12"), "delta3 - Y Gamma13 / Gamma12"));
    e.gamma13_eff =
        -0.5 * i *
        (g13 + r13 +
         q(q(g12 * g12, g13, "Gamma13") * d3 - q(4.0 * y * y, g13, "Gamma13") * d1 - y * g12 * (1.0 - r13 / g13),
           d2 - q(y * g12, g13, "Gamma13"), "delta2 - Y Gamma12 / Gamma13"));
    e.gamma23_eff = y - q(d2 * d3, y, "Omega/2 - i Gamma23/2") +
                    0.25 * q((g12 - q(g13 * d2, y, "Y")) * (g13 - q(g12 * d3, y, "Y")),
                             d1 + 0.25 * q(g12 * g13, y, "Y"), "delta1 + Gamma12 Gamma13 / (4 Y)");
    return e;
}

} // namespace wgqed
