// Guided-mode directions and emitter-waveguide coupling constants

#pragma once

#include <complex>

#include "wgqed/emitter_model.hpp"

namespace wgqed {

enum class Direction { right, left };

inline Direction opposite(Direction d) { return d == Direction::right ? Direction::left : Direction::right; }

inline double wave_sign(Direction d) { return d == Direction::right ? 1.0 : -1.0; }

// A = sqrt(Gamma^dir) e^{i phi} e^{i k_dir z}, with z already a phase k0*z.
inline std::complex<double> coupling(const Transition& t, Direction d, double z)
{
    const double rate = d == Direction::right ? t.gamma1d_right : t.gamma1d_left;
    return std::polar(std::sqrt(rate), t.coupling_phase + wave_sign(d) * z);
}

// Weight of the guided-mode exchange from an emitter at zb to one at za:
// full when za lies downstream of zb, half when co-located, none upstream.
inline double propagation_weight(Direction d, double za, double zb)
{
    if (za == zb) return 0.5;
    return wave_sign(d) * (za - zb) > 0.0 ? 1.0 : 0.0;
}

} // namespace wgqed
