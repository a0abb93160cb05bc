#include "wgqed/effective_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wgqed/error.hpp"

namespace wgqed {

void validate_lambda(const LambdaParams& p)
{
    for (double r : {p.gamma0_1d_right, p.gamma0_1d_left, p.gamma1_1d_right, p.gamma1_1d_left, p.gamma0_prime,
                     p.gamma1_prime})
        if (!std::isfinite(r) || r < 0.0) throw Error(ErrorCode::InvalidSystem, "Lambda rates must be finite and >= 0");
    if (!std::isfinite(p.delta) || !std::isfinite(p.omega01))
        throw Error(ErrorCode::InvalidSystem, "Lambda detuning and splitting must be finite");
    if (!(p.gamma_total() > 0.0)) throw Error(ErrorCode::InvalidSystem, "Lambda total decay rate must be positive");
}

LambdaParams lambda_params_from_system(const SystemSpec& s, double detuning)
{
    if (s.emitters.size() != 1)
        throw Error(ErrorCode::ValidationError, "Lambda protocols need exactly one emitter");
    const auto& em = s.emitters.front();
    std::vector<std::size_t> grounds, excited;
    for (std::size_t l = 0; l < em.levels.size(); ++l)
        (em.levels[l].kind == LevelKind::ground ? grounds : excited).push_back(l);
    if (grounds.size() != 2 || excited.size() != 1)
        throw Error(ErrorCode::ValidationError, "Lambda protocols need two ground levels and one excited level");
    const auto& g0 = em.levels[grounds[0]];
    const auto& g1 = em.levels[grounds[1]];
    const auto& e = em.levels[excited[0]];

    LambdaParams p;
    for (const auto& tr : em.transitions) {
        if (tr.ground == g0.id) {
            p.gamma0_1d_right = tr.gamma1d_right;
            p.gamma0_1d_left = tr.gamma1d_left;
            p.gamma0_prime = tr.gamma_prime;
        } else if (tr.ground == g1.id) {
            p.gamma1_1d_right = tr.gamma1d_right;
            p.gamma1_1d_left = tr.gamma1d_left;
            p.gamma1_prime = tr.gamma_prime;
        }
    }
    p.delta = e.energy - g0.energy + detuning;
    p.omega01 = ground_splitting(s, {em.id, g0.id}, {em.id, g1.id});
    validate_lambda(p);
    return p;
}

Rates compute_rates(const LambdaParams& p)
{
    validate_lambda(p);
    const double n2 = p.detuning_norm2();
    const double g = p.gamma_total();
    Rates r;
    r.p_d = p.gamma0() * p.gamma0_1d_right / n2;
    r.p_r = p.gamma1() * p.gamma0_1d_right / n2;
    r.p_sc = (2.0 - p.beta0() - p.beta1()) * p.beta0() / (1.0 + 4.0 * p.delta * p.delta / (g * g));
    return r;
}

StarkElements effective_hamiltonian_elements(const LambdaParams& p, double intensity)
{
    validate_lambda(p);
    StarkElements h;
    h.h00_shift = -p.gamma0_1d() * intensity * p.delta / p.detuning_norm2();
    h.h11 = p.omega01;
    h.omega01_prime = h.h11 - h.h00_shift;
    return h;
}

namespace {

struct State {
    double rho00;
    double rho11;
    std::complex<double> rho01;
};

struct Rhs {
    double transfer;                 // p_r * I
    std::complex<double> coherence;  // i omega' - (p_r + p_d) I / 2

    State operator()(const State& y) const
    {
        return {-transfer * y.rho00, transfer * y.rho00, coherence * y.rho01};
    }
};

State axpy(const State& y, double h, const State& k)
{
    return {y.rho00 + h * k.rho00, y.rho11 + h * k.rho11, y.rho01 + h * k.rho01};
}

State rk4(const Rhs& f, const State& y, double h)
{
    const State k1 = f(y);
    const State k2 = f(axpy(y, 0.5 * h, k1));
    const State k3 = f(axpy(y, 0.5 * h, k2));
    const State k4 = f(axpy(y, h, k3));
    return {y.rho00 + h / 6.0 * (k1.rho00 + 2.0 * k2.rho00 + 2.0 * k3.rho00 + k4.rho00),
            y.rho11 + h / 6.0 * (k1.rho11 + 2.0 * k2.rho11 + 2.0 * k3.rho11 + k4.rho11),
            y.rho01 + h / 6.0 * (k1.rho01 + 2.0 * k2.rho01 + 2.0 * k3.rho01 + k4.rho01)};
}

} // namespace

std::vector<GroundDensity> evolve_ground_state(const LambdaParams& p, const PulseSpec& pulse,
                                               const std::vector<double>& t_grid, const GroundDensity& initial,
                                               const EvolveOptions& options)
{
    const Rates rates = compute_rates(p);
    if (!(pulse.duration > 0.0) || !(pulse.intensity >= 0.0) || !std::isfinite(pulse.intensity))
        throw Error(ErrorCode::OutOfRange, "pulse needs intensity >= 0 and duration > 0");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!std::isfinite(t_grid[k]) || t_grid[k] < initial.time || (k > 0 && t_grid[k] < t_grid[k - 1]))
            throw Error(ErrorCode::OutOfRange, "time grid must be sorted and start at or after the initial time");
    }

    auto rhs_for = [&](double intensity) {
        const double w = effective_hamiltonian_elements(p, intensity).omega01_prime;
        return Rhs{rates.p_r * intensity, std::complex<double>(-0.5 * (rates.p_r + rates.p_d) * intensity, w)};
    };
    auto step_bound = [&](double intensity) {
        const double decay = std::max(rates.p_r, rates.p_d) * intensity;
        const double rotation = std::abs(effective_hamiltonian_elements(p, intensity).omega01_prime);
        double h = std::numeric_limits<double>::infinity();
        if (decay > 0.0) h = std::min(h, 1e-3 / decay);
        if (rotation > 0.0) h = std::min(h, 1e-2 / rotation);
        return h;
    };

    State y{initial.rho00, initial.rho11, initial.rho01};
    double t = initial.time;
    std::size_t steps = 0;
    std::vector<GroundDensity> out;
    out.reserve(t_grid.size());

    auto advance = [&](double t_end) {
        while (t < t_end) {
            // Piecewise-constant intensity; stop at the pulse edges.
            double seg_end = t_end;
            if (t < 0.0) seg_end = std::min(seg_end, 0.0);
            else if (t < pulse.duration) seg_end = std::min(seg_end, pulse.duration);
            const double intensity = (t >= 0.0 && t < pulse.duration) ? pulse.intensity : 0.0;
            const Rhs f = rhs_for(intensity);
            const double len = seg_end - t;
            const double hmax = step_bound(intensity);
            std::size_t n = 1;
            if (std::isfinite(hmax)) {
                const double want = std::ceil(len / hmax);
                if (want > static_cast<double>(options.max_steps - steps))
                    throw Error(ErrorCode::StepTooLarge, "step bound needs more than " +
                                                             std::to_string(options.max_steps) + " steps");
                n = std::max<std::size_t>(1, static_cast<std::size_t>(want));
            }
            const double h = len / static_cast<double>(n);
            for (std::size_t k = 0; k < n; ++k) y = rk4(f, y, h);
            steps += n;
            t = seg_end;
        }
    };

    for (double tk : t_grid) {
        advance(tk);
        out.push_back({y.rho00, y.rho11, y.rho01, tk});
    }
    return out;
}

GroundDensity closed_form_ground_state(const LambdaParams& p, const PulseSpec& pulse, double t,
                                       const GroundDensity& initial)
{
    const Rates rates = compute_rates(p);
    const double lit = std::max(0.0, std::min(t, pulse.duration) - std::max(initial.time, 0.0));
    const double dark = (t - initial.time) - lit;
    const double dose = pulse.intensity * lit;
    const double w = effective_hamiltonian_elements(p, pulse.intensity).omega01_prime;
    GroundDensity g;
    g.time = t;
    g.rho00 = initial.rho00 * std::exp(-rates.p_r * dose);
    g.rho11 = initial.rho11 + initial.rho00 - g.rho00;
    g.rho01 = initial.rho01 *
              std::exp(std::complex<double>(-0.5 * (rates.p_r + rates.p_d) * dose, w * lit + p.omega01 * dark));
    return g;
}

} // namespace wgqed
