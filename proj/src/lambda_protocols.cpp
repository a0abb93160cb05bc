#include "wgqed/lambda_protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wgqed/error.hpp"

namespace wgqed {

namespace {

void require_symmetric(const LambdaParams& p)
{
    if (!p.symmetric())
        throw Error(ErrorCode::AsymmetricCoupling, "closed forms need equal left and right guided-mode rates");
}

void require_pulse(const PulseSpec& pulse)
{
    if (!(pulse.duration > 0.0) || !(pulse.intensity >= 0.0) || !std::isfinite(pulse.intensity) ||
        !std::isfinite(pulse.duration))
        throw Error(ErrorCode::OutOfRange, "pulse needs intensity >= 0 and finite duration > 0");
}

double lorentz(const LambdaParams& p)
{
    const double g = p.gamma_total();
    return 1.0 + 4.0 * p.delta * p.delta / (g * g);
}

// (1 - e^{-x}) / x with the x -> 0 limit.
double one_minus_exp_over(double x) { return x == 0.0 ? 1.0 : -std::expm1(-x) / x; }

} // namespace

FilteredProbs filtered_photon_probs(const LambdaParams& p)
{
    validate_lambda(p);
    require_symmetric(p);
    const double b0 = p.beta0(), b1 = p.beta1(), l = lorentz(p);
    FilteredProbs f;
    f.p_red_r = b0 * b1 / l;
    f.p_red_l = f.p_red_r;
    f.p_blue_r = 1.0 - (2.0 - b0) * b0 / l;
    f.p_blue_l = b0 * b0 / l;
    return f;
}

double output_intensity(const LambdaParams& p, const PulseSpec& pulse, double t)
{
    require_pulse(pulse);
    if (!(t >= 0.0 && t <= pulse.duration)) throw Error(ErrorCode::OutOfRange, "time outside the pulse window");
    const Rates r = compute_rates(p);
    return pulse.intensity * (1.0 - r.p_sc * std::exp(-r.p_r * pulse.intensity * t));
}

ClickProbs click_probabilities(const LambdaParams& p, const PulseSpec& pulse, const DetectionConfig& d)
{
    require_pulse(pulse);
    if (!(d.efficiency >= 0.0 && d.efficiency <= 1.0))
        throw Error(ErrorCode::OutOfRange, "detection efficiency must lie in [0, 1]");
    const Rates r = compute_rates(p);

    // Transmitted intensity per unit input: c_const + c_rho * rho00(t).
    double c_const = 1.0, c_rho = -r.p_sc;
    if (d.filter == Filter::red_only) {
        const auto f = filtered_photon_probs(p);
        c_const = 0.0;
        c_rho = f.p_red_r;
    } else if (d.filter == Filter::blue_only) {
        const auto f = filtered_photon_probs(p);
        c_const = 1.0;
        c_rho = f.p_blue_r - 1.0;
    }
    const double nbar = pulse.nbar();
    ClickProbs c;
    c.p_click_single = d.efficiency * (c_const + c_rho);
    c.p_click_coherent = d.efficiency * (c_const * nbar + c_rho * nbar * one_minus_exp_over(r.p_r * nbar));
    c.p_click_coherent_small_nbar = nbar * c.p_click_single;
    return c;
}

double conditional_fidelity(const FidelityParams& fp, double t_c)
{
    const LambdaParams& p = fp.lambda;
    const PulseSpec& pulse = fp.pulse;
    require_pulse(pulse);
    require_symmetric(p);
    if (!(t_c >= 0.0 && t_c <= pulse.duration)) throw Error(ErrorCode::OutOfRange, "click time outside [0, T]");

    const Rates r = compute_rates(p);
    const double g = p.gamma_total();
    const double b0 = p.beta0(), b1 = p.beta1();
    const double a2 = pulse.intensity;
    const double T = pulse.duration;

    const double n = (4.0 * p.delta * p.delta / (g * g) + (1.0 - b0) * (1.0 - b0)) * b0 * b1 * g * g * g * g;
    const double den = 0.5 * (4.0 * p.delta * p.delta + g * g) * (1.0 - r.p_sc * std::exp(-r.p_r * a2 * t_c));
    const double w = effective_hamiltonian_elements(p, a2).omega01_prime;
    const double phi = fp.detection.phase_offset + w * (T - t_c) + std::atan((2.0 * p.delta / g) / (1.0 - b0));
    const double gam = a2 * (r.p_r * (t_c + T) / 2.0 + r.p_d * (T - t_c) / 2.0);
    return 0.5 + 0.5 * std::exp(-gam) * std::sqrt(n) / den * std::cos(phi);
}

AverageFidelity average_fidelity(const FidelityParams& fp, std::size_t min_panels)
{
    require_pulse(fp.pulse);
    const double T = fp.pulse.duration;
    const double nbar = fp.pulse.nbar();
    const double x = fp.lambda.omega01 * T;
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;

    AverageFidelity a;
    a.closed_form = 0.5 + 0.5 * sinc * std::exp(-nbar / 2.0) / (2.0 - std::exp(-nbar / 2.0));

    std::size_t panels = std::max<std::size_t>(min_panels, 2000);
    if (panels % 2) ++panels;
    const double h = T / static_cast<double>(panels);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k <= panels; ++k) {
        const double t = k == panels ? T : h * static_cast<double>(k);
        const double wgt = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        const double i_out = output_intensity(fp.lambda, fp.pulse, t);
        num += wgt * i_out * conditional_fidelity(fp, t);
        den += wgt * i_out;
    }
    a.numeric = den == 0.0 ? std::numeric_limits<double>::quiet_NaN() : num / den;
    a.discrepancy = std::abs(a.closed_form - a.numeric);
    return a;
}

} // namespace wgqed
