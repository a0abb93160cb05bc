#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "builders.hpp"
#include "oracles.hpp"
#include "wgqed/effective_dynamics.hpp"
#include "wgqed/error.hpp"

using namespace wgqed;
using namespace wgqed::testing;

namespace {

// Gamma = 1, symmetric guided coupling, lost rate split between the two channels.
LambdaParams symmetric_lambda(double b0, double b1, double delta, double omega01 = 0.0)
{
    LambdaParams p;
    p.gamma0_1d_right = p.gamma0_1d_left = b0 / 2.0;
    p.gamma1_1d_right = p.gamma1_1d_left = b1 / 2.0;
    p.gamma0_prime = p.gamma1_prime = (1.0 - b0 - b1) / 2.0;
    p.delta = delta;
    p.omega01 = omega01;
    return p;
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

} // namespace

TEST_CASE("balanced resonant Lambda: half the photons flip the emitter")
{
    const Rates r = compute_rates(symmetric_lambda(0.5, 0.5, 0.0));
    CHECK(r.p_r == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.p_sc == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(r.p_d == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("no drive coupling means no rates")
{
    LambdaParams p = symmetric_lambda(0.0, 0.6, 0.3);
    const Rates r = compute_rates(p);
    CHECK(r.p_d == 0.0);
    CHECK(r.p_r == 0.0);
    CHECK(r.p_sc == 0.0);
}

TEST_CASE("rate sum equals Gamma Gamma0R / |delta~|^2")
{
    Rng rng(2);
    for (int k = 0; k < 50; ++k) {
        const double b0 = rng.uniform(0.0, 1.0);
        const double b1 = rng.uniform(0.0, 1.0 - b0);
        const LambdaParams p = symmetric_lambda(b0, b1, rng.uniform(-3.0, 3.0));
        const Rates r = compute_rates(p);
        const double want = p.gamma_total() * p.gamma0_1d_right / (p.delta * p.delta + 0.25);
        CHECK(r.p_r + r.p_d == doctest::Approx(want).epsilon(1e-14));
        CHECK(r.p_r <= 1.0);
        CHECK(r.p_sc >= 0.0);
        CHECK(r.p_sc <= 1.0);
    }
}

TEST_CASE("Stark shift")
{
    const LambdaParams p = symmetric_lambda(0.5, 0.5, 0.5, 0.2);
    CHECK(effective_hamiltonian_elements(p, 1.0).omega01_prime - 0.2 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(effective_hamiltonian_elements(p, 0.0).h00_shift == 0.0);
    const StarkElements none = effective_hamiltonian_elements(symmetric_lambda(0.5, 0.5, 0.0, 0.2), 3.0);
    CHECK(none.h00_shift == 0.0);
    CHECK(none.omega01_prime == 0.2);
}

TEST_CASE("parameters extracted from a Lambda system")
{
    const SystemSpec s = lambda_system(Transition{"", "", 0.1, 0.2, 0.05, 0.0}, Transition{"", "", 0.3, 0.3, 0.0, 0.0},
                                       0.4, 1.5);
    const LambdaParams p = lambda_params_from_system(s, -0.25);
    CHECK(p.gamma0_1d_right == 0.1);
    CHECK(p.gamma0_1d_left == 0.2);
    CHECK(p.gamma0_prime == 0.05);
    CHECK(p.gamma1_1d_right == 0.3);
    CHECK(p.delta == 1.25);
    CHECK(p.omega01 == 0.4);
    CHECK_THROWS_AS(lambda_params_from_system(single_two_level(0.5, 0.5), 0.0), Error);
}

TEST_CASE("invalid Lambda parameters")
{
    LambdaParams p = symmetric_lambda(0.5, 0.5, 0.0);
    p.gamma1_prime = -0.1;
    CHECK_THROWS_AS(compute_rates(p), Error);
    CHECK_THROWS_AS(compute_rates(LambdaParams{}), Error);
}

TEST_CASE("no light, no change")
{
    const LambdaParams p = symmetric_lambda(0.5, 0.5, 0.3, 0.1);
    GroundDensity init{0.7, 0.3, {0.2, 0.1}, 0.0};
    const auto traj = evolve_ground_state(p, PulseSpec{PulseShape::square, 0.0, 5.0}, linspace(0.0, 5.0, 11), init);
    for (const auto& g : traj) {
        CHECK(g.rho00 == 0.7);
        CHECK(g.rho11 == 0.3);
        CHECK(std::abs(g.rho01) == doctest::Approx(std::abs(init.rho01)).epsilon(1e-12));
    }
}

TEST_CASE("unit dose empties the driven level to 1/e")
{
    const LambdaParams p = symmetric_lambda(0.5, 0.5, 0.0);
    const auto traj = evolve_ground_state(p, PulseSpec{PulseShape::square, 2.0, 1.0}, {1.0});
    CHECK(traj[0].rho00 == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(closed_form_ground_state(p, PulseSpec{PulseShape::square, 2.0, 1.0}, 1.0).rho00 ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("trajectory invariants and agreement with the exact solution")
{
    Rng rng(13);
    for (int k = 0; k < 10; ++k) {
        const double b0 = rng.uniform(0.1, 1.0);
        const LambdaParams p = symmetric_lambda(b0, rng.uniform(0.0, 1.0 - b0), rng.uniform(-2.0, 2.0),
                                                rng.uniform(0.0, 0.5));
        const PulseSpec pulse{PulseShape::square, rng.uniform(0.05, 1.0), rng.uniform(1.0, 10.0)};
        const GroundDensity init{0.5, 0.5, {0.5, 0.0}, 0.0};
        const auto grid = linspace(0.0, 1.5 * pulse.duration, 61);
        const auto traj = evolve_ground_state(p, pulse, grid, init);
        const Rates r = compute_rates(p);
        double prev = 1.0;
        for (const auto& g : traj) {
            const GroundDensity exact = closed_form_ground_state(p, pulse, g.time, init);
            CHECK(std::abs(g.rho00 - exact.rho00) <= 1e-6);
            CHECK(std::abs(g.rho01 - exact.rho01) <= 1e-6);
            CHECK(std::abs(g.rho00 + g.rho11 - 1.0) <= 1e-9);
            CHECK(g.rho00 <= prev + 1e-15);
            CHECK(std::abs(g.rho01) <= std::sqrt(g.rho00 * g.rho11) + 1e-9);
            prev = g.rho00;
            // Coherence decays at half the total pumping rate while the pulse is on.
            const double dose = pulse.intensity * std::min(g.time, pulse.duration);
            CHECK(std::abs(exact.rho01) == doctest::Approx(0.5 * std::exp(-0.5 * (r.p_r + r.p_d) * dose)).epsilon(1e-12));
        }
    }
}

TEST_CASE("exhausted step budget")
{
    const LambdaParams p = symmetric_lambda(0.5, 0.5, 0.0, 1e6);
    try {
        evolve_ground_state(p, PulseSpec{PulseShape::square, 1.0, 10.0}, {10.0}, GroundDensity{}, EvolveOptions{1000});
        FAIL("expected StepTooLarge");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepTooLarge);
    }
}

TEST_CASE("unsorted time grid")
{
    const LambdaParams p = symmetric_lambda(0.5, 0.5, 0.0);
    CHECK_THROWS_AS(evolve_ground_state(p, PulseSpec{PulseShape::square, 1.0, 1.0}, {0.5, 0.2}), Error);
}
