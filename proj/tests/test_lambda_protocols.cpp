#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wgqed/error.hpp"
#include "wgqed/lambda_protocols.hpp"

using namespace wgqed;
using namespace wgqed::testing;
using std::numbers::pi;

namespace {

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

FidelityParams balanced(double nbar, double T, double omega01)
{
    return FidelityParams{symmetric_lambda(0.5, 0.5, 0.0, omega01), PulseSpec{PulseShape::square, nbar / T, T}, {}};
}

// Balanced resonant case worked out by hand from the general conditional-fidelity expression:
// P_R = P_d = 1/2 gives gamma = nbar/2 for every click time and D = (1/2)(1 - e^{-nbar t_c / (2T)} / 2).
double balanced_fidelity(double nbar, double T, double omega01, double t_c)
{
    return 0.5 + 0.5 * std::exp(-nbar / 2.0) / (2.0 - std::exp(-nbar * t_c / (2.0 * T))) *
                     std::cos(omega01 * (T - t_c));
}

} // namespace

TEST_CASE("filtered channels of the balanced resonant emitter")
{
    const FilteredProbs f = filtered_photon_probs(symmetric_lambda(0.5, 0.5, 0.0));
    CHECK(f.p_red_r == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f.p_red_l == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f.p_blue_r == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(f.p_blue_l == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("uncoupled drive transition transmits everything")
{
    const FilteredProbs f = filtered_photon_probs(symmetric_lambda(0.0, 0.7, 0.4));
    CHECK(f.p_red_r == 0.0);
    CHECK(f.p_blue_r == 1.0);
    CHECK(f.p_blue_l == 0.0);
}

TEST_CASE("lossless channels are complete")
{
    Rng rng(17);
    for (int k = 0; k < 50; ++k) {
        const double b0 = rng.uniform(0.0, 1.0);
        const FilteredProbs f = filtered_photon_probs(symmetric_lambda(b0, 1.0 - b0, rng.uniform(-5.0, 5.0)));
        CHECK(std::abs(f.p_red_r + f.p_red_l + f.p_blue_r + f.p_blue_l - 1.0) <= 1e-12);
    }
}

TEST_CASE("closed forms refuse chiral coupling")
{
    LambdaParams p = symmetric_lambda(0.5, 0.5, 0.0);
    p.gamma0_1d_left = 0.1;
    try {
        filtered_photon_probs(p);
        FAIL("expected AsymmetricCoupling");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::AsymmetricCoupling);
    }
}

TEST_CASE("output intensity")
{
    const LambdaParams p = symmetric_lambda(0.5, 0.5, 0.0);
    const PulseSpec pulse{PulseShape::square, 1.0, 4.0};
    CHECK(output_intensity(p, pulse, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(output_intensity(p, pulse, 1.0) == doctest::Approx(1.0 - 0.5 * std::exp(-0.5)).epsilon(1e-15));
    CHECK(output_intensity(p, pulse, 1.0) == doctest::Approx(0.6967).epsilon(1e-4));
    const PulseSpec strong{PulseShape::square, 50.0, 4.0};
    CHECK(output_intensity(p, strong, 4.0) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK_THROWS_AS(output_intensity(p, pulse, 4.5), Error);
}

TEST_CASE("click probabilities")
{
    const PulseSpec pulse{PulseShape::square, 0.01, 1.0};
    SUBCASE("uncoupled emitter clicks with the detector efficiency")
    {
        const ClickProbs c = click_probabilities(symmetric_lambda(0.0, 0.5, 0.0), pulse, DetectionConfig{0.8});
        CHECK(c.p_click_single == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("two-level mirror never clicks")
    {
        const ClickProbs c = click_probabilities(symmetric_lambda(1.0, 0.0, 0.0), pulse, DetectionConfig{0.8});
        CHECK(std::abs(c.p_click_single) < 1e-15);
    }
    SUBCASE("single click equals efficiency times right-going channels")
    {
        Rng rng(23);
        for (int k = 0; k < 20; ++k) {
            const double b0 = rng.uniform(0.0, 1.0);
            const LambdaParams p = symmetric_lambda(b0, rng.uniform(0.0, 1.0 - b0), rng.uniform(-3.0, 3.0));
            const double eta = rng.uniform(0.1, 1.0);
            const FilteredProbs f = filtered_photon_probs(p);
            const ClickProbs c = click_probabilities(p, pulse, DetectionConfig{eta});
            CHECK(std::abs(c.p_click_single - eta * (f.p_red_r + f.p_blue_r)) <= 1e-12);
        }
    }
    SUBCASE("weak pulses click in proportion to nbar")
    {
        const LambdaParams p = symmetric_lambda(0.6, 0.3, 0.2);
        for (double nbar : {1e-3, 1e-5}) {
            const ClickProbs c = click_probabilities(p, PulseSpec{PulseShape::square, nbar, 1.0}, DetectionConfig{0.9});
            CHECK(c.p_click_coherent / nbar == doctest::Approx(c.p_click_single).epsilon(nbar * 2.0));
            CHECK(c.p_click_coherent_small_nbar == doctest::Approx(nbar * c.p_click_single).epsilon(1e-15));
        }
    }
    SUBCASE("filters split the click into red and blue parts")
    {
        const LambdaParams p = symmetric_lambda(0.5, 0.4, 0.3);
        const PulseSpec strong{PulseShape::square, 0.5, 3.0};
        const double all = click_probabilities(p, strong, DetectionConfig{1.0}).p_click_coherent;
        const double red = click_probabilities(p, strong, DetectionConfig{1.0, Filter::red_only}).p_click_coherent;
        const double blue = click_probabilities(p, strong, DetectionConfig{1.0, Filter::blue_only}).p_click_coherent;
        CHECK(red + blue == doctest::Approx(all).epsilon(1e-12));
    }
}

TEST_CASE("conditional fidelity of the balanced resonant emitter")
{
    const double T = 100.0;
    for (double nbar : {0.1, 0.8, 2.0})
        for (double w : {0.0, 1e-3, 0.05})
            for (double tc : {0.0, 13.0, 50.0, 99.0, 100.0}) {
                const FidelityParams fp = balanced(nbar, T, w);
                CHECK(conditional_fidelity(fp, tc) == doctest::Approx(balanced_fidelity(nbar, T, w, tc)).epsilon(1e-13));
            }
}

TEST_CASE("weak pulse prepares the target superposition")
{
    CHECK(conditional_fidelity(balanced(1e-9, 100.0, 0.0), 100.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fidelity stays in [0, 1] and swaps under a pi phase")
{
    Rng rng(31);
    for (int k = 0; k < 50; ++k) {
        const double b0 = rng.uniform(0.05, 1.0);
        FidelityParams fp{symmetric_lambda(b0, rng.uniform(0.0, 1.0 - b0), rng.uniform(-2.0, 2.0), rng.uniform(0.0, 0.1)),
                          PulseSpec{PulseShape::square, rng.uniform(0.001, 0.05), 100.0},
                          DetectionConfig{1.0, Filter::none, rng.uniform(0.0, 6.0)}};
        const double tc = rng.uniform(0.0, 100.0);
        const double f = conditional_fidelity(fp, tc);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        fp.detection.phase_offset += pi;
        CHECK(conditional_fidelity(fp, tc) == doctest::Approx(1.0 - f).epsilon(1e-12));
    }
}

TEST_CASE("click time outside the pulse")
{
    try {
        conditional_fidelity(balanced(0.8, 100.0, 0.0), 101.0);
        FAIL("expected OutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::OutOfRange);
    }
}

TEST_CASE("averaged fidelity: closed form limits")
{
    CHECK(average_fidelity(balanced(1.0, 100.0, 1e-9)).closed_form ==
          doctest::Approx(1.0 / (2.0 - std::exp(-0.5))).epsilon(1e-12));
    CHECK(average_fidelity(balanced(1.0, 100.0, 1e4)).closed_form == doctest::Approx(0.5).epsilon(1e-4));
    const double x = 2.0;
    CHECK(average_fidelity(balanced(1e-8, 100.0, x / 100.0)).closed_form ==
          doctest::Approx(0.5 + 0.5 * std::sin(x) / x).epsilon(1e-8));
}

TEST_CASE("averaged fidelity: Simpson average matches a fine independent quadrature")
{
    const double T = 100.0;
    for (double nbar : {0.5, 1.0, 2.0})
        for (double w : {1e-5, 0.01, 0.1}) {
            const AverageFidelity a = average_fidelity(balanced(nbar, T, w));
            const int n = 200000;
            double num = 0.0, den = 0.0;
            for (int k = 0; k <= n; ++k) {
                const double t = T * k / n;
                const double wt = (k == 0 || k == n) ? 0.5 : 1.0;
                const double i_out = 1.0 - 0.5 * std::exp(-0.5 * nbar * t / T);
                num += wt * i_out * balanced_fidelity(nbar, T, w, t);
                den += wt * i_out;
            }
            CHECK(a.numeric == doctest::Approx(num / den).epsilon(1e-9));
            CHECK(a.discrepancy == std::abs(a.closed_form - a.numeric));
        }
}

TEST_CASE("averaged fidelity is reproducible for a fixed panel count")
{
    const FidelityParams fp = balanced(0.7, 100.0, 0.02);
    CHECK(average_fidelity(fp, 3001).numeric == average_fidelity(fp, 3002).numeric);
    CHECK(average_fidelity(fp).numeric == average_fidelity(fp, 10).numeric);
}
