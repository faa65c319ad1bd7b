#include <algorithm>
#include <cmath>
#include <random>

#include "channelwave/channels.hpp"
#include "channelwave/parallel.hpp"
#include "channelwave/resolution.hpp"
#include "doctest.h"

using namespace channelwave;

namespace {

// 16 int s^2 (1 + s)^-4 ds from s0 to s1, with x = 1 + s.
double w_energy_between(double s0, double s1) {
    auto F = [](double s) {
        const double x = 1.0 + s;
        return -1.0 / x + 1.0 / (x * x) - 1.0 / (3.0 * x * x * x);
    };
    return 16.0 * (F(s1) - F(s0));
}

FieldState nlw_state(const RadialFunction& u) {
    return FieldState::make(ModelSpec::critical_nlw(), u, RadialFunction::zeros(u.grid));
}

FieldState wm_state(const RadialFunction& u) {
    return FieldState::make(ModelSpec::wave_map(), u, RadialFunction::zeros(u.grid));
}

double bump(double x) { return std::abs(x) < 1.0 ? std::pow(1.0 - x * x, 4) : 0.0; }

}  // namespace

TEST_CASE("bubble thresholds") {
    const double B1 = w_energy_between(0.0, 0.125);
    CHECK(bubble_threshold(Profile::W, 1) == doctest::Approx(B1).epsilon(1e-10));
    CHECK(std::abs(bubble_threshold(Profile::W, 1) - B1) <= 1e-8);
    CHECK(w_energy_between(0.0, 1e300) == doctest::Approx(16.0 / 3.0).epsilon(1e-14));
    for (int j = 2; j <= 4; ++j)
        CHECK(bubble_threshold(Profile::W, j) == doctest::Approx((j - 1) * 16.0 / 3.0 + B1).epsilon(1e-10));
    // Q: Q'^2 = sin^2 Q / r^2 = 4 / (1 + r^2)^2, so the unit ball holds 2 and the whole line 4.
    CHECK(bubble_threshold(Profile::Q, 1) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(bubble_threshold(Profile::Q, 3) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK_THROWS_AS(bubble_threshold(Profile::W, 0), ResolutionError);
}

TEST_CASE("cumulative energy of a single bubble") {
    const auto g = RadialGrid::make(0.0, 40.0, 8001);
    const auto u = eval_bubble_sum({Profile::W, {{1, 1.0}}}, g);
    for (double rho : {0.5, 1.0, 2.37, 10.0}) {
        CAPTURE(rho);
        CHECK(cumulative_energy(u, Profile::W, rho) == doctest::Approx(w_energy_between(0.0, rho * rho / 8.0)).epsilon(1e-8));
    }
    CHECK(cumulative_energy(u, Profile::W, 100.0) == doctest::Approx(w_energy_between(0.0, 200.0)).epsilon(1e-8));
}

TEST_CASE("extract_scales: single bubble, zero, covariance") {
    const auto g = RadialGrid::make(0.0, 40.0, 8001);
    for (double lam : {0.7, 1.5, 3.0}) {
        const auto s = nlw_state(eval_bubble_sum({Profile::W, {{1, lam}}}, g));
        const auto l = extract_scales(s, RadialFunction::zeros(g), Profile::W, 3);
        CAPTURE(lam);
        REQUIRE(l.size() == 1);
        CHECK(std::abs(l[0] / lam - 1.0) <= 1e-6);
        // Negative bubble: the threshold integral only sees |grad u|^2.
        const auto sn = nlw_state(eval_bubble_sum({Profile::W, {{-1, lam}}}, g));
        CHECK(extract_scales(sn, RadialFunction::zeros(g), Profile::W, 3)[0] == doctest::Approx(l[0]).epsilon(1e-12));
    }
    CHECK(extract_scales(nlw_state(RadialFunction::zeros(g)), RadialFunction::zeros(g), Profile::W, 3).empty());

    // Scaling the snapshot (grid and amplitude) by mu scales every lambda_j by mu.
    auto data = [](double r) { return eval_W(r) + 0.3 * bump((r - 4.0) / 1.5); };
    const auto s1 = nlw_state(RadialFunction::sample(g, data));
    const auto l1 = extract_scales(s1, RadialFunction::zeros(g), Profile::W, 3);
    REQUIRE(!l1.empty());
    for (double mu : {0.25, 2.0}) {
        const auto gm = RadialGrid::make(0.0, 40.0 * mu, 8001);
        const auto sm = nlw_state(RadialFunction::sample(gm, [&](double r) { return data(r / mu) / mu; }));
        const auto lm = extract_scales(sm, RadialFunction::zeros(gm), Profile::W, 3);
        REQUIRE(lm.size() == l1.size());
        for (std::size_t j = 0; j < l1.size(); ++j) CHECK(lm[j] == doctest::Approx(mu * l1[j]).epsilon(1e-9));
    }

    const auto other = RadialGrid::make(0.0, 40.0, 4001);
    CHECK_THROWS_AS(extract_scales(s1, RadialFunction::zeros(other), Profile::W, 1), ResolutionError);
}

TEST_CASE("extract_scales: two bubbles at ratio 100") {
    const auto g = RadialGrid::make(0.0, 20.0, 40001);
    const auto s = nlw_state(eval_bubble_sum({Profile::W, {{1, 0.01}, {1, 1.0}}}, g));
    const auto l = extract_scales(s, RadialFunction::zeros(g), Profile::W, 4);
    REQUIRE(l.size() == 2);
    CHECK(std::abs(l[0] / 0.01 - 1.0) <= 0.1);
    // Independent 30-digit quadrature of the threshold integral on the exact sum. The small B_1
    // makes lambda_2 sensitive to the cross term, so it sits below 1.
    CHECK(l[1] == doctest::Approx(0.814945121164316).epsilon(1e-5));

    // Refinement recovers both scales.
    const auto fit = fit_multibubble(s, RadialFunction::zeros(g), Profile::W, l);
    REQUIRE(fit.J == 2);
    CHECK(fit.entries[0].scale == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(fit.entries[1].scale == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(fit.converged);
}

TEST_CASE("Q scales") {
    const auto g = RadialGrid::make(0.0, 400.0, 40001);
    const auto s = wm_state(eval_bubble_sum({Profile::Q, {{1, 2.0}}}, g));
    const auto l = extract_scales(s, RadialFunction::zeros(g), Profile::Q, 3);
    REQUIRE(l.size() == 1);
    CHECK(std::abs(l[0] / 2.0 - 1.0) <= 1e-6);

    const auto s2 = wm_state(eval_bubble_sum({Profile::Q, {{1, 0.5}, {1, 20.0}}}, g));
    const auto l2 = extract_scales(s2, RadialFunction::zeros(g), Profile::Q, 4);
    REQUIRE(l2.size() == 2);
    const auto fit = fit_multibubble(s2, RadialFunction::zeros(g), Profile::Q, l2);
    CHECK(fit.entries[0].scale == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fit.entries[1].scale == doctest::Approx(20.0).epsilon(1e-6));
    CHECK(fit.residual_h_norm <= 1e-6);
}

TEST_CASE("fit_multibubble") {
    const auto g = RadialGrid::make(0.0, 40.0, 8001);
    const auto zero = RadialFunction::zeros(g);

    SUBCASE("exact single bubble") {
        const auto s = nlw_state(eval_bubble_sum({Profile::W, {{1, 1.3}}}, g));
        const auto fit = fit_multibubble(s, zero, Profile::W, {1.6});
        REQUIRE(fit.J == 1);
        CHECK(fit.entries[0].sign == 1);
        CHECK(fit.entries[0].scale == doctest::Approx(1.3).epsilon(1e-6));
        CHECK(fit.residual_h_norm <= 1e-8);
        CHECK(fit.residual_h_norm <= fit.initial_h_norm);
        CHECK(fit.residual_l2_dt == 0.0);
    }

    SUBCASE("small smooth perturbation") {
        const auto pert = RadialFunction::sample(g, [](double r) { return 1e-3 * bump((r - 3.0) / 2.0); });
        const auto s = nlw_state(eval_bubble_sum({Profile::W, {{1, 1.0}}}, g) + pert);
        const auto fit = fit_multibubble(s, zero, Profile::W, {1.2});
        CHECK(fit.entries[0].scale == doctest::Approx(1.0).epsilon(1e-2));
        const auto pd = derivative(pert, 1);
        std::vector<double> sq(g.n);
        for (std::size_t i = 0; i < g.n; ++i) sq[i] = pd[i] * pd[i];
        const double pnorm = std::sqrt(weighted_integral(RadialFunction(g, sq), 3));
        CHECK(fit.residual_h_norm <= pnorm * 1.001);
        CHECK(fit.residual_h_norm >= 0.5 * pnorm);
    }

    SUBCASE("opposite-sign pair") {
        const auto gw = RadialGrid::make(0.0, 3000.0, 300001);
        const auto s = nlw_state(eval_bubble_sum({Profile::W, {{1, 1.0}, {-1, 100.0}}}, gw));
        const auto fit = fit_multibubble(s, RadialFunction::zeros(gw), Profile::W, {1.3, 80.0});
        REQUIRE(fit.J == 2);
        CHECK(fit.entries[0].sign == 1);
        CHECK(fit.entries[1].sign == -1);
        CHECK(fit.entries[0].scale == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(fit.entries[1].scale == doctest::Approx(100.0).epsilon(1e-6));
    }

    SUBCASE("never worse than the initial guess; iteration cap is flagged") {
        const auto s = nlw_state(eval_bubble_sum({Profile::W, {{1, 0.8}, {1, 5.0}}}, g) +
                                 RadialFunction::sample(g, [](double r) { return 0.05 * bump((r - 12.0) / 3.0); }));
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> f(0.5, 2.0);
        for (int k = 0; k < 8; ++k) {
            const auto fit = fit_multibubble(s, zero, Profile::W, {0.8 * f(rng), 5.0 * f(rng)});
            CHECK(fit.residual_h_norm <= fit.initial_h_norm);
        }
        const auto capped = fit_multibubble(s, zero, Profile::W, {0.5, 9.0}, std::nullopt, 1);
        CHECK_FALSE(capped.converged);
        CHECK(capped.residual_h_norm <= capped.initial_h_norm);
    }

    SUBCASE("time-derivative residual") {
        const auto ut = RadialFunction::sample(g, [](double r) { return bump((r - 5.0) / 1.0); });
        auto s = nlw_state(eval_bubble_sum({Profile::W, {{1, 1.0}}}, g));
        s.ut = ut;
        const auto fit = fit_multibubble(s, zero, Profile::W, {1.0});
        std::vector<double> sq(g.n);
        for (std::size_t i = 0; i < g.n; ++i) sq[i] = ut[i] * ut[i];
        CHECK(fit.residual_l2_dt == doctest::Approx(std::sqrt(weighted_integral(RadialFunction(g, sq), 3))));
        CHECK(fit_multibubble(s, zero, Profile::W, {1.0}, ut).residual_l2_dt == 0.0);
    }
}

TEST_CASE("rigidity probe") {
    const double T = 40.0;
    const auto g = RadialGrid::make(0.0, 60.0, 2401);
    const double noise_w = rigidity_noise_floor(Profile::W, g, 1.0, T);
    const double noise_q = rigidity_noise_floor(Profile::Q, g, 0.0, T);
    // Static tails on [R + T, 60]: int |W'|^2 r^3 and int (Q'^2 + sin^2 Q / r^2) r.
    const double tail_w = w_energy_between((1.0 + T) * (1.0 + T) / 8.0, 60.0 * 60.0 / 8.0);
    const double tail_q = 4.0 / (1.0 + T * T) - 4.0 / (1.0 + 60.0 * 60.0);
    CHECK(std::abs(noise_w / tail_w - 1.0) <= 0.02);
    CHECK(std::abs(noise_q / tail_q - 1.0) <= 0.02);

    const auto probe = rigidity_probe(nlw_state(eval_bubble_sum({Profile::W, {{1, 1.0}}}, g)), 1.0, T);
    CHECK(probe.eta_plus <= noise_w);
    CHECK(probe.eta_minus <= noise_w);
    CHECK(probe.times_plus.back() == doctest::Approx(T));
    CHECK(*std::min_element(probe.times_minus.begin(), probe.times_minus.end()) == doctest::Approx(-T));

    BatteryOptions bo;
    bo.lo = 2.0;
    bo.hi = 4.0;
    bo.power = 4;
    const auto battery = random_battery(10, 2024, bo);
    std::vector<double> rw(battery.size()), rq(battery.size());
    parallel_for(battery.size(), [&](std::size_t k) {
        double mx = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) mx = std::max(mx, std::abs(battery[k](g.r(i))));
        const auto pert = RadialFunction::sample(g, [&](double r) { return 0.3 * battery[k](r) / mx; });
        const auto pw = rigidity_probe(nlw_state(eval_bubble_sum({Profile::W, {{1, 1.0}}}, g) + pert), 1.0, T);
        const auto pq = rigidity_probe(wm_state(eval_bubble_sum({Profile::Q, {{1, 1.0}}}, g) + pert), 0.0, T);
        rw[k] = std::max(pw.eta_plus, pw.eta_minus) / noise_w;
        rq[k] = std::max(pq.eta_plus, pq.eta_minus) / noise_q;
    });
    for (std::size_t k = 0; k < battery.size(); ++k) {
        CAPTURE(k);
        CHECK(rw[k] >= 10.0);
        CHECK(rq[k] >= 10.0);
    }
    CHECK_THROWS_AS(rigidity_probe(nlw_state(RadialFunction::zeros(g)), 1.0, -1.0), ResolutionError);
}

TEST_CASE("ell limit") {
    const auto g = RadialGrid::make(0.0, 200.0, 4001);
    const auto w = ell_limit(nlw_state(eval_bubble_sum({Profile::W, {{1, 1.0}}}, g)), 50.0, 200.0);
    CHECK(w.ell == doctest::Approx(8.0).epsilon(1e-3 / 8.0));
    CHECK(w.fit_quality > 0.999);

    const auto z = ell_limit(nlw_state(RadialFunction::zeros(g)), 50.0, 200.0);
    CHECK(z.ell == 0.0);
    CHECK(z.fit_quality == 1.0);

    const auto wt = RadialFunction::sample(g, [](double r) { return r > 0.0 ? lambda_star * eval_Wtilde(lambda_star * r) : 0.0; });
    const auto t = ell_limit(FieldState::make(ModelSpec::gnlw(), wt, RadialFunction::zeros(g)), 50.0, 200.0);
    CHECK(t.ell == doctest::Approx(8.0).epsilon(1e-3 / 8.0));
    CHECK(t.ell == doctest::Approx(w.ell).epsilon(1e-3 / 8.0));

    CHECK_THROWS_AS(ell_limit(nlw_state(RadialFunction::zeros(g)), 50.0, 300.0), ResolutionError);
    CHECK_THROWS_AS(ell_limit(nlw_state(RadialFunction::zeros(g)), 60.0, 50.0), ResolutionError);
}

TEST_CASE("core H error") {
    const auto g = RadialGrid::make(0.0, 10.0, 5001);
    const auto q = wm_state(eval_bubble_sum({Profile::Q, {{1, 0.3}}}, g));
    CHECK(core_h_error(q, 0.3, 1.5) <= 1e-6);
    // Wrong scale: a visible mismatch.
    CHECK(core_h_error(q, 0.36, 1.8) > 0.05);
    CHECK_THROWS_AS(core_h_error(q, 1e-4, 1e-3), ResolutionError);
}

TEST_CASE("wave-map concentration run") {
    const auto rep = concentration_run();
    CHECK(rep.blowup_detected);
    CHECK(rep.strictly_decreasing);
    CHECK(rep.decades >= 1.5);
    CHECK(rep.core_h_error <= 0.1);
    REQUIRE(rep.lambdas.size() == rep.times.size());
    CHECK(rep.lambdas.front() == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(rep.times.back() <= rep.blowup_time);

    // Zero push: Q is stationary and nothing concentrates.
    ConcentrationOptions still;
    still.amplitude = 0.0;
    still.t_max = 1.0;
    still.dr = 0.01;
    const auto flat = concentration_run(still);
    CHECK_FALSE(flat.blowup_detected);
    CHECK(flat.lambdas.back() == doctest::Approx(1.0).epsilon(1e-3));
}
