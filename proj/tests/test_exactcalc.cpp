#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "channelwave/channels.hpp"
#include "channelwave/exactcalc.hpp"
#include "channelwave/parallel.hpp"
#include "doctest.h"

using namespace channelwave;
using std::numbers::pi;

namespace {

double bump(double x, int p) { return std::abs(x) < 1.0 ? std::pow(1.0 - x * x, p) : 0.0; }

double tanh_sinh(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, 1e-13);
}

// v0 supported in [1.5, 3].
RadialFunction annulus_bump() {
    const auto g = RadialGrid::make(0.0, 4.0, 401);
    return RadialFunction::sample(g, [](double r) { return bump((r - 2.25) / 0.75, 4); });
}

}  // namespace

TEST_CASE("h by two quadrature routes") {
    CHECK_THROWS_AS(eval_h(1.0), ExactCalcError);
    CHECK_THROWS_AS(eval_h(0.5), ExactCalcError);
    CHECK(std::abs(eval_h(1.0 + 1e-12).value) <= 1e-9);
    CHECK(eval_h(2.0).value == doctest::Approx(eval_h_direct(2.0).value).epsilon(1e-9));
    for (double r : {1.1, 1.5, 3.0, 7.0, 40.0}) {
        const auto a = eval_h(r), b = eval_h_direct(r);
        CAPTURE(r);
        CHECK(a.converged);
        CHECK(std::abs(a.value - b.value) <= 1e-9 * std::max(1.0, std::abs(b.value)));
        CHECK(a.error_estimate >= 0.0);
    }
}

TEST_CASE("h decays like r^{-1/2}") {
    // K -> sqrt(r (1 + zeta)): h r^{1/2} -> 4 pi int_0^1 (1-zeta)^{1/2} zeta^{-1/2} (1+zeta)^{1/2} d zeta.
    const double J = tanh_sinh([](double z) { return std::sqrt((1.0 - z) * (1.0 + z) / z); }, 0.0, 1.0);
    const double r = 1e4;
    CHECK(eval_h(r).value * std::sqrt(r) == doctest::Approx(4.0 * pi * J).epsilon(1e-3));
}

TEST_CASE("Z bracket: the r^3 terms cancel and the simplified form matches") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> R(1.0, 50.0);
    for (int k = 0; k < 100; ++k) {
        const double z = (k + 0.5) / 100.0;
        const auto c = z_bracket_coefficients(z);
        CAPTURE(z);
        CHECK(std::abs(c[3]) <= 1e-13);
        const double p = 1.0 + z, m = 1.0 - z, q = 1.0 - 3.0 * z;
        CHECK(c[2] == doctest::Approx(-0.75 * p * p * (1.0 + 3.0 * z)).epsilon(1e-13));
        CHECK(c[1] == doctest::Approx(1.25 * p * m * q).epsilon(1e-12));
        CHECK(c[0] == doctest::Approx(0.5 * m * m * q).epsilon(1e-12));

        // Z = K - (r+1) K' + (5r^2 + r) K'' + 2 (r^3 - r^2) K''' from the closed derivatives of K.
        const double r = R(rng);
        const double K = eval_K(z, r);
        const double K1 = 0.5 * p / K, K2 = -0.25 * p * p / std::pow(K, 3), K3 = 0.375 * p * p * p / std::pow(K, 5);
        const double Z = K - (r + 1.0) * K1 + (5.0 * r * r + r) * K2 + 2.0 * (r * r * r - r * r) * K3;
        CHECK(eval_Z(z, r) == doctest::Approx(Z).epsilon(1e-11));
    }
}

TEST_CASE("H: bound and route agreement") {
    for (double r : {1.5, 2.0, 5.0, 10.0, 100.0}) {
        CAPTURE(r);
        const double H = eval_H(r).value;
        CHECK(std::abs(H) <= 12.0 * (1.0 / r + 1.0 / (r * r) + 1.0 / (r * r * r)));
        CHECK(std::abs(H - eval_H(r, HRoute::DerivativeForm).value) <= 1e-6 * std::max(1.0, std::abs(H)));
    }
    CHECK(std::abs(eval_H(3.0).value - eval_H(3.0, HRoute::DerivativeForm).value) <= 1e-6);
    CHECK_THROWS_AS(eval_H(1.02, HRoute::DerivativeForm), ExactCalcError);
    CHECK_THROWS_AS(eval_H(1.0), ExactCalcError);
}

TEST_CASE("the constant I") {
    const double chain = 3597.0 / (400.0 * std::pow(pi, 4));
    CHECK(chain_bound() == doctest::Approx(0.0923168454).epsilon(1e-9));
    CHECK(chain_bound() == chain);
    CHECK(chain <= 0.1);

    const auto res = compute_I();
    CHECK(res.I.converged);
    CHECK(res.I.error_estimate >= res.tail_bound);
    CHECK(res.tail_bound <= 1e-12);
    CHECK(res.I.value <= res.chain_bound);
    CHECK(res.I.value <= 0.1);
    CHECK(std::abs(compute_I(2).I.value - res.I.value) < 1e-8);

    // Independent route: exp-sinh on [1, inf) with no truncation.
    boost::math::quadrature::exp_sinh<double> es;
    const double oracle = es.integrate(
                              [](double x) {
                                  const double r = 1.0 + x;
                                  if (x < 1e-15) return 0.0;
                                  const double H = eval_H(r).value;
                                  return H * H * std::log1p(x);
                              },
                              1e-11) /
                          (32.0 * std::pow(pi, 4));
    CHECK(res.I.value == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(res.I.value == doctest::Approx(0.02243773998).epsilon(1e-9));
}

TEST_CASE("the constants a, b, c") {
    const auto abc = compute_abc();
    CHECK(abc.a.value <= 12.0);
    CHECK(abc.b.value <= 11.0);
    CHECK(abc.c.value <= 2.0 * pi);
    CHECK(abc.a_majorant == doctest::Approx(11.7558242855).epsilon(1e-10));
    CHECK(abc.b_majorant == doctest::Approx(10.5231507843).epsilon(1e-10));
    CHECK(abc.a.value <= abc.a_majorant);
    CHECK(abc.b.value <= abc.b_majorant_direct);
    CHECK(abc.b_majorant_direct <= abc.b_majorant);

    // Original zeta forms, tanh-sinh.
    auto w = [](double z) { return std::sqrt(1.0 - z) / std::sqrt(z); };
    const double a = 1.5 * pi * tanh_sinh([&](double z) { return w(z) * (1.0 + 3.0 * z) / std::sqrt(1.0 + z); }, 0, 1);
    const double b = 2.5 * pi * tanh_sinh([&](double z) { return w(z) * (1.0 - z) / std::sqrt(1.0 + z); }, 0, 1);
    const double c = pi * tanh_sinh([&](double z) { return w(z) * (1.0 - z) * (1.0 - z) / std::pow(1.0 + z, 1.5); }, 0, 1);
    CHECK(abc.a.value == doctest::Approx(a).epsilon(1e-9));
    CHECK(abc.b.value == doctest::Approx(b).epsilon(1e-9));
    CHECK(abc.c.value == doctest::Approx(c).epsilon(1e-9));
}

TEST_CASE("G(eta) by the radial kernel and by direct half-space quadrature") {
    const auto g = RadialGrid::make(0.0, 4.0, 401);
    CHECK(G_eta(RadialFunction::zeros(g), 0.5) == 0.0);
    CHECK(G_eta_direct(RadialFunction::zeros(g), 0.5) == 0.0);

    const auto v = annulus_bump();
    for (double eta : {0.0, 0.25, 0.5, 1.0}) {
        CAPTURE(eta);
        const double a = G_eta(v, eta), b = G_eta_direct(v, eta);
        CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)));
    }
    const double eta = 0.5, d = 1e-3;
    const double fd = (G_eta(v, eta + d) - G_eta(v, eta - d)) / (2.0 * d);
    CHECK(G_eta_prime(v, eta) == doctest::Approx(fd).epsilon(1e-6));

    CHECK_THROWS_AS(G_eta(v, 1.5), ExactCalcError);
    CHECK_THROWS_AS(G_eta(v, -0.1), ExactCalcError);
    const auto inner = RadialFunction::sample(g, [](double r) { return bump((r - 1.0) / 0.8, 4); });
    CHECK_THROWS_AS(G_eta(inner, 0.5), ExactCalcError);
    const auto clipped = RadialFunction::sample(g, [](double r) { return bump((r - 3.5) / 1.0, 4); });
    CHECK_THROWS_AS(G_eta_direct(clipped, 0.5), ExactCalcError);
}

TEST_CASE("int_0^1 G'^2 is at most a tenth of the gradient energy") {
    BatteryOptions bo;
    bo.lo = 1.0;
    bo.hi = 4.0;
    bo.power = 4;
    const auto battery = random_battery(6, 99, bo);
    const auto g = RadialGrid::make(0.0, 5.0, 501);
    const double I = compute_I().I.value;
    std::vector<double> lhs(battery.size()), energy(battery.size()), hardy(battery.size());
    parallel_for(battery.size(), [&](std::size_t k) {
        const auto& b = battery[k];
        const auto v = RadialFunction::sample(g, [&](double r) { return b(r); });
        lhs[k] = G_prime_l2_sq(v).value;
        const double h = 1e-6;
        energy[k] = tanh_sinh(
            [&](double r) {
                const double d = (b(r + h) - b(r - h)) / (2.0 * h);
                return d * d * r * r * r;
            },
            1.0, 4.0);
        hardy[k] = tanh_sinh([&](double r) { return b(r) * b(r) * r; }, 1.0, 4.0);
    });
    for (std::size_t k = 0; k < battery.size(); ++k) {
        CAPTURE(k);
        CHECK(lhs[k] > 0.0);
        CHECK(lhs[k] <= I * hardy[k] * (1.0 + 1e-6));
        CHECK(lhs[k] <= 0.1 * energy[k]);
    }
}

TEST_CASE("Omega operator asymptotics") {
    const auto g = RadialGrid::make(0.0, 4.0, 401);
    CHECK(omega_operator(RadialFunction::zeros(g), 20.0) == 0.0);
    const auto f = RadialFunction::sample(g, [](double r) { return bump((r - 1.5) / 1.0, 4); });
    CHECK_THROWS_AS(omega_operator(f, 1.0), ExactCalcError);

    // Limit via a direct (rho, psi) quadrature of int_{x1 > 0} f / x1^{1/2}.
    const double limit = omega_limit(f);
    const double angular = tanh_sinh([](double psi) { return std::pow(std::sin(psi), 2) / std::sqrt(std::cos(psi)); }, 0.0,
                                     0.5 * pi);
    const double radial = tanh_sinh([](double r) { return std::pow(r, 2.5) * bump((r - 1.5) / 1.0, 4); }, 0.5, 2.5);
    CHECK(limit == doctest::Approx(4.0 * pi * angular * radial).epsilon(1e-7));

    std::vector<double> ts{20.0, 40.0, 80.0}, gaps, scaled;
    for (double t : ts) {
        const double om = omega_operator(f, t);
        gaps.push_back(std::abs(std::sqrt(2.0 * t) * om - limit));
        scaled.push_back(std::abs(om) * std::sqrt(t));
    }
    // Least-squares slope of log gap against log t.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double x = std::log(ts[i]), y = std::log(gaps[i]);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.2));
    const double smax = *std::max_element(scaled.begin(), scaled.end());
    const double smin = *std::min_element(scaled.begin(), scaled.end());
    CHECK(smax <= 1.1 * smin);
}

TEST_CASE("Fourier-side exterior terms") {
    const auto ind = fourier_exterior_terms([](double) { return 1.0; }, 1.0, 2.0);
    CHECK(ind.A1 == doctest::Approx(21.0 * pi / 8.0).epsilon(1e-12));
    CHECK(ind.A2 == doctest::Approx(-21.0 * pi / 16.0).epsilon(1e-12));
    // Tensor Gauss-Legendre oracle for the Hankel form.
    using GL = boost::math::quadrature::gauss<double, 40>;
    const double a3 = GL::integrate(
        [](double x) { return GL::integrate([x](double y) { return std::pow(x * y, 2.5) / (x + y); }, 1.0, 2.0); }, 1.0,
        2.0);
    CHECK(ind.A3 == doctest::Approx(a3 / 8.0).epsilon(1e-10));
    CHECK(ind.A3 >= 0.0);

    const auto g = RadialGrid::make(0.0, 5.0, 501);
    CHECK_THROWS_AS(fourier_exterior_terms(RadialFunction::sample(g, [](double p) { return std::exp(-p); })),
                    ExactCalcError);
    CHECK_THROWS_AS(fourier_exterior_terms(RadialFunction::sample(g, [](double p) { return bump(p - 4.5, 4); })),
                    ExactCalcError);
    CHECK_THROWS_AS(fourier_exterior_terms([](double) { return 1.0; }, 0.0, 2.0), ExactCalcError);
}

TEST_CASE("Hankel form is nonnegative on random real profiles") {
    const auto g = RadialGrid::make(0.0, 5.0, 501);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> c(1.0, 3.5), w(0.2, 0.5), a(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        std::vector<std::array<double, 3>> bumps(3);
        for (auto& b : bumps) b = {c(rng), w(rng), a(rng)};
        const auto u = RadialFunction::sample(g, [&](double p) {
            double s = 0.0;
            for (const auto& b : bumps) s += b[2] * bump((p - b[0]) / b[1], 4);
            return s;
        });
        const auto t = fourier_exterior_terms(u);
        CAPTURE(k);
        CHECK(t.A3 >= 0.0);
        CHECK(t.exterior_limit() >= 0.25 * t.weighted_norm / std::pow(2.0 * pi, 4));
    }
}

TEST_CASE("Fourier-side limit matches the measured channel energy") {
    auto F = [](double p) { return bump(p - 2.0, 6); };
    const auto hg = RadialGrid::make(0.0, 4.0, 801);
    // The 4D Fourier transform is (2 pi)^2 times the radial Hankel transform.
    const auto terms = fourier_exterior_terms(RadialFunction::sample(hg, [&](double p) { return 4.0 * pi * pi * F(p); }));

    const SpectralWave sw(F, [](double) { return 0.0; }, 1.0, 3.0, 4, 200.0, 40.0);
    const auto g = RadialGrid::make(0.0, 40.0, 4001);
    auto u0 = sw.state(0.0, g).u;
    // Cosine taper on [25, 35], where |u0| < 1e-6.
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = std::clamp((g.r(i) - 25.0) / 10.0, 0.0, 1.0);
        u0.values[i] *= 0.5 * (1.0 + std::cos(pi * x));
    }
    ChannelOptions o;
    o.T_max = 32.0;
    const auto rep = measure_channel(u0, RadialFunction::zeros(g), 0.0, DataKind::U0Only, o);
    CHECK(rep.measured_limit_plus == doctest::Approx(terms.exterior_limit()).epsilon(0.03));
    CHECK(terms.exterior_limit() >= 0.25 * terms.weighted_norm / std::pow(2.0 * pi, 4));
    CHECK(rep.reference == doctest::Approx(0.25 * terms.weighted_norm / std::pow(2.0 * pi, 4)).epsilon(1e-3));
}

TEST_CASE("Laplacian of r^-alpha log^-beta r") {
    const auto h = laplace_log_check(2.0, 0.0, 10.0);
    CHECK(h.closed_form == 0.0);
    CHECK(std::abs(h.numeric) <= 1e-10);

    const double L = std::log(10.0);
    const auto a = laplace_log_check(2.0, 0.5, 10.0);
    CHECK(a.closed_form == doctest::Approx(1e-4 * (std::pow(L, -1.5) + 0.75 * std::pow(L, -2.5))).scale(0).epsilon(1e-13));
    CHECK(a.gap <= 1e-6);
    CHECK(a.gap <= 1e-6 * std::abs(a.closed_form));

    const auto b = laplace_log_check(4.0, 1.5, 10.0);
    CHECK(b.closed_form ==
          doctest::Approx(1e-6 * (8.0 * std::pow(L, -1.5) + 9.0 * std::pow(L, -2.5) + 3.75 * std::pow(L, -3.5)))
              .scale(0).epsilon(1e-13));
    CHECK(b.gap <= 1e-6 * std::abs(b.closed_form));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> al(0.5, 5.0), be(0.0, 3.0), rr(2.5, 50.0);
    for (int k = 0; k < 50; ++k) {
        const double alpha = al(rng), beta = be(rng), r = rr(rng);
        const auto c = laplace_log_check(alpha, beta, r);
        // Gap relative to the size of the individual terms, which can cancel near alpha = 2.
        const double scale = std::pow(r, -alpha - 2.0) * std::pow(std::log(r), -beta) * (1.0 + alpha * alpha);
        CHECK(c.gap <= 1e-6 * scale);
    }
    CHECK_THROWS_AS(laplace_log_check(2.0, 0.5, 2.0), ExactCalcError);
}

TEST_CASE("operators A and B on the exterior cone") {
    const SpaceTimeField zero{[](double, double) { return 0.0; }, 3.0, 16.0};
    const auto z = appendix_c_operator_ratios(zero, 10.0, 1.0, 201);
    CHECK(z.ratio_A == 0.0);
    CHECK(z.ratio_B == 0.0);
    CHECK_THROWS_AS(appendix_c_operator_ratios(zero, 10.0, 0.1, 201), ExactCalcError);

    // A bump riding just outside the cone r = R + |t|.
    auto field = [](double R) {
        return SpaceTimeField{[R](double t, double r) { return bump((t - 1.5) / 1.5, 3) * bump((r - R - std::abs(t) - 1.2), 3); },
                              3.0, R + 6.2};
    };
    const double R = 10.0;
    const auto w = field(R);
    const auto base = appendix_c_operator_ratios(w, R, 1.0, 801);
    for (double lam : {0.5, 2.0, 4.0}) {
        const SpaceTimeField wl{[&, lam](double t, double r) { return lam * lam * w.w(lam * t, lam * r); }, 3.0 / lam,
                                w.r_extent / lam};
        const auto s = appendix_c_operator_ratios(wl, R / lam, 1.0 * lam, 601);
        CAPTURE(lam);
        CHECK(s.ratio_A == doctest::Approx(base.ratio_A).epsilon(0.05));
    }

    double prev = 1e300;
    for (double k : {1.0, 2.0, 4.0}) {
        const auto q = appendix_c_operator_ratios(w, R, std::exp(k) / R, 801);
        CAPTURE(k);
        CHECK(q.ratio_B > 0.0);
        CHECK(q.ratio_B <= prev);
        prev = q.ratio_B;
    }
}
