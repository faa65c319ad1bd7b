#include <cmath>
#include <numbers>
#include <random>

#include "channelwave/grid.hpp"
#include "channelwave/models.hpp"
#include "doctest.h"

using namespace channelwave;

TEST_CASE("grid samples sit at exact offsets") {
    const auto g = RadialGrid::make(0.5, 10.5, 10001);
    CHECK(g.dr == doctest::Approx(1e-3));
    CHECK(g.r(0) == 0.5);
    CHECK(g.r(10000) == doctest::Approx(10.5).epsilon(1e-15));
    CHECK_THROWS_AS(RadialGrid::make(1.0, 1.0, 10), GridError);
    CHECK_THROWS_AS(RadialGrid::make(0.0, 1.0, 7), GridError);
    CHECK_THROWS_AS(RadialGrid::make(-1.0, 1.0, 10), GridError);
    CHECK_THROWS_AS(RadialFunction(g, std::vector<double>(3, 0.0)), GridError);
}

TEST_CASE("derivative is exact on quartics") {
    const auto g = RadialGrid::make(0.0, 10.0, 201);
    const auto p = RadialFunction::sample(g, [](double r) { return r * r * r * r - 3 * r * r * r + r * r - 7; });
    const auto d1 = derivative(p, 1);
    const auto d2 = derivative(p, 2);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        CHECK(d1[i] == doctest::Approx(4 * r * r * r - 9 * r * r + 2 * r).epsilon(1e-10).scale(1e3));
        CHECK(d2[i] == doctest::Approx(12 * r * r - 18 * r + 2).epsilon(1e-10).scale(1e3));
    }
    const auto sq = derivative(RadialFunction::sample(g, [](double r) { return r * r; }), 1);
    for (std::size_t i = 0; i < g.n; ++i) CHECK(std::abs(sq[i] - 2 * g.r(i)) <= 1e-10);
    const auto c = derivative(RadialFunction::sample(g, [](double) { return 3.25; }), 2);
    CHECK(max_abs(c) <= 1e-10);
}

TEST_CASE("derivative converges at fourth order") {
    auto err = [](std::size_t n) {
        const auto g = RadialGrid::make(0.0, 10.0, n);
        const auto d = derivative(RadialFunction::sample(g, [](double r) { return std::sin(r); }), 1);
        double e = 0.0;
        for (std::size_t i = 0; i < g.n; ++i) e = std::max(e, std::abs(d[i] - std::cos(g.r(i))));
        return e;
    };
    const double e1 = err(501), e2 = err(1001);
    CHECK(e2 <= 5e-9);
    CHECK(std::log2(e1 / e2) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("weighted integrals") {
    const auto g = RadialGrid::make(0.0, 2.0, 101);
    CHECK(weighted_integral(RadialFunction::sample(g, [](double) { return 1.0; }), 3) == doctest::Approx(4.0).epsilon(1e-13));

    const auto big = RadialGrid::make(0.0, 200.0, 200001);
    const auto lorentz = RadialFunction::sample(big, [](double r) { return 4.0 * r / ((1 + r * r) * (1 + r * r)); });
    CHECK(std::abs(weighted_integral(lorentz, 0) - 2.0) <= 1e-4);
    const auto lorentz_w = RadialFunction::sample(big, [](double r) { return 4.0 / ((1 + r * r) * (1 + r * r)); });
    CHECK(std::abs(weighted_integral(lorentz_w, 1) - 2.0) <= 1e-4);

    const auto wg = RadialGrid::make(0.0, 400.0, 400001);
    const auto wp = RadialFunction::sample(wg, [](double r) { return eval_W_prime(r) * eval_W_prime(r); });
    CHECK(std::abs(weighted_integral(wp, 3) - 16.0 / 3.0) <= 1e-3);
}

TEST_CASE("weighted integral is linear and additive") {
    const auto g = RadialGrid::make(0.0, 6.0, 601);
    const auto f = RadialFunction::sample(g, [](double r) { return std::exp(-r) * std::cos(3 * r); });
    const auto h = RadialFunction::sample(g, [](double r) { return r / (1 + r * r); });
    CHECK(weighted_integral(2.5 * f + h, 3) ==
          doctest::Approx(2.5 * weighted_integral(f, 3) + weighted_integral(h, 3)).epsilon(1e-13));
    const double whole = weighted_integral(f, 1);
    const double parts = weighted_integral(restrict(f, 0.0, 2.5), 1) + weighted_integral(restrict(f, 2.5, 6.0), 1);
    CHECK(parts == doctest::Approx(whole).epsilon(1e-7));
}

TEST_CASE("fundamental theorem of calculus") {
    const auto g = RadialGrid::make(0.0, 4.0, 401);
    const auto f = RadialFunction::sample(g, [](double r) { return std::sin(r) * std::exp(-0.3 * r); });
    const double integral = weighted_integral(derivative(f, 1), 0);
    CHECK(std::abs(integral - (f[g.n - 1] - f[0])) <= 1e-8);
}

TEST_CASE("restrict") {
    const auto g = RadialGrid::make(0.5, 20.0, 39001);
    const auto f = RadialFunction::sample(g, [](double r) { return 1.0 / (r * r); });
    const auto same = restrict(f, g.r_min, g.r_max);
    CHECK(same.grid.same_as(g));
    CHECK(same.values == f.values);
    const auto sub = restrict(f, 1.0, 10.0);
    CHECK(sub.grid.r_min == doctest::Approx(1.0));
    CHECK(sub.grid.r_max == doctest::Approx(10.0));
    CHECK(std::abs(weighted_integral(sub, 1) - std::log(10.0)) <= 1e-6);
    CHECK_THROWS_AS(restrict(f, 3.0, 3.0), GridError);
    CHECK_THROWS_AS(restrict(f, 0.0, 3.0), GridError);
}

TEST_CASE("interpolation is exact on quintics") {
    const auto g = RadialGrid::make(0.0, 3.0, 61);
    auto q = [](double r) { return 1 + r - 2 * r * r + 0.5 * std::pow(r, 5); };
    const auto f = RadialFunction::sample(g, q);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const double r = U(rng);
        CHECK(interpolate(f, r) == doctest::Approx(q(r)).epsilon(1e-11));
    }
}
