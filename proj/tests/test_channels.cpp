#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>

#include "channelwave/channels.hpp"
#include "channelwave/parallel.hpp"
#include "doctest.h"

using namespace channelwave;

namespace {

double gauss(double r, double c, double w) { return std::exp(-(r - c) * (r - c) / (w * w)); }

double half_line(const std::function<double(double)>& f, double a) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate([&](double x) { return f(a + x); }, 0.0, std::numeric_limits<double>::infinity());
}

RadialFunction battery_fn(const RadialGrid& g, const BatterySample& b) { return RadialFunction::sample(g, b); }

}  // namespace

TEST_CASE("pi projection closed forms") {
    const auto g = RadialGrid::make(1.0, 50.0, 4901);
    const auto inv2 = RadialFunction::sample(g, [](double r) { return 1.0 / (r * r); });
    auto p = project_pi(inv2, 1.0);
    CHECK(p.coefficient == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(max_abs(p.pi_perp_f) <= 1e-15);
    CHECK(max_abs(p.pi_f - inv2) <= 1e-15);

    const auto vanishing = RadialFunction::sample(g, [](double r) { return (r - 2.0) * gauss(r, 3.0, 1.0); });
    p = project_pi(vanishing, 2.0);
    CHECK(std::abs(p.coefficient) <= 1e-15);
    CHECK(max_abs(p.pi_f) <= 1e-15);

    const auto inv4 = RadialFunction::sample(g, [](double r) { return std::pow(r, -4); });
    p = project_pi(inv4, 1.0);
    CHECK(p.coefficient == doctest::Approx(1.0));
    for (std::size_t i = 0; i < p.pi_perp_f.size(); i += 97) {
        const double r = p.pi_perp_f.r(i);
        CHECK(std::abs(p.pi_perp_f[i] - (std::pow(r, -4) - std::pow(r, -2))) <= 1e-15);
    }
}

TEST_CASE("pi-perp is H1 orthogonal to 1/r^2") {
    // Oracle: exact derivatives and a half-line quadrature, using only the library coefficient.
    const auto g = RadialGrid::make(0.5, 30.0, 2951);
    auto check = [&](const std::function<double(double)>& f, const std::function<double(double)>& fp, double R) {
        const double c = project_pi(RadialFunction::sample(g, f), R).coefficient;
        const double ip = half_line([&](double r) { return (fp(r) + 2.0 * c / (r * r * r)) * (-2.0 / (r * r * r)) * r * r * r; }, R);
        CHECK(std::abs(ip) <= 1e-10);
    };
    check([](double r) { return std::pow(r, -4); }, [](double r) { return -4.0 * std::pow(r, -5); }, 1.0);
    check([](double r) { return gauss(r, 3.0, 1.0); }, [](double r) { return -2.0 * (r - 3.0) * gauss(r, 3.0, 1.0); },
          2.0);

    // Grid inner product, truncated at r_max and completed with the closed-form tail.
    const auto h = RadialGrid::make(1.0, 50.0, 4901);
    const auto perp = project_pi(RadialFunction::sample(h, [](double r) { return std::pow(r, -4); }), 1.0).pi_perp_f;
    const auto inv2 = RadialFunction::sample(h, [](double r) { return 1.0 / (r * r); });
    const double tail = 2.0 * std::pow(50.0, -4) - 2.0 * std::pow(50.0, -2);
    CHECK(std::abs(h1_inner(perp, inv2, 1.0) + tail) <= 1e-5);
}

TEST_CASE("pi projection is idempotent and ignores 1/r^2") {
    const auto g = RadialGrid::make(0.5, 20.0, 1951);
    const auto f = RadialFunction::sample(g, [](double r) { return gauss(r, 3.0, 1.0) + std::sin(r) / (1 + r * r * r); });
    const double R = 1.5;
    const auto p = project_pi(f, R);
    const auto pp = project_pi(p.pi_f, R);
    CHECK(max_abs(pp.pi_f - p.pi_f) <= 1e-12);
    CHECK(max_abs(project_pi(p.pi_perp_f, R).pi_f) <= 1e-12);

    const auto shifted = f + RadialFunction::sample(g, [](double r) { return 3.7 / (r * r); });
    CHECK(max_abs(project_pi(shifted, R).pi_perp_f - p.pi_perp_f) <= 1e-12);

    CHECK_THROWS_AS(project_pi(f, 0.2), ChannelError);
    CHECK_THROWS_AS(project_pi(f, 25.0), ChannelError);
}

TEST_CASE("Pi6 projection") {
    const auto g = RadialGrid::make(1.0, 10.0, 9001);
    const auto inv4 = RadialFunction::sample(g, [](double r) { return std::pow(r, -4); });
    const auto p = project_Pi6(inv4, 1.0);
    CHECK(p.coefficient == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs(p.Pi_perp_u1) <= 1e-12);

    // Zero moment: Pi vanishes.
    const auto zero_moment = RadialFunction::sample(g, [](double r) { return (r - 5.0) * gauss(r, 5.0, 0.5) / r; });
    CHECK(std::abs(project_Pi6(zero_moment, 1.0).coefficient) <= 1e-12);

    // L^2(r^5 dr) orthogonality of the perp part, by independent quadrature.
    const auto h = RadialGrid::make(0.0, 12.0, 24001);
    const auto bump = RadialFunction::sample(h, [](double r) { return gauss(r, 3.0, 1.0); });
    const double R = 1.2;
    const double c = project_Pi6(bump, R).coefficient;
    const double ip = half_line([&](double r) { return (gauss(r, 3.0, 1.0) - c / std::pow(r, 4)) * r; }, R);
    CHECK(std::abs(ip) <= 1e-10);

    const auto q = project_Pi6(bump, R);
    CHECK(max_abs(project_Pi6(q.Pi_u1, R).Pi_u1 - q.Pi_u1) <= 1e-12);
    CHECK(std::abs(project_Pi6(q.Pi_perp_u1, R).coefficient) <= 1e-12);

    const auto slow = RadialFunction::sample(g, [](double r) { return 1.0 / (r * r); });
    CHECK_THROWS_AS(project_Pi6(slow, 1.0), ChannelError);
    CHECK_THROWS_AS(project_Pi6(inv4, 0.5), ChannelError);
}

TEST_CASE("Richardson extrapolation") {
    // e(t) = L + a/t + b/t^2 is reproduced exactly.
    auto e = [](double t) { return 2.0 + 3.0 / t - 5.0 / (t * t); };
    const auto x = richardson_limit(e(8), e(16), e(32), 1e-3, 5.0);
    CHECK(x.limit == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(x.quality <= 1.0);
    CHECK(x.quality >= 0.0);
    const auto flat = richardson_limit(1.0, 1.0, 1.0, 1e-3, 1.0);
    CHECK(flat.quality == 1.0);
    CHECK(flat.plateau);
}

TEST_CASE("battery generator") {
    const auto a = random_battery(20, 42), b = random_battery(20, 42), c = random_battery(20, 43);
    REQUIRE(a.size() == 20);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k](2.5) == b[k](2.5));
        differs = differs || a[k](2.5) != c[k](2.5);
        CHECK(a[k](1.0) == 0.0);
        CHECK(a[k](5.0) == 0.0);
        CHECK(a[k](0.99) == 0.0);
        CHECK(a[k](5.01) == 0.0);
        for (const auto& bump : a[k].bumps) {
            CHECK(bump.center - bump.half_width >= 1.0 - 1e-12);
            CHECK(bump.center + bump.half_width <= 5.0 + 1e-12);
        }
    }
    CHECK(differs);
    // C^2 at the edge of the support: (1 - x^2)^3 has vanishing first and second derivatives.
    BatterySample s{{Bump{3.0, 1.0, 1.0}}, 3};
    for (double h : {1e-2, 1e-3}) CHECK(s(4.0 - h) / (h * h * h) == doctest::Approx(8.0).epsilon(3.0 * h));
    CHECK_THROWS_AS(random_battery(1, 1, {1.0, 5.0, 2}), std::invalid_argument);
}

TEST_CASE("static solution 1/r^2 gives a vacuous channel bound") {
    const auto g = RadialGrid::make(1.0, 200.0, 19901);
    ChannelOptions o;
    o.T_max = 64.0;
    o.solver = Solver::FD;
    const auto rep = measure_channel(RadialFunction::sample(g, [](double r) { return 1.0 / (r * r); }),
                                     RadialFunction::zeros(g), 1.0, DataKind::U0Only, o);
    CHECK(rep.reference == 0.0);
    CHECK(rep.measured_limit_plus <= 1e-3);
    CHECK(rep.measured_limit_plus >= 0.0);
    CHECK(std::isinf(rep.ratio));
    CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("quarter bound on a random battery") {
    const auto g = RadialGrid::make(0.0, 8.0, 801);
    const auto battery = random_battery(20, 2024);
    std::vector<ChannelReport> reps(battery.size());
    ChannelOptions o;
    o.T_max = 32.0;
    parallel_for(battery.size(), [&](std::size_t k) {
        reps[k] = measure_channel(battery_fn(g, battery[k]), RadialFunction::zeros(g), 0.0, DataKind::U0Only, o);
    });
    double worst = 1e300;
    for (const auto& r : reps) {
        CHECK(r.ratio >= 0.98);
        CHECK(r.plateau_quality >= 0.0);
        CHECK(r.plateau_quality <= 1.0);
        CHECK(std::abs(r.measured_limit_plus - r.other_limit_plus) <= 0.02 * r.measured_limit_plus);
        CHECK(r.measured_limit_plus == doctest::Approx(r.measured_limit_minus).epsilon(1e-9));
        worst = std::min(worst, r.ratio);
    }
    MESSAGE("minimum ratio against 1/4: " << worst);
}

TEST_CASE("3/20 bound on exterior channels") {
    const auto g = RadialGrid::make(0.0, 8.0, 801);
    const auto battery = random_battery(6, 99);
    const double Rs[] = {1.5, 2.5, 3.0};
    ChannelOptions o;
    o.T_max = 32.0;
    for (std::size_t k = 0; k < battery.size(); ++k) {
        const double R = Rs[k % 3];
        const auto rep = measure_channel(battery_fn(g, battery[k]), RadialFunction::zeros(g), R, DataKind::U0Only, o);
        INFO("R = " << R);
        if (rep.reference > 0.0) CHECK(rep.ratio >= 0.98);
    }
}

TEST_CASE("FD and spectral channel measurements agree") {
    const auto g = RadialGrid::make(0.0, 8.0, 801);
    const auto b = random_battery(1, 5).front();
    ChannelOptions o;
    o.T_max = 32.0;
    const auto sp = measure_channel(battery_fn(g, b), RadialFunction::zeros(g), 2.0, DataKind::U0Only, o);
    o.solver = Solver::FD;
    const auto fd = measure_channel(battery_fn(g, b), RadialFunction::zeros(g), 2.0, DataKind::U0Only, o);
    // FD dispersion on the narrowest C^2 bumps costs ~1e-4 at this spacing.
    CHECK(fd.measured_limit_plus == doctest::Approx(sp.measured_limit_plus).epsilon(2e-3));
    CHECK(fd.measured_limit_minus == doctest::Approx(sp.measured_limit_minus).epsilon(2e-3));
    CHECK(fd.reference == doctest::Approx(sp.reference).epsilon(1e-12));
}

TEST_CASE("channel ratio is scale covariant") {
    const auto b = random_battery(1, 17).front();
    auto ratio_at = [&](double lambda) {
        const auto g = RadialGrid::make(0.0, 8.0 / lambda, 801);
        ChannelOptions o;
        o.T_max = 32.0 / lambda;
        const auto u0 = RadialFunction::sample(g, [&](double r) { return b(lambda * r); });
        return measure_channel(u0, RadialFunction::zeros(g), 2.0 / lambda, DataKind::U0Only, o).ratio;
    };
    const double r1 = ratio_at(1.0);
    CHECK(ratio_at(2.0) == doctest::Approx(r1).epsilon(1e-3));
    CHECK(ratio_at(0.5) == doctest::Approx(r1).epsilon(1e-3));
}

TEST_CASE("general and u1-only data") {
    const auto g = RadialGrid::make(0.0, 8.0, 801);
    const auto bat = random_battery(2, 8);
    const auto u0 = battery_fn(g, bat[0]), u1 = battery_fn(g, bat[1]);
    ChannelOptions o;
    o.T_max = 32.0;
    const auto gen = measure_channel(u0, u1, 0.0, DataKind::General, o);
    CHECK(gen.ratio >= 0.98);
    CHECK(gen.measured_limit_plus != doctest::Approx(gen.measured_limit_minus));
    const auto odd = measure_channel(u0, u1, 0.0, DataKind::U1Only, o);
    CHECK(odd.reference == 0.0);
    CHECK(std::isinf(odd.ratio));
    CHECK(odd.measured_limit_plus > 0.0);
    CHECK_THROWS_AS(measure_channel(u0, u1, 9.0, DataKind::U0Only, o), ChannelError);
}

TEST_CASE("6D channel: t/r^4 and a random battery") {
    const auto g = RadialGrid::make(1.0, 200.0, 19901);
    ChannelOptions o;
    o.T_max = 64.0;
    o.solver = Solver::FD;
    const auto rep = measure_channel_6d(RadialFunction::sample(g, [](double r) { return std::pow(r, -4); }), 1.0, o);
    CHECK(rep.reference == 0.0);
    CHECK(rep.measured_limit_plus <= 1e-3);
    CHECK(rep.dimension == 6);

    const auto h = RadialGrid::make(0.0, 8.0, 801);
    ChannelOptions s;
    s.T_max = 32.0;
    for (const auto& b : random_battery(5, 31)) {
        const auto r6 = measure_channel_6d(battery_fn(h, b), 1.0, s);
        CHECK(r6.ratio >= 0.98);
        CHECK(std::abs(r6.measured_limit_plus - r6.other_limit_plus) <= 0.02 * r6.measured_limit_plus);
    }
}

TEST_CASE("6D to 4D transform solves the 4D equation") {
    const auto g = RadialGrid::make(0.0, 8.0, 1601);
    BatteryOptions smooth;
    smooth.power = 10;
    for (const auto& b : random_battery(3, 3, smooth))
        for (double t : {0.5, 5.0, 20.0}) CHECK(transform_6d_residual(battery_fn(g, b), 1.0, t) <= 1e-4);
}

TEST_CASE("inhomogeneous bound") {
    const auto g = RadialGrid::make(0.0, 8.0, 801);
    ChannelOptions o;
    o.T_max = 32.0;
    o.solver = Solver::FD;
    const auto u0 = battery_fn(g, random_battery(1, 12).front());

    // f = 0 reduces to the free channel measurement.
    const auto free_rep = inhom_bound_check(u0, {}, 0.0, o);
    const auto chan = measure_channel(u0, RadialFunction::zeros(g), 0.0, DataKind::U0Only, o);
    CHECK(free_rep.exterior_limit * free_rep.exterior_limit == doctest::Approx(chan.measured_limit_plus).epsilon(1e-9));
    CHECK(free_rep.source_norm == 0.0);
    CHECK(free_rep.lhs <= free_rep.rhs * 1.01);

    // No data: the exterior energy is bounded by the source norm.
    auto forcing = [](double a) {
        return [a](double t, double r) { return a * gauss(t, 1.5, 0.5) * (t < 4.0 ? 1.0 : 0.0) * gauss(r, 3.0, 0.6); };
    };
    const auto pure = inhom_bound_check(RadialFunction::zeros(g), forcing(1.0), 0.0, o);
    CHECK(pure.lhs == 0.0);
    CHECK(pure.source_norm > 0.0);
    CHECK(pure.exterior_limit <= pure.source_norm * 1.001);
    CHECK(pure.holds);

    // Random data and forcing, both radii.
    const auto bat = random_battery(4, 77);
    for (std::size_t k = 0; k < bat.size(); ++k) {
        const double R = k % 2 == 0 ? 0.0 : 2.0;
        const auto rep = inhom_bound_check(battery_fn(g, bat[k]), forcing(0.5 * static_cast<double>(k)), R, o);
        INFO("sample " << k << " lhs " << rep.lhs << " rhs " << rep.rhs);
        CHECK(rep.lhs <= rep.rhs * 1.02);
        CHECK(rep.constant == doctest::Approx(R == 0.0 ? 2.0 : std::sqrt(20.0 / 3.0)));
    }
}
