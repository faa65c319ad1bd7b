#include "channelwave/channels.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "channelwave/energetics.hpp"

namespace channelwave {

std::string to_string(DataKind k) {
    switch (k) {
        case DataKind::U0Only:
            return "u0_only";
        case DataKind::U1Only:
            return "u1_only";
        default:
            return "general";
    }
}

std::string to_string(Solver s) { return s == Solver::FD ? "fd" : "spectral"; }

DataKind parse_data_kind(const std::string& s) {
    if (s == "u0_only") return DataKind::U0Only;
    if (s == "u1_only") return DataKind::U1Only;
    if (s == "general") return DataKind::General;
    throw std::invalid_argument("unknown data kind '" + s + "'");
}

Solver parse_solver(const std::string& s) {
    if (s == "fd") return Solver::FD;
    if (s == "spectral") return Solver::Spectral;
    throw std::invalid_argument("unknown solver '" + s + "'");
}

namespace {

// References below this fraction of the data norm are treated as exactly zero.
constexpr double kVacuous = 1e-10;

void check_inside(const RadialGrid& g, double R, const char* who) {
    const double tol = 1e-9 * g.dr;
    if (!(R >= g.r_min - tol && R <= g.r_max + tol)) throw ChannelError(std::string(who) + ": R lies outside the grid");
}

// Samples r_i >= R as a grid of their own.
RadialGrid tail_grid(const RadialGrid& g, double R, const char* who) {
    const std::size_t i0 = g.index_at_or_above(R);
    if (g.n - i0 < 8) throw ChannelError(std::string(who) + ": fewer than 8 samples beyond R");
    return RadialGrid::make(g.r(i0), g.r_max, g.n - i0);
}

std::vector<double> tail_values(const RadialFunction& f, const RadialGrid& sub) {
    const std::size_t i0 = f.grid.n - sub.n;
    return {f.values.begin() + static_cast<std::ptrdiff_t>(i0), f.values.end()};
}

double value_at(const RadialFunction& f, double r) {
    const std::size_t i = f.grid.index_at_or_above(r);
    if (i < f.grid.n && std::abs(f.r(i) - r) <= 1e-9 * f.grid.dr) return f[i];
    return interpolate(f, r);
}

// int_a^b of an interpolated integrand; short gap between R and the first sample.
double gap_integral(const RadialFunction& f, double a, double b, const std::function<double(double, double)>& w) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss<double, 7>::integrate([&](double r) { return w(r, interpolate(f, r)); }, a, b);
}

// Energy integrals at one time, gradient and time-derivative parts, over {r >= edge}.
struct ExteriorPair {
    double grad = 0.0;
    double dt = 0.0;
};

ExteriorPair integrate_exterior(const std::vector<double>& ur, const std::vector<double>& ut, const RadialGrid& g,
                                int d) {
    std::vector<double> a(g.n), b(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double w = std::pow(g.r(i), d - 1);
        a[i] = ur[i] * ur[i] * w;
        b[i] = ut[i] * ut[i] * w;
    }
    return {integrate_samples(a, g.dr, 0, g.n - 1), integrate_samples(b, g.dr, 0, g.n - 1)};
}

// Exterior energies at the signed times sign * {T/4, T/2, T}.
using Series = std::array<ExteriorPair, 3>;

std::array<double, 3> time_levels(double T) { return {0.25 * T, 0.5 * T, T}; }

// Energies only need the spectral tail below the energy tolerance; the tail cut is loosened
// (down to 1e-6 of the energy) when the data are too rough for the requested one.
SpectralWave resolved_wave(const RadialFunction& u0, const RadialFunction& u1, int d, double horizon,
                           SpectralOptions so, std::vector<std::string>& warnings) {
    for (;;) {
        try {
            return SpectralWave(u0, u1, d, horizon, so);
        } catch (const SpectralError&) {
            if (so.rho_max > 0.0 || so.tail_tolerance >= 1e-6) throw;
            so.tail_tolerance = std::min(1e-6, so.tail_tolerance * 10.0);
            warnings.push_back("spectral tail tolerance loosened to " + std::to_string(so.tail_tolerance));
        }
    }
}

std::pair<Series, Series> spectral_series(const RadialFunction& u0, const RadialFunction& u1, int d, double R,
                                          const ChannelOptions& opt, std::vector<std::string>& warnings) {
    const double T = opt.T_max;
    const double extent = std::max(support_extent(u0), support_extent(u1));
    const double dr = u0.grid.dr;
    const SpectralWave sw = resolved_wave(u0, u1, d, 2.0 * T + extent + 1.0, opt.spectral, warnings);
    Series plus{}, minus{};
    const auto levels = time_levels(T);
    for (int k = 0; k < 3; ++k) {
        for (int sgn : {1, -1}) {
            const double t = sgn * levels[k];
            const double lo = R + std::abs(t);
            const auto g = RadialGrid::with_spacing(lo, std::max(std::abs(t) + extent + 1.0, lo + 8 * dr), dr);
            const auto s = sw.sample({t}, g).front();
            (sgn > 0 ? plus : minus)[k] = integrate_exterior(s.ur, s.ut, g, d);
        }
    }
    return {plus, minus};
}

// Working grid for FD runs: the data grid, extended with zeros so the outgoing wave stays inside.
RadialFunction extend_for(const RadialFunction& f, double r_needed) {
    const auto& g = f.grid;
    if (g.r_max >= r_needed) return f;
    const auto wide = RadialGrid::with_spacing(g.r_min, r_needed, g.dr);
    std::vector<double> v(wide.n, 0.0);
    std::copy(f.values.begin(), f.values.end(), v.begin());
    return {wide, std::move(v)};
}

struct FdSetup {
    RadialFunction u0, u1;
    std::vector<std::string> warnings;
};

FdSetup fd_setup(const RadialFunction& u0, const RadialFunction& u1, double T) {
    FdSetup s;
    const auto& g = u0.grid;
    const double extent = std::max(support_extent(u0), support_extent(u1));
    const double need = extent + T + 2.0;
    if (extent > g.r_max - 4.0 * g.dr) {
        s.u0 = u0;
        s.u1 = u1;
        if (need > g.r_max) s.warnings.push_back("data are not compactly supported; the grid truncates the exterior region");
        return s;
    }
    s.u0 = extend_for(u0, need);
    s.u1 = extend_for(u1, need);
    return s;
}

Trajectory fd_run(const FieldState& s, double R, double t_end, const ChannelOptions& opt, const SourceFn& f = {}) {
    EvolveOptions eo;
    eo.cfl = opt.cfl;
    eo.snapshot_every = 0.25 * std::abs(t_end);
    eo.source = f;
    if (R == 0.0 && s.grid.r_min == 0.0) return evolve(s, t_end, eo);
    return evolve_on_cone(s, R, t_end, eo);
}

Series fd_series(const Trajectory& tr, double R) {
    Series out{};
    // Backward trajectories are stored in increasing time, so the far end is the front.
    const double t_far = std::abs(tr.states.front().t) > std::abs(tr.back().t) ? tr.states.front().t : tr.back().t;
    const auto levels = time_levels(std::abs(t_far));
    for (int k = 0; k < 3; ++k) {
        const auto& st = tr.nearest(std::copysign(levels[k], t_far));
        const auto e = exterior_energy(st, R);
        out[k] = {e.gradient, e.kinetic};
    }
    return out;
}

std::pair<Series, Series> fd_series_both(const RadialFunction& u0, const RadialFunction& u1, int d, double R,
                                         const ChannelOptions& opt, std::vector<std::string>& warnings) {
    auto setup = fd_setup(u0, u1, opt.T_max);
    warnings.insert(warnings.end(), setup.warnings.begin(), setup.warnings.end());
    if (setup.u0.grid.r_min > R + 1e-12) throw ChannelError("measure_channel: grid starts beyond R");
    const auto s = FieldState::make(ModelSpec::free(d), setup.u0, setup.u1);
    return {fd_series(fd_run(s, R, opt.T_max, opt), R), fd_series(fd_run(s, R, -opt.T_max, opt), R)};
}

struct Limits {
    Extrapolation main_plus, main_minus, other_plus, other_minus;
};

Limits limits_of(const Series& plus, const Series& minus, bool main_is_grad, double plateau_tol) {
    auto pick = [&](const Series& s, bool grad) {
        std::array<double, 3> v{};
        for (int k = 0; k < 3; ++k) v[k] = grad ? s[k].grad : s[k].dt;
        return v;
    };
    double scale = 0.0;
    for (const auto* s : {&plus, &minus})
        for (const auto& p : *s) scale = std::max({scale, p.grad, p.dt});
    auto ex = [&](const std::array<double, 3>& v) { return richardson_limit(v[0], v[1], v[2], plateau_tol, scale); };
    return {ex(pick(plus, main_is_grad)), ex(pick(minus, main_is_grad)), ex(pick(plus, !main_is_grad)),
            ex(pick(minus, !main_is_grad))};
}

void fill_report(ChannelReport& rep, const Limits& L, double plateau_tol) {
    rep.measured_limit_plus = L.main_plus.limit;
    rep.measured_limit_minus = L.main_minus.limit;
    rep.other_limit_plus = L.other_plus.limit;
    rep.other_limit_minus = L.other_minus.limit;
    rep.plateau_quality = std::min(L.main_plus.quality, L.main_minus.quality);
    rep.plateau_reached = L.main_plus.plateau && L.main_minus.plateau;
    const double best = std::max(rep.measured_limit_plus, rep.measured_limit_minus);
    rep.ratio = rep.reference > 0.0 ? best / rep.reference : std::numeric_limits<double>::infinity();
    if (!rep.plateau_reached)
        rep.warnings.push_back("plateau not reached (relative spread above " + std::to_string(plateau_tol) +
                               "); increase T_max");
}

double cumulative_tail(const std::vector<double>& y, double dr, std::size_t i) {
    return i + 1 >= y.size() ? 0.0 : integrate_samples(y, dr, i, y.size() - 1);
}

}  // namespace

PiProjection project_pi(const RadialFunction& f, double R) {
    check_inside(f.grid, R, "project_pi");
    if (!(R > 0.0)) throw ChannelError("project_pi: R must be positive");
    const auto sub = tail_grid(f.grid, R, "project_pi");
    PiProjection p;
    p.coefficient = R * R * value_at(f, R);
    std::vector<double> pi(sub.n), perp = tail_values(f, sub);
    for (std::size_t i = 0; i < sub.n; ++i) {
        const double r = sub.r(i);
        pi[i] = p.coefficient / (r * r);
        perp[i] -= pi[i];
    }
    p.pi_f = RadialFunction(sub, std::move(pi));
    p.pi_perp_f = RadialFunction(sub, std::move(perp));
    return p;
}

Pi6Projection project_Pi6(const RadialFunction& u1, double R) {
    check_inside(u1.grid, R, "project_Pi6");
    if (!(R > 0.0)) throw ChannelError("project_Pi6: R must be positive");
    const auto sub = tail_grid(u1.grid, R, "project_Pi6");
    const auto v = tail_values(u1, sub);
    std::vector<double> y(sub.n);
    for (std::size_t i = 0; i < sub.n; ++i) y[i] = sub.r(i) * v[i];
    double moment = integrate_samples(y, sub.dr, 0, sub.n - 1);
    moment += gap_integral(u1, R, sub.r_min, [](double r, double u) { return r * u; });

    // Power-law tail beyond r_max.
    const std::size_t n = sub.n;
    const double ra = sub.r(n - 1), rb = sub.r(n - 5);
    const double a = v[n - 1], b = v[n - 5];
    double scale = 0.0;
    for (double x : y) scale = std::max(scale, std::abs(x) * sub.r_max);
    if (std::abs(a) * ra * ra > 1e-13 * std::max(scale, std::abs(moment))) {
        if (a * b <= 0.0) throw ChannelError("project_Pi6: tail of u1 changes sign at the grid end; cannot estimate");
        const double p = -std::log(std::abs(a / b)) / std::log(ra / rb);
        if (!(p > 2.0 + 1e-6)) throw ChannelError("project_Pi6: divergent tail (u1 decays no faster than r^-2)");
        moment += a * ra * ra / (p - 2.0);
    }

    Pi6Projection out;
    out.coefficient = 2.0 * R * R * moment;
    std::vector<double> pi(sub.n), perp = v;
    for (std::size_t i = 0; i < sub.n; ++i) {
        pi[i] = out.coefficient / std::pow(sub.r(i), 4);
        perp[i] -= pi[i];
    }
    out.Pi_u1 = RadialFunction(sub, std::move(pi));
    out.Pi_perp_u1 = RadialFunction(sub, std::move(perp));
    return out;
}

double h1_inner(const RadialFunction& f, const RadialFunction& g, double R) {
    if (!f.grid.same_as(g.grid)) throw GridError("h1_inner: functions must share a grid");
    check_inside(f.grid, R, "h1_inner");
    const auto fr = derivative(f, 1), gr = derivative(g, 1);
    const std::size_t i0 = f.grid.index_at_or_above(R);
    std::vector<double> y(f.grid.n, 0.0);
    for (std::size_t i = i0; i < f.grid.n; ++i) y[i] = fr[i] * gr[i] * std::pow(f.r(i), 3);
    return cumulative_tail(y, f.grid.dr, i0);
}

double h1_norm_sq(const RadialFunction& f, double R) { return h1_inner(f, f, R); }

Extrapolation richardson_limit(double e1, double e2, double e3, double plateau_tol, double scale) {
    Extrapolation x;
    const double l12 = 2.0 * e2 - e1;
    const double l23 = 2.0 * e3 - e2;
    const double l3 = (8.0 * e3 - 6.0 * e2 + e1) / 3.0;
    const double hi = std::max({l12, l23, l3}), lo = std::min({l12, l23, l3});
    const double denom = std::max(std::abs(l3), 1e-12 * std::abs(scale));
    x.limit = std::max(l3, 0.0);
    x.spread = denom > 0.0 ? (hi - lo) / denom : 0.0;
    x.quality = std::clamp(1.0 - x.spread, 0.0, 1.0);
    x.plateau = x.spread < plateau_tol;
    return x;
}

ChannelReport measure_channel(const RadialFunction& u0, const RadialFunction& u1, double R, DataKind kind,
                              const ChannelOptions& opt) {
    if (!u0.grid.same_as(u1.grid)) throw ChannelError("measure_channel: u0 and u1 must share a grid");
    if (!(R >= 0.0)) throw ChannelError("measure_channel: R must be >= 0");
    if (!(opt.T_max > 0.0)) throw ChannelError("measure_channel: T_max must be positive");
    check_inside(u0.grid, R, "measure_channel");
    const auto zero = RadialFunction::zeros(u0.grid);
    const auto& a = kind == DataKind::U1Only ? zero : u0;
    const auto& b = kind == DataKind::U0Only ? zero : u1;

    ChannelReport rep;
    rep.data_kind = kind;
    rep.dimension = 4;
    rep.R = R;
    if (kind != DataKind::U1Only) {
        rep.reference = R == 0.0 ? 0.25 * h1_norm_sq(a, 0.0) : 0.15 * h1_norm_sq(project_pi(a, R).pi_perp_f, R);
        if (rep.reference <= kVacuous * h1_norm_sq(a, R)) rep.reference = 0.0;
    }

    std::pair<Series, Series> series;
    if (opt.solver == Solver::Spectral && u0.grid.r_min == 0.0) {
        series = spectral_series(a, b, 4, R, opt, rep.warnings);
    } else {
        if (opt.solver == Solver::Spectral) rep.warnings.push_back("data do not reach the origin; FD solver used");
        series = fd_series_both(a, b, 4, R, opt, rep.warnings);
    }
    fill_report(rep, limits_of(series.first, series.second, true, opt.plateau_tol), opt.plateau_tol);
    return rep;
}

ChannelReport measure_channel_6d(const RadialFunction& u1, double R, const ChannelOptions& opt) {
    if (!(R > 0.0)) throw ChannelError("measure_channel_6d: R must be positive");
    if (!(opt.T_max > 0.0)) throw ChannelError("measure_channel_6d: T_max must be positive");
    check_inside(u1.grid, R, "measure_channel_6d");
    ChannelReport rep;
    rep.data_kind = DataKind::U1Only;
    rep.dimension = 6;
    rep.R = R;
    const auto perp = project_Pi6(u1, R).Pi_perp_u1;
    std::vector<double> y(perp.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = perp[i] * perp[i] * std::pow(perp.r(i), 5);
    rep.reference = 0.15 * integrate_samples(y, perp.grid.dr, 0, y.size() - 1);
    const auto v = tail_values(u1, perp.grid);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = v[i] * v[i] * std::pow(perp.r(i), 5);
    if (rep.reference <= kVacuous * integrate_samples(y, perp.grid.dr, 0, y.size() - 1)) rep.reference = 0.0;

    const auto zero = RadialFunction::zeros(u1.grid);
    std::pair<Series, Series> series;
    if (opt.solver == Solver::Spectral && u1.grid.r_min == 0.0) {
        series = spectral_series(zero, u1, 6, R, opt, rep.warnings);
    } else {
        if (opt.solver == Solver::Spectral) rep.warnings.push_back("data do not reach the origin; FD solver used");
        series = fd_series_both(zero, u1, 6, R, opt, rep.warnings);
    }
    fill_report(rep, limits_of(series.first, series.second, false, opt.plateau_tol), opt.plateau_tol);
    return rep;
}

double transform_6d_residual(const RadialFunction& u1, double R, double t, const SpectralOptions& opt) {
    const auto& g = u1.grid;
    if (g.r_min != 0.0) throw ChannelError("transform_6d_residual: data must start at the origin");
    // w = ut solves the 6D equation with data (u1, 0); w_t has data (0, Delta u1).
    const auto d1 = derivative(u1, 1), d2 = derivative(u1, 2);
    std::vector<double> lap(g.n);
    for (std::size_t i = 0; i < g.n; ++i) lap[i] = g.r(i) > 0.0 ? d2[i] + 5.0 * d1[i] / g.r(i) : 6.0 * d2[i];
    const auto zero = RadialFunction::zeros(g);
    const double extent = support_extent(u1);
    const double horizon = extent + 2.0 * std::abs(t) + 1.0;
    const SpectralWave w(u1, zero, 6, horizon, opt);
    const SpectralWave wt(zero, RadialFunction(g, lap), 6, horizon, opt);

    const double lo = R + std::abs(t);
    const auto out = RadialGrid::with_spacing(lo, std::max(std::abs(t) + extent + 1.0, lo + 8 * g.dr), g.dr);
    const auto sw = w.sample({t}, out).front();
    const auto swt = wt.sample({t}, out).front();
    std::vector<double> y(out.n);
    for (std::size_t i = 0; i < out.n; ++i) y[i] = out.r(i) * swt.ut[i];
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < out.n; ++i) {
        const double r = out.r(i);
        const double vtt = cumulative_tail(y, out.dr, i);
        const double lap4 = -4.0 * sw.u[i] - r * sw.ur[i];
        worst = std::max(worst, std::abs(vtt - lap4));
        scale = std::max(scale, std::abs(vtt));
    }
    return scale > 0.0 ? worst / scale : worst;
}

InhomReport inhom_bound_check(const RadialFunction& u0, const SourceFn& f, double R, const ChannelOptions& opt) {
    if (!(R >= 0.0)) throw ChannelError("inhom_bound_check: R must be >= 0");
    if (!(opt.T_max > 0.0)) throw ChannelError("inhom_bound_check: T_max must be positive");
    check_inside(u0.grid, R, "inhom_bound_check");
    const double T = opt.T_max;
    InhomReport rep;
    rep.R = R;
    rep.constant = R == 0.0 ? 2.0 : std::sqrt(20.0 / 3.0);
    rep.lhs = std::sqrt(std::max(0.0, R == 0.0 ? h1_norm_sq(u0, 0.0) : h1_norm_sq(project_pi(u0, R).pi_perp_f, R)));

    const auto zero = RadialFunction::zeros(u0.grid);
    auto setup = fd_setup(u0, zero, T);
    const auto s = FieldState::make(ModelSpec::free(4), setup.u0, setup.u1);
    const auto tr = fd_run(s, R, T, opt, f);
    const auto ser = fd_series(tr, R);
    double scale = 0.0;
    for (const auto& p : ser) scale = std::max(scale, p.grad);
    const auto ex = richardson_limit(ser[0].grad, ser[1].grad, ser[2].grad, opt.plateau_tol, scale);
    rep.exterior_limit = std::sqrt(ex.limit);
    rep.plateau_quality = ex.quality;
    rep.plateau_reached = ex.plateau;

    // ||1_{r > R + t} f||_{L^1 L^2} on [0, T], Simpson in t.
    if (f) {
        const auto& g = setup.u0.grid;
        const std::size_t nt = 2 * static_cast<std::size_t>(std::ceil(T / (4.0 * g.dr))) + 1;
        std::vector<double> inner(nt);
        const double dt = T / static_cast<double>(nt - 1);
        for (std::size_t k = 0; k < nt; ++k) {
            const double t = dt * static_cast<double>(k);
            const std::size_t i0 = g.index_at_or_above(R + t);
            std::vector<double> y(g.n, 0.0);
            for (std::size_t i = i0; i < g.n; ++i) {
                const double r = g.r(i), v = f(t, r);
                y[i] = v * v * r * r * r;
            }
            inner[k] = std::sqrt(cumulative_tail(y, g.dr, i0));
        }
        rep.source_norm = integrate_samples(inner, dt, 0, nt - 1);
    }
    rep.rhs = rep.constant * (rep.exterior_limit + rep.source_norm);
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

double BatterySample::operator()(double r) const {
    double s = 0.0;
    for (const auto& b : bumps) {
        const double x = (r - b.center) / b.half_width;
        if (std::abs(x) < 1.0) s += b.amplitude * std::pow(1.0 - x * x, power);
    }
    return s;
}

std::vector<BatterySample> random_battery(std::size_t count, std::uint64_t seed, const BatteryOptions& opt) {
    if (!(opt.hi - opt.lo > 2.0 * opt.min_half_width)) throw std::invalid_argument("random_battery: support too narrow");
    if (opt.power < 3) throw std::invalid_argument("random_battery: power must be >= 3 (C^2 bumps)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<BatterySample> out(count);
    for (auto& s : out) {
        s.power = opt.power;
        const auto k = 1 + static_cast<std::size_t>(U(rng) * static_cast<double>(std::max<std::size_t>(opt.max_bumps, 1)));
        for (std::size_t j = 0; j < std::min(k, std::max<std::size_t>(opt.max_bumps, 1)); ++j) {
            Bump b;
            b.half_width = opt.min_half_width + U(rng) * (0.5 * (opt.hi - opt.lo) - opt.min_half_width);
            b.center = opt.lo + b.half_width + U(rng) * (opt.hi - opt.lo - 2.0 * b.half_width);
            b.amplitude = (U(rng) < 0.5 ? -1.0 : 1.0) * (0.2 + 0.8 * U(rng));
            s.bumps.push_back(b);
        }
    }
    return out;
}

}  // namespace channelwave
