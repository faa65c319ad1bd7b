#include "channelwave/energetics.hpp"

#include <algorithm>
#include <cmath>

namespace channelwave {

namespace {

// First sample of {r >= edge}; throws when the grid does not reach that far in.
std::size_t exterior_start(const FieldState& s, double edge) {
    const auto& g = s.grid;
    const double tol = 1e-9 * g.dr;
    if (edge < g.r_min - tol) throw GridError("energy: exterior region starts below the grid");
    if (edge < s.valid_r_min - tol) throw GridError("energy: exterior region reaches invalid cone samples");
    return g.index_at_or_above(edge);
}

double tail_integral(const std::vector<double>& y, const RadialGrid& g, std::size_t i0) {
    if (i0 + 1 >= g.n) return 0.0;
    return integrate_samples(y, g.dr, i0, g.n - 1);
}

}  // namespace

EnergyBreakdown energy(const FieldState& s, Region region) {
    const auto& g = s.grid;
    const std::size_t i0 = region.exterior ? exterior_start(s, region.R + std::abs(s.t)) : 0;
    const auto ur = derivative(s.u, 1);
    const int w = s.model.dimension - 1;
    std::vector<double> kin(g.n, 0.0), grad(g.n, 0.0), pot(g.n, 0.0);
    for (std::size_t i = i0; i < g.n; ++i) {
        const double r = g.r(i);
        const double rw = std::pow(r, w);
        kin[i] = 0.5 * s.ut[i] * s.ut[i] * rw;
        grad[i] = 0.5 * ur[i] * ur[i] * rw;
        pot[i] = s.model.potential_density(r, s.u[i]) * rw;
    }
    EnergyBreakdown e;
    e.kinetic = tail_integral(kin, g, i0);
    e.gradient = tail_integral(grad, g, i0);
    e.potential = tail_integral(pot, g, i0);
    e.total = e.kinetic + e.gradient + e.potential;
    return e;
}

ExteriorSample exterior_energy(const FieldState& s, double R) {
    const auto& g = s.grid;
    const std::size_t i0 = exterior_start(s, R + std::abs(s.t));
    ExteriorSample out;
    out.t = s.t;
    if (i0 + 1 >= g.n) return out;
    // Differentiate only the exterior part plus a stencil margin.
    const std::size_t lo = i0 >= 4 ? i0 - 4 : 0;
    const RadialGrid sub = RadialGrid::make(g.r(lo), g.r_max, g.n - lo);
    std::vector<double> u(s.u.values.begin() + static_cast<std::ptrdiff_t>(lo), s.u.values.end());
    const auto ur = derivative(RadialFunction(sub, std::move(u)), 1);
    const int w = s.model.dimension - 1;
    std::vector<double> kin(g.n, 0.0), grad(g.n, 0.0);
    for (std::size_t i = i0; i < g.n; ++i) {
        const double rw = std::pow(g.r(i), w);
        kin[i] = s.ut[i] * s.ut[i] * rw;
        grad[i] = ur[i - lo] * ur[i - lo] * rw;
    }
    out.kinetic = tail_integral(kin, g, i0);
    out.gradient = tail_integral(grad, g, i0);
    out.value = out.kinetic + out.gradient;
    return out;
}

std::vector<ExteriorSample> exterior_energy_series(const Trajectory& traj, double R) {
    std::vector<ExteriorSample> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) out.push_back(exterior_energy(s, R));
    return out;
}

double spacetime_norm(const std::vector<double>& times, const std::vector<RadialFunction>& slices, double p, double q,
                      double R) {
    if (!(p >= 1.0 && q >= 1.0)) throw std::invalid_argument("spacetime_norm: exponents must be >= 1");
    if (times.size() != slices.size()) throw std::invalid_argument("spacetime_norm: times and slices differ in length");
    if (times.size() < 2) return 0.0;
    std::vector<double> inner(times.size(), 0.0);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto& f = slices[k];
        const auto& g = f.grid;
        const std::size_t i0 = g.index_at_or_above(std::max(R + std::abs(times[k]), g.r_min));
        std::vector<double> y(g.n, 0.0);
        for (std::size_t i = i0; i < g.n; ++i) {
            const double r = g.r(i);
            y[i] = std::pow(std::abs(f[i]), q) * r * r * r;
        }
        inner[k] = std::pow(tail_integral(y, g, i0), p / q);
    }
    double acc = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k] > times[k - 1])) throw std::invalid_argument("spacetime_norm: times must increase");
        acc += 0.5 * (times[k] - times[k - 1]) * (inner[k] + inner[k - 1]);
    }
    return std::pow(acc, 1.0 / p);
}

double spacetime_norm(const Trajectory& traj, double p, double q, double R) {
    std::vector<double> ts;
    std::vector<RadialFunction> us;
    for (const auto& s : traj.states) {
        ts.push_back(s.t);
        us.push_back(s.u);
    }
    return spacetime_norm(ts, us, p, q, R);
}

SinDefect sin_superposition_defect(const std::vector<double>& a) {
    if (a.size() < 2) throw std::invalid_argument("sin_superposition_defect: need at least two angles");
    double sum = 0.0, sum_sin2a = 0.0, sum_sq = 0.0;
    std::vector<double> s(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        sum += a[j];
        s[j] = std::sin(a[j]);
        sum_sin2a += std::sin(2.0 * a[j]);
        sum_sq += s[j] * s[j];
    }
    SinDefect d;
    d.lhs1 = std::abs(std::sin(2.0 * sum) - sum_sin2a);
    const double ss = std::sin(sum);
    d.lhs2 = std::abs(ss * ss - sum_sq);
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (j == k) continue;
            d.rhs1 += std::abs(s[j]) * s[k] * s[k];
            d.rhs2 += std::abs(s[j] * s[k]);
        }
    return d;
}

double wm_h_norm_sq(const FieldState& s, int ell) {
    const auto& g = s.grid;
    const auto ur = derivative(s.u, 1);
    const double shift = ell * std::numbers::pi;
    std::vector<double> y(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        const double v = s.u[i] - shift;
        y[i] = (ur[i] * ur[i] + s.ut[i] * s.ut[i]) * r + (r > 0.0 ? v * v / r : 0.0);
    }
    return integrate_samples(y, g.dr, 0, g.n - 1);
}

}  // namespace channelwave
