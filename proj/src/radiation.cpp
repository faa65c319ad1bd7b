#include "channelwave/radiation.hpp"

#include <algorithm>
#include <cmath>

#include "channelwave/channels.hpp"
#include "channelwave/energetics.hpp"

namespace channelwave {

namespace {

const FieldState& snapshot_at(const Trajectory& traj, double t) {
    const auto& s = traj.nearest(t);
    if (std::abs(s.t - t) > 1e-6 * std::max(1.0, std::abs(t)))
        throw RadiationError("radiation: no snapshot at t = " + std::to_string(t));
    return s;
}

std::vector<const FieldState*> pick(const Trajectory& traj, const std::vector<double>& t_samples) {
    if (traj.states.empty()) throw RadiationError("radiation: empty trajectory");
    std::vector<const FieldState*> out;
    if (t_samples.empty()) {
        out.push_back(&traj.back());
    } else {
        for (double t : t_samples) out.push_back(&snapshot_at(traj, t));
    }
    for (const auto* s : out)
        if (!(s->t > 0.0)) throw RadiationError("radiation: extraction times must be positive");
    return out;
}

struct Window {
    double lo = 0.0, hi = 0.0, h = 0.0;
    std::size_t n = 0;
    double eta(std::size_t i) const { return lo + h * static_cast<double>(i); }
};

Window window_for(const std::vector<const FieldState*>& states) {
    Window w;
    w.lo = -1e300;
    w.hi = 1e300;
    for (const auto* s : states) {
        w.lo = std::max({w.lo, -0.5 * s->t, s->valid_r_min - s->t, s->grid.r_min - s->t});
        w.hi = std::min(w.hi, s->grid.r_max - s->t);
    }
    w.h = states.front()->grid.dr;
    if (!(w.hi - w.lo >= 8.0 * w.h)) throw RadiationError("radiation: extraction window is empty; enlarge the grid");
    w.n = static_cast<std::size_t>(std::floor((w.hi - w.lo) / w.h + 1e-9)) + 1;
    return w;
}

// Average over the snapshots of sign * r^{(d-1)/2} f_k(t_k + eta).
std::vector<double> averaged(const std::vector<const FieldState*>& states, const std::vector<RadialFunction>& fields,
                             const Window& w, double sign) {
    std::vector<double> acc(w.n, 0.0);
    for (std::size_t k = 0; k < states.size(); ++k) {
        const auto* s = states[k];
        const double p = 0.5 * (s->model.dimension - 1);
        for (std::size_t i = 0; i < w.n; ++i) {
            const double r = std::clamp(s->t + w.eta(i), s->grid.r_min, s->grid.r_max);
            acc[i] += sign * std::pow(r, p) * interpolate(fields[k], r);
        }
    }
    for (auto& x : acc) x /= static_cast<double>(states.size());
    return acc;
}

double l2_sq(const std::vector<double>& y, double h) {
    std::vector<double> sq(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) sq[i] = y[i] * y[i];
    return integrate_samples(sq, h, 0, y.size() - 1);
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b, double sign, double h) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - sign * b[i];
    return std::sqrt(l2_sq(d, h));
}

// Energy int (ur^2 + ut^2) r^{d-1} over the valid samples.
double state_energy(const FieldState& s) {
    const auto ur = derivative(s.u, 1);
    const std::size_t i0 = s.first_valid();
    std::vector<double> y(s.grid.n, 0.0);
    for (std::size_t i = i0; i < s.grid.n; ++i)
        y[i] = (ur[i] * ur[i] + s.ut[i] * s.ut[i]) * std::pow(s.grid.r(i), s.model.dimension - 1);
    return i0 + 1 < s.grid.n ? integrate_samples(y, s.grid.dr, i0, s.grid.n - 1) : 0.0;
}

std::vector<double> eta_derivative(const std::vector<double>& y, const Window& w) {
    const auto g = RadialGrid::make(0.0, w.h * static_cast<double>(w.n - 1), w.n);
    return derivative(RadialFunction(g, y), 1).values;
}

}  // namespace

RadiationProfile extract_profile(const Trajectory& traj, const std::vector<double>& t_samples,
                                 double max_discrepancy) {
    if (t_samples.empty()) throw RadiationError("extract_profile: no extraction times");
    const auto states = pick(traj, t_samples);
    const auto w = window_for(states);
    std::vector<RadialFunction> ur, ut;
    for (const auto* s : states) {
        ur.push_back(derivative(s->u, 1));
        ut.push_back(s->ut);
    }
    RadiationProfile p;
    p.eta_grid.resize(w.n);
    for (std::size_t i = 0; i < w.n; ++i) p.eta_grid[i] = w.eta(i);
    p.G = averaged(states, ur, w, 1.0);
    p.G_from_dt = averaged(states, ut, w, -1.0);
    for (const auto* s : states) p.t_extraction = std::max(p.t_extraction, s->t);
    p.l2_norm_sq = l2_sq(p.G, w.h);

    const double e0 = state_energy(traj.states.front());
    const double gap = l2_diff(p.G, p.G_from_dt, 1.0, w.h);
    p.discrepancy = e0 > 0.0 ? gap / std::sqrt(e0) : (gap > 0.0 ? 1.0 : 0.0);
    if (p.discrepancy > max_discrepancy)
        throw RadiationError("extract_profile: the two profile estimates differ by " +
                             std::to_string(100.0 * p.discrepancy) + "%; use larger extraction times");
    return p;
}

Equipartition check_equipartition(const Trajectory& traj, double R) {
    if (traj.states.empty()) throw RadiationError("check_equipartition: empty trajectory");
    const auto& last = traj.back();
    const double T = last.t;
    auto energies = [&](const FieldState& s) { return exterior_energy(s, R); };
    const auto eT = energies(last);
    Equipartition e{eT.gradient, eT.kinetic, 0.0};
    const auto& q = traj.nearest(0.25 * T);
    const auto& h = traj.nearest(0.5 * T);
    const double tol = 1e-6 * std::max(1.0, std::abs(T));
    if (T > 0.0 && std::abs(q.t - 0.25 * T) <= tol && std::abs(h.t - 0.5 * T) <= tol) {
        const auto eq = energies(q), eh = energies(h);
        const double scale = std::max({eq.gradient, eq.kinetic, eh.gradient, eh.kinetic});
        e.grad_limit = richardson_limit(eq.gradient, eh.gradient, eT.gradient, 1e-3, scale).limit;
        e.dt_limit = richardson_limit(eq.kinetic, eh.kinetic, eT.kinetic, 1e-3, scale).limit;
    }
    const double m = std::max(e.grad_limit, e.dt_limit);
    e.relative_gap = m > 0.0 ? std::abs(e.grad_limit - e.dt_limit) / m : 0.0;
    return e;
}

DerivativeProfile derivative_profile(const Trajectory& traj, const std::vector<double>& t_samples) {
    const auto states = pick(traj, t_samples);
    const auto w = window_for(states);
    std::vector<RadialFunction> ur, utr;
    for (const auto* s : states) {
        ur.push_back(derivative(s->u, 1));
        utr.push_back(derivative(s->ut, 1));
    }
    DerivativeProfile d;
    d.eta_grid.resize(w.n);
    for (std::size_t i = 0; i < w.n; ++i) d.eta_grid[i] = w.eta(i);
    d.H = averaged(states, utr, w, 1.0);
    d.G_prime = eta_derivative(averaged(states, ur, w, 1.0), w);
    return d;
}

double derivative_profile_check(const Trajectory& traj, const std::vector<double>& t_samples) {
    const auto d = derivative_profile(traj, t_samples);
    const double h = d.eta_grid[1] - d.eta_grid[0];
    const double ref = std::sqrt(l2_sq(d.G_prime, h));
    const double gap = l2_diff(d.H, d.G_prime, -1.0, h);
    return ref > 0.0 ? gap / ref : gap;
}

Trajectory spectral_trajectory(const RadialFunction& u0, const RadialFunction& u1, const std::vector<double>& times,
                               double r_max, double dr, int d, const SpectralOptions& opt) {
    double tmax = 0.0;
    for (double t : times) tmax = std::max(tmax, std::abs(t));
    const SpectralWave sw(u0, u1, d, r_max + tmax + dr, opt);
    const auto g = RadialGrid::with_spacing(0.0, r_max, dr);
    Trajectory tr;
    for (double t : times) tr.states.push_back(sw.state(t, g));
    return tr;
}

}  // namespace channelwave
