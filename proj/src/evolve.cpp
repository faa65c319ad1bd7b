#include "channelwave/evolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace channelwave {

FieldState FieldState::make(const ModelSpec& m, RadialFunction u, RadialFunction ut, double t) {
    m.validate();
    if (!u.grid.same_as(ut.grid)) throw GridError("field state: u and ut must share a grid");
    FieldState s;
    s.model = m;
    s.grid = u.grid;
    s.t = t;
    s.u = std::move(u);
    s.ut = std::move(ut);
    s.valid_r_min = s.grid.r_min;
    return s;
}

std::vector<double> Trajectory::times() const {
    std::vector<double> ts;
    ts.reserve(states.size());
    for (const auto& s : states) ts.push_back(s.t);
    return ts;
}

const FieldState& Trajectory::nearest(double t) const {
    if (states.empty()) throw std::runtime_error("trajectory: no snapshots");
    std::size_t best = 0;
    for (std::size_t i = 1; i < states.size(); ++i)
        if (std::abs(states[i].t - t) < std::abs(states[best].t - t)) best = i;
    return states[best];
}

namespace {

struct System {
    ModelSpec model;
    RadialGrid grid;
    const SourceFn* forcing = nullptr;
    bool has_origin = false;
    bool odd = false;
    double origin_value = 0.0;
    std::vector<double> r, inv_r;
    std::size_t lo = 0;
    std::size_t conservative_points = 0;

    System(const ModelSpec& m, const RadialGrid& g, const SourceFn* f, double u_origin)
        : model(m), grid(g), forcing(f), r(g.radii()), inv_r(g.n, 0.0) {
        has_origin = g.r_min == 0.0;
        odd = m.odd_at_origin();
        origin_value = u_origin;
        for (std::size_t i = 0; i < g.n; ++i) inv_r[i] = r[i] > 0.0 ? 1.0 / r[i] : 0.0;
        // The 4th-order stencil with the singular (d-1)/r term is unstable next to the origin for d = 6.
        if (has_origin && !odd && m.dimension >= 6) conservative_points = 2;
    }

    void rhs(double t, const std::vector<double>& u, const std::vector<double>& v, std::vector<double>& du,
             std::vector<double>& dv) const {
        const std::size_t n = grid.n;
        const double h = grid.dr;
        const double c1 = 1.0 / (12.0 * h);
        const double c2 = 1.0 / (12.0 * h * h);
        const double dm1 = model.dimension - 1.0;
        const bool free = model.kind == Nonlinearity::Free;
        const bool origin_active = has_origin && lo == 0;
        const std::size_t inner_fixed = origin_active ? 0 : lo + 2;
        auto ghost = [&](double mirror) { return odd ? 2.0 * origin_value - mirror : mirror; };

        for (std::size_t i = lo; i < n; ++i) du[i] = v[i];
        for (std::size_t i = lo; i < n; ++i) {
            if (i + 2 >= n || i < inner_fixed) {
                dv[i] = 0.0;
                continue;
            }
            double acc;
            if (origin_active && i == 0) {
                if (odd) {
                    dv[0] = 0.0;
                    continue;
                }
                const double urr = c2 * (-2.0 * u[2] + 32.0 * u[1] - 30.0 * u[0]);
                acc = model.dimension * urr + (free ? 0.0 : model.source(0.0, u[0]));
            } else if (origin_active && i < conservative_points) {
                const double x = static_cast<double>(i);
                const double fp = std::pow((x + 0.5) / x, dm1), fm = std::pow((x - 0.5) / x, dm1);
                acc = (fp * (u[i + 1] - u[i]) - fm * (u[i] - u[i - 1])) / (h * h) +
                      (free ? 0.0 : model.source(r[i], u[i]));
            } else {
                const double um2 = i >= 2 ? u[i - 2] : ghost(u[2 - i]);
                const double um1 = u[i - 1];
                const double up1 = u[i + 1];
                const double up2 = u[i + 2];
                const double urr = c2 * (-up2 + 16.0 * up1 - 30.0 * u[i] + 16.0 * um1 - um2);
                const double ur = c1 * (-up2 + 8.0 * up1 - 8.0 * um1 + um2);
                acc = urr + dm1 * inv_r[i] * ur + (free ? 0.0 : model.source(r[i], u[i]));
            }
            if (forcing) acc += (*forcing)(t, r[i]);
            dv[i] = acc;
        }
    }
};

struct RunConfig {
    bool cone = false;
    double R = 0.0;
};

// Forward-in-time core; t_end > initial.t.
Trajectory run_forward(const FieldState& initial, double t_end, const EvolveOptions& opt, const RunConfig& rc) {
    const auto wall0 = std::chrono::steady_clock::now();
    if (!(opt.cfl > 0.0 && opt.cfl <= 0.9)) throw std::invalid_argument("evolve: cfl must lie in (0, 0.9]");
    const RadialGrid& g = initial.grid;
    const std::size_t n = g.n;
    const double t0 = initial.t;
    const double span = t_end - t0;
    const double snap = opt.snapshot_every > 0.0 ? std::min(opt.snapshot_every, span) : span;

    System sys(initial.model, g, opt.source ? &opt.source : nullptr, initial.u[0]);
    std::vector<double> u = initial.u.values, v = initial.ut.values;
    if (sys.has_origin && sys.odd) v[0] = 0.0;

    auto valid_from = [&](double t) { return rc.cone ? rc.R + std::abs(t0) + std::abs(t - t0) : g.r_min; };
    auto snapshot = [&](double t) {
        FieldState s = FieldState::make(initial.model, RadialFunction(g, u), RadialFunction(g, v), t);
        s.valid_r_min = std::max(g.r_min, valid_from(t));
        return s;
    };

    Trajectory traj;
    traj.meta.cfl = opt.cfl;
    traj.meta.on_cone = rc.cone;
    traj.meta.cone_R = rc.R;
    FieldState first = initial;
    first.valid_r_min = std::max(g.r_min, valid_from(t0));
    traj.states.push_back(first);

    std::vector<double> k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n), yu(n), yv(n);
    std::vector<double> prev_u, prev_v;
    double t = t0;
    double dt_used = opt.cfl * g.dr;

    const auto segments = static_cast<std::size_t>(std::ceil(span / snap - 1e-9));
    for (std::size_t seg = 0; seg < segments; ++seg) {
        const double seg_end = seg + 1 == segments ? t_end : t0 + static_cast<double>(seg + 1) * snap;
        const double seg_len = seg_end - t;
        const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(seg_len / (opt.cfl * g.dr) - 1e-9)));
        const double dt = seg_len / static_cast<double>(steps);
        dt_used = std::min(dt_used, dt);
        for (std::size_t s = 0; s < steps; ++s) {
            if (rc.cone) {
                const double edge = valid_from(t) - std::max(opt.cone_buffer, 8.0 * g.dr);
                sys.lo = std::max(sys.lo, edge > g.r_min ? g.index_at_or_below(edge) : std::size_t{0});
                if (sys.lo + 8 > n) sys.lo = n > 8 ? n - 8 : 0;
            }
            const std::size_t lo = sys.lo;
            prev_u.assign(u.begin(), u.end());
            prev_v.assign(v.begin(), v.end());
            sys.rhs(t, u, v, k1u, k1v);
            for (std::size_t i = lo; i < n; ++i) {
                yu[i] = u[i] + 0.5 * dt * k1u[i];
                yv[i] = v[i] + 0.5 * dt * k1v[i];
            }
            sys.rhs(t + 0.5 * dt, yu, yv, k2u, k2v);
            for (std::size_t i = lo; i < n; ++i) {
                yu[i] = u[i] + 0.5 * dt * k2u[i];
                yv[i] = v[i] + 0.5 * dt * k2v[i];
            }
            sys.rhs(t + 0.5 * dt, yu, yv, k3u, k3v);
            for (std::size_t i = lo; i < n; ++i) {
                yu[i] = u[i] + dt * k3u[i];
                yv[i] = v[i] + dt * k3v[i];
            }
            sys.rhs(t + dt, yu, yv, k4u, k4v);
            for (std::size_t i = lo; i < n; ++i) {
                u[i] += dt / 6.0 * (k1u[i] + 2.0 * k2u[i] + 2.0 * k3u[i] + k4u[i]);
                v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
            }
            const double t_next = s + 1 == steps ? seg_end : t + dt;

            std::string reason;
            for (std::size_t i = lo; i < n && reason.empty(); ++i) {
                if (!std::isfinite(u[i]) || !std::isfinite(v[i]))
                    reason = "non-finite value";
                else if (std::abs(u[i]) > opt.blowup_threshold)
                    reason = "amplitude above threshold";
                else if (i + 1 < n && std::abs(u[i + 1] - u[i]) > opt.max_cell_jump)
                    reason = "concentration below grid scale";
            }
            if (!reason.empty()) {
                u = prev_u;
                v = prev_v;
                FieldState last = snapshot(t);
                Trajectory partial = traj;
                if (partial.states.back().t < t) partial.states.push_back(last);
                partial.meta.dt = dt_used;
                partial.meta.wall_time =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
                throw BlowUpDetected("evolve: blow-up detected at t=" + std::to_string(t_next) + " (" + reason + ")",
                                     std::move(last), std::move(partial));
            }
            t = t_next;
        }
        traj.states.push_back(snapshot(t));
    }
    traj.meta.dt = dt_used;
    traj.meta.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return traj;
}

FieldState time_flipped(const FieldState& s) {
    FieldState f = s;
    for (auto& x : f.ut.values) x = -x;
    return f;
}

Trajectory run(const FieldState& initial, double t_end, const EvolveOptions& opt, const RunConfig& rc) {
    const double t0 = initial.t;
    if (t_end == t0) {
        Trajectory tr;
        tr.states.push_back(initial);
        tr.meta.cfl = opt.cfl;
        tr.meta.on_cone = rc.cone;
        tr.meta.cone_R = rc.R;
        if (rc.cone) tr.states.back().valid_r_min = std::max(initial.grid.r_min, rc.R + std::abs(t0));
        return tr;
    }
    if (t_end > t0) return run_forward(initial, t_end, opt, rc);

    // Backward: w(s) = u(t0 - s) solves the same equation with flipped velocity.
    FieldState w0 = time_flipped(initial);
    w0.t = 0.0;
    EvolveOptions o = opt;
    if (opt.source) o.source = [f = opt.source, t0](double s, double r) { return f(t0 - s, r); };
    RunConfig rcw = rc;
    if (rc.cone) rcw.R = rc.R + std::abs(t0);
    auto map_back = [&](Trajectory tr) {
        for (auto& s : tr.states) {
            s = time_flipped(s);
            s.t = t0 - s.t;
        }
        std::reverse(tr.states.begin(), tr.states.end());
        return tr;
    };
    try {
        return map_back(run_forward(w0, t0 - t_end, o, rcw));
    } catch (const BlowUpDetected& e) {
        FieldState last = time_flipped(e.last_good);
        last.t = t0 - last.t;
        throw BlowUpDetected(e.what(), std::move(last), map_back(e.partial));
    }
}

}  // namespace

Trajectory evolve(const FieldState& initial, double t_end, double cfl, double snapshot_every) {
    EvolveOptions opt;
    opt.cfl = cfl;
    opt.snapshot_every = snapshot_every;
    return evolve(initial, t_end, opt);
}

Trajectory evolve(const FieldState& initial, double t_end, const EvolveOptions& opt) {
    return run(initial, t_end, opt, RunConfig{false, 0.0});
}

Trajectory evolve_on_cone(const FieldState& initial, double R, double t_end, const EvolveOptions& opt) {
    if (R < 0.0) throw std::invalid_argument("evolve_on_cone: R must be >= 0");
    if (initial.grid.r_min > R + std::abs(initial.t) + 1e-12)
        throw std::invalid_argument("evolve_on_cone: grid does not cover the cone at the initial time");
    return run(initial, t_end, opt, RunConfig{true, R});
}

}  // namespace channelwave
