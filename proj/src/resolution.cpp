#include "channelwave/resolution.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "channelwave/energetics.hpp"
#include "channelwave/exactcalc.hpp"

namespace channelwave {
namespace {

int profile_dimension(Profile p) { return p == Profile::Q ? 2 : 4; }

double density_at(Profile p, double r, double w, double wr) {
    if (p == Profile::W) return wr * wr * r * r * r;
    const double s = r > 0.0 ? std::sin(w) / r : wr;
    return (wr * wr + s * s) * r;
}

double profile_density(Profile p, double r) {
    return density_at(p, r, eval_profile(p, r), eval_profile_prime(p, r));
}

// Cumulative integral of a sampled density; Simpson per cell with Lagrange midpoints.
class Cumulative {
public:
    Cumulative(const RadialFunction& w, Profile p) {
        const auto wr = derivative(w, 1);
        std::vector<double> d(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) d[i] = density_at(p, w.r(i), w[i], wr[i]);
        dens_ = RadialFunction(w.grid, std::move(d));
        cum_.assign(w.size(), 0.0);
        for (std::size_t i = 1; i < w.size(); ++i) cum_[i] = cum_[i - 1] + cell(w.r(i - 1), w.r(i), i - 1);
    }

    double total() const { return cum_.back(); }

    double operator()(double rho) const {
        const auto& g = dens_.grid;
        if (rho <= g.r_min) return 0.0;
        if (rho >= g.r_max) return total();
        const auto i = std::min<std::size_t>(static_cast<std::size_t>((rho - g.r_min) / g.dr), g.n - 2);
        return cum_[i] + cell(g.r(i), rho, i);
    }

    // Smallest rho with C(rho) >= target, or -1 if unreachable.
    double first_crossing(double target) const {
        if (total() < target) return -1.0;
        const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
        const auto k = static_cast<std::size_t>(it - cum_.begin());
        const auto& g = dens_.grid;
        if (k == 0) return g.r_min;
        double lo = g.r(k - 1), hi = g.r(k);
        for (int it2 = 0; it2 < 200 && hi - lo > 1e-14 * hi; ++it2) {
            const double mid = 0.5 * (lo + hi);
            ((*this)(mid) >= target ? hi : lo) = mid;
        }
        return hi;
    }

private:
    double cell(double a, double b, std::size_t i) const {
        const double fa = dens_[i];
        const double fb = b == dens_.r(i + 1) ? dens_[i + 1] : interpolate(dens_, b);
        return (b - a) / 6.0 * (fa + 4.0 * interpolate(dens_, 0.5 * (a + b)) + fb);
    }

    RadialFunction dens_;
    std::vector<double> cum_;
};

void check_same_grid(const FieldState& s, const RadialFunction& bg) {
    if (!s.grid.same_as(bg.grid)) throw ResolutionError("resolution: background grid does not match the snapshot");
}

struct BubbleFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    Profile profile;
    const RadialGrid* grid;
    std::vector<double> w0, dw0, sqrt_wt;
    std::vector<int> signs;

    int inputs() const { return static_cast<int>(signs.size()); }
    int values() const { return static_cast<int>(profile == Profile::Q ? 2 * grid->n : grid->n); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& f) const {
        const std::size_t n = grid->n;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = grid->r(i);
            double d = dw0[i], v = w0[i];
            for (std::size_t j = 0; j < signs.size(); ++j) {
                const double lam = std::exp(x[j]);
                d -= signs[j] * eval_profile_prime(profile, r, lam);
                if (profile == Profile::Q) v -= signs[j] * eval_profile(profile, r, lam);
            }
            f[i] = sqrt_wt[i] * d;
            if (profile == Profile::Q) f[n + i] = r > 0.0 ? sqrt_wt[i] * v / r : 0.0;
        }
        return 0;
    }
};

double exterior_energy_for(const FieldState& s, double R) {
    if (s.model.kind != Nonlinearity::WaveMapNative) return exterior_energy(s, R).value;
    const auto& g = s.grid;
    const auto ur = derivative(s.u, 1);
    std::vector<double> f(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        const double sn = r > 0.0 ? std::sin(s.u[i]) / r : ur[i];
        f[i] = (s.ut[i] * s.ut[i] + ur[i] * ur[i] + sn * sn) * r;
    }
    const std::size_t i0 = g.index_at_or_above(std::max(R + std::abs(s.t), s.valid_r_min));
    if (i0 + 1 >= g.n) return 0.0;
    return integrate_samples(f, g.dr, i0, g.n - 1);
}

}  // namespace

double bubble_threshold(Profile p, int j) {
    if (j < 1) throw ResolutionError("resolution: threshold index starts at 1");
    auto dens = [p](double r) { return profile_density(p, r); };
    const double inner = integrate_adaptive(dens, 0.0, 1.0, 1e-13).value;
    // r = x / (1 - x) maps [0, 1) onto [0, inf).
    const double outer = integrate_adaptive(
                             [&](double x) {
                                 const double r = x / (1.0 - x);
                                 return x < 1.0 ? dens(r) / ((1.0 - x) * (1.0 - x)) : 0.0;
                             },
                             0.5, 1.0, 1e-13)
                             .value;
    return (j - 1) * (inner + outer) + inner;
}

double cumulative_energy(const RadialFunction& w, Profile p, double rho) { return Cumulative(w, p)(rho); }

std::vector<double> extract_scales(const FieldState& snapshot, const RadialFunction& background, Profile p,
                                   int J_max) {
    check_same_grid(snapshot, background);
    const Cumulative C(snapshot.u - background, p);
    std::vector<double> out;
    for (int j = 1; j <= J_max; ++j) {
        const double lam = C.first_crossing(bubble_threshold(p, j));
        if (lam < 0.0) break;
        out.push_back(lam);
    }
    return out;
}

int detect_sign(const FieldState& snapshot, const RadialFunction& background, Profile p, double lambda) {
    check_same_grid(snapshot, background);
    const auto dw = derivative(snapshot.u - background, 1);
    const auto& g = snapshot.grid;
    const int d = profile_dimension(p);
    double s = 0.0;
    for (std::size_t i = g.index_at_or_above(lambda / 3.0); i < g.n && g.r(i) <= 3.0 * lambda; ++i) {
        const double r = g.r(i);
        s += dw[i] * eval_profile_prime(p, r, lambda) * std::pow(r, d - 1);
    }
    return s >= 0.0 ? 1 : -1;
}

DecompositionResult fit_multibubble(const FieldState& snapshot, const RadialFunction& background, Profile p,
                                    const std::vector<double>& initial,
                                    const std::optional<RadialFunction>& background_ut, int max_iterations) {
    check_same_grid(snapshot, background);
    const auto& g = snapshot.grid;
    const int d = profile_dimension(p);
    for (double l : initial)
        if (!(l > 0.0)) throw ResolutionError("resolution: initial scales must be positive");

    DecompositionResult res;
    res.background = background;

    BubbleFunctor fn;
    fn.profile = p;
    fn.grid = &g;
    const auto w0 = snapshot.u - background;
    fn.w0 = w0.values;
    fn.dw0 = derivative(w0, 1).values;
    fn.sqrt_wt.resize(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double end = (i == 0 || i + 1 == g.n) ? 0.5 : 1.0;
        fn.sqrt_wt[i] = std::sqrt(end * g.dr * std::pow(g.r(i), d - 1));
    }
    for (double l : initial) fn.signs.push_back(detect_sign(snapshot, background, p, l));

    Eigen::VectorXd x0(initial.size());
    for (std::size_t j = 0; j < initial.size(); ++j) x0[j] = std::log(initial[j]);
    Eigen::VectorXd f(fn.values());
    fn(x0, f);
    res.initial_h_norm = f.norm();

    Eigen::VectorXd x = x0;
    double best = res.initial_h_norm;
    if (!initial.empty()) {
        Eigen::NumericalDiff<BubbleFunctor> nd(fn);
        Eigen::LevenbergMarquardt<Eigen::NumericalDiff<BubbleFunctor>> lm(nd);
        lm.parameters.maxfev = max_iterations * (static_cast<int>(initial.size()) + 1);
        lm.parameters.xtol = 1e-14;
        lm.parameters.ftol = 1e-14;
        const auto status = lm.minimize(x);
        res.iterations = static_cast<int>(lm.iter);
        res.converged = status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                        status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters;
        fn(x, f);
        if (f.norm() <= best) {
            best = f.norm();
        } else {
            x = x0;
        }
    }
    res.residual_h_norm = best;

    for (std::size_t j = 0; j < initial.size(); ++j) res.entries.push_back({fn.signs[j], std::exp(x[j])});
    std::sort(res.entries.begin(), res.entries.end(), [](auto& a, auto& b) { return a.scale < b.scale; });
    res.J = static_cast<int>(res.entries.size());

    auto dt = snapshot.ut;
    if (background_ut) {
        if (!background_ut->grid.same_as(g)) throw ResolutionError("resolution: background_ut grid mismatch");
        dt = dt - *background_ut;
    }
    std::vector<double> sq(g.n);
    for (std::size_t i = 0; i < g.n; ++i) sq[i] = dt[i] * dt[i];
    res.residual_l2_dt = std::sqrt(weighted_integral(RadialFunction(g, sq), d - 1));
    return res;
}

RigidityProbe rigidity_probe(const FieldState& data, double R, double T, double dt_snapshot) {
    if (!(T > 0.0) || !(dt_snapshot > 0.0)) throw ResolutionError("resolution: T and snapshot spacing must be positive");
    RigidityProbe out;
    EvolveOptions opt;
    opt.snapshot_every = dt_snapshot;
    for (int dir : {1, -1}) {
        Trajectory tr;
        try {
            tr = evolve_on_cone(data, R, dir * T, opt);
        } catch (const BlowUpDetected& e) {
            throw ResolutionError(std::string("resolution: blow-up inside the cone run: ") + e.what());
        }
        auto& ts = dir > 0 ? out.times_plus : out.times_minus;
        auto& es = dir > 0 ? out.energy_plus : out.energy_minus;
        for (const auto& s : tr.states) {
            ts.push_back(s.t);
            es.push_back(exterior_energy_for(s, R));
        }
        (dir > 0 ? out.eta_plus : out.eta_minus) = *std::min_element(es.begin(), es.end());
    }
    return out;
}

double rigidity_noise_floor(Profile p, const RadialGrid& grid, double R, double T, double dt_snapshot) {
    const auto u = eval_bubble_sum(BubbleConfig{p, {{1, 1.0}}}, grid);
    const auto probe = rigidity_probe(FieldState::make(model_for(p), u, RadialFunction::zeros(grid)), R, T, dt_snapshot);
    return std::max(probe.eta_plus, probe.eta_minus);
}

EllFit ell_limit(const FieldState& snapshot, double r_lo, double r_hi) {
    const auto& g = snapshot.grid;
    if (r_hi > g.r_max * (1.0 + 1e-12)) throw ResolutionError("resolution: ell window exceeds the grid");
    if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw ResolutionError("resolution: bad ell window");
    std::vector<std::size_t> idx;
    for (std::size_t i = g.index_at_or_above(r_lo); i < g.n && g.r(i) <= r_hi * (1.0 + 1e-12); ++i) idx.push_back(i);
    if (idx.size() < 2) throw ResolutionError("resolution: ell window holds fewer than 2 samples");

    Eigen::MatrixXd A(idx.size(), 2);
    Eigen::VectorXd y(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const double r = g.r(idx[k]);
        A(k, 0) = 1.0;
        A(k, 1) = 1.0 / (r * r);
        y[k] = r * r * snapshot.u[idx[k]];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
    EllFit out;
    out.ell = c[0];
    out.c = c[1];
    out.samples = idx.size();
    const double ss_res = (A * c - y).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    out.fit_quality = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

}  // namespace channelwave

namespace channelwave {

double core_h_error(const FieldState& snapshot, double lambda, double radius) {
    const auto& g = snapshot.grid;
    const auto ur = derivative(snapshot.u, 1);
    const std::size_t i1 = std::min(g.index_at_or_above(radius), g.n - 1);
    if (i1 < 2) throw ResolutionError("resolution: core window below grid scale");
    std::vector<double> diff(g.n, 0.0), ref(g.n, 0.0);
    for (std::size_t i = 0; i <= i1; ++i) {
        const double r = g.r(i);
        const double q = eval_Q(r / lambda), qr = eval_Q_prime(r / lambda) / lambda;
        const double d = snapshot.u[i] - q, dr = ur[i] - qr;
        const double d_over_r = r > 0.0 ? d / r : dr;
        const double q_over_r = r > 0.0 ? q / r : qr;
        diff[i] = (dr * dr + d_over_r * d_over_r) * r;
        ref[i] = (qr * qr + q_over_r * q_over_r) * r;
    }
    const double den = integrate_samples(ref, g.dr, 0, i1);
    return std::sqrt(integrate_samples(diff, g.dr, 0, i1) / den);
}

ConcentrationReport concentration_run(const ConcentrationOptions& o) {
    const auto g = RadialGrid::with_spacing(0.0, o.r_max, o.dr);
    auto cutoff = [](double r) {
        if (r < 3.0) return 1.0;
        if (r < 6.0) return 0.5 * (1.0 + std::cos(M_PI * (r - 3.0) / 3.0));
        return 0.0;
    };
    const auto u0 = RadialFunction::sample(g, [](double r) { return eval_Q(r); });
    const auto u1 = RadialFunction::sample(g, [&](double r) { return o.amplitude * r * eval_Q_prime(r) * cutoff(r); });
    EvolveOptions eo;
    eo.snapshot_every = o.snapshot_every;
    eo.max_cell_jump = o.max_cell_jump;

    ConcentrationReport rep;
    Trajectory tr;
    try {
        tr = evolve(FieldState::make(ModelSpec::wave_map(), u0, u1), o.t_max, eo);
    } catch (const BlowUpDetected& e) {
        tr = e.partial;
        rep.blowup_detected = true;
        rep.blowup_time = e.time();
    }
    const auto zero = RadialFunction::zeros(g);
    const FieldState* last = nullptr;
    for (const auto& s : tr.states) {
        const auto l = extract_scales(s, zero, Profile::Q, 1);
        if (l.empty()) continue;
        rep.times.push_back(s.t);
        rep.lambdas.push_back(l[0]);
        last = &s;
    }
    if (!last) return rep;
    rep.last_lambda = rep.lambdas.back();
    std::size_t start = rep.lambdas.size() - 1;
    while (start > 0 && rep.lambdas[start - 1] > rep.lambdas[start]) --start;
    rep.strictly_decreasing = start == 0;
    rep.decades = std::log10(rep.lambdas[start] / rep.last_lambda);
    rep.core_h_error = core_h_error(*last, rep.last_lambda, 5.0 * rep.last_lambda);
    return rep;
}

}  // namespace channelwave
