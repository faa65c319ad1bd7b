#include "channelwave/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "channelwave/approxsol.hpp"
#include "channelwave/channels.hpp"
#include "channelwave/energetics.hpp"
#include "channelwave/exactcalc.hpp"
#include "channelwave/parallel.hpp"
#include "channelwave/radiation.hpp"
#include "channelwave/resolution.hpp"

namespace channelwave {
namespace {

using std::numbers::pi;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double gauss(double r, double c, double w) { return std::exp(-(r - c) * (r - c) / (w * w)); }

class Recorder {
public:
    explicit Recorder(CriterionResult& out) : out_(out) {}

    void at_most(const std::string& name, double value, double bound, bool known = false) {
        add({name, value, "<=", bound, 0.0, value <= bound, known});
    }
    void at_least(const std::string& name, double value, double bound, bool known = false) {
        add({name, value, ">=", bound, 0.0, value >= bound, known});
    }
    void near(const std::string& name, double value, double target, double tol) {
        add({name, value, "==", target, tol, std::abs(value - target) <= tol});
    }
    void runtime(const std::string& name, double secs, double bound) {
        Check c{name, secs, "<=", bound, 0.0, secs <= bound};
        c.timing = true;
        add(c);
    }
    // Battery: one check on the worst sample.
    void worst_at_least(const std::string& name, const std::vector<double>& v, double bound) {
        at_least(name, v.empty() ? -HUGE_VAL : *std::min_element(v.begin(), v.end()), bound);
    }
    void worst_at_most(const std::string& name, const std::vector<double>& v, double bound) {
        at_most(name, v.empty() ? HUGE_VAL : *std::max_element(v.begin(), v.end()), bound);
    }

private:
    void add(Check c) { out_.checks.push_back(std::move(c)); }
    CriterionResult& out_;
};

struct Context {
    const AcceptanceOptions& o;

    RadialGrid grid(double lo, double hi, std::size_t n) const {
        const auto m = static_cast<std::size_t>(std::lround(double(n - 1) * o.resolution));
        return RadialGrid::make(lo, hi, std::max<std::size_t>(m, 8) + 1);
    }
    std::size_t count(std::size_t n) const { return o.quick ? std::max<std::size_t>(3, n / 4) : n; }
};

// 1. Quadrature suite.
void criterion_quadrature(const Context&, Recorder& rec) {
    const auto t0 = Clock::now();
    const auto I = compute_I();
    rec.at_most("I", I.I.value, 0.1);
    rec.at_most("I error estimate", I.I.error_estimate, 1e-8);
    rec.near("chain bound 3597/(400 pi^4)", chain_bound(), 3597.0 / (400.0 * std::pow(pi, 4)), 1e-9);
    rec.at_most("I <= chain bound", I.I.value - I.chain_bound, 0.0);
    const auto abc = compute_abc();
    rec.at_most("a", abc.a.value, 12.0);
    rec.at_most("b", abc.b.value, 11.0);
    rec.at_most("c", abc.c.value, 2.0 * pi);
    rec.near("a majorant closed form", abc.a_majorant,
             3.0 * pi * std::sqrt(pi / 4.0 * (1.0 + 5.0 / 3.0 + 3.0 / 5.0 - 9.0 / 7.0)), 1e-9);
    rec.near("b majorant closed form", abc.b_majorant, 5.0 * pi * std::sqrt(pi / 7.0), 1e-9);
    rec.at_most("a <= majorant", abc.a.value - abc.a_majorant, 0.0);
    rec.at_most("b <= majorant", abc.b.value - abc.b_majorant, 0.0);
    rec.runtime("runtime [s]", seconds_since(t0), 60.0);
}

std::vector<RadialFunction> battery_data(const RadialGrid& g, std::size_t n, std::uint64_t seed,
                                         const BatteryOptions& bo = {}) {
    std::vector<RadialFunction> out;
    for (const auto& b : random_battery(n, seed, bo)) out.push_back(RadialFunction::sample(g, b));
    return out;
}

// 2. Quarter bound at R = 0.
void criterion_quarter(const Context& c, Recorder& rec) {
    const auto t0 = Clock::now();
    const auto g = c.grid(0.0, 8.0, 801);
    const auto data = battery_data(g, c.count(20), c.o.seed);
    ChannelOptions opt;
    opt.T_max = 32.0;
    std::vector<double> ratio(data.size());
    parallel_for(data.size(), [&](std::size_t k) {
        ratio[k] = measure_channel(data[k], RadialFunction::zeros(g), 0.0, DataKind::U0Only, opt).ratio;
    });
    rec.worst_at_least("min ratio to (1/4)|grad u0|^2", ratio, 0.98);
    rec.runtime("runtime [s]", seconds_since(t0), 300.0);
}

// 3. 3/20 bound at R = 1, the degenerate datum and the 6D variant.
void criterion_three_twentieths(const Context& c, Recorder& rec) {
    const auto g = c.grid(0.0, 8.0, 801);
    const auto data = battery_data(g, c.count(20), c.o.seed);
    ChannelOptions opt;
    opt.T_max = 32.0;
    std::vector<double> r4(data.size(), HUGE_VAL), r6(data.size(), HUGE_VAL);
    parallel_for(data.size(), [&](std::size_t k) {
        const auto rep = measure_channel(data[k], RadialFunction::zeros(g), 1.0, DataKind::U0Only, opt);
        if (rep.reference > 0.0) r4[k] = rep.ratio;
        const auto rep6 = measure_channel_6d(data[k], 1.0, opt);
        if (rep6.reference > 0.0) r6[k] = rep6.ratio;
    });
    rec.worst_at_least("min ratio to (3/20)|grad pi_perp u0|^2", r4, 0.98);
    rec.worst_at_least("6D min ratio", r6, 0.98);

    const auto h = c.grid(1.0, 200.0, 19901);
    ChannelOptions fd;
    fd.T_max = 64.0;
    fd.solver = Solver::FD;
    const auto deg = measure_channel(RadialFunction::sample(h, [](double r) { return 1.0 / (r * r); }),
                                     RadialFunction::zeros(h), 1.0, DataKind::U0Only, fd);
    rec.at_most("1/r^2: reference", deg.reference, 1e-4);
    rec.at_most("1/r^2: exterior limit (t > 0)", deg.measured_limit_plus, 1e-4);
    rec.at_most("1/r^2: exterior limit (t < 0)", deg.measured_limit_minus, 1e-4);
}

// 4. Radiation profile and equipartition.
void criterion_radiation(const Context& c, Recorder& rec) {
    const auto g = c.grid(0.0, 12.0, 1201);
    BatteryOptions bo;
    bo.lo = 2.0;
    bo.hi = 6.0;
    const auto bumps = battery_data(g, c.count(5), c.o.seed + 4, bo);
    const auto zero = RadialFunction::zeros(g);
    const double dr = 0.01 / c.o.resolution;
    std::vector<double> gap(bumps.size()), mismatch(bumps.size());
    parallel_for(bumps.size(), [&](std::size_t k) {
        // Cycle through (u0, 0), (0, u1) and general data.
        const auto& b = bumps[k];
        const RadialFunction u0 = k % 3 == 1 ? zero : b;
        const RadialFunction u1 = k % 3 == 0 ? zero : (k % 3 == 1 ? b : 0.7 * b);
        const auto tr = spectral_trajectory(u0, u1, {0.0, 12.5, 25.0, 50.0}, 62.0, dr, 4, SpectralOptions{0.0, 1e-6});
        gap[k] = check_equipartition(tr, 0.0).relative_gap;
        const auto e = energy(FieldState::make(ModelSpec::free(4), u0, u1));
        const double half = e.gradient + e.kinetic;
        mismatch[k] = std::abs(extract_profile(tr, {50.0}).l2_norm_sq - half) / half;
    });
    rec.worst_at_most("equipartition gap at t = 50", gap, 0.02);
    rec.worst_at_most("|int G^2 - E/2| / (E/2)", mismatch, 0.02);
}

// 5. Inhomogeneous bounds with constants 2 (R = 0) and sqrt(20/3) (R = 2).
void criterion_inhomogeneous(const Context& c, Recorder& rec) {
    const auto g = c.grid(0.0, 8.0, 801);
    const auto data = battery_data(g, c.count(10), c.o.seed + 5);
    ChannelOptions opt;
    opt.T_max = 32.0;
    opt.solver = Solver::FD;
    std::vector<double> margin(data.size());
    std::vector<double> constant_err(data.size());
    parallel_for(data.size(), [&](std::size_t k) {
        const double R = k % 2 == 0 ? 0.0 : 2.0;
        const double a = 0.25 * double(k);
        const SourceFn f = [a](double t, double r) {
            return a * gauss(t, 1.5, 0.5) * (t < 4.0 ? 1.0 : 0.0) * gauss(r, 3.0, 0.6);
        };
        const auto rep = inhom_bound_check(data[k], f, R, opt);
        margin[k] = rep.rhs > 0.0 ? rep.lhs / rep.rhs : HUGE_VAL;
        constant_err[k] = std::abs(rep.constant - (R == 0.0 ? 2.0 : std::sqrt(20.0 / 3.0)));
    });
    rec.worst_at_most("max lhs / rhs", margin, 1.0);
    rec.worst_at_most("constant mismatch", constant_err, 1e-15);
}

// 6. Model exactness.
void criterion_models(const Context& c, Recorder& rec) {
    const double x = 1e-2;
    rec.near("Lambda quintic coefficient", (eval_Lambda(x) - x * x * x) / std::pow(x, 5), -0.3, 1e-4);

    const auto gq = c.grid(0.0, 100.0, 20001);
    const auto q = energy(FieldState::make(ModelSpec::wave_map(), RadialFunction::sample(gq, [](double r) { return eval_Q(r); }),
                                           RadialFunction::zeros(gq)));
    rec.near("E(Q, 0)", q.total, 2.0, 1e-3);

    const auto gw = c.grid(0.0, 1000.0, 100001);
    const auto w = energy(FieldState::make(ModelSpec::critical_nlw(),
                                           RadialFunction::sample(gw, [](double r) { return eval_W(r); }),
                                           RadialFunction::zeros(gw)));
    rec.near("|grad W|^2", 2.0 * w.gradient, 16.0 / 3.0, 1e-3);
    rec.near("E(W, 0)", w.total, 4.0 / 3.0, 1e-3);

    for (auto p : {Profile::Q, Profile::W}) {
        const std::string tag = p == Profile::Q ? "Q" : "W";
        rec.at_most(tag + " stationarity residual", stationarity_residual(p, c.grid(0.01, 50.0, 5001)), 1e-6);
        const double coarse = stationarity_residual(p, c.grid(0.5, 50.0, 1981));
        const double fine = stationarity_residual(p, c.grid(0.5, 50.0, 3961));
        rec.near(tag + " residual order", std::log2(coarse / fine), 4.0, 0.6);
    }
}

// 7. Approximate solution.
void criterion_approx(const Context&, Recorder& rec) {
    double b0 = 0.0;
    for (double r : {2.5, 10.0, 150.0, 1e3}) b0 = std::max(b0, std::abs(residual_b(0.0, r)));
    rec.at_most("max |b(0, r)|", b0, 0.0);

    double rel = 0.0;
    for (auto [t, r] : {std::pair{5.0, 20.0}, {2.0, 3.0}, {50.0, 60.0}, {90.0, 199.0}, {0.5, 2.5}}) {
        const double b = residual_b(t, r);
        rel = std::max(rel, std::abs(b - residual_b_fd(t, r)) / std::abs(b));
    }
    rec.at_most("symbolic vs FD residual (relative)", rel, 1e-7);

    const auto scan = scan_b_constant();
    rec.at_most("scanned sup |b| r^4 log^{5/2} r / |t|", scan.constant, 1e6);

    double growth = 0.0;
    for (double rho : {10.0, 1e3, 1e6}) {
        const double closed = 4.0 / 3.0 * (std::log(std::log(rho)) - std::log(std::log(2.0)));
        growth = std::max(growth, std::abs(a1_l2_growth(rho) - closed));
    }
    rec.at_most("a1 L^2 growth vs (4/3) ln ln rho", growth, 1e-6);

    const auto e = nonradiative_check({10.0, 80.0});
    rec.at_least("exterior energy E(10) / E(80)", e[0].energy / e[1].energy, 100.0, true);
}

// 8. Scale extraction, refinement, rigidity.
void criterion_resolution(const Context& c, Recorder& rec) {
    const auto g = c.grid(0.0, 40.0, 8001);
    auto nlw = [](const RadialFunction& u) { return FieldState::make(ModelSpec::critical_nlw(), u, RadialFunction::zeros(u.grid)); };
    auto wm = [](const RadialFunction& u) { return FieldState::make(ModelSpec::wave_map(), u, RadialFunction::zeros(u.grid)); };

    double single = 0.0;
    for (double lam : {0.7, 1.5, 3.0}) {
        const auto l = extract_scales(nlw(eval_bubble_sum({Profile::W, {{1, lam}}}, g)), RadialFunction::zeros(g), Profile::W, 3);
        single = std::max(single, l.size() == 1 ? std::abs(l[0] / lam - 1.0) : HUGE_VAL);
    }
    const auto gq = c.grid(0.0, 400.0, 40001);
    const auto lq = extract_scales(wm(eval_bubble_sum({Profile::Q, {{1, 2.0}}}, gq)), RadialFunction::zeros(gq), Profile::Q, 3);
    single = std::max(single, lq.size() == 1 ? std::abs(lq[0] / 2.0 - 1.0) : HUGE_VAL);
    rec.at_most("single bubble relative error", single, 1e-6);

    const auto g2 = c.grid(0.0, 20.0, 40001);
    const auto s2 = nlw(eval_bubble_sum({Profile::W, {{1, 0.01}, {1, 1.0}}}, g2));
    const auto l2 = extract_scales(s2, RadialFunction::zeros(g2), Profile::W, 4);
    rec.near("two bubbles: J", double(l2.size()), 2.0, 0.0);
    if (l2.size() == 2) {
        const auto fit = fit_multibubble(s2, RadialFunction::zeros(g2), Profile::W, l2);
        const bool ok = fit.J == 2;
        rec.at_most("two bubbles: lambda_1 relative error", ok ? std::abs(fit.entries[0].scale / 0.01 - 1.0) : HUGE_VAL, 0.1);
        rec.at_most("two bubbles: lambda_2 relative error", ok ? std::abs(fit.entries[1].scale - 1.0) : HUGE_VAL, 0.1);
    }

    const double T = 40.0;
    const auto gr = c.grid(0.0, 60.0, 2401);
    const double noise_w = rigidity_noise_floor(Profile::W, gr, 1.0, T);
    const double noise_q = rigidity_noise_floor(Profile::Q, gr, 0.0, T);
    const auto pw = rigidity_probe(nlw(eval_bubble_sum({Profile::W, {{1, 1.0}}}, gr)), 1.0, T);
    const auto pq = rigidity_probe(wm(eval_bubble_sum({Profile::Q, {{1, 1.0}}}, gr)), 0.0, T);
    rec.at_most("stationary W: max eta / noise", std::max(pw.eta_plus, pw.eta_minus) / noise_w, 1.0);
    rec.at_most("stationary Q: max eta / noise", std::max(pq.eta_plus, pq.eta_minus) / noise_q, 1.0);

    BatteryOptions bo;
    bo.lo = 2.0;
    bo.hi = 4.0;
    bo.power = 4;
    const auto battery = random_battery(c.count(10), c.o.seed, bo);
    std::vector<double> rw(battery.size()), rq(battery.size());
    parallel_for(battery.size(), [&](std::size_t k) {
        double mx = 0.0;
        for (std::size_t i = 0; i < gr.n; ++i) mx = std::max(mx, std::abs(battery[k](gr.r(i))));
        const auto pert = RadialFunction::sample(gr, [&](double r) { return 0.3 * battery[k](r) / mx; });
        const auto a = rigidity_probe(nlw(eval_bubble_sum({Profile::W, {{1, 1.0}}}, gr) + pert), 1.0, T);
        const auto b = rigidity_probe(wm(eval_bubble_sum({Profile::Q, {{1, 1.0}}}, gr) + pert), 0.0, T);
        rw[k] = std::max(a.eta_plus, a.eta_minus) / noise_w;
        rq[k] = std::max(b.eta_plus, b.eta_minus) / noise_q;
    });
    rec.worst_at_least("W battery: min eta / noise", rw, 10.0);
    rec.worst_at_least("Q battery: min eta / noise", rq, 10.0);
}

double l2_r3(const RadialFunction& a, const RadialFunction& b) {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(weighted_integral(RadialFunction(a.grid, d), 3));
}

// 9. Solver hygiene.
void criterion_solver(const Context& c, Recorder& rec) {
    const auto g = c.grid(0.0, 30.0, 3001);
    struct Case {
        ModelSpec m;
        std::function<double(double)> u0, u1;
    };
    const std::vector<Case> cases = {
        {ModelSpec::free(4), [](double r) { return gauss(r, 4, 0.8); }, [](double r) { return gauss(r, 5, 0.5); }},
        {ModelSpec::free(6), [](double r) { return gauss(r, 4, 0.8); }, [](double) { return 0.0; }},
        {ModelSpec::critical_nlw(), [](double r) { return 0.3 * gauss(r, 0, 1.5); }, [](double) { return 0.0; }},
        {ModelSpec::gnlw(), [](double r) { return 0.3 * gauss(r, 0, 1.5); }, [](double r) { return 0.1 * gauss(r, 3, 0.5); }},
        {ModelSpec::wave_map(), [](double r) { return 0.8 * gauss(r, 4, 1.0); }, [](double) { return 0.0; }},
        {ModelSpec::wave_map(), [](double r) { return eval_Q(r) + 0.1 * gauss(r, 4, 0.7); }, [](double) { return 0.0; }},
    };
    std::vector<double> drift(cases.size());
    parallel_for(cases.size(), [&](std::size_t k) {
        const auto s = FieldState::make(cases[k].m, RadialFunction::sample(g, cases[k].u0), RadialFunction::sample(g, cases[k].u1));
        const double e0 = energy(s).total;
        drift[k] = std::abs(energy(evolve(s, 10.0).back()).total - e0) / std::abs(e0);
    });
    rec.worst_at_most("relative energy drift over t = 10", drift, 1e-6);

    const auto u0 = RadialFunction::sample(g, [](double r) {
        return r < 5.0 && r > 1.0 ? std::exp(4.0 - 16.0 / ((r - 1.0) * (5.0 - r))) : 0.0;
    });
    const auto s = evolve(FieldState::make(ModelSpec::free(4), u0, RadialFunction::zeros(g)), 10.0).back();
    double leak = 0.0;
    for (std::size_t i = g.index_at_or_above(15.0 + 4 * g.dr); i < g.n; ++i) leak = std::max(leak, std::abs(s.u[i]));
    rec.at_most("leak beyond r = 15 at t = 10", leak, 1e-10);

    const auto v0 = RadialFunction::sample(g, [](double r) { return std::exp(-4.0 * (r - 3.0) * (r - 3.0)); });
    const auto v1 = RadialFunction::sample(g, [](double r) { return std::sin(r) * std::exp(-4.0 * (r - 3.0) * (r - 3.0)); });
    const auto fd = evolve(FieldState::make(ModelSpec::free(4), v0, v1), 10.0).back();
    const auto sp = evolve_linear_spectral(v0, v1, {10.0}).front();
    rec.at_most("FD vs spectral, u", l2_r3(fd.u, sp.u), 1e-4);
    rec.at_most("FD vs spectral, ut", l2_r3(fd.ut, sp.ut), 1e-4);
}

// 10. Wave-map concentration.
void criterion_concentration(const Context& c, Recorder& rec) {
    ConcentrationOptions co;
    co.dr /= c.o.resolution;
    const auto rep = concentration_run(co);
    rec.near("blow-up detected", rep.blowup_detected ? 1.0 : 0.0, 1.0, 0.0);
    rec.near("lambda_1 strictly decreasing", rep.strictly_decreasing ? 1.0 : 0.0, 1.0, 0.0);
    rec.at_least("decades of lambda_1", rep.decades, 1.5);
    rec.at_most("core H-norm error on [0, 5 lambda_1]", rep.core_h_error, 0.1);
}

struct Entry {
    const char* title;
    void (*run)(const Context&, Recorder&);
};

const Entry kCriteria[] = {
    {"quadrature suite", criterion_quadrature},
    {"channel constant 1/4", criterion_quarter},
    {"channel constant 3/20 and 6D", criterion_three_twentieths},
    {"radiation profile", criterion_radiation},
    {"inhomogeneous bounds", criterion_inhomogeneous},
    {"model exactness", criterion_models},
    {"approximate solution", criterion_approx},
    {"soliton resolution tools", criterion_resolution},
    {"solver hygiene", criterion_solver},
    {"wave-map concentration", criterion_concentration},
};

}  // namespace

bool CriterionResult::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

bool CriterionResult::only_known_failures() const {
    if (passed()) return false;
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed || c.known_failure; });
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
    if (id < 1 || id > 10) throw std::invalid_argument("acceptance: criterion id must be 1..10");
    CriterionResult out;
    out.id = id;
    out.title = kCriteria[id - 1].title;
    const auto t0 = Clock::now();
    Recorder rec(out);
    try {
        kCriteria[id - 1].run(Context{opts}, rec);
    } catch (const std::exception& e) {
        out.checks.push_back({std::string("exception: ") + e.what(), 0.0, "", 0.0, 0.0, false});
    }
    out.seconds = seconds_since(t0);
    return out;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<int> ids = opts.only;
    if (ids.empty())
        for (int i = 1; i <= 10; ++i) ids.push_back(i);
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(run_criterion(id, opts));
        if (on_result) on_result(out.back());
    }
    return out;
}

std::string summary_line(const CriterionResult& r) {
    std::ostringstream os;
    os << (r.passed() ? "PASS" : (r.only_known_failures() ? "FAIL (known)" : "FAIL")) << " [" << r.id << "] " << r.title;
    os.precision(1);
    os << std::fixed << " (" << r.seconds << " s)";
    os.unsetf(std::ios::floatfield);
    os.precision(6);
    for (const auto& c : r.checks) {
        if (c.passed) continue;
        os << "; " << c.name;
        if (!c.relation.empty()) {
            os << " = " << c.value << ", need " << c.relation << " " << c.bound;
            if (c.relation == "==") os << " +- " << c.tolerance;
        }
    }
    return os.str();
}

}  // namespace channelwave
