#include "channelwave/approxsol.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "channelwave/exactcalc.hpp"
#include "channelwave/models.hpp"
#include "channelwave/parallel.hpp"

namespace channelwave {
namespace {

const double kA = 2.0 / std::sqrt(3.0);        // t-term coefficient
const double kB = 1.0 / (3.0 * std::sqrt(3.0));  // t^3-term coefficient

const std::array<LogMonomial, 2> kA_terms{{{kA, 1, 2, 0.5}, {-kB, 3, 4, 1.5}}};

void check_domain(double r) {
    if (!(r > 2.0)) throw ApproxError("approxsol: r must exceed 2");
}

void check_cone(double t, double r) {
    if (!(r > std::max(std::abs(t), 2.0))) throw ApproxError("approxsol: need r > max(|t|, 2)");
}

double falling(int k, int d) {
    double f = 1.0;
    for (int i = 0; i < d; ++i) f *= k - i;
    return f;
}

// d_t^dt d_r^dr of a log monomial; dr = -1 selects the 4D radial Laplacian.
double monomial_derivative(const LogMonomial& m, double t, double r, int dt, int dr) {
    if (dt > m.t_power) return 0.0;
    const double tp = m.coef * falling(m.t_power, dt) * std::pow(t, m.t_power - dt);
    const double L = std::log(r), n = m.r_power, b = m.log_power;
    const double l0 = std::pow(L, -b), l1 = l0 / L, l2 = l1 / L;
    switch (dr) {
        case 0: return tp * std::pow(r, -n) * l0;
        case 1: return -tp * std::pow(r, -n - 1) * (n * l0 + b * l1);
        case 2: return tp * std::pow(r, -n - 2) * (n * (n + 1) * l0 + (2 * n + 1) * b * l1 + b * (b + 1) * l2);
        case -1: return tp * std::pow(r, -n - 2) * (n * (n - 2) * l0 + (2 * n - 2) * b * l1 + b * (b + 1) * l2);
        default: throw ApproxError("approxsol: unsupported derivative order");
    }
}

double a_unchecked(double t, double r) {
    return monomial_derivative(kA_terms[0], t, r, 0, 0) + monomial_derivative(kA_terms[1], t, r, 0, 0);
}

// Lambda(U) - U^3 and its U-derivative; series below |U| = 0.5 where the direct form cancels.
std::pair<double, double> lambda_minus_cube(double U) {
    if (std::abs(U) >= 0.5) {
        return {eval_Lambda(U, 0) - U * U * U, eval_Lambda(U, 1) - 3.0 * U * U};
    }
    // sin(sqrt6 U)/sqrt6 = sum_k (-1)^k 6^k U^{2k+1} / (2k+1)!
    double value = 0.0, deriv = 0.0;
    double c = 36.0 / 120.0;  // 6^2 / 5!
    const double U2 = U * U;
    double p = U2 * U2;       // U^4
    for (int k = 2; k < 20; ++k) {
        const double sign = (k % 2 == 0) ? -1.0 : 1.0;
        value += sign * c * p * U;
        deriv += sign * c * (2 * k + 1) * p;
        c *= 6.0 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        p *= U2;
        if (std::abs(c * p) < 1e-20 * std::abs(value)) break;
    }
    return {value, deriv};
}

// 4th-order central differences.
template <class F>
double d1(const F& f, double x, double h) {
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}
template <class F>
double d2(const F& f, double x, double h) {
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

}  // namespace

double LogMonomial::eval(double t, double r) const { return monomial_derivative(*this, t, r, 0, 0); }

double eval_a(double t, double r) {
    check_domain(r);
    return a_unchecked(t, r);
}

double eval_a1(double r) { return eval_a_derivative(0.0, r, 1, 0); }

double eval_a_derivative(double t, double r, int dt, int dr) {
    check_domain(r);
    if (dt < 0 || dt > 3 || dr < 0 || dr > 2) throw ApproxError("approxsol: derivative order out of range");
    double s = 0.0;
    for (const auto& m : kA_terms) s += monomial_derivative(m, t, r, dt, dr);
    return s;
}

double laplacian_a(double t, double r) {
    check_domain(r);
    double s = 0.0;
    for (const auto& m : kA_terms) s += monomial_derivative(m, t, r, 0, -1);
    return s;
}

const std::vector<LogMonomial>& polynomial_residual() {
    static const std::vector<LogMonomial> terms{
        {-2.0 * kA, 1, 4, 1.5},
        {-0.75 * kA, 1, 4, 2.5},
        {9.0 * kB, 3, 6, 2.5},
        {3.75 * kB, 3, 6, 3.5},
        {3.0 * kA * kA * kB, 5, 8, 2.5},
        {-3.0 * kA * kB * kB, 7, 10, 3.5},
        {kB * kB * kB, 9, 12, 4.5},
    };
    return terms;
}

double residual_b(double t, double r) {
    check_cone(t, r);
    double s = 0.0;
    for (const auto& m : polynomial_residual()) s += m.eval(t, r);
    // a^3 - Lambda(r a) / r^3
    return s - lambda_minus_cube(r * a_unchecked(t, r)).first / (r * r * r);
}

double residual_b_dt(double t, double r) {
    check_cone(t, r);
    double s = 0.0;
    for (const auto& m : polynomial_residual()) s += monomial_derivative(m, t, r, 1, 0);
    const double at = eval_a_derivative(t, r, 1, 0);
    return s - lambda_minus_cube(r * a_unchecked(t, r)).second * at / (r * r);
}

double residual_b_fd(double t, double r) {
    check_cone(t, r);
    // a is cubic in t, so the 4th-order t-stencil is exact up to rounding.
    const double att = d2([r](double s) { return a_unchecked(s, r); }, t, 0.5);
    auto f = [t](double x) { return a_unchecked(t, x); };
    auto lap = [&](double h) { return d2(f, r, h) + 3.0 * d1(f, r, h) / r; };
    const double h = 0.1 * r;
    const double L0 = lap(h), L1 = lap(h / 2), L2 = lap(h / 4);
    const double R1 = (16.0 * L1 - L0) / 15.0, R2 = (16.0 * L2 - L1) / 15.0;
    const double lap_a = (64.0 * R2 - R1) / 63.0;
    return att - lap_a - eval_Lambda(r * a_unchecked(t, r), 0) / (r * r * r);
}

CancellationTerms cancellation_terms(double t, double r) {
    check_domain(r);
    const LogMonomial T1{kA, 1, 2, 0.5}, T3{kB, 3, 4, 1.5};
    const double t1 = T1.eval(t, r);
    return {monomial_derivative(T3, t, r, 2, 0) - monomial_derivative(T1, t, r, 0, -1),
            monomial_derivative(T3, t, r, 0, -1) - t1 * t1 * t1};
}

namespace {

template <class G>
ScanResult scan(const ScanOptions& o, const G& g) {
    if (!(o.r_hi <= 1e4)) throw ApproxError("approxsol: scan region capped at r <= 1e4");
    if (o.nt < 1 || o.nr < 2 || !(o.t_lo > 0.0) || o.t_hi < o.t_lo) throw ApproxError("approxsol: bad scan options");
    std::vector<ScanResult> rows(o.nt);
    parallel_for(o.nt, [&](std::size_t i) {
        const double t = o.nt == 1 ? o.t_lo : o.t_lo + (o.t_hi - o.t_lo) * double(i) / double(o.nt - 1);
        const double r0 = std::max(t, 2.0) * (1.0 + 1e-9);
        ScanResult& row = rows[i];
        if (!(o.r_hi > r0)) return;
        for (std::size_t k = 0; k < o.nr; ++k) {
            const double r = r0 * std::pow(o.r_hi / r0, double(k) / double(o.nr - 1));
            const double v = g(t, r);
            if (v > row.constant) row = {v, t, r, row.points};
            ++row.points;
        }
    });
    ScanResult best;
    std::size_t points = 0;
    for (const auto& row : rows) {
        points += row.points;
        if (row.constant > best.constant) best = row;
    }
    best.points = points;
    return best;
}

}  // namespace

ScanResult scan_b_constant(const ScanOptions& opts, bool include_dt) {
    return scan(opts, [include_dt](double t, double r) {
        double v = std::abs(residual_b(t, r));
        if (include_dt) v += std::abs(t * residual_b_dt(t, r));
        return v * std::pow(r, 4) * std::pow(std::log(r), 2.5) / std::abs(t);
    });
}

ScanResult scan_a_constant(const ScanOptions& opts) {
    return scan(opts, [](double t, double r) {
        const double v = std::abs(eval_a(t, r)) + std::abs(t * eval_a_derivative(t, r, 1, 0));
        return v * r * r * std::sqrt(std::log(r)) / std::abs(t);
    });
}

double a1_l2_growth(double rho) {
    if (!(rho > 2.0)) throw ApproxError("approxsol: rho must exceed 2");
    auto f = [](double s) {
        const double r = std::exp(s), a1 = eval_a1(r);
        return a1 * a1 * std::pow(r, 4);
    };
    return integrate_adaptive(f, std::log(2.0), std::log(rho), 1e-13).value;
}

std::vector<ExteriorEnergySample> nonradiative_check(const std::vector<double>& times) {
    std::vector<ExteriorEnergySample> out;
    boost::math::quadrature::exp_sinh<double> es;
    for (double t : times) {
        const double r0 = std::max(std::abs(t), 2.0);
        auto f = [&](double x) {
            const double r = r0 + x;
            if (!(r > 2.0) || !std::isfinite(r * r * r)) return 0.0;
            const double att = eval_a_derivative(t, r, 2, 0), atr = eval_a_derivative(t, r, 1, 1);
            return (att * att + atr * atr) * r * r * r;
        };
        out.push_back({t, es.integrate(f, 1e-12)});
    }
    return out;
}

double exterior_l3l6_norm() {
    boost::math::quadrature::exp_sinh<double> es;
    // |t| <= 1: direct, r > 1 + t.
    auto near = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double v = es.integrate(
            [t](double x) {
                const double r = 1.0 + t + x;
                if (!std::isfinite(r * r * r)) return 0.0;
                const double a = a_unchecked(t, r);
                return std::pow(a, 6) * r * r * r;
            },
            1e-12);
        return std::sqrt(v);
    };
    // |t| >= 1 with t = e^s, r = t x: a = phi(s, x) / t and the t-integrand becomes Phi(s)^{1/2} ds.
    auto Phi = [&](double s) {
        return es.integrate(
            [s](double y) {
                const double x = 1.0 + std::exp(-s) + y, l = s + std::log(x);
                if (!std::isfinite(x * x * x)) return 0.0;
                const double phi = kA / (x * x * std::sqrt(l)) - kB / (std::pow(x, 4) * l * std::sqrt(l));
                return x * x * x * std::pow(phi, 6);
            },
            1e-12);
    };
    const double inner = integrate_adaptive(near, 0.0, 1.0, 1e-10, 12).value;
    const double mid = integrate_adaptive([&](double s) { return std::sqrt(Phi(s)); }, 0.0, 1.0, 1e-10, 12).value;
    // s = 1 / v^2 on [1, inf).
    const double tail = integrate_adaptive(
                            [&](double v) {
                                const double s = 1.0 / (v * v);
                                return 2.0 * std::sqrt(Phi(s) * s * s * s);
                            },
                            0.0, 1.0, 1e-10, 12)
                            .value;
    return std::cbrt(2.0 * (inner + mid + tail));
}

}  // namespace channelwave
