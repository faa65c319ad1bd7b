#include "channelwave/exactcalc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/interpolators/cardinal_quintic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

namespace channelwave {

using std::numbers::pi;

namespace {

constexpr unsigned kPoints = 31;
const double kGPrefactor = 1.0 / (4.0 * std::numbers::sqrt2 * pi * pi);

// Uniform quintic spline of a sampled radial function. The spline rings for a few knots past the
// last nonzero sample, so integrals run over the sample support widened by kMargin cells.
class SmoothRadial {
public:
    static constexpr std::size_t kMargin = 40;

    explicit SmoothRadial(const RadialFunction& f)
        : r0_(f.grid.r_min), dr_(f.grid.dr), spline_(f.values, f.grid.r_min, f.grid.dr, {0.0, 0.0}, {0.0, 0.0}) {
        const double peak = max_abs(f);
        std::size_t first = f.grid.n, last = 0;
        for (std::size_t i = 0; i < f.grid.n; ++i) {
            if (std::abs(f.values[i]) > 1e-12 * peak) {
                first = std::min(first, i);
                last = i;
            }
        }
        zero_ = first == f.grid.n;
        if (!zero_) {
            first_ = first;
            last_ = last;
            touches_hi_ = last + 1 >= f.grid.n;
            lo_ = first > kMargin ? first - kMargin : 0;
            hi_ = std::min(last + kMargin, f.grid.n - 1);
        }
    }
    double operator()(double r) const { return inside(r) ? spline_(r) : 0.0; }
    double prime(double r) const { return inside(r) ? spline_.prime(r) : 0.0; }
    double double_prime(double r) const { return inside(r) ? spline_.double_prime(r) : 0.0; }
    bool zero() const { return zero_; }
    bool touches_hi() const { return touches_hi_; }
    std::size_t first_nonzero() const { return first_; }
    double support_lo() const { return knot(lo_); }
    double support_hi() const { return knot(hi_); }
    double sample_hi() const { return knot(last_); }

    // int_a^b g over [a, b] clipped to the widened support, one Gauss-Kronrod rule per spline cell.
    template <class G>
    QuadratureResult integrate(G g, double a, double b, double tol) const {
        QuadratureResult q;
        a = std::max(a, support_lo());
        b = std::min(b, support_hi());
        for (std::size_t i = lo_; i < hi_; ++i) {
            const double x0 = std::max(a, knot(i)), x1 = std::min(b, knot(i + 1));
            if (!(x1 > x0)) continue;
            const auto c = integrate_adaptive(g, x0, x1, tol, 6);
            q.value += c.value;
            q.error_estimate += c.error_estimate;
            q.subdivisions += c.subdivisions;
            q.converged = q.converged && c.converged;
        }
        return q;
    }

    // Gauss-Legendre nodes and weights, kGauss per spline cell, over [a, b] clipped to the widened support.
    std::vector<std::pair<double, double>> nodes(double a, double b) const {
        static constexpr unsigned kGauss = 20;
        using GL = boost::math::quadrature::gauss<double, kGauss>;
        std::vector<std::pair<double, double>> out;
        a = std::max(a, support_lo());
        b = std::min(b, support_hi());
        for (std::size_t i = lo_; i < hi_; ++i) {
            const double x0 = std::max(a, knot(i)), x1 = std::min(b, knot(i + 1));
            if (!(x1 > x0)) continue;
            const double c = 0.5 * (x0 + x1), h = 0.5 * (x1 - x0);
            for (std::size_t k = 0; k < GL::abscissa().size(); ++k) {
                const double x = GL::abscissa()[k], w = GL::weights()[k];
                out.emplace_back(c + h * x, h * w);
                if (x != 0.0) out.emplace_back(c - h * x, h * w);
            }
        }
        return out;
    }

private:
    double knot(std::size_t i) const { return r0_ + dr_ * static_cast<double>(i); }
    bool inside(double r) const { return !zero_ && r >= support_lo() && r <= support_hi(); }
    double r0_, dr_;
    boost::math::interpolators::cardinal_quintic_b_spline<double> spline_;
    bool zero_ = true;
    bool touches_hi_ = false;
    std::size_t first_ = 0, last_ = 0, lo_ = 0, hi_ = 0;
};

// Checks supp v0 inside (1, A).
SmoothRadial annulus_data(const RadialFunction& v0, const char* who) {
    SmoothRadial s(v0);
    if (s.zero()) return s;
    for (std::size_t i = 0; i < v0.grid.n && v0.grid.r(i) <= 1.0; ++i)
        if (std::abs(v0.values[i]) > 1e-12 * max_abs(v0))
            throw ExactCalcError(std::string(who) + ": v0 must vanish on r <= 1");
    if (s.touches_hi()) throw ExactCalcError(std::string(who) + ": v0 must vanish at the end of its grid");
    return s;
}

// Inner integral int_0^{psi_max} g(psi) sin^2 psi / (rho cos psi - eta)^{1/2} d psi with
// psi = psi_max (1 - s^2) removing the square-root endpoint.
template <class G>
double half_space_angle_integral(double rho, double eta, G g) {
    const double psi_max = std::acos(std::clamp(eta / rho, -1.0, 1.0));
    auto f = [&](double s) {
        const double psi = psi_max * (1.0 - s * s);
        // rho (cos psi - cos psi_max), written without cancellation.
        const double gap = 2.0 * rho * std::sin(0.5 * (psi_max + psi)) * std::sin(0.5 * psi_max * s * s);
        if (gap <= 0.0) return 0.0;
        const double sn = std::sin(psi);
        return g(psi) * sn * sn / std::sqrt(gap) * 2.0 * psi_max * s;
    };
    return integrate_adaptive(f, 0.0, 1.0, 1e-12).value;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                                    unsigned max_depth) {
    QuadratureResult q;
    if (a == b) return q;
    std::size_t evals = 0;
    auto counted = [&](double x) {
        ++evals;
        return f(x);
    };
    double err = 0.0, l1 = 0.0;
    q.value = boost::math::quadrature::gauss_kronrod<double, kPoints>::integrate(counted, a, b, max_depth, tol, &err,
                                                                               &l1);
    q.error_estimate = std::abs(err);
    const std::size_t segments = evals / kPoints;
    q.subdivisions = static_cast<int>((segments + 1) / 2);
    q.converged = std::isfinite(q.value) && q.error_estimate <= 2.0 * tol * std::max(std::abs(q.value), l1);
    if (q.value == 0.0 && q.error_estimate == 0.0) q.converged = true;
    return q;
}

double eval_K(double zeta, double r) { return std::sqrt(r * (1.0 + zeta) + 1.0 - zeta); }

double eval_Z(double zeta, double r) {
    const double K = eval_K(zeta, r);
    const double p = 1.0 + zeta, m = 1.0 - zeta, q = 1.0 - 3.0 * zeta;
    const double bracket = -3.0 * r * r * p * p * (1.0 + 3.0 * zeta) + 5.0 * r * p * m * q + 2.0 * m * m * q;
    return 0.25 * bracket / std::pow(K, 5);
}

std::array<double, 4> z_bracket_coefficients(double zeta) {
    using Poly = std::array<double, 4>;
    auto mul = [](const Poly& a, const Poly& b) {
        Poly c{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; i + j < 4; ++j) c[i + j] += a[i] * b[j];
        return c;
    };
    auto axpy = [](Poly& acc, double s, const Poly& a) {
        for (int i = 0; i < 4; ++i) acc[i] += s * a[i];
    };
    const double p = 1.0 + zeta;
    const Poly K2{1.0 - zeta, p, 0.0, 0.0};
    const Poly K4 = mul(K2, K2);
    const Poly K6 = mul(K4, K2);
    Poly out = K6;
    axpy(out, -0.5 * p, mul({1.0, 1.0, 0.0, 0.0}, K4));
    axpy(out, -0.25 * p * p, mul({0.0, 1.0, 5.0, 0.0}, K2));
    axpy(out, 0.75 * p * p * p, {0.0, 0.0, -1.0, 1.0});
    return out;
}

QuadratureResult eval_h(double r) {
    if (!(r > 1.0)) throw ExactCalcError("eval_h: r must exceed 1");
    // zeta = sin^2 theta: (1 - zeta)^{1/2} zeta^{-1/2} d zeta = 2 cos^2 theta d theta.
    auto f = [r](double th) {
        const double c = std::cos(th), s = std::sin(th);
        return 2.0 * c * c * eval_K(s * s, r);
    };
    auto q = integrate_adaptive(f, 0.0, 0.5 * pi, 1e-13);
    const double pre = 4.0 * pi * (1.0 / r - 1.0 / (r * r));
    q.value *= pre;
    q.error_estimate *= pre;
    return q;
}

QuadratureResult eval_h_direct(double r) {
    if (!(r > 1.0)) throw ExactCalcError("eval_h_direct: r must exceed 1");
    boost::math::quadrature::tanh_sinh<double> ts;
    // Second argument: -(z - 1) on the left half, r - z on the right half.
    auto f = [r](double z, double zc) {
        const double zm1 = zc < 0.0 ? -zc : z - 1.0;
        const double rmz = zc > 0.0 ? zc : r - z;
        if (zm1 <= 0.0 || rmz <= 0.0) return 0.0;
        return std::sqrt(rmz * (r + z) / zm1);
    };
    QuadratureResult q;
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    q.value = ts.integrate(f, 1.0, r, 1e-12, &err, &l1, &levels);
    const double pre = 4.0 * pi / (r * r);
    q.value *= pre;
    q.error_estimate = std::abs(err) * pre;
    q.subdivisions = static_cast<int>(levels);
    q.converged = q.error_estimate <= 1e-9 * std::max(1.0, std::abs(q.value));
    return q;
}

QuadratureResult eval_H(double r, HRoute route) {
    if (!(r > 1.0)) throw ExactCalcError("eval_H: r must exceed 1");
    if (route == HRoute::ZForm) {
        auto f = [r](double th) {
            const double c = std::cos(th), s = std::sin(th);
            return 2.0 * c * c * eval_Z(s * s, r);
        };
        auto q = integrate_adaptive(f, 0.0, 0.5 * pi, 1e-13);
        const double pre = 2.0 * pi / std::sqrt(r);
        q.value *= pre;
        q.error_estimate *= pre;
        return q;
    }
    const double d = 0.01 * r;
    if (r - 3.0 * d <= 1.0) throw ExactCalcError("eval_H: r too close to 1 for the derivative stencil");
    QuadratureResult q;
    double err = 0.0;
    auto stencil = [&](double step) {
        double h[7];
        for (int k = -3; k <= 3; ++k) {
            const auto hk = eval_h(r + k * step);
            h[k + 3] = hk.value;
            err = std::max(err, hk.error_estimate);
            q.subdivisions += hk.subdivisions;
            q.converged = q.converged && hk.converged;
        }
        const double h1 = (h[1] - 8.0 * h[2] + 8.0 * h[4] - h[5]) / (12.0 * step);
        const double h2 = (-h[1] + 16.0 * h[2] - 30.0 * h[3] + 16.0 * h[4] - h[5]) / (12.0 * step * step);
        const double h3 = (h[0] - 8.0 * h[1] + 13.0 * h[2] - 13.0 * h[4] + 8.0 * h[5] - h[6]) / (8.0 * step * step * step);
        // r (r^{-1/2} (r^3 h')')' = r^{-1/2} (9/2 r^2 h' + 11/2 r^3 h'' + r^4 h''').
        return (4.5 * r * r * h1 + 5.5 * r * r * r * h2 + r * r * r * r * h3) / std::sqrt(r);
    };
    const double coarse = stencil(d), fine = stencil(0.5 * d);
    // Richardson step on the O(d^4) stencil error.
    q.value = (16.0 * fine - coarse) / 15.0;
    q.error_estimate = std::abs(fine - coarse) / 15.0 + err * std::pow(r, 3.5) / std::pow(0.5 * d, 3);
    return q;
}

double chain_bound() { return 3597.0 / (400.0 * std::pow(pi, 4)); }

namespace {

// (1 / (32 pi^4)) int_T^inf 144 (r^-1 + r^-2 + r^-3)^2 log r dr.
double I_tail_majorant(double T) {
    const double c[] = {1.0, 2.0, 3.0, 2.0, 1.0};
    const double L = std::log(T);
    double s = 0.0;
    for (int k = 2; k <= 6; ++k) {
        const double m = k - 1.0;
        s += c[k - 2] * std::pow(T, -m) * (L / m + 1.0 / (m * m));
    }
    return 144.0 * s / (32.0 * std::pow(pi, 4));
}

}  // namespace

IResult compute_I(int pieces_per_unit, double tol, double tail_tol) {
    if (pieces_per_unit < 1) throw ExactCalcError("compute_I: pieces_per_unit must be positive");
    IResult out;
    out.chain_bound = chain_bound();
    double lo = 1.0, hi = 2.0;
    while (I_tail_majorant(hi) > tail_tol) hi *= 2.0;
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-6; ++it) {
        const double mid = std::sqrt(lo * hi);
        (I_tail_majorant(mid) > tail_tol ? lo : hi) = mid;
    }
    out.truncation_radius = hi;
    out.tail_bound = I_tail_majorant(hi);

    const double S = std::log(hi);
    const int pieces = static_cast<int>(std::ceil(S)) * pieces_per_unit;
    const double w = S / pieces;
    auto f = [](double s) {
        const double r = std::exp(s);
        if (r <= 1.0) return 0.0;
        const double H = eval_H(r).value;
        return H * H * s * r;
    };
    const double norm = 1.0 / (32.0 * std::pow(pi, 4));
    QuadratureResult& I = out.I;
    for (int k = 0; k < pieces; ++k) {
        const auto q = integrate_adaptive(f, k * w, (k + 1) * w, tol);
        I.value += norm * q.value;
        I.error_estimate += norm * q.error_estimate;
        I.subdivisions += q.subdivisions;
        I.converged = I.converged && q.converged;
    }
    I.error_estimate += out.tail_bound;
    return out;
}

ABC compute_abc() {
    ABC out;
    // zeta = x^2 then x = sin phi.
    auto quad = [](double pre, auto g) {
        auto q = integrate_adaptive(g, 0.0, 0.5 * pi, 1e-14);
        q.value *= pre;
        q.error_estimate *= pre;
        return q;
    };
    out.a = quad(3.0 * pi, [](double ph) {
        const double s = std::sin(ph), c = std::cos(ph);
        return c * c * (1.0 + 3.0 * s * s) / std::sqrt(1.0 + s * s);
    });
    out.b = quad(5.0 * pi, [](double ph) {
        const double s = std::sin(ph), c = std::cos(ph);
        return c * c * c * c / std::sqrt(1.0 + s * s);
    });
    out.c = quad(2.0 * pi, [](double ph) {
        const double s = std::sin(ph), c = std::cos(ph);
        return std::pow(c, 6) / std::pow(1.0 + s * s, 1.5);
    });
    out.a_majorant = 3.0 * pi * std::sqrt(0.25 * pi * (1.0 + 5.0 / 3.0 + 3.0 / 5.0 - 9.0 / 7.0));
    out.b_majorant = 5.0 * pi * std::sqrt(pi / 7.0);
    out.b_majorant_direct = 5.0 * pi * std::sqrt(0.25 * pi * 16.0 / 35.0);
    out.c_bound = 2.0 * pi;
    return out;
}

double G_eta(const RadialFunction& v0, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ExactCalcError("G_eta: eta must lie in [0, 1]");
    const auto v = annulus_data(v0, "G_eta");
    if (v.zero()) return 0.0;
    // (rho^3 v0')' = 3 rho^2 v0' + rho^3 v0''.
    auto lap = [&](double rho) { return 3.0 * rho * rho * v.prime(rho) + rho * rho * rho * v.double_prime(rho); };
    const double a = std::max(eta, v.support_lo()), b = v.support_hi();
    if (eta == 0.0) {
        // eta^{-1/2} h(rho / eta) -> 4 pi J rho^{-1/2}, J = int (1-zeta)^{1/2} zeta^{-1/2} (1+zeta)^{1/2}.
        const double J = integrate_adaptive(
                             [](double th) {
                                 const double c = std::cos(th), s = std::sin(th);
                                 return 2.0 * c * c * std::sqrt(1.0 + s * s);
                             },
                             0.0, 0.5 * pi, 1e-14)
                             .value;
        return kGPrefactor * 4.0 * pi * J * v.integrate([&](double rho) { return lap(rho) / std::sqrt(rho); }, a, b, 1e-12).value;
    }
    auto f = [&](double rho) { return rho > eta ? lap(rho) * eval_h(rho / eta).value : 0.0; };
    return kGPrefactor / std::sqrt(eta) * v.integrate(f, a, b, 1e-12).value;
}

double G_eta_direct(const RadialFunction& v0, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw ExactCalcError("G_eta_direct: eta must lie in [0, 1]");
    const auto v = annulus_data(v0, "G_eta_direct");
    if (v.zero()) return 0.0;
    // d^2_{x1} v0 = v0'' cos^2 psi + v0' sin^2 psi / rho.
    auto f = [&](double rho) {
        if (rho <= eta) return 0.0;
        const double d1 = v.prime(rho), d2 = v.double_prime(rho);
        const double inner = half_space_angle_integral(rho, eta, [&](double psi) {
            const double c = std::cos(psi), s = std::sin(psi);
            return d2 * c * c + d1 * s * s / rho;
        });
        return 4.0 * pi * rho * rho * rho * inner;
    };
    return kGPrefactor * v.integrate(f, eta, v.support_hi(), 1e-12).value;
}

double G_eta_prime(const RadialFunction& v0, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw ExactCalcError("G_eta_prime: eta must lie in (0, 1]");
    const auto v = annulus_data(v0, "G_eta_prime");
    if (v.zero()) return 0.0;
    auto f = [&](double rho) { return rho > eta ? std::sqrt(rho) * v(rho) * eval_H(rho / eta).value : 0.0; };
    return -kGPrefactor / eta * v.integrate(f, eta, v.support_hi(), 1e-12).value;
}

QuadratureResult G_prime_l2_sq(const RadialFunction& v0) {
    const auto v = annulus_data(v0, "G_prime_l2_sq");
    if (v.zero()) return {};
    return integrate_adaptive(
        [&](double eta) {
            const double g = G_eta_prime(v0, eta);
            return g * g;
        },
        0.0, 1.0, 1e-8, 12);
}

double omega_operator(const RadialFunction& f, double t) {
    const SmoothRadial s(f);
    if (s.zero()) return 0.0;
    if (s.touches_hi()) throw ExactCalcError("omega_operator: f must vanish at the end of its grid");
    if (!(t >= s.sample_hi())) throw ExactCalcError("omega_operator: t must reach the support of f");
    // t^2 - |x - t e1|^2 = rho (2 t cos psi - rho) = 2 t (rho cos psi - rho^2 / (2t)).
    auto g = [&](double rho) {
        if (rho <= 0.0 || rho >= 2.0 * t) return 0.0;
        const double inner = half_space_angle_integral(rho, rho * rho / (2.0 * t), [](double) { return 1.0; });
        return 4.0 * pi * rho * rho * rho * s(rho) * inner / std::sqrt(2.0 * t);
    };
    return s.integrate(g, 0.0, 2.0 * t, 1e-12).value;
}

double omega_limit(const RadialFunction& f) {
    const SmoothRadial s(f);
    if (s.zero()) return 0.0;
    // int_0^{pi/2} sin^2 psi cos^{-1/2} psi d psi = B(3/2, 1/4) / 2.
    const double angular = 0.5 * boost::math::beta(1.5, 0.25);
    const double radial = s.integrate([&](double rho) { return std::pow(rho, 2.5) * s(rho); }, 0.0, s.support_hi(), 1e-13).value;
    return 4.0 * pi * angular * radial;
}

double FourierTerms::exterior_limit() const { return (2.0 / pi) * (A1 + A2 + A3) / std::pow(2.0 * pi, 4); }

FourierTerms fourier_exterior_terms(const std::function<double(double)>& u0hat, double rho_lo, double rho_hi) {
    if (!(rho_lo > 0.0 && rho_hi > rho_lo)) throw ExactCalcError("fourier_exterior_terms: need 0 < rho_lo < rho_hi");
    FourierTerms out;
    out.weighted_norm =
        integrate_adaptive([&](double p) { return u0hat(p) * u0hat(p) * std::pow(p, 5); }, rho_lo, rho_hi, 1e-12)
            .value;
    out.A1 = 0.25 * pi * out.weighted_norm;
    out.A2 = -0.125 * pi * out.weighted_norm;
    auto g = [&](double p) { return u0hat(p) * std::pow(p, 2.5); };
    auto outer = [&](double p1) {
        const double g1 = g(p1);
        if (g1 == 0.0) return 0.0;
        return g1 * integrate_adaptive([&](double p2) { return g(p2) / (p1 + p2); }, rho_lo, rho_hi, 1e-11).value;
    };
    out.A3 = 0.125 * integrate_adaptive(outer, rho_lo, rho_hi, 1e-10).value;
    return out;
}

FourierTerms fourier_exterior_terms(const RadialFunction& u0hat) {
    const SmoothRadial s(u0hat);
    if (s.zero()) return {};
    if (s.touches_hi()) throw ExactCalcError("fourier_exterior_terms: u0hat must vanish at the end of its grid");
    const double first = u0hat.grid.r(s.first_nonzero());
    if (s.first_nonzero() == 0 || !(first > 0.0))
        throw ExactCalcError("fourier_exterior_terms: u0hat must vanish near rho = 0");
    const double lo = std::max(s.support_lo(), 0.5 * first), hi = s.support_hi();
    FourierTerms out;
    out.weighted_norm = s.integrate([&](double p) { return s(p) * s(p) * std::pow(p, 5); }, lo, hi, 1e-13).value;
    out.A1 = 0.25 * pi * out.weighted_norm;
    out.A2 = -0.125 * pi * out.weighted_norm;
    // Tensor Gauss rule; the kernel 1 / (p1 + p2) is smooth on the annulus.
    const auto nodes = s.nodes(lo, hi);
    std::vector<double> g(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        g[i] = nodes[i].second * s(nodes[i].first) * std::pow(nodes[i].first, 2.5);
    double a3 = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (g[i] == 0.0) continue;
        double row = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) row += g[j] / (nodes[i].first + nodes[j].first);
        a3 += g[i] * row;
    }
    out.A3 = 0.125 * a3;
    return out;
}

LaplaceLogCheck laplace_log_check(double alpha, double beta, double r) {
    if (!(r > 2.0)) throw ExactCalcError("laplace_log_check: r must exceed 2");
    const double L = std::log(r);
    LaplaceLogCheck c;
    c.closed_form = std::pow(r, -alpha - 2.0) *
                    (alpha * (alpha - 2.0) * std::pow(L, -beta) + (2.0 * alpha - 2.0) * beta * std::pow(L, -beta - 1.0) +
                     beta * (beta + 1.0) * std::pow(L, -beta - 2.0));
    auto f = [&](double x) { return std::pow(x, -alpha) * std::pow(std::log(x), -beta); };
    const double d = 0.01 * r;
    const double fm2 = f(r - 2 * d), fm1 = f(r - d), f0 = f(r), fp1 = f(r + d), fp2 = f(r + 2 * d);
    const double d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * d);
    const double d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * d * d);
    c.numeric = d2 + 3.0 * d1 / r;
    c.gap = std::abs(c.numeric - c.closed_form);
    return c;
}

OperatorRatios appendix_c_operator_ratios(const SpaceTimeField& field, double R, double lambda, std::size_t n) {
    if (!(R >= 0.0)) throw ExactCalcError("appendix_c_operator_ratios: R must be nonnegative");
    if (!(lambda * R > 1.0)) throw ExactCalcError("appendix_c_operator_ratios: need lambda R > 1");
    if (!(field.r_extent > R)) return {};
    if (n < 11) n = 11;
    if (n % 2 == 0) ++n;

    // t in [-(r_ext - R), r_ext - R] with t = 0 on the grid; r in [R, r_ext].
    const double tmax = field.r_extent - R;
    const double dt = 2.0 * tmax / static_cast<double>(n - 1);
    const double dr = (field.r_extent - R) / static_cast<double>(n - 1);
    const std::size_t mid = (n - 1) / 2;
    auto tt = [&](std::size_t i) { return -tmax + dt * static_cast<double>(i); };
    auto rr = [&](std::size_t j) { return R + dr * static_cast<double>(j); };
    auto inside = [&](double t, double r) { return r > R + std::abs(t); };

    std::vector<double> w(n * n, 0.0), cum(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (inside(tt(i), rr(j)) && std::abs(tt(i)) <= field.t_extent) w[i * n + j] = field.w(tt(i), rr(j));
    // cum(t, r) = int_0^t w(tau, r) d tau by the trapezoid rule.
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = mid + 1; i < n; ++i)
            cum[i * n + j] = cum[(i - 1) * n + j] + 0.5 * dt * (w[(i - 1) * n + j] + w[i * n + j]);
        for (std::size_t i = mid; i-- > 0;)
            cum[i * n + j] = cum[(i + 1) * n + j] - 0.5 * dt * (w[(i + 1) * n + j] + w[i * n + j]);
    }

    // ||g||_{L^p L^q (R)} with the r^3 dr measure.
    auto mixed = [&](auto&& g, double p, double q) {
        std::vector<double> outer(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> y(n, 0.0);
            for (std::size_t j = 0; j < n; ++j)
                if (inside(tt(i), rr(j))) y[j] = std::pow(std::abs(g(i, j)), q) * std::pow(rr(j), 3);
            const double inner = integrate_samples(y, dr, 0, n - 1);
            outer[i] = std::pow(std::max(inner, 0.0), p / q);
        }
        return std::pow(integrate_samples(outer, dt, 0, n - 1), 1.0 / p);
    };
    auto wv = [&](std::size_t i, std::size_t j) { return w[i * n + j]; };
    auto Aw = [&](std::size_t i, std::size_t j) { return cum[i * n + j] / (rr(j) * rr(j)); };
    auto Bw = [&](std::size_t i, std::size_t j) {
        const double r = rr(j);
        return tt(i) * cum[i * n + j] / (std::pow(r, 4) * std::sqrt(std::log(lambda * r)));
    };

    OperatorRatios out;
    const double w28 = mixed(wv, 2.0, 8.0), w36 = mixed(wv, 3.0, 6.0);
    if (w28 > 0.0) out.ratio_A = mixed(Aw, 2.0, 8.0 / 3.0) / w28;
    if (w36 > 0.0) out.ratio_B = mixed(Bw, 1.0, 2.0) * std::cbrt(std::log(lambda * R)) / w36;
    return out;
}

}  // namespace channelwave
