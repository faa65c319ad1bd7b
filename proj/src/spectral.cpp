#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/bernoulli.hpp>
#include <boost/math/special_functions/detail/bessel_j0.hpp>
#include <boost/math/special_functions/detail/bessel_j1.hpp>
#include <cmath>
#include <numbers>

#include "channelwave/evolve.hpp"

namespace channelwave {

namespace {

// J_nu(x)/x^nu by its power series; used for x < 2.
double kernel_series(int nu, double x) {
    const double q = 0.25 * x * x;
    double fact = 1.0;
    for (int k = 2; k <= nu; ++k) fact *= k;
    double term = 1.0 / (fact * std::pow(2.0, nu));
    double s = term;
    for (int k = 1; k < 40; ++k) {
        term *= -q / (k * static_cast<double>(k + nu));
        s += term;
        if (std::abs(term) < 1e-17 * std::abs(s)) break;
    }
    return s;
}

void kernel_pair(int nu, double x, double& K, double& Kp) {
    if (x < 2.0) {
        K = kernel_series(nu, x);
        Kp = -x * kernel_series(nu + 1, x);
        return;
    }
    const double j0 = boost::math::detail::bessel_j0(x);
    const double j1 = boost::math::detail::bessel_j1(x);
    const double inv = 1.0 / x;
    switch (nu) {
        case 0:
            K = j0;
            Kp = -j1;
            return;
        case 1: {
            const double j2 = 2.0 * j1 * inv - j0;
            K = j1 * inv;
            Kp = -j2 * inv;
            return;
        }
        default: {
            const double j2 = 2.0 * j1 * inv - j0;
            const double j3 = 4.0 * j2 * inv - j1;
            K = j2 * inv * inv;
            Kp = -j3 * inv * inv;
            return;
        }
    }
}

int order_for(int d) {
    if (d != 2 && d != 4 && d != 6) throw SpectralError("spectral: dimension must be 2, 4 or 6");
    return d / 2 - 1;
}

struct Panelization {
    std::vector<double> x, w;
};

// Composite 16-point Gauss-Legendre; each panel spans at most 1.5 periods of exp(i X rho).
Panelization panels(double lo, double hi, double X) {
    using GL = boost::math::quadrature::gauss<double, 16>;
    const auto& a = GL::abscissa();
    const auto& wt = GL::weights();
    const double width = 3.0 * std::numbers::pi / std::max(X, 1.0);
    const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
    const double h = (hi - lo) / static_cast<double>(count);
    Panelization p;
    p.x.reserve(count * 16);
    p.w.reserve(count * 16);
    for (std::size_t k = 0; k < count; ++k) {
        const double mid = lo + (static_cast<double>(k) + 0.5) * h;
        for (std::size_t j = 0; j < a.size(); ++j) {
            p.x.push_back(mid - 0.5 * h * a[j]);
            p.w.push_back(0.5 * h * wt[j]);
            p.x.push_back(mid + 0.5 * h * a[j]);
            p.w.push_back(0.5 * h * wt[j]);
        }
    }
    // Order nodes by frequency so tails can be accumulated from the top.
    std::vector<std::size_t> idx(p.x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return p.x[i] < p.x[j]; });
    Panelization sorted;
    for (auto i : idx) {
        sorted.x.push_back(p.x[i]);
        sorted.w.push_back(p.w[i]);
    }
    return sorted;
}

struct Support {
    std::size_t i0 = 0, i1 = 0;
    bool empty = true;
};

Support nonzero_range(const RadialFunction& a, const RadialFunction& b) {
    Support s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] != 0.0 || b[i] != 0.0) {
            if (s.empty) s.i0 = i;
            s.i1 = i;
            s.empty = false;
        }
    }
    return s;
}

// Trapezoid rule with sixth-order Gregory end corrections.
double gregory_weight(std::size_t i, std::size_t n) {
    static constexpr double w[5] = {95.0 / 288.0, 317.0 / 240.0, 23.0 / 30.0, 793.0 / 720.0, 157.0 / 160.0};
    if (i < 5) return w[i];
    if (n - 1 - i < 5) return w[n - 1 - i];
    return 1.0;
}

// Even Taylor coefficients u(r) = sum a_j r^{2j}, j <= 3, fitted through the first samples.
std::array<double, 4> even_taylor(const RadialFunction& f) {
    const double h2 = f.grid.dr * f.grid.dr;
    Eigen::Matrix3d A;
    Eigen::Vector3d b;
    for (int k = 1; k <= 3; ++k) {
        const double x = k * k * h2;
        A(k - 1, 0) = x;
        A(k - 1, 1) = x * x;
        A(k - 1, 2) = x * x * x;
        b(k - 1) = f[static_cast<std::size_t>(k)] - f[0];
    }
    const Eigen::Vector3d a = A.fullPivLu().solve(b);
    return {f[0], a(0), a(1), a(2)};
}

// For grids starting at the origin the integrand r^{d-1} u K is odd, so the trapezoid rule has
// Euler-Maclaurin errors c_j h^{2j+d} B_{2j+d}/(2j+d) from every even Taylor coefficient c_j of u K.
double origin_correction(const std::array<double, 4>& a, int d, double h, double rho) {
    const int nu = d / 2 - 1;
    double fact_nu = 1.0;
    for (int k = 2; k <= nu; ++k) fact_nu *= k;
    double total = 0.0;
    double kj = 1.0 / (fact_nu * std::pow(2.0, nu));  // kernel coefficient of x^{2j}
    double rho2j = 1.0;
    std::array<double, 24> kern{};
    for (int j = 0; j < 24; ++j) {
        kern[static_cast<std::size_t>(j)] = kj * rho2j;
        kj *= -1.0 / (4.0 * (j + 1) * (j + 1 + nu));
        rho2j *= rho * rho;
    }
    for (int j = 0; j < 24; ++j) {
        double c = 0.0;
        for (int i = 0; i <= std::min(j, 3); ++i) c += a[static_cast<std::size_t>(i)] * kern[static_cast<std::size_t>(j - i)];
        const int m = 2 * j + d;
        const double term = c * std::pow(h, m) * boost::math::bernoulli_b2n<double>(m / 2) / m;
        total += term;
        if (j > 4 && std::abs(term) < 1e-18 * (std::abs(total) + 1e-300)) break;
    }
    return total;
}

void forward_transform(const RadialFunction& f0, const RadialFunction& f1, const Support& sp, int d,
                       const std::vector<double>& rho, std::vector<double>& F0, std::vector<double>& F1) {
    const int nu = order_for(d);
    const auto& g = f0.grid;
    F0.assign(rho.size(), 0.0);
    F1.assign(rho.size(), 0.0);
    if (sp.empty) return;
    const bool origin = g.r_min == 0.0 && sp.i0 < 4;
    std::vector<double> a, b, r;
    for (std::size_t i = sp.i0; i <= sp.i1; ++i) {
        const double ri = g.r(i);
        double w = gregory_weight(i, g.n);
        if (origin && i < 5) w = i == 0 ? 0.5 : 1.0;
        w *= g.dr * std::pow(ri, d - 1);
        a.push_back(w * f0[i]);
        b.push_back(w * f1[i]);
        r.push_back(ri);
    }
    std::array<double, 4> ta{}, tb{};
    if (origin) {
        ta = even_taylor(f0);
        tb = even_taylor(f1);
    }
    for (std::size_t j = 0; j < rho.size(); ++j) {
        double s0 = 0.0, s1 = 0.0, K, Kp;
        for (std::size_t i = 0; i < r.size(); ++i) {
            kernel_pair(nu, r[i] * rho[j], K, Kp);
            s0 += a[i] * K;
            s1 += b[i] * K;
        }
        if (origin) {
            s0 += origin_correction(ta, d, g.dr, rho[j]);
            s1 += origin_correction(tb, d, g.dr, rho[j]);
        }
        F0[j] = s0;
        F1[j] = s1;
    }
}

}  // namespace

double radial_kernel(int d, double x) {
    double K, Kp;
    kernel_pair(order_for(d), std::abs(x), K, Kp);
    return K;
}

double radial_kernel_prime(int d, double x) {
    double K, Kp;
    kernel_pair(order_for(d), std::abs(x), K, Kp);
    return x < 0 ? -Kp : Kp;
}

double radial_transform(const RadialFunction& f, double rho, int d) {
    std::vector<double> F0, F1;
    forward_transform(f, RadialFunction::zeros(f.grid), nonzero_range(f, RadialFunction::zeros(f.grid)), d, {rho},
                      F0, F1);
    return F0[0];
}

double support_extent(const RadialFunction& f, double rel_tol) {
    const double m = max_abs(f);
    if (m == 0.0) return f.grid.r_min;
    for (std::size_t i = f.size(); i-- > 0;)
        if (std::abs(f[i]) > rel_tol * m) return f.r(i);
    return f.grid.r_min;
}

SpectralWave::SpectralWave(const RadialFunction& u0, const RadialFunction& u1, int d, double horizon,
                           const SpectralOptions& opt)
    : d_(d), horizon_(horizon) {
    order_for(d);
    if (!u0.grid.same_as(u1.grid)) throw SpectralError("spectral: u0 and u1 must share a grid");
    const auto& g = u0.grid;
    extent_ = std::max(support_extent(u0), support_extent(u1));
    if (extent_ > g.r_max - 4.0 * g.dr) throw SpectralError("spectral: data must be compactly supported inside the grid");
    const Support sp = nonzero_range(u0, u1);
    if (sp.empty) {
        rho_max_ = 0.0;
        return;
    }

    double rho_hi = opt.rho_max;
    if (rho_hi <= 0.0) {
        // Locate the frequency beyond which the spectral energy is negligible.
        const double cap = 0.75 * std::numbers::pi / g.dr;
        const auto coarse = panels(0.0, cap, extent_ + 1.0);
        std::vector<double> C0, C1;
        forward_transform(u0, u1, sp, d, coarse.x, C0, C1);
        std::vector<double> dens(coarse.x.size());
        double total = 0.0;
        for (std::size_t j = 0; j < dens.size(); ++j) {
            const double p = coarse.x[j];
            dens[j] = coarse.w[j] * (C0[j] * C0[j] * std::pow(p, d + 1) + C1[j] * C1[j] * std::pow(p, d - 1));
            total += dens[j];
        }
        double tail = 0.0;
        std::size_t cut = dens.size();
        while (cut > 0 && tail + dens[cut - 1] <= opt.tail_tolerance * total) tail += dens[--cut];
        if (cut == dens.size() || coarse.x[std::min(cut, dens.size() - 1)] > 0.8 * cap)
            throw SpectralError("spectral: insufficient rho-resolution (spectral tail reaches the grid Nyquist band)");
        rho_hi = coarse.x[cut];
    }
    rho_max_ = rho_hi;
    build_nodes(0.0, rho_hi);
    forward_transform(u0, u1, sp, d, rho_, F0_, F1_);
}

SpectralWave::SpectralWave(const std::function<double(double)>& F0, const std::function<double(double)>& F1,
                           double rho_lo, double rho_hi, int d, double horizon, double extent)
    : d_(d), horizon_(horizon), extent_(extent), rho_max_(rho_hi) {
    order_for(d);
    if (!(rho_hi > rho_lo && rho_lo >= 0.0)) throw SpectralError("spectral: invalid frequency interval");
    build_nodes(rho_lo, rho_hi);
    F0_.resize(rho_.size());
    F1_.resize(rho_.size());
    for (std::size_t j = 0; j < rho_.size(); ++j) {
        F0_[j] = F0 ? F0(rho_[j]) : 0.0;
        F1_[j] = F1 ? F1(rho_[j]) : 0.0;
    }
}

void SpectralWave::build_nodes(double rho_lo, double rho_hi) {
    auto p = panels(rho_lo, rho_hi, horizon_ + extent_);
    rho_ = std::move(p.x);
    weight_ = std::move(p.w);
}

std::vector<SpectralWave::Sample> SpectralWave::sample(const std::vector<double>& times, const RadialGrid& out) const {
    const int nu = d_ / 2 - 1;
    const std::size_t nt = times.size();
    for (double t : times)
        if (out.r_max + std::abs(t) > horizon_ * (1.0 + 1e-12) + 1e-12)
            throw SpectralError("spectral: sample beyond the aliasing horizon");
    std::vector<Sample> res(nt);
    for (std::size_t q = 0; q < nt; ++q) {
        res[q].t = times[q];
        res[q].u.assign(out.n, 0.0);
        res[q].ut.assign(out.n, 0.0);
        res[q].ur.assign(out.n, 0.0);
    }
    if (rho_.empty()) return res;
    const std::size_t m = rho_.size();
    std::vector<double> A(nt * m), B(nt * m);
    for (std::size_t q = 0; q < nt; ++q) {
        for (std::size_t j = 0; j < m; ++j) {
            const double p = rho_[j];
            const double c = std::cos(times[q] * p), s = std::sin(times[q] * p);
            const double w = weight_[j] * std::pow(p, d_ - 1);
            const double sinc = p > 0.0 ? s / p : times[q];
            A[q * m + j] = w * (F0_[j] * c + F1_[j] * sinc);
            B[q * m + j] = w * (-F0_[j] * p * s + F1_[j] * c);
        }
    }
    for (std::size_t k = 0; k < out.n; ++k) {
        const double r = out.r(k);
        for (std::size_t j = 0; j < m; ++j) {
            double K, Kp;
            kernel_pair(nu, r * rho_[j], K, Kp);
            const double Kr = rho_[j] * Kp;
            for (std::size_t q = 0; q < nt; ++q) {
                const double a = A[q * m + j];
                res[q].u[k] += a * K;
                res[q].ur[k] += a * Kr;
                res[q].ut[k] += B[q * m + j] * K;
            }
        }
    }
    return res;
}

FieldState SpectralWave::state(double t, const RadialGrid& out) const {
    auto s = sample({t}, out);
    return FieldState::make(ModelSpec::free(d_), RadialFunction(out, std::move(s[0].u)),
                            RadialFunction(out, std::move(s[0].ut)), t);
}

std::vector<FieldState> evolve_linear_spectral(const RadialFunction& u0, const RadialFunction& u1,
                                               const std::vector<double>& times, int d, const SpectralOptions& opt) {
    double tmax = 0.0;
    for (double t : times) tmax = std::max(tmax, std::abs(t));
    const SpectralWave sw(u0, u1, d, u0.grid.r_max + tmax, opt);
    std::vector<FieldState> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t == 0.0)
            out.push_back(FieldState::make(ModelSpec::free(d), u0, u1, 0.0));
        else
            out.push_back(sw.state(t, u0.grid));
    }
    return out;
}

}  // namespace channelwave
