#include "channelwave/models.hpp"

#include <algorithm>

namespace channelwave {

namespace {

constexpr double kSeriesCutoff = 0.5;

// Lambda(U)/U^3 = sum_{k>=1} (-1)^{k+1} 6^k U^{2k-2} / (2k+1)!
double lambda_over_cube_series(double U) {
    const double u2 = U * U;
    double term = 1.0;  // k = 1: 6/3! = 1
    double s = term;
    for (int k = 2; k < 30; ++k) {
        term *= -6.0 * u2 / ((2.0 * k) * (2.0 * k + 1.0));
        s += term;
        if (std::abs(term) < 1e-18 * std::abs(s)) break;
    }
    return s;
}

// Primitive(U)/U^4 = sum_{k>=1} (-1)^{k+1} 6^k U^{2k-2} / (2k+2)!
double primitive_over_quartic_series(double U) {
    const double u2 = U * U;
    double term = 0.25;  // k = 1: 6/4!
    double s = term;
    for (int k = 2; k < 30; ++k) {
        term *= -6.0 * u2 / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
        s += term;
        if (std::abs(term) < 1e-18 * std::abs(s)) break;
    }
    return s;
}

}  // namespace

ModelSpec ModelSpec::free(int d) {
    ModelSpec m{d, Nonlinearity::Free};
    m.validate();
    return m;
}
ModelSpec ModelSpec::wave_map() { return {2, Nonlinearity::WaveMapNative}; }
ModelSpec ModelSpec::critical_nlw() { return {4, Nonlinearity::CriticalNLW}; }
ModelSpec ModelSpec::gnlw() { return {4, Nonlinearity::GNLW}; }
ModelSpec ModelSpec::linearized_wm() { return {2, Nonlinearity::LinearizedWM}; }

void ModelSpec::validate() const {
    switch (kind) {
        case Nonlinearity::Free:
            if (dimension != 2 && dimension != 4 && dimension != 6)
                throw ModelError("model: free wave dimension must be 2, 4 or 6");
            return;
        case Nonlinearity::WaveMapNative:
        case Nonlinearity::LinearizedWM:
            if (dimension != 2) throw ModelError("model: wave-map equations are posed with d = 2");
            return;
        case Nonlinearity::CriticalNLW:
        case Nonlinearity::GNLW:
            if (dimension != 4) throw ModelError("model: critical wave equations are posed with d = 4");
            return;
    }
}

double ModelSpec::source(double r, double u) const {
    switch (kind) {
        case Nonlinearity::Free:
            return 0.0;
        case Nonlinearity::WaveMapNative:
            return r > 0.0 ? -std::sin(2.0 * u) / (2.0 * r * r) : 0.0;
        case Nonlinearity::LinearizedWM:
            return r > 0.0 ? -u / (r * r) : 0.0;
        case Nonlinearity::CriticalNLW:
            return u * u * u;
        case Nonlinearity::GNLW: {
            const double U = r * u;
            if (std::abs(U) < kSeriesCutoff) return u * u * u * lambda_over_cube_series(U);
            return eval_Lambda(U) / (r * r * r);
        }
    }
    return 0.0;
}

double ModelSpec::potential_density(double r, double u) const {
    switch (kind) {
        case Nonlinearity::Free:
            return 0.0;
        case Nonlinearity::WaveMapNative: {
            if (r <= 0.0) return 0.0;
            const double s = std::sin(u);
            return 0.5 * s * s / (r * r);
        }
        case Nonlinearity::LinearizedWM:
            return r > 0.0 ? 0.5 * u * u / (r * r) : 0.0;
        case Nonlinearity::CriticalNLW:
            return -0.25 * u * u * u * u;
        case Nonlinearity::GNLW: {
            const double U = r * u;
            if (std::abs(U) < kSeriesCutoff) return -u * u * u * u * primitive_over_quartic_series(U);
            const double r2 = r * r;
            return -eval_Lambda_primitive(U) / (r2 * r2);
        }
    }
    return 0.0;
}

std::string ModelSpec::name() const {
    switch (kind) {
        case Nonlinearity::Free:
            return "free";
        case Nonlinearity::WaveMapNative:
            return "wave_map";
        case Nonlinearity::CriticalNLW:
            return "critical_nlw";
        case Nonlinearity::GNLW:
            return "gnlw";
        case Nonlinearity::LinearizedWM:
            return "linearized_wm";
    }
    return "?";
}

ModelSpec ModelSpec::parse(const std::string& name, int dimension) {
    ModelSpec m;
    if (name == "free") {
        m = {dimension == 0 ? 4 : dimension, Nonlinearity::Free};
    } else if (name == "wave_map") {
        m = wave_map();
    } else if (name == "critical_nlw") {
        m = critical_nlw();
    } else if (name == "gnlw") {
        m = gnlw();
    } else if (name == "linearized_wm") {
        m = linearized_wm();
    } else {
        throw ModelError("model: unknown model '" + name + "'");
    }
    if (dimension != 0 && dimension != m.dimension) throw ModelError("model: dimension does not match " + name);
    m.validate();
    return m;
}

bool operator==(const ModelSpec& a, const ModelSpec& b) { return a.dimension == b.dimension && a.kind == b.kind; }

void BubbleConfig::validate() const {
    for (std::size_t j = 0; j < entries.size(); ++j) {
        if (entries[j].sign != 1 && entries[j].sign != -1) throw ModelError("bubbles: sign must be +1 or -1");
        if (!(entries[j].scale > 0.0)) throw ModelError("bubbles: scales must be positive");
        if (j > 0 && !(entries[j].scale > entries[j - 1].scale))
            throw ModelError("bubbles: scales must be strictly increasing");
    }
}

double eval_Q(double r) { return 2.0 * std::atan(r); }
double eval_Q_prime(double r) { return 2.0 / (1.0 + r * r); }
double eval_W(double r) { return 1.0 / (1.0 + r * r / 8.0); }
double eval_W_prime(double r) {
    const double q = 1.0 + r * r / 8.0;
    return -0.25 * r / (q * q);
}

double eval_Wtilde(double r) {
    if (!(r > 0.0)) throw ModelError("Wtilde: defined for r > 0 only");
    // pi - 2 arctan r = 2 arctan(1/r) avoids cancellation at large r.
    return std::sqrt(2.0 / 3.0) * 2.0 * std::atan(1.0 / r) / r;
}

double eval_Lambda(double U, int deriv_order) {
    static const double s6 = std::sqrt(6.0);
    switch (deriv_order) {
        case 0:
            if (std::abs(U) < kSeriesCutoff) return U * U * U * lambda_over_cube_series(U);
            return U - std::sin(s6 * U) / s6;
        case 1: {
            const double s = std::sin(0.5 * s6 * U);
            return 2.0 * s * s;
        }
        case 2:
            return s6 * std::sin(s6 * U);
        default:
            throw ModelError("Lambda: derivative order must be 0, 1 or 2");
    }
}

double eval_Lambda_primitive(double U) {
    static const double s6 = std::sqrt(6.0);
    if (std::abs(U) < kSeriesCutoff) return U * U * U * U * primitive_over_quartic_series(U);
    const double s = std::sin(0.5 * s6 * U);
    return 0.5 * U * U - s * s / 3.0;
}

double eval_profile(Profile p, double r, double lambda) {
    const double s = r / lambda;
    return p == Profile::Q ? eval_Q(s) : eval_W(s) / lambda;
}

double eval_profile_prime(Profile p, double r, double lambda) {
    const double s = r / lambda;
    return p == Profile::Q ? eval_Q_prime(s) / lambda : eval_W_prime(s) / (lambda * lambda);
}

double eval_profile_dlog(Profile p, double r, double lambda) {
    const double s = r / lambda;
    if (p == Profile::Q) return -s * eval_Q_prime(s);
    return -(eval_W(s) + s * eval_W_prime(s)) / lambda;
}

RadialFunction eval_bubble_sum(const BubbleConfig& cfg, const RadialGrid& grid) {
    cfg.validate();
    std::vector<double> v(grid.n, 0.0);
    for (const auto& b : cfg.entries)
        for (std::size_t i = 0; i < grid.n; ++i) v[i] += b.sign * eval_profile(cfg.profile, grid.r(i), b.scale);
    return RadialFunction(grid, std::move(v));
}

ModelSpec model_for(Profile p) { return p == Profile::Q ? ModelSpec::wave_map() : ModelSpec::critical_nlw(); }

double stationarity_residual(const RadialFunction& f, const ModelSpec& m) {
    const auto d1 = derivative(f, 1);
    const auto d2 = derivative(f, 2);
    const auto& g = f.grid;
    double worst = 0.0;
    // Centered stencils only; the one-sided closures carry larger constants.
    for (std::size_t i = 2; i + 2 < g.n; ++i) {
        const double r = g.r(i);
        if (r <= 0.0) continue;
        const double res = d2[i] + (m.dimension - 1) / r * d1[i] + m.source(r, f[i]);
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

double stationarity_residual(Profile p, const RadialGrid& grid) {
    BubbleConfig cfg{p, {{1, 1.0}}};
    return stationarity_residual(eval_bubble_sum(cfg, grid), model_for(p));
}

}  // namespace channelwave
