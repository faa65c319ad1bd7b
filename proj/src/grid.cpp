#include "channelwave/grid.hpp"

#include <algorithm>
#include <cmath>

namespace channelwave {

RadialGrid RadialGrid::make(double r_min, double r_max, std::size_t n) {
    if (!(r_min >= 0.0)) throw GridError("grid: r_min must be >= 0");
    if (!(r_max > r_min)) throw GridError("grid: r_max must exceed r_min");
    if (n < 8) throw GridError("grid: at least 8 samples required");
    RadialGrid g;
    g.r_min = r_min;
    g.r_max = r_max;
    g.n = n;
    g.dr = (r_max - r_min) / static_cast<double>(n - 1);
    return g;
}

RadialGrid RadialGrid::with_spacing(double r_min, double r_max_at_least, double dr) {
    if (!(dr > 0.0)) throw GridError("grid: spacing must be positive");
    const auto intervals = static_cast<std::size_t>(std::ceil((r_max_at_least - r_min) / dr - 1e-9));
    const std::size_t n = std::max<std::size_t>(intervals + 1, 8);
    RadialGrid g;
    g.r_min = r_min;
    g.n = n;
    g.dr = dr;
    g.r_max = r_min + static_cast<double>(n - 1) * dr;
    if (!(r_min >= 0.0)) throw GridError("grid: r_min must be >= 0");
    return g;
}

std::vector<double> RadialGrid::radii() const {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = this->r(i);
    return r;
}

std::size_t RadialGrid::index_at_or_above(double rr) const {
    const double x = (rr - r_min) / dr;
    if (x <= 0.0) return 0;
    const double k = std::ceil(x - 1e-9);
    if (k >= static_cast<double>(n)) return n;
    return static_cast<std::size_t>(k);
}

std::size_t RadialGrid::index_at_or_below(double rr) const {
    const double x = (rr - r_min) / dr;
    if (x <= 0.0) return 0;
    const double k = std::floor(x + 1e-9);
    return std::min<std::size_t>(static_cast<std::size_t>(k), n - 1);
}

bool RadialGrid::same_as(const RadialGrid& o) const {
    return n == o.n && std::abs(r_min - o.r_min) <= 1e-12 * (1.0 + std::abs(r_min)) &&
           std::abs(dr - o.dr) <= 1e-12 * dr;
}

RadialFunction::RadialFunction(RadialGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.n) throw GridError("radial function: value count does not match grid");
    for (double x : values)
        if (!std::isfinite(x)) throw GridError("radial function: non-finite value");
}

RadialFunction RadialFunction::zeros(const RadialGrid& g) { return RadialFunction(g, std::vector<double>(g.n, 0.0)); }

RadialFunction RadialFunction::sample(const RadialGrid& g, const std::function<double(double)>& f) {
    std::vector<double> v(g.n);
    for (std::size_t i = 0; i < g.n; ++i) v[i] = f(g.r(i));
    return RadialFunction(g, std::move(v));
}

RadialFunction derivative(const RadialFunction& f, int order) {
    const auto& g = f.grid;
    const std::size_t n = g.n;
    if (order != 1 && order != 2) throw GridError("derivative: order must be 1 or 2");
    if (n < 6) throw GridError("derivative: grid too small for the stencil");
    const auto& u = f.values;
    std::vector<double> d(n);
    const double h = g.dr;
    if (order == 1) {
        const double c = 1.0 / (12.0 * h);
        for (std::size_t i = 2; i + 2 < n; ++i) d[i] = c * (-u[i + 2] + 8.0 * u[i + 1] - 8.0 * u[i - 1] + u[i - 2]);
        d[0] = c * (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]);
        d[1] = c * (-3.0 * u[0] - 10.0 * u[1] + 18.0 * u[2] - 6.0 * u[3] + u[4]);
        const std::size_t m = n - 1;
        d[m] = c * (25.0 * u[m] - 48.0 * u[m - 1] + 36.0 * u[m - 2] - 16.0 * u[m - 3] + 3.0 * u[m - 4]);
        d[m - 1] = c * (3.0 * u[m] + 10.0 * u[m - 1] - 18.0 * u[m - 2] + 6.0 * u[m - 3] - u[m - 4]);
    } else {
        const double c = 1.0 / (12.0 * h * h);
        for (std::size_t i = 2; i + 2 < n; ++i)
            d[i] = c * (-u[i + 2] + 16.0 * u[i + 1] - 30.0 * u[i] + 16.0 * u[i - 1] - u[i - 2]);
        d[0] = c * (45.0 * u[0] - 154.0 * u[1] + 214.0 * u[2] - 156.0 * u[3] + 61.0 * u[4] - 10.0 * u[5]);
        d[1] = c * (10.0 * u[0] - 15.0 * u[1] - 4.0 * u[2] + 14.0 * u[3] - 6.0 * u[4] + u[5]);
        const std::size_t m = n - 1;
        d[m] = c * (45.0 * u[m] - 154.0 * u[m - 1] + 214.0 * u[m - 2] - 156.0 * u[m - 3] + 61.0 * u[m - 4] -
                    10.0 * u[m - 5]);
        d[m - 1] = c * (10.0 * u[m] - 15.0 * u[m - 1] - 4.0 * u[m - 2] + 14.0 * u[m - 3] - 6.0 * u[m - 4] + u[m - 5]);
    }
    return RadialFunction(g, std::move(d));
}

double integrate_samples(const std::vector<double>& y, double h, std::size_t i0, std::size_t i1) {
    if (i1 <= i0) return 0.0;
    const std::size_t m = i1 - i0;
    if (m == 1) return 0.5 * h * (y[i0] + y[i1]);
    auto simpson = [&](std::size_t a, std::size_t b) {
        double s = y[a] + y[b];
        for (std::size_t i = a + 1; i < b; ++i) s += ((i - a) % 2 == 1 ? 4.0 : 2.0) * y[i];
        return s * h / 3.0;
    };
    auto three_eighths = [&](std::size_t a) {
        return 3.0 * h / 8.0 * (y[a] + 3.0 * y[a + 1] + 3.0 * y[a + 2] + y[a + 3]);
    };
    if (m % 2 == 0) return simpson(i0, i1);
    if (m == 3) return three_eighths(i0);
    return simpson(i0, i1 - 3) + three_eighths(i1 - 3);
}

double weighted_integral(const RadialFunction& f, int weight_power) {
    const auto& g = f.grid;
    std::vector<double> y(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double r = g.r(i);
        y[i] = f.values[i] * (weight_power == 0 ? 1.0 : std::pow(r, weight_power));
    }
    return integrate_samples(y, g.dr, 0, g.n - 1);
}

RadialFunction restrict(const RadialFunction& f, double r_lo, double r_hi) {
    const auto& g = f.grid;
    const double tol = 1e-9 * g.dr;
    if (r_hi < r_lo || r_hi < g.r_min - tol || r_lo > g.r_max + tol)
        throw GridError("restrict: empty intersection with the grid");
    if (r_lo < g.r_min - tol || r_hi > g.r_max + tol) throw GridError("restrict: range extends beyond the grid");
    const std::size_t i0 = g.index_at_or_below(std::max(r_lo, g.r_min));
    std::size_t i1 = g.index_at_or_above(std::min(r_hi, g.r_max));
    if (i1 >= g.n) i1 = g.n - 1;
    if (i1 + 1 < i0 + 8) throw GridError("restrict: sub-grid has fewer than 8 samples");
    RadialGrid sub;
    sub.r_min = g.r(i0);
    sub.dr = g.dr;
    sub.n = i1 - i0 + 1;
    sub.r_max = sub.r(sub.n - 1);
    std::vector<double> v(f.values.begin() + static_cast<std::ptrdiff_t>(i0),
                          f.values.begin() + static_cast<std::ptrdiff_t>(i1 + 1));
    return RadialFunction(sub, std::move(v));
}

double interpolate(const RadialFunction& f, double r) {
    const auto& g = f.grid;
    if (r < g.r_min - 1e-12 * (1.0 + g.r_max) || r > g.r_max + 1e-12 * (1.0 + g.r_max))
        throw GridError("interpolate: radius outside the grid");
    const double x = (r - g.r_min) / g.dr;
    const auto n = static_cast<std::ptrdiff_t>(g.n);
    auto base = static_cast<std::ptrdiff_t>(std::floor(x)) - 2;
    base = std::clamp<std::ptrdiff_t>(base, 0, n - 6);
    double s = 0.0;
    for (std::ptrdiff_t j = 0; j < 6; ++j) {
        double w = 1.0;
        const double xj = static_cast<double>(base + j);
        for (std::ptrdiff_t k = 0; k < 6; ++k) {
            if (k == j) continue;
            const double xk = static_cast<double>(base + k);
            w *= (x - xk) / (xj - xk);
        }
        s += w * f.values[static_cast<std::size_t>(base + j)];
    }
    return s;
}

namespace {
void require_same(const RadialFunction& a, const RadialFunction& b) {
    if (!a.grid.same_as(b.grid)) throw GridError("radial function arithmetic: grids differ");
}
}  // namespace

RadialFunction operator+(const RadialFunction& a, const RadialFunction& b) {
    require_same(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] + b.values[i];
    return RadialFunction(a.grid, std::move(v));
}

RadialFunction operator-(const RadialFunction& a, const RadialFunction& b) {
    require_same(a, b);
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] - b.values[i];
    return RadialFunction(a.grid, std::move(v));
}

RadialFunction operator*(double s, const RadialFunction& a) {
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s * a.values[i];
    return RadialFunction(a.grid, std::move(v));
}

double max_abs(const RadialFunction& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace channelwave
