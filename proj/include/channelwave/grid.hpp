#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace channelwave {

class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Uniform radial samples r_i = r_min + i*dr, i = 0..n-1.
struct RadialGrid {
    double r_min = 0.0;
    double r_max = 1.0;
    std::size_t n = 8;
    double dr = 1.0 / 7.0;

    static RadialGrid make(double r_min, double r_max, std::size_t n);
    // Smallest grid starting at r_min with spacing exactly dr that reaches r_max_at_least.
    static RadialGrid with_spacing(double r_min, double r_max_at_least, double dr);

    double r(std::size_t i) const { return r_min + static_cast<double>(i) * dr; }
    std::vector<double> radii() const;
    // First sample index with r_i >= r (clamped to n); tolerant to round-off.
    std::size_t index_at_or_above(double r) const;
    std::size_t index_at_or_below(double r) const;
    bool same_as(const RadialGrid& other) const;
};

struct RadialFunction {
    RadialGrid grid;
    std::vector<double> values;

    RadialFunction() = default;
    RadialFunction(RadialGrid g, std::vector<double> v);
    static RadialFunction zeros(const RadialGrid& g);
    static RadialFunction sample(const RadialGrid& g, const std::function<double(double)>& f);

    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
    double r(std::size_t i) const { return grid.r(i); }
};

RadialFunction derivative(const RadialFunction& f, int order);

// Composite Simpson for int f(r) r^weight_power dr over the whole grid.
double weighted_integral(const RadialFunction& f, int weight_power);

// Same rule on samples [i0, i1] of a uniform grid; handles any interval count >= 1.
double integrate_samples(const std::vector<double>& integrand, double dr, std::size_t i0, std::size_t i1);

RadialFunction restrict(const RadialFunction& f, double r_lo, double r_hi);

// Local 6-point Lagrange interpolation; exact for quintics.
double interpolate(const RadialFunction& f, double r);

RadialFunction operator+(const RadialFunction& a, const RadialFunction& b);
RadialFunction operator-(const RadialFunction& a, const RadialFunction& b);
RadialFunction operator*(double s, const RadialFunction& a);

double max_abs(const RadialFunction& f);

}  // namespace channelwave
