#pragma once

#include <stdexcept>
#include <vector>

namespace channelwave {

class ApproxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// a(t, r) = 2t / (sqrt3 r^2 log^{1/2} r) - t^3 / (3 sqrt3 r^4 log^{3/2} r), defined for r > 2.
double eval_a(double t, double r);
// a1(r) = d_t a(0, r).
double eval_a1(double r);
// d_t^dt d_r^dr a in closed form, dt in 0..3, dr in 0..2.
double eval_a_derivative(double t, double r, int dt, int dr);
// 4D radial Laplacian of a, termwise from the r^-alpha log^-beta r identity.
double laplacian_a(double t, double r);

// coef * t^t_power * r^-r_power * log^-log_power r
struct LogMonomial {
    double coef = 0.0;
    int t_power = 0;
    int r_power = 0;
    double log_power = 0.0;

    double eval(double t, double r) const;
};

// d_t^2 a - Delta a - a^3 expanded into monomials.
const std::vector<LogMonomial>& polynomial_residual();

// b = d_t^2 a - Delta a - Lambda(r a) / r^3 on r > max(|t|, 2).
double residual_b(double t, double r);
double residual_b_dt(double t, double r);
// Same residual with d_t^2 a and Delta a from Richardson-extrapolated central differences of eval_a.
double residual_b_fd(double t, double r);

// With a = T1 - T3: time_space = d_t^2 T3 - Delta T1, cubic = Delta T3 - T1^3.
struct CancellationTerms {
    double time_space = 0.0;
    double cubic = 0.0;
};
CancellationTerms cancellation_terms(double t, double r);

struct ScanOptions {
    double t_lo = 2.0;
    double t_hi = 100.0;
    double r_hi = 200.0;   // at most 1e4
    std::size_t nt = 197;
    std::size_t nr = 400;  // log-spaced in (max(|t|, 2), r_hi]
};

struct ScanResult {
    double constant = 0.0;
    double t_at = 0.0;
    double r_at = 0.0;
    std::size_t points = 0;
};

// sup |b| r^4 log^{5/2} r / |t|, and the same with |b| + |t d_t b|.
ScanResult scan_b_constant(const ScanOptions& opts = {}, bool include_dt = false);
// sup (|a| + |t d_t a|) r^2 log^{1/2} r / |t|.
ScanResult scan_a_constant(const ScanOptions& opts = {});

// int_2^rho a1^2 r^3 dr by quadrature.
double a1_l2_growth(double rho);

struct ExteriorEnergySample {
    double t = 0.0;
    double energy = 0.0;  // int_{max(|t|,2)}^inf ((d_t^2 a)^2 + (d_r d_t a)^2) r^3 dr
};
std::vector<ExteriorEnergySample> nonradiative_check(const std::vector<double>& times);

// ||1_{r > 1 + |t|} a||_{L^3 L^6}, normalised measure r^3 dr.
double exterior_l3l6_norm();

}  // namespace channelwave
