#pragma once

#include <array>
#include <functional>
#include <stdexcept>

#include "channelwave/grid.hpp"

namespace channelwave {

class ExactCalcError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
    bool converged = true;
};

// Adaptive 31-point Gauss-Kronrod on [a, b] with relative tolerance tol.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-10,
                                    unsigned max_depth = 18);

// h(r) = (4 pi / r^2) int_1^r sqrt((r^2 - z^2) / (z - 1)) dz through z = 1 + zeta (r - 1), zeta = sin^2 theta.
QuadratureResult eval_h(double r);
// Same integral by tanh-sinh directly in z.
QuadratureResult eval_h_direct(double r);

// K(zeta, r) = sqrt(r (1 + zeta) + 1 - zeta).
double eval_K(double zeta, double r);
// Z(zeta, r) = K^{-5} [-3 r^2 (1+zeta)^2 (1+3 zeta) + 5 r (1+zeta)(1-zeta)(1-3 zeta) + 2 (1-zeta)^2 (1-3 zeta)] / 4.
double eval_Z(double zeta, double r);
// Coefficients of r^0..r^3 in K^6 - (r+1)(1+zeta) K^4 / 2 - (5r^2+r)(1+zeta)^2 K^2 / 4 + 3 (1+zeta)^3 (r^3-r^2) / 4,
// expanded from K^2 = r (1 + zeta) + 1 - zeta before any simplification.
std::array<double, 4> z_bracket_coefficients(double zeta);

enum class HRoute { ZForm, DerivativeForm };

// H(r) = r (r^{-1/2} (r^3 h')')'. DerivativeForm differentiates eval_h with 4th-order stencils of
// step r / 100 and throws when the stencil would reach r <= 1.
QuadratureResult eval_H(double r, HRoute route = HRoute::ZForm);

// 3597 / (400 pi^4).
double chain_bound();

struct IResult {
    QuadratureResult I;        // (1 / (32 pi^4)) int_1^inf H^2 log r dr, truncation remainder in the error
    double chain_bound = 0.0;
    double truncation_radius = 0.0;
    double tail_bound = 0.0;   // majorant of the dropped tail
};

// Integrates in s = log r over unit pieces (times pieces_per_unit) up to the radius where the
// 12 (r^-1 + r^-2 + r^-3) majorant bounds the tail by tail_tol.
IResult compute_I(int pieces_per_unit = 1, double tol = 1e-12, double tail_tol = 1e-12);

struct ABC {
    QuadratureResult a, b, c;
    double a_majorant = 0.0;        // 3 pi sqrt((pi/4)(1 + 5/3 + 3/5 - 9/7))
    double b_majorant = 0.0;        // 5 pi sqrt(pi/7)
    double b_majorant_direct = 0.0; // 5 pi sqrt((pi/4) int_0^1 (1 - x^2)^3 dx)
    double c_bound = 0.0;           // 2 pi
};

ABC compute_abc();

// Half-space transform of a radial v0 supported in (1, A):
//   G(eta) = (1 / (4 sqrt2 pi^2)) int_{x1 > eta} d^2_{x1} v0 / (x1 - eta)^{1/2} dx, eta in [0, 1].
// G_eta uses the radial h-kernel; G_eta_direct integrates in hyperspherical (rho, psi).
double G_eta(const RadialFunction& v0, double eta);
double G_eta_direct(const RadialFunction& v0, double eta);
// G'(eta) through the H-kernel.
double G_eta_prime(const RadialFunction& v0, double eta);
// int_0^1 G'(eta)^2 d eta.
QuadratureResult G_prime_l2_sq(const RadialFunction& v0);

// Omega[f](t) = int_{|x - t e1| < t} f(x) / (t^2 - |x - t e1|^2)^{1/2} dx for radial f; t must reach
// the outer edge of the support.
double omega_operator(const RadialFunction& f, double t);
// int_{x1 > 0} f(x) / x1^{1/2} dx, the limit of (2t)^{1/2} Omega[f](t).
double omega_limit(const RadialFunction& f);

struct FourierTerms {
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
    double weighted_norm = 0.0;  // int |u0hat|^2 rho^5 d rho
    // lim int_{r > t} ut^2 r^3 dr = (2 / pi)(A1 + A2 + A3) / (2 pi)^4.
    double exterior_limit() const;
};

// u0hat is the 4D Fourier transform of u0 (radial, real), supported in an annulus away from 0.
FourierTerms fourier_exterior_terms(const RadialFunction& u0hat);
FourierTerms fourier_exterior_terms(const std::function<double(double)>& u0hat, double rho_lo, double rho_hi);

struct LaplaceLogCheck {
    double closed_form = 0.0;
    double numeric = 0.0;
    double gap = 0.0;
};

// 4D radial Laplacian of r^-alpha log^-beta r: closed form against 4th-order differences.
LaplaceLogCheck laplace_log_check(double alpha, double beta, double r);

// w(t, r) vanishing for |t| > t_extent and r > r_extent.
struct SpaceTimeField {
    std::function<double(double, double)> w;
    double t_extent = 1.0;
    double r_extent = 1.0;
};

struct OperatorRatios {
    double ratio_A = 0.0;  // ||A w||_{L2 L8/3 (R)} / ||w||_{L2 L8 (R)}
    double ratio_B = 0.0;  // ||B w||_{L1 L2 (R)} log^{1/3}(lambda R) / ||w||_{L3 L6 (R)}
};

// A w = r^-2 int_0^t w,  B w = t r^-4 log(lambda r)^{-1/2} int_0^t w, on {r > R + |t|}.
// Requires lambda R > 1. n is the number of samples per axis.
OperatorRatios appendix_c_operator_ratios(const SpaceTimeField& w, double R, double lambda, std::size_t n = 801);

}  // namespace channelwave
