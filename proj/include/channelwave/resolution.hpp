#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "channelwave/evolve.hpp"
#include "channelwave/models.hpp"

namespace channelwave {

class ResolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// B_j = (j - 1) E_tot + E(|x| <= 1) for the profile's energy density:
// W: |W'|^2 r^3, Q: (Q'^2 + sin^2 Q / r^2) r.
double bubble_threshold(Profile p, int j);

// Cumulative density of w = snapshot.u - background from the origin to rho.
double cumulative_energy(const RadialFunction& w, Profile p, double rho);

// lambda_j = inf{rho : cumulative energy of (u - background) up to rho >= B_j}, j = 1..J_max,
// stopping at the first threshold the grid cannot reach. Relative bisection tolerance 1e-6 or finer.
std::vector<double> extract_scales(const FieldState& snapshot, const RadialFunction& background, Profile p, int J_max);

struct DecompositionEntry {
    int sign = 1;
    double scale = 1.0;
};

struct DecompositionResult {
    int J = 0;
    std::vector<DecompositionEntry> entries;  // increasing scale
    RadialFunction background;
    double residual_h_norm = 0.0;   // energy norm of u - background - bubbles
    double residual_l2_dt = 0.0;    // L^2 norm of ut - background_ut
    double initial_h_norm = 0.0;
    int iterations = 0;
    bool converged = true;
};

// Sign of the gradient pairing of u - background with the bubble at lambda over [lambda/3, 3 lambda].
int detect_sign(const FieldState& snapshot, const RadialFunction& background, Profile p, double lambda);

// Levenberg-Marquardt refinement of log lambda_j with signs fixed by detect_sign. The residual is the
// energy norm (r^3 dr for W; H norm with the r^{-2} term for Q). Returns the best iterate.
DecompositionResult fit_multibubble(const FieldState& snapshot, const RadialFunction& background, Profile p,
                                    const std::vector<double>& initial,
                                    const std::optional<RadialFunction>& background_ut = std::nullopt,
                                    int max_iterations = 100);

struct RigidityProbe {
    double eta_plus = 0.0;
    double eta_minus = 0.0;
    std::vector<double> times_plus, energy_plus;
    std::vector<double> times_minus, energy_minus;
};

// Minimum over snapshots (spacing dt_snapshot) of the exterior energy on r >= R + |t|, both time
// directions. Wave maps use int (psi_t^2 + psi_r^2 + sin^2 psi / r^2) r dr; other models the
// quadratic part int (ut^2 + ur^2) r^{d-1} dr.
RigidityProbe rigidity_probe(const FieldState& data, double R, double T, double dt_snapshot = 1.0);

// Probe on the stationary profile at the same grid, R and T.
double rigidity_noise_floor(Profile p, const RadialGrid& grid, double R, double T, double dt_snapshot = 1.0);

struct EllFit {
    double ell = 0.0;
    double c = 0.0;             // coefficient of r^-2
    double fit_quality = 1.0;   // 1 - SS_res / SS_tot (1 when r^2 u is constant)
    std::size_t samples = 0;
};

// Least squares r^2 u ~ ell + c / r^2 over samples in [r_lo, r_hi].
EllFit ell_limit(const FieldState& snapshot, double r_lo, double r_hi);

struct ConcentrationOptions {
    double amplitude = 1.0;       // psi1 = amplitude * r Q'(r) * cutoff(r), pushes the bubble inward
    double dr = 0.002;
    double r_max = 12.0;
    double t_max = 20.0;
    double snapshot_every = 0.01;
    double max_cell_jump = 0.2;
};

struct ConcentrationReport {
    std::vector<double> times, lambdas;  // lambda_1 per resolved snapshot
    bool blowup_detected = false;
    double blowup_time = 0.0;
    double decades = 0.0;                // log10 span of the final strictly decreasing run
    bool strictly_decreasing = false;    // over the whole record
    double last_lambda = 0.0;
    double core_h_error = 0.0;           // |psi - Q_lambda|_H / |Q_lambda|_H on [0, 5 lambda_1]
};

// Co-rotational wave map from (Q, amplitude r Q' cutoff) evolved until concentration is detected.
ConcentrationReport concentration_run(const ConcentrationOptions& opts = {});

// Relative H-norm distance between psi and Q(r / lambda) on [0, radius].
double core_h_error(const FieldState& snapshot, double lambda, double radius);

}  // namespace channelwave
