#pragma once

#include <vector>

#include "channelwave/evolve.hpp"

namespace channelwave {

class RadiationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// G(eta) ~ r^{(d-1)/2} ur(t, t + eta) ~ -r^{(d-1)/2} ut(t, t + eta) for large t.
struct RadiationProfile {
    std::vector<double> eta_grid;
    std::vector<double> G;          // from the radial derivative
    std::vector<double> G_from_dt;  // from minus the time derivative
    double t_extraction = 0.0;
    double l2_norm_sq = 0.0;        // int G^2 d eta
    // ||G - G_from_dt|| relative to the square root of the trajectory's initial energy.
    double discrepancy = 0.0;
};

// Averages the two estimates over the snapshots nearest to t_samples on the common window
// eta in [-t/2, r_max - t] (also kept inside the valid cone region). Throws RadiationError
// when the discrepancy exceeds max_discrepancy.
RadiationProfile extract_profile(const Trajectory& traj, const std::vector<double>& t_samples,
                                 double max_discrepancy = 0.1);

struct Equipartition {
    double grad_limit = 0.0;
    double dt_limit = 0.0;
    double relative_gap = 0.0;
};

// Exterior energies on {r > R + |t|}, extrapolated from the snapshots at T/4, T/2, T
// (T = last snapshot time) when present, else taken at T.
Equipartition check_equipartition(const Trajectory& traj, double R);

// Profile H of ut from r^{(d-1)/2} d_r d_t u, compared with -G'; returns ||H + G'|| / ||G'||
// over the extraction window of the given snapshots (default: the last one).
double derivative_profile_check(const Trajectory& traj, const std::vector<double>& t_samples = {});

struct DerivativeProfile {
    std::vector<double> eta_grid;
    std::vector<double> H;        // from r^{(d-1)/2} d_r d_t u
    std::vector<double> G_prime;  // eta-derivative of the extracted G
};

DerivativeProfile derivative_profile(const Trajectory& traj, const std::vector<double>& t_samples = {});

// Free-wave trajectory from the spectral solver, sampled on [0, r_max] with spacing dr.
Trajectory spectral_trajectory(const RadialFunction& u0, const RadialFunction& u1, const std::vector<double>& times,
                               double r_max, double dr, int d = 4, const SpectralOptions& opt = {});

// Surface measure of S^3; converts the normalised norms to Euclidean ones.
inline constexpr double kSphere3Area = 19.739208802178716;  // 2 pi^2

}  // namespace channelwave
