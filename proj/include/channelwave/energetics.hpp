#pragma once

#include <vector>

#include "channelwave/evolve.hpp"

namespace channelwave {

// Components of the conserved energy; every integral carries the radial weight r^{d-1}
// and no angular factor. kinetic = 1/2 int ut^2, gradient = 1/2 int ur^2.
struct EnergyBreakdown {
    double kinetic = 0.0;
    double gradient = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

struct Region {
    bool exterior = false;
    double R = 0.0;

    static Region full() { return {}; }
    // {r >= R + |t|}, snapped outward to the next sample.
    static Region exterior_of(double R) { return {true, R}; }
};

EnergyBreakdown energy(const FieldState& state, Region region = Region::full());

// Quadratic exterior energy on {r >= R + |t|}, without the 1/2.
struct ExteriorSample {
    double t = 0.0;
    double kinetic = 0.0;   // int ut^2 r^{d-1}
    double gradient = 0.0;  // int ur^2 r^{d-1}
    double value = 0.0;     // kinetic + gradient
};

std::vector<ExteriorSample> exterior_energy_series(const Trajectory& traj, double R);
ExteriorSample exterior_energy(const FieldState& state, double R);

// (L^p L^q)(R) norm: (int (int_{R+|t|} |u|^q r^3 dr)^{p/q} dt)^{1/p}, trapezoid in t over the
// snapshots. The inner integral runs over the part of {r >= R + |t|} covered by the grid.
double spacetime_norm(const Trajectory& traj, double p, double q, double R);
double spacetime_norm(const std::vector<double>& times, const std::vector<RadialFunction>& slices, double p, double q,
                      double R);

struct SinDefect {
    double lhs1 = 0.0, rhs1 = 0.0;  // |sin(2 sum a) - sum sin(2a)|,  sum_{j!=k} |sin a_j| sin^2 a_k
    double lhs2 = 0.0, rhs2 = 0.0;  // |sin^2(sum a) - sum sin^2 a|,  sum_{j!=k} |sin a_j sin a_k|
};

SinDefect sin_superposition_defect(const std::vector<double>& a);

// Small-data wave-map norm ||(psi0 - l pi, psi1)||_H^2 = int (psi_r^2 + (psi - l pi)^2 / r^2 + psi_t^2) r dr.
double wm_h_norm_sq(const FieldState& state, int ell = 0);

}  // namespace channelwave
