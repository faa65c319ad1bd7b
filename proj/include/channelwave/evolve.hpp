#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "channelwave/grid.hpp"
#include "channelwave/models.hpp"

namespace channelwave {

struct FieldState {
    ModelSpec model;
    RadialGrid grid;
    double t = 0.0;
    RadialFunction u;
    RadialFunction ut;
    // Samples with r < valid_r_min lie outside the domain of dependence (cone runs).
    double valid_r_min = 0.0;

    static FieldState make(const ModelSpec& m, RadialFunction u, RadialFunction ut, double t = 0.0);
    std::size_t first_valid() const { return grid.index_at_or_above(valid_r_min); }
};

struct TrajectoryMeta {
    double cfl = 0.5;
    double dt = 0.0;
    double wall_time = 0.0;
    bool on_cone = false;
    double cone_R = 0.0;
};

struct Trajectory {
    std::vector<FieldState> states;
    TrajectoryMeta meta;

    std::vector<double> times() const;
    const FieldState& back() const { return states.back(); }
    // Snapshot whose time is closest to t.
    const FieldState& nearest(double t) const;
};

class BlowUpDetected : public std::runtime_error {
public:
    BlowUpDetected(const std::string& what, FieldState last_good, Trajectory partial)
        : std::runtime_error(what), last_good(std::move(last_good)), partial(std::move(partial)) {}
    FieldState last_good;
    Trajectory partial;
    double time() const { return last_good.t; }
};

using SourceFn = std::function<double(double t, double r)>;

struct EvolveOptions {
    double cfl = 0.5;
    // Spacing of stored snapshots; 0 stores only the initial and final states.
    double snapshot_every = 0.0;
    double blowup_threshold = 1e8;
    // Largest allowed jump between neighbouring samples; exceeding it means the
    // solution has concentrated below grid scale and is reported as blow-up.
    double max_cell_jump = std::numeric_limits<double>::infinity();
    // Inhomogeneous forcing added to the right-hand side.
    SourceFn source;
    // Width kept behind the light cone when updating cone runs.
    double cone_buffer = 1.0;
};

Trajectory evolve(const FieldState& initial, double t_end, double cfl = 0.5, double snapshot_every = 0.0);
Trajectory evolve(const FieldState& initial, double t_end, const EvolveOptions& opt);

// Evolution on {r >= R + |t|}; the grid must start at or below R + |t0|.
Trajectory evolve_on_cone(const FieldState& initial, double R, double t_end, const EvolveOptions& opt = {});

// Radial Hankel pair in dimension d (nu = d/2 - 1, K(x) = J_nu(x) / x^nu):
//   F(rho) = int f(r) K(r rho) r^{d-1} dr,   f(r) = int F(rho) K(r rho) rho^{d-1} drho.
// The d-dimensional Fourier transform is (2 pi)^{d/2} F.
double radial_kernel(int d, double x);
// d/dx of radial_kernel.
double radial_kernel_prime(int d, double x);
double radial_transform(const RadialFunction& f, double rho, int d);

struct SpectralOptions {
    // Upper frequency; 0 selects it from the spectral tail of the data.
    double rho_max = 0.0;
    // Relative spectral energy allowed beyond rho_max.
    double tail_tolerance = 1e-20;
};

class SpectralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Free radial wave in dimension d evaluated by quadrature of the Hankel inversion.
class SpectralWave {
public:
    // horizon bounds r + |t| over all later sample requests.
    SpectralWave(const RadialFunction& u0, const RadialFunction& u1, int d, double horizon,
                 const SpectralOptions& opt = {});
    // Transforms supplied directly on [rho_lo, rho_hi]; extent bounds the spatial reach of the data.
    SpectralWave(const std::function<double(double)>& F0, const std::function<double(double)>& F1, double rho_lo,
                 double rho_hi, int d, double horizon, double extent);

    struct Sample {
        double t = 0.0;
        std::vector<double> u, ut, ur;
    };
    std::vector<Sample> sample(const std::vector<double>& times, const RadialGrid& out) const;
    FieldState state(double t, const RadialGrid& out) const;

    int dimension() const { return d_; }
    double rho_max() const { return rho_max_; }
    double horizon() const { return horizon_; }
    std::size_t node_count() const { return rho_.size(); }

private:
    void build_nodes(double rho_lo, double rho_hi);
    int d_ = 4;
    double horizon_ = 0.0;
    double extent_ = 0.0;
    double rho_max_ = 0.0;
    std::vector<double> rho_, weight_, F0_, F1_;
};

std::vector<FieldState> evolve_linear_spectral(const RadialFunction& u0, const RadialFunction& u1,
                                               const std::vector<double>& times, int d = 4,
                                               const SpectralOptions& opt = {});

// Spatial reach of the data: last radius where |f| exceeds rel_tol * max|f|.
double support_extent(const RadialFunction& f, double rel_tol = 1e-9);

}  // namespace channelwave
