#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "channelwave/evolve.hpp"

namespace channelwave {

class ChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DataKind { U0Only, U1Only, General };
enum class Solver { FD, Spectral };

std::string to_string(DataKind k);
std::string to_string(Solver s);
DataKind parse_data_kind(const std::string& s);
Solver parse_solver(const std::string& s);

// Measured exterior limits are those of the gradient part int ur^2 r^{d-1} over
// {r > R + |t|} (d = 6: the time-derivative part); ratio = max(plus, minus) / reference.
struct ChannelReport {
    DataKind data_kind = DataKind::U0Only;
    int dimension = 4;
    double R = 0.0;
    double measured_limit_plus = 0.0;
    double measured_limit_minus = 0.0;
    // Companion limits of the other energy component, for the equipartition check.
    double other_limit_plus = 0.0;
    double other_limit_minus = 0.0;
    double reference = 0.0;
    // +infinity when the reference vanishes (vacuous bound).
    double ratio = 0.0;
    double plateau_quality = 0.0;
    bool plateau_reached = false;
    std::vector<std::string> warnings;
};

struct PiProjection {
    double coefficient = 0.0;  // R^2 f(R)
    RadialFunction pi_f;       // on the samples r >= R
    RadialFunction pi_perp_f;
};

// pi_R f = R^2 f(R) / r^2 on {r >= R}.
PiProjection project_pi(const RadialFunction& f, double R);

struct Pi6Projection {
    double coefficient = 0.0;  // 2 R^2 int_R^inf rho u1 drho
    RadialFunction Pi_u1;      // on the samples r >= R
    RadialFunction Pi_perp_u1;
};

// L^2({r > R}, r^5 dr) projection on span(1/r^4). A power-law tail beyond the grid is
// added to the moment; a tail decaying no faster than r^-2 is an error.
Pi6Projection project_Pi6(const RadialFunction& u1, double R);

// int_R^inf f' g' r^3 dr and the matching norm squared.
double h1_inner(const RadialFunction& f, const RadialFunction& g, double R);
double h1_norm_sq(const RadialFunction& f, double R);

struct ChannelOptions {
    double T_max = 64.0;
    Solver solver = Solver::Spectral;
    double plateau_tol = 1e-3;
    double cfl = 0.5;
    SpectralOptions spectral{0.0, 1e-10};
};

// Richardson extrapolation in 1/t from values at T/4, T/2, T.
struct Extrapolation {
    double limit = 0.0;
    double spread = 0.0;  // relative spread of the partial extrapolants
    double quality = 0.0;
    bool plateau = false;
};
Extrapolation richardson_limit(double e_quarter, double e_half, double e_full, double plateau_tol, double scale);

ChannelReport measure_channel(const RadialFunction& u0, const RadialFunction& u1, double R, DataKind kind,
                              const ChannelOptions& opt = {});

// Free 6D wave with data (0, u1).
ChannelReport measure_channel_6d(const RadialFunction& u1, double R, const ChannelOptions& opt = {});

// v(t, r) = int_r^inf rho ut(t, rho) drho for the 6D solution with data (0, u1); returns
// max |v_tt - v_rr - 3 v_r / r| / max |v_tt| over {R + |t| <= r} at time t. Needs data
// smooth enough for the spectral solver at the given tail tolerance.
double transform_6d_residual(const RadialFunction& u1, double R, double t, const SpectralOptions& opt = {0.0, 1e-16});

struct InhomReport {
    double R = 0.0;
    double lhs = 0.0;              // ||u0||_{H1} or ||pi_R^perp u0||_{H1(R)}
    double exterior_limit = 0.0;   // lim ||grad u(t)||_{L^2(r > R + t)}
    double source_norm = 0.0;      // ||1_{r > R + |t|} f||_{L^1 L^2}
    double constant = 2.0;         // 2 or sqrt(20/3)
    double rhs = 0.0;
    bool holds = false;
    double plateau_quality = 0.0;
    bool plateau_reached = false;
};

// Inhomogeneous 4D wave with data (u0, 0) and forcing f on t in [0, T_max] (FD solver);
// f must vanish for t > T_max.
InhomReport inhom_bound_check(const RadialFunction& u0, const SourceFn& f, double R, const ChannelOptions& opt = {});

// Random smooth data: sums of (1 - x^2)^power bumps supported in [lo, hi].
struct Bump {
    double center = 3.0;
    double half_width = 1.0;
    double amplitude = 1.0;
};

struct BatterySample {
    std::vector<Bump> bumps;
    int power = 3;
    double operator()(double r) const;
};

struct BatteryOptions {
    double lo = 1.0;
    double hi = 5.0;
    int power = 3;
    std::size_t max_bumps = 3;
    double min_half_width = 0.3;
};

std::vector<BatterySample> random_battery(std::size_t count, std::uint64_t seed, const BatteryOptions& opt = {});

}  // namespace channelwave
