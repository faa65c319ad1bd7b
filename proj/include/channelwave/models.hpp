#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "channelwave/grid.hpp"

namespace channelwave {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Nonlinearity { Free, WaveMapNative, CriticalNLW, GNLW, LinearizedWM };

// d_t^2 u - d_r^2 u - ((d-1)/r) d_r u = F(r, u)
struct ModelSpec {
    int dimension = 4;
    Nonlinearity kind = Nonlinearity::Free;

    static ModelSpec free(int d);
    static ModelSpec wave_map();
    static ModelSpec critical_nlw();
    static ModelSpec gnlw();
    static ModelSpec linearized_wm();

    void validate() const;
    // Wave-map angles are odd about their origin value; every other model is even.
    bool odd_at_origin() const { return kind == Nonlinearity::WaveMapNative || kind == Nonlinearity::LinearizedWM; }
    double source(double r, double u) const;
    // Potential energy density (without the r^{d-1} weight); enters E with a plus sign.
    double potential_density(double r, double u) const;
    std::string name() const;
    static ModelSpec parse(const std::string& name, int dimension = 0);
};

bool operator==(const ModelSpec& a, const ModelSpec& b);

enum class Profile { Q, W };

struct Bubble {
    int sign = 1;
    double scale = 1.0;
};

struct BubbleConfig {
    Profile profile = Profile::W;
    std::vector<Bubble> entries;
    void validate() const;
};

inline constexpr double lambda_star = 0.20412414523193150818;  // 1/(2*sqrt(6))

double eval_Q(double r);
double eval_Q_prime(double r);
double eval_W(double r);
double eval_W_prime(double r);
// Singular at r = 0; r^2 * Wtilde(r) tends to wtilde_tail_constant.
double eval_Wtilde(double r);
inline constexpr double wtilde_tail_constant = 1.63299316185545206546;  // 2*sqrt(2/3)
double eval_Lambda(double U, int deriv_order = 0);
// Primitive of Lambda vanishing at 0: U^2/2 - (1 - cos(sqrt6 U))/6.
double eval_Lambda_primitive(double U);

// Profile value at scale lambda: Q(r/lambda) or W(r/lambda)/lambda.
double eval_profile(Profile p, double r, double lambda = 1.0);
double eval_profile_prime(Profile p, double r, double lambda = 1.0);
// d/d(log lambda) of eval_profile at fixed r.
double eval_profile_dlog(Profile p, double r, double lambda = 1.0);

RadialFunction eval_bubble_sum(const BubbleConfig& cfg, const RadialGrid& grid);

ModelSpec model_for(Profile p);

// Sup over r > 0 samples of the static-equation residual of f under model m.
double stationarity_residual(const RadialFunction& f, const ModelSpec& m);
double stationarity_residual(Profile p, const RadialGrid& grid);

}  // namespace channelwave
