#pragma once

#include <array>
#include <string>

#include <json.hpp>

namespace hls {

// All exponents of one (n, alpha, p, q) configuration. Built only through the
// factories below; nothing else in the library does exponent arithmetic.
struct ExponentConfig {
    int n = 0;
    double alpha = 0;
    double p = 0;
    double q = 0;
    double t = 0;
    double theta = 0;
    double kappa = 0;
    double tau1 = 0;
    double tau2 = 0;
    double omega_n = 0;
    double riesz_norm = 0;

    // kernel |x-y|^{-beta}
    double beta() const { return n - alpha; }
    // bubble (|y-y0|^2+d^2)^{-bubble_power()}
    double bubble_power() const { return 0.5 * (n + alpha - 2); }
    // Kelvin weights that preserve the boundary L^p and volume L^t norms
    double boundary_weight() const { return n + alpha - 2; }
    double volume_weight() const { return n + alpha; }
    // dual exponent of p (target exponent of the restriction operator)
    double p_dual() const { return theta + 1; }
};

double critical_p(int n, double alpha);
double critical_q(int n, double alpha);
double riesz_normalization(int n, double alpha);

// q and t from the HLS line through p.
ExponentConfig derive_exponents(int n, double alpha, double p);
ExponentConfig critical_config(int n, double alpha);
// q chosen freely; used for scaling sweeps off the HLS line.
ExponentConfig general_config(int n, double alpha, double p, double q);

double scaling_exponent(const ExponentConfig& cfg);
bool is_subcritical(const ExponentConfig& cfg);
bool is_critical(const ExponentConfig& cfg, double tol = 1e-12);

struct InvariantReport {
    static constexpr int kCount = 7;
    std::array<const char*, kCount> names{"range", "q_from_p", "t_balance", "dual_target", "kappa_theta", "tau_definition", "tau_iff_critical"};
    std::array<double, kCount> residual{};
    double max() const;
};
InvariantReport check_invariants(const ExponentConfig& cfg);

void to_json(nlohmann::json& j, const ExponentConfig& cfg);
void from_json(const nlohmann::json& j, ExponentConfig& cfg);

}  // namespace hls
