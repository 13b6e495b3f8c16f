#include "hls/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hls/core.hpp"
#include "hls/special.hpp"

namespace hls {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

void check_n_alpha(int n, double alpha) {
    if (n < 2) throw ValidationError("n must be >= 2 (got " + std::to_string(n) + ")");
    if (!(alpha > 1.0 && alpha < n))
        throw ValidationError("alpha must satisfy 1 < alpha < n (got alpha=" + fmt(alpha) +
                              ", n=" + std::to_string(n) + ")");
}

void check_p(int n, double alpha, double p) {
    const double pmax = (n - 1) / (alpha - 1);
    if (!(p > 1.0)) throw ValidationError("p must satisfy p > 1 (got p=" + fmt(p) + ")");
    if (!(p < pmax))
        throw ValidationError("p must satisfy p < (n-1)/(alpha-1) = " + fmt(pmax) + " (got p=" + fmt(p) + ")");
}

ExponentConfig assemble(int n, double alpha, double p, double q) {
    ExponentConfig c;
    c.n = n;
    c.alpha = alpha;
    c.p = p;
    c.q = q;
    // ((n-1)/n)(1/p) + 1/t + (n-alpha+1)/n = 2
    c.t = 1.0 / (2.0 - (n - 1.0) / (n * p) - (n - alpha + 1.0) / n);
    c.theta = 1.0 / (p - 1.0);
    c.kappa = q - 1.0;
    c.tau1 = n + alpha - c.kappa * (n - alpha);
    c.tau2 = n + alpha - 2.0 - c.theta * (n - alpha);
    c.omega_n = unit_ball_volume(n);
    c.riesz_norm = riesz_normalization(n, alpha);
    return c;
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

}  // namespace

double critical_p(int n, double alpha) { return 2.0 * (n - 1) / (n + alpha - 2); }
double critical_q(int n, double alpha) { return 2.0 * n / (n - alpha); }

double riesz_normalization(int n, double alpha) {
    return std::pow(kPi, 0.5 * n) * std::pow(2.0, alpha) * std::tgamma(0.5 * alpha) / std::tgamma(0.5 * (n - alpha));
}

ExponentConfig derive_exponents(int n, double alpha, double p) {
    check_n_alpha(n, alpha);
    check_p(n, alpha, p);
    const double inv_q = (n - 1.0) / n * (1.0 / p - (alpha - 1.0) / (n - 1.0));
    auto c = assemble(n, alpha, p, 1.0 / inv_q);
    // the critical point is hit exactly when p is, so zero the rounding noise
    if (std::abs(p - critical_p(n, alpha)) <= 1e-14 * p) {
        c.q = critical_q(n, alpha);
        c.kappa = c.q - 1.0;
        c.tau1 = 0.0;
        c.tau2 = 0.0;
    }
    return c;
}

ExponentConfig critical_config(int n, double alpha) {
    check_n_alpha(n, alpha);
    auto c = assemble(n, alpha, critical_p(n, alpha), critical_q(n, alpha));
    c.tau1 = 0.0;
    c.tau2 = 0.0;
    return c;
}

ExponentConfig general_config(int n, double alpha, double p, double q) {
    check_n_alpha(n, alpha);
    check_p(n, alpha, p);
    if (!(q > 1.0)) throw ValidationError("q must satisfy q > 1 (got q=" + fmt(q) + ")");
    return assemble(n, alpha, p, q);
}

double scaling_exponent(const ExponentConfig& c) {
    double s = c.alpha - 1.0 + c.n / c.q - (c.n - 1.0) / c.p;
    return std::abs(s) < 1e-13 ? 0.0 : s;
}

bool is_subcritical(const ExponentConfig& c) {
    const double pc = critical_p(c.n, c.alpha), qc = critical_q(c.n, c.alpha);
    const double slack = 1e-12;
    bool p_ok = c.p >= pc * (1 - slack) && c.p < 2.0;
    bool q_ok = c.q > 2.0 && c.q <= qc * (1 + slack);
    return p_ok && q_ok && scaling_exponent(c) > 0.0;
}

bool is_critical(const ExponentConfig& c, double tol) {
    return rel(c.p, critical_p(c.n, c.alpha)) <= tol && rel(c.q, critical_q(c.n, c.alpha)) <= tol;
}

double InvariantReport::max() const { return *std::max_element(residual.begin(), residual.end()); }

InvariantReport check_invariants(const ExponentConfig& c) {
    InvariantReport r;
    const int n = c.n;
    const double a = c.alpha;
    bool in_range = n >= 2 && a > 1 && a < n && c.p > 1 && c.p < (n - 1) / (a - 1);
    r.residual[0] = in_range ? 0.0 : 1.0;
    r.residual[1] = rel(1.0 / c.q, (n - 1.0) / n * (1.0 / c.p - (a - 1.0) / (n - 1.0)));
    r.residual[2] = std::abs((n - 1.0) / n / c.p + 1.0 / c.t + (n - a + 1.0) / n - 2.0) / 2.0;
    // the restriction operator lands in L^{p'}: 1/p' = (n/(n-1))(1/t - alpha/n)
    // both sides are differences of O(1) terms; measure against the terms, not
    // the (possibly cancelled) difference
    r.residual[3] = std::abs(1.0 / c.p_dual() - n / (n - 1.0) * (1.0 / c.t - a / n)) /
                    std::max(1.0 / c.p_dual(), n / (n - 1.0) * std::max(1.0 / c.t, a / n));
    r.residual[4] = std::abs(1.0 / (c.kappa + 1.0) - (n - 1.0) / n * ((n - a) / (n - 1.0) - 1.0 / (c.theta + 1.0))) /
                    std::max(1.0 / (c.kappa + 1.0), (n - 1.0) / n * std::max((n - a) / (n - 1.0), 1.0 / (c.theta + 1.0)));
    double d1 = std::abs(c.tau1 - (n + a - c.kappa * (n - a))) / (n + a);
    double d2 = std::abs(c.tau2 - (n + a - 2.0 - c.theta * (n - a))) / (n + a);
    r.residual[5] = std::max(d1, d2);
    bool taus_zero = std::abs(c.tau1) <= 1e-10 && std::abs(c.tau2) <= 1e-10;
    bool crit = rel(c.p, critical_p(n, a)) <= 1e-12;
    r.residual[6] = (taus_zero == crit) ? 0.0 : 1.0;
    return r;
}

void to_json(nlohmann::json& j, const ExponentConfig& c) {
    j = nlohmann::json{{"n", c.n},         {"alpha", c.alpha}, {"p", c.p},
                       {"q", c.q},         {"t", c.t},         {"theta", c.theta},
                       {"kappa", c.kappa}, {"tau1", c.tau1},   {"tau2", c.tau2}};
}

void from_json(const nlohmann::json& j, ExponentConfig& c) {
    int n = j.at("n").get<int>();
    double alpha = j.at("alpha").get<double>();
    double p = j.at("p").get<double>();
    ExponentConfig built = derive_exponents(n, alpha, p);
    if (j.contains("q") && rel(j.at("q").get<double>(), built.q) > 1e-12)
        built = general_config(n, alpha, p, j.at("q").get<double>());
    for (const char* key : {"t", "theta", "kappa", "tau1", "tau2"}) {
        if (!j.contains(key)) continue;
        double given = j.at(key).get<double>();
        double mine = key == std::string("t")       ? built.t
                      : key == std::string("theta") ? built.theta
                      : key == std::string("kappa") ? built.kappa
                      : key == std::string("tau1")  ? built.tau1
                                                    : built.tau2;
        if (std::abs(given - mine) > 1e-9 * std::max(1.0, std::abs(mine)))
            throw ValidationError(std::string("exponent config: field '") + key + "' inconsistent with (n, alpha, p, q)");
    }
    c = built;
}

}  // namespace hls
