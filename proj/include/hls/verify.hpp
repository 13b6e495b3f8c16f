#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hls/conformal.hpp"
#include "hls/discretization.hpp"
#include "hls/exponents.hpp"
#include "hls/operators.hpp"

namespace hls {

// ---- harmonic extension (alpha = 2) ----

struct HarmonicResult {
    double max_interior_laplacian = 0;  // |Delta_h u|, stencil spacing h
    double neumann_residual = 0;        // max |d_n u + f| / ||f||_inf, u = E_2 f / (c(n,2)/2), step h/2
    double neumann_residual_stated = 0; // same with u = E_2 f / c(n,2)
    double flux_constant = 0;           // mean of -d_n(E_2 f) / f over the samples
};
// u from direct sums on a boundary grid of spacing h over [-extent, extent]^{n-1}
HarmonicResult check_harmonic_extension(const FieldFn& f, double h, const ExponentConfig& cfg, double extent = 8);

// ---- trace representation (n = 3) ----

enum class TraceVariant {
    Interior,  // f = (1-|x-a|^2)^4 on B_1(a), a = (0, 2): both sides vanish on the boundary
    Boundary,  // a = 0, f even in x_n: nontrivial boundary values
};
// max over samples of |f(x) - int Delta f / ((2-n) C(n) |x-y|^{n-2})| / ||f||_inf
double check_trace_representation(TraceVariant v, int samples, std::uint64_t seed, int refinement = 0);

// ---- log-HLS on the unit ball ----

struct LogHlsResolution {
    int sphere_level = 16;
    int radial_order = 12;
};
struct LogHlsResult {
    double min_slack = 0;         // rhs - lhs with the default prefactor
    double min_slack_stated = 0;  // with the -2 n omega_n prefactor
    double uniform_slack = 0;
    std::vector<double> widths;   // concentrating bump sequence
    std::vector<double> concentration_slack;
    int trend = 0;  // +1 strictly increasing, -1 strictly decreasing, 0 mixed
};
LogHlsResult check_log_hls(int n, int trials, std::uint64_t seed, const LogHlsResolution& res = {});

// ---- Young inequality on the half space, g = exp(-|x|) ----

struct YoungResult {
    double lhs = 0;   // at the worst trial
    double rhs = 0;
    double max_ratio = 0;  // max lhs / rhs over the trials
    bool holds = false;
};
// r may be infinity; h random uniform in [0, 1] per boundary node
YoungResult check_young(double p, double q, double r, int trials, std::uint64_t seed, const HalfSpaceGrids& grids,
                        double tol = 1e-12);

// ---- symmetrization ----

struct SymmetrizationResult {
    double ratio_f = 0;
    double ratio_fstar = 0;
    bool improved = false;
};
SymmetrizationResult check_symmetrization(const ScalarField& f, const ExponentConfig& cfg, const IntegralOperator& op,
                                          double tol = 1e-6);

// ---- named checks ----

struct CheckResult {
    std::string check;
    bool pass = false;
    double residual = 0;
    double tolerance = 0;
    int refinement = 0;
    std::uint64_t seed = 0;
    nlohmann::json details = nlohmann::json::object();
};
nlohmann::json to_json(const CheckResult& r);

struct VerifyOptions {
    std::uint64_t seed = 7;
    int refinement = 0;
    std::optional<double> tol;  // replaces the check's own tolerance
};

const std::vector<std::string>& check_names();
bool is_check_name(const std::string& name);
// throws ValidationError for an unknown name
CheckResult run_check(const std::string& name, const VerifyOptions& opt = {});

}  // namespace hls
