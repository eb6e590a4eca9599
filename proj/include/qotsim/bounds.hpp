#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "qotsim/primitives.hpp"

namespace qotsim {

/// Full parameter vector driving both the trace-distance bounds and the
/// protocol sizing.  Sampling slacks are kept per layer; the OT-layer pair
/// is (xi_ot, delta_ot), the extractable layer uses (xi_ex, delta_ex).
struct SecurityParams {
    size_t lambda_ot = 0;
    size_t lambda_ex = 0;
    size_t m = 0;          // hash preimage size per seed family
    size_t k = 0;          // family pairs; k = floor(lambda_ex / m)
    size_t w = 0;          // parallel commitments per session
    size_t v = 0;          // multi-OT block size (0 = single OT)
    size_t ell = kLambdaPqs;      // key/hash output length in the bounds
    double xi_ot = 0.0, delta_ot = 0.0;
    double xi_ex = 0.0, delta_ex = 0.0;
    double alpha = 0.0;
    double vartheta = 0.0;
    double eta = 0.0, zeta = 0.0; // chi = eta + zeta, eta == zeta
    double target_delta = 0.0;

    double chi() const { return eta + zeta; }
    size_t q_ot() const { return size_t(std::max(1.0, std::ceil(0.1 * (double(lambda_ot) / 2.0)))); }
    size_t q_ere() const { return size_t(std::max(1.0, std::ceil(0.1 * double(m)))); }

    void validate() const;
};

struct BenchmarkRow {
    std::string protocol;
    double alpha = 0.0;
    double vartheta = 0.0;
    std::optional<double> q_ro;
    double n_bb84 = 0.0;
    double t_acq_seconds = 0.0;   // at 1 MHz
    std::string note;
};

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double binary_entropy(double x);

/// Lemma "distance bound for a malicious Bob" evaluated verbatim; the
/// log2 variants never underflow.
double log2_bound_ot_malicious_bob(const SecurityParams& p);
double bound_ot_malicious_bob(const SecurityParams& p);

/// Appendix bound for the extractable layer, verbatim: the leaked bits
/// 2*vartheta*lambda_ex are all charged against the m-bit hashed subset.
double log2_bound_ere_malicious_receiver(const SecurityParams& p);
double bound_ere_malicious_receiver(const SecurityParams& p);

/// Alternative leak accounting: the T-bar level inequality restricted
/// proportionally to the subset.  Coincides with the verbatim bound at
/// vartheta = 0; used by the optimizer when the verbatim accounting
/// admits no parameters at all (see optimize_params).
double log2_bound_ere_subset_proportional(const SecurityParams& p);
double bound_ere_subset_proportional(const SecurityParams& p);

/// Multi-OT distillation bound with ell = lambda_pqs and q = 0.1 * (v/2).
double log2_bound_multi_ot(const SecurityParams& p, size_t v, size_t n_ot);
double bound_multi_ot(const SecurityParams& p, size_t v, size_t n_ot);

struct OptimizeResult {
    SecurityParams params;
    double n_bb84 = 0.0;
    std::string chi_model;
    bool used_proportional_leak = false;
};

/// Minimizes N = 2*lambda_ot + 4*lambda_ex subject to both bounds <= target.
/// eta = zeta = (log2 k)^2 / (2k).  Falls back to the proportional leak
/// accounting (recorded in the result) when the verbatim accounting is
/// infeasible for every parameter choice, which happens for vartheta > 0.
OptimizeResult optimize_params(double target_delta, double alpha, double vartheta);

/// Smallest multi-OT block size v meeting the target with p's noise
/// figures, together with n_ot = floor(lambda_ot / v).
struct MultiOtChoice { size_t v; size_t n_ot; double delta; };
std::optional<MultiOtChoice> choose_multi_ot_block(const SecurityParams& p, double target_delta);

BenchmarkRow bench_bckm21(double target_delta, size_t lambda_eq = 128);
BenchmarkRow bench_abkk23(double target_delta, double q_ro, int rounds);

} // namespace qotsim
