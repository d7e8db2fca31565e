// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "sixdmhs/common.hpp"

namespace sixdmhs {

// Sigmoidal RF-to-DC conversion with activation power E0 and saturation Em.
struct EhCurve {
    double xi = 274.0;     // [1/W]
    double nu = 0.29;
    double e0 = 0.064e-3;  // activation [W]
    double em = 24e-3;     // saturation [W]

    double gamma(double p_rf) const;
    // Closed-form logistic inversion; valid for 0 <= p_dc < em.
    double gamma_inverse(double p_dc) const;
};

// Per-receiver downlink state. Precoders are indexed [k][b * Q + q].
struct IdetState {
    int n_rx = 0;
    int n_surfaces = 0;
    int n_feeds = 0;
    std::vector<cvec> precoders;   // X_k, length B*Q each
    rvec rho;                      // power splitting factors in [0, 1]
    cvec vartheta;                 // SINR auxiliaries
    std::vector<cvec> varsigma;    // EH auxiliaries, length K each

    double total_power() const {
        double s = 0.0;
        for (const auto& x : precoders) s += norm2sq(x);
        return s;
    }
};

struct IdetMetrics {
    rvec sinr;
    rvec rate;
    rvec eh_rf;
    rvec eh_dc;
    double min_eh_dc = 0.0;
    std::vector<uint8_t> id_branch_off;  // rho == 1 flag per receiver
};

// Equivalent channels, hbar[k] of length B*Q.
using EquivalentChannels = std::vector<cvec>;

rvec sinr(const EquivalentChannels& hbar, const IdetState& state, double sigma0_sq,
          double sigma_cov_sq);

rvec eh_rf_power(const EquivalentChannels& hbar, const IdetState& state, double sigma0_sq);

IdetMetrics evaluate_metrics(const EquivalentChannels& hbar, const IdetState& state,
                             double sigma0_sq, double sigma_cov_sq, const EhCurve& curve);

struct IdetOptions {
    double p_tx = 10.0;          // power budget [W]
    double r0 = 0.0;             // per-receiver rate floor [bit/s/Hz]
    double sigma0_sq = 1e-13;
    double sigma_cov_sq = 1e-8;
    double epsilon = 1e-4;       // relative stopping tolerance
    int max_outer = 60;
    int subgradient_iters = 2000;
    double subgradient_tol = 1e-6;
};

struct IdetResult {
    IdetState state;
    IdetMetrics metrics;
    rvec objective_trace;        // min_k Gamma(P_EH,k) per outer cycle
    int iterations = 0;
    double max_min_rate = 0.0;   // achievable max-min rate certificate
};

// Algorithm 3: alternating X / rho / vartheta / varsigma updates of the
// quadratic-transform surrogates for the min-EH maximization under a rate
// floor and a transmit power budget. Throws InfeasibleError when r0 exceeds
// the achievable max-min rate (the certificate rides on the exception text
// and in IdetResult::max_min_rate of the feasibility probe).
IdetResult optimize_idet(const EquivalentChannels& hbar, const EhCurve& curve,
                         const IdetOptions& opt);

// Max-min rate over precoders only (rho = 0); used as the feasibility probe.
double max_min_rate(const EquivalentChannels& hbar, const IdetOptions& opt);

}  // namespace sixdmhs
