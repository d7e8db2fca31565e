// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "sixdmhs/idet.hpp"
#include "sixdmhs/rng.hpp"

using namespace sixdmhs;

namespace {

EquivalentChannels random_channels(int k_n, int dim, double scale, uint64_t seed) {
    Rng rng(seed);
    EquivalentChannels h(k_n, cvec(dim));
    for (auto& row : h)
        for (auto& v : row) v = rng.cnormal(scale * scale);
    return h;
}

IdetState random_state(int k_n, int dim, double p_tx, uint64_t seed) {
    Rng rng(seed);
    IdetState st;
    st.n_rx = k_n;
    st.n_surfaces = 1;
    st.n_feeds = dim;
    st.precoders.assign(k_n, cvec(dim));
    for (auto& x : st.precoders)
        for (auto& v : x) v = rng.cnormal(p_tx / (k_n * dim));
    st.rho.resize(k_n);
    for (auto& r : st.rho) r = rng.uniform(0.05, 0.95);
    st.vartheta.resize(k_n);
    for (auto& v : st.vartheta) v = rng.cnormal(1.0);
    st.varsigma.assign(k_n, cvec(k_n));
    for (auto& row : st.varsigma)
        for (auto& v : row) v = rng.cnormal(1e-6);
    return st;
}

}  // namespace

TEST_SUITE_BEGIN("idet");

TEST_CASE("EH curve activation, saturation and inverse") {
    EhCurve curve;
    CHECK(curve.gamma(curve.e0) == doctest::Approx(0.0));
    CHECK(curve.gamma(0.0) == doctest::Approx(0.0));
    CHECK(curve.gamma(curve.e0 / 2.0) == doctest::Approx(0.0));
    CHECK(curve.gamma(1.0) >= 0.99 * curve.em);
    CHECK(curve.gamma_inverse(0.0) == doctest::Approx(curve.e0));
    CHECK_THROWS_AS(curve.gamma_inverse(curve.em), std::out_of_range);

    SUBCASE("monotone and bounded on a sweep") {
        double prev = -1.0;
        for (int i = 0; i < 10000; ++i) {
            double p = 1e-5 * i;
            double g = curve.gamma(p);
            CHECK(g >= prev - 1e-15);
            CHECK(g <= curve.em + 1e-12);
            prev = g;
        }
    }

    SUBCASE("round trip within 1e-10") {
        for (int i = 1; i < 1000; ++i) {
            double p_dc = 0.99 * curve.em * i / 1000.0;
            double p_rf = curve.gamma_inverse(p_dc);
            CHECK(std::abs(curve.gamma(p_rf) - p_dc) < 1e-10);
        }
        // monotone inverse
        double prev = 0.0;
        for (int i = 1; i < 100; ++i) {
            double v = curve.gamma_inverse(0.9 * curve.em * i / 100.0);
            CHECK(v > prev);
            prev = v;
        }
    }
}

TEST_CASE("sinr closed forms") {
    const double sigma0 = 1e-13, sigma_cov = 1e-8;

    SUBCASE("single user without splitting") {
        EquivalentChannels h = random_channels(1, 2, 1e-3, 3);
        IdetState st = random_state(1, 2, 1.0, 4);
        st.rho[0] = 0.0;
        cplx c = h[0][0] * st.precoders[0][0] + h[0][1] * st.precoders[0][1];
        rvec g = sinr(h, st, sigma0, sigma_cov);
        CHECK(g[0] == doctest::Approx(std::norm(c) / (sigma0 + sigma_cov)).epsilon(1e-12));
    }

    SUBCASE("rho = 1 shuts the ID branch") {
        EquivalentChannels h = random_channels(1, 2, 1e-3, 5);
        IdetState st = random_state(1, 2, 1.0, 6);
        st.rho[0] = 1.0;
        CHECK(sinr(h, st, sigma0, sigma_cov)[0] == doctest::Approx(0.0));
        EhCurve curve;
        IdetMetrics m = evaluate_metrics(h, st, sigma0, sigma_cov, curve);
        CHECK(m.id_branch_off[0] == 1);
    }

    SUBCASE("symmetric receivers swap cleanly") {
        EquivalentChannels h = random_channels(2, 3, 1e-3, 7);
        IdetState st = random_state(2, 3, 1.0, 8);
        st.rho = {0.3, 0.3};
        rvec g = sinr(h, st, sigma0, sigma_cov);
        std::swap(h[0], h[1]);
        std::swap(st.precoders[0], st.precoders[1]);
        rvec g_swapped = sinr(h, st, sigma0, sigma_cov);
        CHECK(g_swapped[0] == doctest::Approx(g[1]).epsilon(1e-12));
        CHECK(g_swapped[1] == doctest::Approx(g[0]).epsilon(1e-12));
    }
}

TEST_CASE("EH power closed forms and expectation identity") {
    const double sigma0 = 1e-13;
    EquivalentChannels h = random_channels(2, 2, 1e-3, 9);
    IdetState st = random_state(2, 2, 1.0, 10);

    SUBCASE("rho = 0 harvests nothing") {
        IdetState z = st;
        z.rho = {0.0, 0.0};
        rvec p = eh_rf_power(h, z, sigma0);
        CHECK(p[0] == doctest::Approx(0.0));
        CHECK(p[1] == doctest::Approx(0.0));
    }

    SUBCASE("zero precoders leave rho sigma0^2") {
        IdetState z = st;
        for (auto& x : z.precoders) std::fill(x.begin(), x.end(), cplx{0.0, 0.0});
        rvec p = eh_rf_power(h, z, sigma0);
        CHECK(p[0] == doctest::Approx(z.rho[0] * sigma0));
    }

    SUBCASE("matches the Monte-Carlo expectation over symbols") {
        rvec p = eh_rf_power(h, st, sigma0);
        Rng rng(123);
        double acc = 0.0;
        const int n_draws = 200000;
        for (int i = 0; i < n_draws; ++i) {
            cplx s0 = rng.cnormal(1.0), s1 = rng.cnormal(1.0);
            cplx y = 0.0;
            for (int q = 0; q < 2; ++q)
                y += h[0][q] * (st.precoders[0][q] * s0 + st.precoders[1][q] * s1);
            acc += st.rho[0] * (std::norm(y) + sigma0);
        }
        CHECK(acc / n_draws == doctest::Approx(p[0]).epsilon(0.01));
    }
}

TEST_CASE("quadratic transform identities hold at the optimal auxiliaries") {
    const double sigma0 = 1e-13, sigma_cov = 1e-8;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        EquivalentChannels h = random_channels(3, 3, 1e-3, 100 + seed);
        IdetState st = random_state(3, 3, 1.0, 200 + seed);
        // w_k[k'] couplings
        std::vector<cvec> w(3, cvec(3));
        for (int k = 0; k < 3; ++k)
            for (int kp = 0; kp < 3; ++kp) {
                cplx s = 0.0;
                for (int i = 0; i < 3; ++i) s += h[k][i] * st.precoders[kp][i];
                w[k][kp] = s;
            }
        rvec g_true = sinr(h, st, sigma0, sigma_cov);
        rvec p_true = eh_rf_power(h, st, sigma0);
        for (int k = 0; k < 3; ++k) {
            double one_m_rho = 1.0 - st.rho[k];
            double interf = 0.0;
            for (int kp = 0; kp < 3; ++kp)
                if (kp != k) interf += std::norm(w[k][kp]);
            double denom = one_m_rho * interf + one_m_rho * sigma0 + sigma_cov;
            cplx vartheta_star = std::sqrt(one_m_rho) * w[k][k] / denom;
            double gamma_dot =
                2.0 * std::sqrt(one_m_rho) * std::real(std::conj(vartheta_star) * w[k][k]) -
                std::norm(vartheta_star) * denom;
            CHECK(std::abs(gamma_dot - g_true[k]) < 1e-10 * std::max(1.0, g_true[k]));

            // varsigma* = sqrt(rho) w_k gives the true EH power
            double p_dot = 0.0;
            {
                cplx dot = 0.0;
                double nrm = 0.0;
                for (int kp = 0; kp < 3; ++kp) {
                    cplx sig = std::sqrt(st.rho[k]) * w[k][kp];
                    dot += std::conj(sig) * (std::sqrt(st.rho[k]) * w[k][kp]);
                    nrm += std::norm(sig);
                }
                p_dot = 2.0 * std::real(dot) - nrm + st.rho[k] * sigma0;
            }
            CHECK(std::abs(p_dot - p_true[k]) < 1e-10 * std::max(1e-12, p_true[k]));
        }
    }
}

TEST_CASE("single-user optimum matches the closed form") {
    // K = 1, Q = 1, R0 = 0: rho* = 1 and X at full power matched
    EquivalentChannels h(1, cvec(1, cplx{2e-4, 1e-4}));
    EhCurve curve;
    IdetOptions opt;
    opt.p_tx = 10.0;
    opt.r0 = 0.0;
    IdetResult res = optimize_idet(h, curve, opt);
    double p_rf_closed = std::norm(h[0][0]) * opt.p_tx + opt.sigma0_sq;
    double closed = curve.gamma(p_rf_closed);
    CHECK(res.metrics.min_eh_dc >= 0.99 * closed);
    CHECK(res.metrics.min_eh_dc <= closed * (1.0 + 1e-9));
    CHECK(res.state.rho[0] > 0.99);
}

TEST_CASE("objective trace is non-decreasing on random instances") {
    EhCurve curve;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        EquivalentChannels h = random_channels(3, 3, 2e-4, 300 + seed);
        IdetOptions opt;
        opt.p_tx = 10.0;
        opt.r0 = 1.0;
        opt.subgradient_iters = 500;
        IdetResult res;
        try {
            res = optimize_idet(h, curve, opt);
        } catch (const InfeasibleError&) {
            continue;  // rare bad draw; feasibility is its own test
        }
        for (size_t i = 1; i < res.objective_trace.size(); ++i)
            CHECK(res.objective_trace[i] >=
                  res.objective_trace[i - 1] -
                      1e-9 * std::max(1e-12, std::abs(res.objective_trace[i - 1])));
        // rate floor honored by the true rates
        for (double r : res.metrics.rate) CHECK(r >= opt.r0 - 1e-6);
        // power budget
        CHECK(res.state.total_power() <= opt.p_tx * (1.0 + 1e-9));
    }
}

TEST_CASE("rate floor above capacity is infeasible with a certificate") {
    EquivalentChannels h(1, cvec(1, cplx{1e-6, 0.0}));
    EhCurve curve;
    IdetOptions opt;
    opt.p_tx = 1.0;
    opt.r0 = 30.0;  // far beyond reach
    CHECK_THROWS_AS(optimize_idet(h, curve, opt), InfeasibleError);
    try {
        optimize_idet(h, curve, opt);
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.what()).find("max-min rate") != std::string::npos);
    }
}

TEST_CASE("tighter rate floors cannot raise the minimum EH power") {
    EquivalentChannels h = random_channels(2, 2, 2e-4, 777);
    EhCurve curve;
    IdetOptions opt;
    opt.p_tx = 10.0;
    opt.r0 = 0.0;
    IdetResult loose = optimize_idet(h, curve, opt);
    opt.r0 = 4.0;
    IdetResult tight = optimize_idet(h, curve, opt);
    CHECK(tight.metrics.min_eh_dc <= loose.metrics.min_eh_dc * (1.0 + 1e-6));
}

TEST_SUITE_END();
