// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "sixdmhs/harness.hpp"

using namespace sixdmhs;

namespace {

Scenario tiny_scenario() {
    Scenario s;
    s.m_x = 6;
    s.m_y = 6;
    s.n_surfaces = 2;
    s.n_slots = 6;
    s.sense_n_x = 16;
    s.sense_n_y = 16;
    s.trials = 2;
    s.r0 = 0.5;
    s.subgradient_iters = 400;
    s.search_restarts = 4;
    s.rx_range_min = 5.0;
    s.rx_range_max = 8.0;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("scenario JSON round trip") {
    Scenario s = tiny_scenario();
    s.mask_mode = MaskMode::Normal;
    s.schemes = {SchemeId::Proposed, SchemeId::Fpa};
    s.rmse_injection = 0.1;
    Scenario t = Scenario::from_json(s.to_json());
    CHECK(t.m_x == s.m_x);
    CHECK(t.n_slots == s.n_slots);
    CHECK(t.mask_mode == MaskMode::Normal);
    CHECK(t.schemes.size() == 2);
    CHECK(t.rmse_injection == doctest::Approx(0.1));
    CHECK(t.config_hash() == s.config_hash());
    CHECK(t.wavelength() == doctest::Approx(kSpeedOfLight / 30e9).epsilon(1e-12));
}

TEST_CASE("overhead model orders the pilot costs") {
    OverheadModel om;
    int k = 3, b = 3, q = 1, m = 256;
    double ts1 = om.ts_equivalent(k, b, q);
    double ts2 = om.ts_full_csi(k, b, m);
    CHECK(ts1 < ts2);
    CHECK(om.factor(ts1) > om.factor(ts2));
    CHECK(om.factor(1e9) == doctest::Approx(0.0));  // clamped at zero
}

TEST_CASE("scheme names round trip") {
    for (auto s : {SchemeId::Proposed, SchemeId::Fpa, SchemeId::RotationOnly,
                   SchemeId::TranslationOnly, SchemeId::LsSensing, SchemeId::PerfectCsi,
                   SchemeId::LosOnly})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_THROWS_AS(scheme_from_name("bogus"), std::invalid_argument);
}

TEST_CASE("identical seeds reproduce a trial bit-identically") {
    Scenario s = tiny_scenario();
    ScenarioContext ctx = make_context(s);
    TrialResult a = run_protocol(ctx, SchemeId::Proposed, trial_seed(s.master_seed, 0));
    TrialResult b = run_protocol(ctx, SchemeId::Proposed, trial_seed(s.master_seed, 0));
    CHECK(a.sensing_rmse == b.sensing_rmse);
    CHECK(a.stage2_objective == b.stage2_objective);
    CHECK(a.metrics.min_eh_dc == b.metrics.min_eh_dc);
    for (size_t k = 0; k < a.estimates.size(); ++k) {
        CHECK(a.estimates[k].x == b.estimates[k].x);
        CHECK(a.estimates[k].y == b.estimates[k].y);
        CHECK(a.estimates[k].z == b.estimates[k].z);
    }
}

TEST_CASE("matched trials share the channel across schemes") {
    Scenario s = tiny_scenario();
    ScenarioContext ctx = make_context(s);
    TrialResult a = run_protocol(ctx, SchemeId::Proposed, trial_seed(s.master_seed, 1));
    TrialResult b = run_protocol(ctx, SchemeId::Fpa, trial_seed(s.master_seed, 1));
    for (size_t k = 0; k < a.truths.size(); ++k)
        CHECK((a.truths[k] - b.truths[k]).norm() == doctest::Approx(0.0));
}

TEST_CASE("sweep emits trial rows plus aggregates that match recomputation") {
    Scenario s = tiny_scenario();
    s.trials = 3;
    SweepResult res = sweep(s, SweepAxis::PTx, {40.0}, {SchemeId::Proposed});
    int trial_rows = 0;
    const SweepRow* agg = nullptr;
    double mean = 0.0;
    for (const auto& r : res.rows) {
        if (r.row_type == "trial") {
            ++trial_rows;
            mean += r.min_eh_dc;
        } else {
            agg = &r;
        }
    }
    CHECK(trial_rows == 3);
    REQUIRE(agg != nullptr);
    CHECK(agg->min_eh_dc == doctest::Approx(mean / 3.0).epsilon(1e-12));
    CHECK(agg->n == 3);

    auto a = res.aggregate(40.0, "proposed");
    CHECK(a.mean == doctest::Approx(agg->min_eh_dc).epsilon(1e-12));

    std::string csv = res.to_csv();
    CHECK(csv.find("row_type,axis,axis_value") == 0);
    CHECK(csv.find("proposed") != std::string::npos);
}

TEST_CASE("rmse injection controls the sensing error exactly") {
    Scenario s = tiny_scenario();
    s.rmse_injection = 0.17;
    ScenarioContext ctx = make_context(s);
    SensingOutcome out = run_sensing(ctx, SchemeId::Proposed, trial_seed(7, 0));
    for (size_t k = 0; k < out.estimates.size(); ++k) {
        double err = (out.estimates[k].f_global - out.truths[k]).norm();
        CHECK(err == doctest::Approx(0.17).epsilon(1e-9));
    }
    s.rmse_injection = 0.0;
    ScenarioContext ctx0 = make_context(s);
    SensingOutcome exact = run_sensing(ctx0, SchemeId::Proposed, trial_seed(7, 0));
    CHECK(exact.rmse_term == doctest::Approx(0.0));
}

TEST_CASE("experiment presets cover the figure suite") {
    Scenario s = tiny_scenario();
    for (int fig : {4, 5, 7, 9, 10}) {
        ExperimentSpec spec = experiment_preset(fig, s);
        CHECK(!spec.values.empty());
        CHECK(!spec.schemes.empty());
        CHECK(!spec.name.empty());
    }
    CHECK_THROWS_AS(experiment_preset(99, s), std::invalid_argument);
}

TEST_SUITE_END();
