#include <doctest.h>

#include <cmath>

#include "homsim/errors.hpp"
#include "homsim/regime.hpp"
#include "homsim/units.hpp"
#include "support.hpp"

using namespace homsim;

TEST_SUITE("evaluate_condition") {
    TEST_CASE("published examples") {
        const ConditionResult nice = evaluate_condition(14.0, 1.2, 0.0);
        CHECK(nice.ok);
        CHECK(nice.margin == doctest::Approx(11.7).epsilon(0.01));
        const ConditionResult geneva = evaluate_condition(350.0, 70.0, 0.0);
        CHECK(geneva.ok);
        CHECK(geneva.margin == doctest::Approx(5.0));
        const ConditionResult beijing = evaluate_condition(0.335, 0.060, 0.002);
        CHECK(beijing.ok);
        CHECK(beijing.margin == doctest::Approx(5.6).epsilon(0.01));
        const ConditionResult vienna = evaluate_condition(2.3, 0.050, 0.260);
        CHECK(vienna.ok);
        CHECK(vienna.total_uncertainty_ps == doctest::Approx(0.265).epsilon(0.01));
        CHECK(vienna.margin == doctest::Approx(8.7).epsilon(0.01));
    }

    TEST_CASE("quadrature or linear combination") {
        CHECK(evaluate_condition(10.0, 3.0, 4.0).total_uncertainty_ps == doctest::Approx(5.0));
        CHECK(evaluate_condition(10.0, 3.0, 4.0, UncertaintyCombination::linear).total_uncertainty_ps ==
              doctest::Approx(7.0));
    }

    TEST_CASE("condition boundary") {
        CHECK(evaluate_condition(5.0, 3.0, 4.0).ok);
        CHECK_FALSE(evaluate_condition(4.99, 3.0, 4.0).ok);
    }

    TEST_CASE("negative inputs") {
        CHECK_THROWS_AS((void)evaluate_condition(-1.0, 1.0, 0.0), DomainError);
        CHECK_THROWS_AS((void)evaluate_condition(1.0, 1.0, -0.1), DomainError);
    }
}

TEST_SUITE("build_table") {
    // The quoted values carry two significant figures (three for 0.335 ps);
    // each must be the computed value rounded to that precision.
    TEST_CASE("published rows reproduce the quoted coherence times") {
        const auto configs = published_comparison_rows();
        RegimeTableOptions o;
        o.predict_visibility = false;
        const auto rows = build_table(configs, o);
        REQUIRE(rows.size() == 7);
        for (const auto& r : rows) {
            REQUIRE(r.ok());
            REQUIRE(r.quoted_coherence_time_ps.has_value());
            const double q = *r.quoted_coherence_time_ps;
            const int digits = q == 0.335 ? 3 : 2;
            const double half_unit = 0.5 * std::pow(10.0, std::floor(std::log10(q)) - (digits - 1));
            CHECK(std::abs(r.coherence_time_ps - q) <= half_unit);
            CHECK(r.condition_ok == (r.coherence_time_ps >= r.total_uncertainty_ps));
            CHECK(r.condition_margin > 0.0);
        }
        CHECK(rows[0].label == configs[0].label);
        CHECK(rows[6].label == configs[6].label);
    }

    TEST_CASE("quoted columns pass through verbatim") {
        const auto configs = published_comparison_rows();
        RegimeTableOptions o;
        o.predict_visibility = false;
        const auto rows = build_table(configs, o);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            CHECK(rows[k].quoted_rate_pairs_per_s == configs[k].quoted_rate_pairs_per_s);
            CHECK(rows[k].quoted_raw_visibility == configs[k].quoted_raw_visibility);
            CHECK(rows[k].quoted_net_visibility == configs[k].quoted_net_visibility);
            CHECK(rows[k].quoted_brightness == configs[k].quoted_brightness);
        }
    }

    TEST_CASE("only the timing-limited fiber row fails the condition") {
        const auto rows = build_table(published_comparison_rows());
        for (const auto& r : rows) CHECK(r.condition_ok == (r.label != "Atsugi fiber"));
    }

    TEST_CASE("empty input") { CHECK(build_table({}).empty()); }

    TEST_CASE("missing fields become row errors") {
        std::vector<RegimeConfig> configs = published_comparison_rows();
        configs[2].filter_fwhm_pm.reset();
        configs[4].regime.reset();
        RegimeTableOptions o;
        o.predict_visibility = false;
        const auto rows = build_table(configs, o);
        REQUIRE(rows.size() == configs.size());
        CHECK_FALSE(rows[2].ok());
        CHECK(rows[2].error.find("filter_fwhm_pm") != std::string::npos);
        CHECK_FALSE(rows[4].ok());
        CHECK(rows[3].ok());
    }

    TEST_CASE("narrow filter on femtosecond pulses: margin huge, rate penalty reported") {
        RegimeConfig c;
        c.label = "hypothetical";
        c.regime = Regime::fs;
        c.time_uncertainty_ps = 0.1;
        c.filter_fwhm_pm = 10.0;
        c.wavelength_nm = 1550.0;
        const auto rows = build_table(std::vector{c});
        CHECK(rows[0].condition_ok);
        CHECK(rows[0].condition_margin > 1000.0);
        CHECK(rows[0].rate_penalty == doctest::Approx(rows[0].coherence_time_ps / 0.1));
        CHECK_FALSE(rows[0].predicted_visibility.has_value());
    }

    TEST_CASE("margin is inversely proportional to the filter width") {
        for (double w : {10.0, 100.0, 250.0, 800.0}) {
            const double m1 = evaluate_condition(coherence_time(w, 1550.0), 1.2, 0.0).margin;
            const double m2 = evaluate_condition(coherence_time(2.0 * w, 1550.0), 1.2, 0.0).margin;
            CHECK(m1 / m2 == doctest::Approx(2.0).epsilon(1e-14));
        }
    }
}

TEST_SUITE("predict_visibility_for_row") {
    TEST_CASE("rows without a spectral description are not computable") {
        for (const auto& c : published_comparison_rows()) {
            if (!c.spectral) CHECK_FALSE(predict_visibility_for_row(c).has_value());
        }
    }

    TEST_CASE("published ps row uses the full spectral model") {
        const auto rows = published_comparison_rows();
        const auto nice = std::find_if(rows.begin(), rows.end(), [](const auto& r) { return r.spectral.has_value(); });
        REQUIRE(nice != rows.end());
        CHECK(predict_visibility_for_row(*nice).value() == doctest::Approx(testing::reference_gaussian_purity()).epsilon(1e-6));
    }

    TEST_CASE("identical pure sources without jitter") {
        RegimeConfig c;
        c.spectral = testing::pure_source();
        CHECK(predict_visibility_for_row(c).value() == doctest::Approx(1.0).epsilon(1e-6));
    }

    TEST_CASE("4 ps jitter costs less than 5 percent") {
        RegimeConfig c;
        c.spectral = SourceConfig{};
        const double v0 = predict_visibility_for_row(c).value();
        c.sync_jitter_ps = 4.0;
        const double v4 = predict_visibility_for_row(c).value();
        CHECK(v4 < v0);
        CHECK((v0 - v4) / v0 < 0.05);
    }

    TEST_CASE("jitter never raises the visibility") {
        RegimeConfig c;
        c.spectral = SourceConfig{};
        double prev = predict_visibility_for_row(c).value();
        for (double j : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            c.sync_jitter_ps = j;
            const double v = predict_visibility_for_row(c).value();
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("regime names") {
    for (Regime r : {Regime::cw, Regime::ps, Regime::fs}) CHECK(parse_regime(to_string(r)) == r);
    CHECK_THROWS_AS((void)parse_regime("ns"), ConfigurationError);
}
