#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "eabf/analytic.hpp"
#include "eabf/errors.hpp"

using namespace eabf;

namespace {

// Enumerates all K^n preamble choices; returns total singleton preambles and
// total collided devices over every vector.
struct Enumeration {
    std::int64_t vectors = 0;
    std::int64_t singletons = 0;
    std::int64_t collided = 0;
};

Enumeration enumerate(int n, int k) {
    Enumeration e;
    std::vector<int> choice(static_cast<std::size_t>(n), 0);
    while (true) {
        std::vector<int> load(static_cast<std::size_t>(k), 0);
        for (int c : choice) ++load[static_cast<std::size_t>(c)];
        for (int l : load) {
            if (l == 1) ++e.singletons;
            if (l >= 2) e.collided += l;
        }
        ++e.vectors;
        int pos = 0;
        while (pos < n && ++choice[static_cast<std::size_t>(pos)] == k) choice[static_cast<std::size_t>(pos++)] = 0;
        if (pos == n) break;
    }
    return e;
}

std::int64_t ipow(std::int64_t b, int e) {
    std::int64_t r = 1;
    while (e-- > 0) r *= b;
    return r;
}

Scenario small_scenario(std::int64_t population) {
    Scenario s;
    s.profile.population = population;
    return s;
}

}  // namespace

TEST_CASE("collision formula matches exhaustive enumeration") {
    for (int k = 1; k <= 4; ++k) {
        for (int n = 1; n <= 6; ++n) {
            const auto e = enumerate(n, k);
            CAPTURE(n);
            CAPTURE(k);
            REQUIRE(e.vectors == ipow(k, n));
            // Sum of singletons over all vectors is n (K-1)^(n-1) K, i.e. the
            // mean is n (1 - 1/K)^(n-1), exactly.
            CHECK(e.singletons == n * ipow(k - 1, n - 1) * k);
            CHECK(e.singletons + e.collided == n * e.vectors);
            const double mean_collided = static_cast<double>(e.collided) / static_cast<double>(e.vectors);
            CHECK(expected_collisions(n, k) == doctest::Approx(mean_collided).epsilon(1e-14));
        }
    }
}

TEST_CASE("collision formula edge cases") {
    CHECK(expected_collisions(0.0, 54) == 0.0);
    CHECK(expected_collisions(1.0, 54) == 0.0);
    CHECK(expected_collisions(2.0, 2) == doctest::Approx(1.0));
    CHECK(expected_collisions(0.5, 54) == 0.0);  // clamped
    CHECK(expected_collisions(1.0, 1) == 0.0);
    CHECK(expected_collisions(3.0, 1) == 3.0);
    CHECK_THROWS_AS(expected_collisions(-1.0, 54), DomainError);
    CHECK_THROWS_AS(expected_collisions(1.0, 0), DomainError);
}

TEST_CASE("collision sandwich and monotonicity") {
    double previous = 0.0;
    for (double a = 0.0; a <= 400.0; a += 0.25) {
        const double c = expected_collisions(a, 54);
        CHECK(c >= 0.0);
        CHECK(c <= a);
        if (a >= 1.0) CHECK(c >= previous);
        previous = c;
    }
}

TEST_CASE("first slot and P = 1 terms") {
    const auto scenario = small_scenario(30000);
    const auto lambda = access_intensities(scenario.profile, 5.0);
    const std::vector<double> no_collisions;
    BarringSetting s{0.7, 8000};
    CHECK(expected_attempts(1, lambda, no_collisions, s, scenario) == doctest::Approx(0.7 * lambda[0]));

    // With P = 1 only the j = 0 term survives.
    std::vector<double> c(100);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.01 * static_cast<double>(k % 7);
    BarringSetting open{1.0, 40};
    for (std::int64_t i : {1, 5, 9, 50, 101}) {
        double expected = lambda[static_cast<std::size_t>(i - 1)];
        for (std::int64_t l = i - 4; l <= i - 1; ++l)
            if (l >= 1) expected += 0.25 * c[static_cast<std::size_t>(l - 1)];
        CHECK(expected_attempts(i, lambda, c, open, scenario) == doctest::Approx(expected).epsilon(1e-14));
    }
}

TEST_CASE("both Q conventions give the same sum") {
    const auto scenario = small_scenario(30000);
    const auto lambda = access_intensities(scenario.profile, 5.0);
    std::vector<double> c(3000);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::sin(0.01 * static_cast<double>(k)) + 1.0;
    for (BarringSetting s : {BarringSetting{0.7, 100}, BarringSetting{0.3, 25}, BarringSetting{0.5, 5}}) {
        for (std::int64_t i = 1; i <= 2500; i += 7) {
            CHECK(expected_attempts(i, lambda, c, s, scenario, QIndexing::interval) ==
                  expected_attempts(i, lambda, c, s, scenario, QIndexing::floor_ratio));
        }
    }
}

TEST_CASE("recurrence equals the literal sum") {
    auto scenario = small_scenario(3000);
    scenario.profile.activation_span_ms = 1000.0;
    for (BarringSetting s : {BarringSetting{0.7, 100}, BarringSetting{0.2, 15}, BarringSetting{0.3, 5}}) {
        RecursionOptions fast;
        RecursionOptions literal;
        literal.literal_sum = true;
        const auto a = run_recursion(s, scenario, fast);
        const auto b = run_recursion(s, scenario, literal);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a.rows[k].attempts == doctest::Approx(b.rows[k].attempts).epsilon(1e-10));
            CHECK(a.rows[k].collisions == doctest::Approx(b.rows[k].collisions).epsilon(1e-10));
        }
        literal.indexing = QIndexing::floor_ratio;
        const auto c = run_recursion(s, scenario, literal);
        REQUIRE(c.size() == b.size());
        for (std::size_t k = 0; k < c.size(); ++k) CHECK(c.rows[k].attempts == b.rows[k].attempts);
    }
}

TEST_CASE("single device trace") {
    auto scenario = small_scenario(1);
    const auto trace = run_recursion(BarringSetting{1.0, 5}, scenario, std::vector<double>{1.0});
    REQUIRE(trace.size() == 1);
    CHECK(trace.rows[0].attempts == 1.0);
    CHECK(trace.rows[0].collisions == 0.0);
    CHECK(trace.rows[0].cumulative_successes == 1.0);
    CHECK(success_probability(trace) == 1.0);
}

TEST_CASE("trace invariants on the reference settings") {
    const Scenario scenario;
    for (BarringSetting s : {BarringSetting{0.5, 16000}, BarringSetting{0.7, 8000}, BarringSetting{0.9, 4000},
                             BarringSetting{0.08, 500}}) {
        const auto trace = run_recursion(s, scenario);
        double previous = 0.0;
        for (const auto& row : trace.rows) {
            CHECK(row.collisions >= 0.0);
            CHECK(row.collisions <= row.attempts);
            CHECK(row.successes == doctest::Approx(row.attempts - row.collisions));
            CHECK(row.cumulative_successes >= previous);
            previous = row.cumulative_successes;
        }
        CHECK(30000.0 - trace.rows.back().cumulative_successes < 0.5);
        CHECK(30000.0 - trace.rows[trace.size() - 2].cumulative_successes >= 0.5);
        const double ps = success_probability(trace);
        CHECK(ps >= 0.0);
        CHECK(ps <= 1.0);
        CHECK(mean_attempts(ps) * ps == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("success probability and delay of the reference setting") {
    const Scenario scenario;
    const BarringSetting s{0.7, 8000};
    const auto m = qos_metrics(run_recursion(s, scenario), s, scenario);
    CHECK(std::abs(m.success_probability - 0.75) <= 0.02);
    CHECK(std::abs(m.mean_access_delay_ms / 4560.0 - 1.0) <= 0.05);
}

TEST_CASE("mean attempts and delay formula") {
    CHECK(mean_attempts(1.0) == 1.0);
    CHECK(mean_attempts(0.5) == 2.0);
    CHECK(mean_attempts(0.75) == doctest::Approx(4.0 / 3.0));
    CHECK_THROWS_AS(mean_attempts(0.0), DomainError);

    const Scenario scenario;
    CHECK(mean_access_delay(BarringSetting{1.0, 5}, scenario, 1.0) == 24.0);
    // 24 + (0.5/0.5)*1000*2 + (2-1)*(5+10)
    CHECK(mean_access_delay(BarringSetting{0.5, 1000}, scenario, 2.0) == doctest::Approx(2039.0));
    CHECK_THROWS_AS(mean_access_delay(BarringSetting{1.0, 5}, scenario, 0.5), DomainError);
}

TEST_CASE("recursion errors") {
    const Scenario scenario;
    CHECK_THROWS_AS(run_recursion(BarringSetting{0.5, 7}, scenario), DomainError);
    CHECK_THROWS_AS(run_recursion(BarringSetting{0.0, 5}, scenario), DomainError);
    RecursionOptions capped;
    capped.slot_cap = 100;
    CHECK_THROWS_AS(run_recursion(BarringSetting{0.7, 8000}, scenario, capped), NonConvergenceError);
    try {
        run_recursion(BarringSetting{0.7, 8000}, scenario, capped);
    } catch (const NonConvergenceError& e) {
        CHECK(e.slots() == 100);
    }
}
