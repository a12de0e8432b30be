#include "doctest.h"

#include "bmt/boundary.hpp"
#include "bmt/e_process.hpp"
#include "bmt/evidence.hpp"
#include "bmt/log_space.hpp"
#include "bmt/merging.hpp"
#include "bmt/p_process.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace bmt;

namespace {

// Independent oracle for PHI0: plain transcription, no shared code path.
double phi0_oracle(double t, double delta) {
    return std::sqrt(4.0 * std::log(std::log2(2.0 * t) / delta) / t);
}

// Slow oracle for a p-value: scan rho on a log grid and report the smallest
// crossing level (upper bound on the true infimum, within one grid step).
double scan_log_p(BoundaryKind kind, std::uint64_t t, double d) {
    const double rho_max = valid_delta_max(kind);
    double best = 0.0;
    for (double u = -std::log(rho_max); u < 1000.0; u += 1e-3) {
        const double rho = std::min(std::exp(-u), rho_max);
        if (!delta_in_range(kind, rho)) continue;
        if (d > eval_boundary<double>({kind}, t, rho)) best = -u;
        else break;
    }
    return best;
}

}  // namespace

TEST_SUITE("boundary") {
    TEST_CASE("phi0 reference values") {
        const Boundary b{BoundaryKind::PHI0};
        CHECK(eval_boundary(b, 1, 0.05) == doctest::Approx(3.46163676520457).epsilon(1e-12));
        CHECK(eval_boundary(b, 4, 0.05) == doctest::Approx(2.02344868040237).epsilon(1e-12));
        CHECK(eval_boundary(b, 1, 0.05) == doctest::Approx(phi0_oracle(1, 0.05)));
        CHECK(eval_boundary(b, 4, 0.05) == doctest::Approx(phi0_oracle(4, 0.05)));
    }

    TEST_CASE("domain errors") {
        CHECK_THROWS_AS(eval_boundary({BoundaryKind::PHIJJ}, 1, 0.2), std::domain_error);
        CHECK_THROWS_AS(eval_boundary({BoundaryKind::PHI0}, 0, 0.05), std::domain_error);
        CHECK_THROWS_AS(eval_boundary({BoundaryKind::PHIIS}, 3, 1.0), std::domain_error);
        CHECK_THROWS_AS(eval_boundary({BoundaryKind::PHI0}, 3, 0.0), std::domain_error);
        CHECK_NOTHROW(eval_boundary({BoundaryKind::PHIJJ}, 1, 0.1));
    }

    TEST_CASE("positive and monotone in t and delta") {
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<std::uint64_t> tdist(1, 100000);
        for (auto kind : {BoundaryKind::PHI0, BoundaryKind::PHIJJ, BoundaryKind::PHIIS}) {
            std::uniform_real_distribution<double> ddist(1e-8, valid_delta_max(kind));
            for (int rep = 0; rep < 2000; ++rep) {
                const std::uint64_t t = tdist(rng);
                double d1 = ddist(rng), d2 = ddist(rng);
                if (d1 > d2) std::swap(d1, d2);
                if (kind != BoundaryKind::PHIJJ && d2 >= 1.0) continue;
                const Boundary b{kind};
                const double v = eval_boundary(b, t, d1);
                REQUIRE(v > 0.0);
                CHECK(eval_boundary(b, t, d2) <= v);
                if (t >= 2) CHECK(eval_boundary(b, t + 1, d1) <= eval_boundary(b, t, d1));
            }
        }
    }
}

TEST_SUITE("p_process") {
    TEST_CASE("single observation under phi0") {
        auto s = p_update(make_boundary_p_process({BoundaryKind::PHI0}, 0.0), 2.0);
        CHECK(s.count == 1);
        CHECK(s.current_p() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
        // Same value from generic bisection on the boundary.
        CHECK(invert_boundary_log_p(BoundaryKind::PHI0, 1, 2.0) == doctest::Approx(-1.0).epsilon(1e-10));
    }

    TEST_CASE("zero deviation never crosses") {
        for (auto kind : {BoundaryKind::PHI0, BoundaryKind::PHIJJ, BoundaryKind::PHIIS}) {
            auto s = p_update(make_boundary_p_process({kind}, 0.3), 0.3);
            CHECK(s.current_p() == 1.0);
            CHECK(s.running_inf_p() == 1.0);
        }
    }

    TEST_CASE("extreme deviation handled in log space") {
        auto s = p_update(make_boundary_p_process({BoundaryKind::PHI0}, 0.0), 100.0);
        CHECK(s.log_p == doctest::Approx(-2500.0));
        CHECK(s.current_p() == kPFloor);
        CHECK(s.current_p() > 0.0);
        auto jj = p_update(make_boundary_p_process({BoundaryKind::PHIJJ}, 0.0), 100.0);
        CHECK(std::isfinite(jj.log_p));
        CHECK(jj.log_p < -2000.0);
    }

    TEST_CASE("closed form matches bisection for phi0") {
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<std::uint64_t> tdist(1, 5000);
        std::uniform_real_distribution<double> ddist(0.0, 3.0);
        for (int rep = 0; rep < 1000; ++rep) {
            const auto t = tdist(rng);
            const double d = ddist(rng);
            const double closed = std::exp(phi0_log_p_closed_form(t, d));
            const double bisect = std::exp(invert_boundary_log_p(BoundaryKind::PHI0, t, d));
            REQUIRE(std::abs(closed - bisect) < 1e-9);
        }
    }

    TEST_CASE("bisection agrees with a grid scan for jj and is") {
        for (auto kind : {BoundaryKind::PHIJJ, BoundaryKind::PHIIS}) {
            for (std::uint64_t t : {1u, 5u, 40u, 300u}) {
                for (double d : {0.2, 0.8, 1.5}) {
                    const double inv = invert_boundary_log_p(kind, t, d);
                    const double scan = scan_log_p(kind, t, d);
                    CHECK(std::abs(inv - scan) < 2e-3);
                }
            }
        }
    }

    TEST_CASE("jj p-values above 0.1 collapse to 1") {
        // One sample of 0.5 is far inside the delta = 0.1 boundary.
        auto s = p_update(make_boundary_p_process({BoundaryKind::PHIJJ}, 0.0), 0.5);
        CHECK(s.current_p() == 1.0);
    }

    TEST_CASE("running infimum is monotone and below current") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> noise(0.2, 1.0);
        auto s = make_boundary_p_process({BoundaryKind::PHIIS}, 0.0);
        double prev_inf = 1.0;
        for (int i = 0; i < 3000; ++i) {
            s = p_update(s, noise(rng));
            REQUIRE(s.current_p() > 0.0);
            REQUIRE(s.current_p() <= 1.0);
            REQUIRE(s.running_inf_p() <= s.current_p());
            REQUIRE(s.running_inf_p() <= prev_inf);
            prev_inf = s.running_inf_p();
        }
    }

    TEST_CASE("inverse-e mode tracks 1/PMH") {
        auto s = make_inverse_e_p_process(LambdaStrategy::fixed(0.5), 0.0);
        auto e = make_pmh(LambdaStrategy::fixed(0.5), 0.0);
        for (double x : {1.0, 2.0, -0.5, 3.0, 2.5}) {
            s = p_update(s, x);
            e = pmh_update(e, x);
            CHECK(s.current_p() == doctest::Approx(p_from_e(e.e_value())));
        }
    }

    TEST_CASE("p_from_e") {
        CHECK(p_from_e(20.0) == doctest::Approx(0.05));
        CHECK(p_from_e(0.5) == 1.0);
        CHECK(p_from_e(0.0) == 1.0);
        CHECK(log_p_from_log_e(-std::numeric_limits<double>::infinity()) == 0.0);
    }
}

TEST_SUITE("e_process") {
    TEST_CASE("pmh basics") {
        auto s = make_pmh(LambdaStrategy::fixed(0.5), 0.0);
        CHECK(s.e_value() == 1.0);
        s = pmh_update(s, 1.0);
        CHECK(s.e_value() == doctest::Approx(1.45499141461820).epsilon(1e-12));

        auto z = make_pmh(LambdaStrategy::fixed(0.0), 0.0);
        for (double x : {5.0, -3.0, 100.0}) z = pmh_update(z, x);
        CHECK(z.e_value() == 1.0);
        CHECK_THROWS(pmh_update(make_pmh({}, 0.0), 1.0, -0.1));
    }

    TEST_CASE("mixture constants") {
        constexpr double e = std::numbers::e;
        CHECK(mixture_weight(0) == doctest::Approx(0.316060279414279).epsilon(1e-12));
        CHECK(mixture_weight(0) == doctest::Approx(2.0 * (e - 1.0) / (4.0 * e)));
        CHECK(mixture_lambda(0) == doctest::Approx(std::exp(-2.5)));
        CHECK(mixture_lambda(3) == doctest::Approx(std::exp(-5.5)));

        // Independent series: 2(e-1)/e * (pi^2/6 - 1).
        const double series = 2.0 * (e - 1.0) / e * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0);
        CHECK(series == doctest::Approx(0.815352165487351).epsilon(1e-12));
        CHECK(mixture_grid().total_weight == doctest::Approx(series).epsilon(1e-14));
        CHECK(mixture_grid().total_weight <= 1.0);
        CHECK(mixture_grid().log_weight.exp().sum() == doctest::Approx(series).epsilon(1e-13));
    }

    TEST_CASE("empty mixture equals total weight") {
        auto s = make_discrete_mixture(0.0);
        CHECK(s.e_value() == doctest::Approx(0.815352165487351).epsilon(1e-12));
    }

    TEST_CASE("mixture decreases on repeated null-mean samples") {
        auto s = make_discrete_mixture(1.5);
        double prev = s.e_value();
        for (int n = 0; n < 50; ++n) {
            s = dm_update(s, 1.5);
            CHECK(s.e_value() < prev);
            prev = s.e_value();
        }
    }

    TEST_CASE("mixture matches direct summation") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> noise(0.4, 1.0);
        std::vector<double> xs(200);
        for (auto& x : xs) x = noise(rng);
        auto s = make_discrete_mixture(0.1);
        for (double x : xs) s = dm_update(s, x);

        // Direct sum over 400 terms; terms past 50 contribute their weight.
        double direct = 0.0;
        for (int l = 0; l < 400; ++l) {
            const double lam = mixture_lambda(l);
            double acc = 0.0;
            for (double x : xs) acc += lam * (x - 0.1) - lam * lam / 2.0;
            direct += mixture_weight(l) * std::exp(acc);
        }
        // Remaining tail beyond 400 is about c / 401.
        CHECK(s.e_value() == doctest::Approx(direct).epsilon(5e-3));
        CHECK(s.e_value() >= direct);
    }

    TEST_CASE("log space survives extreme inputs") {
        auto s = make_discrete_mixture(0.0);
        for (int i = 0; i < 10; ++i) s = dm_update(s, 1e6);
        CHECK(std::isfinite(s.log_e));
        CHECK(s.log_e > 700.0);
        auto down = make_discrete_mixture(0.0);
        for (int i = 0; i < 10; ++i) down = dm_update(down, -1e6);
        CHECK(std::isfinite(down.log_e));

        auto p = make_pmh(LambdaStrategy::fixed(1.0), 0.0);
        for (int i = 0; i < 2000; ++i) p = pmh_update(p, 1.0);
        CHECK(p.log_e == doctest::Approx(1000.0));
        CHECK(std::isinf(p.e_value()));
    }

    TEST_CASE("default wsr bet") {
        const auto s = LambdaStrategy::default_wsr(0.05);
        // First sample: T = 1.
        CHECK(next_lambda(s, 0, 0.0, 0.0) ==
              doctest::Approx(std::sqrt(2.0 * std::log(40.0) / std::log(2.0))));
        CHECK(next_lambda(s, 9, 3.0, 0.0) ==
              doctest::Approx(std::sqrt(2.0 * std::log(40.0) / (10.0 * std::log(11.0)))));
    }

    TEST_CASE("betting half mean bet") {
        const auto s = LambdaStrategy::betting_half_mean();
        CHECK(next_lambda(s, 0, 0.0, 0.0) == 0.0);
        CHECK(next_lambda(s, 4, 2.0, 0.0) == doctest::Approx(0.25));
        CHECK(next_lambda(s, 4, -2.0, 0.0) == 0.0);
        CHECK(next_lambda(s, 4, 2.0, 0.5) == 0.0);
    }

    TEST_CASE("bets are predictable") {
        // Two streams sharing a prefix must produce identical bets up to and
        // including the first sample after the prefix.
        std::mt19937_64 rng(9);
        std::normal_distribution<double> noise(0.3, 1.0);
        for (auto strat : {LambdaStrategy::default_wsr(0.05), LambdaStrategy::betting_half_mean()}) {
            for (int rep = 0; rep < 50; ++rep) {
                const int prefix = 1 + rep;
                auto a = make_pmh(strat, 0.0);
                auto b = make_pmh(strat, 0.0);
                for (int j = 0; j < prefix + 5; ++j) {
                    const double la = next_lambda(a.lambda, a.count, a.sum, a.mu0);
                    const double lb = next_lambda(b.lambda, b.count, b.sum, b.mu0);
                    if (j <= prefix) REQUIRE(la == lb);
                    REQUIRE(la >= 0.0);
                    const double x = noise(rng);
                    a = pmh_update(a, x);
                    b = pmh_update(b, j < prefix ? x : x + 1.0);
                }
            }
        }
    }

    TEST_CASE("adversarial alternating stream exceeds one") {
        // X_t = -1 on odd t, +1 on even t; bet 0 on odd, 1 on even. Each even
        // step multiplies wealth by exp(1 - 1/2).
        auto s = make_pmh(LambdaStrategy::fixed(0.0), 0.0);
        for (int t = 1; t <= 10; ++t) {
            const bool even = t % 2 == 0;
            s = pmh_update(s, even ? 1.0 : -1.0, even ? 1.0 : 0.0);
            CHECK(s.log_e == doctest::Approx(0.5 * (t / 2)));
        }
        CHECK(s.e_value() == doctest::Approx(std::exp(2.5)));
        CHECK(s.e_value() > 1.0);
    }
}

TEST_SUITE("monte carlo validity (small)") {
    // Reduced-size versions of the acceptance checks, to catch regressions fast.
    TEST_CASE("ville for mixture and pmh under the null") {
        std::mt19937_64 rng(2024);
        std::normal_distribution<double> noise(0.0, 1.0);
        const int reps = 400, horizon = 1000;
        for (int variant = 0; variant < 3; ++variant) {
            int crossings = 0;
            for (int r = 0; r < reps; ++r) {
                EProcessState s = variant == 0   ? make_discrete_mixture(0.0)
                                  : variant == 1 ? make_pmh(LambdaStrategy::default_wsr(0.05), 0.0)
                                                 : make_pmh(LambdaStrategy::betting_half_mean(), 0.0);
                for (int t = 0; t < horizon; ++t) {
                    s = e_update(s, noise(rng));
                    if (s.log_e >= std::log(20.0)) {
                        ++crossings;
                        break;
                    }
                }
            }
            const double rate = static_cast<double>(crossings) / reps;
            const double se = std::sqrt(0.05 * 0.95 / reps);
            CHECK(rate <= 0.05 + 3.0 * se);
        }
    }

    TEST_CASE("superuniform running inf under the null") {
        std::mt19937_64 rng(77);
        std::normal_distribution<double> noise(0.0, 1.0);
        const int reps = 400, horizon = 1000;
        for (auto kind : {BoundaryKind::PHI0, BoundaryKind::PHIJJ, BoundaryKind::PHIIS}) {
            int below = 0;
            for (int r = 0; r < reps; ++r) {
                auto s = make_boundary_p_process({kind}, 0.0);
                for (int t = 0; t < horizon; ++t) s = p_update(s, noise(rng));
                if (s.running_inf_p() <= 0.05) ++below;
            }
            const double rate = static_cast<double>(below) / reps;
            CHECK(rate <= 0.05 + 3.0 * std::sqrt(0.05 * 0.95 / reps));
        }
    }
}

TEST_SUITE("merging") {
    TEST_CASE("product") {
        const std::vector<double> a{2, 3}, b{1, 1, 1}, empty{};
        CHECK(merge_product(a) == 6.0);
        CHECK(merge_product(b) == 1.0);
        CHECK(merge_product(empty) == 1.0);
    }
    TEST_CASE("mean") {
        const std::vector<double> a{2, 4}, b{1}, c{0, 0, 6}, empty{};
        CHECK(merge_mean(a) == 3.0);
        CHECK(merge_mean(b) == 1.0);
        CHECK(merge_mean(c) == 2.0);
        CHECK_THROWS_AS(merge_mean(empty), std::invalid_argument);
    }
}

TEST_SUITE("evidence facade") {
    TEST_CASE("dispatch and modes") {
        CHECK(mode_of(EvidenceKind::E_DM) == TestMode::E);
        CHECK(mode_of(EvidenceKind::P_INVERSE_PMH) == TestMode::P);
        auto ev = make_evidence({EvidenceKind::P_BOUNDARY, {}, {BoundaryKind::PHI0}}, 0.0);
        ev = evidence_update(ev, 2.0);
        CHECK(evidence_log_value(ev) == doctest::Approx(-1.0));
        CHECK(evidence_count(ev) == 1);
        CHECK(evidence_kind_from_string(to_string(EvidenceKind::E_PMH)) == EvidenceKind::E_PMH);
    }
}
