#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "lao/core.hpp"

using namespace lao;

TEST_CASE("evaluate_loss on the three loss kinds") {
  CHECK(evaluate_loss(LossSpec::squared(), 3.0, 1.0) == 2.0);
  CHECK(evaluate_loss(LossSpec::delta_insensitive(1.0), 1.5, 1.0) == 0.0);
  CHECK(evaluate_loss(LossSpec::delta_insensitive(0.5), 0.0, 2.0) == 1.5);
  // f_ε(0) = ε·ρ(0) = ε/√π
  CHECK(evaluate_loss(LossSpec::smoothed(0.0, 0.1), 2.0, 2.0) ==
        doctest::Approx(0.1 * std::numbers::inv_sqrtpi).epsilon(1e-14));
  CHECK(evaluate_loss(LossSpec::smoothed(0.0, 0.1), 2.0, 2.0) == doctest::Approx(0.05642).epsilon(1e-4));
}

TEST_CASE("loss spec validation") {
  CHECK_NOTHROW(LossSpec::squared().validate(1.0));
  CHECK_THROWS_AS(LossSpec::delta_insensitive(-0.1).validate(), UsageError);
  CHECK_THROWS_AS(LossSpec::delta_insensitive(2.0).validate(1.0), UsageError);
  CHECK_THROWS_AS(LossSpec::smoothed(0.0, 0.0).validate(), UsageError);
}

TEST_CASE("empirical_risk") {
  const Regressor zero{{0.0, 0.0}, NormKind::L2, 1.0};
  const std::vector<Example> zeros{Example({0.3, -0.2}, 0.0)};
  CHECK(empirical_risk(LossSpec::squared(), zero, zeros) == 0.0);

  const std::vector<Example> twos{Example({0.3, -0.2}, 2.0)};
  CHECK(empirical_risk(LossSpec::squared(), zero, twos) == 2.0);

  const Regressor e1{{1.0, 0.0}, NormKind::L2, 1.0};
  const std::vector<Example> pair{Example({1.0, 0.0}, 1.0), Example({0.0, 1.0}, 1.0)};
  CHECK(empirical_risk(LossSpec::squared(), e1, pair) == 0.25);

  SUBCASE("errors") {
    CHECK_THROWS_WITH_AS(empirical_risk(LossSpec::squared(), e1, std::vector<Example>{}),
                         "empty evaluation set", DataError);
    const std::vector<Example> wrong{Example({1.0, 0.0, 0.0}, 1.0)};
    CHECK_THROWS_AS(empirical_risk(LossSpec::squared(), e1, wrong), DataError);
  }
}

TEST_CASE("regressor norm certificate") {
  Regressor w{{0.6, -0.8}, NormKind::L2, 1.0};
  CHECK(w.norm() == doctest::Approx(1.0));
  CHECK(w.within_radius());
  w.norm_kind = NormKind::L1;
  CHECK(w.norm() == doctest::Approx(1.4));
  CHECK_FALSE(w.within_radius());
  w.radius = 1.4 * (1.0 + 0.5e-9);
  CHECK(w.within_radius());
}

TEST_CASE("rng streams are reproducible and seed-dependent") {
  RngStream a(42), b(42), c(43);
  std::vector<std::uint64_t> sa, sb, sc;
  for (int i = 0; i < 100; ++i) {
    sa.push_back(a.next_u64());
    sb.push_back(b.next_u64());
    sc.push_back(c.next_u64());
  }
  CHECK(sa == sb);
  CHECK(sa != sc);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("rng draws have the documented ranges and moments") {
  RngStream rng(7);
  constexpr int kDraws = 200000;
  double mean_u = 0.0, mean_g = 0.0, var_g = 0.0, mean_geo = 0.0;
  std::vector<int> counts(5, 0);
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    mean_u += u;
    const std::size_t idx = rng.uniform_index(5);
    REQUIRE(idx < 5);
    ++counts[idx];
    const double g = rng.gaussian();
    mean_g += g;
    var_g += g * g;
    mean_geo += static_cast<double>(rng.geometric_half());
  }
  mean_u /= kDraws;
  mean_g /= kDraws;
  var_g /= kDraws;
  mean_geo /= kDraws;
  CHECK(mean_u == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::fabs(mean_g) < 0.01);
  CHECK(var_g == doctest::Approx(1.0).epsilon(0.02));
  // E[n] = Σ n 2^{-(n+1)} = 1
  CHECK(mean_geo == doctest::Approx(1.0).epsilon(0.02));
  for (int c : counts) CHECK(c == doctest::Approx(kDraws / 5.0).epsilon(0.03));
}

TEST_CASE("geometric draw frequencies match 2^-(n+1)") {
  RngStream rng(11);
  constexpr int kDraws = 400000;
  std::vector<int> hist(6, 0);
  for (int i = 0; i < kDraws; ++i) {
    const std::size_t n = rng.geometric_half();
    if (n < hist.size()) ++hist[n];
  }
  for (std::size_t n = 0; n < hist.size(); ++n) {
    const double expected = kDraws * std::ldexp(1.0, -static_cast<int>(n + 1));
    CHECK(std::fabs(hist[n] - expected) < 5.0 * std::sqrt(expected));
  }
}

TEST_CASE("attribute ledger counts every read once") {
  const Example ex({1.0, 2.0, 3.0}, 0.5);
  AttributeLedger ledger(2);
  CHECK(ledger.budget_k() == 2);
  CHECK_THROWS_AS(ledger.observe(ex, 0), std::logic_error);

  ledger.begin_example();
  CHECK(ledger.observe(ex, 1) == 2.0);
  CHECK(ledger.observe(ex, 1) == 2.0);
  ledger.begin_example();
  const auto all = ledger.observe_all(ex);
  CHECK(all.size() == 3);
  AttributeProbe probe(ledger, ex, 0.5);
  CHECK(probe.read(2) == 1.5);
  CHECK(probe.scaled(2.0).read(0) == 1.0);

  CHECK(ledger.observed_total() == 7);
  const auto counts = ledger.per_example_counts();
  REQUIRE(counts.size() == 2);
  CHECK(counts[0] == 2);
  CHECK(counts[1] == 5);
  CHECK_THROWS_AS(ledger.observe(ex, 3), std::out_of_range);
  CHECK_THROWS_AS(AttributeLedger(0), UsageError);
}
