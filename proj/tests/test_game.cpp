#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <limits>

#include "mbl/catalog.hpp"
#include "mbl/game.hpp"
#include "oracles.hpp"

using namespace mbl;

TEST_CASE("build_game validates shapes and values") {
  CHECK_NOTHROW(build_game({2, 2}, {{1, 5, 0, 3}, {1, 0, 5, 3}}));
  // a 3x2 tensor for (2,2) counts
  CHECK_THROWS_AS(build_game({2, 2}, {{1, 2, 3, 4, 5, 6}, {1, 2, 3, 4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_game({2, 2}, {{1, 2, 3, std::numeric_limits<double>::quiet_NaN()},
                                      {1, 2, 3, 4}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_game({2}, {{1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(build_game({2, 1}, {{1, 2}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("catalog holds the six games with verified equilibria") {
  CHECK(catalog_names().size() == 6);
  for (const auto& name : catalog_names()) {
    const auto entry = catalog_game(name);
    REQUIRE(!entry.equilibria.empty());
    for (const auto& eq : entry.equilibria) {
      CHECK(nash_violation(entry.game, eq.profile()) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(catalog_game("RPS4"), std::invalid_argument);

  const auto pd = catalog_game("PD");
  CHECK(pd.equilibria[0].kind == EquilibriumKind::kStrictVertex);
  CHECK(pd.game.payoff(0, PureProfile{{0, 1}}) == 5.0);

  const auto mp3 = catalog_game("MP3");
  CHECK(mp3.game.num_players() == 3);
  CHECK(mp3.game.payoff(0, PureProfile{{0, 0, 0}}) == 1.0);
  CHECK(mp3.game.payoff(2, PureProfile{{0, 0, 0}}) == -1.0);
  CHECK(mp3.game.payoff(1, PureProfile{{1, 0, 0}}) == 1.0);
}

TEST_CASE("expected payoff matches enumeration oracle and frozen values") {
  const auto mp = catalog_game("MP");
  const auto ne = mp.equilibria[0].profile();
  CHECK(expected_payoff(mp.game, ne, 0) == doctest::Approx(0.8 / 47).epsilon(1e-12));
  CHECK(expected_payoff(mp.game, ne, 0) ==
        doctest::Approx(oracles::expected_payoff(mp.game, ne, 0)).epsilon(1e-14));

  const auto rps3 = catalog_game("RPS3");
  CHECK(expected_payoff(rps3.game, rps3.equilibria[0].profile(), 0) ==
        doctest::Approx(8.0 / 35).epsilon(1e-12));

  // vertex profile picks out the single pure payoff
  MixedProfile vertex({{0.0, 1.0}, {1.0, 0.0}});
  CHECK(expected_payoff(mp.game, vertex, 0) == mp.game.payoff(0, PureProfile{{1, 0}}));

  MixedProfile bad({{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  CHECK_THROWS_AS(expected_payoff(mp.game, bad, 0), std::invalid_argument);
}

TEST_CASE("fitness components and identities") {
  const auto mp = catalog_game("MP");
  const auto ne = mp.equilibria[0].profile();
  const auto f = fitness(mp.game, ne, 0);
  CHECK(f[0] == doctest::Approx(0.8 / 47).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(0.8 / 47).epsilon(1e-12));

  const auto pd = catalog_game("PD");
  MixedProfile x({{0.5, 0.5}, {1.0, 0.0}});
  const auto fpd = fitness(pd.game, x, 0);
  CHECK(fpd[0] == 1.0);  // column (1, 0) of player 1's table
  CHECK(fpd[1] == 0.0);

  const auto rps3 = catalog_game("RPS3");
  const auto f3 = fitness(rps3.game, rps3.equilibria[0].profile(), 0);
  for (double v : f3) CHECK(v == doctest::Approx(8.0 / 35).epsilon(1e-12));

  // oracle cross-check on a random game
  RngStream rng(123);
  for (int rep = 0; rep < 10; ++rep) {
    const Game g = oracles::random_game(rng, -1.0, 1.0);
    const auto p = oracles::random_interior(g, rng);
    for (int i = 0; i < g.num_players(); ++i) {
      const auto fi = fitness(g, p, i);
      for (int h = 0; h < g.action_count(i); ++h) {
        CHECK(fi[h] == doctest::Approx(oracles::fitness_component(g, p, i, h))
                           .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("nash violation examples") {
  const auto mp = catalog_game("MP");
  MixedProfile uniform = MixedProfile::uniform(mp.game);
  CHECK(nash_violation(mp.game, uniform) == doctest::Approx(0.475).epsilon(1e-12));

  const auto pd = catalog_game("PD");
  MixedProfile cooperate({{0.0, 1.0}, {0.0, 1.0}});
  CHECK(nash_violation(pd.game, cooperate) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("shift_nonnegative examples and invariance") {
  const auto pd = catalog_game("PD");
  const auto spd = shift_nonnegative(pd.game);
  CHECK(spd.shifts[0] == 0.0);
  CHECK(spd.shifts[1] == 0.0);

  const auto mp = catalog_game("MP");
  const auto smp = shift_nonnegative(mp.game);
  CHECK(smp.shifts[0] == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(smp.shifts[1] == doctest::Approx(2.3).epsilon(1e-15));
  CHECK(smp.game.max_payoff(0) == doctest::Approx(3.3).epsilon(1e-15));
  CHECK(smp.game.min_payoff(0) >= 0.0);

  const auto rps9 = catalog_game("RPS9");
  const auto s9 = shift_nonnegative(rps9.game);
  CHECK(s9.shifts[0] == 6.0);  // min entry of R1 is -6
  CHECK(s9.shifts[1] == 4.0);  // min entry of R2 = -R1 is -max(R1) = -4

  RngStream rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    const Game g = oracles::random_game(rng, -2.0, 2.0);
    const auto sg = shift_nonnegative(g);
    const auto p = oracles::random_interior(g, rng);
    CHECK(std::abs(nash_violation(g, p) - nash_violation(sg.game, p)) <= 1e-12);
  }
}

TEST_CASE("multilinearity and the fitness/payoff identity") {
  RngStream rng(2024);
  for (int rep = 0; rep < 20; ++rep) {
    const Game g = oracles::random_game(rng, 0.0, 1.0);
    const auto a = oracles::random_interior(g, rng);
    const auto b = oracles::random_interior(g, rng);
    const double lambda = rng.next_unit();

    for (int i = 0; i < g.num_players(); ++i) {
      // convex combination in player i's coordinate only
      auto mixed = a.strategies();
      for (int h = 0; h < g.action_count(i); ++h) {
        mixed[i][h] = lambda * a.strategy(i)[h] + (1 - lambda) * b.strategy(i)[h];
      }
      auto other = a.strategies();
      other[i] = b.strategy(i);
      const double lhs = expected_payoff(g, MixedProfile(mixed), i);
      const double rhs = lambda * expected_payoff(g, a, i) +
                         (1 - lambda) * expected_payoff(g, MixedProfile(other), i);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

      const auto f = fitness(g, a, i);
      double dot = 0.0;
      for (int h = 0; h < g.action_count(i); ++h) dot += a.strategy(i)[h] * f[h];
      CHECK(std::abs(dot - expected_payoff(g, a, i)) <= 1e-12);
    }
  }
}

TEST_CASE("zero-sum holds for RPS-n and fails for MP3") {
  RngStream rng(5);
  for (const char* name : {"RPS3", "RPS5", "RPS9"}) {
    const auto entry = catalog_game(name);
    for (int rep = 0; rep < 5; ++rep) {
      const auto p = oracles::random_interior(entry.game, rng);
      CHECK(std::abs(expected_payoff(entry.game, p, 0) +
                     expected_payoff(entry.game, p, 1)) <= 1e-12);
    }
  }
  const auto mp3 = catalog_game("MP3");
  bool nonzero_somewhere = false;
  for (int v = 0; v < 8; ++v) {
    const PureProfile a{{v / 4, (v / 2) % 2, v % 2}};
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += mp3.game.payoff(i, a);
    if (std::abs(sum) > 1e-12) nonzero_somewhere = true;
  }
  CHECK(nonzero_somewhere);
}

TEST_CASE("mixed profile validation") {
  CHECK_THROWS_AS(MixedProfile({{0.5, 0.6}}), std::invalid_argument);
  CHECK_THROWS_AS(MixedProfile({{-0.1, 1.1}}), std::invalid_argument);
  MixedProfile boundary({{0.0, 1.0}, {0.5, 0.5}});
  CHECK(!boundary.interior());
  MixedProfile inner({{0.4, 0.6}, {0.5, 0.5}});
  CHECK(inner.interior());
  // renormalization only on request
  MixedProfile scaled = MixedProfile({{0.5, 0.5 + 5e-10}, {0.5, 0.5}}).renormalized();
  double sum = scaled.strategy(0)[0] + scaled.strategy(0)[1];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sample_action statistics") {
  RngStream rng(77);
  std::vector<double> degenerate = {1.0, 0.0};
  for (int i = 0; i < 100; ++i) CHECK(sample_action(degenerate, rng) == 0);

  std::vector<double> fair = {0.5, 0.5};
  int zeros = 0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) zeros += sample_action(fair, rng) == 0 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(zeros) / n - 0.5) < 0.002);  // binomial 3 sigma

  std::vector<double> quarter(4, 0.25);
  std::vector<int> counts(4, 0);
  const int m = 100000;
  for (int i = 0; i < m; ++i) ++counts[sample_action(quarter, rng)];
  double chi2 = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double expect = m / 4.0;
    chi2 += (counts[k] - expect) * (counts[k] - expect) / expect;
  }
  CHECK(chi2 < 16.27);  // 99.9% quantile, df = 3
}
