#include "mbl/catalog.hpp"

#include <stdexcept>

namespace mbl {

MixedProfile KnownEquilibrium::profile() const {
  std::vector<std::vector<double>> xs;
  xs.reserve(exact.size());
  for (const auto& row : exact) {
    std::vector<double> x;
    x.reserve(row.size());
    for (const auto& r : row) x.push_back(r.value());
    xs.push_back(std::move(x));
  }
  return MixedProfile(std::move(xs));
}

namespace {

using Frac = std::vector<std::vector<Rational>>;

KnownEquilibrium known(std::string name, Frac exact, EquilibriumKind kind) {
  return KnownEquilibrium{std::move(name), std::move(exact), kind};
}

std::vector<double> negated(const std::vector<double>& t) {
  std::vector<double> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = -t[i];
  return out;
}

CatalogEntry make_pd() {
  // Action 0 is "defect"; the strict equilibrium sits at the (0, 0) vertex.
  Game game({2, 2}, {{1, 5, 0, 3}, {1, 0, 5, 3}});
  auto eq = known("PD", {{{1, 1}, {0, 1}}, {{1, 1}, {0, 1}}}, EquilibriumKind::kStrictVertex);
  return CatalogEntry{"PD", std::move(game), {std::move(eq)}};
}

CatalogEntry make_mp() {
  Game game({2, 2}, {{1.0, -23.0 / 10.0, -4.0 / 10.0, 1.0},
                     {-23.0 / 10.0, 1.0, 1.0, -4.0 / 10.0}});
  auto eq = known("MP", {{{14, 47}, {33, 47}}, {{33, 47}, {14, 47}}},
                  EquilibriumKind::kInterior);
  return CatalogEntry{"MP", std::move(game), {std::move(eq)}};
}

CatalogEntry make_rps3() {
  std::vector<double> r1 = {0, -2, 3, 2, 0, -2, -1, 2, 0};
  Game game({3, 3}, {r1, negated(r1)});
  auto eq = known("RPS3",
                  {{{2, 7}, {11, 35}, {2, 5}}, {{2, 5}, {11, 35}, {2, 7}}},
                  EquilibriumKind::kInterior);
  return CatalogEntry{"RPS3", std::move(game), {std::move(eq)}};
}

CatalogEntry make_rps5() {
  std::vector<double> r1 = {
      0,  4, -2,  2, -2,
     -4,  0,  2, -1,  1,
      2, -4,  0,  4, -1,
     -4,  1, -4,  0,  2,
      2, -1,  1, -2,  0};
  Game game({5, 5}, {r1, negated(r1)});
  auto eq = known("RPS5",
                  {{{11, 61}, {510, 2989}, {8, 61}, {50, 427}, {1198, 2989}},
                   {{1, 7}, {68, 427}, {6, 49}, {502, 2989}, {174, 427}}},
                  EquilibriumKind::kInterior);
  return CatalogEntry{"RPS5", std::move(game), {std::move(eq)}};
}

CatalogEntry make_rps9() {
  std::vector<double> r1 = {
      0,  2,  1,  3,  1, -1, -1, -2, -1,
     -1,  0,  1,  3,  1,  1, -1, -2, -1,
     -1, -2,  0,  3,  1,  1,  1, -2, -1,
     -2, -4, -2,  0,  2,  2,  2,  4, -2,
     -1, -2, -1, -3,  0,  1,  1,  2,  1,
      1, -2, -1, -3, -1,  0,  1,  2,  1,
      2,  4, -2, -6, -2, -2,  0,  4,  2,
      1,  2,  1, -3, -1, -1, -1,  0,  1,
      1,  2,  1,  3, -1, -1, -1, -2,  0};
  Game game({9, 9}, {r1, negated(r1)});
  auto eq = known("RPS9",
                  {{{1, 8}, {1, 8}, {1, 8}, {1, 16}, {1, 8}, {1, 8}, {1, 16}, {1, 8}, {1, 8}},
                   {{3, 22}, {3, 44}, {3, 22}, {1, 22}, {3, 22}, {3, 22}, {3, 22}, {3, 44}, {3, 22}}},
                  EquilibriumKind::kInterior);
  return CatalogEntry{"RPS9", std::move(game), {std::move(eq)}};
}

CatalogEntry make_mp3() {
  // Three-player matching pennies: player 1 wants to match player 2,
  // player 2 wants to match player 3, player 3 wants to mismatch player 1.
  // Not zero-sum. Unique equilibrium at the centroid.
  std::vector<double> r1(8), r2(8), r3(8);
  for (int a1 = 0; a1 < 2; ++a1) {
    for (int a2 = 0; a2 < 2; ++a2) {
      for (int a3 = 0; a3 < 2; ++a3) {
        const std::size_t idx = static_cast<std::size_t>(a1 * 4 + a2 * 2 + a3);
        r1[idx] = (a1 == a2) ? 1.0 : -1.0;
        r2[idx] = (a2 == a3) ? 1.0 : -1.0;
        r3[idx] = (a3 == a1) ? -1.0 : 1.0;
      }
    }
  }
  Game game({2, 2, 2}, {r1, r2, r3});
  auto eq = known("MP3", {{{1, 2}, {1, 2}}, {{1, 2}, {1, 2}}, {{1, 2}, {1, 2}}},
                  EquilibriumKind::kInterior);
  return CatalogEntry{"MP3", std::move(game), {std::move(eq)}};
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {"PD", "MP", "RPS3", "RPS5", "RPS9", "MP3"};
  return names;
}

CatalogEntry catalog_game(const std::string& name) {
  if (name == "PD") return make_pd();
  if (name == "MP") return make_mp();
  if (name == "RPS3") return make_rps3();
  if (name == "RPS5") return make_rps5();
  if (name == "RPS9") return make_rps9();
  if (name == "MP3") return make_mp3();
  throw std::invalid_argument("unknown catalog game: " + name);
}

}  // namespace mbl
