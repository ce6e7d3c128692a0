#ifndef MBL_CATALOG_HPP_
#define MBL_CATALOG_HPP_

#include <string>
#include <vector>

#include "mbl/game.hpp"

namespace mbl {

// Exact fraction, converted to binary floats only at use sites so catalog
// verification is not polluted by decimal parsing error.
struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

enum class EquilibriumKind { kStrictVertex, kInterior };

struct KnownEquilibrium {
  std::string game_name;
  std::vector<std::vector<Rational>> exact;  // [player][action]
  EquilibriumKind kind = EquilibriumKind::kInterior;

  MixedProfile profile() const;
};

struct CatalogEntry {
  std::string name;
  Game game;
  std::vector<KnownEquilibrium> equilibria;
};

// Built-in games: PD, MP, RPS3, RPS5, RPS9, MP3. Throws on unknown names.
CatalogEntry catalog_game(const std::string& name);

const std::vector<std::string>& catalog_names();

}  // namespace mbl

#endif  // MBL_CATALOG_HPP_
