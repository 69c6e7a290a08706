#include "cma/random_pl.hpp"

namespace cma {

PLConvexFunction random_f_function(std::mt19937_64& rng, int extra, bool bounded) {
  // explicit arithmetic on raw draws so that the sequence is the same on every library
  auto draw = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)); };
  std::vector<AffinePiece> pieces;
  pieces.push_back({Rational(draw(4, 12), 4), 0, 0});
  pieces.push_back({0, Rational(draw(4, 12), 4), 0});
  // flatter pieces below the corner: they win away from it and carve kinks
  for (int i = 0; i < extra; ++i)
    pieces.push_back({Rational(draw(0, 6), 8), Rational(draw(0, 6), 8), Rational(-draw(1, 12), 8)});
  if (bounded) pieces.push_back({0, 0, Rational(-draw(8, 24), 4)});
  return PLConvexFunction(std::move(pieces));
}

}  // namespace cma
