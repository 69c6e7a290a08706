#pragma once

#include "cma/pl_function.hpp"

#include <random>

namespace cma {

/// Random PL member of F on the bidisc: the two coordinate pieces p x1, q x2
/// (zero boundary values) plus `extra` pieces with small dyadic slopes and
/// negative constants. With `bounded`, a negative constant floor is added.
PLConvexFunction random_f_function(std::mt19937_64& rng, int extra = 3, bool bounded = false);

}  // namespace cma
