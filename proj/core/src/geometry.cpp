#include "cma/geometry.hpp"

namespace cma {

template struct ConvexPolygon<Rational>;
template struct ConvexPolygon<double>;

}  // namespace cma
