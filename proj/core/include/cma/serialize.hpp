#pragma once

#include "cma/domain.hpp"
#include "cma/measure.hpp"
#include "cma/pl_function.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace cma {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

/// "bidisc" | "polydisc(s)" (s = log radius, rational) | "ball(R)"
LogDomain parse_domain(std::string_view spec);
std::string domain_spec(const LogDomain& d);

/// Parses "max(a, b, ...)" of affine terms in x1, x2 with rational
/// coefficients, e.g. "max(2*x1, x2 - 1/2, -1)"; a single affine term is
/// allowed. Round-trips PLConvexFunction::to_string.
PLConvexFunction parse_pl(std::string_view spec, const LogDomain& domain = LogDomain::quadrant());

Json to_json(const LogDomain& d);
LogDomain domain_from_json(const Json& j);

/// {"format": "cma-pl", "version": 1, "domain": ..., "pieces": [[a1, a2, c], ...]}
/// with every rational written as "num/den".
Json to_json(const PLConvexFunction& f);
PLConvexFunction pl_from_json(const Json& j);

Json to_json(const ExactMeasure& m);
ExactMeasure exact_measure_from_json(const Json& j);

Json to_json(const LogMeasure& m);
LogMeasure log_measure_from_json(const Json& j);

/// Checks the format tag and version; throws InvalidInput otherwise.
void check_header(const Json& j, std::string_view format);

}  // namespace cma
