#pragma once

#include "cma/domain.hpp"
#include "cma/measure.hpp"
#include "cma/report.hpp"
#include "cma/sweep.hpp"
#include "cma/toric.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cma {

/// Finite family of test functions standing in for C(closure of the domain):
/// |z|^k |w|^l for 0 <= k, l <= K, and Lipschitz tents in the radii.
struct MomentDictionary {
  int K = 6;
  std::vector<Integrand> members;

  static MomentDictionary standard(int K = 6, int lipschitz = 12);
  std::size_t size() const { return members.size(); }
  std::vector<double> moments(const LogMeasure& m) const;
  /// Smallest pairwise weak* distance among the given measures.
  double separation(const std::vector<LogMeasure>& family) const;
};

double weakstar_distance(const LogMeasure& mu, const LogMeasure& nu, const MomentDictionary& dict);

/// Toric psh test functions, nonpositive on the polydisc of radius e^{1/4}
/// (so psh on a neighbourhood of the closed bidisc). Some are unbounded.
std::vector<PLConvexFunction> psh_dictionary();
/// Bounded members of F on the bidisc.
std::vector<PLConvexFunction> bounded_f_dictionary();
Integrand as_integrand(const PLConvexFunction& f);

struct BoundaryMeasure {
  LogMeasure measure;
  std::optional<ExactMeasure> exact;
  std::vector<std::vector<double>> certificate;  // dictionary moments of ma(u^j)
  std::vector<ExactMeasure> exact_history;      // PL path: ma(u^j) restricted to the domain
  double cauchy_gap = 0;
  double limit_gap = 0;  // distance from the last ma(u^j) to the limit
  int steps = 0;
  bool converged = false;
  std::string diagnostic;
};

/// Weak* limit of ma(u^j). On a polydisc every torus-invariant measure carried
/// by the distinguished boundary is a multiple of sigma x sigma, so the limit is
/// the corner atom with the mass of ma(u); the sweeps certify it.
BoundaryMeasure boundary_measure(const ToricFunction& u, const SweepSchedule& schedule,
                                 const MomentDictionary& dict = MomentDictionary::standard(),
                                 bool keep_history = false);

struct WeightedLimit {
  double density = 0;  // g^u on the corner atom
  double trace = 0;    // g at the corner (boundary trace)
  LogMeasure limit;    // density * mu_u
  std::vector<double> sequence;  // int g d ma(u^j)
  double cauchy_gap = 0;
  double pairing_error = 0;  // dictionary gap between g ma(u^J) and trace * mu_u
  bool converged = false;
};

WeightedLimit weighted_limit(const PLConvexFunction& u, const PLConvexFunction& g,
                             const SweepSchedule& schedule,
                             const MomentDictionary& dict = MomentDictionary::standard());

struct IdentityOptions {
  double grid_h = 1.0 / 128;
  double truncation = 0;  // 0: from the functions
};

/// Demailly-type formula lim int h ma(u^j) = int h ma(u) - int u dd^c h ^ dd^c u,
/// the Jensen inequality int h ma(u) <= int h dmu_u and the monotonicity of
/// j -> int h ma(u^j).
Report identity_suite(const PLConvexFunction& u, const PLConvexFunction& h,
                      const SweepSchedule& schedule, const IdentityOptions& opts = {});

/// Order and truncation laws between boundary measures (and the comparison
/// constants when both functions are bounded with compact Monge-Ampere support).
Report compare(const PLConvexFunction& u, const PLConvexFunction& v,
               const MomentDictionary& dict = MomentDictionary::standard());

/// Boundary measures along a decreasing family u_k (computed through sweeps)
/// and their distances to the boundary measure of the limit.
struct FamilyConvergence {
  std::vector<double> distances;
  std::vector<double> masses;
  bool monotone = false;  // non-increasing distances
};

FamilyConvergence decreasing_family(const std::vector<PLConvexFunction>& family,
                                    const PLConvexFunction& limit, int J = 12,
                                    const MomentDictionary& dict = MomentDictionary::standard());

/// Exact boundary measure of a PL function in F on a polydisc (no history).
ExactMeasure exact_boundary_measure(const PLConvexFunction& u);

struct SupportEstimate {
  std::map<std::string, double> fraction;  // face name -> share of mass
  double total = 0;
  bool corner_only = false;
};

SupportEstimate support_estimate(const BoundaryMeasure& bm, const LogDomain& domain,
                                 double delta = 1e-9);

struct HenkinTable {
  std::vector<int> k;
  std::vector<double> value;
  double decay_rate = 0;  // fitted -d/dk log|value|
};

/// |int f_k dmu| for f_k = ((1+z)/2 (1+w)/2)^k ("peak") or (zw)^k ("monomial").
HenkinTable henkin_test(const LogMeasure& mu, const std::string& family, int kmax);

}  // namespace cma
