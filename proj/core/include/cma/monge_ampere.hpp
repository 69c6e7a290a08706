#pragma once

#include "cma/grid_function.hpp"
#include "cma/measure.hpp"
#include "cma/pl_function.hpp"

#include <vector>

namespace cma {

/// Exact Aleksandrov measure of a PL function: an atom of mass 2*area(subdiff)
/// at every kink vertex, plus the pole mass
///   2*(area conv(slopes u {0}) - area conv(slopes)).
/// Kink vertices outside the closed domain are pooled into exterior_mass.
ExactMeasure ma_pl(const PLConvexFunction& f);

/// Every kink vertex with its mass, inside the domain or not.
std::vector<ExactAtom> kink_atoms(const PLConvexFunction& f);

/// Pole mass alone: 2*(area conv(slopes u {0}) - area conv(slopes)).
Rational pole_mass(const PLConvexFunction& f);

/// Node masses of the discrete Monge-Ampere measure of a grid function.
/// Interior nodes carry 2*area of the hull of the gradients of their incident
/// triangles (the per-square diagonal is the lower one). Mass that belongs to
/// lattice boundary nodes is pooled in boundary_mass.
struct GridMA {
  std::vector<double> node_mass;  // n1*n2, zero on lattice boundary nodes
  double pole_mass = 0;
  double boundary_mass = 0;

  double interior_mass() const;
  double total_mass() const { return interior_mass() + pole_mass + boundary_mass; }
};

GridMA ma_grid_nodes(const GridConvexFunction& f, double eps_conv = 1e-7);

/// ma_grid_nodes as a measure (atoms at nodes of positive mass).
LogMeasure ma_grid(const GridConvexFunction& f, double eps_conv = 1e-7);

LogMeasure to_measure(const GridConvexFunction& f, const GridMA& m, double min_mass = 1e-14);

/// Largest convex function on the lattice below the samples (lower hull of the
/// lifted nodes, as a triangulation-independent set of node values).
GridConvexFunction lower_convex_hull(const GridConvexFunction& f);

/// Mixed measure dd^c h ^ dd^c u by polarization:
///   (ma(u + h) - ma(u) - ma(h)) / 2, node by node.
/// Node values below -clip are reported through `worst_negative`.
GridMA ma_mixed(const GridConvexFunction& u, const GridConvexFunction& h,
                double* worst_negative = nullptr);

}  // namespace cma
