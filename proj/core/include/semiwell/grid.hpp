#pragma once
#include <array>
#include <functional>
#include <vector>

#include "semiwell/errors.hpp"

namespace semiwell {

enum class Boundary { dirichlet_box, periodic_torus };

// One undirected lattice edge; `phase` is the line integral of the vector
// potential along tail -> head (midpoint rule), so the reverse orientation
// carries -phase.
struct Edge {
  int tail;
  int head;
  int axis;
  double phase;
};

// Flat 1D/2D lattice carrying the potential V at sites and Peierls phases on
// edges.  Geometry is row-major: site = x0 + shape[0]*x1.
struct GridModel {
  int dim = 1;
  std::vector<int> shape;
  double spacing = 1.0;
  Boundary boundary = Boundary::dirichlet_box;
  std::vector<double> potential;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> incident;  // site -> edge indices
  double lipschitz_bound = 0.0;            // max |dV| / a over edges

  int num_sites() const {
    int n = 1;
    for (int s : shape) n *= s;
    return n;
  }
  std::array<int, 2> coords(int site) const {
    if (dim == 1) return {site, 0};
    return {site % shape[0], site / shape[0]};
  }
  int site_index(int x0, int x1) const {
    if (dim == 1) return x0;
    return x0 + shape[0] * x1;
  }
  std::array<double, 2> position(int site) const {
    auto c = coords(site);
    return {c[0] * spacing, c[1] * spacing};
  }
  // Graph geodesic distance in length units (Manhattan, wrapped on the torus).
  double site_distance(int a, int b) const;
  std::vector<int> neighbors(int site) const;
  // Phase of the directed edge tail -> head; the pair must be adjacent.
  double edge_phase(int tail, int head) const;
};

using PotentialFn = std::function<double(const std::array<double, 2>&)>;
using VectorPotentialFn =
    std::function<std::array<double, 2>(const std::array<double, 2>&)>;

GridModel build_grid(int dim, const std::vector<int>& shape, double spacing,
                     Boundary boundary, const PotentialFn& V,
                     const VectorPotentialFn& A);

// Sum of oriented edge phases around the unit plaquette with lower-left
// corner at the given site (2D only): the discrete magnetic flux.
double plaquette_flux(const GridModel& model, int site);

}  // namespace semiwell
