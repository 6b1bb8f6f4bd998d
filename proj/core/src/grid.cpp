#include "semiwell/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace semiwell {

double GridModel::site_distance(int a, int b) const {
  auto ca = coords(a), cb = coords(b);
  double d = 0;
  for (int ax = 0; ax < dim; ++ax) {
    int diff = std::abs(ca[ax] - cb[ax]);
    if (boundary == Boundary::periodic_torus)
      diff = std::min(diff, shape[ax] - diff);
    d += diff;
  }
  return d * spacing;
}

std::vector<int> GridModel::neighbors(int site) const {
  std::vector<int> out;
  out.reserve(incident[site].size());
  for (int e : incident[site]) {
    const Edge& ed = edges[e];
    out.push_back(ed.tail == site ? ed.head : ed.tail);
  }
  return out;
}

double GridModel::edge_phase(int tail, int head) const {
  for (int e : incident[tail]) {
    const Edge& ed = edges[e];
    if (ed.tail == tail && ed.head == head) return ed.phase;
    if (ed.head == tail && ed.tail == head) return -ed.phase;
  }
  throw BadShape("sites are not adjacent");
}

GridModel build_grid(int dim, const std::vector<int>& shape, double spacing,
                     Boundary boundary, const PotentialFn& V,
                     const VectorPotentialFn& A) {
  if (dim != 1 && dim != 2) throw BadShape("dim must be 1 or 2");
  if ((int)shape.size() != dim) throw BadShape("shape size must equal dim");
  for (int s : shape)
    if (s < 1) throw BadShape("shape entries must be >= 1");
  if (spacing <= 0) throw BadShape("spacing must be positive");

  GridModel m;
  m.dim = dim;
  m.shape = shape;
  m.spacing = spacing;
  m.boundary = boundary;

  const int n = m.num_sites();
  m.potential.resize(n);
  for (int i = 0; i < n; ++i) {
    double v = V(m.position(i));
    if (v < 0) throw NegativePotential("V < 0 at a site");
    m.potential[i] = v;
  }

  m.incident.assign(n, {});
  // One edge per site per axis in the + direction; wrap edges on the torus.
  // The midpoint of a wrap edge lies half a step beyond the box, where A is
  // still evaluated (A is a function of position, not of the quotient).
  for (int i = 0; i < n; ++i) {
    auto c = m.coords(i);
    for (int ax = 0; ax < dim; ++ax) {
      int next = c[ax] + 1;
      bool wrap = false;
      if (next >= shape[ax]) {
        if (boundary != Boundary::periodic_torus || shape[ax] < 2) continue;
        next = 0;
        wrap = true;
      }
      int j = (ax == 0) ? m.site_index(next, c[1]) : m.site_index(c[0], next);
      auto p = m.position(i);
      std::array<double, 2> mid = p;
      mid[ax] += 0.5 * spacing;
      (void)wrap;
      double theta = A(mid)[ax] * spacing;
      Edge e{i, j, ax, theta};
      m.incident[i].push_back((int)m.edges.size());
      m.incident[j].push_back((int)m.edges.size());
      m.edges.push_back(e);
    }
  }

  double lip = 0;
  for (const Edge& e : m.edges)
    lip = std::max(lip,
                   std::abs(m.potential[e.head] - m.potential[e.tail]) / spacing);
  m.lipschitz_bound = lip;
  return m;
}

double plaquette_flux(const GridModel& model, int site) {
  if (model.dim != 2) throw BadShape("plaquette_flux needs dim 2");
  auto c = model.coords(site);
  auto wrap = [&](int x, int ax) {
    if (model.boundary == Boundary::periodic_torus) return x % model.shape[ax];
    if (x >= model.shape[ax]) throw BadShape("plaquette leaves the box");
    return x;
  };
  int s00 = site;
  int s10 = model.site_index(wrap(c[0] + 1, 0), c[1]);
  int s11 = model.site_index(wrap(c[0] + 1, 0), wrap(c[1] + 1, 1));
  int s01 = model.site_index(c[0], wrap(c[1] + 1, 1));
  return model.edge_phase(s00, s10) + model.edge_phase(s10, s11) +
         model.edge_phase(s11, s01) + model.edge_phase(s01, s00);
}

}  // namespace semiwell
