#pragma once
#include <limits>
#include <vector>

#include "semiwell/grid.hpp"

namespace semiwell {

// Connected components of the sublevel set {V < E0} under 2*dim-neighbor
// adjacency, with the separation / diameter / minimum metadata used by the
// admissibility checks.
struct WellDecomposition {
  const GridModel* model = nullptr;
  double threshold = 0;                     // E0
  std::vector<std::vector<int>> components;  // sorted site lists
  std::vector<double> diameters;             // graph diameter, length units
  std::vector<double> well_minima;           // min V per component
  double max_diameter = 0;                   // delta
  double min_pairwise_distance =
      std::numeric_limits<double>::infinity();  // epsilon

  int num_wells() const { return (int)components.size(); }
  // Sites of component h with V < E (the energy-E core of the well).
  std::vector<int> core(int h, double E) const;
};

WellDecomposition find_wells(const GridModel& model, double E0);

struct Assumption1Report {
  double delta = 0;
  double epsilon = 0;
  double sup_min = 0;   // sup_h of the well minima
  bool diameters_finite = false;
  bool separation_positive = false;
  bool thresholds_ordered = false;  // sup_min < E1 < E0
  std::vector<bool> core_nonempty;  // energy-E1 core per well
  bool all_cores_nonempty = false;
  bool all_pass = false;
};

Assumption1Report check_assumption1(const WellDecomposition& decomp, double E1);

}  // namespace semiwell
