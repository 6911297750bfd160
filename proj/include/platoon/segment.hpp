#pragma once

#include <vector>

#include "platoon/netcalc.hpp"

namespace platoon {

/// One road segment as seen by the optimizer and the bandwidth reallocator.
struct SegmentState {
  int id = 0;
  double rho = 0.05;          ///< vehicles per meter; 1/rho is the mean spacing
  double bandwidth = 0.0;     ///< R_i, Mb/s
  int lanes = 1;
  double radio_range = 100.0; ///< V2V radio range L, m
  std::vector<netcalc::NodeResources> vehicles;

  void validate() const;
};

}  // namespace platoon
