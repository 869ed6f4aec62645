#pragma once

#include <Eigen/Dense>
#include <vector>

namespace actopt {

// Closed interval [a,b] inside the unit domain.
struct Interval {
  double a = 0.0;
  double b = 0.0;
};

// Measurable actuator region: a sorted union of disjoint intervals in 1D, or
// a boolean mask over the m x m cell-center grid of (0,1)^2 in 2D.
struct ActuatorShape {
  bool is2d = false;
  // 1D representation
  std::vector<Interval> intervals;
  // 2D representation: row-major mask over cells, cell (ix,iy) has center
  // ((ix+0.5)/m, (iy+0.5)/m) and area 1/m^2; index = iy*m + ix.
  int grid_m = 0;
  std::vector<std::uint8_t> mask;
  // Set by translate() when the displacement had to be reduced to keep the
  // shape inside the domain.
  bool clamped = false;

  static ActuatorShape from_intervals(std::vector<Interval> iv);
  static ActuatorShape from_mask(int m, std::vector<std::uint8_t> mask);
  static ActuatorShape empty1d();
  bool contains(double x) const;            // 1D point membership
  bool contains(double x, double y) const;  // 2D cell membership
};

// Nodal level-set function; the actuator is the negative set {psi < 0}.
// 1D: values on the uniform node grid x_i = i/n_elements, i = 0..n_elements
// (boundary nodes included). 2D: values on the eval-grid cell centers.
struct LevelSetField {
  bool is2d = false;
  std::vector<double> x;  // 1D node coordinates (uniform, includes 0 and 1)
  int m = 0;              // 2D grid size
  Eigen::VectorXd psi;
  // Set by reinitialize() when psi has constant sign and was passed through.
  bool reinit_warning = false;

  int size() const { return static_cast<int>(psi.size()); }
};

// Lebesgue measure: total interval length in 1D, cell_area * #cells in 2D.
double measure(const ActuatorShape& shape);

// Extract the negative set of psi. 1D interval endpoints are located by
// linear interpolation between nodes of opposite sign; a 2D cell belongs to
// the shape iff psi at its center is negative.
ActuatorShape shape_from_levelset(const LevelSetField& psi);

// Reinitialize psi to the signed distance of its zero level set (negative
// inside the shape) by fast sweeping on the Eikonal equation |grad psi| = 1.
// Nodes adjacent to a sign change are pinned to their interpolated interface
// distance, so the induced shape is preserved. Constant-sign fields pass
// through unchanged with reinit_warning set.
LevelSetField reinitialize(const LevelSetField& psi);

// Measure of the symmetric difference (a \ b) u (b \ a). Throws
// std::invalid_argument on mismatched grids.
double symmetric_difference_measure(const ActuatorShape& a, const ActuatorShape& b);

// Rigid translation by v (v.size() == 1 in 1D, 2 in 2D). The displacement is
// reduced -- never split -- when the moved shape would leave the domain, and
// the clamp flag is set on the result. 2D shifts are quantized to whole cells.
ActuatorShape translate(const ActuatorShape& shape, const Eigen::VectorXd& v);

// Discrete upwind (Godunov) gradient norm of psi, used to verify the Eikonal
// property of reinitialized fields.
Eigen::VectorXd upwind_gradient_norm(const LevelSetField& psi);

}  // namespace actopt
