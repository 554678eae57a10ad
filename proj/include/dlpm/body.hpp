#pragma once

#include "dlpm/grid.hpp"

namespace dlpm {

// Rotationally symmetric ellipsoid, volume-normalized axes:
// equatorial semi-axis r*a^(1/n), polar semi-axis r*a^((1-n)/n).
struct rot_ellipsoid {
    double r = 1.0;
    double a = 1.0;
};

axi_fn ellipsoid_support(grid_ptr g, const rot_ellipsoid& E);
axi_fn ellipsoid_radial(grid_ptr g, const rot_ellipsoid& E);
axi_fn ellipsoid_curvature(grid_ptr g, const rot_ellipsoid& E);

// (h'' + h)(h' cot + h)^(n-2). Sets *convex=false when a factor dips
// negative instead of rejecting; callers decide how strict to be.
axi_fn monge_ampere(const axi_fn& h, bool* convex = nullptr);

struct grad_map {
    axi_fn xi_eq;    // distance of the boundary point from the axis
    axi_fn xi_axis;  // coordinate along the axis
};
grad_map gradient_map(const axi_fn& h);
axi_fn grad_norm(const axi_fn& h);

double dual_volume(const axi_fn& rho, double q);
double surface_area(const axi_fn& h);
double body_volume(const axi_fn& h);

// Radial function of the largest convex body with support <= g.
axi_fn alexandrov_radial(const axi_fn& g);
// Support function of the convex hull of the star body with radial rho.
axi_fn support_from_radial(const axi_fn& rho);

// Smallest volume circumscribed ellipsoid of the rotationally symmetric
// class; errors when scaling it by 1/n fails to fit inside the body.
rot_ellipsoid min_ellipsoid(const axi_fn& h);

} // namespace dlpm
