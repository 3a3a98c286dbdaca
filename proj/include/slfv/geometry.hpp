#pragma once

#include <array>
#include <cstddef>

#include "slfv/rng.hpp"

namespace slfv {

// Points live in R^d with d <= 3; unused coordinates stay zero.
using Point = std::array<double, 3>;

inline constexpr int kMaxDim = 3;

double unit_ball_volume(int d);
double unit_sphere_area(int d);  // surface area of S^{d-1}

// Volume of B(0,r) intersected with B(h e1, r).
double lens_volume(int d, double r, double h);

// C1 = int_{1/2}^inf V_r(0,e1) / V_r^2 r^{-1-alpha} dr, alpha in (0,2]
double c1_constant(int d, double alpha);
// C2 = int_{1/2}^inf V_r(0,e1) r^{-1-d-beta} dr, beta in (0,d)
double c2_constant(int d, double beta);

Point sample_uniform_ball(RngStream& rng, int d, const Point& center, double r);

double norm(const Point& p, int d);
double distance(const Point& a, const Point& b, int d);

}  // namespace slfv
