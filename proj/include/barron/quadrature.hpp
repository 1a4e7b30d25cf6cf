#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace barron {

using PointFn = std::function<double(std::span<const double>)>;

// Gauss-Legendre nodes and weights on [0,1]; exact for polynomials of
// degree <= 2n-1. Cached per n.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

// Tensor-product Gauss-Legendre integral over (0,1)^d.
double tensor_gl_integral(int dim, int points_per_axis, const PointFn& fn);

// Composite Gauss-Legendre over [a,b] split at the given interior
// breakpoints (sorted or not), n points per piece.
double composite_gl_integral_1d(double a, double b, std::span<const double> breakpoints,
                                int points_per_piece, const std::function<double(double)>& fn);

// Randomized quasi-Monte-Carlo (Halton + seed-derived Cranley-Patterson
// shifts). Returns the estimate and a standard error across shifts.
struct QmcResult {
  double value;
  double std_error;
};
QmcResult qmc_integral(int dim, int samples, std::uint64_t seed, const PointFn& fn);

}  // namespace barron
