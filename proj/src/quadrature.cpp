#include "barron/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "barron/errors.hpp"
#include "barron/rng.hpp"

namespace barron {

namespace {

// Nodes via Newton iteration on P_n, started from the Chebyshev-angle
// approximation. Computed on [-1,1], then mapped to [0,1].
GaussLegendre compute_gl(int n) {
  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    gl.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    gl.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return gl;
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("gauss_legendre: need n >= 1");
  static std::map<int, GaussLegendre> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gl(n)).first;
  return it->second;
}

double tensor_gl_integral(int dim, int points_per_axis, const PointFn& fn) {
  if (dim < 1 || dim > 4)
    throw PreconditionError("tensor_gl_integral: supported for 1 <= d <= 4");
  const GaussLegendre& gl = gauss_legendre(points_per_axis);
  const int n = points_per_axis;
  std::vector<int> idx(dim, 0);
  std::vector<double> x(dim);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < dim; ++j) {
      x[j] = gl.nodes[idx[j]];
      w *= gl.weights[idx[j]];
    }
    total += w * fn(x);
    int j = 0;
    for (; j < dim; ++j) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
    if (j == dim) break;
  }
  return total;
}

double composite_gl_integral_1d(double a, double b, std::span<const double> breakpoints,
                                int points_per_piece,
                                const std::function<double(double)>& fn) {
  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> edges;
  edges.push_back(a);
  for (double c : cuts)
    if (c > a + 1e-15 && c < b - 1e-15) edges.push_back(c);
  edges.push_back(b);
  const GaussLegendre& gl = gauss_legendre(points_per_piece);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p], len = edges[p + 1] - edges[p];
    if (len <= 0.0) continue;
    for (int i = 0; i < points_per_piece; ++i)
      total += len * gl.weights[i] * fn(lo + len * gl.nodes[i]);
  }
  return total;
}

QmcResult qmc_integral(int dim, int samples, std::uint64_t seed, const PointFn& fn) {
  const int shifts = 8;
  const int per_shift = std::max(1, samples / shifts);
  Halton halton(dim);
  CounterRng rng(seed);
  std::vector<double> means(shifts, 0.0);
  std::vector<double> x(dim);
  for (int s = 0; s < shifts; ++s) {
    CounterRng shift_rng = rng.child(static_cast<std::uint64_t>(s));
    std::vector<double> shift(dim);
    for (int j = 0; j < dim; ++j) shift[j] = shift_rng.uniform();
    double acc = 0.0;
    for (int i = 0; i < per_shift; ++i) {
      std::vector<double> h = halton.point(static_cast<std::uint64_t>(i) + 1);
      for (int j = 0; j < dim; ++j) {
        x[j] = h[j] + shift[j];
        if (x[j] >= 1.0) x[j] -= 1.0;
      }
      acc += fn(x);
    }
    means[s] = acc / per_shift;
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= shifts;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (shifts - 1);
  return {mean, std::sqrt(var / shifts)};
}

}  // namespace barron
