#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "barron/expansion.hpp"

namespace barron {

// Two-layer networks extracted from expansions: cosine nets by sampling an
// explicit measure over the expansion's phase-amplitude atoms, ReLU nets by
// piecewise-linear interpolation of the atoms' ridge profiles followed by
// convex (Maurey) sampling.

enum class Activation { Cosine, ReLU };
enum class NetNormalization { Mean, Sum };

struct Neuron {
  double a = 0.0;          // outer weight
  std::vector<double> w;   // inner weight, length d
  double b = 0.0;          // bias
};

struct TwoLayerNet {
  Activation activation = Activation::Cosine;
  int dim = 1;
  NetNormalization normalization = NetNormalization::Mean;
  double offset = 0.0;  // ReLU nets only; 0 for cosine
  std::vector<Neuron> neurons;

  int k() const { return static_cast<int>(neurons.size()); }
};

double eval_net(const TwoLayerNet& net, std::span<const double> x);
std::vector<double> grad_net(const TwoLayerNet& net, std::span<const double> x);

// ---- phase-amplitude form ----

// One atom amp * cos(freq . x + phase); every finite expansion is exactly a
// sum of at most 2^d such atoms per term (sign unfolding of the factors).
struct CosAtom {
  std::vector<double> frequency;  // pi * (signed integer vector)
  double phase = 0.0;
  double amplitude = 0.0;
};
std::vector<CosAtom> cosine_atoms(const TrigExpansion& g);

// H1(Omega) inner product of two atoms, in closed form (per-coordinate
// complex factor integrals).
double atom_h1_inner(const CosAtom& a, const CosAtom& b);
double atom_l2_inner(const CosAtom& a, const CosAtom& b);

// ---- cosine networks ----

struct MeasureAtom {
  double weight = 0.0;            // probability
  std::vector<double> frequency;  // inner weight of the neuron
  double phase = 0.0;             // bias of the neuron
};

struct SamplingMeasure {
  int dim = 1;
  double amplitude = 0.0;  // shared outer weight Z = sum of atom amplitudes
  std::vector<MeasureAtom> atoms;

  bool empty() const { return atoms.empty(); }
};

// Probability measure whose one-neuron mean reproduces g pointwise.
// g = 0 yields the empty sentinel.
SamplingMeasure build_measure(const TrigExpansion& g);

// k independent draws; neuron i carries (Z, frequency, phase).
TwoLayerNet sample_cosine_net(const SamplingMeasure& mu, int k, std::uint64_t seed);

// Best of `trials` independent nets under the exact H1 error.
TwoLayerNet best_of_draws(const TrigExpansion& g, int k, int trials, std::uint64_t seed,
                          double* best_error = nullptr);

// ---- ReLU networks ----

// Ridge profile z -> amplitude * cos(frequency * z + phase) on
// [-sqrt(d), sqrt(d)].
struct RidgeProfile {
  double frequency = 0.0;
  double phase = 0.0;
  double amplitude = 0.0;
};

struct ReluPiece {
  double a = 0.0;    // coefficient of ReLU(eps * z + b)
  double eps = 0.0;  // +1 or -1
  double b = 0.0;
};

struct ReluInterp {
  double constant = 0.0;          // value at the stationary point
  double stationary_point = 0.0;  // alpha, interior grid anchor
  double bound = 0.0;             // B: max of |g|, |g'|, |g''| on the interval
  std::vector<ReluPiece> pieces;  // 2m pieces

  double value(double z) const;       // the interpolant
  double derivative(double z) const;  // its a.e. derivative
};

// Piecewise-linear interpolation of the profile on 2m intervals anchored at
// the stationary point nearest zero; |constant| <= B, |a_i| <= 4 sqrt(d) B/m,
// |b_i| <= sqrt(d). Constant profiles (frequency 0) are rejected: callers
// bypass interpolation for them.
ReluInterp relu_interp_1d(const RidgeProfile& profile, int m, int dim);

// Full pipeline: offset absorbs the zero mode, atoms are interpolated along
// their ridge directions, and k single neurons are Maurey-sampled with the
// normalized |c_w|(1 + ||freq||^2) weights. Coefficient boxes hold exactly:
// sum |a_i| <= 8 sqrt(d) ||g||_{B2}, ||w_i|| = 1, |b_i| <= sqrt(d),
// |offset| <= 2 ||g||_{B2}.
TwoLayerNet build_relu_net(const TrigExpansion& g, int k, int m, std::uint64_t seed);

// ---- errors ----

// ||net - g||_{H1(Omega)}. Cosine nets use the closed-form atom Gram; ReLU
// nets use kink-split quadrature in d = 1, tensor Gauss-Legendre for
// d in {2,3} and randomized QMC beyond (std_error reported then).
struct NetError {
  double value = 0.0;
  double std_error = 0.0;  // nonzero only for the QMC path
};
NetError h1_net_error_detail(const TwoLayerNet& net, const TrigExpansion& g);
double h1_net_error(const TwoLayerNet& net, const TrigExpansion& g);

// Quadrature route for cosine nets, used to cross-check the closed form.
double h1_net_error_quadrature(const TwoLayerNet& net, const TrigExpansion& g,
                               int points_per_axis);

// ---- serialization ----

// Header lines (activation/dim/k/normalization/offset) followed by one
// neuron per line `a w_1 ... w_d b`; 17 significant digits, so files
// round-trip bit-exactly.
void write_network(std::ostream& os, const TwoLayerNet& net);
TwoLayerNet read_network(std::istream& is);
void save_network(const std::string& path, const TwoLayerNet& net);
TwoLayerNet load_network(const std::string& path);

}  // namespace barron
