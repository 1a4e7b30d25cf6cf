#include "barron/network.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "barron/quadrature.hpp"
#include "barron/rng.hpp"

namespace barron {

double eval_net(const TwoLayerNet& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.dim) throw DimensionError("eval_net: dimension mismatch");
  double sum = 0.0;
  for (const auto& neuron : net.neurons) {
    double z = neuron.b;
    for (int i = 0; i < net.dim; ++i) z += neuron.w[static_cast<std::size_t>(i)] * x[i];
    sum += neuron.a * (net.activation == Activation::Cosine ? std::cos(z) : std::max(z, 0.0));
  }
  if (net.normalization == NetNormalization::Mean && !net.neurons.empty())
    sum /= static_cast<double>(net.neurons.size());
  return net.offset + sum;
}

std::vector<double> grad_net(const TwoLayerNet& net, std::span<const double> x) {
  if (static_cast<int>(x.size()) != net.dim) throw DimensionError("grad_net: dimension mismatch");
  std::vector<double> grad(static_cast<std::size_t>(net.dim), 0.0);
  for (const auto& neuron : net.neurons) {
    double z = neuron.b;
    for (int i = 0; i < net.dim; ++i) z += neuron.w[static_cast<std::size_t>(i)] * x[i];
    // ReLU uses the a.e. derivative with subgradient 0 at the kink.
    const double slope =
        net.activation == Activation::Cosine ? -std::sin(z) : (z > 0.0 ? 1.0 : 0.0);
    for (int i = 0; i < net.dim; ++i)
      grad[static_cast<std::size_t>(i)] += neuron.a * slope * neuron.w[static_cast<std::size_t>(i)];
  }
  if (net.normalization == NetNormalization::Mean && !net.neurons.empty())
    for (double& gi : grad) gi /= static_cast<double>(net.neurons.size());
  return grad;
}

// ---- phase-amplitude form ----

std::vector<CosAtom> cosine_atoms(const TrigExpansion& g) {
  const int d = g.dim();
  // Accumulate complex coefficients over signed integer frequencies.
  std::map<std::vector<std::int64_t>, std::complex<double>> coeffs;
  for (const auto& [key, a] : g.terms()) {
    std::vector<std::pair<std::vector<std::int64_t>, std::complex<double>>> partial;
    partial.emplace_back(std::vector<std::int64_t>{}, std::complex<double>(a, 0.0));
    for (int i = 0; i < d; ++i) {
      const std::int64_t k = coord_freq(key[i]);
      const bool sin = coord_parity(key[i]) == Parity::Sin;
      std::vector<std::pair<std::int64_t, std::complex<double>>> branches;
      if (k == 0) {
        branches.emplace_back(0, std::complex<double>(1.0, 0.0));
      } else if (sin) {
        // sin t = (e^{it} - e^{-it}) / (2i)
        branches.emplace_back(+k, std::complex<double>(0.0, -0.5));
        branches.emplace_back(-k, std::complex<double>(0.0, +0.5));
      } else {
        branches.emplace_back(+k, std::complex<double>(0.5, 0.0));
        branches.emplace_back(-k, std::complex<double>(0.5, 0.0));
      }
      std::vector<std::pair<std::vector<std::int64_t>, std::complex<double>>> next;
      next.reserve(partial.size() * branches.size());
      for (const auto& [freqs, c] : partial) {
        for (const auto& [bf, bc] : branches) {
          auto ext = freqs;
          ext.push_back(bf);
          next.emplace_back(std::move(ext), c * bc);
        }
      }
      partial.swap(next);
    }
    for (auto& [freqs, c] : partial) coeffs[freqs] += c;
  }

  double max_amp = 0.0;
  for (const auto& [w, c] : coeffs) max_amp = std::max(max_amp, std::abs(c));
  std::vector<CosAtom> atoms;
  atoms.reserve(coeffs.size());
  for (const auto& [w, c] : coeffs) {
    const double amp = std::abs(c);
    if (amp <= 1e-16 * max_amp) continue;  // exact cancellations
    CosAtom atom;
    atom.frequency.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      atom.frequency[static_cast<std::size_t>(i)] = M_PI * static_cast<double>(w[static_cast<std::size_t>(i)]);
    atom.amplitude = amp;
    atom.phase = std::atan2(c.imag(), c.real());
    atoms.push_back(std::move(atom));
  }
  return atoms;
}

namespace {

// E(p) = int_0^1 e^{i p x} dx, stable near p = 0.
std::complex<double> unit_exp_integral(double p) {
  if (p == 0.0) return {1.0, 0.0};
  const double half = 0.5 * p;
  const double sinc = std::abs(half) < 1e-8 ? 1.0 - half * half / 6.0 : std::sin(half) / half;
  return std::polar(sinc, half);
}

// J(p, chi) = Re( e^{i chi} prod_j E(p_j) ) = int cos(p.x + chi) dx.
double cos_integral(std::span<const double> p, double chi) {
  std::complex<double> prod = std::polar(1.0, chi);
  for (double pj : p) prod *= unit_exp_integral(pj);
  return prod.real();
}

// int cos(u.x + phi) cos(v.x + psi) dx over the unit cube.
double cos_pair_integral(std::span<const double> u, double phi, std::span<const double> v,
                         double psi) {
  const std::size_t d = u.size();
  static thread_local std::vector<double> diff, sum;
  diff.resize(d);
  sum.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    diff[i] = u[i] - v[i];
    sum[i] = u[i] + v[i];
  }
  return 0.5 * (cos_integral(diff, phi - psi) + cos_integral(sum, phi + psi));
}

}  // namespace

double atom_l2_inner(const CosAtom& a, const CosAtom& b) {
  return a.amplitude * b.amplitude * cos_pair_integral(a.frequency, a.phase, b.frequency, b.phase);
}

double atom_h1_inner(const CosAtom& a, const CosAtom& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.frequency.size(); ++i) dot += a.frequency[i] * b.frequency[i];
  double v = cos_pair_integral(a.frequency, a.phase, b.frequency, b.phase);
  if (dot != 0.0)
    v += dot * cos_pair_integral(a.frequency, a.phase + M_PI_2, b.frequency, b.phase + M_PI_2);
  return a.amplitude * b.amplitude * v;
}

// ---- cosine networks ----

SamplingMeasure build_measure(const TrigExpansion& g) {
  SamplingMeasure mu;
  mu.dim = g.dim();
  const std::vector<CosAtom> atoms = cosine_atoms(g);
  double z = 0.0;
  for (const auto& atom : atoms) z += atom.amplitude;
  if (z == 0.0) return mu;  // zero function: empty sentinel
  mu.amplitude = z;
  mu.atoms.reserve(atoms.size());
  for (const auto& atom : atoms)
    mu.atoms.push_back({atom.amplitude / z, atom.frequency, atom.phase});
  return mu;
}

TwoLayerNet sample_cosine_net(const SamplingMeasure& mu, int k, std::uint64_t seed) {
  if (k < 1) throw PreconditionError("sample_cosine_net: k must be >= 1");
  if (mu.empty()) throw PreconditionError("sample_cosine_net: empty measure");
  TwoLayerNet net;
  net.activation = Activation::Cosine;
  net.dim = mu.dim;
  net.normalization = NetNormalization::Mean;
  net.neurons.reserve(static_cast<std::size_t>(k));
  std::vector<double> weights(mu.atoms.size());
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) weights[i] = mu.atoms[i].weight;
  CounterRng rng(seed);
  for (int i = 0; i < k; ++i) {
    const MeasureAtom& atom = mu.atoms[categorical(rng, weights)];
    net.neurons.push_back({mu.amplitude, atom.frequency, atom.phase});
  }
  return net;
}

TwoLayerNet best_of_draws(const TrigExpansion& g, int k, int trials, std::uint64_t seed,
                          double* best_error) {
  if (trials < 1) throw PreconditionError("best_of_draws: trials must be >= 1");
  const SamplingMeasure mu = build_measure(g);
  if (mu.empty()) {
    TwoLayerNet net;
    net.activation = Activation::Cosine;
    net.dim = g.dim();
    if (best_error) *best_error = 0.0;
    return net;
  }
  CounterRng rng(seed);
  TwoLayerNet best;
  double best_err = std::numeric_limits<double>::infinity();
  for (int r = 0; r < trials; ++r) {
    TwoLayerNet net = sample_cosine_net(mu, k, rng.child(static_cast<std::uint64_t>(r)).seed());
    const double err = h1_net_error(net, g);
    if (err < best_err) {
      best_err = err;
      best = std::move(net);
    }
  }
  if (best_error) *best_error = best_err;
  return best;
}

// ---- ReLU networks ----

double ReluInterp::value(double z) const {
  double v = constant;
  for (const auto& piece : pieces) v += piece.a * std::max(piece.eps * z + piece.b, 0.0);
  return v;
}

double ReluInterp::derivative(double z) const {
  double v = 0.0;
  for (const auto& piece : pieces)
    if (piece.eps * z + piece.b > 0.0) v += piece.a * piece.eps;
  return v;
}

ReluInterp relu_interp_1d(const RidgeProfile& profile, int m, int dim) {
  if (m < 1) throw PreconditionError("relu_interp_1d: m must be >= 1");
  if (profile.frequency <= 0.0)
    throw PreconditionError("relu_interp_1d: constant profile has no stationary point");
  const double root = std::sqrt(static_cast<double>(dim));
  const double lambda = profile.frequency;
  auto g = [&](double z) { return profile.amplitude * std::cos(lambda * z + profile.phase); };

  // Stationary point of cos(lambda z + phase) nearest zero; ties resolve to
  // the non-negative side.
  const double nearest = std::floor(profile.phase / M_PI + 0.5);
  const double alpha = (nearest * M_PI - profile.phase) / lambda;
  if (!(alpha > -root && alpha < root))
    throw PreconditionError("relu_interp_1d: no interior stationary point");

  ReluInterp out;
  out.stationary_point = alpha;
  out.constant = g(alpha);
  out.bound = std::abs(profile.amplitude) * std::max({1.0, lambda, lambda * lambda});

  const double h1 = (alpha + root) / m;
  const double h2 = (root - alpha) / m;
  auto znode = [&](int j) {
    return j <= m ? -root + h1 * j : alpha + h2 * (j - m);
  };
  out.pieces.reserve(static_cast<std::size_t>(2 * m));
  for (int i = 1; i <= 2 * m; ++i) {
    double a;
    if (i <= m - 1)
      a = (g(znode(i - 1)) - 2.0 * g(znode(i)) + g(znode(i + 1))) / h1;
    else if (i == m)
      a = (g(znode(m - 1)) - g(znode(m))) / h1;
    else if (i == m + 1)
      a = (g(znode(m + 1)) - g(znode(m))) / h2;
    else
      a = (g(znode(i - 2)) - 2.0 * g(znode(i - 1)) + g(znode(i))) / h2;
    if (i <= m)
      out.pieces.push_back({a, -1.0, znode(i)});
    else
      out.pieces.push_back({a, +1.0, -znode(i - 1)});
  }
  return out;
}

TwoLayerNet build_relu_net(const TrigExpansion& g, int k, int m, std::uint64_t seed) {
  if (k < 1 || m < 1) throw PreconditionError("build_relu_net: k and m must be >= 1");
  const int d = g.dim();
  TwoLayerNet net;
  net.activation = Activation::ReLU;
  net.dim = d;
  net.normalization = NetNormalization::Sum;

  // The zero mode goes straight into the offset.
  TrigExpansion rest(d);
  double zero_mode = 0.0;
  const TermKey zero_key = make_key(all_cos(d), MultiIndex(static_cast<std::size_t>(d), 0));
  for (const auto& [key, a] : g.terms()) {
    if (key == zero_key)
      zero_mode = a;
    else
      rest.add(key, a);
  }
  net.offset = zero_mode;
  if (rest.empty()) return net;  // constant target: offset only

  const std::vector<CosAtom> atoms = cosine_atoms(rest);
  double total_mass = 0.0;
  std::vector<double> weights(atoms.size());
  std::vector<double> freq_norms(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    double norm_sq = 0.0;
    for (double f : atoms[i].frequency) norm_sq += f * f;
    freq_norms[i] = std::sqrt(norm_sq);
    weights[i] = atoms[i].amplitude * (1.0 + norm_sq);
    total_mass += weights[i];
  }
  for (double& w : weights) w /= total_mass;

  // Interpolate each distinct atom's ridge profile once; shared dictionary
  // amplitude total_mass / (1 + ||freq||^2) keeps the convex combination of
  // the interpolants equal (up to interpolation error) to g - zero_mode.
  struct AtomNet {
    ReluInterp interp;
    std::vector<double> direction;
    double piece_mass = 0.0;  // sum_j |a_j|
  };
  std::vector<AtomNet> dictionary(atoms.size());
  std::vector<std::vector<double>> piece_weights(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    RidgeProfile profile{freq_norms[i], atoms[i].phase,
                         total_mass / (1.0 + freq_norms[i] * freq_norms[i])};
    dictionary[i].interp = relu_interp_1d(profile, m, d);
    dictionary[i].direction.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      dictionary[i].direction[static_cast<std::size_t>(j)] =
          atoms[i].frequency[static_cast<std::size_t>(j)] / freq_norms[i];
    auto& pw = piece_weights[i];
    pw.resize(dictionary[i].interp.pieces.size());
    for (std::size_t j = 0; j < pw.size(); ++j) {
      pw[j] = std::abs(dictionary[i].interp.pieces[j].a);
      dictionary[i].piece_mass += pw[j];
    }
  }

  // Maurey step: k iid single-neuron draws (atom by Barron mass, piece by
  // coefficient mass), averaged with weight 1/k each.
  CounterRng rng(seed);
  net.neurons.reserve(static_cast<std::size_t>(k));
  const double inv_k = 1.0 / static_cast<double>(k);
  for (int draw = 0; draw < k; ++draw) {
    const std::size_t ai = categorical(rng, weights);
    const AtomNet& entry = dictionary[ai];
    net.offset += inv_k * entry.interp.constant;
    if (entry.piece_mass == 0.0) continue;
    const std::size_t pj = categorical(rng, piece_weights[ai]);
    const ReluPiece& piece = entry.interp.pieces[pj];
    Neuron neuron;
    neuron.a = (piece.a >= 0.0 ? 1.0 : -1.0) * entry.piece_mass * inv_k;
    neuron.b = piece.b;
    neuron.w.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j)
      neuron.w[static_cast<std::size_t>(j)] = piece.eps * entry.direction[static_cast<std::size_t>(j)];
    net.neurons.push_back(std::move(neuron));
  }
  return net;
}

// ---- errors ----

namespace {

double cosine_net_error_closed_form(const TwoLayerNet& net, const TrigExpansion& g) {
  // Signed atom list: net atoms minus target atoms, duplicates merged.
  std::map<std::pair<std::vector<double>, double>, double> merged;
  const double scale = net.normalization == NetNormalization::Mean && !net.neurons.empty()
                           ? 1.0 / static_cast<double>(net.neurons.size())
                           : 1.0;
  for (const auto& neuron : net.neurons)
    merged[{neuron.w, neuron.b}] += scale * neuron.a;
  if (net.offset != 0.0)
    merged[{std::vector<double>(static_cast<std::size_t>(net.dim), 0.0), 0.0}] += net.offset;
  for (const auto& atom : cosine_atoms(g)) merged[{atom.frequency, atom.phase}] -= atom.amplitude;

  std::vector<CosAtom> list;
  list.reserve(merged.size());
  for (const auto& [key, amp] : merged) {
    if (amp == 0.0) continue;
    list.push_back({key.first, key.second, amp});
  }
  double err_sq = 0.0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    err_sq += atom_h1_inner(list[i], list[i]);
    for (std::size_t j = i + 1; j < list.size(); ++j)
      err_sq += 2.0 * atom_h1_inner(list[i], list[j]);
  }
  return std::sqrt(std::max(err_sq, 0.0));
}

struct TargetEval {
  const TrigExpansion* g;
  std::vector<TrigExpansion> gradients;

  explicit TargetEval(const TrigExpansion& target) : g(&target) {
    for (int i = 0; i < target.dim(); ++i) gradients.push_back(derivative(target, i));
  }
  double integrand(const TwoLayerNet& net, std::span<const double> x) const {
    const double dv = eval_net(net, x) - eval(*g, x);
    double total = dv * dv;
    const std::vector<double> gn = grad_net(net, x);
    for (std::size_t i = 0; i < gn.size(); ++i) {
      const double dg = gn[i] - eval(gradients[i], x);
      total += dg * dg;
    }
    return total;
  }
};

}  // namespace

double h1_net_error_quadrature(const TwoLayerNet& net, const TrigExpansion& g,
                               int points_per_axis) {
  TargetEval target(g);
  const double v = tensor_gl_integral(
      net.dim, points_per_axis, [&](std::span<const double> x) { return target.integrand(net, x); });
  return std::sqrt(std::max(v, 0.0));
}

NetError h1_net_error_detail(const TwoLayerNet& net, const TrigExpansion& g) {
  if (net.dim != g.dim()) throw DimensionError("h1_net_error: dimension mismatch");
  NetError out;
  if (net.activation == Activation::Cosine) {
    out.value = cosine_net_error_closed_form(net, g);
    return out;
  }
  TargetEval target(g);
  if (net.dim == 1) {
    // Kinks are isolated points: split and integrate each smooth piece.
    std::vector<double> kinks;
    for (const auto& neuron : net.neurons) {
      if (neuron.w[0] == 0.0) continue;
      const double x = -neuron.b / neuron.w[0];
      if (x > 0.0 && x < 1.0) kinks.push_back(x);
    }
    std::vector<double> x(1);
    const double v = composite_gl_integral_1d(0.0, 1.0, kinks, 32, [&](double t) {
      x[0] = t;
      return target.integrand(net, x);
    });
    out.value = std::sqrt(std::max(v, 0.0));
  } else if (net.dim <= 3) {
    const int pts = net.dim == 2 ? 64 : 24;
    const double v = tensor_gl_integral(net.dim, pts, [&](std::span<const double> x) {
      return target.integrand(net, x);
    });
    out.value = std::sqrt(std::max(v, 0.0));
  } else {
    const QmcResult q = qmc_integral(net.dim, 1 << 14, 0x9E3779B9u,
                                     [&](std::span<const double> x) { return target.integrand(net, x); });
    out.value = std::sqrt(std::max(q.value, 0.0));
    out.std_error = out.value > 0.0 ? 0.5 * q.std_error / out.value : q.std_error;
  }
  return out;
}

double h1_net_error(const TwoLayerNet& net, const TrigExpansion& g) {
  return h1_net_error_detail(net, g).value;
}

// ---- serialization ----

void write_network(std::ostream& os, const TwoLayerNet& net) {
  os << "activation " << (net.activation == Activation::Cosine ? "cosine" : "relu") << "\n";
  os << "dim " << net.dim << "\n";
  os << "k " << net.neurons.size() << "\n";
  os << "normalization " << (net.normalization == NetNormalization::Mean ? "mean" : "sum") << "\n";
  os << "offset " << format_real(net.offset) << "\n";
  for (const auto& neuron : net.neurons) {
    os << format_real(neuron.a);
    for (double w : neuron.w) os << ' ' << format_real(w);
    os << ' ' << format_real(neuron.b) << "\n";
  }
}

TwoLayerNet read_network(std::istream& is) {
  TwoLayerNet net;
  std::string key, value;
  std::size_t k = 0;
  for (int line = 0; line < 5; ++line) {
    if (!(is >> key >> value)) throw IoError("network file: truncated header");
    if (key == "activation") {
      if (value == "cosine")
        net.activation = Activation::Cosine;
      else if (value == "relu")
        net.activation = Activation::ReLU;
      else
        throw IoError("network file: unknown activation '" + value + "'");
    } else if (key == "dim") {
      net.dim = std::stoi(value);
    } else if (key == "k") {
      k = static_cast<std::size_t>(std::stoul(value));
    } else if (key == "normalization") {
      if (value == "mean")
        net.normalization = NetNormalization::Mean;
      else if (value == "sum")
        net.normalization = NetNormalization::Sum;
      else
        throw IoError("network file: unknown normalization '" + value + "'");
    } else if (key == "offset") {
      net.offset = std::stod(value);
    } else {
      throw IoError("network file: unexpected header key '" + key + "'");
    }
  }
  net.neurons.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    Neuron& neuron = net.neurons[i];
    neuron.w.resize(static_cast<std::size_t>(net.dim));
    if (!(is >> neuron.a)) throw IoError("network file: truncated neuron list");
    for (int j = 0; j < net.dim; ++j) is >> neuron.w[static_cast<std::size_t>(j)];
    if (!(is >> neuron.b)) throw IoError("network file: truncated neuron line");
  }
  return net;
}

void save_network(const std::string& path, const TwoLayerNet& net) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  write_network(os, net);
}

TwoLayerNet load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open network file '" + path + "'");
  return read_network(is);
}

}  // namespace barron
