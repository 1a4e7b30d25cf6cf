#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "barron/errors.hpp"

namespace barron {

// Tensor-product trigonometric basis on the unit hypercube (0,1)^d.
// A basis function is a product over coordinates of sin(pi k_i x_i) or
// cos(pi k_i x_i); the per-coordinate choice is the parity, the integer
// k_i >= 0 the frequency. The four named families are special parities:
// all-sine, all-cosine, and the mixed family with sine factors at exactly
// two coordinates.

enum class Parity : std::uint8_t { Cos = 0, Sin = 1 };

using ParityVector = std::vector<Parity>;
using MultiIndex = std::vector<std::int32_t>;   // entries >= 0
using SignedIndex = std::vector<std::int64_t>;  // entries may be negative

// One packed code per coordinate: (frequency << 1) | sin-bit. Keys compare
// lexicographically, which gives every container a deterministic order.
using TermKey = std::vector<std::uint32_t>;

inline std::uint32_t pack_coord(Parity p, std::int32_t k) {
  return (static_cast<std::uint32_t>(k) << 1) |
         static_cast<std::uint32_t>(p == Parity::Sin ? 1u : 0u);
}
inline Parity coord_parity(std::uint32_t code) {
  return (code & 1u) ? Parity::Sin : Parity::Cos;
}
inline std::int32_t coord_freq(std::uint32_t code) {
  return static_cast<std::int32_t>(code >> 1);
}

inline TermKey make_key(const ParityVector& p, const MultiIndex& k) {
  if (p.size() != k.size()) throw DimensionError("make_key: parity/index size mismatch");
  TermKey key(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (k[i] < 0) throw MalformedTermError("make_key: negative frequency");
    if (p[i] == Parity::Sin && k[i] == 0)
      throw MalformedTermError("make_key: sine factor with zero frequency is the zero function");
    key[i] = pack_coord(p[i], k[i]);
  }
  return key;
}

inline ParityVector key_parity(const TermKey& key) {
  ParityVector p(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) p[i] = coord_parity(key[i]);
  return p;
}
inline MultiIndex key_index(const TermKey& key) {
  MultiIndex k(key.size());
  for (std::size_t i = 0; i < key.size(); ++i) k[i] = coord_freq(key[i]);
  return k;
}

inline ParityVector all_sin(int d) { return ParityVector(static_cast<std::size_t>(d), Parity::Sin); }
inline ParityVector all_cos(int d) { return ParityVector(static_cast<std::size_t>(d), Parity::Cos); }

// Parity of the mixed family: sine factors at coordinates i and j, cosine
// factors elsewhere (0-based i != j).
inline ParityVector mixed_parity(int d, int i, int j) {
  ParityVector p = all_cos(d);
  p[static_cast<std::size_t>(i)] = Parity::Sin;
  p[static_cast<std::size_t>(j)] = Parity::Sin;
  return p;
}

inline double index_norm_sq(const MultiIndex& k) {
  double s = 0.0;
  for (auto e : k) s += static_cast<double>(e) * static_cast<double>(e);
  return s;
}
inline double index_norm(const MultiIndex& k) { return std::sqrt(index_norm_sq(k)); }

inline double key_norm_sq(const TermKey& key) {
  double s = 0.0;
  for (auto c : key) {
    double f = static_cast<double>(coord_freq(c));
    s += f * f;
  }
  return s;
}

// Pointwise value of the basis function: prod_i trig_i(pi k_i x_i).
inline double eval_basis(const ParityVector& p, const MultiIndex& k, std::span<const double> x) {
  if (p.size() != k.size() || p.size() != x.size())
    throw DimensionError("eval_basis: dimension mismatch");
  double v = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double arg = M_PI * static_cast<double>(k[i]) * x[i];
    v *= (p[i] == Parity::Sin) ? std::sin(arg) : std::cos(arg);
  }
  return v;
}

struct Folded {
  MultiIndex index;
  int sign;  // +1 or -1
};

// Canonicalizes a signed frequency vector using sin(-t) = -sin(t) and
// cos(-t) = cos(t). Returns nothing when a sine coordinate is zero, since
// that term vanishes identically.
inline std::optional<Folded> fold_signed(const ParityVector& p, const SignedIndex& v) {
  if (p.size() != v.size()) throw DimensionError("fold_signed: dimension mismatch");
  Folded out;
  out.index.resize(v.size());
  out.sign = 1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::int64_t e = v[i];
    if (p[i] == Parity::Sin) {
      if (e == 0) return std::nullopt;
      if (e < 0) {
        out.sign = -out.sign;
        e = -e;
      }
    } else {
      if (e < 0) e = -e;
    }
    if (e > INT32_MAX) throw OverflowError("fold_signed: frequency exceeds 32-bit range");
    out.index[i] = static_cast<std::int32_t>(e);
  }
  return out;
}

// Squared L2(Omega) norm of a basis function: product of per-coordinate
// weights, 1 for a constant cosine factor and 1/2 otherwise.
inline double l2_basis_norm_sq(const ParityVector& p, const MultiIndex& k) {
  if (p.size() != k.size()) throw DimensionError("l2_basis_norm_sq: dimension mismatch");
  double w = 1.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == Parity::Sin) {
      if (k[i] == 0)
        throw MalformedTermError("l2_basis_norm_sq: sine factor with zero frequency");
      w *= 0.5;
    } else {
      if (k[i] != 0) w *= 0.5;
    }
  }
  return w;
}

inline double l2_key_norm_sq(const TermKey& key) {
  double w = 1.0;
  for (auto c : key)
    if (coord_freq(c) != 0 || coord_parity(c) == Parity::Sin) w *= 0.5;
  return w;
}

inline std::string parity_string(const ParityVector& p) {
  std::string s;
  s.reserve(p.size());
  for (auto e : p) s.push_back(e == Parity::Sin ? 's' : 'c');
  return s;
}

}  // namespace barron
