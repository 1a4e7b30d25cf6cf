#include "barron/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace barron {

TrigExpansion::TrigExpansion(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionError("TrigExpansion: dimension must be >= 1");
}

void TrigExpansion::add(const ParityVector& p, const MultiIndex& k, double coeff) {
  add(make_key(p, k), coeff);
}

void TrigExpansion::add(const TermKey& key, double coeff) {
  if (static_cast<int>(key.size()) != dim_)
    throw DimensionError("TrigExpansion::add: key dimension mismatch");
  if (coeff == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(key, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double TrigExpansion::coeff(const ParityVector& p, const MultiIndex& k) const {
  auto it = terms_.find(make_key(p, k));
  return it == terms_.end() ? 0.0 : it->second;
}

double TrigExpansion::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [key, a] : terms_) m = std::max(m, std::abs(a));
  return m;
}

std::int32_t TrigExpansion::max_frequency() const {
  std::int32_t m = 0;
  for (const auto& [key, a] : terms_)
    for (auto c : key) m = std::max(m, coord_freq(c));
  return m;
}

TrigExpansion TrigExpansion::constant(int dim, double value) {
  TrigExpansion g(dim);
  if (value != 0.0) g.add(all_cos(dim), MultiIndex(dim, 0), value);
  return g;
}

TrigExpansion TrigExpansion::basis(const ParityVector& p, const MultiIndex& k, double coeff) {
  TrigExpansion g(static_cast<int>(p.size()));
  g.add(p, k, coeff);
  return g;
}

TrigExpansion axpy(double alpha, const TrigExpansion& g, double beta, const TrigExpansion& h) {
  if (g.dim() != h.dim()) throw DimensionError("axpy: dimension mismatch");
  TrigExpansion out(g.dim());
  if (alpha != 0.0)
    for (const auto& [key, a] : g.terms()) out.add(key, alpha * a);
  if (beta != 0.0)
    for (const auto& [key, a] : h.terms()) out.add(key, beta * a);
  return out;
}

TrigExpansion scale(double alpha, const TrigExpansion& g) {
  TrigExpansion out(g.dim());
  if (alpha != 0.0)
    for (const auto& [key, a] : g.terms()) out.add(key, alpha * a);
  return out;
}

namespace {

// Per-coordinate product of two factors trig(pi m x) * trig(pi n x),
// expanded into (up to) two factors with frequencies m+n and m-n. The
// resulting parity follows the trig identities; negative frequencies are
// folded on the spot and vanishing sine factors dropped.
struct Branch {
  std::uint32_t code;
  double factor;  // +-1/2 (or +-1 after a merge of equal frequencies)
};

inline void coordinate_product(std::uint32_t c1, std::uint32_t c2, Branch out[2], int& count) {
  const bool s1 = coord_parity(c1) == Parity::Sin;
  const bool s2 = coord_parity(c2) == Parity::Sin;
  const std::int64_t m = coord_freq(c1);
  const std::int64_t n = coord_freq(c2);
  const std::int64_t sum = m + n;
  const std::int64_t dif = m - n;
  if (sum > INT32_MAX) throw OverflowError("multiply: frequency overflow");

  count = 0;
  auto push = [&](bool sin, std::int64_t freq, double f) {
    if (sin) {
      if (freq == 0) return;  // sin(0) term vanishes
      if (freq < 0) {
        freq = -freq;
        f = -f;
      }
      out[count++] = {pack_coord(Parity::Sin, static_cast<std::int32_t>(freq)), f};
    } else {
      if (freq < 0) freq = -freq;
      out[count++] = {pack_coord(Parity::Cos, static_cast<std::int32_t>(freq)), f};
    }
  };

  if (s1 && s2) {
    // sin sin = 1/2 [cos(dif) - cos(sum)]
    push(false, dif, 0.5);
    push(false, sum, -0.5);
  } else if (!s1 && !s2) {
    // cos cos = 1/2 [cos(dif) + cos(sum)]
    push(false, dif, 0.5);
    push(false, sum, 0.5);
  } else if (s1 && !s2) {
    // sin cos = 1/2 [sin(sum) + sin(dif)]
    push(true, sum, 0.5);
    push(true, dif, 0.5);
  } else {
    // cos sin = 1/2 [sin(sum) - sin(dif)]
    push(true, sum, 0.5);
    push(true, dif, -0.5);
  }
  // Merge the two branches when they landed on the same factor (e.g. a
  // constant cosine factor), keeping products of constants exact.
  if (count == 2 && out[0].code == out[1].code) {
    out[0].factor += out[1].factor;
    count = out[0].factor == 0.0 ? 0 : 1;
  }
}

}  // namespace

TrigExpansion multiply(const TrigExpansion& g, const TrigExpansion& h) {
  if (g.dim() != h.dim()) throw DimensionError("multiply: dimension mismatch");
  const int d = g.dim();
  TrigExpansion out(d);
  if (g.empty() || h.empty()) return out;

  std::vector<std::pair<TermKey, double>> partial, next;
  for (const auto& [k1, a1] : g.terms()) {
    for (const auto& [k2, a2] : h.terms()) {
      partial.clear();
      partial.emplace_back(TermKey{}, a1 * a2);
      for (int i = 0; i < d; ++i) {
        Branch br[2];
        int count = 0;
        coordinate_product(k1[i], k2[i], br, count);
        if (count == 0) {
          partial.clear();
          break;
        }
        next.clear();
        next.reserve(partial.size() * count);
        for (const auto& [key, f] : partial) {
          for (int b = 0; b < count; ++b) {
            TermKey ext = key;
            ext.push_back(br[b].code);
            next.emplace_back(std::move(ext), f * br[b].factor);
          }
        }
        partial.swap(next);
      }
      for (auto& [key, f] : partial) out.add(key, f);
    }
  }
  return out;
}

TrigExpansion derivative(const TrigExpansion& g, int coord) {
  if (coord < 0 || coord >= g.dim()) throw DimensionError("derivative: coordinate out of range");
  TrigExpansion out(g.dim());
  for (const auto& [key, a] : g.terms()) {
    const std::int32_t k = coord_freq(key[coord]);
    if (k == 0) continue;  // constant cosine factor differentiates to zero
    TermKey dkey = key;
    double c = a * M_PI * static_cast<double>(k);
    if (coord_parity(key[coord]) == Parity::Sin) {
      dkey[coord] = pack_coord(Parity::Cos, k);  // sin' = +cos
    } else {
      dkey[coord] = pack_coord(Parity::Sin, k);  // cos' = -sin
      c = -c;
    }
    out.add(dkey, c);
  }
  return out;
}

ParityVector admissible_parity(int dim, BoundaryKind bc) {
  return bc == BoundaryKind::Dirichlet ? all_sin(dim) : all_cos(dim);
}

std::optional<ParityVector> uniform_parity(const TrigExpansion& g) {
  std::optional<ParityVector> p;
  for (const auto& [key, a] : g.terms()) {
    ParityVector q = key_parity(key);
    if (!p)
      p = std::move(q);
    else if (*p != q)
      return std::nullopt;
  }
  if (!p) p = ParityVector();  // empty expansion: any family
  return p;
}

TrigExpansion inv_shifted_laplacian(const TrigExpansion& g, BoundaryKind bc,
                                    double parity_tol_rel) {
  const ParityVector want = admissible_parity(g.dim(), bc);
  const double tol = parity_tol_rel * g.max_abs_coeff();
  TrigExpansion out(g.dim());
  for (const auto& [key, a] : g.terms()) {
    bool ok = true;
    for (int i = 0; i < g.dim(); ++i)
      if (coord_parity(key[i]) != want[static_cast<std::size_t>(i)]) {
        ok = false;
        break;
      }
    if (!ok) {
      if (std::abs(a) <= tol) continue;  // cancellation dust
      throw ParityError("inv_shifted_laplacian: term outside the admissible family (coefficient " +
                        format_real(a) + ")");
    }
    out.add(key, a / (1.0 + M_PI * M_PI * key_norm_sq(key)));
  }
  return out;
}

namespace {

double barron_weight(double n, double norm) {
  if (n == 0.0) return 2.0;  // 0^0 = 1 convention; see header
  return 1.0 + std::pow(M_PI * norm, n);
}

void require_uniform(const TrigExpansion& g, const char* who) {
  if (!uniform_parity(g))
    throw PreconditionError(std::string(who) +
                            ": expansion mixes basis families; norm undefined");
}

}  // namespace

double barron_norm(const TrigExpansion& g, double weight) {
  if (weight < 0.0) throw PreconditionError("barron_norm: weight must be >= 0");
  require_uniform(g, "barron_norm");
  double s = 0.0;
  for (const auto& [key, a] : g.terms())
    s += std::abs(a) * barron_weight(weight, std::sqrt(key_norm_sq(key)));
  return s;
}

double e_norm_upper(const TrigExpansion& g, double weight) {
  return barron_norm(g, weight);
}

double l2_norm(const TrigExpansion& g) {
  require_uniform(g, "l2_norm");
  double s = 0.0;
  for (const auto& [key, a] : g.terms()) s += a * a * l2_key_norm_sq(key);
  return std::sqrt(s);
}

double inner_l2(const TrigExpansion& g, const TrigExpansion& h) {
  if (g.dim() != h.dim()) throw DimensionError("inner_l2: dimension mismatch");
  require_uniform(g, "inner_l2");
  require_uniform(h, "inner_l2");
  // Distinct keys of one parity family are orthogonal; mixed-parity pairs
  // are excluded by the uniformity requirement above.
  const auto& small = g.size() <= h.size() ? g : h;
  const auto& large = g.size() <= h.size() ? h : g;
  double s = 0.0;
  for (const auto& [key, a] : small.terms()) {
    auto it = large.terms().find(key);
    if (it != large.terms().end()) s += a * it->second * l2_key_norm_sq(key);
  }
  return s;
}

double h1_norm(const TrigExpansion& g) {
  double l2 = l2_norm(g);
  double s = l2 * l2;
  for (int i = 0; i < g.dim(); ++i) {
    double di = l2_norm(derivative(g, i));
    s += di * di;
  }
  return std::sqrt(s);
}

double hminus1_upper(const TrigExpansion& f) {
  return l2_norm(f) / (M_PI * std::sqrt(static_cast<double>(f.dim())));
}

double integral(const TrigExpansion& g) {
  double total = 0.0;
  for (const auto& [key, a] : g.terms()) {
    double w = 1.0;
    for (auto c : key) {
      const std::int32_t k = coord_freq(c);
      if (coord_parity(c) == Parity::Sin) {
        if (k % 2 == 0) {
          w = 0.0;
          break;
        }
        w *= 2.0 / (M_PI * static_cast<double>(k));
      } else if (k != 0) {
        w = 0.0;
        break;
      }
    }
    total += a * w;
  }
  return total;
}

double eval(const TrigExpansion& g, std::span<const double> x) {
  if (static_cast<int>(x.size()) != g.dim()) throw DimensionError("eval: dimension mismatch");
  double total = 0.0;
  for (const auto& [key, a] : g.terms()) {
    double v = a;
    for (int i = 0; i < g.dim(); ++i) {
      const double arg = M_PI * static_cast<double>(coord_freq(key[i])) * x[i];
      v *= coord_parity(key[i]) == Parity::Sin ? std::sin(arg) : std::cos(arg);
    }
    total += v;
  }
  return total;
}

PruneResult prune(const TrigExpansion& g, double tol) {
  if (tol < 0.0) throw PreconditionError("prune: tolerance must be >= 0");
  PruneResult out{TrigExpansion(g.dim()), 0.0};
  for (const auto& [key, a] : g.terms()) {
    if (std::abs(a) < tol)
      out.removed_mass_w2 += std::abs(a) * (1.0 + M_PI * M_PI * key_norm_sq(key));
    else
      out.expansion.add(key, a);
  }
  return out;
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_expansion(std::ostream& os, const TrigExpansion& g) {
  for (const auto& [key, a] : g.terms()) {
    os << parity_string(key_parity(key)) << " (";
    const MultiIndex k = key_index(key);
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (i) os << ',';
      os << k[i];
    }
    os << ") " << format_real(a) << "\n";
  }
}

std::string to_text(const TrigExpansion& g) {
  std::ostringstream os;
  write_expansion(os, g);
  return os.str();
}

void add_term_from_line(TrigExpansion& g, const std::string& line) {
  std::istringstream is(line);
  std::string parity, tuple;
  double coeff;
  if (!(is >> parity >> tuple >> coeff))
    throw IoError("bad expansion term line: '" + line + "'");
  if (tuple.size() < 2 || tuple.front() != '(' || tuple.back() != ')')
    throw IoError("bad index tuple in line: '" + line + "'");
  ParityVector p;
  for (char ch : parity) {
    if (ch == 's')
      p.push_back(Parity::Sin);
    else if (ch == 'c')
      p.push_back(Parity::Cos);
    else
      throw IoError("bad parity string in line: '" + line + "'");
  }
  MultiIndex k;
  std::istringstream ts(tuple.substr(1, tuple.size() - 2));
  std::string field;
  while (std::getline(ts, field, ',')) {
    try {
      k.push_back(std::stoi(field));
    } catch (const std::exception&) {
      throw IoError("bad index entry in line: '" + line + "'");
    }
  }
  if (p.size() != k.size())
    throw IoError("parity/index length mismatch in line: '" + line + "'");
  if (static_cast<int>(p.size()) != g.dim())
    throw IoError("term dimension does not match expansion dimension in line: '" + line + "'");
  try {
    g.add(p, k, coeff);
  } catch (const MalformedTermError& e) {
    throw IoError(std::string(e.what()) + " in line: '" + line + "'");
  }
}

TrigExpansion read_expansion(std::istream& is, int dim) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
    if (!blank) lines.push_back(line);
  }
  if (dim < 0) {
    if (lines.empty())
      throw IoError("cannot infer dimension of an empty expansion; pass dim explicitly");
    std::istringstream first(lines.front());
    std::string parity;
    first >> parity;
    dim = static_cast<int>(parity.size());
  }
  TrigExpansion g(dim);
  for (const auto& l : lines) add_term_from_line(g, l);
  return g;
}

TrigExpansion expansion_from_text(const std::string& text, int dim) {
  std::istringstream is(text);
  return read_expansion(is, dim);
}

}  // namespace barron
