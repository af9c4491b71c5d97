#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraclap/laplacian.hpp"
#include "fraclap/space.hpp"

namespace fraclap {

// Finite truncations of the discrete dual group of the base space, the
// length functions induced on them by the fractional generator, and the
// seminorm machinery for functions valued in the base algebra.
//
//  circle dual: integers k with |k| <= R; composition may leave the
//               truncation and is then flagged.
//  cantor dual: characters with nontrivial digits up to depth R, i.e.
//               digit words (a_1..a_R) mod N. Digitwise addition never
//               leaves the truncation, so this one is an honest group.

enum class DualKind { CircleDual, CantorDual };

class GroupModel {
 public:
  static GroupModel circle_dual(int radius) {
    if (radius < 1) throw ValidationError("circle dual: radius must be >= 1");
    GroupModel g;
    g.kind_ = DualKind::CircleDual;
    g.R_ = radius;
    g.size_ = 2 * radius + 1;
    return g;
  }

  static GroupModel cantor_dual(int symbols, int radius) {
    if (symbols < 2) throw ValidationError("cantor dual: N must be >= 2");
    if (radius < 1) throw ValidationError("cantor dual: radius must be >= 1");
    double sz = std::pow(static_cast<double>(symbols), radius);
    if (sz > 1e5) throw ValidationError("cantor dual: N^R exceeds the 1e5 guard");
    GroupModel g;
    g.kind_ = DualKind::CantorDual;
    g.R_ = radius;
    g.N_ = symbols;
    g.size_ = static_cast<int>(std::llround(sz));
    return g;
  }

  DualKind kind() const { return kind_; }
  int radius() const { return R_; }
  int symbols() const { return N_; }
  int size() const { return size_; }
  int identity() const { return kind_ == DualKind::CircleDual ? R_ : 0; }

  // circle index <-> integer label
  int k_of(int idx) const { return idx - R_; }
  int idx_of_k(int k) const { return k + R_; }

  // cantor digits, a_1 first (least significant in the index)
  std::vector<int> digits(int idx) const {
    std::vector<int> d(static_cast<std::size_t>(R_));
    for (int j = 0; j < R_; ++j) {
      d[static_cast<std::size_t>(j)] = idx % N_;
      idx /= N_;
    }
    return d;
  }
  int idx_of_digits(const std::vector<int>& d) const {
    int idx = 0;
    for (int j = R_ - 1; j >= 0; --j)
      idx = idx * N_ + d[static_cast<std::size_t>(j)];
    return idx;
  }

  // word depth for cantor, |k| for circle
  int depth(int idx) const {
    if (kind_ == DualKind::CircleDual) return std::abs(k_of(idx));
    auto d = digits(idx);
    for (int j = R_ - 1; j >= 0; --j)
      if (d[static_cast<std::size_t>(j)] != 0) return j + 1;
    return 0;
  }

  std::optional<int> compose(int a, int b) const {
    if (kind_ == DualKind::CircleDual) {
      int k = k_of(a) + k_of(b);
      if (std::abs(k) > R_) return std::nullopt;
      return idx_of_k(k);
    }
    auto da = digits(a), db = digits(b);
    for (int j = 0; j < R_; ++j)
      da[static_cast<std::size_t>(j)] =
          (da[static_cast<std::size_t>(j)] + db[static_cast<std::size_t>(j)]) % N_;
    return idx_of_digits(da);
  }

  int inverse(int a) const {
    if (kind_ == DualKind::CircleDual) return idx_of_k(-k_of(a));
    auto d = digits(a);
    for (int j = 0; j < R_; ++j)
      d[static_cast<std::size_t>(j)] =
          (N_ - d[static_cast<std::size_t>(j)]) % N_;
    return idx_of_digits(d);
  }

  std::string label(int idx) const {
    if (kind_ == DualKind::CircleDual) return std::to_string(k_of(idx));
    if (idx == 0) return "e";
    auto d = digits(idx);
    int dep = depth(idx);
    std::string s;
    for (int j = 0; j < dep; ++j) {
      if (N_ > 9 && j > 0) s += '-';
      s += std::to_string(d[static_cast<std::size_t>(j)]);
    }
    return s;
  }

  int index_of_label(const std::string& lbl) const {
    if (kind_ == DualKind::CircleDual) {
      int k = std::stoi(lbl);
      if (std::abs(k) > R_)
        throw ValidationError("group label outside the truncation: " + lbl);
      return idx_of_k(k);
    }
    if (lbl == "e") return 0;
    std::vector<int> d(static_cast<std::size_t>(R_), 0);
    if (N_ <= 9) {
      if (static_cast<int>(lbl.size()) > R_)
        throw ValidationError("group label outside the truncation: " + lbl);
      for (std::size_t j = 0; j < lbl.size(); ++j) {
        int v = lbl[j] - '0';
        if (v < 0 || v >= N_)
          throw ValidationError("bad digit in group label: " + lbl);
        d[j] = v;
      }
    } else {
      std::size_t pos = 0;
      int j = 0;
      while (pos < lbl.size()) {
        auto dash = lbl.find('-', pos);
        std::string tok = lbl.substr(pos, dash == std::string::npos
                                              ? std::string::npos
                                              : dash - pos);
        if (j >= R_)
          throw ValidationError("group label outside the truncation: " + lbl);
        d[static_cast<std::size_t>(j++)] = std::stoi(tok);
        pos = dash == std::string::npos ? lbl.size() : dash + 1;
      }
    }
    return idx_of_digits(d);
  }

 private:
  DualKind kind_ = DualKind::CircleDual;
  int R_ = 1;
  int N_ = 0;
  int size_ = 0;
};

//----------------------------------------------------------------------------
// Length functions.

enum class LengthSource { CircleQuadrature, CantorExact, Custom };

struct LengthFunction {
  std::vector<double> values;  // indexed like the GroupModel
  LengthSource source = LengthSource::Custom;

  double operator()(int idx) const {
    return values[static_cast<std::size_t>(idx)];
  }
};

namespace detail {

// Cumulative integral Phi(T) = int_0^T (1 - cos 2 pi u) / u^{1+2a} du,
// evaluated at half-integers T = k/2 by an initial series on [0, 1/8]
// followed by 16-point Gauss-Legendre panels of width 1/8.
class CosIntegralTable {
 public:
  CosIntegralTable(double two_alpha, int kmax) : a2_(two_alpha) {
    const double eps = 0.125;
    double head = series_head(eps);
    // prefix sums at panel boundaries j/8, j >= 1
    int panels = 4 * kmax;  // up to u = kmax/2
    prefix_.resize(static_cast<std::size_t>(panels) + 1);
    prefix_[0] = head;
    for (int j = 0; j < panels; ++j) {
      double lo = eps + j * 0.125, hi = lo + 0.125;
      prefix_[static_cast<std::size_t>(j) + 1] =
          prefix_[static_cast<std::size_t>(j)] + gauss16(lo, hi);
    }
  }

  // Phi(k/2) for k >= 1: boundary index 4k - 1 panels past eps... the panel
  // grid starts at 1/8, so u = k/2 corresponds to boundary j = 4k - 1 + 1.
  double phi_half(int k) const {
    return prefix_[static_cast<std::size_t>(4 * k - 1)];
  }

 private:
  double series_head(double eps) const {
    // int_0^eps sum_{m>=1} (-1)^{m+1} (2 pi u)^{2m} / (2m)! * u^{-1-a2} du
    double acc = 0.0;
    double x = 2.0 * M_PI;
    double pow_x = 1.0;
    double fact = 1.0;
    for (int m = 1; m <= 40; ++m) {
      pow_x *= x * x;
      fact *= (2.0 * m - 1.0) * (2.0 * m);
      double term = ((m % 2) ? 1.0 : -1.0) * pow_x / fact *
                    std::pow(eps, 2.0 * m - a2_) / (2.0 * m - a2_);
      acc += term;
      if (std::abs(term) < 1e-18 * std::max(std::abs(acc), 1e-300)) break;
    }
    return acc;
  }

  double gauss16(double lo, double hi) const {
    static const double xs[8] = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
        0.9445750230732326, 0.9894009349916499};
    static const double ws[8] = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
        0.0622535239386479, 0.0271524594117541};
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
      for (double sgn : {-1.0, 1.0}) {
        double u = mid + sgn * half * xs[i];
        acc += ws[i] * (1.0 - std::cos(2.0 * M_PI * u)) /
               std::pow(u, 1.0 + a2_);
      }
    }
    return acc * half;
  }

  double a2_;
  std::vector<double> prefix_;
};

}  // namespace detail

// Length of the integer k as the generator eigenvalue of the k-th character
// of the unit circle:
//   ell(k) = int_T (1 - cos 2 pi k t) / d(0,t)^{1+2 alpha} dt
//          = 2 k^{2 alpha} Phi(k/2)
// by the substitution u = k t on the half-period where d(0,t) = t.
inline LengthFunction circle_dual_length(double alpha, int radius) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw ValidationError("circle_dual_length: alpha must lie in (0, 1/2)");
  GroupModel g = GroupModel::circle_dual(radius);
  detail::CosIntegralTable table(2.0 * alpha, radius);
  LengthFunction ell;
  ell.source = LengthSource::CircleQuadrature;
  ell.values.assign(static_cast<std::size_t>(g.size()), 0.0);
  for (int k = 1; k <= radius; ++k) {
    double v = 2.0 * std::pow(static_cast<double>(k), 2.0 * alpha) *
               table.phi_half(k);
    ell.values[static_cast<std::size_t>(g.idx_of_k(k))] = v;
    ell.values[static_cast<std::size_t>(g.idx_of_k(-k))] = v;
  }
  return ell;
}

// Length of a cantor character: the generator eigenvalue of the character,
// which is the closed-form level eigenvalue at one level above its deepest
// nontrivial digit (depth m lives in the level (m-1) wavelet space).
inline LengthFunction cantor_dual_length(int symbols, double scale,
                                         double alpha, int radius) {
  GroupModel g = GroupModel::cantor_dual(symbols, radius);
  LengthFunction ell;
  ell.source = LengthSource::CantorExact;
  ell.values.assign(static_cast<std::size_t>(g.size()), 0.0);
  for (int idx = 1; idx < g.size(); ++idx) {
    int m = g.depth(idx);
    ell.values[static_cast<std::size_t>(idx)] =
        cantor_level_eigenvalue(symbols, scale, alpha, m - 1);
  }
  return ell;
}

// Axioms: vanishing exactly at the identity, symmetry under inversion, and
// properness (here: strict growth of shell minima across depth shells).
inline std::vector<std::string> length_violations(const GroupModel& g,
                                                  const LengthFunction& ell) {
  std::vector<std::string> out;
  auto note = [&out](const std::string& m) {
    if (out.size() < 32) out.push_back(m);
  };
  if (ell.values.size() != static_cast<std::size_t>(g.size()))
    return {"length table size mismatch"};
  for (int idx = 0; idx < g.size(); ++idx) {
    double v = ell(idx);
    if (idx == g.identity()) {
      if (v != 0.0) note("length of the identity is nonzero");
    } else if (!(v > 0.0)) {
      note("length vanishes off the identity at " + g.label(idx));
    }
    if (ell(g.inverse(idx)) != v)
      note("length not symmetric under inversion at " + g.label(idx));
  }
  // properness proxy on the truncation: shell minima increase with depth
  std::map<int, double> shell_min;
  for (int idx = 0; idx < g.size(); ++idx) {
    int d = g.depth(idx);
    auto it = shell_min.find(d);
    if (it == shell_min.end() || ell(idx) < it->second)
      shell_min[d] = ell(idx);
  }
  double prev = -1.0;
  for (const auto& [d, v] : shell_min) {
    if (v <= prev) note("shell minima fail to increase at depth " +
                        std::to_string(d));
    prev = v;
  }
  return out;
}

// Translation increments ell_gamma(eta) = |ell(eta) - ell(gamma^{-1} eta)|,
// restricted to pairs staying inside the truncation.
inline std::optional<double> translation_increment(const GroupModel& g,
                                                   const LengthFunction& ell,
                                                   int gamma, int eta) {
  auto shifted = g.compose(g.inverse(gamma), eta);
  if (!shifted) return std::nullopt;
  return std::abs(ell(eta) - ell(*shifted));
}

struct TailReport {
  std::vector<double> shell_radii;
  std::vector<double> partial_sums;  // sum of ell_gamma^p over |eta| <= shell
  double fit_exponent = 0.0;         // decay of ell_gamma(eta) in |eta|
  bool fit_valid = false;
  bool summability_supported = false;
  int stabilized_after = -1;  // cantor: shell beyond which sums are constant
};

inline TailReport translation_tail_report(const GroupModel& g,
                                          const LengthFunction& ell, int gamma,
                                          double p) {
  if (gamma < 0 || gamma >= g.size())
    throw ValidationError("tail report: gamma outside the truncation");
  TailReport rep;
  const int R = g.radius();
  std::vector<double> shell_sum(static_cast<std::size_t>(R) + 1, 0.0);
  std::vector<std::pair<double, double>> fit_pts;
  for (int eta = 0; eta < g.size(); ++eta) {
    auto inc = translation_increment(g, ell, gamma, eta);
    if (!inc) continue;
    int d = g.depth(eta);
    shell_sum[static_cast<std::size_t>(d)] += std::pow(*inc, p);
    if (*inc > 0.0 && d > 2 * g.depth(gamma) && d >= 2)
      fit_pts.emplace_back(std::log(static_cast<double>(d)), std::log(*inc));
  }
  double acc = 0.0;
  for (int d = 0; d <= R; ++d) {
    acc += shell_sum[static_cast<std::size_t>(d)];
    rep.shell_radii.push_back(d);
    rep.partial_sums.push_back(acc);
  }
  // shell after which nothing moves (0 when the increments vanish outright)
  rep.stabilized_after = 0;
  for (int d = R; d >= 0; --d) {
    if (shell_sum[static_cast<std::size_t>(d)] > 0.0) {
      rep.stabilized_after = d;
      break;
    }
  }
  if (fit_pts.size() >= 4) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : fit_pts) {
      sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double m = static_cast<double>(fit_pts.size());
    rep.fit_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.fit_valid = true;
  }
  if (acc == 0.0)
    rep.summability_supported = true;  // increments vanish identically
  else if (g.kind() == DualKind::CircleDual)
    rep.summability_supported = rep.fit_valid && rep.fit_exponent * p < -1.0;
  else
    rep.summability_supported = rep.stabilized_after <= g.depth(gamma);
  return rep;
}

//----------------------------------------------------------------------------
// Crossed elements: finitely supported maps group -> coefficient vector over
// the base sample points (dimension 1 for the plain group algebra).

struct CrossedElement {
  std::map<int, Eigen::VectorXcd> coeff;
  int base_dim = 1;

  static CrossedElement unit(const GroupModel& g, int dim = 1) {
    CrossedElement f;
    f.base_dim = dim;
    f.coeff[g.identity()] = Eigen::VectorXcd::Ones(dim);
    return f;
  }
  static CrossedElement single(int gamma, Eigen::VectorXcd v) {
    CrossedElement f;
    f.base_dim = static_cast<int>(v.size());
    f.coeff[gamma] = std::move(v);
    return f;
  }
  static CrossedElement single_scalar(int gamma, std::complex<double> c) {
    return single(gamma, Eigen::VectorXcd::Constant(1, c));
  }

  CrossedElement scaled(std::complex<double> c) const {
    CrossedElement f = *this;
    for (auto& [k, v] : f.coeff) v *= c;
    return f;
  }
};

inline void check_support_margin(const GroupModel& g, const CrossedElement& f) {
  for (const auto& [gamma, v] : f.coeff)
    if (2 * g.depth(gamma) > g.radius())
      throw ValidationError(
          "crossed element support violates the half-radius margin at " +
          g.label(gamma));
}

// Translation actions of the dual group on a base FiniteSpace. Group element
// gamma moves the base point z to gamma . z; both instances are isometries
// permuting equal-mass points.
class TranslationAction {
 public:
  // circle dual acting on circle(n) by grid rotation
  static TranslationAction circle(const GroupModel& g, const FiniteSpace& base) {
    if (g.kind() != DualKind::CircleDual || base.kind() != SpaceKind::Circle)
      throw ValidationError("circle action: kind mismatch");
    TranslationAction a;
    a.group_ = &g;
    a.n_ = base.size();
    a.cantor_ = false;
    return a;
  }
  // cantor dual acting on a cantor space by digitwise addition
  static TranslationAction cantor(const GroupModel& g, const FiniteSpace& base) {
    if (g.kind() != DualKind::CantorDual || base.kind() != SpaceKind::Cantor ||
        !base.cantor_params())
      throw ValidationError("cantor action: kind mismatch");
    const auto p = *base.cantor_params();
    if (p.symbols != g.symbols())
      throw ValidationError("cantor action: symbol count mismatch");
    if (p.depth < g.radius())
      throw ValidationError("cantor action: base depth below group radius");
    TranslationAction a;
    a.group_ = &g;
    a.cantor_ = true;
    a.symbols_ = p.symbols;
    a.depth_ = p.depth;
    return a;
  }

  int translate(int gamma, int z) const {
    if (!cantor_) {
      int k = group_->k_of(gamma);
      int r = (z + k) % n_;
      return r < 0 ? r + n_ : r;
    }
    auto d = group_->digits(gamma);
    auto w = cantor_word(z, symbols_, depth_);
    for (int j = 0; j < group_->radius(); ++j)
      w[static_cast<std::size_t>(j)] =
          (w[static_cast<std::size_t>(j)] + d[static_cast<std::size_t>(j)]) %
          symbols_;
    return cantor_index(w, symbols_);
  }

  // c_gamma(v)(z) = v(gamma^{-1} . z)
  Eigen::VectorXcd act(int gamma, const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out(v.size());
    int ginv = group_->inverse(gamma);
    for (int z = 0; z < v.size(); ++z) out(z) = v(translate(ginv, z));
    return out;
  }

 private:
  const GroupModel* group_ = nullptr;
  int n_ = 0;
  bool cantor_ = false;
  int symbols_ = 0;
  int depth_ = 0;
};

// f*(gamma) = conj( c_gamma( f(gamma^{-1}) ) ); base_dim 1 needs no action.
inline CrossedElement crossed_star(const GroupModel& g, const CrossedElement& f,
                                   const TranslationAction* action = nullptr) {
  CrossedElement out;
  out.base_dim = f.base_dim;
  for (const auto& [gamma, v] : f.coeff) {
    int gi = g.inverse(gamma);
    Eigen::VectorXcd moved =
        (f.base_dim > 1 && action) ? action->act(gi, v) : v;
    out.coeff[gi] = moved.conjugate();
  }
  return out;
}

//----------------------------------------------------------------------------
// Seminorms.

namespace detail {

inline double schatten_of_matrix(const Eigen::MatrixXcd& a, double p) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  if (std::isinf(p)) return sv.size() ? sv(0) : 0.0;
  double acc = 0.0;
  for (int i = 0; i < sv.size(); ++i) acc += std::pow(sv(i), p);
  return std::pow(acc, 1.0 / p);
}

}  // namespace detail

struct GroupSeminormResult {
  double value = 0.0;
  double discarded_fraction = 0.0;  // translate pairs leaving the truncation
  std::optional<double> value_doubled_radius;
};

// || sum_gamma f(gamma) (ell-increment diagonal) (left translation) ||_{S_p}
// on the truncated basis; translates leaving the ball are dropped and
// reported.
inline GroupSeminormResult group_seminorm(const GroupModel& g,
                                          const LengthFunction& ell,
                                          const CrossedElement& f, double p) {
  if (f.base_dim != 1)
    throw ValidationError("group_seminorm: expects scalar coefficients");
  check_support_margin(g, f);
  const int n = g.size();
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  double kept = 0.0, dropped = 0.0;
  for (const auto& [delta, v] : f.coeff) {
    std::complex<double> c = v(0);
    for (int eta = 0; eta < n; ++eta) {
      auto target = g.compose(delta, eta);
      if (!target) {
        dropped += std::abs(c);
        continue;
      }
      kept += std::abs(c);
      a(*target, eta) += c * (ell(*target) - ell(eta));
    }
  }
  GroupSeminormResult out;
  out.value = detail::schatten_of_matrix(a, p);
  double tot = kept + dropped;
  out.discarded_fraction = tot > 0.0 ? dropped / tot : 0.0;
  return out;
}

struct HorizontalResult {
  double value = 0.0;
  int argmax_gamma = -1;
};

inline HorizontalResult horizontal_seminorm(
    const CrossedElement& f,
    const std::function<double(const Eigen::VectorXcd&)>& base_seminorm) {
  HorizontalResult out;
  for (const auto& [gamma, v] : f.coeff) {
    double l = base_seminorm(v);
    if (l > out.value) {
      out.value = l;
      out.argmax_gamma = gamma;
    }
  }
  return out;
}

// sup over sampled base points z of the Schatten norm of the twisted
// commutator matrix A^z with entries
//   A^z[gamma, eta] = f(gamma eta^{-1})(gamma . z) (ell(gamma) - ell(eta)).
inline double vertical_seminorm(const GroupModel& g,
                                const TranslationAction& action,
                                const CrossedElement& f,
                                const LengthFunction& ell, double p,
                                const std::vector<int>& z_samples) {
  check_support_margin(g, f);
  const int n = g.size();
  double best = 0.0;
  for (int z : z_samples) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [delta, v] : f.coeff) {
      for (int eta = 0; eta < n; ++eta) {
        auto target = g.compose(delta, eta);
        if (!target) continue;
        std::complex<double> val =
            f.base_dim == 1 ? v(0) : v(action.translate(*target, z));
        a(*target, eta) += val * (ell(*target) - ell(eta));
      }
    }
    best = std::max(best, detail::schatten_of_matrix(a, p));
  }
  return best;
}

struct CombinedSeminorm {
  double value = 0.0;
  double vertical = 0.0;
  double horizontal = 0.0;
  double horizontal_star = 0.0;
};

inline CombinedSeminorm combined_seminorm(
    const GroupModel& g, const TranslationAction& action,
    const CrossedElement& f, const LengthFunction& ell, double p,
    const std::function<double(const Eigen::VectorXcd&)>& base_seminorm,
    const std::vector<int>& z_samples) {
  CombinedSeminorm out;
  out.vertical = vertical_seminorm(g, action, f, ell, p, z_samples);
  out.horizontal = horizontal_seminorm(f, base_seminorm).value;
  out.horizontal_star =
      horizontal_seminorm(crossed_star(g, f, &action), base_seminorm).value;
  out.value = std::max({out.vertical, out.horizontal, out.horizontal_star});
  return out;
}

//----------------------------------------------------------------------------
// Berezin transform: damp the gamma coefficient by #(F cap gamma F) / #F.

inline double berezin_factor(const GroupModel& g, int gamma,
                             const std::vector<int>& F) {
  if (F.empty()) throw ValidationError("berezin: empty window set");
  // membership arithmetic on raw labels so that out-of-truncation composites
  // still count correctly (they simply fail to land in F)
  std::set<long long> fs;
  if (g.kind() == DualKind::CircleDual) {
    for (int s : F) fs.insert(g.k_of(s));
    long long k = g.k_of(gamma);
    int hits = 0;
    for (int s : F)
      if (fs.count(k + g.k_of(s))) ++hits;
    return static_cast<double>(hits) / static_cast<double>(F.size());
  }
  for (int s : F) fs.insert(s);
  int hits = 0;
  for (int s : F) {
    auto t = g.compose(gamma, s);
    if (t && fs.count(*t)) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(F.size());
}

inline CrossedElement berezin(const GroupModel& g, const CrossedElement& f,
                              const std::vector<int>& F) {
  CrossedElement out;
  out.base_dim = f.base_dim;
  for (const auto& [gamma, v] : f.coeff)
    out.coeff[gamma] = berezin_factor(g, gamma, F) * v;
  return out;
}

//----------------------------------------------------------------------------
// Fourier conjugation check: the character table diagonalizes the cantor
// generator with the dual length on the diagonal; on the circle it
// diagonalizes the circulant generator, whose diagonal is the discrete
// analogue of the quadrature length (reported side by side).

struct FourierCheck {
  double max_offdiag = 0.0;
  double max_diag_err = 0.0;      // against the expected diagonal
  Eigen::VectorXd diagonal;       // conjugated-generator diagonal
  Eigen::VectorXd expected;       // dual length per character
  double max_continuum_gap = 0.0; // circle only: |discrete - quadrature|
};

inline FourierCheck fourier_intertwine_check_cantor(int symbols, double scale,
                                                    int depth, double alpha) {
  auto space = build_cantor_space(symbols, scale, depth);
  auto gen = assemble_generator(space, alpha);
  GroupModel g = GroupModel::cantor_dual(symbols, depth);
  auto ell = cantor_dual_length(symbols, scale, alpha, depth);
  const int n = space.size();
  if (g.size() != n)
    throw ValidationError("fourier check: dimension mismatch");

  // character table: chi_a(x) = exp(2 pi i sum_j a_j x_j / N)
  Eigen::MatrixXcd chi(n, n);
  for (int a = 0; a < n; ++a) {
    auto da = g.digits(a);
    for (int x = 0; x < n; ++x) {
      auto wx = cantor_word(x, symbols, depth);
      double phase = 0.0;
      for (int j = 0; j < depth; ++j)
        phase += da[static_cast<std::size_t>(j)] *
                 wx[static_cast<std::size_t>(j)];
      chi(x, a) = std::polar(1.0, 2.0 * M_PI * phase / symbols);
    }
  }
  FourierCheck chk;
  chk.diagonal.resize(n);
  chk.expected.resize(n);
  Eigen::MatrixXcd img(n, n);
  for (int b = 0; b < n; ++b) img.col(b) = gen.apply(Eigen::VectorXcd(chi.col(b)));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::complex<double> entry =
          space.inner(chi.col(a).eval(), img.col(b).eval()) /
          space.total_mass();
      if (a == b) {
        chk.diagonal(a) = entry.real();
        chk.expected(a) = ell(a);
        chk.max_diag_err =
            std::max(chk.max_diag_err, std::abs(entry - std::complex<double>(ell(a))));
      } else {
        chk.max_offdiag = std::max(chk.max_offdiag, std::abs(entry));
      }
    }
  }
  return chk;
}

inline FourierCheck fourier_intertwine_check_circle(int n_points, double alpha,
                                                    int quad_radius = 0) {
  auto space = build_circle_space(n_points);
  auto gen = assemble_generator(space, alpha);
  const int n = n_points;
  Eigen::MatrixXcd chi(n, n);
  for (int k = 0; k < n; ++k)
    for (int x = 0; x < n; ++x)
      chi(x, k) = std::polar(1.0, 2.0 * M_PI * k * x / static_cast<double>(n));
  FourierCheck chk;
  chk.diagonal.resize(n);
  chk.expected.resize(n);
  Eigen::MatrixXcd img(n, n);
  for (int b = 0; b < n; ++b) img.col(b) = gen.apply(Eigen::VectorXcd(chi.col(b)));
  // independent discrete diagonal: (1/n) sum_{j != 0} (1 - cos(2 pi k j / n)) / d(0,j)^{1+2a}
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 1; j < n; ++j)
      acc += (1.0 - std::cos(2.0 * M_PI * k * j / n)) /
             std::pow(space.dist(0, j), 1.0 + 2.0 * alpha) / n;
    chk.expected(k) = acc;
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      std::complex<double> entry =
          space.inner(chi.col(a).eval(), img.col(b).eval()) /
          space.total_mass();
      if (a == b) {
        chk.diagonal(a) = entry.real();
        chk.max_diag_err =
            std::max(chk.max_diag_err, std::abs(entry - std::complex<double>(chk.expected(a))));
      } else {
        chk.max_offdiag = std::max(chk.max_offdiag, std::abs(entry));
      }
    }
  if (quad_radius > 0) {
    auto ell = circle_dual_length(alpha, quad_radius);
    GroupModel g = GroupModel::circle_dual(quad_radius);
    for (int k = 1; k <= std::min(quad_radius, n / 2); ++k) {
      double gap = std::abs(chk.diagonal(k) - ell(g.idx_of_k(k)));
      chk.max_continuum_gap = std::max(chk.max_continuum_gap, gap);
    }
  }
  return chk;
}

// Evaluation at a group element contracts the horizontal seminorm.
struct EvaluationCheck {
  double base_value = 0.0;
  double horizontal_value = 0.0;
  bool pass = false;
};

inline EvaluationCheck evaluation_contraction_check(
    const CrossedElement& f, int gamma,
    const std::function<double(const Eigen::VectorXcd&)>& base_seminorm) {
  EvaluationCheck chk;
  auto it = f.coeff.find(gamma);
  chk.base_value = it == f.coeff.end()
                       ? 0.0
                       : base_seminorm(it->second);
  chk.horizontal_value = horizontal_seminorm(f, base_seminorm).value;
  chk.pass = chk.base_value <= chk.horizontal_value;
  return chk;
}

}  // namespace fraclap
