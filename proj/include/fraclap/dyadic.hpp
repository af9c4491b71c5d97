#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fraclap/space.hpp"

namespace fraclap {

// Nested partitions of a FiniteSpace into "cubes" with geometric control:
//   (i)   level 0 is the whole space and every level partitions it,
//   (ii)  cubes of different levels nest or are disjoint,
//   (iii) each cube has a unique ancestor per coarser level,
//   (iv)  each non-leaf cube splits into 2..M children,
//   (v)   closed balls around centers sandwich each cube at scale theta^n,
//   (vi)  level sizes grow at most like A * theta^{-d_f n}.
// Cantor spaces use their cylinders (theta = 1/lambda); circle spaces use a
// nested binary arc partition (theta = 1/2, point count a power of two).

struct Cube {
  int id = -1;
  int level = 0;
  int parent = -1;           // -1 for the root
  std::vector<int> children; // cube ids, empty at leaf level
  std::vector<int> members;  // point indices
  int center = -1;           // point index
  double mass = 0.0;
};

class DyadicSystem {
 public:
  DyadicSystem(std::vector<Cube> cubes, std::vector<std::vector<int>> levels,
               double theta, double c1, double C1, int max_children,
               double count_constant)
      : cubes_(std::move(cubes)),
        levels_(std::move(levels)),
        theta_(theta),
        c1_(c1),
        C1_(C1),
        max_children_(max_children),
        count_constant_(count_constant) {}

  const std::vector<Cube>& cubes() const { return cubes_; }
  const Cube& cube(int id) const { return cubes_[static_cast<std::size_t>(id)]; }
  int num_cubes() const { return static_cast<int>(cubes_.size()); }
  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  const std::vector<int>& level(int n) const {
    return levels_[static_cast<std::size_t>(n)];
  }
  double theta() const { return theta_; }
  double c1() const { return c1_; }
  double C1() const { return C1_; }
  int max_children() const { return max_children_; }
  double count_constant() const { return count_constant_; }

  // id of the level-n cube containing the given point
  int cube_at(int level_n, int point) const {
    for (int id : levels_[static_cast<std::size_t>(level_n)])
      for (int m : cubes_[static_cast<std::size_t>(id)].members)
        if (m == point) return id;
    throw ValidationError("point not covered at level " + std::to_string(level_n));
  }

 private:
  std::vector<Cube> cubes_;
  std::vector<std::vector<int>> levels_;
  double theta_;
  double c1_, C1_;
  int max_children_;
  double count_constant_;
};

inline DyadicSystem build_dyadic(const FiniteSpace& space) {
  std::vector<Cube> cubes;
  std::vector<std::vector<int>> levels;

  auto push_cube = [&cubes](int level, int parent, std::vector<int> members,
                            int center, double mass) {
    Cube c;
    c.id = static_cast<int>(cubes.size());
    c.level = level;
    c.parent = parent;
    c.members = std::move(members);
    c.center = center;
    c.mass = mass;
    cubes.push_back(std::move(c));
    return cubes.back().id;
  };

  if (space.kind() == SpaceKind::Cantor && space.cantor_params()) {
    const auto p = *space.cantor_params();
    const int N = p.symbols, L = p.depth;
    double theta = 1.0 / p.scale;
    // level n: cylinders = blocks of N^{L-n} consecutive indices
    std::vector<int> prev;
    for (int n = 0; n <= L; ++n) {
      int count = 1;
      for (int t = 0; t < n; ++t) count *= N;
      int block = space.size() / count;
      std::vector<int> ids;
      for (int k = 0; k < count; ++k) {
        std::vector<int> members(static_cast<std::size_t>(block));
        double mass = 0.0;
        for (int j = 0; j < block; ++j) {
          members[static_cast<std::size_t>(j)] = k * block + j;
          mass += space.weight(k * block + j);
        }
        int parent = n == 0 ? -1 : prev[static_cast<std::size_t>(k / N)];
        int id = push_cube(n, parent, std::move(members), k * block, mass);
        if (parent >= 0) cubes[static_cast<std::size_t>(parent)].children.push_back(id);
        ids.push_back(id);
      }
      levels.push_back(ids);
      prev = levels.back();
    }
    return DyadicSystem(std::move(cubes), std::move(levels), theta, 1.0, 1.0,
                        N, 1.0);
  }

  if (space.kind() == SpaceKind::Circle && space.circle_params()) {
    const int n = space.circle_params()->points;
    int m = 0;
    while ((1 << m) < n) ++m;
    if ((1 << m) != n)
      throw ValidationError(
          "build_dyadic: circle requires a power-of-two point count");
    double theta = 0.5;
    std::vector<int> prev;
    for (int lev = 0; lev <= m; ++lev) {
      int count = 1 << lev;
      int block = n / count;
      std::vector<int> ids;
      for (int k = 0; k < count; ++k) {
        std::vector<int> members(static_cast<std::size_t>(block));
        double mass = 0.0;
        for (int j = 0; j < block; ++j) {
          members[static_cast<std::size_t>(j)] = k * block + j;
          mass += space.weight(k * block + j);
        }
        int center = k * block + (block - 1) / 2;
        int parent = lev == 0 ? -1 : prev[static_cast<std::size_t>(k / 2)];
        int id = push_cube(lev, parent, std::move(members), center, mass);
        if (parent >= 0) cubes[static_cast<std::size_t>(parent)].children.push_back(id);
        ids.push_back(id);
      }
      levels.push_back(ids);
      prev = levels.back();
    }
    return DyadicSystem(std::move(cubes), std::move(levels), theta, 0.25, 0.5,
                        2, 1.0);
  }

  throw ValidationError("build_dyadic: unsupported space kind " +
                        std::string(to_string(space.kind())));
}

// Checks axioms (i)-(vi) exhaustively; closed balls in both directions of (v).
inline std::vector<std::string> dyadic_violations(const FiniteSpace& space,
                                                  const DyadicSystem& sys) {
  std::vector<std::string> out;
  auto note = [&out](const std::string& m) {
    if (out.size() < 64) out.push_back(m);
  };
  const int n = space.size();
  const int top = sys.max_level();

  // (i) every level partitions the point set; level 0 is the whole space
  if (static_cast<int>(sys.level(0).size()) != 1 ||
      static_cast<int>(sys.cube(sys.level(0)[0]).members.size()) != n)
    note("level 0 is not the whole space");
  for (int lev = 0; lev <= top; ++lev) {
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    for (int id : sys.level(lev))
      for (int m : sys.cube(id).members) ++seen[static_cast<std::size_t>(m)];
    for (int i = 0; i < n; ++i)
      if (seen[static_cast<std::size_t>(i)] != 1) {
        note("level " + std::to_string(lev) + " does not partition the points");
        break;
      }
  }

  // (ii)/(iii)/(iv): nesting via child decomposition
  for (const auto& c : sys.cubes()) {
    if (c.level == top) {
      if (!c.children.empty()) note("leaf cube has children");
      continue;
    }
    if (static_cast<int>(c.children.size()) < 2 ||
        static_cast<int>(c.children.size()) > sys.max_children())
      note("cube child count outside [2, M]");
    std::vector<int> merged;
    for (int ch : c.children) {
      if (sys.cube(ch).parent != c.id) note("parent link broken");
      if (sys.cube(ch).level != c.level + 1) note("child level mismatch");
      merged.insert(merged.end(), sys.cube(ch).members.begin(),
                    sys.cube(ch).members.end());
    }
    std::vector<int> mine = c.members;
    std::sort(merged.begin(), merged.end());
    std::sort(mine.begin(), mine.end());
    if (merged != mine) note("children do not exactly decompose their parent");
    double cm = 0.0;
    for (int ch : c.children) cm += sys.cube(ch).mass;
    if (std::abs(cm - c.mass) > 1e-12 * std::max(c.mass, 1e-300))
      note("child masses do not sum to parent mass");
  }

  // (v) ball containment at scale theta^level
  for (const auto& c : sys.cubes()) {
    double outer = sys.C1() * std::pow(sys.theta(), c.level);
    double inner = sys.c1() * std::pow(sys.theta(), c.level);
    for (int m : c.members)
      if (space.dist(c.center, m) > outer + 1e-12)
        note("member outside outer ball at level " + std::to_string(c.level));
    std::vector<char> in_cube(static_cast<std::size_t>(n), 0);
    for (int m : c.members) in_cube[static_cast<std::size_t>(m)] = 1;
    for (int y = 0; y < n; ++y)
      if (space.dist(c.center, y) <= inner && !in_cube[static_cast<std::size_t>(y)])
        note("inner ball escapes its cube at level " + std::to_string(c.level));
  }

  // (vi) #D_n <= A * theta^{-d_f n}
  for (int lev = 0; lev <= top; ++lev) {
    double bound = sys.count_constant() *
                   std::pow(sys.theta(), -space.d_f() * lev);
    if (static_cast<double>(sys.level(lev).size()) > bound * (1.0 + 1e-12))
      note("level size exceeds the count bound");
  }
  return out;
}

inline void validate_dyadic(const FiniteSpace& space, const DyadicSystem& sys) {
  auto v = dyadic_violations(space, sys);
  if (!v.empty()) {
    std::string msg = "dyadic validation failed:";
    for (const auto& m : v) msg += "\n  - " + m;
    throw ValidationError(msg, v);
  }
}

// ---------------------------------------------------------------------------
// Expectation operators: E_n f is the mass-weighted average of f on each
// level-n cube.

template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> expectation(
    const FiniteSpace& space, const DyadicSystem& sys, int level_n,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& f) {
  if (level_n < 0 || level_n > sys.max_level())
    throw ValidationError("expectation: level out of range");
  Eigen::Vector<Scalar, Eigen::Dynamic> out(space.size());
  for (int id : sys.level(level_n)) {
    const Cube& c = sys.cube(id);
    Scalar acc = Scalar(0);
    for (int m : c.members) acc += Scalar(space.weight(m)) * f(m);
    acc /= Scalar(c.mass);
    for (int m : c.members) out(m) = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Haar wavelets: per non-leaf cube D, #children-1 functions supported on D,
// constant on children, mean zero, unit weighted norm, mutually orthogonal;
// together with mass^{-1/2} chi_D they span the child-constant functions.
// Cantor systems use the complex exponential family
//   h_{w,u} = (mass-normalized) sum_k e^{2 pi i u (k-1)/N} chi_{child k};
// binary circle systems use the real two-sided difference.

struct HaarWavelet {
  int cube = -1;
  int u = 1;
  Eigen::VectorXcd values;  // full vector over points, supported on the cube
};

class HaarBasis {
 public:
  explicit HaarBasis(std::vector<HaarWavelet> w) : wavelets_(std::move(w)) {}
  const std::vector<HaarWavelet>& wavelets() const { return wavelets_; }
  int size() const { return static_cast<int>(wavelets_.size()); }

 private:
  std::vector<HaarWavelet> wavelets_;
};

inline HaarBasis haar_basis(const FiniteSpace& space, const DyadicSystem& sys) {
  std::vector<HaarWavelet> out;
  const bool cantor = space.kind() == SpaceKind::Cantor;
  const double mass0 = space.total_mass();
  for (const auto& c : sys.cubes()) {
    if (c.children.empty()) continue;
    const int nc = static_cast<int>(c.children.size());
    if (cantor) {
      // children are cylinders of equal mass c.mass / N
      const int N = nc;
      double amp = std::sqrt(static_cast<double>(
          std::pow(static_cast<double>(N), c.level) / mass0));
      for (int u = 1; u <= N - 1; ++u) {
        HaarWavelet hw;
        hw.cube = c.id;
        hw.u = u;
        hw.values = Eigen::VectorXcd::Zero(space.size());
        for (int k = 0; k < N; ++k) {
          std::complex<double> phase =
              std::polar(amp, 2.0 * M_PI * u * k / static_cast<double>(N));
          for (int m : sys.cube(c.children[static_cast<std::size_t>(k)]).members)
            hw.values(m) = phase;
        }
        out.push_back(std::move(hw));
      }
    } else {
      // binary split: a on the first child, -b on the second
      const Cube& c0 = sys.cube(c.children[0]);
      const Cube& c1 = sys.cube(c.children[1]);
      double a = std::sqrt(c1.mass / (c0.mass * (c0.mass + c1.mass)));
      double b = std::sqrt(c0.mass / (c1.mass * (c0.mass + c1.mass)));
      HaarWavelet hw;
      hw.cube = c.id;
      hw.u = 1;
      hw.values = Eigen::VectorXcd::Zero(space.size());
      for (int m : c0.members) hw.values(m) = a;
      for (int m : c1.members) hw.values(m) = -b;
      out.push_back(std::move(hw));
    }
  }
  return HaarBasis(std::move(out));
}

// Wavelet property checks (support, child-constancy, mean zero, unit norm,
// within-cube orthogonality, child-constant span, L^p comparability report).
struct HaarCheck {
  std::vector<std::string> violations;
  double lp_ratio_min = 0.0;  // ||h||_p / mass^{1/p-1/2} over all wavelets, p in {1,4,inf}
  double lp_ratio_max = 0.0;
};

inline HaarCheck check_haar(const FiniteSpace& space, const DyadicSystem& sys,
                            const HaarBasis& basis) {
  HaarCheck chk;
  auto note = [&chk](const std::string& m) {
    if (chk.violations.size() < 64) chk.violations.push_back(m);
  };
  chk.lp_ratio_min = std::numeric_limits<double>::infinity();
  chk.lp_ratio_max = 0.0;

  std::map<int, std::vector<const HaarWavelet*>> by_cube;
  for (const auto& hw : basis.wavelets())
    by_cube[hw.cube].push_back(&hw);

  for (const auto& c : sys.cubes()) {
    if (c.children.empty()) continue;
    auto it = by_cube.find(c.id);
    const int expect = static_cast<int>(c.children.size()) - 1;
    if (it == by_cube.end() ||
        static_cast<int>(it->second.size()) != expect) {
      note("cube is missing wavelets");
      continue;
    }
    std::vector<char> inside(static_cast<std::size_t>(space.size()), 0);
    for (int m : c.members) inside[static_cast<std::size_t>(m)] = 1;
    for (const auto* hw : it->second) {
      // (2) support
      for (int x = 0; x < space.size(); ++x)
        if (!inside[static_cast<std::size_t>(x)] && hw->values(x) != 0.0)
          note("wavelet supported outside its cube");
      // (3) constant on children
      for (int ch : c.children) {
        const auto& mem = sys.cube(ch).members;
        for (std::size_t j = 1; j < mem.size(); ++j)
          if (std::abs(hw->values(mem[j]) - hw->values(mem[0])) > 1e-12)
            note("wavelet not constant on a child");
      }
      // (4) mean zero, (7) unit weighted norm
      std::complex<double> mean = space.inner(
          Eigen::VectorXcd::Ones(space.size()).eval(), hw->values);
      if (std::abs(mean) > 1e-12) note("wavelet mean is not zero");
      if (std::abs(space.norm(hw->values) - 1.0) > 1e-12)
        note("wavelet norm is not 1");
      // (7) general p: ||h||_p ~ mass^{1/p - 1/2}; collect empirical ratios
      for (double p : {1.0, 4.0}) {
        double lp = 0.0;
        for (int m : c.members)
          lp += space.weight(m) * std::pow(std::abs(hw->values(m)), p);
        lp = std::pow(lp, 1.0 / p);
        double ratio = lp / std::pow(c.mass, 1.0 / p - 0.5);
        chk.lp_ratio_min = std::min(chk.lp_ratio_min, ratio);
        chk.lp_ratio_max = std::max(chk.lp_ratio_max, ratio);
      }
      double linf = 0.0;
      for (int m : c.members) linf = std::max(linf, std::abs(hw->values(m)));
      double ratio = linf / std::pow(c.mass, -0.5);
      chk.lp_ratio_min = std::min(chk.lp_ratio_min, ratio);
      chk.lp_ratio_max = std::max(chk.lp_ratio_max, ratio);
    }
    // (5) orthogonality within the cube
    for (std::size_t i = 0; i < it->second.size(); ++i)
      for (std::size_t j = i + 1; j < it->second.size(); ++j)
        if (std::abs(space.inner(it->second[i]->values,
                                 it->second[j]->values)) > 1e-12)
          note("wavelets of one cube are not orthogonal");
    // (6) span: child-constant functions on the cube have dimension
    // #children; the constant plus the wavelets must reproduce each child
    // indicator.
    for (int ch : c.children) {
      Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(space.size());
      for (int m : sys.cube(ch).members) chi(m) = 1.0;
      Eigen::VectorXcd recon = Eigen::VectorXcd::Zero(space.size());
      Eigen::VectorXcd unit = Eigen::VectorXcd::Zero(space.size());
      for (int m : c.members) unit(m) = 1.0 / std::sqrt(c.mass);
      recon += space.inner(unit, chi) * unit;
      for (const auto* hw : it->second)
        recon += space.inner(hw->values, chi) * hw->values;
      for (int m : c.members)
        if (std::abs(recon(m) - chi(m)) > 1e-10)
          note("constant + wavelets fail to span child indicators");
    }
  }
  return chk;
}

// ---------------------------------------------------------------------------
// Maximal functions.

// Hardy-Littlewood: M f(x) = max over occurring radii of the weighted average
// of |f| on the closed ball around x.
inline Eigen::VectorXd hl_maximal(const FiniteSpace& space,
                                  const Eigen::VectorXcd& f) {
  const int n = space.size();
  Eigen::VectorXd out(n);
  std::vector<std::pair<double, int>> order(static_cast<std::size_t>(n));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y)
      order[static_cast<std::size_t>(y)] = {space.dist(x, y), y};
    std::sort(order.begin(), order.end());
    double best = 0.0, mass = 0.0, acc = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
      double r = order[i].first;
      while (i < order.size() && order[i].first == r) {
        mass += space.weight(order[i].second);
        acc += space.weight(order[i].second) * std::abs(f(order[i].second));
        ++i;
      }
      best = std::max(best, acc / mass);
    }
    out(x) = best;
  }
  return out;
}

inline Eigen::VectorXd hl_maximal(const FiniteSpace& space,
                                  const Eigen::VectorXd& f) {
  return hl_maximal(space, Eigen::VectorXcd(f.cast<std::complex<double>>()));
}

// Cube-family maximal function M_e f(x) = max over cubes D containing x of
// |<f, e_D>| / mass(D)^{1/2}.
inline Eigen::VectorXd nwo_maximal(
    const FiniteSpace& space, const DyadicSystem& sys,
    const std::vector<Eigen::VectorXcd>& family, const Eigen::VectorXcd& f) {
  if (static_cast<int>(family.size()) != sys.num_cubes())
    throw ValidationError("nwo_maximal: family must assign a vector to every cube");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(space.size());
  for (const auto& c : sys.cubes()) {
    double v = std::abs(space.inner(family[static_cast<std::size_t>(c.id)], f)) /
               std::sqrt(c.mass);
    for (int m : c.members) out(m) = std::max(out(m), v);
  }
  return out;
}

// The prototype family e_D = mass(D)^{-1/2} chi_D.
inline std::vector<Eigen::VectorXcd> nwo_prototype(const FiniteSpace& space,
                                                   const DyadicSystem& sys) {
  std::vector<Eigen::VectorXcd> fam(static_cast<std::size_t>(sys.num_cubes()));
  for (const auto& c : sys.cubes()) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(space.size());
    for (int m : c.members) e(m) = 1.0 / std::sqrt(c.mass);
    fam[static_cast<std::size_t>(c.id)] = std::move(e);
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Martingale-difference sum: sum_n theta^{-gamma p n} ||E_{n+1}h - E_n h||_p^p
// with gamma = 2 alpha + d_f / p, truncated at the leaf level (the tail
// vanishes there because E_n h = h from the leaf level on).

struct MartingaleReport {
  double total = 0.0;
  std::vector<double> per_level;
  double gamma = 0.0;
  double p = 0.0;
};

inline MartingaleReport martingale_lhs(const FiniteSpace& space,
                                       const DyadicSystem& sys,
                                       const Eigen::VectorXcd& h, double alpha,
                                       double p) {
  if (!(p > 1.0)) throw ValidationError("martingale_lhs: p must exceed 1");
  MartingaleReport rep;
  rep.p = p;
  rep.gamma = 2.0 * alpha + space.d_f() / p;
  Eigen::VectorXcd prev = expectation(space, sys, 0, h);
  for (int n = 0; n < sys.max_level(); ++n) {
    Eigen::VectorXcd next = expectation(space, sys, n + 1, h);
    double lp = 0.0;
    for (int x = 0; x < space.size(); ++x)
      lp += space.weight(x) * std::pow(std::abs(next(x) - prev(x)), p);
    double term = std::pow(sys.theta(), -rep.gamma * p * n) * lp;
    rep.per_level.push_back(term);
    rep.total += term;
    prev = std::move(next);
  }
  return rep;
}

}  // namespace fraclap
