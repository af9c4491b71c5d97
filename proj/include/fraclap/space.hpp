#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclap/rng.hpp"

namespace fraclap {

// Finite approximations of compact metric-measure spaces (X, d, mu) whose
// measure is comparable to r^{d_f} on balls of radius r. Points carry
// positive mass atoms (cell masses of the underlying space) and a dense
// symmetric distance table. All inner products and integrals downstream are
// weighted sums against these atoms.

inline constexpr double kInfiniteWalkDim =
    std::numeric_limits<double>::infinity();

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what,
                           std::vector<std::string> violations = {})
      : std::runtime_error(what), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SpaceKind { Cantor, Circle, Custom };

inline const char* to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::Cantor: return "cantor";
    case SpaceKind::Circle: return "circle";
    default: return "custom";
  }
}

struct CantorParams {
  int symbols = 2;    // N
  double scale = 2.0; // lambda
  int depth = 1;      // L
};

struct CircleParams {
  int points = 3;
};

class FiniteSpace {
 public:
  FiniteSpace(std::vector<std::string> ids, Eigen::MatrixXd dist,
              Eigen::VectorXd weights, double d_f, double d_w, SpaceKind kind)
      : ids_(std::move(ids)),
        dist_(std::move(dist)),
        weights_(std::move(weights)),
        d_f_(d_f),
        d_w_(d_w),
        kind_(kind) {
    total_mass_ = weights_.sum();
    diam_ = dist_.size() > 0 ? dist_.maxCoeff() : 0.0;
    for (int i = 0; i < static_cast<int>(ids_.size()); ++i)
      index_[ids_[static_cast<std::size_t>(i)]] = i;
  }

  int size() const { return static_cast<int>(ids_.size()); }
  const std::vector<std::string>& point_ids() const { return ids_; }
  const Eigen::MatrixXd& dist() const { return dist_; }
  double dist(int i, int j) const { return dist_(i, j); }
  const Eigen::VectorXd& weights() const { return weights_; }
  double weight(int i) const { return weights_(i); }
  double total_mass() const { return total_mass_; }
  double d_f() const { return d_f_; }
  double d_w() const { return d_w_; }
  double diam() const { return diam_; }
  SpaceKind kind() const { return kind_; }

  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
      throw ValidationError("unknown point id: " + id);
    return it->second;
  }

  const std::optional<CantorParams>& cantor_params() const { return cantor_; }
  const std::optional<CircleParams>& circle_params() const { return circle_; }
  void set_cantor_params(CantorParams p) { cantor_ = p; }
  void set_circle_params(CircleParams p) { circle_ = p; }

  // Weighted inner product <f,g> = sum_x w_x conj(f_x) g_x.
  template <typename DerivedA, typename DerivedB>
  auto inner(const Eigen::MatrixBase<DerivedA>& f,
             const Eigen::MatrixBase<DerivedB>& g) const {
    return (f.conjugate().cwiseProduct(g).cwiseProduct(
                weights_.template cast<typename DerivedB::Scalar>()))
        .sum();
  }

  template <typename Derived>
  double norm(const Eigen::MatrixBase<Derived>& f) const {
    return std::sqrt(
        (f.cwiseAbs2().cwiseProduct(weights_)).sum());
  }

  // Mass of the closed ball around point x of radius r.
  double ball_mass(int x, double r) const {
    double m = 0.0;
    for (int y = 0; y < size(); ++y)
      if (dist_(x, y) <= r) m += weights_(y);
    return m;
  }

 private:
  std::vector<std::string> ids_;
  Eigen::MatrixXd dist_;
  Eigen::VectorXd weights_;
  double total_mass_ = 0.0;
  double d_f_ = 1.0;
  double d_w_ = 2.0;
  double diam_ = 0.0;
  SpaceKind kind_ = SpaceKind::Custom;
  std::optional<CantorParams> cantor_;
  std::optional<CircleParams> circle_;
  std::map<std::string, int> index_;
};

namespace detail {

inline std::string word_id(const std::vector<int>& digits, int symbols) {
  // 1-based symbols; plain concatenation for N <= 9, '-'-separated beyond.
  std::string s;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (symbols > 9 && i > 0) s += '-';
    s += std::to_string(digits[i] + 1);
  }
  return s;
}

}  // namespace detail

// Word digits (0-based) of cantor point index; first coordinate most
// significant.
inline std::vector<int> cantor_word(int index, int symbols, int depth) {
  std::vector<int> w(static_cast<std::size_t>(depth));
  for (int k = depth - 1; k >= 0; --k) {
    w[static_cast<std::size_t>(k)] = index % symbols;
    index /= symbols;
  }
  return w;
}

inline int cantor_index(const std::vector<int>& word, int symbols) {
  int idx = 0;
  for (int d : word) idx = idx * symbols + d;
  return idx;
}

// Product space {1..N}^L with the ultrametric lambda^{-(k-1)} (k the first
// differing coordinate) and uniform cell masses total_mass * N^{-L}.
inline FiniteSpace build_cantor_space(int symbols, double scale, int depth,
                                      double total_mass = 1.0) {
  if (symbols < 2) throw ValidationError("cantor: N must be >= 2");
  if (!(scale > 1.0)) throw ValidationError("cantor: lambda must be > 1");
  if (depth < 1) throw ValidationError("cantor: depth must be >= 1");
  if (!(total_mass > 0.0)) throw ValidationError("cantor: total_mass must be > 0");
  double npts = std::pow(static_cast<double>(symbols), depth);
  if (npts > 1e5) throw ValidationError("cantor: N^L exceeds the 1e5 guard");
  int n = static_cast<int>(std::llround(npts));

  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> words(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    words[static_cast<std::size_t>(i)] = cantor_word(i, symbols, depth);
    ids.push_back(detail::word_id(words[static_cast<std::size_t>(i)], symbols));
  }

  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      int k = 0;
      while (words[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] ==
             words[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)])
        ++k;
      double d = std::pow(scale, -k);  // first diff at coordinate k+1 (1-based)
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, total_mass / n);
  double d_f = std::log(static_cast<double>(symbols)) / std::log(scale);
  FiniteSpace space(std::move(ids), std::move(dist), std::move(w), d_f,
                    kInfiniteWalkDim, SpaceKind::Cantor);
  space.set_cantor_params({symbols, scale, depth});
  return space;
}

// n equispaced points on the unit circle with the arc-length metric and
// uniform masses 1/n.
inline FiniteSpace build_circle_space(int n) {
  if (n < 3) throw ValidationError("circle: n must be >= 3");
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  Eigen::MatrixXd dist(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int a = std::abs(i - j);
      dist(i, j) = static_cast<double>(std::min(a, n - a)) / n;
    }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
  FiniteSpace space(std::move(ids), std::move(dist), std::move(w), 1.0, 2.0,
                    SpaceKind::Circle);
  space.set_circle_params({n});
  return space;
}

// dist -> dist^eps, d_f -> d_f/eps, masses unchanged. A snowflaked cantor
// space is again a cantor space with scale lambda^eps; anything else loses
// its structural tag.
inline FiniteSpace snowflake(const FiniteSpace& space, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw ValidationError("snowflake: eps must lie in (0,1)");
  Eigen::MatrixXd dist = space.dist().array().pow(eps).matrix();
  dist.diagonal().setZero();
  double d_w = std::isinf(space.d_w()) ? kInfiniteWalkDim : space.d_w() / eps;
  SpaceKind kind =
      space.kind() == SpaceKind::Cantor ? SpaceKind::Cantor : SpaceKind::Custom;
  FiniteSpace out(space.point_ids(), std::move(dist),
                  space.weights(), space.d_f() / eps, d_w, kind);
  if (kind == SpaceKind::Cantor && space.cantor_params()) {
    CantorParams p = *space.cantor_params();
    p.scale = std::pow(p.scale, eps);
    out.set_cantor_params(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validation

inline std::vector<std::string> space_violations(const FiniteSpace& s,
                                                 std::uint64_t seed = 1) {
  std::vector<std::string> out;
  const int n = s.size();
  const auto& D = s.dist();
  const auto& w = s.weights();
  auto note = [&out](const std::string& m) {
    if (out.size() < 64) out.push_back(m);
  };

  for (int i = 0; i < n; ++i) {
    if (D(i, i) != 0.0) note("dist(" + s.point_ids()[static_cast<std::size_t>(i)] + ",same) != 0");
    if (!(w(i) > 0.0)) note("weight of " + s.point_ids()[static_cast<std::size_t>(i)] + " not positive");
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (D(i, j) != D(j, i))
        note("dist not symmetric at (" + s.point_ids()[static_cast<std::size_t>(i)] + "," +
             s.point_ids()[static_cast<std::size_t>(j)] + ")");
      if (!(D(i, j) > 0.0))
        note("dist not positive at (" + s.point_ids()[static_cast<std::size_t>(i)] + "," +
             s.point_ids()[static_cast<std::size_t>(j)] + ")");
    }

  double mass_err = std::abs(w.sum() - s.total_mass()) /
                    std::max(s.total_mass(), 1e-300);
  if (mass_err > 1e-12) note("weights do not sum to total_mass");

  const bool ultra = s.kind() == SpaceKind::Cantor;
  auto check_triple = [&](int i, int j, int k) {
    double slack = 1e-12 * std::max(1.0, s.diam());
    if (D(i, k) > D(i, j) + D(j, k) + slack)
      note("triangle inequality fails on a triple");
    if (ultra && D(i, k) > std::max(D(i, j), D(j, k)) + slack)
      note("ultrametric inequality fails on a triple");
  };
  if (n <= 200) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (i != j && j != k && i != k) check_triple(i, j, k);
  } else {
    Rng rng(seed);
    for (int t = 0; t < 100000; ++t) {
      int i = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      int k = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n)));
      if (i != j && j != k && i != k) check_triple(i, j, k);
    }
  }

  if (s.kind() == SpaceKind::Cantor && s.cantor_params()) {
    const auto& p = *s.cantor_params();
    double expect = std::pow(static_cast<double>(p.symbols), p.depth);
    if (static_cast<double>(n) != expect)
      note("cantor point count != N^L");
    double cell = s.total_mass() / expect;
    for (int i = 0; i < n; ++i)
      if (std::abs(w(i) - cell) > 1e-12 * cell)
        note("cantor cell masses not uniform");
  }
  return out;
}

inline void validate_space(const FiniteSpace& s, std::uint64_t seed = 1) {
  auto v = space_violations(s, seed);
  if (!v.empty()) {
    std::string msg = "space validation failed:";
    for (const auto& m : v) msg += "\n  - " + m;
    throw ValidationError(msg, v);
  }
}

// ---------------------------------------------------------------------------
// States: probability vectors over the points, i.e. finite Borel probability
// measures on the approximation.

struct State {
  Eigen::VectorXd probs;

  void validate() const {
    for (int i = 0; i < probs.size(); ++i)
      if (probs(i) < 0.0) throw ValidationError("state has a negative entry");
    if (std::abs(probs.sum() - 1.0) > 1e-12)
      throw ValidationError("state does not sum to 1");
  }

  // tau(f) = sum_x probs_x f(x)
  template <typename Derived>
  typename Derived::Scalar operator()(const Eigen::MatrixBase<Derived>& f) const {
    return (probs.template cast<typename Derived::Scalar>().cwiseProduct(f))
        .sum();
  }
};

inline State dirac_state(const FiniteSpace& space, int point) {
  State st;
  st.probs = Eigen::VectorXd::Zero(space.size());
  st.probs(point) = 1.0;
  return st;
}

inline State dirac_state(const FiniteSpace& space, const std::string& id) {
  return dirac_state(space, space.index_of(id));
}

inline State uniform_state(const FiniteSpace& space) {
  State st;
  st.probs = space.weights() / space.total_mass();
  return st;
}

// ---------------------------------------------------------------------------
// Holder seminorm: max over pairs of |f(x)-f(y)| / d(x,y)^beta.

template <typename Derived>
double holder_seminorm(const FiniteSpace& space,
                       const Eigen::MatrixBase<Derived>& f, double beta) {
  if (!(beta > 0.0 && beta <= 1.0))
    throw ValidationError("holder_seminorm: beta must lie in (0,1]");
  if (f.size() != space.size())
    throw ValidationError("holder_seminorm: vector length mismatch");
  double best = 0.0;
  for (int i = 0; i < space.size(); ++i)
    for (int j = i + 1; j < space.size(); ++j) {
      double num = std::abs(f(i) - f(j));
      best = std::max(best, num / std::pow(space.dist(i, j), beta));
    }
  return best;
}

// ---------------------------------------------------------------------------
// Ahlfors regularity report: closed-ball mass ratios mu(B(x,r)) / r^{d_f}.

struct AhlforsRow {
  int point;
  double radius;
  double ratio;
};

struct AhlforsReport {
  std::vector<AhlforsRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

inline AhlforsReport ahlfors_report(const FiniteSpace& space,
                                    const std::vector<double>& radii) {
  if (radii.empty()) throw ValidationError("ahlfors_report: empty radii list");
  for (double r : radii)
    if (!(r > 0.0 && r <= space.diam() + 1e-15))
      throw ValidationError("ahlfors_report: radius outside (0, diam]");
  AhlforsReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (int x = 0; x < space.size(); ++x)
    for (double r : radii) {
      double ratio = space.ball_mass(x, r) / std::pow(r, space.d_f());
      rep.rows.push_back({x, r, ratio});
      rep.min_ratio = std::min(rep.min_ratio, ratio);
      rep.max_ratio = std::max(rep.max_ratio, ratio);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Space files. Self-describing text: a header, then (for custom spaces)
// point and distance records. Builder kinds carry only their parameters.

inline void save_space(const FiniteSpace& space, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(17);
  out << "kind " << to_string(space.kind()) << "\n";
  if (space.kind() == SpaceKind::Cantor && space.cantor_params()) {
    const auto& p = *space.cantor_params();
    out << "params " << p.symbols << " " << p.scale << " " << p.depth << "\n";
    out << "total_mass " << space.total_mass() << "\n";
    return;
  }
  if (space.kind() == SpaceKind::Circle && space.circle_params()) {
    out << "params " << space.circle_params()->points << "\n";
    return;
  }
  out << "d_f " << space.d_f() << "\n";
  if (std::isinf(space.d_w()))
    out << "d_w inf\n";
  else
    out << "d_w " << space.d_w() << "\n";
  out << "total_mass " << space.total_mass() << "\n";
  out << "points " << space.size() << "\n";
  for (int i = 0; i < space.size(); ++i)
    out << "point " << space.point_ids()[static_cast<std::size_t>(i)] << " "
        << space.weight(i) << "\n";
  for (int i = 0; i < space.size(); ++i)
    for (int j = i + 1; j < space.size(); ++j)
      out << "dist " << space.point_ids()[static_cast<std::size_t>(i)] << " "
          << space.point_ids()[static_cast<std::size_t>(j)] << " "
          << space.dist(i, j) << "\n";
}

inline FiniteSpace load_space(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string kind;
  double d_f = 0.0, d_w = 2.0, total_mass = 1.0;
  bool have_df = false;
  std::vector<std::string> ids;
  std::vector<double> weights;
  std::vector<std::tuple<std::string, std::string, double>> dists;
  std::optional<CantorParams> cantor;
  std::optional<CircleParams> circle;

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    auto fail = [&](const std::string& m) {
      throw IoError(path + ":" + std::to_string(lineno) + ": " + m);
    };
    if (tok == "kind") {
      if (!(ls >> kind)) fail("missing kind value");
    } else if (tok == "params") {
      if (kind == "cantor") {
        CantorParams p;
        if (!(ls >> p.symbols >> p.scale >> p.depth)) fail("bad cantor params");
        cantor = p;
      } else if (kind == "circle") {
        CircleParams p;
        if (!(ls >> p.points)) fail("bad circle params");
        circle = p;
      } else {
        fail("params record requires kind cantor or circle");
      }
    } else if (tok == "d_f") {
      if (!(ls >> d_f)) fail("bad d_f");
      have_df = true;
    } else if (tok == "d_w") {
      std::string v;
      if (!(ls >> v)) fail("bad d_w");
      d_w = (v == "inf" || v == "infinite") ? kInfiniteWalkDim : std::stod(v);
    } else if (tok == "total_mass") {
      if (!(ls >> total_mass)) fail("bad total_mass");
    } else if (tok == "points") {
      // count record is informative only
    } else if (tok == "point") {
      std::string id;
      double w;
      if (!(ls >> id >> w)) fail("bad point record");
      ids.push_back(id);
      weights.push_back(w);
    } else if (tok == "dist") {
      std::string a, b;
      double v;
      if (!(ls >> a >> b >> v)) fail("bad dist record");
      dists.emplace_back(a, b, v);
    } else {
      fail("unknown record '" + tok + "'");
    }
  }

  if (kind == "cantor") {
    if (!cantor) throw IoError(path + ": cantor file missing params");
    return build_cantor_space(cantor->symbols, cantor->scale, cantor->depth,
                              total_mass);
  }
  if (kind == "circle") {
    if (!circle) throw IoError(path + ": circle file missing params");
    return build_circle_space(circle->points);
  }
  if (kind != "custom") throw IoError(path + ": unknown or missing kind");
  if (!have_df) throw IoError(path + ": custom space missing d_f");
  if (ids.empty()) throw IoError(path + ": custom space has no points");

  const int n = static_cast<int>(ids.size());
  std::map<std::string, int> index;
  for (int i = 0; i < n; ++i) index[ids[static_cast<std::size_t>(i)]] = i;
  Eigen::MatrixXd D = Eigen::MatrixXd::Constant(n, n, -1.0);
  D.diagonal().setZero();
  std::vector<std::string> violations;
  for (const auto& [a, b, v] : dists) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
      violations.push_back("dist record references unknown point");
      continue;
    }
    double& fwd = D(ia->second, ib->second);
    double& bwd = D(ib->second, ia->second);
    if (fwd >= 0.0 && fwd != v)
      violations.push_back("conflicting dist records for (" + a + "," + b + ")");
    fwd = v;
    if (bwd >= 0.0 && bwd != v)
      violations.push_back("asymmetric dist records for (" + a + "," + b + ")");
    bwd = v;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (D(i, j) < 0.0)
        violations.push_back("missing distance between " +
                             ids[static_cast<std::size_t>(i)] + " and " +
                             ids[static_cast<std::size_t>(j)]);
  if (!violations.empty()) {
    std::string msg = path + ": invalid space file:";
    for (const auto& m : violations) msg += "\n  - " + m;
    throw ValidationError(msg, violations);
  }

  Eigen::VectorXd w(n);
  for (int i = 0; i < n; ++i) w(i) = weights[static_cast<std::size_t>(i)];
  FiniteSpace space(std::move(ids), std::move(D), std::move(w), d_f, d_w,
                    SpaceKind::Custom);
  validate_space(space);
  if (std::abs(space.total_mass() - total_mass) >
      1e-12 * std::max(total_mass, 1e-300))
    throw ValidationError(path + ": declared total_mass disagrees with weights");
  return space;
}

inline State load_state(const std::string& path, const FiniteSpace& space) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  State st;
  st.probs = Eigen::VectorXd::Zero(space.size());
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string id;
    double p;
    if (!(ls >> id >> p)) throw IoError(path + ": bad state record: " + line);
    if (id == "id") continue;  // header row
    st.probs(space.index_of(id)) = p;
  }
  st.validate();
  return st;
}

}  // namespace fraclap
