#pragma once

#include <Eigen/Dense>
#include <Eigen/LU>

#include <cmath>
#include <string>
#include <vector>

#include "fraclap/commutator.hpp"
#include "fraclap/laplacian.hpp"
#include "fraclap/space.hpp"

namespace fraclap {

// Transport-type metrics on states. Three routes to the same number:
//
//  closed    rho(phi,psi)^2 = sum_{n>=1} lambda_n^{-1} |(phi-psi)(h_n)|^2
//            over the spectral data of the order-beta(alpha) generator,
//  linsolve  solve the generator on the mean-zero complement for the
//            representer of phi-psi and read off the dual pairing,
//  sup       maximize sum_x (phi-psi)_x f(x) over the seminorm unit ball by
//            projected subgradient ascent (feasible iterates only, so the
//            result is a certified lower bound).
//
// closed and linsolve agree to solver precision; sup converges to them for
// the quadratic (p = 2) constraint and provides lower bounds for p != 2.

enum class MKMethod { Closed, Linsolve, Sup };

struct MKResult {
  double distance = 0.0;
  MKMethod method = MKMethod::Closed;
  std::vector<double> contributions;  // per-eigenvalue terms (closed)
  std::vector<double> trace;          // objective per accepted iterate (sup)
  int iterations = 0;
  bool converged = true;
};

inline MKResult mk_closed(const SpectralData& spec, const State& phi,
                          const State& psi) {
  if (spec.eigenvalues.size() < 2 || !(spec.eigenvalues(1) > 0.0))
    throw ValidationError("mk_closed: spectral data lacks a positive gap");
  if (phi.probs.size() != spec.eigenfunctions.rows() ||
      psi.probs.size() != spec.eigenfunctions.rows())
    throw ValidationError("mk_closed: state dimension mismatch");
  MKResult out;
  out.method = MKMethod::Closed;
  Eigen::VectorXd diff = phi.probs - psi.probs;
  double acc = 0.0;
  out.contributions.reserve(static_cast<std::size_t>(spec.eigenvalues.size()) - 1);
  for (int n = 1; n < spec.eigenvalues.size(); ++n) {
    std::complex<double> pairing =
        (diff.cast<std::complex<double>>().cwiseProduct(
             spec.eigenfunctions.col(n)))
            .sum();
    double term = std::norm(pairing) / spec.eigenvalues(n);
    out.contributions.push_back(term);
    acc += term;
  }
  out.distance = std::sqrt(acc);
  return out;
}

// Independent route: direct elimination on the symmetrized generator
// restricted to the mean-zero complement via a bordered system. No spectral
// decomposition is involved.
inline MKResult mk_linsolve(const FiniteSpace& space, double alpha,
                            const State& phi, const State& psi) {
  MKResult out;
  out.method = MKMethod::Linsolve;
  const int n = space.size();
  double ba = beta_of_alpha(alpha, space.d_f());
  GeneratorMatrix gen(space, ba);

  Eigen::VectorXd diff = phi.probs - psi.probs;
  // functional represented against the masses, then projected mean-zero
  Eigen::VectorXd v = diff.cwiseQuotient(space.weights());
  double mean = space.weights().dot(v) / space.total_mass();
  v.array() -= mean;

  Eigen::VectorXd q = space.weights().cwiseSqrt();  // zero mode of S
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = q.cwiseProduct(v);
  rhs(n) = 0.0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n + 1, n + 1);
  B.topLeftCorner(n, n) = gen.symmetrized();
  B.block(0, n, n, 1) = q;
  B.block(n, 0, 1, n) = q.transpose();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite())
    throw ConvergenceError("mk_linsolve: singular restricted system");
  Eigen::VectorXd g = sol.head(n).cwiseQuotient(q);  // back to function values

  double pairing = diff.dot(g);
  out.distance = std::sqrt(std::max(0.0, pairing));
  return out;
}

// ---------------------------------------------------------------------------
// Sup oracle.

struct SupConfig {
  int max_iters = 5000;
  double radius = 1.0;        // constraint-norm bound
  double tol = 1e-12;         // stationarity tolerance on the ascent direction
  bool record_trace = false;
};

namespace detail {

// Constraint functionals for the sup oracle. For p = 2 the constraint is the
// energy seminorm of order beta(alpha) (the convention every other route in
// this header uses); otherwise the Schatten p-norm of the commutator of
// order alpha, with its subgradient assembled from a singular value
// decomposition.
class SupConstraint {
 public:
  SupConstraint(const FiniteSpace& space, double alpha, double p)
      : space_(space), p_(p) {
    if (p_ == 2.0) {
      gen_.emplace(space, beta_of_alpha(alpha, space.d_f()));
    } else {
      alpha_ = alpha;
      const int n = space.size();
      const double expo = space.d_f() + 2.0 * alpha;
      scaled_.resize(n, n);
      Eigen::VectorXd sw = space.weights().cwiseSqrt();
      for (int x = 0; x < n; ++x) {
        scaled_(x, x) = 0.0;
        for (int y = 0; y < n; ++y)
          if (y != x)
            scaled_(x, y) = sw(x) * sw(y) / std::pow(space.dist(x, y), expo);
      }
    }
  }

  double value(const Eigen::VectorXd& f) const {
    if (gen_) {
      Eigen::VectorXd sf = space_.weights().cwiseSqrt().cwiseProduct(f);
      return std::sqrt(std::max(0.0, sf.dot(gen_->symmetrized() * sf)));
    }
    Eigen::MatrixXd a = table(f);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& sv = svd.singularValues();
    if (std::isinf(p_)) return sv.size() ? sv(0) : 0.0;
    double acc = 0.0;
    for (int i = 0; i < sv.size(); ++i) acc += std::pow(sv(i), p_);
    return std::pow(acc, 1.0 / p_);
  }

  // gradient (subgradient for p != 2) of the constraint norm at f
  Eigen::VectorXd gradient(const Eigen::VectorXd& f) const {
    if (gen_) {
      Eigen::VectorXd sf = space_.weights().cwiseSqrt().cwiseProduct(f);
      Eigen::VectorXd g = gen_->symmetrized() * sf;
      double nv = std::sqrt(std::max(0.0, sf.dot(g)));
      if (nv <= 0.0) return Eigen::VectorXd::Zero(f.size());
      return space_.weights().cwiseSqrt().cwiseProduct(g) / nv;
    }
    Eigen::MatrixXd a = table(f);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(
        a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    double nv = 0.0;
    Eigen::VectorXd weights_sv = Eigen::VectorXd::Zero(sv.size());
    if (std::isinf(p_)) {
      nv = sv.size() ? sv(0) : 0.0;
      if (sv.size()) weights_sv(0) = 1.0;
    } else {
      for (int i = 0; i < sv.size(); ++i) nv += std::pow(sv(i), p_);
      nv = std::pow(nv, 1.0 / p_);
      if (nv > 0.0)
        for (int i = 0; i < sv.size(); ++i)
          weights_sv(i) = std::pow(sv(i) / nv, p_ - 1.0);
    }
    if (nv <= 0.0) return Eigen::VectorXd::Zero(f.size());
    // dN/dA = U diag((sv/nv)^{p-1}) V^T, then chain through
    // A(f)_{xy} = scaled_{xy} (f(x) - f(y)).
    Eigen::MatrixXd dn = svd.matrixU() * weights_sv.asDiagonal() *
                         svd.matrixV().transpose();
    const int n = static_cast<int>(f.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        if (x == y) continue;
        double m = dn(x, y) * scaled_(x, y);
        grad(x) += m;
        grad(y) -= m;
      }
    return grad;
  }

 private:
  Eigen::MatrixXd table(const Eigen::VectorXd& f) const {
    const int n = static_cast<int>(f.size());
    Eigen::MatrixXd a(n, n);
    for (int x = 0; x < n; ++x) {
      a(x, x) = 0.0;
      for (int y = 0; y < n; ++y)
        if (y != x) a(x, y) = scaled_(x, y) * (f(x) - f(y));
    }
    return a;
  }

  const FiniteSpace& space_;
  double p_;
  double alpha_ = 0.0;
  std::optional<GeneratorMatrix> gen_;
  Eigen::MatrixXd scaled_;
};

}  // namespace detail

// Projected subgradient ascent for the linear objective <phi - psi, f> over
// {f mean-zero, constraint-norm(f) <= radius}. Each step moves along the
// ascent direction of the objective-to-norm ratio, re-centers, and rescales
// onto the constraint boundary; the step is backtracked until the objective
// improves, so every reported value is feasible.
inline MKResult mk_sup(const FiniteSpace& space, double alpha, double beta,
                       double p, const State& phi, const State& psi,
                       const SupConfig& cfg = {}) {
  if (!(p >= 1.0)) throw ValidationError("mk_sup: p must be >= 1");
  (void)beta;  // regime bookkeeping lives in the caller / run config
  MKResult out;
  out.method = MKMethod::Sup;
  Eigen::VectorXd c = phi.probs - psi.probs;
  if (c.cwiseAbs().maxCoeff() == 0.0) {
    out.distance = 0.0;
    return out;
  }
  detail::SupConstraint constraint(space, alpha, p);

  // orthogonal projection onto the mean-zero hyperplane {<weights, f> = 0}
  const Eigen::VectorXd& wv = space.weights();
  const double ww = wv.squaredNorm();
  auto project0 = [&wv, ww](Eigen::VectorXd f) {
    f -= (wv.dot(f) / ww) * wv;
    return f;
  };

  Eigen::VectorXd f = project0(c.cwiseQuotient(space.weights()));
  double nv = constraint.value(f);
  if (nv <= 0.0)
    throw ConvergenceError("mk_sup: degenerate start direction");
  f *= cfg.radius / nv;
  double best = c.dot(f);
  if (cfg.record_trace) out.trace.push_back(best);

  double step = 1.0;
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    double val = c.dot(f);
    Eigen::VectorXd gnorm = constraint.gradient(f);
    Eigen::VectorXd dir = project0(c - (val / cfg.radius) * gnorm);
    double dn = dir.norm();
    if (dn <= cfg.tol * std::max(1.0, std::abs(val))) {
      ++k;
      break;  // stationary: c is (projected-)parallel to the norm gradient
    }
    bool moved = false;
    while (step > 1e-18) {
      Eigen::VectorXd g = project0(f + step * dir);
      double gv = constraint.value(g);
      if (gv > 0.0) {
        g *= cfg.radius / gv;
        if (c.dot(g) > val) {
          f = std::move(g);
          moved = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!moved) break;
    best = std::max(best, c.dot(f));
    if (cfg.record_trace) out.trace.push_back(best);
    step *= 1.3;
  }
  out.iterations = k;
  out.converged = k < cfg.max_iters;
  out.distance = best;
  return out;
}

// ---------------------------------------------------------------------------
// Dirac-mass scan: the metric between point masses against the two
// Holder-normalized ratios.

struct DiracScanRow {
  int x = 0;
  int y = 0;
  double dist = 0.0;
  double rho = 0.0;
  double ratio_2alpha = 0.0;  // rho / d^{2 alpha}
  double ratio_beta = 0.0;    // rho / d^beta
};

struct DiracScan {
  std::vector<DiracScanRow> rows;
  double max_ratio_2alpha = 0.0;  // empirical upper constant
  double min_ratio_beta = 0.0;    // empirical lower constant
};

inline DiracScan dirac_scan(const FiniteSpace& space, double alpha,
                            double beta, double p,
                            const SupConfig& sup_cfg = {}) {
  if (!(alpha > 0.0 && 2.0 * alpha < beta && beta <= 1.0))
    throw ValidationError("dirac_scan: need 0 < 2 alpha < beta <= 1");
  DiracScan scan;
  scan.min_ratio_beta = std::numeric_limits<double>::infinity();

  std::optional<SpectralData> spec;
  if (p == 2.0) {
    GeneratorMatrix gen(space, beta_of_alpha(alpha, space.d_f()));
    spec = spectrum(gen);
  }
  for (int x = 0; x < space.size(); ++x)
    for (int y = x + 1; y < space.size(); ++y) {
      State dx = dirac_state(space, x), dy = dirac_state(space, y);
      double rho = p == 2.0
                       ? mk_closed(*spec, dx, dy).distance
                       : mk_sup(space, alpha, beta, p, dx, dy, sup_cfg).distance;
      DiracScanRow row;
      row.x = x;
      row.y = y;
      row.dist = space.dist(x, y);
      row.rho = rho;
      row.ratio_2alpha = rho / std::pow(row.dist, 2.0 * alpha);
      row.ratio_beta = rho / std::pow(row.dist, beta);
      scan.max_ratio_2alpha = std::max(scan.max_ratio_2alpha, row.ratio_2alpha);
      scan.min_ratio_beta = std::min(scan.min_ratio_beta, row.ratio_beta);
      scan.rows.push_back(row);
    }
  return scan;
}

// ---------------------------------------------------------------------------
// Depth refinement of the closed formula on cantor spaces.
//
// States are specified once and realized at every depth L:
//  - a word prefix (point mass): the indicator of the cylinder of the word's
//    depth-L prefix, padding with the first symbol beyond its length;
//  - a base-depth vector: refined by uniform splitting of each cell.

struct TruncationState {
  bool is_word = false;
  std::vector<int> word;       // digits, 0-based
  int base_depth = 0;          // for vector states
  Eigen::VectorXd base_probs;  // over symbols^base_depth cells

  static TruncationState from_word(const std::vector<int>& w) {
    TruncationState st;
    st.is_word = true;
    st.word = w;
    return st;
  }
  static TruncationState from_vector(int depth, Eigen::VectorXd probs) {
    TruncationState st;
    st.is_word = false;
    st.base_depth = depth;
    st.base_probs = std::move(probs);
    return st;
  }

  State realize(int symbols, int depth) const {
    State out;
    int n = 1;
    for (int i = 0; i < depth; ++i) n *= symbols;
    out.probs = Eigen::VectorXd::Zero(n);
    if (is_word) {
      std::vector<int> w(static_cast<std::size_t>(depth), 0);
      for (int i = 0; i < depth; ++i)
        w[static_cast<std::size_t>(i)] =
            i < static_cast<int>(word.size()) ? word[static_cast<std::size_t>(i)] : 0;
      out.probs(cantor_index(w, symbols)) = 1.0;
      return out;
    }
    if (depth < base_depth)
      throw ValidationError("truncation state cannot be coarsened");
    int split = 1;
    for (int i = 0; i < depth - base_depth; ++i) split *= symbols;
    for (int cell = 0; cell < base_probs.size(); ++cell)
      for (int j = 0; j < split; ++j)
        out.probs(cell * split + j) = base_probs(cell) / split;
    return out;
  }
};

struct TruncationConvergence {
  std::vector<int> depths;
  std::vector<double> rho;
  std::vector<double> successive_rel_diff;  // |rho_{k+1}-rho_k| / rho_k
};

inline TruncationConvergence truncation_convergence(
    int symbols, double scale, double alpha, const TruncationState& phi,
    const TruncationState& psi, const std::vector<int>& depths) {
  TruncationConvergence out;
  double d_f = std::log(static_cast<double>(symbols)) / std::log(scale);
  double ba = beta_of_alpha(alpha, d_f);
  for (int L : depths) {
    auto spec = cantor_exact_spectrum(symbols, scale, ba, L);
    State a = phi.realize(symbols, L);
    State b = psi.realize(symbols, L);
    out.depths.push_back(L);
    out.rho.push_back(mk_closed(spec, a, b).distance);
  }
  for (std::size_t k = 0; k + 1 < out.rho.size(); ++k) {
    double denom = std::max(out.rho[k], 1e-300);
    out.successive_rel_diff.push_back(
        std::abs(out.rho[k + 1] - out.rho[k]) / denom);
  }
  return out;
}

}  // namespace fraclap
