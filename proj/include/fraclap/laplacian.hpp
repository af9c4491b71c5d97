#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <vector>

#include "fraclap/dyadic.hpp"
#include "fraclap/space.hpp"

namespace fraclap {

// Nonlocal generator of the quadratic energy form
//   E_s(f,g) = 1/2 sum_{x != y} conj(f(x)-f(y)) (g(x)-g(y)) w_x w_y / d(x,y)^{d_f+2s}
// acting as
//   (D_s f)(x) = sum_{y != x} (f(x)-f(y)) w_y / d(x,y)^{d_f+2s}.
// The diagonal pair (y = x) is excluded throughout: points stand for cells
// carrying their own mass and functions are constant on cells, so the
// excluded pair contributes nothing in the underlying space.
//
// D_s annihilates constants, is self-adjoint for the weighted inner product,
// and is conjugate to the symmetric matrix S = W^{1/2} A W^{-1/2} with
//   S_xy = -sqrt(w_x w_y) / d^{d_f+2s} (x != y),  S_xx = sum_{y!=x} w_y / d^{d_f+2s}.

class GeneratorMatrix {
 public:
  using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

  // Assembly runs in extended precision: matrix norms reach
  // theta^{-(d_f+2s) L} while the smallest nonzero eigenvalue stays near 1,
  // and double-rounded entries alone shift it past the 1e-10 level. The
  // extended copy is kept (and used by spectrum) up to order 2048.
  GeneratorMatrix(const FiniteSpace& space, double s)
      : s_(s), d_f_(space.d_f()), weights_(space.weights()) {
    if (!(s > 0.0)) throw ValidationError("generator: order must be positive");
    const int n = space.size();
    MatrixXld sym(n, n);
    const long double expo = static_cast<long double>(d_f_) + 2.0L * s;
    Eigen::VectorXd sw = weights_.cwiseSqrt();
    for (int x = 0; x < n; ++x) {
      long double diag = 0.0L;
      for (int y = 0; y < n; ++y) {
        if (y == x) continue;
        long double k =
            1.0L / std::pow(static_cast<long double>(space.dist(x, y)), expo);
        sym(x, y) = -static_cast<long double>(sw(x)) * sw(y) * k;
        diag += static_cast<long double>(weights_(y)) * k;
      }
      sym(x, x) = diag;
    }
    sym_ = sym.cast<double>();
    if (n <= 2048) sym_ld_ = std::move(sym);
  }

  double order() const { return s_; }
  double d_f() const { return d_f_; }
  int size() const { return static_cast<int>(weights_.size()); }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::MatrixXd& symmetrized() const { return sym_; }
  bool has_extended() const { return sym_ld_.size() > 0; }
  const MatrixXld& symmetrized_extended() const { return sym_ld_; }

  // (D_s f) = W^{-1/2} S W^{1/2} f
  template <typename Scalar>
  Eigen::Vector<Scalar, Eigen::Dynamic> apply(
      const Eigen::Vector<Scalar, Eigen::Dynamic>& f) const {
    Eigen::Vector<Scalar, Eigen::Dynamic> g =
        f.cwiseProduct(weights_.cwiseSqrt().template cast<Scalar>());
    g = (sym_.template cast<Scalar>() * g).eval();
    return g.cwiseQuotient(weights_.cwiseSqrt().template cast<Scalar>());
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    return apply<double>(f);
  }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& f) const {
    return apply<std::complex<double>>(f);
  }

 private:
  double s_;
  double d_f_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd sym_;
  MatrixXld sym_ld_;
};

inline GeneratorMatrix assemble_generator(const FiniteSpace& space, double s) {
  return GeneratorMatrix(space, s);
}

// The complexified energy form; agrees with <D_s f, g> over the weights.
template <typename ScalarF, typename ScalarG>
std::complex<double> dirichlet_energy(
    const FiniteSpace& space, double s,
    const Eigen::Vector<ScalarF, Eigen::Dynamic>& f,
    const Eigen::Vector<ScalarG, Eigen::Dynamic>& g) {
  if (!(s > 0.0)) throw ValidationError("dirichlet_energy: order must be positive");
  const double expo = space.d_f() + 2.0 * s;
  std::complex<double> acc = 0.0;
  for (int x = 0; x < space.size(); ++x)
    for (int y = 0; y < space.size(); ++y) {
      if (y == x) continue;
      std::complex<double> df = std::complex<double>(f(x)) - std::complex<double>(f(y));
      std::complex<double> dg = std::complex<double>(g(x)) - std::complex<double>(g(y));
      acc += std::conj(df) * dg * space.weight(x) * space.weight(y) /
             std::pow(space.dist(x, y), expo);
    }
  return 0.5 * acc;
}

template <typename Scalar>
double dirichlet_energy(const FiniteSpace& space, double s,
                        const Eigen::Vector<Scalar, Eigen::Dynamic>& f) {
  return dirichlet_energy(space, s, f, f).real();
}

// Single-point principal-value sum; row x of the generator applied to f.
template <typename Scalar>
Scalar pv_apply(const FiniteSpace& space, double s,
                const Eigen::Vector<Scalar, Eigen::Dynamic>& f, int x) {
  if (x < 0 || x >= space.size())
    throw ValidationError("pv_apply: unknown point");
  const double expo = space.d_f() + 2.0 * s;
  Scalar acc = Scalar(0);
  for (int y = 0; y < space.size(); ++y) {
    if (y == x) continue;
    acc += (f(x) - f(y)) *
           Scalar(space.weight(y) / std::pow(space.dist(x, y), expo));
  }
  return acc;
}

template <typename Scalar>
Scalar pv_apply(const FiniteSpace& space, double s,
                const Eigen::Vector<Scalar, Eigen::Dynamic>& f,
                const std::string& id) {
  return pv_apply(space, s, f, space.index_of(id));
}

// ---------------------------------------------------------------------------
// Spectral data: ascending eigenvalues with a weighted-orthonormal
// eigenfunction table.

enum class SpectralSource { Numeric, CantorExact };

struct SpectralData {
  Eigen::VectorXd eigenvalues;    // ascending
  Eigen::MatrixXcd eigenfunctions; // column n pairs with eigenvalue n
  double residual = 0.0;          // max ||D h - lambda h|| / max(1, lambda)
  SpectralSource source = SpectralSource::Numeric;
};

namespace detail {

// Phase-fix each column so its largest-magnitude entry is positive real
// (ties broken by lowest index). Makes degenerate eigenspaces reproducible
// up to the solver's basis choice.
inline void fix_phases(Eigen::MatrixXcd& H) {
  for (int c = 0; c < H.cols(); ++c) {
    int arg = 0;
    double best = -1.0;
    for (int r = 0; r < H.rows(); ++r) {
      double a = std::abs(H(r, c));
      if (a > best + 1e-14) {
        best = a;
        arg = r;
      }
    }
    if (best > 0.0) H.col(c) *= std::conj(H(arg, c)) / best;
  }
}

}  // namespace detail

// Dense symmetric eigendecomposition of the weighted generator, in extended
// precision whenever the assembly kept its extended copy.
inline SpectralData spectrum(const GeneratorMatrix& gen, int guard = 4096) {
  const int n = gen.size();
  if (n > guard)
    throw ValidationError("spectrum: matrix order exceeds the guard");

  using MatL = GeneratorMatrix::MatrixXld;
  MatL S = gen.has_extended() ? gen.symmetrized_extended()
                              : gen.symmetrized().cast<long double>();
  Eigen::SelfAdjointEigenSolver<MatL> es(S);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError(
        "spectrum: eigensolver did not converge within its iteration cap");
  }

  SpectralData out;
  out.eigenvalues = es.eigenvalues().cast<double>();
  Eigen::MatrixXd V = es.eigenvectors().cast<double>();
  Eigen::VectorXd isw = gen.weights().cwiseSqrt().cwiseInverse();
  Eigen::MatrixXcd H =
      (isw.asDiagonal() * V).cast<std::complex<double>>();
  detail::fix_phases(H);
  out.eigenfunctions = std::move(H);
  out.source = SpectralSource::Numeric;

  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXcd h = out.eigenfunctions.col(k);
    Eigen::VectorXcd r = gen.apply(h) - out.eigenvalues(k) * h;
    double nr = 0.0;
    for (int i = 0; i < n; ++i) nr += gen.weights()(i) * std::norm(r(i));
    worst = std::max(worst,
                     std::sqrt(nr) / std::max(1.0, out.eigenvalues(k)));
  }
  out.residual = worst;
  return out;
}

// Closed-form eigenvalue of the cantor generator of order s on a wavelet of
// level n (cylinder word length n):
//   lambda^{2 s n} + (N-1)/(N (lambda^{2s} - 1)) * (lambda^{2 s n} - 1).
inline double cantor_level_eigenvalue(int symbols, double scale, double s,
                                      int level_n) {
  double base = std::pow(scale, 2.0 * s);
  double c = (symbols - 1) / (symbols * (base - 1.0));
  double t = std::pow(base, level_n);
  return t + c * (t - 1.0);
}

// Ascending eigenvalue multiset of the depth-L cantor generator: zero once,
// then the level-n value with multiplicity N^n (N-1) for n = 0..L-1.
inline Eigen::VectorXd cantor_exact_eigenvalues(int symbols, double scale,
                                                double s, int depth) {
  int n = 1;
  for (int i = 0; i < depth; ++i) n *= symbols;
  Eigen::VectorXd out(n);
  out(0) = 0.0;
  int col = 1;
  int shell = symbols - 1;
  for (int lev = 0; lev < depth; ++lev) {
    double ev = cantor_level_eigenvalue(symbols, scale, s, lev);
    for (int j = 0; j < shell; ++j) out(col++) = ev;
    shell *= symbols;
  }
  return out;
}

// Exact spectrum of the depth-L cantor generator: the constant plus the
// wavelets of levels 0..L-1; ascending by construction since the level
// eigenvalue grows with the level. Eigenfunctions are constant on cells one
// level below their own, so the finite generator reproduces them without
// discretization error.
inline SpectralData cantor_exact_spectrum(int symbols, double scale, double s,
                                          int depth, double total_mass = 1.0) {
  auto space = build_cantor_space(symbols, scale, depth, total_mass);
  auto sys = build_dyadic(space);
  auto basis = haar_basis(space, sys);

  const int n = space.size();
  SpectralData out;
  out.source = SpectralSource::CantorExact;
  out.eigenvalues.resize(n);
  out.eigenfunctions.resize(n, n);
  out.eigenvalues(0) = 0.0;
  out.eigenfunctions.col(0) =
      Eigen::VectorXcd::Constant(n, 1.0 / std::sqrt(total_mass));

  // wavelets arrive root-first from haar_basis; their levels ascend, and the
  // level eigenvalue is increasing, so the fill order is already sorted
  int col = 1;
  for (const auto& hw : basis.wavelets()) {
    int lev = sys.cube(hw.cube).level;
    out.eigenvalues(col) = cantor_level_eigenvalue(symbols, scale, s, lev);
    out.eigenfunctions.col(col) = hw.values;
    ++col;
  }
  out.residual = 0.0;
  return out;
}

// ---------------------------------------------------------------------------

struct WeylFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int lo = 0;  // [lo, hi) index window into the ascending nonzero eigenvalues
  int hi = 0;
};

// Least-squares fit of log(lambda_n) against log(n) over an index window of
// the nonzero spectrum. The default window keeps the middle two quarters:
// the top modes of a non-ultrametric discretization are corrupted and the
// bottom ones carry lattice offsets.
inline WeylFit weyl_fit(const Eigen::VectorXd& eigenvalues,
                        double window_lo = 0.25, double window_hi = 0.75) {
  std::vector<double> nz;
  for (int i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues(i) > 1e-12) nz.push_back(eigenvalues(i));
  const int m = static_cast<int>(nz.size());
  if (m < 16)
    throw ValidationError("weyl_fit: need at least 16 nonzero eigenvalues");
  int lo = static_cast<int>(m * window_lo);
  int hi = static_cast<int>(m * window_hi);
  lo = std::max(0, std::min(lo, m - 2));
  hi = std::max(lo + 2, std::min(hi, m));

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const int cnt = hi - lo;
  for (int i = lo; i < hi; ++i) {
    double x = std::log(static_cast<double>(i + 1));
    double y = std::log(nz[static_cast<std::size_t>(i)]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  double den = cnt * sxx - sx * sx;
  WeylFit fit;
  fit.lo = lo;
  fit.hi = hi;
  fit.slope = (cnt * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / cnt;
  double ss_tot = syy - sy * sy / cnt;
  double ss_res = 0.0;
  for (int i = lo; i < hi; ++i) {
    double x = std::log(static_cast<double>(i + 1));
    double y = std::log(nz[static_cast<std::size_t>(i)]);
    double e = y - (fit.slope * x + fit.intercept);
    ss_res += e * e;
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

inline WeylFit weyl_fit(const SpectralData& spec, double window_lo = 0.25,
                        double window_hi = 0.75) {
  return weyl_fit(spec.eigenvalues, window_lo, window_hi);
}

// ---------------------------------------------------------------------------

struct KernelCheck {
  bool pass = false;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double const_variation = 0.0;  // relative deviation of h_0 from constant
};

// The zero eigenvalue is simple with constant eigenfunction; everything else
// is strictly positive.
inline KernelCheck kernel_check(const SpectralData& spec) {
  KernelCheck chk;
  chk.lambda0 = spec.eigenvalues(0);
  chk.lambda1 = spec.eigenvalues.size() > 1 ? spec.eigenvalues(1) : 0.0;
  std::complex<double> mean = spec.eigenfunctions.col(0).mean();
  double dev = 0.0;
  for (int i = 0; i < spec.eigenfunctions.rows(); ++i)
    dev = std::max(dev, std::abs(spec.eigenfunctions(i, 0) - mean));
  chk.const_variation = dev / std::max(std::abs(mean), 1e-300);
  chk.pass = chk.lambda1 > 0.0 && chk.lambda0 <= 1e-10 * chk.lambda1 &&
             chk.const_variation <= 1e-8;
  return chk;
}

}  // namespace fraclap
