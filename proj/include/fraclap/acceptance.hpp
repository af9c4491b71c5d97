#pragma once

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/commutator.hpp"
#include "fraclap/crossed.hpp"
#include "fraclap/dyadic.hpp"
#include "fraclap/laplacian.hpp"
#include "fraclap/mk.hpp"
#include "fraclap/space.hpp"

namespace fraclap {

// End-to-end verification suite. Each criterion is pinned here, tolerances
// included, and reports a single pass/fail line; `verify-all` in the CLI and
// the dedicated test binary both run exactly this list.

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace acceptance {

namespace detail {

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace detail

// 1: numeric eigendecomposition matches the closed-form cantor multiset to
//    1e-10 relative across the (N, lambda, L, s) grid, within 60 s.
inline CriterionResult exact_cantor_spectrum() {
  detail::Timer timer;
  CriterionResult r{1, "exact cantor spectrum vs numeric", false, "", 0.0};
  double worst = 0.0;
  std::string worst_at;
  for (int N : {2, 3})
    for (double lam : {2.0, 3.0})
      for (int L = 1; L <= 6; ++L)
        for (double s : {0.25, 0.75, 1.25}) {
          auto space = build_cantor_space(N, lam, L);
          auto spec = spectrum(assemble_generator(space, s));
          auto exact = cantor_exact_eigenvalues(N, lam, s, L);
          for (int i = 0; i < exact.size(); ++i) {
            double e = exact(i), v = spec.eigenvalues(i);
            double rel = e == 0.0 ? std::abs(v) : std::abs(v - e) / e;
            if (rel > worst) {
              worst = rel;
              std::ostringstream os;
              os << "N=" << N << " lam=" << lam << " L=" << L << " s=" << s;
              worst_at = os.str();
            }
          }
        }
  r.seconds = timer.seconds();
  r.pass = worst <= 1e-10 && r.seconds < 60.0;
  r.detail = "max rel err " + detail::fmt(worst) + " (" + worst_at + "), " +
             detail::fmt(r.seconds) + " s";
  return r;
}

// 2: log-log eigenvalue growth exponents. Cantor uses the default window on
//    the exact spectrum; the circle excludes its discretization-polluted top
//    half (modes past a quarter of the grid).
inline CriterionResult weyl_exponent() {
  detail::Timer timer;
  CriterionResult r{2, "weyl exponents", false, "", 0.0};
  auto cantor = weyl_fit(cantor_exact_eigenvalues(2, 2.0, 0.75, 8));
  bool cantor_ok = std::abs(cantor.slope - 1.5) <= 0.1 * 1.5;

  auto circle = build_circle_space(256);
  auto spec = spectrum(assemble_generator(circle, 0.25));
  auto cfit = weyl_fit(spec.eigenvalues, 0.0, 0.5);
  bool circle_ok = std::abs(cfit.slope - 0.5) <= 0.15 * 0.5;

  r.seconds = timer.seconds();
  r.pass = cantor_ok && circle_ok && r.seconds < 30.0;
  r.detail = "cantor slope " + detail::fmt(cantor.slope) +
             " (target 1.5 +-10%), circle slope " + detail::fmt(cfit.slope) +
             " (target 0.5 +-15%), " + detail::fmt(r.seconds) + " s";
  return r;
}

// 3: zero eigenvalue simple with constant eigenfunction on every assembled
//    generator in a representative family.
inline CriterionResult kernel_decomposition() {
  detail::Timer timer;
  CriterionResult r{3, "kernel decomposition", true, "", 0.0};
  double worst_ratio = 0.0, worst_var = 0.0;
  auto run = [&](const FiniteSpace& space, double s) {
    auto spec = spectrum(assemble_generator(space, s));
    auto chk = kernel_check(spec);
    if (!chk.pass) r.pass = false;
    worst_ratio = std::max(worst_ratio,
                           std::abs(chk.lambda0) / std::max(chk.lambda1, 1e-300));
    worst_var = std::max(worst_var, chk.const_variation);
  };
  for (double s : {0.25, 0.75, 1.25}) run(build_cantor_space(2, 2.0, 6), s);
  run(build_cantor_space(3, 2.0, 3), 0.75);
  run(build_circle_space(64), 0.25);
  run(snowflake(build_cantor_space(2, 2.0, 5), 0.5), 0.75);
  r.seconds = timer.seconds();
  r.detail = "max |l0|/l1 " + detail::fmt(worst_ratio) +
             ", max constant deviation " + detail::fmt(worst_var);
  return r;
}

// 4: the three transport routes agree: closed = linsolve to 1e-8 on 50
//    random pairs; the sup oracle reaches 99% of closed on 10 dirac pairs;
//    the two-point distance is 2 on all three. Within 5 minutes.
inline CriterionResult mk_triple_agreement(std::uint64_t seed) {
  detail::Timer timer;
  CriterionResult r{4, "transport metric triple agreement", false, "", 0.0};
  auto space = build_cantor_space(2, 2.0, 6);
  double alpha = 0.125;
  auto gen = assemble_generator(space, beta_of_alpha(alpha, space.d_f()));
  auto spec = spectrum(gen);

  Rng rng(seed);
  double max_pair_err = 0.0;
  for (int t = 0; t < 50; ++t) {
    State phi, psi;
    phi.probs.resize(space.size());
    psi.probs.resize(space.size());
    for (int i = 0; i < space.size(); ++i) {
      phi.probs(i) = rng.next_double() + 1e-9;
      psi.probs(i) = rng.next_double() + 1e-9;
    }
    phi.probs /= phi.probs.sum();
    psi.probs /= psi.probs.sum();
    double a = mk_closed(spec, phi, psi).distance;
    double b = mk_linsolve(space, alpha, phi, psi).distance;
    max_pair_err = std::max(max_pair_err,
                            std::abs(a - b) / std::max(1.0, std::abs(a)));
  }
  bool linsolve_ok = max_pair_err <= 1e-8;

  double worst_sup = 1.0;
  for (int t = 0; t < 10; ++t) {
    int x = static_cast<int>(rng.next_below(64));
    int y = static_cast<int>(rng.next_below(64));
    if (x == y) y = (y + 1) % 64;
    auto phi = dirac_state(space, x), psi = dirac_state(space, y);
    double closed = mk_closed(spec, phi, psi).distance;
    double sup = mk_sup(space, alpha, 0.75, 2.0, phi, psi).distance;
    worst_sup = std::min(worst_sup, sup / closed);
  }
  bool sup_ok = worst_sup >= 0.99;

  auto two = build_cantor_space(2, 2.0, 1);
  auto phi2 = dirac_state(two, 0), psi2 = dirac_state(two, 1);
  auto spec2 = spectrum(assemble_generator(two, beta_of_alpha(alpha, 1.0)));
  bool two_ok =
      std::abs(mk_closed(spec2, phi2, psi2).distance - 2.0) <= 1e-9 &&
      std::abs(mk_linsolve(two, alpha, phi2, psi2).distance - 2.0) <= 1e-9 &&
      std::abs(mk_sup(two, alpha, 1.0, 2.0, phi2, psi2).distance - 2.0) <= 1e-6;

  r.seconds = timer.seconds();
  r.pass = linsolve_ok && sup_ok && two_ok && r.seconds < 300.0;
  r.detail = "closed-linsolve max rel " + detail::fmt(max_pair_err) +
             ", sup/closed min " + detail::fmt(worst_sup) + ", two-point " +
             (two_ok ? "ok" : "FAIL") + ", " + detail::fmt(r.seconds) + " s";
  return r;
}

// 5: raw-HS^2 / energy = 2 to 1e-9 on 100 random symbols.
inline CriterionResult hs_factor_resolution(std::uint64_t seed) {
  detail::Timer timer;
  CriterionResult r{5, "hilbert-schmidt factor resolution", false, "", 0.0};
  auto space = build_cantor_space(2, 2.0, 6);
  Rng rng(seed + 1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXcd h(space.size());
    for (int i = 0; i < space.size(); ++i)
      h(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
    auto rep = l2_energy_seminorm(space, 0.125, h);
    double ratio = rep.raw_hs * rep.raw_hs /
                   (rep.energy_path * rep.energy_path);
    worst = std::max(worst, std::abs(ratio - 2.0));
  }
  r.seconds = timer.seconds();
  r.pass = worst <= 1e-9;
  r.detail = "max |raw^2/energy - 2| = " + detail::fmt(worst);
  return r;
}

// 6: dirac scan brackets are finite and strictly positive on all pairs.
inline CriterionResult dirac_sandwich() {
  detail::Timer timer;
  CriterionResult r{6, "dirac-mass sandwich brackets", false, "", 0.0};
  auto space = build_cantor_space(2, 2.0, 6);
  auto scan = dirac_scan(space, 0.125, 0.75, 2.0);
  r.seconds = timer.seconds();
  bool pairs_ok = scan.rows.size() == 2016;
  r.pass = pairs_ok && scan.min_ratio_beta > 0.0 &&
           std::isfinite(scan.min_ratio_beta) && scan.max_ratio_2alpha > 0.0 &&
           std::isfinite(scan.max_ratio_2alpha);
  r.detail = "pairs " + std::to_string(scan.rows.size()) +
             ", min rho/d^beta " + detail::fmt(scan.min_ratio_beta) +
             ", max rho/d^2alpha " + detail::fmt(scan.max_ratio_2alpha);
  return r;
}

// 7: mixed-norm domination with zero violations; bounded martingale ratio
//    (reported); truncation decay slope at least 0.9 (beta - 2 alpha).
inline CriterionResult schatten_diagnostics(std::uint64_t seed) {
  detail::Timer timer;
  CriterionResult r{7, "schatten diagnostics", false, "", 0.0};
  auto space = build_cantor_space(2, 2.0, 5);
  auto sys = build_dyadic(space);
  auto basis = haar_basis(space, sys);
  double alpha = 0.125, beta = 0.75;

  Rng rng(seed + 2);
  int violations = 0;
  double mart_lo = 1e300, mart_hi = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXcd h = random_symbol(space, sys, basis, rng);
    CommutatorOp op(space, alpha, h);
    for (double p : {2.0, 3.0, 4.0})
      if (gof_bound(space, op, p) < schatten_norm(op, p) - 1e-9) ++violations;
    auto mart = martingale_lhs(space, sys, h, alpha, 3.0);
    double sp = schatten_norm(op, 3.0);
    if (sp > 1e-12) {
      double ratio = std::pow(mart.total, 1.0 / 3.0) / sp;
      mart_lo = std::min(mart_lo, ratio);
      mart_hi = std::max(mart_hi, ratio);
    }
  }
  auto deep = build_cantor_space(2, 2.0, 6);
  auto fit = truncation_fit(deep, alpha, lacunary_symbol(deep, beta), 0.5, 6);
  bool slope_ok = fit.slope >= 0.9 * (beta - 2.0 * alpha);

  r.seconds = timer.seconds();
  r.pass = violations == 0 && slope_ok && std::isfinite(mart_hi);
  r.detail = "gof violations " + std::to_string(violations) +
             ", martingale ratio in [" + detail::fmt(mart_lo) + ", " +
             detail::fmt(mart_hi) + "], truncation slope " +
             detail::fmt(fit.slope) + " (need >= " +
             detail::fmt(0.9 * (beta - 2.0 * alpha)) + ")";
  return r;
}

// 8: cube axioms, wavelet properties, Parseval to 1e-10 and expectation
//    nesting to 1e-12 on cantor(3,2,4) and circle(64).
inline CriterionResult haar_dyadic_exactness(std::uint64_t seed) {
  detail::Timer timer;
  CriterionResult r{8, "haar and cube-system exactness", true, "", 0.0};
  Rng rng(seed + 3);
  double worst_parseval = 0.0, worst_nest = 0.0;
  int axiom_violations = 0;

  auto run = [&](const FiniteSpace& space) {
    auto sys = build_dyadic(space);
    axiom_violations += static_cast<int>(dyadic_violations(space, sys).size());
    auto basis = haar_basis(space, sys);
    auto chk = check_haar(space, sys, basis);
    axiom_violations += static_cast<int>(chk.violations.size());

    Eigen::VectorXcd unit = Eigen::VectorXcd::Constant(
        space.size(), 1.0 / std::sqrt(space.total_mass()));
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXcd f(space.size());
      for (int i = 0; i < space.size(); ++i)
        f(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
      double sum = std::norm(space.inner(unit, f));
      for (const auto& hw : basis.wavelets())
        sum += std::norm(space.inner(hw.values, f));
      double n2 = space.norm(f);
      worst_parseval = std::max(
          worst_parseval, std::abs(sum - n2 * n2) / std::max(1.0, n2 * n2));
    }
    Eigen::VectorXcd f(space.size());
    for (int i = 0; i < space.size(); ++i)
      f(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
    for (int n = 0; n <= sys.max_level(); ++n)
      for (int m = 0; m <= sys.max_level(); ++m) {
        auto lhs = expectation(space, sys, n, expectation(space, sys, m, f));
        auto rhs = expectation(space, sys, std::min(n, m), f);
        worst_nest =
            std::max(worst_nest, (lhs - rhs).cwiseAbs().maxCoeff());
      }
  };
  run(build_cantor_space(3, 2.0, 4));
  run(build_circle_space(64));

  r.seconds = timer.seconds();
  r.pass = axiom_violations == 0 && worst_parseval <= 1e-10 &&
           worst_nest <= 1e-12;
  r.detail = "axiom violations " + std::to_string(axiom_violations) +
             ", parseval err " + detail::fmt(worst_parseval) +
             ", nesting err " + detail::fmt(worst_nest);
  return r;
}

// 9: length-function axioms; single-translation seminorm identity to 1e-10;
//    berezin contraction in 50 of 50 trials at p in {2,4}; cantor fourier
//    conjugation diagonal to 1e-8 with the dual length on the diagonal.
inline CriterionResult crossed_product_suite(std::uint64_t seed) {
  detail::Timer timer;
  CriterionResult r{9, "crossed-product suite", false, "", 0.0};

  auto gcirc = GroupModel::circle_dual(32);
  auto ellc = circle_dual_length(0.2, 32);
  auto gcant = GroupModel::cantor_dual(2, 6);
  auto ellk = cantor_dual_length(2, 2.0, 0.2, 6);
  bool axioms_ok = length_violations(gcirc, ellc).empty() &&
                   length_violations(gcant, ellk).empty();

  // single translations
  double worst_single = 0.0;
  auto single_check = [&](const GroupModel& g, const LengthFunction& ell,
                          int gamma) {
    for (double p : {2.0, 4.0}) {
      auto res = group_seminorm(g, ell, CrossedElement::single_scalar(gamma, 1.0), p);
      double acc = 0.0;
      for (int eta = 0; eta < g.size(); ++eta) {
        auto inc = translation_increment(g, ell, gamma, eta);
        if (inc) acc += std::pow(*inc, p);
      }
      double expect = std::pow(acc, 1.0 / p);
      worst_single = std::max(
          worst_single, std::abs(res.value - expect) / std::max(1.0, expect));
    }
  };
  for (int k : {1, 2, 5, -7}) single_check(gcirc, ellc, gcirc.idx_of_k(k));
  for (const char* lbl : {"1", "01", "11"})
    single_check(gcant, ellk, gcant.index_of_label(lbl));
  bool single_ok = worst_single <= 1e-10;

  // berezin contraction trials on the circle dual over circle(8)
  auto base = build_circle_space(8);
  auto g8 = GroupModel::circle_dual(8);
  auto ell8 = circle_dual_length(0.2, 8);
  auto action = TranslationAction::circle(g8, base);
  auto lbase = [&base](const Eigen::VectorXcd& v) {
    return holder_seminorm(base, v, 1.0);
  };
  std::vector<int> all_z{0, 1, 2, 3, 4, 5, 6, 7};
  Rng rng(seed + 4);
  int contraction_hits = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    CrossedElement f;
    f.base_dim = base.size();
    for (int k = -4; k <= 4; ++k) {
      if (rng.next_double() < 0.5) continue;
      Eigen::VectorXcd v(base.size());
      for (int i = 0; i < base.size(); ++i)
        v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
      f.coeff[g8.idx_of_k(k)] = v;
    }
    if (f.coeff.empty())
      f.coeff[g8.identity()] = Eigen::VectorXcd::Ones(base.size());
    std::vector<int> F;
    for (int k = -8; k <= 8; ++k)
      if (rng.next_double() < 0.35) F.push_back(g8.idx_of_k(k));
    if (F.empty()) F.push_back(g8.identity());
    double p = (t % 2) ? 2.0 : 4.0;
    auto before = combined_seminorm(g8, action, f, ell8, p, lbase, all_z);
    auto after = combined_seminorm(g8, action, berezin(g8, f, F), ell8, p,
                                   lbase, all_z);
    if (after.value <= before.value + 1e-9) ++contraction_hits;
  }

  auto fourier = fourier_intertwine_check_cantor(2, 2.0, 5, 0.2);
  bool fourier_ok = fourier.max_offdiag <= 1e-8 && fourier.max_diag_err <= 1e-8;

  r.seconds = timer.seconds();
  r.pass = axioms_ok && single_ok && contraction_hits == trials && fourier_ok;
  r.detail = std::string("axioms ") + (axioms_ok ? "ok" : "FAIL") +
             ", single-translation err " + detail::fmt(worst_single) +
             ", berezin " + std::to_string(contraction_hits) + "/" +
             std::to_string(trials) + ", fourier offdiag " +
             detail::fmt(fourier.max_offdiag) + " diag err " +
             detail::fmt(fourier.max_diag_err);
  return r;
}

// 10: closed-formula depth refinement settles to within 5% successive change
//     by depth 8 for the documented dirac pair.
inline CriterionResult truncation_settles() {
  detail::Timer timer;
  CriterionResult r{10, "depth refinement of the closed formula", false, "", 0.0};
  auto phi = TruncationState::from_word({0});
  auto psi = TruncationState::from_word({1});
  std::vector<int> depths{1, 2, 3, 4, 5, 6, 7, 8};
  auto conv = truncation_convergence(2, 2.0, 0.125, phi, psi, depths);
  bool decreasing = true;
  for (std::size_t k = 0; k + 1 < conv.successive_rel_diff.size(); ++k)
    if (conv.successive_rel_diff[k + 1] > conv.successive_rel_diff[k] + 1e-12)
      decreasing = false;
  double last = conv.successive_rel_diff.back();
  r.seconds = timer.seconds();
  r.pass = decreasing && last <= 0.05;
  r.detail = "last successive rel diff " + detail::fmt(last) +
             " (<= 0.05), monotone " + (decreasing ? "yes" : "no") +
             ", rho(depth 8) " + detail::fmt(conv.rho.back());
  return r;
}

}  // namespace acceptance

inline std::vector<CriterionResult> run_acceptance(std::uint64_t seed = 2024) {
  return {
      acceptance::exact_cantor_spectrum(),
      acceptance::weyl_exponent(),
      acceptance::kernel_decomposition(),
      acceptance::mk_triple_agreement(seed),
      acceptance::hs_factor_resolution(seed),
      acceptance::dirac_sandwich(),
      acceptance::schatten_diagnostics(seed),
      acceptance::haar_dyadic_exactness(seed),
      acceptance::crossed_product_suite(seed),
      acceptance::truncation_settles(),
  };
}

}  // namespace fraclap
