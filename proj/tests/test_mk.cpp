#include <catch_amalgamated.hpp>

#include <cmath>

#include "fraclap/mk.hpp"

using namespace fraclap;
using Catch::Approx;

namespace {

State random_state(const FiniteSpace& s, Rng& rng) {
  State st;
  st.probs.resize(s.size());
  for (int i = 0; i < s.size(); ++i) st.probs(i) = rng.next_double() + 1e-9;
  st.probs /= st.probs.sum();
  return st;
}

}  // namespace

TEST_CASE("two-point distance is 2 on all three routes") {
  auto s = build_cantor_space(2, 2.0, 1);
  double alpha = 0.25;  // beta(alpha) = 1; any order works here since d = 1
  auto phi = dirac_state(s, 0);
  auto psi = dirac_state(s, 1);

  auto gen = assemble_generator(s, beta_of_alpha(alpha, s.d_f()));
  auto spec = spectrum(gen);
  auto closed = mk_closed(spec, phi, psi);
  CHECK(closed.distance == Approx(2.0).epsilon(1e-10));

  auto lin = mk_linsolve(s, alpha, phi, psi);
  CHECK(lin.distance == Approx(2.0).epsilon(1e-10));

  auto sup = mk_sup(s, alpha, 1.0, 2.0, phi, psi);
  CHECK(sup.distance == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("identical states give zero") {
  auto s = build_cantor_space(2, 2.0, 3);
  double alpha = 0.125;
  auto gen = assemble_generator(s, beta_of_alpha(alpha, s.d_f()));
  auto spec = spectrum(gen);
  Rng rng(5);
  auto st = random_state(s, rng);
  CHECK(mk_closed(spec, st, st).distance == 0.0);
  CHECK(mk_linsolve(s, alpha, st, st).distance == 0.0);
  CHECK(mk_sup(s, alpha, 0.75, 2.0, st, st).distance == 0.0);
  auto dx = dirac_state(s, 2);
  CHECK(mk_closed(spec, dx, dx).distance == 0.0);
}

TEST_CASE("closed and linear-solve routes agree") {
  auto s = build_cantor_space(2, 2.0, 6);
  double alpha = 0.125;
  auto gen = assemble_generator(s, beta_of_alpha(alpha, s.d_f()));
  auto spec = spectrum(gen);
  Rng rng(42);
  for (int t = 0; t < 50; ++t) {
    auto phi = random_state(s, rng);
    auto psi = random_state(s, rng);
    double a = mk_closed(spec, phi, psi).distance;
    double b = mk_linsolve(s, alpha, phi, psi).distance;
    CHECK(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("closed formula is a metric on states") {
  auto s = build_cantor_space(2, 2.0, 4);
  double alpha = 0.125;
  auto gen = assemble_generator(s, beta_of_alpha(alpha, s.d_f()));
  auto spec = spectrum(gen);
  Rng rng(9);
  for (int t = 0; t < 1000; ++t) {
    auto a = random_state(s, rng);
    auto b = random_state(s, rng);
    auto c = random_state(s, rng);
    double ab = mk_closed(spec, a, b).distance;
    double ba = mk_closed(spec, b, a).distance;
    double bc = mk_closed(spec, b, c).distance;
    double ac = mk_closed(spec, a, c).distance;
    CHECK(ab == Approx(ba).margin(1e-12));
    CHECK(ac <= ab + bc + 1e-10);
  }
}

TEST_CASE("sup oracle") {
  auto s = build_cantor_space(2, 2.0, 6);
  double alpha = 0.125;
  auto gen = assemble_generator(s, beta_of_alpha(alpha, s.d_f()));
  auto spec = spectrum(gen);
  Rng rng(12);

  SECTION("p=2 reaches the closed value on dirac pairs") {
    for (int t = 0; t < 10; ++t) {
      int x = static_cast<int>(rng.next_below(64));
      int y = static_cast<int>(rng.next_below(64));
      if (x == y) y = (y + 1) % 64;
      auto phi = dirac_state(s, x), psi = dirac_state(s, y);
      double closed = mk_closed(spec, phi, psi).distance;
      auto sup = mk_sup(s, alpha, 0.75, 2.0, phi, psi);
      CHECK(sup.distance <= closed * (1.0 + 1e-9));
      CHECK(sup.distance >= 0.99 * closed);
    }
  }
  SECTION("feasible ascent: iterate values stay below the closed value") {
    auto phi = dirac_state(s, 3), psi = dirac_state(s, 40);
    double closed = mk_closed(spec, phi, psi).distance;
    SupConfig cfg;
    cfg.record_trace = true;
    auto sup = mk_sup(s, alpha, 0.75, 2.0, phi, psi, cfg);
    REQUIRE(!sup.trace.empty());
    for (std::size_t i = 0; i < sup.trace.size(); ++i) {
      CHECK(sup.trace[i] <= closed + 1e-9);
      if (i) CHECK(sup.trace[i] >= sup.trace[i - 1] - 1e-12);
    }
  }
  SECTION("homogeneity in the constraint radius") {
    auto phi = dirac_state(s, 5), psi = dirac_state(s, 21);
    SupConfig cfg;
    auto full = mk_sup(s, alpha, 0.75, 4.0, phi, psi, cfg);
    cfg.radius = 0.5;
    auto half = mk_sup(s, alpha, 0.75, 4.0, phi, psi, cfg);
    CHECK(half.distance == Approx(0.5 * full.distance).epsilon(1e-8));
  }
  SECTION("p=4 runs deterministically and returns a positive lower bound") {
    auto s4 = build_cantor_space(2, 2.0, 4);
    auto phi = dirac_state(s4, 0), psi = dirac_state(s4, 9);
    auto sup = mk_sup(s4, alpha, 0.75, 4.0, phi, psi);
    CHECK(sup.distance > 0.0);
    auto again = mk_sup(s4, alpha, 0.75, 4.0, phi, psi);
    CHECK(again.distance == Approx(sup.distance).epsilon(1e-12));
  }
  SECTION("p guard") {
    auto phi = dirac_state(s, 0), psi = dirac_state(s, 1);
    CHECK_THROWS_AS(mk_sup(s, alpha, 0.75, 0.5, phi, psi), ValidationError);
  }
}

TEST_CASE("dirac scan") {
  auto s = build_cantor_space(2, 2.0, 5);
  double alpha = 0.125, beta = 0.75;
  auto scan = dirac_scan(s, alpha, beta, 2.0);
  REQUIRE(scan.rows.size() == 32 * 31 / 2);
  CHECK(scan.min_ratio_beta > 0.0);
  CHECK(std::isfinite(scan.max_ratio_2alpha));
  CHECK(scan.max_ratio_2alpha > 0.0);
  // symmetry of the closed formula; spot-check one pair both ways
  auto gen = assemble_generator(s, beta_of_alpha(alpha, s.d_f()));
  auto spec = spectrum(gen);
  auto a = mk_closed(spec, dirac_state(s, 2), dirac_state(s, 17)).distance;
  auto b = mk_closed(spec, dirac_state(s, 17), dirac_state(s, 2)).distance;
  CHECK(a == Approx(b).margin(1e-12));
  CHECK_THROWS_AS(dirac_scan(s, 0.4, 0.75, 2.0), ValidationError);
}

TEST_CASE("depth refinement of the closed formula") {
  double alpha = 0.125;

  SECTION("equal states at every depth") {
    auto u = TruncationState::from_vector(1, Eigen::VectorXd::Constant(2, 0.5));
    auto conv = truncation_convergence(2, 2.0, alpha, u, u, {1, 2, 3, 4});
    for (double r : conv.rho) CHECK(r == 0.0);
  }
  SECTION("dirac pair at separation one stabilizes") {
    auto phi = TruncationState::from_word({0});
    auto psi = TruncationState::from_word({1});
    std::vector<int> depths{1, 2, 3, 4, 5, 6, 7, 8};
    auto conv = truncation_convergence(2, 2.0, alpha, phi, psi, depths);
    REQUIRE(conv.rho.size() == 8);
    // monotone refinement: contributions of new levels are nonnegative
    for (std::size_t k = 0; k + 1 < conv.rho.size(); ++k)
      CHECK(conv.rho[k + 1] >= conv.rho[k] - 1e-12);
    // successive differences decreasing, within 5% by depth 8
    for (std::size_t k = 0; k + 1 < conv.successive_rel_diff.size(); ++k)
      CHECK(conv.successive_rel_diff[k + 1] <=
            conv.successive_rel_diff[k] + 1e-12);
    CHECK(conv.successive_rel_diff.back() <= 0.05);
    // independent oracle: level-by-level closed sum (contribution 4/ev at
    // level 0, then one wavelet per branch of squared value 2^n at each
    // deeper level n)
    double acc = 0.0;
    std::vector<double> expect;
    for (int L = 1; L <= 8; ++L) {
      int n = L - 1;
      double ev = cantor_level_eigenvalue(2, 2.0, 0.75, n);
      acc += (n == 0 ? 4.0 : 2.0 * std::pow(2.0, n)) / ev;
      expect.push_back(std::sqrt(acc));
    }
    for (std::size_t k = 0; k < conv.rho.size(); ++k)
      CHECK(conv.rho[k] == Approx(expect[k]).epsilon(1e-10));
  }
  SECTION("uniform splitting of cell states stabilizes exactly") {
    Eigen::VectorXd base(2);
    base << 1.0, 0.0;
    auto phi = TruncationState::from_vector(1, base);
    auto psi = TruncationState::from_vector(1, Eigen::VectorXd::Constant(2, 0.5));
    auto conv = truncation_convergence(2, 2.0, alpha, phi, psi, {1, 2, 3, 4, 5});
    // deeper wavelets pair to zero against uniformly split cell masses
    for (std::size_t k = 1; k < conv.rho.size(); ++k)
      CHECK(conv.rho[k] == Approx(conv.rho[0]).epsilon(1e-12));
  }
}

TEST_CASE("guard paths") {
  auto s = build_cantor_space(2, 2.0, 2);
  SpectralData broken;
  broken.eigenvalues = Eigen::VectorXd::Zero(4);
  broken.eigenfunctions = Eigen::MatrixXcd::Identity(4, 4);
  auto phi = dirac_state(s, 0), psi = dirac_state(s, 1);
  CHECK_THROWS_AS(mk_closed(broken, phi, psi), ValidationError);
}
