#include <catch_amalgamated.hpp>

#include <cmath>

#include "fraclap/crossed.hpp"
#include "fraclap/dyadic.hpp"

using namespace fraclap;
using Catch::Approx;

TEST_CASE("group models") {
  SECTION("circle dual") {
    auto g = GroupModel::circle_dual(5);
    CHECK(g.size() == 11);
    CHECK(g.k_of(g.identity()) == 0);
    CHECK(g.compose(g.idx_of_k(2), g.idx_of_k(3)) == g.idx_of_k(5));
    CHECK(!g.compose(g.idx_of_k(3), g.idx_of_k(3)).has_value());
    CHECK(g.inverse(g.idx_of_k(4)) == g.idx_of_k(-4));
    CHECK(g.depth(g.idx_of_k(-3)) == 3);
    CHECK(g.index_of_label("-2") == g.idx_of_k(-2));
  }
  SECTION("cantor dual is closed under composition") {
    auto g = GroupModel::cantor_dual(3, 4);
    CHECK(g.size() == 81);
    CHECK(g.identity() == 0);
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
      int a = static_cast<int>(rng.next_below(81));
      int b = static_cast<int>(rng.next_below(81));
      int c = static_cast<int>(rng.next_below(81));
      auto ab = g.compose(a, b);
      REQUIRE(ab.has_value());
      // associativity and involutive inversion on the truncation
      CHECK(g.compose(*ab, c) == g.compose(a, *g.compose(b, c)));
      CHECK(g.inverse(g.inverse(a)) == a);
      CHECK(g.compose(a, g.inverse(a)) == g.identity());
    }
    CHECK(g.label(0) == "e");
    CHECK(g.index_of_label("e") == 0);
    int idx = g.index_of_label("102");
    CHECK(g.depth(idx) == 3);
    CHECK(g.label(idx) == "102");
  }
}

TEST_CASE("circle dual length") {
  double alpha = 0.2;
  int R = 64;
  auto ell = circle_dual_length(alpha, R);
  auto g = GroupModel::circle_dual(R);

  SECTION("axioms") {
    CHECK(length_violations(g, ell).empty());
    CHECK(ell(g.identity()) == 0.0);
    CHECK(ell(g.idx_of_k(7)) == ell(g.idx_of_k(-7)));
  }
  SECTION("quadrature against an independent trapezoid refinement") {
    // brute-force oracle for ell(1) and ell(5): adaptive trapezoid on
    // [eps, 1/2] plus the quadratic head estimate, eps small
    for (int k : {1, 5}) {
      double eps = 1e-7;
      // head: (2 pi k)^2/2 * int_0^eps t^{1-2a} dt
      double head = std::pow(2.0 * M_PI * k, 2.0) / 2.0 *
                    std::pow(eps, 2.0 - 2 * alpha) / (2.0 - 2 * alpha);
      long m = 4'000'000;
      double acc = 0.0;
      double lo = eps, hi = 0.5;
      for (long i = 0; i <= m; ++i) {
        double t = lo + (hi - lo) * i / m;
        double v = (1.0 - std::cos(2.0 * M_PI * k * t)) /
                   std::pow(t, 1.0 + 2 * alpha);
        acc += (i == 0 || i == m) ? 0.5 * v : v;
      }
      double oracle = 2.0 * (head + acc * (hi - lo) / m);
      CHECK(ell(g.idx_of_k(k)) == Approx(oracle).epsilon(1e-8));
    }
  }
  SECTION("growth exponent at large radius") {
    auto big = circle_dual_length(alpha, 2048);
    auto gb = GroupModel::circle_dual(2048);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = 512; k <= 2048; k += 32) {
      double x = std::log(static_cast<double>(k));
      double y = std::log(big(gb.idx_of_k(k)));
      sx += x; sy += y; sxx += x * x; sxy += x * y;
      ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(std::abs(slope - 2 * alpha) <= 0.05 * 2 * alpha);
  }
  SECTION("alpha range guard") {
    CHECK_THROWS_AS(circle_dual_length(0.5, 8), ValidationError);
    CHECK_THROWS_AS(circle_dual_length(0.0, 8), ValidationError);
  }
}

TEST_CASE("cantor dual length") {
  int N = 2;
  double lam = 2.0, alpha = 0.2;
  int R = 5;
  auto ell = cantor_dual_length(N, lam, alpha, R);
  auto g = GroupModel::cantor_dual(N, R);

  SECTION("axioms and shell structure") {
    CHECK(length_violations(g, ell).empty());
    CHECK(ell(g.identity()) == 0.0);
    // any depth-1 character has length 1
    CHECK(ell(g.index_of_label("1")) == Approx(1.0));
  }
  SECTION("matches the generator applied to the character") {
    // character of depth m is an exact eigenfunction of the depth-(m+1)
    // finite generator
    for (int m = 1; m <= 3; ++m) {
      auto space = build_cantor_space(N, lam, m + 1);
      auto gen = assemble_generator(space, alpha);
      std::vector<int> digits(static_cast<std::size_t>(R), 0);
      digits[static_cast<std::size_t>(m - 1)] = 1;
      int idx = g.idx_of_digits(digits);
      // realize the character on the finite space
      Eigen::VectorXcd chi(space.size());
      for (int x = 0; x < space.size(); ++x) {
        auto w = cantor_word(x, N, m + 1);
        double phase = 0.0;
        for (int j = 0; j < std::min(m + 1, R); ++j)
          phase += digits[static_cast<std::size_t>(j)] *
                   w[static_cast<std::size_t>(j)];
        chi(x) = std::polar(1.0, 2.0 * M_PI * phase / N);
      }
      Eigen::VectorXcd img = gen.apply(chi);
      for (int x = 0; x < space.size(); ++x)
        CHECK(std::abs(img(x) - ell(idx) * chi(x)) <= 1e-10 * ell(idx));
    }
  }
}

TEST_CASE("translation tails") {
  SECTION("identity increments vanish") {
    auto ell = cantor_dual_length(2, 2.0, 0.2, 4);
    auto g = GroupModel::cantor_dual(2, 4);
    auto rep = translation_tail_report(g, ell, g.identity(), 2.0);
    for (double s : rep.partial_sums) CHECK(s == 0.0);
    CHECK(rep.summability_supported);
  }
  SECTION("circle decay exponent near 2 alpha - 1") {
    double alpha = 0.2;
    auto ell = circle_dual_length(alpha, 512);
    auto g = GroupModel::circle_dual(512);
    auto rep = translation_tail_report(g, ell, g.idx_of_k(1), 2.0);
    REQUIRE(rep.fit_valid);
    CHECK(std::abs(rep.fit_exponent - (2 * alpha - 1.0)) <= 0.1);
    CHECK(rep.summability_supported);  // exponent * p = -1.2 < -1
  }
  SECTION("cantor tails stabilize beyond the element depth") {
    auto ell = cantor_dual_length(2, 2.0, 0.2, 6);
    auto g = GroupModel::cantor_dual(2, 6);
    int gamma = g.index_of_label("01");  // depth 2
    auto rep = translation_tail_report(g, ell, gamma, 2.0);
    CHECK(rep.stabilized_after <= g.depth(gamma));
    CHECK(rep.summability_supported);
    // partial sums constant from the element depth onward
    for (std::size_t d = static_cast<std::size_t>(g.depth(gamma));
         d + 1 < rep.partial_sums.size(); ++d)
      CHECK(rep.partial_sums[d + 1] == rep.partial_sums[d]);
  }
  SECTION("gamma outside the truncation") {
    auto ell = cantor_dual_length(2, 2.0, 0.2, 3);
    auto g = GroupModel::cantor_dual(2, 3);
    CHECK_THROWS_AS(translation_tail_report(g, ell, 8, 2.0), ValidationError);
  }
}

TEST_CASE("group seminorm") {
  double alpha = 0.2;
  auto ell = circle_dual_length(alpha, 16);
  auto g = GroupModel::circle_dual(16);

  SECTION("unit element gives zero") {
    auto f = CrossedElement::unit(g);
    CHECK(group_seminorm(g, ell, f, 2.0).value == Approx(0.0).margin(1e-14));
  }
  SECTION("single translations match the increment norm") {
    for (int k : {1, 3, -5}) {
      auto f = CrossedElement::single_scalar(g.idx_of_k(k), 1.0);
      for (double p : {2.0, 4.0}) {
        auto res = group_seminorm(g, ell, f, p);
        double acc = 0.0;
        for (int eta = 0; eta < g.size(); ++eta) {
          auto inc = translation_increment(g, ell, g.idx_of_k(k), eta);
          if (inc) acc += std::pow(*inc, p);
        }
        CHECK(res.value == Approx(std::pow(acc, 1.0 / p)).epsilon(1e-10));
        CHECK(res.discarded_fraction > 0.0);  // circle translates exit
      }
    }
  }
  SECTION("homogeneity") {
    CrossedElement f;
    f.base_dim = 1;
    f.coeff[g.idx_of_k(1)] = Eigen::VectorXcd::Constant(1, {0.4, 0.1});
    f.coeff[g.idx_of_k(-2)] = Eigen::VectorXcd::Constant(1, {-1.0, 0.7});
    double base = group_seminorm(g, ell, f, 2.0).value;
    double scaled = group_seminorm(g, ell, f.scaled(3.0), 2.0).value;
    CHECK(scaled == Approx(3.0 * base).epsilon(1e-12));
  }
  SECTION("support margin enforced") {
    auto f = CrossedElement::single_scalar(g.idx_of_k(12), 1.0);
    CHECK_THROWS_AS(group_seminorm(g, ell, f, 2.0), ValidationError);
  }
  SECTION("cantor translations never exit") {
    auto ellc = cantor_dual_length(2, 2.0, alpha, 6);
    auto gc = GroupModel::cantor_dual(2, 6);
    auto f = CrossedElement::single_scalar(gc.index_of_label("11"), 1.0);
    auto res = group_seminorm(gc, ellc, f, 2.0);
    CHECK(res.discarded_fraction == 0.0);
    double acc = 0.0;
    for (int eta = 0; eta < gc.size(); ++eta) {
      auto inc = translation_increment(gc, ellc, gc.index_of_label("11"), eta);
      REQUIRE(inc.has_value());
      acc += *inc * *inc;
    }
    CHECK(res.value == Approx(std::sqrt(acc)).epsilon(1e-10));
  }
}

namespace {

std::function<double(const Eigen::VectorXcd&)> holder_base(
    const FiniteSpace& base, double beta) {
  return [&base, beta](const Eigen::VectorXcd& v) {
    return holder_seminorm(base, v, beta);
  };
}

}  // namespace

TEST_CASE("horizontal, vertical, combined") {
  auto base = build_cantor_space(2, 2.0, 4);
  auto g = GroupModel::cantor_dual(2, 4);
  auto ell = cantor_dual_length(2, 2.0, 0.2, 4);
  auto action = TranslationAction::cantor(g, base);
  auto lbase = holder_base(base, 0.75);
  std::vector<int> all_z(static_cast<std::size_t>(base.size()));
  for (int z = 0; z < base.size(); ++z) all_z[static_cast<std::size_t>(z)] = z;
  Rng rng(77);

  SECTION("constant coefficients have zero horizontal seminorm") {
    CrossedElement f;
    f.base_dim = base.size();
    f.coeff[g.identity()] = Eigen::VectorXcd::Constant(base.size(), 2.0);
    f.coeff[g.index_of_label("1")] = Eigen::VectorXcd::Constant(base.size(), -1.0);
    CHECK(horizontal_seminorm(f, lbase).value == 0.0);
  }
  SECTION("single support returns that coefficient's seminorm") {
    Eigen::VectorXcd v(base.size());
    for (int i = 0; i < base.size(); ++i)
      v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
    auto f = CrossedElement::single(g.index_of_label("1"), v);
    CHECK(horizontal_seminorm(f, lbase).value == Approx(lbase(v)));
  }
  SECTION("star preserves the horizontal seminorm under the isometric action") {
    CrossedElement f;
    f.base_dim = base.size();
    for (const char* lbl : {"e", "1", "01"}) {
      Eigen::VectorXcd v(base.size());
      for (int i = 0; i < base.size(); ++i)
        v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
      f.coeff[g.index_of_label(lbl)] = v;
    }
    auto fs = crossed_star(g, f, &action);
    CHECK(horizontal_seminorm(fs, lbase).value ==
          Approx(horizontal_seminorm(f, lbase).value).epsilon(1e-12));
    // star is an involution
    auto fss = crossed_star(g, fs, &action);
    for (const auto& [gamma, v] : f.coeff)
      CHECK((fss.coeff.at(gamma) - v).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("point base vertical seminorm equals the group seminorm") {
    auto gp = GroupModel::cantor_dual(2, 4);
    CrossedElement f;
    f.base_dim = 1;
    f.coeff[gp.index_of_label("1")] = Eigen::VectorXcd::Constant(1, {1.0, 0.5});
    f.coeff[gp.index_of_label("01")] = Eigen::VectorXcd::Constant(1, {-0.3, 0.0});
    double vv = vertical_seminorm(gp, action, f, ell, 2.0, {0});
    double gv = group_seminorm(gp, ell, f, 2.0).value;
    CHECK(vv == Approx(gv).epsilon(1e-12));
  }
  SECTION("vertical seminorm is monotone in the sample set") {
    CrossedElement f;
    f.base_dim = base.size();
    for (const char* lbl : {"1", "01"}) {
      Eigen::VectorXcd v(base.size());
      for (int i = 0; i < base.size(); ++i)
        v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
      f.coeff[g.index_of_label(lbl)] = v;
    }
    double small = vertical_seminorm(g, action, f, ell, 2.0, {0, 3});
    double large = vertical_seminorm(g, action, f, ell, 2.0, all_z);
    CHECK(large >= small - 1e-12);
  }
  SECTION("combined takes the maximum and sees each component") {
    CrossedElement f;
    f.base_dim = base.size();
    Eigen::VectorXcd v(base.size());
    for (int i = 0; i < base.size(); ++i)
      v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
    f.coeff[g.index_of_label("1")] = v;
    auto c = combined_seminorm(g, action, f, ell, 2.0, lbase, all_z);
    CHECK(c.value == Approx(std::max({c.vertical, c.horizontal,
                                      c.horizontal_star})));
    CHECK(c.value >= c.vertical);
    CHECK(c.value >= c.horizontal);
    CHECK(c.value >= c.horizontal_star);
    // unit of the crossed product has zero seminorm
    auto u = CrossedElement::unit(g, base.size());
    auto cu = combined_seminorm(g, action, u, ell, 2.0, lbase, all_z);
    CHECK(cu.value == Approx(0.0).margin(1e-12));
    // single-component dominance: a constant coefficient off the identity
    // contributes only vertically, so scaling it up makes the vertical
    // seminorm the maximizer
    CrossedElement mix;
    mix.base_dim = base.size();
    mix.coeff[g.identity()] = v;  // rough: horizontal sees it, vertical not
    mix.coeff[g.index_of_label("1")] =
        Eigen::VectorXcd::Constant(base.size(), 1.0);
    auto c0 = combined_seminorm(g, action, mix, ell, 2.0, lbase, all_z);
    mix.coeff[g.index_of_label("1")] *= 1e4;
    auto c1 = combined_seminorm(g, action, mix, ell, 2.0, lbase, all_z);
    CHECK(c1.horizontal == Approx(c0.horizontal));  // constants are invisible
    CHECK(c1.vertical == Approx(1e4 * c0.vertical).epsilon(1e-9));
    CHECK(c1.value == Approx(c1.vertical));
  }
}

TEST_CASE("berezin transform") {
  auto g = GroupModel::circle_dual(8);
  SECTION("identity coefficient is untouched; F={e} kills the rest") {
    CrossedElement f;
    f.base_dim = 1;
    f.coeff[g.identity()] = Eigen::VectorXcd::Constant(1, 2.0);
    f.coeff[g.idx_of_k(3)] = Eigen::VectorXcd::Constant(1, 1.0);
    std::vector<int> F{g.identity()};
    auto bf = berezin(g, f, F);
    CHECK(bf.coeff.at(g.identity())(0) == std::complex<double>(2.0, 0.0));
    CHECK(std::abs(bf.coeff.at(g.idx_of_k(3))(0)) == 0.0);
  }
  SECTION("factors lie in [0,1] and equal 1 at the identity") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
      std::vector<int> F;
      for (int k = -8; k <= 8; ++k)
        if (rng.next_double() < 0.4) F.push_back(g.idx_of_k(k));
      if (F.empty()) F.push_back(g.identity());
      CHECK(berezin_factor(g, g.identity(), F) == 1.0);
      for (int k = -4; k <= 4; ++k) {
        double c = berezin_factor(g, g.idx_of_k(k), F);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
      }
    }
  }
  SECTION("empty window rejected") {
    CrossedElement f = CrossedElement::unit(g);
    CHECK_THROWS_AS(berezin(g, f, {}), ValidationError);
  }
  SECTION("contraction for the combined seminorm, 50 random trials") {
    auto base = build_circle_space(8);
    auto gc = GroupModel::circle_dual(8);
    auto ell = circle_dual_length(0.2, 8);
    auto action = TranslationAction::circle(gc, base);
    auto lbase = holder_base(base, 1.0);
    std::vector<int> all_z{0, 1, 2, 3, 4, 5, 6, 7};
    Rng rng(2024);
    for (int t = 0; t < 50; ++t) {
      CrossedElement f;
      f.base_dim = base.size();
      for (int k = -4; k <= 4; ++k) {
        if (rng.next_double() < 0.5) continue;
        Eigen::VectorXcd v(base.size());
        for (int i = 0; i < base.size(); ++i)
          v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
        f.coeff[gc.idx_of_k(k)] = v;
      }
      if (f.coeff.empty()) f.coeff[gc.identity()] = Eigen::VectorXcd::Ones(base.size());
      std::vector<int> F;
      for (int k = -8; k <= 8; ++k)
        if (rng.next_double() < 0.35) F.push_back(gc.idx_of_k(k));
      if (F.empty()) F.push_back(gc.identity());
      double p = (t % 2) ? 2.0 : 4.0;
      auto before = combined_seminorm(gc, action, f, ell, p, lbase, all_z);
      auto after =
          combined_seminorm(gc, action, berezin(gc, f, F), ell, p, lbase, all_z);
      CHECK(after.value <= before.value + 1e-9);
      CHECK(after.horizontal <= before.horizontal + 1e-12);
    }
  }
}

TEST_CASE("fourier conjugation") {
  SECTION("cantor generator diagonalizes with the dual length diagonal") {
    auto chk = fourier_intertwine_check_cantor(2, 2.0, 3, 0.2);
    CHECK(chk.max_offdiag <= 1e-10);
    CHECK(chk.max_diag_err <= 1e-10);
    // trivial character row is zero
    CHECK(chk.diagonal(0) == Approx(0.0).margin(1e-12));
  }
  SECTION("circle generator diagonalizes with the discrete dual values") {
    auto chk = fourier_intertwine_check_circle(16, 0.2, 8);
    CHECK(chk.max_offdiag <= 1e-8);
    CHECK(chk.max_diag_err <= 1e-10);
    CHECK(chk.diagonal(0) == Approx(0.0).margin(1e-12));
    // the continuum quadrature values differ from the finite ones; the gap
    // is reported, not asserted small
    CHECK(chk.max_continuum_gap > 0.0);
    CHECK(std::isfinite(chk.max_continuum_gap));
  }
}

TEST_CASE("evaluation contraction") {
  auto base = build_cantor_space(2, 2.0, 3);
  auto g = GroupModel::cantor_dual(2, 3);
  auto lbase = holder_base(base, 0.75);
  Rng rng(8);
  CrossedElement f;
  f.base_dim = base.size();
  for (const char* lbl : {"e", "1"}) {
    Eigen::VectorXcd v(base.size());
    for (int i = 0; i < base.size(); ++i)
      v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
    f.coeff[g.index_of_label(lbl)] = v;
  }
  // outside the support: 0 <= L_H
  auto chk0 = evaluation_contraction_check(f, g.index_of_label("11"), lbase);
  CHECK(chk0.base_value == 0.0);
  CHECK(chk0.pass);
  // on the support: contraction, with equality for single support
  for (const auto& [gamma, v] : f.coeff) {
    auto chk = evaluation_contraction_check(f, gamma, lbase);
    CHECK(chk.pass);
  }
  auto single = CrossedElement::single(g.index_of_label("1"),
                                       f.coeff.at(g.index_of_label("1")));
  auto chk1 = evaluation_contraction_check(single, g.index_of_label("1"), lbase);
  CHECK(chk1.base_value == Approx(chk1.horizontal_value));
}
