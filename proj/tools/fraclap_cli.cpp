// Command-line front end: spectra, transport metrics, commutator reports,
// crossed-product seminorms, and the full verification suite, with CSV/JSON
// artifacts stamped by config hash and seed.
//
// Exit codes: 0 success, 1 validation failure, 2 numerical non-convergence,
// 3 I/O error.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/acceptance.hpp"
#include "fraclap/commutator.hpp"
#include "fraclap/crossed.hpp"
#include "fraclap/dyadic.hpp"
#include "fraclap/laplacian.hpp"
#include "fraclap/mk.hpp"
#include "fraclap/report.hpp"
#include "fraclap/space.hpp"

namespace {

using namespace fraclap;

std::string out_path(const std::string& path) {
  const char* dir = std::getenv("FRACLAP_OUT_DIR");
  if (!dir || !*dir || path.empty() || path.front() == '/') return path;
  return std::string(dir) + "/" + path;
}

FiniteSpace parse_space(const std::string& spec) {
  if (spec.rfind("cantor:", 0) == 0) {
    int N, L;
    double lam;
    char c1, c2;
    std::istringstream ss(spec.substr(7));
    if (!(ss >> N >> c1 >> lam >> c2 >> L) || c1 != ',' || c2 != ',')
      throw ValidationError("bad cantor spec, expected cantor:N,lambda,L");
    return build_cantor_space(N, lam, L);
  }
  if (spec.rfind("circle:", 0) == 0) {
    int n = std::stoi(spec.substr(7));
    return build_circle_space(n);
  }
  return load_space(spec);
}

State parse_state(const std::string& spec, const FiniteSpace& space) {
  if (spec.rfind("dirac:", 0) == 0)
    return dirac_state(space, spec.substr(6));
  if (spec == "uniform") return uniform_state(space);
  return load_state(spec, space);
}

Eigen::VectorXcd parse_symbol(const std::string& spec, const FiniteSpace& space,
                              std::uint64_t seed) {
  if (spec.rfind("preset:", 0) == 0) {
    std::string rest = spec.substr(7);
    auto colon = rest.find(':');
    std::string name = rest.substr(0, colon);
    double param = colon == std::string::npos ? 0.75
                                              : std::stod(rest.substr(colon + 1));
    if (name == "lacunary") return lacunary_symbol(space, param);
    if (name == "dist") {
      Eigen::VectorXcd h(space.size());
      for (int i = 0; i < space.size(); ++i)
        h(i) = std::pow(space.dist(i, 0), param);
      return h;
    }
    if (name == "random") {
      auto sys = build_dyadic(space);
      auto basis = haar_basis(space, sys);
      Rng rng(seed);
      return random_symbol(space, sys, basis, rng);
    }
    throw ValidationError("unknown symbol preset: " + name);
  }
  // CSV rows: id,re[,im]
  std::ifstream in(spec);
  if (!in) throw IoError("cannot open " + spec);
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(space.size());
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string id;
    double re = 0.0, im = 0.0;
    if (!(ls >> id >> re)) throw IoError(spec + ": bad symbol row: " + line);
    ls >> im;
    if (id == "id") continue;
    h(space.index_of(id)) = {re, im};
  }
  return h;
}

struct Options {
  std::string space_spec;
  double s = 0.75;
  double alpha = 0.125;
  double beta = 0.75;
  double p = 2.0;
  bool exact = false;
  std::string window = "0.25,0.75";
  std::string out;
  std::string svg;
  std::string phi, psi;
  std::string method = "closed";
  std::string symbol;
  std::string kind = "cantor";
  int group_radius = 6;
  int symbols = 2;
  double scale = 2.0;
  std::string crossed_file;
  int trials = 50;
  std::uint64_t seed = 2024;
  int max_iters = 5000;
};

void check_regime(double alpha, double beta) {
  if (!(2.0 * alpha < beta))
    throw ValidationError("regime violation: need 2*alpha < beta, got 2*" +
                          std::to_string(alpha) + " >= " + std::to_string(beta));
  if (!(beta <= 1.0))
    throw ValidationError("regime violation: need beta <= 1, got " +
                          std::to_string(beta));
}

void warn_threshold(const Options& opt, double d_f) {
  try {
    double thr = p_threshold(opt.alpha, opt.beta, d_f);
    if (opt.p <= thr)
      std::cerr << "warning: p = " << opt.p
                << " is at or below the summability threshold p(alpha,beta) = "
                << thr << "\n";
  } catch (const ValidationError&) {
    // regime errors are raised by the command itself
  }
}

int cmd_space_validate(const Options& opt, const RunStamp& stamp) {
  auto space = parse_space(opt.space_spec);
  auto violations = space_violations(space, opt.seed);
  nlohmann::json j;
  j["kind"] = to_string(space.kind());
  j["points"] = space.size();
  j["d_f"] = space.d_f();
  j["d_w"] = std::isinf(space.d_w()) ? -1.0 : space.d_w();
  j["diam"] = space.diam();
  j["total_mass"] = space.total_mass();
  j["violations"] = violations;
  if (!opt.out.empty()) write_json(out_path(opt.out), j, stamp);
  if (!violations.empty()) {
    for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
    return 1;
  }
  std::cout << "space ok: " << space.size() << " points, d_f = " << space.d_f()
            << "\n";
  return 0;
}

int cmd_dyadic_validate(const Options& opt, const RunStamp&) {
  auto space = parse_space(opt.space_spec);
  auto sys = build_dyadic(space);
  auto violations = dyadic_violations(space, sys);
  auto basis = haar_basis(space, sys);
  auto chk = check_haar(space, sys, basis);
  for (const auto& v : violations) std::cerr << "cube violation: " << v << "\n";
  for (const auto& v : chk.violations)
    std::cerr << "wavelet violation: " << v << "\n";
  if (!violations.empty() || !chk.violations.empty()) return 1;
  std::cout << "cube system ok: levels 0.." << sys.max_level() << ", theta "
            << sys.theta() << ", c1 " << sys.c1() << ", C1 " << sys.C1()
            << ", M " << sys.max_children() << ", A " << sys.count_constant()
            << "; wavelet L^p ratios in [" << chk.lp_ratio_min << ", "
            << chk.lp_ratio_max << "]\n";
  return 0;
}

int cmd_dyadic_wavelets(const Options& opt, const RunStamp& stamp) {
  auto space = parse_space(opt.space_spec);
  auto sys = build_dyadic(space);
  auto basis = haar_basis(space, sys);
  CsvWriter csv(out_path(opt.out), stamp,
                {"cube_id", "u", "point_id", "re", "im"});
  for (const auto& hw : basis.wavelets())
    for (int m : sys.cube(hw.cube).members)
      csv.row({std::to_string(hw.cube), std::to_string(hw.u),
               space.point_ids()[static_cast<std::size_t>(m)],
               format_double(hw.values(m).real()),
               format_double(hw.values(m).imag())});
  std::cout << "wrote " << basis.size() << " wavelets\n";
  return 0;
}

SpectralData compute_spectrum(const Options& opt, const FiniteSpace& space) {
  if (opt.exact) {
    if (space.kind() != SpaceKind::Cantor || !space.cantor_params())
      throw ValidationError("--exact requires a cantor space");
    const auto p = *space.cantor_params();
    return cantor_exact_spectrum(p.symbols, p.scale, opt.s, p.depth,
                                 space.total_mass());
  }
  return spectrum(assemble_generator(space, opt.s));
}

int cmd_spectrum(const Options& opt, const RunStamp& stamp) {
  auto space = parse_space(opt.space_spec);
  auto spec = compute_spectrum(opt, space);
  std::vector<std::string> cols{"index", "eigenvalue"};
  for (const auto& id : space.point_ids()) cols.push_back(id);
  CsvWriter csv(out_path(opt.out), stamp, cols);
  for (int i = 0; i < spec.eigenvalues.size(); ++i) {
    std::vector<std::string> row{std::to_string(i),
                                 format_double(spec.eigenvalues(i))};
    for (int x = 0; x < space.size(); ++x) {
      std::complex<double> v = spec.eigenfunctions(x, i);
      row.push_back(std::abs(v.imag()) < 1e-15
                        ? format_double(v.real())
                        : format_double(v.real()) + "+" +
                              format_double(v.imag()) + "i");
    }
    csv.row(row);
  }
  auto chk = kernel_check(spec);
  std::cout << "spectrum: " << spec.eigenvalues.size() << " eigenvalues, gap "
            << chk.lambda1 << ", residual " << spec.residual << "\n";
  return 0;
}

int cmd_weyl(const Options& opt, const RunStamp& stamp) {
  auto space = parse_space(opt.space_spec);
  auto spec = compute_spectrum(opt, space);
  double lo = 0.25, hi = 0.75;
  {
    std::istringstream ss(opt.window);
    char c;
    if (!(ss >> lo >> c >> hi) || c != ',')
      throw ValidationError("bad --window, expected lo,hi fractions");
  }
  auto fit = weyl_fit(spec, lo, hi);
  double expected = 2.0 * opt.s / space.d_f();
  nlohmann::json j;
  j["slope"] = fit.slope;
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r2;
  j["window"] = {fit.lo, fit.hi};
  j["expected_slope"] = expected;
  if (!opt.out.empty()) write_json(out_path(opt.out), j, stamp);
  std::cout << "weyl fit: slope " << fit.slope << " (expected " << expected
            << "), r2 " << fit.r2 << "\n";
  return 0;
}

int cmd_commutator(const Options& opt, const RunStamp& stamp) {
  auto space = parse_space(opt.space_spec);
  auto h = parse_symbol(opt.symbol, space, opt.seed);
  auto op = commutator_matrix(space, opt.alpha, h);
  auto energy = l2_energy_seminorm(space, opt.alpha, h);
  nlohmann::json j;
  j["alpha"] = opt.alpha;
  j["p"] = opt.p;
  std::vector<double> sv(op.singular_values().data(),
                         op.singular_values().data() +
                             op.singular_values().size());
  j["singular_values"] = sv;
  j["schatten_norm"] = schatten_norm(op, opt.p);
  j["operator_norm"] = op.operator_norm();
  j["raw_hs"] = energy.raw_hs;
  j["energy_seminorm"] = energy.energy_path;
  j["hs_energy_ratio"] = energy.ratio;
  if (opt.p >= 2.0) j["mixed_norm_bound"] = gof_bound(space, op, opt.p);
  if (2.0 * opt.alpha < opt.beta && opt.beta <= 1.0) {
    double pmin = p_threshold(opt.alpha, opt.beta, space.d_f());
    auto rep = holder_bound_report(space, opt.alpha, opt.beta,
                                   std::max(opt.p, pmin + 0.5), h);
    j["holder_2alpha"] = rep.hol_2alpha;
    j["holder_beta"] = rep.hol_beta;
    j["p_threshold"] = pmin;
  }
  write_json(out_path(opt.out), j, stamp);
  std::cout << "schatten " << opt.p << "-norm: " << schatten_norm(op, opt.p)
            << "\n";
  return 0;
}

int cmd_mk(const Options& opt, const RunStamp& stamp) {
  auto space = parse_space(opt.space_spec);
  auto phi = parse_state(opt.phi, space);
  auto psi = parse_state(opt.psi, space);
  MKResult res;
  if (opt.method == "closed") {
    auto gen = assemble_generator(space, beta_of_alpha(opt.alpha, space.d_f()));
    res = mk_closed(spectrum(gen), phi, psi);
  } else if (opt.method == "linsolve") {
    res = mk_linsolve(space, opt.alpha, phi, psi);
  } else if (opt.method == "sup") {
    SupConfig cfg;
    cfg.max_iters = opt.max_iters;
    cfg.record_trace = true;
    res = mk_sup(space, opt.alpha, opt.beta, opt.p, phi, psi, cfg);
  } else {
    throw ValidationError("unknown method: " + opt.method);
  }
  nlohmann::json j;
  j["distance"] = res.distance;
  j["method"] = opt.method;
  j["alpha"] = opt.alpha;
  if (opt.method == "sup") {
    j["iterations"] = res.iterations;
    j["converged"] = res.converged;
    j["p"] = opt.p;
  }
  if (!opt.out.empty()) write_json(out_path(opt.out), j, stamp);
  std::cout << "distance (" << opt.method << "): " << format_double(res.distance)
            << "\n";
  if (opt.method == "sup" && !res.converged) {
    std::cerr << "warning: iteration cap reached; value is a lower bound\n";
    return 2;
  }
  return 0;
}

int cmd_dirac_scan(const Options& opt, const RunStamp& stamp) {
  auto space = parse_space(opt.space_spec);
  check_regime(opt.alpha, opt.beta);
  warn_threshold(opt, space.d_f());
  SupConfig cfg;
  cfg.max_iters = opt.max_iters;
  auto scan = dirac_scan(space, opt.alpha, opt.beta, opt.p, cfg);
  CsvWriter csv(out_path(opt.out), stamp,
                {"x", "y", "dist", "rho", "rho_over_d2alpha", "rho_over_dbeta"});
  std::vector<double> xs, ys;
  for (const auto& row : scan.rows) {
    csv.row({space.point_ids()[static_cast<std::size_t>(row.x)],
             space.point_ids()[static_cast<std::size_t>(row.y)],
             format_double(row.dist), format_double(row.rho),
             format_double(row.ratio_2alpha), format_double(row.ratio_beta)});
    xs.push_back(row.dist);
    ys.push_back(row.rho);
  }
  if (!opt.svg.empty())
    write_svg_scatter(out_path(opt.svg), stamp, xs, ys, "distance",
                      "transport distance");
  std::cout << "pairs " << scan.rows.size() << ", min rho/d^beta "
            << scan.min_ratio_beta << ", max rho/d^2alpha "
            << scan.max_ratio_2alpha << "\n";
  return 0;
}

int cmd_crossed_length(const Options& opt, const RunStamp& stamp) {
  GroupModel g = opt.kind == "circle"
                     ? GroupModel::circle_dual(opt.group_radius)
                     : GroupModel::cantor_dual(opt.symbols, opt.group_radius);
  LengthFunction ell =
      opt.kind == "circle"
          ? circle_dual_length(opt.alpha, opt.group_radius)
          : cantor_dual_length(opt.symbols, opt.scale, opt.alpha,
                               opt.group_radius);
  auto violations = length_violations(g, ell);
  CsvWriter csv(out_path(opt.out), stamp, {"label", "depth", "length"});
  for (int idx = 0; idx < g.size(); ++idx)
    csv.row({g.label(idx), std::to_string(g.depth(idx)),
             format_double(ell(idx))});
  for (const auto& v : violations) std::cerr << "violation: " << v << "\n";
  std::cout << "length table over " << g.size() << " elements\n";
  return violations.empty() ? 0 : 1;
}

CrossedElement load_crossed(const std::string& path, const GroupModel& g,
                            const FiniteSpace* base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  CrossedElement f;
  f.base_dim = base ? base->size() : 1;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::string lbl, pt;
    double re = 0.0, im = 0.0;
    if (!(ls >> lbl >> pt >> re)) throw IoError(path + ": bad row: " + line);
    ls >> im;
    int gamma = g.index_of_label(lbl);
    auto [it, inserted] =
        f.coeff.try_emplace(gamma, Eigen::VectorXcd::Zero(f.base_dim));
    int z = 0;
    if (pt != "pt") {
      if (!base)
        throw ValidationError("base point given without --space: " + pt);
      z = base->index_of(pt);
    }
    it->second(z) = {re, im};
  }
  return f;
}

int cmd_crossed_seminorm(const Options& opt, const RunStamp& stamp) {
  GroupModel g = opt.kind == "circle"
                     ? GroupModel::circle_dual(opt.group_radius)
                     : GroupModel::cantor_dual(opt.symbols, opt.group_radius);
  LengthFunction ell =
      opt.kind == "circle"
          ? circle_dual_length(opt.alpha, opt.group_radius)
          : cantor_dual_length(opt.symbols, opt.scale, opt.alpha,
                               opt.group_radius);
  nlohmann::json j;
  j["p"] = opt.p;
  j["radius"] = opt.group_radius;
  if (opt.space_spec.empty()) {
    auto f = load_crossed(opt.crossed_file, g, nullptr);
    auto res = group_seminorm(g, ell, f, opt.p);
    j["group_seminorm"] = res.value;
    j["discarded_fraction"] = res.discarded_fraction;
    // doubled-radius sensitivity, when the doubled model stays desk-size
    bool affordable = opt.kind == "circle"
                          ? opt.group_radius <= 512
                          : std::pow(static_cast<double>(opt.symbols),
                                     2 * opt.group_radius) <= 4096;
    if (affordable) {
      GroupModel g2 = opt.kind == "circle"
                          ? GroupModel::circle_dual(2 * opt.group_radius)
                          : GroupModel::cantor_dual(opt.symbols,
                                                    2 * opt.group_radius);
      LengthFunction ell2 =
          opt.kind == "circle"
              ? circle_dual_length(opt.alpha, 2 * opt.group_radius)
              : cantor_dual_length(opt.symbols, opt.scale, opt.alpha,
                                   2 * opt.group_radius);
      auto f2 = load_crossed(opt.crossed_file, g2, nullptr);
      j["group_seminorm_doubled_radius"] =
          group_seminorm(g2, ell2, f2, opt.p).value;
    }
    write_json(out_path(opt.out), j, stamp);
    std::cout << "group seminorm: " << res.value << " (discarded fraction "
              << res.discarded_fraction << ")\n";
    return 0;
  }
  auto base = parse_space(opt.space_spec);
  auto f = load_crossed(opt.crossed_file, g, &base);
  auto action = opt.kind == "circle" ? TranslationAction::circle(g, base)
                                     : TranslationAction::cantor(g, base);
  auto lbase = [&base, &opt](const Eigen::VectorXcd& v) {
    return holder_seminorm(base, v, opt.beta);
  };
  std::vector<int> all_z(static_cast<std::size_t>(base.size()));
  for (int z = 0; z < base.size(); ++z) all_z[static_cast<std::size_t>(z)] = z;
  auto c = combined_seminorm(g, action, f, ell, opt.p, lbase, all_z);
  j["combined"] = c.value;
  j["vertical"] = c.vertical;
  j["horizontal"] = c.horizontal;
  j["horizontal_star"] = c.horizontal_star;
  write_json(out_path(opt.out), j, stamp);
  std::cout << "combined seminorm: " << c.value << " (V " << c.vertical
            << ", H " << c.horizontal << ", H* " << c.horizontal_star << ")\n";
  return 0;
}

int cmd_crossed_berezin(const Options& opt, const RunStamp& stamp) {
  auto base = build_circle_space(8);
  auto g = GroupModel::circle_dual(8);
  auto ell = circle_dual_length(std::min(opt.alpha, 0.45), 8);
  auto action = TranslationAction::circle(g, base);
  auto lbase = [&base](const Eigen::VectorXcd& v) {
    return holder_seminorm(base, v, 1.0);
  };
  std::vector<int> all_z{0, 1, 2, 3, 4, 5, 6, 7};
  Rng rng(opt.seed);
  int ok = 0;
  for (int t = 0; t < opt.trials; ++t) {
    CrossedElement f;
    f.base_dim = base.size();
    for (int k = -4; k <= 4; ++k) {
      if (rng.next_double() < 0.5) continue;
      Eigen::VectorXcd v(base.size());
      for (int i = 0; i < base.size(); ++i)
        v(i) = std::complex<double>(rng.next_normal(), rng.next_normal());
      f.coeff[g.idx_of_k(k)] = v;
    }
    if (f.coeff.empty())
      f.coeff[g.identity()] = Eigen::VectorXcd::Ones(base.size());
    std::vector<int> F;
    for (int k = -8; k <= 8; ++k)
      if (rng.next_double() < 0.35) F.push_back(g.idx_of_k(k));
    if (F.empty()) F.push_back(g.identity());
    double p = (t % 2) ? 2.0 : 4.0;
    auto before = combined_seminorm(g, action, f, ell, p, lbase, all_z);
    auto after =
        combined_seminorm(g, action, berezin(g, f, F), ell, p, lbase, all_z);
    if (after.value <= before.value + 1e-9) ++ok;
  }
  nlohmann::json j;
  j["trials"] = opt.trials;
  j["contraction_held"] = ok;
  if (!opt.out.empty()) write_json(out_path(opt.out), j, stamp);
  std::cout << "berezin contraction held in " << ok << "/" << opt.trials
            << " trials\n";
  return ok == opt.trials ? 0 : 1;
}

int cmd_verify_all(const Options& opt, const RunStamp& stamp) {
  auto results = run_acceptance(opt.seed);
  // an explicitly requested space gets an extra kernel spot check
  if (!opt.space_spec.empty()) {
    CriterionResult extra{0, "kernel check on " + opt.space_spec, false, "", 0.0};
    auto space = parse_space(opt.space_spec);
    auto chk = kernel_check(spectrum(assemble_generator(space, opt.s)));
    extra.pass = chk.pass;
    extra.detail = "lambda_1 = " + format_double(chk.lambda1);
    results.push_back(extra);
  }
  int failures = 0;
  nlohmann::json items = nlohmann::json::array();
  for (const auto& r : results) {
    std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << " -- "
              << r.detail << "\n";
    if (!r.pass) ++failures;
    items.push_back({{"number", r.number},
                     {"name", r.name},
                     {"pass", r.pass},
                     {"detail", r.detail},
                     {"seconds", r.seconds}});
  }
  std::cout << (results.size() - failures) << "/" << results.size()
            << " checks passed\n";
  if (!opt.out.empty()) {
    nlohmann::json j;
    j["results"] = items;
    write_json(out_path(opt.out), j, stamp);
  }
  return failures == 0 ? 0 : 1;
}

int dispatch(std::vector<std::string> args);

int cmd_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("command"))
    throw ValidationError("config file is missing the command field");
  std::vector<std::string> args;
  std::string cmd = j["command"].get<std::string>();
  // two-word subcommands are written with a dash in config files
  if (cmd.rfind("crossed-", 0) == 0 || cmd.rfind("dyadic-", 0) == 0) {
    auto dash = cmd.find('-');
    args.push_back(cmd.substr(0, dash));
    args.push_back(cmd.substr(dash + 1));
  } else {
    args.push_back(cmd);
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "command") continue;
    if (it.value().is_boolean()) {
      if (it.value().get<bool>()) args.push_back("--" + it.key());
      continue;
    }
    args.push_back("--" + it.key());
    if (it.value().is_string())
      args.push_back(it.value().get<std::string>());
    else
      args.push_back(it.value().dump());
  }
  return dispatch(std::move(args));
}

int dispatch(std::vector<std::string> args) {
  CLI::App app{"fractional generators, transport metrics, and crossed-product "
               "seminorms on finite metric-measure spaces"};
  app.require_subcommand(0, 1);
  Options opt;
  std::string config_path;
  app.add_option("--config", config_path,
                 "declarative JSON run file covering any subcommand");

  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--space", opt.space_spec,
                    "path | cantor:N,lambda,L | circle:n");
    cmd->add_option("--seed", opt.seed, "64-bit run seed");
  };

  auto* sv = app.add_subcommand("space-validate", "check metric-measure axioms");
  add_common(sv);
  sv->add_option("--out", opt.out, "JSON report path");

  auto* dy = app.add_subcommand("dyadic", "cube systems and wavelets");
  auto* dyv = dy->add_subcommand("validate", "check cube and wavelet axioms");
  add_common(dyv);
  auto* dyw = dy->add_subcommand("wavelets", "emit the wavelet table");
  add_common(dyw);
  dyw->add_option("--out", opt.out, "CSV output path")->required();

  auto* sp = app.add_subcommand("spectrum", "eigendecomposition of the generator");
  add_common(sp);
  sp->add_option("--s", opt.s, "generator order");
  sp->add_flag("--exact", opt.exact, "closed-form cantor path");
  sp->add_option("--out", opt.out, "CSV output path")->required();

  auto* wy = app.add_subcommand("weyl", "log-log eigenvalue growth fit");
  add_common(wy);
  wy->add_option("--s", opt.s, "generator order");
  wy->add_flag("--exact", opt.exact, "closed-form cantor path");
  wy->add_option("--window", opt.window, "index window fractions lo,hi");
  wy->add_option("--out", opt.out, "JSON output path");

  auto* cm = app.add_subcommand("commutator", "symbol commutator report");
  cm->set_help_flag("--help", "print help");  // frees -h for the symbol option
  add_common(cm);
  cm->add_option("--alpha", opt.alpha, "commutator order");
  cm->add_option("--beta", opt.beta, "holder exponent for the sandwich");
  cm->add_option("--h", opt.symbol, "symbol file | preset:lacunary[:beta] | "
                                    "preset:dist[:beta] | preset:random")
      ->required();
  cm->add_option("--p", opt.p, "schatten exponent");
  cm->add_option("--out", opt.out, "JSON output path")->required();

  auto* mk = app.add_subcommand("mk", "transport distance between two states");
  add_common(mk);
  mk->add_option("--alpha", opt.alpha, "base order");
  mk->add_option("--beta", opt.beta, "holder exponent (sup oracle)");
  mk->add_option("--p", opt.p, "constraint exponent (sup oracle)");
  mk->add_option("--phi", opt.phi, "state file | dirac:id | uniform")->required();
  mk->add_option("--psi", opt.psi, "state file | dirac:id | uniform")->required();
  mk->add_option("--method", opt.method, "closed | linsolve | sup");
  mk->add_option("--max-iters", opt.max_iters, "sup iteration cap");
  mk->add_option("--out", opt.out, "JSON output path");

  auto* ds = app.add_subcommand("dirac-scan", "pairwise dirac distances");
  add_common(ds);
  ds->add_option("--alpha", opt.alpha, "base order");
  ds->add_option("--beta", opt.beta, "holder exponent");
  ds->add_option("--p", opt.p, "2 for the closed path, else sup oracle");
  ds->add_option("--max-iters", opt.max_iters, "sup iteration cap");
  ds->add_option("--out", opt.out, "CSV output path")->required();
  ds->add_option("--svg", opt.svg, "scatter plot path");

  auto* cr = app.add_subcommand("crossed", "dual groups and their seminorms");
  auto* crl = cr->add_subcommand("length", "dual length-function table");
  crl->add_option("--kind", opt.kind, "circle | cantor");
  crl->add_option("--alpha", opt.alpha, "generator order");
  crl->add_option("--R", opt.group_radius, "truncation radius");
  crl->add_option("--N", opt.symbols, "cantor symbol count");
  crl->add_option("--lambda", opt.scale, "cantor metric scale");
  crl->add_option("--seed", opt.seed, "64-bit run seed");
  crl->add_option("--out", opt.out, "CSV output path")->required();
  auto* crs = cr->add_subcommand("seminorm", "seminorm of a crossed element");
  crs->add_option("--kind", opt.kind, "circle | cantor");
  crs->add_option("--alpha", opt.alpha, "generator order");
  crs->add_option("--beta", opt.beta, "base holder exponent");
  crs->add_option("--R", opt.group_radius, "truncation radius");
  crs->add_option("--N", opt.symbols, "cantor symbol count");
  crs->add_option("--lambda", opt.scale, "cantor metric scale");
  crs->add_option("--p", opt.p, "schatten exponent");
  crs->add_option("--f", opt.crossed_file,
                  "rows: label, base point id or pt, re, im")
      ->required();
  crs->add_option("--space", opt.space_spec, "base space (combined seminorm)");
  crs->add_option("--seed", opt.seed, "64-bit run seed");
  crs->add_option("--out", opt.out, "JSON output path")->required();
  auto* crb = cr->add_subcommand("berezin-test", "contraction trials");
  crb->add_option("--trials", opt.trials, "trial count");
  crb->add_option("--alpha", opt.alpha, "generator order");
  crb->add_option("--seed", opt.seed, "64-bit run seed");
  crb->add_option("--out", opt.out, "JSON output path");

  auto* va = app.add_subcommand("verify-all", "run the acceptance suite");
  add_common(va);
  va->add_option("--s", opt.s, "order for the extra kernel check");
  va->add_option("--out", opt.out, "JSON summary path");

  std::vector<const char*> argv;
  argv.push_back("fraclap");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  std::string canonical;
  for (const auto& a : args) canonical += a + " ";
  RunStamp stamp = RunStamp::make(canonical, opt.seed);

  if (!config_path.empty()) return cmd_config(config_path);

  try {
    if (sv->parsed()) return cmd_space_validate(opt, stamp);
    if (dy->parsed()) {
      if (dyv->parsed()) return cmd_dyadic_validate(opt, stamp);
      if (dyw->parsed()) return cmd_dyadic_wavelets(opt, stamp);
      throw ValidationError("dyadic requires a subcommand");
    }
    if (sp->parsed()) return cmd_spectrum(opt, stamp);
    if (wy->parsed()) return cmd_weyl(opt, stamp);
    if (cm->parsed()) return cmd_commutator(opt, stamp);
    if (mk->parsed()) return cmd_mk(opt, stamp);
    if (ds->parsed()) return cmd_dirac_scan(opt, stamp);
    if (cr->parsed()) {
      if (crl->parsed()) return cmd_crossed_length(opt, stamp);
      if (crs->parsed()) return cmd_crossed_seminorm(opt, stamp);
      if (crb->parsed()) return cmd_crossed_berezin(opt, stamp);
      throw ValidationError("crossed requires a subcommand");
    }
    if (va->parsed()) return cmd_verify_all(opt, stamp);
    std::cout << app.help();
    return 0;
  } catch (const ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  try {
    return dispatch(std::move(args));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
