// nemrelief: solve, verify and draw quasi-uniform relief of planar nematic frustration.
// Exit codes: 0 ok, 2 verdict failure, 1 error.

#include "figures.hpp"

#include <nemrelief/compatibility.hpp>

#include "../vendor/CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace nemrelief;
namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0, exit_error = 1, exit_verdict = 2;

struct Params {
  std::string scenario;
  std::string profile;
  double bstar = 2;
  double m = 1;
  std::string c0 = "0";
  double amp = pi / 10, k = pi;
  double slope = -pi / 4, offset = 0;
  double support_lo = -std::numeric_limits<double>::infinity(), support_hi = std::numeric_limits<double>::infinity();
  double phi = 0, alpha = pi / 4;
  int sign = 1;
  double gz = 1, gzz = 0.5;
  std::string table;
  std::string csv;
  std::vector<double> window;
  std::vector<int> grid;
  std::string out = ".";
  std::string name;
  double tol = -1;
  bool extend_inside = false;
  double K11 = 1, K22 = 1, K33 = 1, K24 = 0;
  std::string curve = "line";
  std::string config;
};

double c0_value(const Params& p) {
  if (p.c0 == "auto") return circle::auto_c0(p.m, p.bstar);
  size_t used = 0;
  double v = 0;
  try {
    v = std::stod(p.c0, &used);
  } catch (const std::exception&) {
    used = std::string::npos;
  }
  if (used != p.c0.size()) throw std::invalid_argument("--c0 must be a number or 'auto'");
  return v;
}

Rect window_of(const Params& p, Rect dflt) {
  if (p.window.empty()) return dflt;
  if (p.window.size() != 4) throw std::invalid_argument("--window takes x_min,x_max,y_min,y_max");
  Rect r{p.window[0], p.window[1], p.window[2], p.window[3]};
  if (!(r.width() > 0) || !(r.height() > 0)) throw std::invalid_argument("--window is empty");
  return r;
}

std::pair<int, int> grid_of(const Params& p, std::pair<int, int> dflt) {
  if (p.grid.empty()) return dflt;
  if (p.grid.size() != 2 || p.grid[0] < 2 || p.grid[1] < 2) throw std::invalid_argument("--grid takes nx,ny >= 2");
  return {p.grid[0], p.grid[1]};
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return f;
}

halfplane::LineFrustration line_profile(const Params& p) {
  const std::string& n = p.profile.empty() ? std::string("tanh") : p.profile;
  if (n == "tanh") return halfplane::tanh_profile(p.bstar);
  if (n == "quintic") return halfplane::quintic_profile(p.bstar);
  if (n == "hybrid") return halfplane::hybrid_profile(p.bstar);
  if (n == "sinusoidal") return halfplane::sinusoidal_profile(p.amp, p.k);
  if (n == "constant") return halfplane::constant_profile(p.phi);
  if (n == "linear") return halfplane::linear_profile(p.slope, p.offset, {p.support_lo, p.support_hi});
  if (n == "table") {
    if (p.table.empty()) throw std::invalid_argument("profile 'table' needs --table FILE");
    auto f = open_in(p.table);
    return halfplane::read_profile_csv(f);
  }
  throw std::invalid_argument("unknown line profile '" + n + "'");
}

circle::CircleFrustration circle_profile(const Params& p) {
  const std::string& n = p.profile.empty() ? std::string("frank") : p.profile;
  if (n == "frank") return circle::frank_profile(p.m, c0_value(p));
  if (n == "perturbed") return circle::perturbed_profile(p.m, c0_value(p));
  if (n == "table") {
    if (p.table.empty()) throw std::invalid_argument("profile 'table' needs --table FILE");
    auto f = open_in(p.table);
    return circle::read_profile_csv(f);
  }
  throw std::invalid_argument("unknown circle profile '" + n + "'");
}

circle::CircleSolution circle_solution(const Params& p) {
  circle::CircleSolveOptions o;
  o.extend_inside = p.extend_inside;
  return circle::CircleSolution(circle_profile(p), p.bstar, o);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_artifact(const Params& p, const std::string& file, const std::string& text) {
  fs::create_directories(p.out);
  const auto path = (fs::path(p.out) / file).string();
  render::write_text_file(path, text);
  std::cout << "wrote=" << path << '\n';
}

std::string csv_text(const std::vector<render::GridSample>& rows) {
  std::ostringstream os;
  render::emit_csv(rows, os);
  return os.str();
}

// A field to verify or evaluate, with a default probe window.
struct NamedField {
  FieldSampler field;
  Rect window;
  std::function<double(double, double)> f;  // empty when not known in closed form
};

NamedField scenario_field(const Params& p) {
  const std::string& s = p.scenario;
  if (s == "uniform") return {uniform_field(p.phi), {-1, 1, -1, 1}, {}};
  if (s == "hedgehog") return {hedgehog_field(), {0.5, 2.5, 0.5, 2.5}, {}};
  if (s == "pure_bend") return {pure_bend_field(), {0.5, 2.5, 0.5, 2.5}, {}};
  if (s == "planar_splay") return {planar_splay_field(), {0.5, 2.5, 0.5, 2.5}, {}};
  if (s == "spiral") return {spiral_field(p.alpha), {0.5, 2.5, 0.5, 2.5}, {}};
  if (s == "single_variable") return {single_variable_field([](double x) { return x; }), {-1, 1, -1, 1}, {}};
  if (s == "halfplane") {
    auto hp = std::make_shared<halfplane::HalfPlaneSolution>(line_profile(p), p.bstar);
    if (!hp->relievable() && !hp->constant())
      throw std::invalid_argument("halfplane scenario is not relievable: " +
                                  std::string(to_string(hp->report().verdict)));
    const Rect w = hp->side() == halfplane::Side::upper ? Rect{-2, 2, 0.1, 3} : Rect{-2, 2, -3, -0.1};
    return {hp->sampler(), w, [hp](double x, double y) { return hp->f(x, y); }};
  }
  if (s == "circle") {
    auto cs = std::make_shared<circle::CircleSolution>(circle_solution(p));
    return {cs->sampler(), {-3, 3, -3, 3}, [cs](double x, double y) { return cs->f(x, y); }};
  }
  throw std::invalid_argument("unknown scenario '" + s + "'");
}

// ---- subcommands

int run_halfplane(const Params& p) {
  halfplane::HalfPlaneSolution hp(line_profile(p), p.bstar);
  const auto& r = hp.report();
  std::cout << "profile=" << hp.frustration().tag << "\nbstar=" << num(p.bstar) << "\nverdict=" << to_string(r.verdict)
            << "\nmonotonicity=" << to_string(r.monotonicity) << "\nphi_min=" << num(r.phi_min)
            << "\nphi_max=" << num(r.phi_max) << "\nbranch=" << r.branch
            << "\nendpoint_contact=" << (r.endpoint_contact ? "true" : "false") << '\n';
  if (r.first_violation) std::cout << "first_violation=" << num(*r.first_violation) << '\n';
  const bool ok = hp.relievable() || hp.constant();
  const bool upper = hp.side() == halfplane::Side::upper;
  const Rect view = window_of(p, upper ? Rect{-3, 3, 0, 4} : Rect{-3, 3, -4, 0});
  const auto [nx, ny] = grid_of(p, {41, 28});
  const std::string name = p.name.empty() ? "halfplane_" + hp.frustration().tag : p.name;

  render::Scene s;
  s.viewport = view;
  std::vector<double> x0;
  for (int k = 0; k <= 24; ++k) x0.push_back(view.x_min + view.width() * k / 24);
  figures::add_halfplane_fan(s, hp, x0);
  if (ok) {
    std::vector<Vec2> seeds;
    for (int k = 1; k < 10; ++k) seeds.emplace_back(view.x_min + view.width() * k / 10, 0.5 * (view.y_min + view.y_max));
    figures::add_streamlines(s, hp.sampler(), seeds, 0.02, 2 * view.diagonal());
    figures::add_glyphs(s, hp.sampler(), 15, 10);
  } else {
    const auto cov = halfplane::coverage_map(view, hp.frustration(), p.bstar, 2 * nx, 2 * ny);
    std::cout << "multi_covered_cells=" << cov.cells_with(2) << '\n';
  }
  s.layer("boundary").lines.push_back({Vec2(view.x_min, 0), Vec2(view.x_max, 0)});
  write_artifact(p, name + ".svg", figures::svg_of(s));
  if (!ok) return exit_verdict;
  auto fval = [&](double x, double y) { return hp.angle(x, y) ? hp.f(x, y) : std::nan(""); };
  write_artifact(p, name + ".csv", csv_text(render::sample_grid(hp.sampler(), fval, view, nx, ny)));
  return exit_ok;
}

int run_circle(const Params& p) {
  const auto cs = circle_solution(p);
  const auto& fr = cs.frustration();
  const auto& d = cs.domain();
  std::cout << "profile=" << to_string(fr.kind) << "\nm=" << num(circle::winding_charge(fr)) << "\nc0=" << num(fr.c0)
            << "\nbstar=" << num(p.bstar) << "\ntangency_count=" << d.tangency.size() << '\n';
  for (double t : d.tangency) std::cout << "tangency=" << num(t) << " tangency_over_pi=" << num(t / pi) << '\n';
  std::cout << "domain=" << to_string(d.kind) << "\nbounded=" << (d.bounded() ? "true" : "false")
            << "\nresonant=" << (cs.resonant() ? "true" : "false")
            << "\nradial_points=" << cs.degeneracies().radial.size() << '\n';
  const Rect view = window_of(p, {-4, 4, -4, 4});
  const auto [nx, ny] = grid_of(p, {41, 41});
  const std::string name = p.name.empty() ? "circle_m" + figures::fmt_m(p.m) : p.name;

  render::Scene s;
  s.viewport = view;
  figures::add_domain(s, cs);
  figures::add_tangent_lines(s, cs);
  s.layer("boundary").lines.push_back(figures::circle_polyline());
  figures::add_circle_fan(s, cs, 48, p.extend_inside);
  std::vector<Vec2> seeds;
  for (int k = 0; k < 12; ++k) seeds.emplace_back(2.2 * std::cos(pi / 12 + k * pi / 6), 2.2 * std::sin(pi / 12 + k * pi / 6));
  figures::add_streamlines(s, cs.sampler(), seeds, 0.02, 2 * view.diagonal());
  figures::add_glyphs(s, cs.sampler(), 16, 16);
  write_artifact(p, name + ".svg", figures::svg_of(s));
  auto fval = [&](double x, double y) { return cs.angle(x, y) ? cs.f(x, y) : std::nan(""); };
  write_artifact(p, name + ".csv", csv_text(render::sample_grid(cs.sampler(), fval, view, nx, ny)));
  return exit_ok;
}

int run_verify(const Params& p) {
  const double tol = p.tol > 0 ? p.tol : 1e-5;
  QUReport rep;
  if (!p.csv.empty()) {
    auto f = open_in(p.csv);
    const auto rows = render::parse_csv(f);
    std::vector<std::array<double, 5>> v;
    // tabulated rows carry the sign of the sampled director; fold to S >= 0 and keep |b|
    for (const auto& r : rows) v.push_back({std::abs(r.S), r.T, std::hypot(r.b1, r.b2), 0.0, r.q});
    rep = verify_characteristics(v, tol);
    std::cout << "source=" << p.csv << '\n';
  } else {
    if (p.scenario.empty()) throw std::invalid_argument("verify needs --scenario or --csv");
    const auto nf = scenario_field(p);
    const auto [nx, ny] = grid_of(p, {8, 8});
    const auto probes = grid_probes(nf.field, window_of(p, nf.window), nx, ny);
    rep = verify_quasi_uniformity(nf.field, probes, tol);
    std::cout << "scenario=" << p.scenario << "\nprobes=" << probes.size() << '\n';
  }
  std::cout << rep.to_record();
  return rep.verdict ? exit_ok : exit_verdict;
}

int run_compat(const Params& p) {
  const std::string sc = p.scenario.empty() ? std::string("heliconical") : p.scenario;
  if (sc == "heliconical") {
    const double tol = p.tol > 0 ? p.tol : 1e-10;
    const auto h = compat::heliconical_state(p.alpha, p.sign, p.gz, p.gzz);
    const auto r = compat::compatibility_residuals(h.constants, h.connector);
    double worst = 0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    std::cout << "scenario=heliconical\nalpha=" << num(p.alpha) << "\nsign=" << p.sign << '\n'
              << compat::residual_record(r) << "max_residual=" << num(worst) << '\n';
    return worst <= tol ? exit_ok : exit_verdict;
  }
  // planar solver fields: the reduced system on probe points, f = q in the q* = 1 convention
  const double tol = p.tol > 0 ? p.tol : 1e-6;
  const auto nf = scenario_field(p);
  if (!nf.f) throw std::invalid_argument("compat needs a solver scenario (halfplane or circle) or heliconical");
  const auto [nx, ny] = grid_of(p, {5, 5});
  const auto probes = grid_probes(nf.field, window_of(p, nf.window), nx, ny, 2e-4);
  const auto fabs_ = [&](const Vec3& x) { return std::abs(nf.f(x.x(), x.y())); };
  std::array<double, 3> worst{0, 0, 0};
  int used = 0;
  for (const auto& q : probes) {
    const auto st = canonical_state(nf.field, q, 1e-6);
    const double f = fabs_(q);
    if (f < 1e-9) continue;
    const auto br = compat::planar_branch_of(st.frame);
    if (!br) throw std::runtime_error("field is not planar at a probe");
    const QUConstants k{st.S / f, st.T / f, st.b1 / f, st.b2 / f, st.q / f};
    const Vec3 df = compat::frame_gradient(fabs_, q, st.frame);
    const auto r = compat::planar_reduction_residuals(*br, k, f, df[0], df[1], df[2], 1e-5);
    for (int i = 0; i < 3; ++i) worst[i] = std::max(worst[i], std::abs(r[i]));
    ++used;
  }
  std::cout << "scenario=" << p.scenario << "\nprobes=" << used << '\n';
  for (int i = 0; i < 3; ++i) std::cout << "planar." << i + 1 << '=' << num(worst[i]) << '\n';
  const double w = std::max({worst[0], worst[1], worst[2]});
  std::cout << "max_residual=" << num(w) << '\n';
  return used > 0 && w <= tol ? exit_ok : exit_verdict;
}

int run_energy(const Params& p) {
  const ElasticConstants K(p.K11, p.K22, p.K33, p.K24);
  const auto nf = scenario_field(p);
  const Rect w = window_of(p, nf.window);
  const auto [nx, ny] = grid_of(p, {40, 40});
  const auto probes = grid_probes(nf.field, w, nx, ny);
  std::vector<EnergyDensity> e(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    const Mat3 G = fd_gradient(nf.field, probes[i]);
    const auto st = decompose_gradient(nf.field.at(probes[i]), G);
    const double B = st.frame.n.cross(curl_from_gradient(G)).norm();
    e[i] = oseen_frank_energy(st, B, K, G);
  });
  double total = 0, gap = 0, wmax = 0;
  for (const auto& v : e) {
    total += v.direct;
    gap = std::max(gap, std::abs(v.direct - v.modes));
    wmax = std::max(wmax, v.direct);
  }
  total *= w.width() * w.height() / (nx * ny);
  const bool eri = ericksen_satisfied(K);
  std::cout << "scenario=" << p.scenario << "\nprobes=" << probes.size() << "\nenergy=" << num(total)
            << "\nmax_density=" << num(wmax) << "\nmax_direct_minus_modes=" << num(gap)
            << "\nericksen=" << (eri ? "true" : "false") << '\n';
  return eri ? exit_ok : exit_verdict;
}

int run_oned(const Params& p) {
  OneDReport rep;
  std::vector<double> s(200);
  if (p.curve == "line") {
    const auto fr = line_profile(p);
    double lo = std::isfinite(fr.support.lo) ? fr.support.lo : -5, hi = std::isfinite(fr.support.hi) ? fr.support.hi : 5;
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = lo + (hi - lo) * (i + 0.5) / s.size();
    rep = one_d_uniformity(fr, s);
  } else if (p.curve == "circle") {
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = 2 * pi * (i + 0.5) / s.size();
    rep = one_d_uniformity(circle_profile(p), s);
  } else {
    throw std::invalid_argument("--curve must be line or circle");
  }
  std::cout << "curve=" << p.curve << "\nuniform=" << (rep.uniform ? "true" : "false")
            << "\nmax_deviation=" << num(rep.max_deviation) << '\n';
  if (rep.uniform) std::cout << "gamma0=" << num(rep.gamma0) << '\n';
  return rep.uniform ? exit_ok : exit_verdict;
}

int run_figures(const Params& p) {
  for (const auto& a : figures::render_all()) write_artifact(p, a.file, a.text);
  return exit_ok;
}

// ---- option wiring

void common(CLI::App* sub, Params& p) {
  sub->add_option("--config", p.config, "flat key = value file with any of the long options");
  sub->add_option("--out", p.out, "output directory");
  sub->add_option("--name", p.name, "artifact base name");
  sub->add_option("--window", p.window, "x_min,x_max,y_min,y_max")->delimiter(',')->expected(4);
  sub->add_option("--grid", p.grid, "nx,ny")->delimiter(',')->expected(2);
  sub->add_option("--tol", p.tol, "verdict tolerance");
}

void profile_opts(CLI::App* sub, Params& p) {
  sub->add_option("--profile", p.profile, "tanh|quintic|hybrid|sinusoidal|constant|linear|table, or frank|perturbed|table");
  sub->add_option("--bstar", p.bstar, "splay-bend ratio");
  sub->add_option("--m", p.m, "topological charge of a Frank profile");
  sub->add_option("--c0", p.c0, "phase of a Frank profile, or 'auto'");
  sub->add_option("--amp", p.amp, "sinusoidal amplitude");
  sub->add_option("--k", p.k, "sinusoidal wavenumber");
  sub->add_option("--slope", p.slope, "linear profile slope");
  sub->add_option("--offset", p.offset, "linear profile offset");
  sub->add_option("--support-lo", p.support_lo, "linear profile support start");
  sub->add_option("--support-hi", p.support_hi, "linear profile support end");
  sub->add_option("--phi", p.phi, "constant angle");
  sub->add_option("--table", p.table, "profile table csv (x0,phi0 or theta0,alpha0)");
  sub->add_flag("--extend-inside", p.extend_inside, "continue circle characteristics through the disc");
}

// Flat config keys fill the subcommand's options that were not given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  for (const auto& item : CLI::ConfigTOML().from_config(in)) {
    if (!item.parents.empty()) throw std::invalid_argument("config must be flat; sections are not supported");
    if (item.name == "config") throw std::invalid_argument("config files do not nest");
    auto* opt = sub->get_option_no_throw("--" + item.name);
    if (!opt) throw std::invalid_argument("unknown config key '" + item.name + "' for " + sub->get_name());
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-uniform relief of planar nematic frustration"};
  app.require_subcommand(1);
  Params p;
  std::function<int()> action;

  auto* hp = app.add_subcommand("halfplane", "solve a line frustration, write svg and csv");
  common(hp, p);
  profile_opts(hp, p);
  hp->callback([&] { action = [&] { return run_halfplane(p); }; });

  auto* ci = app.add_subcommand("circle", "solve a circle frustration, write svg and csv");
  common(ci, p);
  profile_opts(ci, p);
  ci->callback([&] { action = [&] { return run_circle(p); }; });

  auto* ve = app.add_subcommand("verify", "quasi-uniformity report on a scenario or a grid csv");
  common(ve, p);
  profile_opts(ve, p);
  ve->add_option("--scenario", p.scenario,
                 "uniform|hedgehog|pure_bend|planar_splay|spiral|single_variable|halfplane|circle");
  ve->add_option("--alpha", p.alpha, "spiral angle");
  ve->add_option("--csv", p.csv, "grid csv written by halfplane or circle");
  ve->callback([&] { action = [&] { return run_verify(p); }; });

  auto* co = app.add_subcommand("compat", "compatibility residuals");
  common(co, p);
  profile_opts(co, p);
  co->add_option("--scenario", p.scenario, "heliconical|halfplane|circle");
  co->add_option("--alpha", p.alpha, "cone angle");
  co->add_option("--sign", p.sign, "+1 or -1");
  co->add_option("--gz", p.gz, "g'");
  co->add_option("--gzz", p.gzz, "g''");
  co->callback([&] { action = [&] { return run_compat(p); }; });

  auto* en = app.add_subcommand("energy", "Oseen-Frank energy over a grid");
  common(en, p);
  profile_opts(en, p);
  en->add_option("--scenario", p.scenario, "field to evaluate")->required();
  en->add_option("--alpha", p.alpha, "spiral angle");
  en->add_option("--K11", p.K11, "splay constant");
  en->add_option("--K22", p.K22, "twist constant");
  en->add_option("--K33", p.K33, "bend constant");
  en->add_option("--K24", p.K24, "saddle-splay constant");
  en->callback([&] { action = [&] { return run_energy(p); }; });

  auto* od = app.add_subcommand("oned", "one-dimensional uniformity of a boundary profile");
  common(od, p);
  profile_opts(od, p);
  od->add_option("--curve", p.curve, "line|circle");
  od->callback([&] { action = [&] { return run_oned(p); }; });

  auto* fi = app.add_subcommand("figures", "regenerate every built-in figure scenario");
  common(fi, p);
  fi->callback([&] { action = [&] { return run_figures(p); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_error;
  }
  try {
    if (!p.config.empty()) apply_config(app.get_subcommands().front(), p.config);
    return action();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_error;
  }
}
