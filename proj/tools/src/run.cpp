#include "brthcli/run.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <utility>

#include "CLI11.hpp"
#include "json.hpp"

#include "brth/characteristics.hpp"
#include "brth/evolve.hpp"
#include "brth/io.hpp"
#include "brth/quantize.hpp"
#include "brth/residual.hpp"
#include "brth/version.hpp"

namespace brth::cli {

namespace {

struct HelpRequested {};

std::string fmt(double v) { return io::csv_number(v); }
std::string fmt(const Vec3& v) { return fmt(v.x) + "," + fmt(v.y) + "," + fmt(v.z); }
bool vec_zero(const Vec3& v) { return v.x == 0.0 && v.y == 0.0 && v.z == 0.0; }

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ----- flag/config plumbing ------------------------------------------------

// Raw holders for values that need post-processing into RunConfig fields.
struct Holders {
  std::vector<double> v{0.0, 0.0, 0.0};
  std::vector<double> a0{0.0, 0.0, 0.0};
  std::vector<double> p{1.0, 0.0, 0.0};
  std::vector<double> x0{0.0, 0.0, 0.0};
  std::string n_range = "10..20";
  std::string out = "out";
  std::string config;
};

struct Parser {
  RunConfig cfg;
  Holders h;
  CLI::App app{"closed-form breather laboratory: construction, verification, evolution", "brth"};

  Parser() { build(); }

  CLI::App* selected() {
    auto subs = app.get_subcommands();
    return subs.empty() ? nullptr : subs.front();
  }

 private:
  void add_plumbing(CLI::App* s) {
    s->add_option("--config", h.config,
                  "flat key=value configuration file, # comments; flags override it");
    s->add_option("--out", h.out, "output directory")->capture_default_str();
    s->add_option("--seed", cfg.seed, "deterministic run seed")->capture_default_str();
    s->add_flag("--dump-fields", cfg.dump_fields, "also write binary field dumps");
    s->add_option("--m", cfg.params.m, "particle mass")->capture_default_str();
    s->add_option("--c", cfg.params.c, "speed of light")->capture_default_str();
    s->add_option("--hbar", cfg.params.hbar, "reduced Planck constant")->capture_default_str();
    s->add_option("--charge", cfg.params.e_charge, "coupling charge")->capture_default_str();
  }

  void add_solution(CLI::App* s, bool with_potentials) {
    s->add_option("--solution", cfg.solution, "rest-breather | boosted-breather | spinning")
        ->capture_default_str();
    s->add_option("--alpha", cfg.alpha, "second-component amplitude")->capture_default_str();
    s->add_option("--l", cfg.mode_l, "orbital index of the spinning mode")->capture_default_str();
    s->add_option("--n", cfg.mode_n, "azimuthal index of the spinning mode")
        ->capture_default_str();
    s->add_option("--v", h.v, "boost velocity vx,vy,vz")->delimiter(',')->expected(3);
    s->add_option("--omega-override", cfg.omega_override,
                  "replace the locked second frequency (negative control)");
    if (with_potentials) {
      s->add_option("--u0", cfg.u0, "uniform scalar potential")->capture_default_str();
      s->add_option("--a0", h.a0, "uniform vector potential ax,ay,az")
          ->delimiter(',')
          ->expected(3);
    }
  }

  void build() {
    app.require_subcommand(1);

    auto* construct =
        app.add_subcommand("construct", "evaluate a closed-form solution and write its profile");
    add_solution(construct, true);
    construct->add_option("--box", cfg.box, "radial span / slice half-extent")
        ->capture_default_str();
    construct->add_option("--sample-spacing", cfg.sample_spacing, "profile sample step")
        ->capture_default_str();
    add_plumbing(construct);

    auto* verify =
        app.add_subcommand("verify", "finite-difference residual convergence checks");
    add_solution(verify, true);
    verify->add_option("--equation", cfg.equation, "kg | qhj | both")->capture_default_str();
    verify->add_option("--spacings", cfg.spacings, "grid spacings (compton lengths)")
        ->delimiter(',');
    verify->add_option("--order-target", cfg.order_target, "expected convergence order")
        ->capture_default_str();
    verify->add_option("--order-tolerance", cfg.order_tolerance, "allowed order deviation")
        ->capture_default_str();
    add_plumbing(verify);

    auto* evolve = app.add_subcommand(
        "evolve", "leapfrog evolution of rest-breather data on the radial grid");
    evolve->add_option("--alpha", cfg.alpha, "second-component amplitude")
        ->capture_default_str();
    evolve->add_option("--omega-override", cfg.omega_override,
                       "replace the locked second frequency in the initial data");
    evolve->add_option("--half-width", cfg.half_width, "domain radius")->capture_default_str();
    evolve->add_option("--spacing", cfg.grid_spacing, "grid spacing")->capture_default_str();
    evolve->add_option("--dt", cfg.dt, "time step")->capture_default_str();
    evolve->add_option("--periods", cfg.periods, "clock periods to run")->capture_default_str();
    evolve->add_option("--boundary", cfg.boundary, "periodic | dirichlet | analytic")
        ->capture_default_str();
    evolve->add_option("--probe-r", cfg.probe_radius, "probe radius")->capture_default_str();
    evolve->add_option("--probe-stride", cfg.probe_stride, "steps between probe samples")
        ->capture_default_str();
    add_plumbing(evolve);

    auto* quantize =
        app.add_subcommand("quantize", "semiclassical level scan in a confining well");
    quantize->add_option("--well", cfg.well, "harmonic | quartic")->capture_default_str();
    quantize->add_option("--omega0", cfg.omega0, "harmonic well frequency")
        ->capture_default_str();
    quantize->add_option("--quartic", cfg.quartic_coefficient, "quartic well coefficient")
        ->capture_default_str();
    quantize->add_option("--n", h.n_range, "quantum number range, e.g. 10..20")
        ->capture_default_str();
    add_plumbing(quantize);

    auto* trajectory =
        app.add_subcommand("trajectory", "integrate one characteristic of the action");
    trajectory->add_option("--energy", cfg.energy, "action energy (on-shell when omitted)");
    trajectory->add_option("--p", h.p, "momentum px,py,pz")->delimiter(',')->expected(3);
    trajectory->add_option("--x0", h.x0, "starting position")->delimiter(',')->expected(3);
    trajectory->add_option("--t-begin", cfg.t_begin, "start time")->capture_default_str();
    trajectory->add_option("--t-end", cfg.t_end, "end time")->capture_default_str();
    trajectory->add_option("--dt", cfg.trajectory_dt, "integrator step")->capture_default_str();
    trajectory->add_option("--u0", cfg.u0, "uniform scalar potential")->capture_default_str();
    trajectory->add_option("--a0", h.a0, "uniform vector potential ax,ay,az")
        ->delimiter(',')
        ->expected(3);
    add_plumbing(trajectory);

    auto* scan =
        app.add_subcommand("scan", "periodicity-compatible momenta on an interval");
    scan->add_option("--d", cfg.separation, "interval length")->capture_default_str();
    scan->add_option("--p-max", cfg.p_max, "scan upper bound")->capture_default_str();
    scan->add_option("--samples", cfg.scan_samples, "scan sample count")->capture_default_str();
    add_plumbing(scan);
  }
};

void parse_tokens(Parser& p, const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("brth");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    p.app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* sub = p.selected();
    std::cout << (sub != nullptr ? sub->help() : p.app.help());
    throw HelpRequested{};
  } catch (const CLI::CallForAllHelp&) {
    std::cout << p.app.help("", CLI::AppFormatMode::All);
    throw HelpRequested{};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }
}

struct FileEntry {
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<FileEntry> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  std::vector<FileEntry> entries;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ": line " + std::to_string(line) +
                       ": expected key=value");
    FileEntry entry{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), line};
    if (entry.key.empty())
      throw UsageError(path.string() + ": line " + std::to_string(line) + ": empty key");
    entries.push_back(std::move(entry));
  }
  return entries;
}

int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (...) {
    throw UsageError("malformed " + what + ": '" + s + "'");
  }
}

void finalize(Parser& p) {
  RunConfig& cfg = p.cfg;
  Holders& h = p.h;
  CLI::App* sub = p.selected();
  cfg.command = sub->get_name();
  cfg.out_dir = h.out;
  if (!h.config.empty()) cfg.config_file = std::filesystem::path(h.config);
  cfg.velocity = {h.v[0], h.v[1], h.v[2]};
  cfg.a0 = {h.a0[0], h.a0[1], h.a0[2]};
  cfg.momentum = {h.p[0], h.p[1], h.p[2]};
  cfg.start = {h.x0[0], h.x0[1], h.x0[2]};

  auto one_of = [](const std::string& value, std::initializer_list<const char*> allowed,
                   const char* flag) {
    for (const char* a : allowed)
      if (value == a) return;
    std::string msg = std::string("invalid ") + flag + " '" + value + "'; expected one of";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw UsageError(msg);
  };

  if (cfg.command == "construct" || cfg.command == "verify") {
    one_of(cfg.solution, {"rest-breather", "boosted-breather", "spinning"}, "--solution");
    if (cfg.solution == "boosted-breather" && sub->count("--v") == 0)
      cfg.velocity = {0.6 * cfg.params.c, 0.0, 0.0};
    if (cfg.solution == "spinning" && sub->count("--l") == 0) cfg.mode_l = 1;
  }
  if (cfg.command == "verify") {
    one_of(cfg.equation, {"kg", "qhj", "both"}, "--equation");
    if (cfg.spacings.size() < 2)
      throw UsageError("verify needs at least two --spacings for an order fit");
    for (double s : cfg.spacings)
      if (!(s > 0.0)) throw UsageError("--spacings must be positive");
    if (!(cfg.order_tolerance > 0.0)) throw UsageError("--order-tolerance must be positive");
  }
  if (cfg.command == "construct") {
    if (!(cfg.box > 0.0) || !(cfg.sample_spacing > 0.0) || cfg.sample_spacing > cfg.box)
      throw UsageError("construct needs 0 < --sample-spacing <= --box");
  }
  if (cfg.command == "evolve") {
    one_of(cfg.boundary, {"periodic", "dirichlet", "analytic"}, "--boundary");
    if (!(cfg.half_width > 0.0) || !(cfg.grid_spacing > 0.0) || !(cfg.dt > 0.0))
      throw UsageError("evolve needs positive --half-width, --spacing, --dt");
    if (cfg.periods < 1 || cfg.probe_stride < 1)
      throw UsageError("evolve needs --periods >= 1 and --probe-stride >= 1");
    if (!(cfg.probe_radius > 0.0) || cfg.probe_radius >= cfg.half_width)
      throw UsageError("--probe-r must lie strictly inside (0, half-width)");
  }
  if (cfg.command == "quantize") {
    one_of(cfg.well, {"harmonic", "quartic"}, "--well");
    if (!(cfg.omega0 > 0.0) || !(cfg.quartic_coefficient > 0.0))
      throw UsageError("well parameters must be positive");
    const auto dots = h.n_range.find("..");
    if (dots == std::string::npos) {
      cfg.n_min = cfg.n_max = parse_int(h.n_range, "--n");
    } else {
      cfg.n_min = parse_int(h.n_range.substr(0, dots), "--n");
      cfg.n_max = parse_int(h.n_range.substr(dots + 2), "--n");
    }
    if (cfg.n_min < 0 || cfg.n_max < cfg.n_min)
      throw UsageError("--n range must satisfy 0 <= low <= high");
  }
  if (cfg.command == "trajectory") {
    if (!(cfg.t_end > cfg.t_begin)) throw UsageError("--t-end must exceed --t-begin");
    if (!(cfg.trajectory_dt > 0.0)) throw UsageError("--dt must be positive");
  }
  if (cfg.command == "scan") {
    if (!(cfg.separation > 0.0) || !(cfg.p_max > 0.0))
      throw UsageError("scan needs positive --d and --p-max");
    if (cfg.scan_samples < 100) throw UsageError("scan needs --samples >= 100");
  }
}

// ----- output bookkeeping ---------------------------------------------------

class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  void csv(const std::string& name, const std::vector<std::string>& cols,
           const std::vector<std::vector<double>>& rows) {
    io::write_csv(dir_ / name, cols, rows);
    finish(name);
  }

  void field(const std::string& name, const ComplexField& f) {
    io::write_field(dir_ / name, f);
    finish(name);
  }

  const std::vector<OutputRecord>& records() const { return records_; }

 private:
  void finish(const std::string& name) {
    const std::filesystem::path p = dir_ / name;
    records_.push_back(
        {name, static_cast<std::uint64_t>(std::filesystem::file_size(p)), sha256_hex_file(p)});
  }

  std::filesystem::path dir_;
  std::vector<OutputRecord> records_;
};

// ----- command runners --------------------------------------------------------

void run_construct(const RunConfig& cfg, OutputSet& outs) {
  const BreatherSpec spec = cfg.breather();
  const SolutionSampler sol = make_solution(spec, cfg.params, cfg.potentials());

  std::vector<std::vector<double>> rows;
  const auto steps = static_cast<std::size_t>(std::floor(cfg.box / cfg.sample_spacing));
  rows.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double r = static_cast<double>(i) * cfg.sample_spacing;
    const cplx psi = sol.psi({0.0, {r, 0.0, 0.0}});
    rows.push_back({r, psi.real(), psi.imag(), std::abs(psi)});
  }
  outs.csv("profile.csv", {"r", "re_psi", "im_psi", "abs_psi"}, rows);

  if (cfg.dump_fields) {
    const auto count = static_cast<std::size_t>(std::llround(cfg.box / cfg.sample_spacing)) + 1;
    SpacetimeGrid grid =
        spec.mode.l == 0 && spec.velocity.norm() == 0.0
            ? build_grid({Axis{"r", 0.0, cfg.box, count}})
            : build_grid({Axis{"x", -cfg.box, cfg.box, 2 * count - 1},
                          Axis{"z", -cfg.box, cfg.box, 2 * count - 1}});
    const bool radial = grid.rank() == 1;
    const PointSampler at_t0 = [&](std::span<const double> c) {
      return radial ? sol.psi({0.0, {c[0], 0.0, 0.0}}) : sol.psi({0.0, {c[0], 0.0, c[1]}});
    };
    outs.field("psi.brth", sample(at_t0, grid, Quantity::Psi));
  }
}

void run_verify(const RunConfig& cfg, OutputSet& outs) {
  const BreatherSpec spec = cfg.breather();
  const Potentials pots = cfg.potentials();
  const double lam = cfg.params.compton_length();
  const bool radial = spec.velocity.norm() == 0.0 && spec.mode.l == 0 && spec.mode.n == 0 &&
                      vec_zero(cfg.a0);

  std::vector<GridExtent> extents;
  if (radial) {
    extents = {{"t", 0.0, 2.0 * lam / cfg.params.c}, {"r", 0.5 * lam, 4.5 * lam}};
  } else {
    extents = {{"t", 0.0, 0.4 * lam / cfg.params.c},
               {"x", 0.6 * lam, 2.2 * lam},
               {"y", 0.6 * lam, 2.2 * lam},
               {"z", 0.6 * lam, 2.2 * lam}};
  }
  std::vector<double> spacings;
  spacings.reserve(cfg.spacings.size());
  for (double s : cfg.spacings) spacings.push_back(s * lam);

  std::vector<std::string> failures;
  auto handle = [&](const std::string& tag, const ResidualReport& rep) {
    std::vector<std::vector<double>> rows;
    for (const ResolutionSample& s : rep.samples) rows.push_back({s.spacing, s.l2, s.linf});
    outs.csv(tag + "_residuals.csv", {"spacing", "l2", "linf"}, rows);
    for (const std::string& w : rep.warnings) std::cerr << tag << ": " << w << "\n";
    if (!rep.convergence_order) {
      failures.push_back(tag + ": no convergence-order fit");
      return;
    }
    const double order = *rep.convergence_order;
    std::cout << tag << " convergence order " << order << "\n";
    if (std::abs(order - cfg.order_target) > cfg.order_tolerance)
      failures.push_back(tag + ": convergence order " + std::to_string(order) + " outside " +
                         std::to_string(cfg.order_target) + " +/- " +
                         std::to_string(cfg.order_tolerance));
  };

  if (cfg.equation != "qhj")
    handle("kg", kg_residual_study(spec, extents, spacings, cfg.params, pots));
  if (cfg.equation != "kg")
    handle("qhj", qhj_residual_study(spec, extents, spacings, cfg.params, pots));
  if (!failures.empty()) {
    std::string msg;
    for (const std::string& f : failures) msg += (msg.empty() ? "" : "; ") + f;
    throw VerificationFailure(msg);
  }
}

void run_evolve(const RunConfig& cfg, OutputSet& outs) {
  BreatherSpec spec = cfg.breather();
  spec.velocity = {};  // the radial evolver takes rest data
  spec.mode = {0, 0};
  const SolutionSampler sol = make_solution(spec, cfg.params);

  const double period = 2.0 * 3.14159265358979323846 / cfg.params.clock_frequency();
  const auto steps_per_period = static_cast<std::size_t>(std::llround(period / cfg.dt));
  if (steps_per_period == 0) throw UsageError("--dt exceeds a clock period");
  const std::size_t total = steps_per_period * static_cast<std::size_t>(cfg.periods);

  const auto cells = static_cast<std::size_t>(std::llround(cfg.half_width / cfg.grid_spacing));
  const SpacetimeGrid grid = build_grid({Axis{"r", 0.0, cfg.half_width, cells + 1}});
  for (const std::string& w : resolution_warnings(grid, cfg.params))
    std::cerr << "evolve: " << w << "\n";

  EvolveOptions opt;
  opt.geometry = Geometry::radial_1d;
  opt.dt = cfg.dt;
  if (cfg.boundary == "periodic") {
    opt.boundary = Boundary::periodic;
  } else if (cfg.boundary == "dirichlet") {
    opt.boundary = Boundary::dirichlet_far;
  } else {
    opt.boundary = Boundary::analytic;
    opt.boundary_value = [&sol](double t, std::span<const double> coords) {
      return coords[0] * sol.psi({t, {coords[0], 0.0, 0.0}});
    };
  }

  Evolver ev(init_from_breather(spec, grid, cfg.params), opt, cfg.params);

  const Axis& ax = ev.grid().axis(0);
  const auto probe = static_cast<std::size_t>(std::clamp<long long>(
      std::llround(cfg.probe_radius / ax.spacing()), 1, static_cast<long long>(cells) - 1));
  const double r_probe = ax.coord(probe);

  std::vector<std::vector<double>> probe_rows, energy_rows;
  const double shadow0 = ev.shadow_energy();
  const double stated0 = ev.stated_energy();
  double shadow_drift = 0.0, stated_drift = 0.0;
  auto record_probe_row = [&]() {
    const cplx psi = ev.state().psi.values()[probe] / r_probe;
    probe_rows.push_back({ev.state().t, psi.real(), psi.imag()});
  };
  auto record_energy_row = [&]() {
    const double sh = ev.shadow_energy();
    const double st = ev.stated_energy();
    energy_rows.push_back({ev.state().t, sh, st});
    shadow_drift = std::max(shadow_drift, std::abs(sh - shadow0) / std::abs(shadow0));
    stated_drift = std::max(stated_drift, std::abs(st - stated0) / std::abs(stated0));
  };
  record_probe_row();
  record_energy_row();

  for (std::size_t s = 1; s <= total; ++s) {
    ev.advance(1);
    if (s % static_cast<std::size_t>(cfg.probe_stride) == 0) record_probe_row();
    if (s % steps_per_period == 0) record_energy_row();
  }

  // Deviation of the final slice from the closed form the run started from.
  // The headline number is the relative l2 error of the evolved variable
  // u = r*psi over the interior nodes; the pointwise psi RMS is kept alongside.
  const double t_end = ev.state().t;
  double du2 = 0.0, uex2 = 0.0, dpsi2 = 0.0;
  for (std::size_t j = 1; j < cells; ++j) {
    const double r = ax.coord(j);
    const cplx ue = r * sol.psi({t_end, {r, 0.0, 0.0}});
    const cplx un = ev.state().psi.values()[j];
    du2 += std::norm(un - ue);
    uex2 += std::norm(ue);
    dpsi2 += std::norm((un - ue) / r);
  }
  const double rel_l2_u = std::sqrt(du2 / uex2);
  const double rms_psi = std::sqrt(dpsi2 / static_cast<double>(cells - 1));

  outs.csv("probe.csv", {"t", "re_psi", "im_psi"}, probe_rows);
  outs.csv("energy.csv", {"t", "shadow_energy", "stated_energy"}, energy_rows);
  outs.csv("summary.csv",
           {"final_time", "final_rel_l2_u", "final_rms_psi", "shadow_drift", "stated_drift"},
           {{t_end, rel_l2_u, rms_psi, shadow_drift, stated_drift}});
  if (cfg.dump_fields) outs.field("final_state.brth", ev.state().psi);
  std::cout << "evolved " << total << " steps to t = " << t_end << "; final rel l2 "
            << rel_l2_u << "; final psi rms " << rms_psi << "\n";
}

void run_quantize(const RunConfig& cfg, OutputSet& outs) {
  std::function<double(double)> well;
  if (cfg.well == "harmonic") {
    const double k = 0.5 * cfg.params.m * cfg.omega0 * cfg.omega0;
    well = [k](double x) { return k * x * x; };
  } else {
    const double q = cfg.quartic_coefficient;
    well = [q](double x) { return q * x * x * x * x; };
  }
  const auto levels = bohr_sommerfeld_levels(well, cfg.params, cfg.n_min, cfg.n_max);
  std::vector<std::vector<double>> rows;
  for (const auto& [n, e] : levels) rows.push_back({static_cast<double>(n), e});
  outs.csv("levels.csv", {"n", "energy"}, rows);
}

void run_trajectory(const RunConfig& cfg, OutputSet& outs) {
  const double mc2 = cfg.params.m * cfg.params.c * cfg.params.c;
  const double pc = cfg.momentum.norm() * cfg.params.c;
  const double energy = cfg.energy.value_or(std::sqrt(pc * pc + mc2 * mc2));
  const ActionGradients grads = free_action_gradients(energy, cfg.momentum);
  const Trajectory traj = integrate_trajectory(grads, cfg.potentials(), cfg.start,
                                               {cfg.t_begin, cfg.t_end}, cfg.trajectory_dt,
                                               cfg.params);
  std::vector<std::vector<double>> rows;
  rows.reserve(traj.times.size());
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const Vec3& x = traj.positions[i];
    const Vec3& v = traj.velocities[i];
    rows.push_back({traj.times[i], x.x, x.y, x.z, v.x, v.y, v.z});
  }
  outs.csv("trajectory.csv", {"t", "x", "y", "z", "vx", "vy", "vz"}, rows);
}

void run_scan(const RunConfig& cfg, OutputSet& outs) {
  const QuantizationScan scan =
      scan_quantized_momenta(cfg.separation, cfg.p_max, cfg.scan_samples, cfg.params);
  std::vector<std::vector<double>> rows;
  rows.reserve(scan.momenta.size());
  for (std::size_t i = 0; i < scan.momenta.size(); ++i)
    rows.push_back({scan.momenta[i], scan.residuals[i]});
  outs.csv("scan.csv", {"p", "residual"}, rows);
  rows.clear();
  for (std::size_t i = 0; i < scan.quantized_p.size(); ++i)
    rows.push_back({static_cast<double>(scan.quantum_numbers[i]), scan.quantized_p[i]});
  outs.csv("quantized.csv", {"n", "p"}, rows);
}

}  // namespace

// ----- RunConfig helpers ------------------------------------------------------

BreatherSpec RunConfig::breather() const {
  BreatherSpec spec;
  spec.alpha = cplx{alpha, 0.0};
  spec.mode = {mode_l, mode_n};
  spec.velocity = velocity;
  spec.omega_override = omega_override;
  return spec;
}

Potentials RunConfig::potentials() const {
  if (u0 == 0.0 && vec_zero(a0)) return {};
  return Potentials::uniform(u0, a0);
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto put = [&](const char* k, std::string v) { kv.emplace_back(k, std::move(v)); };

  const bool solution_block =
      command == "construct" || command == "verify" || command == "evolve";
  if (solution_block) {
    if (command != "evolve") put("solution", solution);
    put("alpha", fmt(alpha));
    if (command != "evolve") {
      put("l", std::to_string(mode_l));
      put("n", std::to_string(mode_n));
      put("v", fmt(velocity));
      put("u0", fmt(u0));
      put("a0", fmt(a0));
    }
    if (omega_override) put("omega-override", fmt(*omega_override));
  }
  if (command == "construct") {
    put("box", fmt(box));
    put("sample-spacing", fmt(sample_spacing));
  } else if (command == "verify") {
    put("equation", equation);
    std::string joined;
    for (double s : spacings) joined += (joined.empty() ? "" : ",") + fmt(s);
    put("spacings", joined);
    put("order-target", fmt(order_target));
    put("order-tolerance", fmt(order_tolerance));
  } else if (command == "evolve") {
    put("half-width", fmt(half_width));
    put("spacing", fmt(grid_spacing));
    put("dt", fmt(dt));
    put("periods", std::to_string(periods));
    put("boundary", boundary);
    put("probe-r", fmt(probe_radius));
    put("probe-stride", std::to_string(probe_stride));
  } else if (command == "quantize") {
    put("well", well);
    put("omega0", fmt(omega0));
    put("quartic", fmt(quartic_coefficient));
    put("n", std::to_string(n_min) + ".." + std::to_string(n_max));
  } else if (command == "trajectory") {
    if (energy) put("energy", fmt(*energy));
    put("p", fmt(momentum));
    put("x0", fmt(start));
    put("t-begin", fmt(t_begin));
    put("t-end", fmt(t_end));
    put("dt", fmt(trajectory_dt));
    put("u0", fmt(u0));
    put("a0", fmt(a0));
  } else if (command == "scan") {
    put("d", fmt(separation));
    put("p-max", fmt(p_max));
    put("samples", std::to_string(scan_samples));
  }
  put("m", fmt(params.m));
  put("c", fmt(params.c));
  put("hbar", fmt(params.hbar));
  put("charge", fmt(params.e_charge));
  put("out", out_dir.string());
  put("seed", std::to_string(seed));
  put("dump-fields", dump_fields ? "1" : "0");
  return kv;
}

// ----- public entry points ---------------------------------------------------

RunConfig parse_config(const std::vector<std::string>& args) {
  Parser pass1;
  parse_tokens(pass1, args);
  CLI::App* sub = pass1.selected();
  if (pass1.h.config.empty()) {
    finalize(pass1);
    return pass1.cfg;
  }

  // Merge the config file: file entries become --key=value tokens placed
  // before the explicit flags, except where an explicit flag already covers
  // the key (flags override the file).
  std::set<std::string> explicit_keys;
  for (const std::string& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    explicit_keys.insert(a.substr(2, eq == std::string::npos ? a.npos : eq - 2));
  }
  std::vector<std::string> merged;
  merged.push_back(args.front());
  const std::filesystem::path cfg_path(pass1.h.config);
  for (const FileEntry& entry : read_config_file(cfg_path)) {
    if (entry.key == "config")
      throw UsageError("config files cannot reference other config files");
    if (sub->get_option_no_throw("--" + entry.key) == nullptr)
      throw UsageError(cfg_path.string() + ": unknown key '" + entry.key +
                       "' (line " + std::to_string(entry.line) + ")");
    if (explicit_keys.count(entry.key)) continue;
    merged.push_back("--" + entry.key + "=" + entry.value);
  }
  merged.insert(merged.end(), args.begin() + 1, args.end());

  Parser pass2;
  parse_tokens(pass2, merged);
  finalize(pass2);
  return pass2.cfg;
}

std::string sha256_hex_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("sha256: cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: digest init failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

RunManifest execute(const RunConfig& cfg) {
  cfg.params.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RunManifest manifest;
  manifest.command = cfg.command;
  manifest.version = kVersion;
  manifest.started_utc = now_utc();
  manifest.config_echo = cfg.echo();
  if (cfg.config_file)
    manifest.input_hashes.emplace_back(cfg.config_file->string(),
                                       sha256_hex_file(*cfg.config_file));

  OutputSet outs(cfg.out_dir);
  if (cfg.command == "construct") {
    run_construct(cfg, outs);
  } else if (cfg.command == "verify") {
    run_verify(cfg, outs);
  } else if (cfg.command == "evolve") {
    run_evolve(cfg, outs);
  } else if (cfg.command == "quantize") {
    run_quantize(cfg, outs);
  } else if (cfg.command == "trajectory") {
    run_trajectory(cfg, outs);
  } else if (cfg.command == "scan") {
    run_scan(cfg, outs);
  } else {
    throw UsageError("unknown command: " + cfg.command);
  }
  manifest.outputs = outs.records();
  manifest.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  nlohmann::ordered_json j;
  j["command"] = manifest.command;
  j["version"] = manifest.version;
  j["started_utc"] = manifest.started_utc;
  j["wall_clock_seconds"] = manifest.wall_clock_seconds;
  j["config"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : manifest.config_echo) j["config"][k] = v;
  j["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : manifest.input_hashes) j["inputs"][k] = {{"sha256", v}};
  j["outputs"] = nlohmann::ordered_json::array();
  for (const OutputRecord& rec : manifest.outputs)
    j["outputs"].push_back({{"path", rec.name}, {"bytes", rec.bytes}, {"sha256", rec.sha256}});
  std::ofstream mout(cfg.out_dir / "run_manifest.json", std::ios::binary);
  if (!mout) throw std::runtime_error("cannot write run manifest");
  mout << j.dump(2) << '\n';

  return manifest;
}

int run_main(const std::vector<std::string>& args) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const HelpRequested&) {
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    const RunManifest manifest = execute(cfg);
    std::cout << "wrote " << manifest.outputs.size() << " file(s) and run_manifest.json to "
              << cfg.out_dir.string() << "\n";
    return 0;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace brth::cli
