// Command-line front end: planning, single runs, sweeps, and robustness scans
// over the built-in nuclei or a user-supplied level scheme.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ncpt/config.hpp"
#include "ncpt/constants.hpp"
#include "ncpt/csv.hpp"
#include "ncpt/scan.hpp"
#include "ncpt/version.hpp"

namespace {

using namespace ncpt;

struct CliArgs {
  std::string config_path;
  std::string preset;
  std::string laser;
  std::string geometry;
  double ratio = 0.0;
  double intensity_Wcm2 = 0.0;
  double delay_fs = 0.0;
  double imin = 0.0, imax = 0.0;
  int points = 0;
  std::string out;
  int workers = 0;
  double rtol = 0.0;
};

void add_common(CLI::App* sub, CliArgs& a) {
  sub->add_option("--config", a.config_path, "JSON config file");
  sub->add_option("--preset", a.preset, "built-in nucleus: re185 | tc97 | gd154 | er168");
  sub->add_option("--laser", a.laser, "sxfel | xfelo");
  sub->add_option("--geometry", a.geometry, "copro | crossed");
  sub->add_option("--ratio", a.ratio, "Stokes/pump intensity ratio");
  sub->add_option("--intensity", a.intensity_Wcm2, "pump peak intensity, W/cm^2");
  sub->add_option("--delay-fs", a.delay_fs, "rest-frame delay tau_p - tau_S, fs");
  sub->add_option("--out", a.out, "output CSV path (default stdout)");
  sub->add_option("--workers", a.workers, "worker threads");
  sub->add_option("--rtol", a.rtol, "integrator relative tolerance");
}

Geometry geometry_of(const std::string& name) {
  if (name == "copro" || name == "copropagating") return Geometry::copropagating;
  if (name == "crossed") return Geometry::crossed;
  throw ConfigError("config: geometry: expected \"copro\" or \"crossed\", got \"" + name + "\"");
}

RunConfig merge(const CLI::App* sub, const CliArgs& a) {
  auto count = [sub](const std::string& name) -> unsigned {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt ? static_cast<unsigned>(opt->count()) : 0u;
  };
  RunConfig cfg;
  if (!a.config_path.empty()) cfg = load_config(a.config_path);
  if (count("--preset")) {
    preset_nucleus(a.preset);  // validates the name
    cfg.preset = a.preset;
    cfg.nucleus.reset();
  }
  if (count("--laser")) cfg.laser = laser_by_name(a.laser);
  if (count("--geometry")) cfg.geometry = geometry_of(a.geometry);
  if (count("--ratio")) {
    if (!(a.ratio > 0.0)) throw ConfigError("config: --ratio must be positive");
    cfg.stokes_ratio = a.ratio;
  }
  if (count("--intensity")) {
    if (a.intensity_Wcm2 < 0.0) throw ConfigError("config: --intensity must be non-negative");
    cfg.intensity_Wcm2 = a.intensity_Wcm2;
  }
  if (count("--delay-fs")) cfg.delay_fs = a.delay_fs;
  if (count("--imin")) {
    if (!(a.imin > 0.0)) throw ConfigError("config: --imin must be positive");
    cfg.sweep.I_min_Wcm2 = a.imin;
  }
  if (count("--imax")) {
    if (!(a.imax > 0.0)) throw ConfigError("config: --imax must be positive");
    cfg.sweep.I_max_Wcm2 = a.imax;
  }
  if (count("--points")) {
    if (a.points < 2) throw ConfigError("config: --points must be >= 2");
    cfg.sweep.points = a.points;
  }
  if (count("--out")) cfg.out = a.out;
  if (count("--workers")) {
    if (a.workers < 1) throw ConfigError("config: --workers must be >= 1");
    cfg.workers = a.workers;
  }
  if (count("--rtol")) {
    if (!(a.rtol > 0.0)) throw ConfigError("config: --rtol must be positive");
    cfg.step.rtol = a.rtol;
  }
  if (!cfg.preset && !cfg.nucleus)
    throw ConfigError("config: need --preset or a config file with a nucleus");
  return cfg;
}

double resolve_ratio(const RunConfig& cfg) {
  if (cfg.stokes_ratio) return *cfg.stokes_ratio;
  if (cfg.preset) return preset_stokes_ratio(*cfg.preset, cfg.geometry);
  return 1.0;
}

Setup setup_of(const RunConfig& cfg) {
  return make_setup(config_system(cfg), cfg.laser, cfg.geometry, resolve_ratio(cfg));
}

ScanOptions scan_options(const RunConfig& cfg) {
  ScanOptions opts;
  opts.step = cfg.step;
  opts.workers = resolve_workers(cfg);
  opts.convention = cfg.convention;
  return opts;
}

void emit(const csv::Document& doc, const std::string& out_path) {
  const std::string text = doc.str();
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out_path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + out_path);
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / double(n - 1);
  return v;
}

int run_plan(const std::string& preset, const std::string& laser, const std::string& geometry,
             const std::string& out) {
  std::vector<std::string> nuclei = preset == "all"
                                        ? std::vector<std::string>{"re185", "tc97", "gd154",
                                                                   "er168"}
                                        : std::vector<std::string>{preset};
  std::vector<LaserProfile> lasers;
  if (laser == "all") {
    lasers = {sxfel(), xfelo()};
  } else {
    lasers = {laser_by_name(laser)};
  }
  std::vector<Geometry> geoms;
  if (geometry == "both") {
    geoms = {Geometry::crossed, Geometry::copropagating};
  } else {
    geoms = {geometry_of(geometry)};
  }

  std::vector<std::pair<std::string, Setup>> entries;
  for (const auto& n : nuclei) {
    const NuclearSystem system = build_system(preset_nucleus(n));
    for (const auto& l : lasers)
      for (Geometry g : geoms)
        entries.emplace_back(n, make_setup(system, l, g, preset_stokes_ratio(n, g)));
  }
  csv::Document doc = csv::plan_table(entries);
  doc.comments = {std::string(tool_name) + " " + tool_version,
                  "plan preset=" + preset + " laser=" + laser + " geometry=" + geometry};
  emit(doc, out);
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  const Setup setup = setup_of(cfg);
  auto [pump, stokes] =
      make_pulses(setup, cfg.intensity_Wcm2 * consts::Wcm2, cfg.delay_fs * 1e-15);
  const DriveConfig drives =
      build_drives(setup.system, setup.frame, pump, stokes, cfg.convention);
  EvolveOptions opts;
  opts.step = cfg.step;
  const Trajectory traj = evolve(setup.system, drives, make_span(drives), opts);

  csv::Document doc = csv::trajectory_table(traj);
  doc.comments = provenance(cfg);
  doc.comments.push_back(
      "eta " + csv::format_number(settled_efficiency(traj.final_state(), setup.system)));
  emit(doc, cfg.out);
  return 0;
}

int run_sweep(const RunConfig& cfg) {
  const Setup setup = setup_of(cfg);
  SweepGrid grid{cfg.sweep.I_min_Wcm2 * consts::Wcm2, cfg.sweep.I_max_Wcm2 * consts::Wcm2,
                 cfg.sweep.points};
  const SweepResult result = intensity_sweep(setup, grid, scan_options(cfg));

  csv::Document doc = csv::sweep_table(result.rows);
  doc.comments = provenance(cfg);
  doc.comments.push_back(
      "plateau_onset_Wcm2 " +
      (result.plateau_onset ? csv::format_number(*result.plateau_onset / consts::Wcm2)
                            : std::string("none")));
  emit(doc, cfg.out);
  return 0;
}

int run_pipulse(const RunConfig& cfg) {
  const Setup setup = setup_of(cfg);
  LaserPulse tmpl;
  tmpl.T_lab = cfg.laser.T_lab;
  tmpl.bandwidth_lab = cfg.laser.bandwidth;

  csv::Document doc;
  doc.columns = {"branch", "I_pi_Wcm2"};
  tmpl.theta = 0.0;
  tmpl.E_photon_lab = cfg.laser.E_photon;
  doc.rows.push_back({"pump", csv::format_number(pi_pulse_intensity(setup.system, setup.frame,
                                                                    tmpl, Branch::pump) /
                                                 consts::Wcm2)});
  tmpl.theta = setup.theta_S;
  tmpl.E_photon_lab = setup.E_stokes;
  doc.rows.push_back({"stokes", csv::format_number(pi_pulse_intensity(setup.system, setup.frame,
                                                                      tmpl, Branch::stokes) /
                                                   consts::Wcm2)});
  doc.comments = provenance(cfg);
  emit(doc, cfg.out);
  return 0;
}

int run_detuning(const RunConfig& cfg) {
  const Setup setup = setup_of(cfg);
  const double half = cfg.detuning.max_meV * consts::meV / consts::hbar;  // rad/s
  const DetuningCurve curve =
      detuning_robustness(setup, cfg.intensity_Wcm2 * consts::Wcm2,
                          linspace(-half, half, cfg.detuning.points), scan_options(cfg));

  csv::Document doc = csv::detuning_table(curve);
  doc.comments = provenance(cfg);
  doc.comments.push_back("delay_s " + csv::format_number(curve.delay));
  doc.comments.push_back("eta0 " + csv::format_number(curve.eta0));
  doc.comments.push_back("max_drop " + csv::format_number(curve.max_drop));
  emit(doc, cfg.out);
  return 0;
}

int run_mismatch(const RunConfig& cfg) {
  const Setup setup = setup_of(cfg);
  const MismatchSurface surface = mismatch_robustness(
      setup, cfg.intensity_Wcm2 * consts::Wcm2,
      linspace(-cfg.mismatch.dtheta_max_rad, cfg.mismatch.dtheta_max_rad,
               cfg.mismatch.theta_points),
      linspace(-cfg.mismatch.dgamma_rel_max, cfg.mismatch.dgamma_rel_max,
               cfg.mismatch.gamma_points),
      cfg.mismatch.multipliers, scan_options(cfg));

  csv::Document doc = csv::mismatch_table(surface);
  doc.comments = provenance(cfg);
  doc.comments.push_back("delay_s " + csv::format_number(surface.delay));
  doc.comments.push_back("min_eta " + csv::format_number(surface.min_eta));
  for (const auto& [mult, eta] : surface.ladder)
    doc.comments.push_back("ladder x" + csv::format_number(mult) + " min_eta " +
                           csv::format_number(eta));
  doc.comments.push_back("restoring_multiplier " +
                         (surface.restoring_multiplier
                              ? csv::format_number(*surface.restoring_multiplier)
                              : std::string("none")));
  emit(doc, cfg.out);
  return 0;
}

int run_presets() {
  std::cout << "nuclei:\n";
  for (const char* name : {"re185", "tc97", "gd154", "er168"}) {
    const NuclearSystem s = build_system(preset_nucleus(name));
    std::cout << "  " << name << "  A=" << s.mass_number
              << "  E2=" << csv::format_number(consts::to_keV(s.E2)) << " keV"
              << "  E3=" << csv::format_number(consts::to_keV(s.E3)) << " keV"
              << "  Gamma3=" << csv::format_number(consts::to_eV(s.Gamma3)) << " eV\n";
  }
  std::cout << "lasers:\n";
  for (const LaserProfile& l : {sxfel(), xfelo()}) {
    std::cout << "  " << l.name << "  " << csv::format_number(consts::to_keV(l.E_photon))
              << " keV  " << csv::format_number(l.T_lab / 1e-12) << " ps  "
              << csv::format_number(l.bandwidth / consts::meV) << " meV\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"population-transfer planner for x-ray driven nuclear Lambda schemes"};
  app.set_version_flag("--version", std::string(tool_name) + " " + tool_version);
  app.require_subcommand(1);

  CliArgs a;

  std::string plan_preset = "all", plan_laser = "all", plan_geometry = "crossed", plan_out;
  CLI::App* plan = app.add_subcommand("plan", "beam energies, Lorentz factors, and angles");
  plan->add_option("--preset", plan_preset, "nucleus name or \"all\"");
  plan->add_option("--laser", plan_laser, "sxfel | xfelo | all");
  plan->add_option("--geometry", plan_geometry, "copro | crossed | both");
  plan->add_option("--out", plan_out, "output CSV path (default stdout)");

  CLI::App* simulate = app.add_subcommand("simulate", "time evolution at one operating point");
  add_common(simulate, a);

  CLI::App* sweep = app.add_subcommand("sweep", "efficiency vs pump intensity");
  add_common(sweep, a);
  sweep->add_option("--imin", a.imin, "lowest pump intensity, W/cm^2");
  sweep->add_option("--imax", a.imax, "highest pump intensity, W/cm^2");
  sweep->add_option("--points", a.points, "grid points");

  CLI::App* pipulse = app.add_subcommand("pipulse", "pi-pulse peak intensity per branch");
  add_common(pipulse, a);

  CLI::App* rdet = app.add_subcommand("robust-detuning", "efficiency under two-photon detuning");
  add_common(rdet, a);

  CLI::App* rmis =
      app.add_subcommand("robust-mismatch", "efficiency under angle and gamma mismatch");
  add_common(rmis, a);

  CLI::App* presets = app.add_subcommand("presets", "list built-in nuclei and lasers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plan->parsed()) return run_plan(plan_preset, plan_laser, plan_geometry, plan_out);
    if (presets->parsed()) return run_presets();
    if (simulate->parsed()) return run_simulate(merge(simulate, a));
    if (sweep->parsed()) return run_sweep(merge(sweep, a));
    if (pipulse->parsed()) return run_pipulse(merge(pipulse, a));
    if (rdet->parsed()) return run_detuning(merge(rdet, a));
    if (rmis->parsed()) return run_mismatch(merge(rmis, a));
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const IntegrationError& e) {
    std::cerr << "integration failed at t = " << e.t_fail << " s: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  return 0;
}
