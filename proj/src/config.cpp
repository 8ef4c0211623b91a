#include "ncpt/config.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ncpt/constants.hpp"
#include "ncpt/scan.hpp"
#include "ncpt/version.hpp"

namespace ncpt {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

// Pulls keys out of `node` one by one; whatever is left at the end is unknown.
class Object {
 public:
  Object(json node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_, "expected an object");
  }

  std::optional<json> take(const std::string& key) {
    auto it = node_.find(key);
    if (it == node_.end()) return std::nullopt;
    json v = *it;
    node_.erase(it);
    return v;
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    if (!node_.empty())
      fail(at(node_.begin().key()), "unknown key");
  }

 private:
  json node_;
  std::string path_;
};

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

double nonneg(const json& v, const std::string& path) {
  double x = number(v, path);
  if (x < 0.0) fail(path, "must be non-negative");
  return x;
}

double positive(const json& v, const std::string& path) {
  double x = number(v, path);
  if (x <= 0.0) fail(path, "must be positive");
  return x;
}

int int_at_least(const json& v, const std::string& path, int lo) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  auto x = v.get<long>();
  if (x < lo) fail(path, "must be >= " + std::to_string(lo));
  return static_cast<int>(x);
}

std::string string_of(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

TransitionSpec parse_transition(const json& v, const std::string& path) {
  Object obj(v, path);
  TransitionSpec spec;
  auto kind = obj.take("kind");
  if (!kind) fail(path + ".kind", "required");
  std::string k = string_of(*kind, obj.at("kind"));
  if (k == "E")
    spec.kind = Multipolarity::electric;
  else if (k == "M")
    spec.kind = Multipolarity::magnetic;
  else
    fail(obj.at("kind"), "expected \"E\" or \"M\"");
  auto order = obj.take("order");
  if (!order) fail(path + ".order", "required");
  spec.order = int_at_least(*order, obj.at("order"), 1);
  auto b = obj.take("B_wu");
  if (!b) fail(path + ".B_wu", "required");
  spec.B_wu = positive(*b, obj.at("B_wu"));
  obj.finish();
  return spec;
}

NuclearConfig parse_nucleus(const json& v, const std::string& path) {
  Object obj(v, path);
  NuclearConfig nc;
  if (auto x = obj.take("name")) nc.name = string_of(*x, obj.at("name"));
  auto req = [&](const char* key) {
    auto x = obj.take(key);
    if (!x) fail(path + "." + key, "required");
    return *x;
  };
  nc.A = int_at_least(req("A"), obj.at("A"), 1);
  nc.E1_keV = nonneg(req("E1_keV"), obj.at("E1_keV"));
  nc.E2_keV = nonneg(req("E2_keV"), obj.at("E2_keV"));
  nc.E3_keV = nonneg(req("E3_keV"), obj.at("E3_keV"));
  nc.t31 = parse_transition(req("t31"), path + ".t31");
  nc.t32 = parse_transition(req("t32"), path + ".t32");
  if (auto x = obj.take("extra_loss_eV")) nc.extra_loss_eV = nonneg(*x, obj.at("extra_loss_eV"));
  if (auto x = obj.take("Gamma3_eV")) nc.Gamma3_eV = positive(*x, obj.at("Gamma3_eV"));
  if (auto x = obj.take("Gamma2_eV")) nc.Gamma2_eV = nonneg(*x, obj.at("Gamma2_eV"));
  obj.finish();
  return nc;
}

LaserProfile parse_laser(const json& v, const std::string& path) {
  if (v.is_string()) {
    std::string name = v.get<std::string>();
    try {
      return laser_by_name(name);
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  }
  Object obj(v, path);
  LaserProfile p;
  p.name = "custom";
  if (auto x = obj.take("name")) p.name = string_of(*x, obj.at("name"));
  auto req = [&](const char* key) {
    auto x = obj.take(key);
    if (!x) fail(path + "." + key, "required");
    return *x;
  };
  p.E_photon = positive(req("photon_keV"), obj.at("photon_keV")) * consts::keV;
  p.T_lab = positive(req("duration_ps"), obj.at("duration_ps")) * 1e-12;
  p.bandwidth = positive(req("bandwidth_meV"), obj.at("bandwidth_meV")) * consts::meV;
  obj.finish();
  return p;
}

json transition_json(const TransitionSpec& t) {
  return json{{"kind", t.kind == Multipolarity::electric ? "E" : "M"},
              {"order", t.order},
              {"B_wu", t.B_wu}};
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  Object obj(root, "$");
  RunConfig cfg;

  if (auto x = obj.take("preset")) {
    cfg.preset = string_of(*x, obj.at("preset"));
    try {
      preset_nucleus(*cfg.preset);
    } catch (const std::invalid_argument& e) {
      fail(obj.at("preset"), e.what());
    }
  }
  if (auto x = obj.take("nucleus")) cfg.nucleus = parse_nucleus(*x, obj.at("nucleus"));
  if (!cfg.preset && !cfg.nucleus) throw ConfigError("config: need \"preset\" or \"nucleus\"");

  if (auto x = obj.take("laser")) cfg.laser = parse_laser(*x, obj.at("laser"));
  if (auto x = obj.take("geometry")) {
    std::string g = string_of(*x, obj.at("geometry"));
    if (g == "copro" || g == "copropagating")
      cfg.geometry = Geometry::copropagating;
    else if (g == "crossed")
      cfg.geometry = Geometry::crossed;
    else
      fail(obj.at("geometry"), "expected \"copro\" or \"crossed\"");
  }
  if (auto x = obj.take("stokes_ratio")) cfg.stokes_ratio = positive(*x, obj.at("stokes_ratio"));
  if (auto x = obj.take("intensity_Wcm2"))
    cfg.intensity_Wcm2 = nonneg(*x, obj.at("intensity_Wcm2"));
  if (auto x = obj.take("delay_fs")) cfg.delay_fs = number(*x, obj.at("delay_fs"));

  if (auto x = obj.take("sweep")) {
    Object s(*x, obj.at("sweep"));
    if (auto y = s.take("I_min_Wcm2")) cfg.sweep.I_min_Wcm2 = positive(*y, s.at("I_min_Wcm2"));
    if (auto y = s.take("I_max_Wcm2")) cfg.sweep.I_max_Wcm2 = positive(*y, s.at("I_max_Wcm2"));
    if (auto y = s.take("points")) cfg.sweep.points = int_at_least(*y, s.at("points"), 2);
    s.finish();
    if (cfg.sweep.I_max_Wcm2 < cfg.sweep.I_min_Wcm2)
      fail(obj.at("sweep") + ".I_max_Wcm2", "must be >= I_min_Wcm2");
  }
  if (auto x = obj.take("detuning")) {
    Object s(*x, obj.at("detuning"));
    if (auto y = s.take("max_meV")) cfg.detuning.max_meV = positive(*y, s.at("max_meV"));
    if (auto y = s.take("points")) cfg.detuning.points = int_at_least(*y, s.at("points"), 2);
    s.finish();
  }
  if (auto x = obj.take("mismatch")) {
    Object s(*x, obj.at("mismatch"));
    if (auto y = s.take("dtheta_max_rad"))
      cfg.mismatch.dtheta_max_rad = positive(*y, s.at("dtheta_max_rad"));
    if (auto y = s.take("dgamma_rel_max"))
      cfg.mismatch.dgamma_rel_max = positive(*y, s.at("dgamma_rel_max"));
    if (auto y = s.take("theta_points"))
      cfg.mismatch.theta_points = int_at_least(*y, s.at("theta_points"), 2);
    if (auto y = s.take("gamma_points"))
      cfg.mismatch.gamma_points = int_at_least(*y, s.at("gamma_points"), 2);
    if (auto y = s.take("multipliers")) {
      if (!y->is_array() || y->empty()) fail(s.at("multipliers"), "expected a non-empty array");
      cfg.mismatch.multipliers.clear();
      for (std::size_t i = 0; i < y->size(); ++i)
        cfg.mismatch.multipliers.push_back(
            positive((*y)[i], s.at("multipliers") + "[" + std::to_string(i) + "]"));
    }
    s.finish();
  }
  if (auto x = obj.take("integrator")) {
    Object s(*x, obj.at("integrator"));
    if (auto y = s.take("rtol")) cfg.step.rtol = positive(*y, s.at("rtol"));
    if (auto y = s.take("atol")) cfg.step.atol = positive(*y, s.at("atol"));
    if (auto y = s.take("max_steps"))
      cfg.step.max_steps = int_at_least(*y, s.at("max_steps"), 1);
    if (auto y = s.take("fixed_step_s")) cfg.step.fixed_step = positive(*y, s.at("fixed_step_s"));
    s.finish();
  }
  if (auto x = obj.take("workers")) cfg.workers = int_at_least(*x, obj.at("workers"), 1);
  if (auto x = obj.take("out")) cfg.out = string_of(*x, obj.at("out"));
  if (auto x = obj.take("convention")) {
    std::string c = string_of(*x, obj.at("convention"));
    if (c == "strict_eq2")
      cfg.convention = IntensityConvention::strict_eq2;
    else if (c == "rest_frame")
      cfg.convention = IntensityConvention::rest_frame;
    else
      fail(obj.at("convention"), "expected \"strict_eq2\" or \"rest_frame\"");
  }
  obj.finish();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string effective_config_json(const RunConfig& config) {
  json root;
  if (config.preset) root["preset"] = *config.preset;
  if (config.nucleus) {
    const NuclearConfig& n = *config.nucleus;
    json nj{{"name", n.name},     {"A", n.A},
            {"E1_keV", n.E1_keV}, {"E2_keV", n.E2_keV},
            {"E3_keV", n.E3_keV}, {"t31", transition_json(n.t31)},
            {"t32", transition_json(n.t32)}, {"Gamma2_eV", n.Gamma2_eV}};
    if (n.extra_loss_eV) nj["extra_loss_eV"] = *n.extra_loss_eV;
    if (n.Gamma3_eV) nj["Gamma3_eV"] = *n.Gamma3_eV;
    root["nucleus"] = nj;
  }
  root["laser"] = json{{"name", config.laser.name},
                       {"photon_keV", consts::to_keV(config.laser.E_photon)},
                       {"duration_ps", config.laser.T_lab / 1e-12},
                       {"bandwidth_meV", config.laser.bandwidth / consts::meV}};
  root["geometry"] = config.geometry == Geometry::crossed ? "crossed" : "copro";
  if (config.stokes_ratio) root["stokes_ratio"] = *config.stokes_ratio;
  root["intensity_Wcm2"] = config.intensity_Wcm2;
  root["delay_fs"] = config.delay_fs;
  root["sweep"] = json{{"I_min_Wcm2", config.sweep.I_min_Wcm2},
                       {"I_max_Wcm2", config.sweep.I_max_Wcm2},
                       {"points", config.sweep.points}};
  root["detuning"] =
      json{{"max_meV", config.detuning.max_meV}, {"points", config.detuning.points}};
  root["mismatch"] = json{{"dtheta_max_rad", config.mismatch.dtheta_max_rad},
                          {"dgamma_rel_max", config.mismatch.dgamma_rel_max},
                          {"theta_points", config.mismatch.theta_points},
                          {"gamma_points", config.mismatch.gamma_points},
                          {"multipliers", config.mismatch.multipliers}};
  json integ{{"rtol", config.step.rtol},
             {"atol", config.step.atol},
             {"max_steps", config.step.max_steps}};
  if (config.step.fixed_step) integ["fixed_step_s"] = *config.step.fixed_step;
  root["integrator"] = integ;
  // workers and out are execution details: they must not change results, so
  // they stay out of the reproducibility hash
  root["convention"] =
      config.convention == IntensityConvention::strict_eq2 ? "strict_eq2" : "rest_frame";
  return root.dump();  // nlohmann objects iterate sorted by key
}

std::string config_hash(const RunConfig& config) {
  const std::string text = effective_config_json(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> provenance(const RunConfig& config) {
  std::vector<std::string> lines;
  lines.push_back(std::string(tool_name) + " " + tool_version);
  lines.push_back("config " + config_hash(config));
  std::string nucleus = config.nucleus ? (config.nucleus->name.empty() ? "custom"
                                                                       : config.nucleus->name)
                                       : *config.preset;
  lines.push_back("nucleus " + nucleus + ", laser " + config.laser.name + ", geometry " +
                  (config.geometry == Geometry::crossed ? "crossed" : "copro"));
  return lines;
}

int resolve_workers(const RunConfig& config) {
  if (const char* env = std::getenv("NCPT_WORKERS")) {
    char* end = nullptr;
    long n = std::strtol(env, &end, 10);
    if (end && *end == '\0' && n >= 1) return static_cast<int>(n);
    throw ConfigError("config: NCPT_WORKERS must be a positive integer");
  }
  return config.workers;
}

NuclearSystem config_system(const RunConfig& config) {
  if (config.nucleus) return build_system(*config.nucleus);
  return build_system(preset_nucleus(*config.preset));
}

}  // namespace ncpt
