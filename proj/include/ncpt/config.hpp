#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncpt/dynamics.hpp"
#include "ncpt/integrator.hpp"
#include "ncpt/kinematics.hpp"
#include "ncpt/nuclear.hpp"

namespace ncpt {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepSettings {
  double I_min_Wcm2 = 1e15;
  double I_max_Wcm2 = 1e25;
  int points = 41;
};

struct DetuningSettings {
  double max_meV = 10.0;  // half-range of the scanned rest-frame detuning
  int points = 9;
};

struct MismatchSettings {
  double dtheta_max_rad = 1e-5;   // half-range of the Stokes-angle offset
  double dgamma_rel_max = 1e-6;   // half-range of the relative gamma offset
  int theta_points = 5;
  int gamma_points = 5;
  std::vector<double> multipliers = {1.0, 3.0};  // intensity ladder
};

struct RunConfig {
  std::optional<std::string> preset;     // built-in nucleus name
  std::optional<NuclearConfig> nucleus;  // explicit level scheme (overrides preset)
  LaserProfile laser = sxfel();
  Geometry geometry = Geometry::copropagating;
  std::optional<double> stokes_ratio;    // I_S/I_p; default from the preset table
  double intensity_Wcm2 = 1e19;          // pump peak, lab frame
  double delay_fs = 0.0;                 // rest frame, tau_pump - tau_stokes
  SweepSettings sweep;
  DetuningSettings detuning;
  MismatchSettings mismatch;
  StepControl step;
  int workers = 1;
  std::string out;                       // CSV path; empty writes to stdout
  IntensityConvention convention = IntensityConvention::strict_eq2;
};

// Strict parse: unknown keys, wrong types, and negative magnitudes are
// ConfigError with the offending key path in the message.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Fully resolved configuration as canonical JSON (sorted keys, defaults
// filled in), the basis of the reproducibility hash.
std::string effective_config_json(const RunConfig& config);

// FNV-1a 64-bit over effective_config_json, as 16 hex digits
std::string config_hash(const RunConfig& config);

// Comment lines stamped on every CSV output: tool id, config hash, inputs.
// Deliberately no timestamps so reruns are byte-identical.
std::vector<std::string> provenance(const RunConfig& config);

// NCPT_WORKERS environment variable overrides the configured count
int resolve_workers(const RunConfig& config);

// Nucleus from the explicit scheme if present, else the preset
NuclearSystem config_system(const RunConfig& config);

}  // namespace ncpt
