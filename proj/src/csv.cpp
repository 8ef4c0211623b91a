#include "ncpt/csv.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ncpt/constants.hpp"

namespace ncpt::csv {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string Document::str() const {
  std::ostringstream out;
  for (const auto& c : comments) out << "# " << c << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << quote(columns[i]);
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << quote(row[i]);
    out << "\n";
  }
  return out.str();
}

static std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

Document parse(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      doc.comments.push_back(line.size() > 2 ? line.substr(2) : "");
      continue;
    }
    if (!have_header) {
      doc.columns = split_record(line);
      have_header = true;
    } else {
      doc.rows.push_back(split_record(line));
    }
  }
  if (!have_header) throw std::invalid_argument("csv::parse: missing header row");
  return doc;
}

Document plan_table(const std::vector<std::pair<std::string, Setup>>& entries) {
  Document doc;
  doc.columns = {"nucleus",    "geometry", "E_pump_keV", "gamma",
                 "theta_S_rad", "E_S_keV",  "D_pump",     "D_stokes"};
  for (const auto& [name, s] : entries) {
    doc.rows.push_back({name,
                        s.geometry == Geometry::crossed ? "crossed" : "copro",
                        format_number(consts::to_keV(s.laser.E_photon)),
                        format_number(s.frame.gamma),
                        format_number(s.theta_S),
                        format_number(consts::to_keV(s.E_stokes)),
                        format_number(s.frame.D_pump),
                        format_number(s.frame.D_stokes)});
  }
  return doc;
}

Document trajectory_table(const Trajectory& trajectory) {
  Document doc;
  doc.columns = {"t_s",      "rho11",    "rho22",    "rho33",    "re_rho12", "im_rho12",
                 "re_rho13", "im_rho13", "re_rho23", "im_rho23", "p_loss"};
  for (const auto& p : trajectory.points) {
    doc.rows.push_back({format_number(p.t),
                        format_number(p.population(1)),
                        format_number(p.population(2)),
                        format_number(p.population(3)),
                        format_number(p.rho(0, 1).real()),
                        format_number(p.rho(0, 1).imag()),
                        format_number(p.rho(0, 2).real()),
                        format_number(p.rho(0, 2).imag()),
                        format_number(p.rho(1, 2).real()),
                        format_number(p.rho(1, 2).imag()),
                        format_number(p.p_loss)});
  }
  return doc;
}

Document sweep_table(const std::vector<SweepRow>& rows) {
  Document doc;
  doc.columns = {"I_p_Wcm2",     "delay_s",      "eta",          "regime",
                 "omega_p_peak", "omega_s_peak", "adiabaticity", "max_rho33"};
  for (const auto& r : rows) {
    doc.rows.push_back({format_number(r.I_pump / consts::Wcm2),
                        format_number(r.delay),
                        format_number(r.eta),
                        r.regime,
                        format_number(r.omega_p_peak),
                        format_number(r.omega_s_peak),
                        format_number(r.adiabaticity),
                        format_number(r.max_rho33)});
  }
  return doc;
}

Document detuning_table(const DetuningCurve& curve) {
  Document doc;
  doc.columns = {"delta_meV", "eta"};
  for (std::size_t i = 0; i < curve.delta.size(); ++i) {
    doc.rows.push_back(
        {format_number(curve.delta[i] * consts::hbar / consts::meV),
         format_number(curve.eta[i])});
  }
  return doc;
}

Document mismatch_table(const MismatchSurface& surface) {
  Document doc;
  doc.columns = {"dtheta_rad", "dgamma_rel", "eta"};
  for (std::size_t i = 0; i < surface.dtheta.size(); ++i)
    for (std::size_t j = 0; j < surface.dgamma.size(); ++j)
      doc.rows.push_back({format_number(surface.dtheta[i]),
                          format_number(surface.dgamma[j]),
                          format_number(surface.eta[i][j])});
  return doc;
}

}  // namespace ncpt::csv
