#include "pcdeer/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace pcdeer {

SpinSpecies SimConfig::nv_species() const {
  SpinSpecies s = SpinSpecies::nv();
  s.g = nv.g;
  s.zero_field_d_mhz = nv.d_mhz;
  return s;
}

SpinSpecies SimConfig::p1_species() const {
  SpinSpecies s = SpinSpecies::p1();
  s.g = p1.g;
  s.nuclei[0].a_par_mhz = p1.a_par_mhz;
  s.nuclei[0].a_perp_mhz = p1.a_perp_mhz;
  s.nuclei[0].q_perp_mhz = p1.q_perp_mhz;
  s.nuclei[0].g_n = p1.nuclear_g;
  return s;
}

SpinSpecies SimConfig::nvh_species() const {
  SpinSpecies s = SpinSpecies::nvh();
  s.g = nvh.g;
  s.nuclei[0].a_par_mhz = nvh.ah_par_mhz;
  s.nuclei[0].a_perp_mhz = nvh.ah_perp_mhz;
  s.nuclei[1].a_par_mhz = nvh.an_par_mhz;
  s.nuclei[1].a_perp_mhz = nvh.an_perp_mhz;
  return s;
}

SpinSpecies SimConfig::species_by_name(const std::string& name) const {
  if (name == "nv") return nv_species();
  if (name == "p1") return p1_species();
  if (name == "nvh") return nvh_species();
  throw validation_error("unknown species '" + name + "' (nv|p1|nvh)");
}

LineshapeConfig SimConfig::lineshape_config() const {
  return LineshapeConfig{ensemble.lineshape, ensemble.fwhm_mhz};
}

ReadoutModel SimConfig::readout_model(Channel channel) const {
  ReadoutModel m;
  m.channel = channel;
  m.contrast = channel == Channel::PC ? readout.contrast_pc : readout.contrast_pl;
  m.baseline = readout.baseline;
  return m;
}

ReadoutModel SimConfig::readout_model() const { return readout_model(readout.channel); }

EnsembleModel SimConfig::ensemble_model() const {
  EnsembleModel m;
  m.mean_coupling_mhz = ensemble.delta_mhz;
  m.tau_ns = pulse.tau_ns;
  m.omega_rf_mhz = pulse.omega_rf_mhz;
  m.t_rf_ns = pulse.tpi_rf_ns;
  m.lineshape = lineshape_config();
  return m;
}

namespace {

// Aligned-NV orientation: the axial one when the field sits on a <111> axis,
// the first axis otherwise.
Eigen::Vector3d aligned_axis(const FieldConfig& field) {
  const OrientationSet orient = orientation_axes();
  const auto axial = orient.axial_for(field);
  for (int k = 0; k < 4; ++k) {
    if (axial[k]) return orient.axes[k];
  }
  return orient.axes[0];
}

Eigen::Vector3d transverse_direction(const Eigen::Vector3d& v) {
  const Eigen::Vector3d b = v.normalized();
  const Eigen::Vector3d seed =
      std::abs(b.x()) < 0.9 ? Eigen::Vector3d(1, 0, 0) : Eigen::Vector3d(0, 1, 0);
  return b.cross(seed).normalized();
}

}  // namespace

PairSystem SimConfig::pair_system() const {
  PairSystem sys;
  sys.bath = pair.bath;
  sys.coupling_mhz = pair.coupling_mhz;
  sys.field = field;
  const OrientationSet orient = orientation_axes();
  const auto axial = orient.axial_for(field);
  int ax_idx = 0, na_idx = 1;
  for (int k = 0; k < 4; ++k) {
    if (axial[k]) ax_idx = k;
  }
  for (int k = 0; k < 4; ++k) {
    if (!axial[k]) {
      na_idx = k;
      break;
    }
  }
  sys.bath_axis = pair.bath_axial ? orient.axes[ax_idx] : orient.axes[na_idx];
  const auto names = named_frequencies();
  const auto f2 = names.find("f2");
  sys.f_nv_mhz = f2 != names.end() ? f2->second : nv.d_mhz;
  sys.mw_frame_mhz = sys.f_nv_mhz;

  if (pair.bath == BathKind::BareSpinHalf) {
    SpinSpecies bare;
    bare.name = "spin-half";
    bare.electron_spin = 0.5;
    bare.g = p1.g;
    sys.bath_species_override = bare;
  } else if (pair.bath == BathKind::P1) {
    sys.bath_species_override = p1_species();
  } else {
    sys.bath_species_override = nvh_species();
  }
  return sys;
}

std::map<std::string, double> SimConfig::named_frequencies() const {
  std::map<std::string, double> names;

  // Aligned NV transitions.
  const Eigen::Vector3d nv_axis = aligned_axis(field);
  const EigenSystem nv_eig = eigh(build_species_hamiltonian(nv_species(), field, nv_axis));
  const Operator nv_drive =
      electron_vector_operator(nv_species(), transverse_direction(field.unit_direction()));
  const auto nv_lines = transition_lines(nv_eig, nv_drive, 0.05);
  if (!nv_lines.empty()) {
    names["f2"] = nv_lines.front().frequency_mhz;
    names["f1"] = nv_lines.back().frequency_mhz;
  }

  // P1 group centers and NVH hydrogen clusters (weighted means), only
  // resolvable when the field is aligned with one <111> axis.
  const auto axial = orientation_axes().axial_for(field);
  const bool on_axis = std::count(axial.begin(), axial.end(), true) == 1;
  if (on_axis) {
    auto group_center = [](const StickSpectrum& s, LineGroup g) {
      double num = 0, den = 0;
      for (const auto& l : s.lines) {
        if (l.group == g) {
          num += l.multiplicity * l.intensity * l.frequency_mhz;
          den += l.multiplicity * l.intensity;
        }
      }
      return den > 0 ? num / den : 0.0;
    };
    try {
      const StickSpectrum p1s = stick_spectrum(p1_species(), field, ensemble.stick_threshold);
      names["group_i"] = group_center(p1s, LineGroup::I);
      names["group_ii"] = group_center(p1s, LineGroup::II);
      names["group_iii"] = group_center(p1s, LineGroup::III);
      names["group_iv"] = group_center(p1s, LineGroup::IV);
      names["group_v"] = group_center(p1s, LineGroup::V);
    } catch (const validation_error&) {
      // Incomplete grouping at exotic parameters: leave group names undefined.
    }
    try {
      const StickSpectrum nvhs = stick_spectrum(nvh_species(), field, ensemble.stick_threshold);
      names["nvh_low"] = group_center(nvhs, LineGroup::NvhLow);
      names["nvh_high"] = group_center(nvhs, LineGroup::NvhHigh);
    } catch (const validation_error&) {
    }
  }

  for (const auto& [k, v] : frequency_overrides) names[k] = v;
  return names;
}

SequenceContext SimConfig::sequence_context() const {
  SequenceContext ctx;
  ctx.named_frequencies_mhz = named_frequencies();
  ctx.omega_mw_mhz = pulse.omega_mw_mhz;
  ctx.omega_rf_mhz = pulse.omega_rf_mhz;
  return ctx;
}

void SimConfig::validate() const {
  field.validate();
  if (nv.d_mhz < 0) throw validation_error("[nv] d_mhz must be >= 0");
  if (nv.g <= 0 || p1.g <= 0 || nvh.g <= 0) throw validation_error("g-factors must be > 0");
  if (pulse.omega_mw_mhz <= 0) throw validation_error("[pulse] omega_mw_mhz must be > 0");
  if (pulse.omega_rf_mhz <= 0) throw validation_error("[pulse] omega_rf_mhz must be > 0");
  if (pulse.tau_ns < 0) throw validation_error("[pulse] tau_ns must be >= 0");
  if (pulse.tpi_rf_ns < 0) throw validation_error("[pulse] tpi_rf_ns must be >= 0");
  if (pair.coupling_mhz < 0) throw validation_error("[pair] coupling_mhz must be >= 0");
  if (ensemble.delta_mhz < 0) throw validation_error("[ensemble] delta_mhz must be >= 0");
  if (!(ensemble.fwhm_mhz > 0)) throw validation_error("[ensemble] fwhm_mhz must be > 0");
  if (ensemble.stick_threshold <= 0 || ensemble.stick_threshold >= 1) {
    throw validation_error("[ensemble] stick_threshold must lie in (0,1)");
  }
  if (readout.contrast_pc < 0 || readout.contrast_pc > 1 || readout.contrast_pl < 0 ||
      readout.contrast_pl > 1) {
    throw validation_error("[readout] contrast must lie in [0,1]");
  }
  sweep.validate();
}

namespace {

std::string fmt(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string SimConfig::to_text() const {
  std::ostringstream o;
  o << "[field]\n";
  o << "magnitude_gauss = " << fmt(field.magnitude_gauss) << "\n";
  o << "direction = " << fmt(field.direction.x()) << " " << fmt(field.direction.y()) << " "
    << fmt(field.direction.z()) << "\n";
  o << "\n[nv]\n";
  o << "g = " << fmt(nv.g) << "\n";
  o << "d_mhz = " << fmt(nv.d_mhz) << "\n";
  o << "\n[p1]\n";
  o << "g = " << fmt(p1.g) << "\n";
  o << "a_par_mhz = " << fmt(p1.a_par_mhz) << "\n";
  o << "a_perp_mhz = " << fmt(p1.a_perp_mhz) << "\n";
  o << "q_perp_mhz = " << fmt(p1.q_perp_mhz) << "\n";
  o << "nuclear_g = " << fmt(p1.nuclear_g) << "\n";
  o << "\n[nvh]\n";
  o << "g = " << fmt(nvh.g) << "\n";
  o << "ah_par_mhz = " << fmt(nvh.ah_par_mhz) << "\n";
  o << "ah_perp_mhz = " << fmt(nvh.ah_perp_mhz) << "\n";
  o << "an_par_mhz = " << fmt(nvh.an_par_mhz) << "\n";
  o << "an_perp_mhz = " << fmt(nvh.an_perp_mhz) << "\n";
  o << "\n[pulse]\n";
  o << "omega_mw_mhz = " << fmt(pulse.omega_mw_mhz) << "\n";
  o << "omega_rf_mhz = " << fmt(pulse.omega_rf_mhz) << "\n";
  o << "tau_ns = " << fmt(pulse.tau_ns) << "\n";
  o << "tpi_rf_ns = " << fmt(pulse.tpi_rf_ns) << "\n";
  o << "\n[pair]\n";
  o << "coupling_mhz = " << fmt(pair.coupling_mhz) << "\n";
  o << "bath = " << to_string(pair.bath) << "\n";
  o << "bath_orientation = " << (pair.bath_axial ? "axial" : "nonaxial") << "\n";
  o << "\n[ensemble]\n";
  o << "delta_mhz = " << fmt(ensemble.delta_mhz) << "\n";
  o << "lineshape = " << to_string(ensemble.lineshape) << "\n";
  o << "fwhm_mhz = " << fmt(ensemble.fwhm_mhz) << "\n";
  o << "stick_threshold = " << fmt(ensemble.stick_threshold) << "\n";
  o << "\n[readout]\n";
  o << "channel = " << to_string(readout.channel) << "\n";
  o << "contrast_pc = " << fmt(readout.contrast_pc) << "\n";
  o << "contrast_pl = " << fmt(readout.contrast_pl) << "\n";
  o << "baseline = " << fmt(readout.baseline) << "\n";
  o << "\n[sweep]\n";
  o << "min_mhz = " << fmt(sweep.min_mhz) << "\n";
  o << "max_mhz = " << fmt(sweep.max_mhz) << "\n";
  o << "points = " << sweep.points << "\n";
  if (!frequency_overrides.empty()) {
    o << "\n[frequencies]\n";
    for (const auto& [k, v] : frequency_overrides) o << k << " = " << fmt(v) << "\n";
  }
  return o.str();
}

namespace {

struct KeyContext {
  int line;
  std::string section, key, value;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream oss;
    oss << "config error at line " << line << " ([" << section << "] " << key
        << "): " << msg;
    throw validation_error(oss.str());
  }
};

double parse_double(const KeyContext& kc) {
  double v = 0;
  const char* b = kc.value.data();
  const char* e = b + kc.value.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) kc.fail("expected a number, got '" + kc.value + "'");
  if (!std::isfinite(v)) kc.fail("value must be finite");
  return v;
}

int parse_int(const KeyContext& kc) {
  int v = 0;
  const char* b = kc.value.data();
  const char* e = b + kc.value.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e) {
    kc.fail("expected an integer, got '" + kc.value + "'");
  }
  return v;
}

Eigen::Vector3d parse_vec3(const KeyContext& kc) {
  std::istringstream iss(kc.value);
  double x, y, z;
  if (!(iss >> x >> y >> z)) kc.fail("expected three numbers, got '" + kc.value + "'");
  std::string rest;
  if (iss >> rest) kc.fail("expected exactly three numbers");
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
    kc.fail("vector components must be finite");
  }
  return Eigen::Vector3d(x, y, z);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  SimConfig cfg;
  std::istringstream iss(text);
  std::string raw;
  std::string section;
  int line_no = 0;

  using Setter = std::function<void(SimConfig&, const KeyContext&)>;
  static const std::map<std::pair<std::string, std::string>, Setter> setters = {
      {{"field", "magnitude_gauss"},
       [](SimConfig& c, const KeyContext& k) {
         c.field.magnitude_gauss = parse_double(k);
         if (c.field.magnitude_gauss < 0) k.fail("field magnitude must be >= 0");
       }},
      {{"field", "direction"},
       [](SimConfig& c, const KeyContext& k) {
         c.field.direction = parse_vec3(k);
         if (c.field.direction.norm() < 1e-12) k.fail("direction must be nonzero");
       }},
      {{"nv", "g"}, [](SimConfig& c, const KeyContext& k) { c.nv.g = parse_double(k); }},
      {{"nv", "d_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.nv.d_mhz = parse_double(k); }},
      {{"p1", "g"}, [](SimConfig& c, const KeyContext& k) { c.p1.g = parse_double(k); }},
      {{"p1", "a_par_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.p1.a_par_mhz = parse_double(k); }},
      {{"p1", "a_perp_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.p1.a_perp_mhz = parse_double(k); }},
      {{"p1", "q_perp_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.p1.q_perp_mhz = parse_double(k); }},
      {{"p1", "nuclear_g"},
       [](SimConfig& c, const KeyContext& k) { c.p1.nuclear_g = parse_double(k); }},
      {{"nvh", "g"}, [](SimConfig& c, const KeyContext& k) { c.nvh.g = parse_double(k); }},
      {{"nvh", "ah_par_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.nvh.ah_par_mhz = parse_double(k); }},
      {{"nvh", "ah_perp_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.nvh.ah_perp_mhz = parse_double(k); }},
      {{"nvh", "an_par_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.nvh.an_par_mhz = parse_double(k); }},
      {{"nvh", "an_perp_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.nvh.an_perp_mhz = parse_double(k); }},
      {{"pulse", "omega_mw_mhz"},
       [](SimConfig& c, const KeyContext& k) {
         c.pulse.omega_mw_mhz = parse_double(k);
         if (c.pulse.omega_mw_mhz <= 0) k.fail("must be > 0");
       }},
      {{"pulse", "omega_rf_mhz"},
       [](SimConfig& c, const KeyContext& k) {
         c.pulse.omega_rf_mhz = parse_double(k);
         if (c.pulse.omega_rf_mhz <= 0) k.fail("must be > 0");
       }},
      {{"pulse", "tau_ns"},
       [](SimConfig& c, const KeyContext& k) {
         c.pulse.tau_ns = parse_double(k);
         if (c.pulse.tau_ns < 0) k.fail("must be >= 0");
       }},
      {{"pulse", "tpi_rf_ns"},
       [](SimConfig& c, const KeyContext& k) {
         c.pulse.tpi_rf_ns = parse_double(k);
         if (c.pulse.tpi_rf_ns < 0) k.fail("must be >= 0");
       }},
      {{"pair", "coupling_mhz"},
       [](SimConfig& c, const KeyContext& k) {
         c.pair.coupling_mhz = parse_double(k);
         if (c.pair.coupling_mhz < 0) k.fail("must be >= 0");
       }},
      {{"pair", "bath"},
       [](SimConfig& c, const KeyContext& k) {
         try {
           c.pair.bath = bath_kind_from_string(lower(k.value));
         } catch (const validation_error& e) {
           k.fail(e.what());
         }
       }},
      {{"pair", "bath_orientation"},
       [](SimConfig& c, const KeyContext& k) {
         const std::string v = lower(k.value);
         if (v == "axial") {
           c.pair.bath_axial = true;
         } else if (v == "nonaxial" || v == "non-axial") {
           c.pair.bath_axial = false;
         } else {
           k.fail("expected axial|nonaxial");
         }
       }},
      {{"ensemble", "delta_mhz"},
       [](SimConfig& c, const KeyContext& k) {
         c.ensemble.delta_mhz = parse_double(k);
         if (c.ensemble.delta_mhz < 0) k.fail("must be >= 0");
       }},
      {{"ensemble", "lineshape"},
       [](SimConfig& c, const KeyContext& k) {
         try {
           c.ensemble.lineshape = lineshape_from_string(lower(k.value));
         } catch (const validation_error& e) {
           k.fail(e.what());
         }
       }},
      {{"ensemble", "fwhm_mhz"},
       [](SimConfig& c, const KeyContext& k) {
         c.ensemble.fwhm_mhz = parse_double(k);
         if (!(c.ensemble.fwhm_mhz > 0)) k.fail("must be > 0");
       }},
      {{"ensemble", "stick_threshold"},
       [](SimConfig& c, const KeyContext& k) {
         c.ensemble.stick_threshold = parse_double(k);
         if (c.ensemble.stick_threshold <= 0 || c.ensemble.stick_threshold >= 1) {
           k.fail("must lie in (0,1)");
         }
       }},
      {{"readout", "channel"},
       [](SimConfig& c, const KeyContext& k) {
         try {
           c.readout.channel = channel_from_string(lower(k.value));
         } catch (const validation_error& e) {
           k.fail(e.what());
         }
       }},
      {{"readout", "contrast_pc"},
       [](SimConfig& c, const KeyContext& k) {
         c.readout.contrast_pc = parse_double(k);
         if (c.readout.contrast_pc < 0 || c.readout.contrast_pc > 1) k.fail("must be in [0,1]");
       }},
      {{"readout", "contrast_pl"},
       [](SimConfig& c, const KeyContext& k) {
         c.readout.contrast_pl = parse_double(k);
         if (c.readout.contrast_pl < 0 || c.readout.contrast_pl > 1) k.fail("must be in [0,1]");
       }},
      {{"readout", "baseline"},
       [](SimConfig& c, const KeyContext& k) { c.readout.baseline = parse_double(k); }},
      {{"sweep", "min_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.sweep.min_mhz = parse_double(k); }},
      {{"sweep", "max_mhz"},
       [](SimConfig& c, const KeyContext& k) { c.sweep.max_mhz = parse_double(k); }},
      {{"sweep", "points"},
       [](SimConfig& c, const KeyContext& k) {
         c.sweep.points = parse_int(k);
         if (c.sweep.points < 2) k.fail("need at least 2 points");
       }},
  };

  while (std::getline(iss, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw validation_error("config error at line " + std::to_string(line_no) +
                               ": malformed section header '" + line + "'");
      }
      section = lower(trim(line.substr(1, line.size() - 2)));
      static const std::array<std::string, 9> known = {
          "field", "nv", "p1", "nvh", "pulse", "pair", "ensemble", "readout", "sweep"};
      if (section != "frequencies" &&
          std::find(known.begin(), known.end(), section) == known.end()) {
        throw validation_error("config error at line " + std::to_string(line_no) +
                               ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw validation_error("config error at line " + std::to_string(line_no) +
                             ": expected 'key = value', got '" + line + "'");
    }
    KeyContext kc{line_no, section, lower(trim(line.substr(0, eq))), trim(line.substr(eq + 1))};
    if (kc.key.empty()) kc.fail("empty key");
    if (section.empty()) {
      throw validation_error("config error at line " + std::to_string(line_no) +
                             ": key '" + kc.key + "' outside any [section]");
    }
    if (section == "frequencies") {
      cfg.frequency_overrides[kc.key] = parse_double(kc);
      continue;
    }
    const auto it = setters.find({section, kc.key});
    if (it == setters.end()) {
      kc.fail("unknown key '" + kc.key + "' in section [" + section + "]");
    }
    it->second(cfg, kc);
  }

  cfg.validate();
  return cfg;
}

SimConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open config file '" + path + "'");
  std::ostringstream oss;
  oss << in.rdbuf();
  return parse_config(oss.str());
}

}  // namespace pcdeer
