#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pcdeer/config.hpp"
#include "pcdeer/spectrum.hpp"
#include "pcdeer/transitions.hpp"

namespace pcdeer {

inline constexpr const char* kVersion = "0.1.0";

// Flag-level overrides applied on top of the configuration.
struct CommandOptions {
  std::optional<std::string> species;
  std::optional<double> field_gauss;
  std::optional<double> tau_ns;
  std::optional<double> f_rf_mhz;
  std::optional<double> f_min_mhz;
  std::optional<double> f_max_mhz;
  std::optional<int> points;
  std::optional<double> t_rf_ns;
  std::optional<double> t_max_ns;
  std::optional<std::string> channel;
  std::optional<double> f1_mhz, f2_mhz, g;  // calibrate inputs
};

struct RunResult {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;  // resolved echo
  SimConfig config;                                             // resolved snapshot
  std::vector<Spectrum> outputs;
  std::vector<TransitionLine> sticks;      // populated by `spectrum`
  std::map<std::string, double> scalars;   // populated by `calibrate`
  std::string version = kVersion;
};

// cmd in {spectrum, odmr, rabi, deer, deer-rabi, calibrate}.
RunResult run_command(const std::string& cmd, const SimConfig& config,
                      const CommandOptions& options);

// CSV: header `axis,<channel>`, 12 significant digits, LF endings, locale
// independent. Byte-identical across runs for identical inputs.
std::string write_csv(const RunResult& result);
std::string write_json(const RunResult& result);
std::string write_output(const RunResult& result, const std::string& format);

// 12-significant-digit, locale-independent number formatting.
std::string format_signal_value(double v);

}  // namespace pcdeer
