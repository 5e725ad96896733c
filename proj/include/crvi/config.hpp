// Run configuration: flat key = value text grouped by bracketed sections.
// '#' and ';' start comments. Unknown sections or keys, duplicate keys, and
// malformed values are hard errors carrying the line number. All keys are
// optional; the defaults below are the resolved values a manifest echoes.
//
// Sections and keys:
//   [mesh]    n, levels
//   [time]    T, steps, dt            (steps and dt are mutually exclusive)
//   [problem] diff_a, diff_b, reaction, obstacle, a_ini, b_ini
//   [solver]  psor_omega, psor_tol, psor_max_sweeps, picard_tol, picard_max,
//             damping
//   [output]  dir, vtk_stride, seed, lipschitz_box

#pragma once

#include <stdexcept>
#include <string>

namespace crvi {

struct RunConfig {
  int mesh_n = 8;
  int levels = 3;
  double horizon = 0.25;
  int steps = 16;
  double dt = 0.0; // 0 means "derive from steps"
  std::string diff_a = "identity";
  std::string diff_b = "identity";
  std::string reaction = "zero";
  std::string obstacle = "constant:1e6";
  std::string a_ini = "zero";
  std::string b_ini = "zero";
  double psor_omega = 1.5;
  double psor_tol = 1e-12;
  int psor_max_sweeps = 200000;
  double picard_tol = 1e-11;
  int picard_max = 50;
  double damping = 1.0;
  std::string out_dir = "out";
  int vtk_stride = 0; // 0 writes only the final snapshot
  unsigned seed = 1234;
  double lipschitz_box = 2.0;
};

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &file, int line, const std::string &what)
      : std::runtime_error(line > 0 ? file + ":" + std::to_string(line) +
                                          ": " + what
                                    : file + ": " + what),
        line_(line) {}
  int line() const { return line_; }

private:
  int line_;
};

RunConfig parse_config_text(const std::string &text,
                            const std::string &name = "<config>");
RunConfig parse_config_file(const std::string &path);

/// Resolved time-step count; validates that an explicit dt tiles the horizon.
int resolved_steps(const RunConfig &cfg);

/// INI-style echo of every resolved key, in the documented order.
std::string manifest_text(const RunConfig &cfg);

} // namespace crvi
