#include "crvi/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "crvi/io.hpp"

namespace crvi {

namespace {

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

} // namespace

RunConfig parse_config_text(const std::string &text, const std::string &name) {
  RunConfig cfg;

  using Setter = std::function<void(const std::string &, int)>;
  std::map<std::string, Setter> setters;
  const auto fail = [&name](int line, const std::string &what) {
    throw ConfigError(name, line, what);
  };
  const auto num = [&](const std::string &v, int line) {
    try {
      size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size())
        fail(line, "trailing characters in numeric value '" + v + "'");
      return d;
    } catch (const ConfigError &) {
      throw;
    } catch (const std::exception &) {
      fail(line, "bad numeric value '" + v + "'");
      return 0.0;
    }
  };
  const auto integer = [&](const std::string &v, int line) {
    const double d = num(v, line);
    if (d != std::floor(d))
      fail(line, "expected an integer, got '" + v + "'");
    return static_cast<long long>(d);
  };
  const auto set_int = [&](int &dst, long long lo) {
    return [&dst, lo, integer, &fail](const std::string &v, int line) {
      const long long x = integer(v, line);
      if (x < lo)
        fail(line, "value " + v + " below minimum " + std::to_string(lo));
      dst = static_cast<int>(x);
    };
  };
  const auto set_pos = [&](double &dst) {
    return [&dst, num, &fail](const std::string &v, int line) {
      const double x = num(v, line);
      if (!(x > 0.0))
        fail(line, "value must be positive, got '" + v + "'");
      dst = x;
    };
  };
  const auto set_str = [](std::string &dst) {
    return [&dst](const std::string &v, int) { dst = v; };
  };

  setters["mesh.n"] = set_int(cfg.mesh_n, 1);
  setters["mesh.levels"] = set_int(cfg.levels, 1);
  setters["time.T"] = set_pos(cfg.horizon);
  setters["time.steps"] = set_int(cfg.steps, 1);
  setters["time.dt"] = set_pos(cfg.dt);
  setters["problem.diff_a"] = set_str(cfg.diff_a);
  setters["problem.diff_b"] = set_str(cfg.diff_b);
  setters["problem.reaction"] = set_str(cfg.reaction);
  setters["problem.obstacle"] = set_str(cfg.obstacle);
  setters["problem.a_ini"] = set_str(cfg.a_ini);
  setters["problem.b_ini"] = set_str(cfg.b_ini);
  setters["solver.psor_omega"] = [&](const std::string &v, int line) {
    const double x = num(v, line);
    if (!(x > 0.0 && x < 2.0))
      fail(line, "psor_omega must lie in (0, 2)");
    cfg.psor_omega = x;
  };
  setters["solver.psor_tol"] = set_pos(cfg.psor_tol);
  setters["solver.psor_max_sweeps"] = set_int(cfg.psor_max_sweeps, 1);
  setters["solver.picard_tol"] = set_pos(cfg.picard_tol);
  setters["solver.picard_max"] = set_int(cfg.picard_max, 1);
  setters["solver.damping"] = [&](const std::string &v, int line) {
    const double x = num(v, line);
    if (!(x > 0.0 && x <= 1.0))
      fail(line, "damping must lie in (0, 1]");
    cfg.damping = x;
  };
  setters["output.dir"] = set_str(cfg.out_dir);
  setters["output.vtk_stride"] = set_int(cfg.vtk_stride, 0);
  setters["output.seed"] = [&](const std::string &v, int line) {
    const long long x = integer(v, line);
    if (x < 0)
      fail(line, "seed must be nonnegative");
    cfg.seed = static_cast<unsigned>(x);
  };
  setters["output.lipschitz_box"] = set_pos(cfg.lipschitz_box);

  static const std::array<std::string, 5> sections = {
      "mesh", "time", "problem", "solver", "output"};

  std::map<std::string, int> seen;
  std::string section;
  bool steps_given = false, dt_given = false;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos)
      s = s.substr(0, hash);
    s = trim(s);
    if (s.empty())
      continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      bool known = false;
      for (const auto &sec : sections)
        known = known || sec == section;
      if (!known)
        fail(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      fail(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      fail(line, "empty key");
    if (section.empty())
      fail(line, "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    const auto it = setters.find(full);
    if (it == setters.end())
      fail(line, "unknown key '" + key + "' in [" + section + "]");
    if (seen.count(full))
      fail(line, "duplicate key '" + key + "' (first at line " +
                     std::to_string(seen[full]) + ")");
    seen[full] = line;
    if (full == "time.steps")
      steps_given = true;
    if (full == "time.dt")
      dt_given = true;
    it->second(value, line);
  }

  if (steps_given && dt_given)
    throw ConfigError(name, seen["time.dt"],
                      "give either steps or dt, not both");
  if (!dt_given)
    cfg.dt = 0.0;
  resolved_steps(cfg); // validates dt against the horizon
  return cfg;
}

RunConfig parse_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

int resolved_steps(const RunConfig &cfg) {
  if (cfg.dt <= 0.0)
    return cfg.steps;
  const double ratio = cfg.horizon / cfg.dt;
  const long long n = std::llround(ratio);
  if (n < 1 || std::abs(ratio - double(n)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("<config>", 0,
                      "dt does not tile the horizon T into whole steps");
  return static_cast<int>(n);
}

std::string manifest_text(const RunConfig &cfg) {
  std::ostringstream out;
  out << "[mesh]\n";
  out << "n = " << cfg.mesh_n << "\n";
  out << "levels = " << cfg.levels << "\n";
  out << "[time]\n";
  out << "T = " << format_double(cfg.horizon) << "\n";
  out << "steps = " << resolved_steps(cfg) << "\n";
  out << "[problem]\n";
  out << "diff_a = " << cfg.diff_a << "\n";
  out << "diff_b = " << cfg.diff_b << "\n";
  out << "reaction = " << cfg.reaction << "\n";
  out << "obstacle = " << cfg.obstacle << "\n";
  out << "a_ini = " << cfg.a_ini << "\n";
  out << "b_ini = " << cfg.b_ini << "\n";
  out << "[solver]\n";
  out << "psor_omega = " << format_double(cfg.psor_omega) << "\n";
  out << "psor_tol = " << format_double(cfg.psor_tol) << "\n";
  out << "psor_max_sweeps = " << cfg.psor_max_sweeps << "\n";
  out << "picard_tol = " << format_double(cfg.picard_tol) << "\n";
  out << "picard_max = " << cfg.picard_max << "\n";
  out << "damping = " << format_double(cfg.damping) << "\n";
  out << "[output]\n";
  out << "dir = " << cfg.out_dir << "\n";
  out << "vtk_stride = " << cfg.vtk_stride << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "lipschitz_box = " << format_double(cfg.lipschitz_box) << "\n";
  return out.str();
}

} // namespace crvi
