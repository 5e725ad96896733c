#include "crvi/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace crvi {

namespace {

constexpr double pi = std::numbers::pi;

struct Descriptor {
  std::string name;
  std::vector<double> params;
};

Descriptor split(const std::string &desc) {
  Descriptor d;
  const auto colon = desc.find(':');
  d.name = desc.substr(0, colon);
  if (colon != std::string::npos) {
    std::string rest = desc.substr(colon + 1);
    size_t pos = 0;
    while (pos <= rest.size()) {
      const auto comma = rest.find(',', pos);
      const std::string tok =
          rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
      try {
        size_t used = 0;
        d.params.push_back(std::stod(tok, &used));
        if (used != tok.size())
          throw std::invalid_argument(tok);
      } catch (const std::exception &) {
        throw std::invalid_argument("bad numeric parameter '" + tok +
                                    "' in preset '" + desc + "'");
      }
      if (comma == std::string::npos)
        break;
      pos = comma + 1;
    }
  }
  return d;
}

void need(const Descriptor &d, size_t n, const std::string &what) {
  if (d.params.size() != n)
    throw std::invalid_argument(what + " preset '" + d.name + "' needs " +
                                std::to_string(n) + " parameter(s), got " +
                                std::to_string(d.params.size()));
}

double clamp01(double s, double cap) { return std::clamp(s, 0.0, cap); }

} // namespace

ScalarField parse_scalar_field(const std::string &desc) {
  const Descriptor d = split(desc);
  if (d.name == "zero") {
    need(d, 0, "scalar");
    return [](double, double) { return 0.0; };
  }
  if (d.name == "constant") {
    need(d, 1, "scalar");
    const double c = d.params[0];
    return [c](double, double) { return c; };
  }
  if (d.name == "bump") {
    need(d, 1, "scalar");
    const double a = d.params[0];
    return [a](double x, double y) {
      return a * std::sin(pi * x) * std::sin(pi * y);
    };
  }
  if (d.name == "wells") {
    need(d, 1, "scalar");
    const double a = d.params[0];
    return [a](double x, double y) {
      return a * 16.0 * x * (1.0 - x) * y * (1.0 - y);
    };
  }
  if (d.name == "affine") {
    need(d, 3, "scalar");
    const double c0 = d.params[0], cx = d.params[1], cy = d.params[2];
    return [c0, cx, cy](double x, double y) { return c0 + cx * x + cy * y; };
  }
  if (d.name == "dome") {
    need(d, 2, "scalar");
    const double base = d.params[0], amp = d.params[1];
    return [base, amp](double x, double y) {
      return base + amp * std::sin(pi * x) * std::sin(pi * y);
    };
  }
  throw std::invalid_argument("unknown scalar preset '" + d.name + "'");
}

TensorField parse_tensor_field(const std::string &desc) {
  const Descriptor d = split(desc);
  TensorField t;
  t.name = desc;
  if (d.name == "identity") {
    need(d, 0, "tensor");
    t.value = [](double, double) { return Eigen::Matrix2d::Identity(); };
    t.lower = t.upper = 1.0;
    return t;
  }
  if (d.name == "scaled") {
    need(d, 1, "tensor");
    const double c = d.params[0];
    if (!(c > 0.0))
      throw std::invalid_argument("scaled tensor needs a positive factor");
    t.value = [c](double, double) {
      return (c * Eigen::Matrix2d::Identity()).eval();
    };
    t.lower = t.upper = c;
    return t;
  }
  if (d.name == "diag") {
    need(d, 2, "tensor");
    const double dxx = d.params[0], dyy = d.params[1];
    if (!(dxx > 0.0) || !(dyy > 0.0))
      throw std::invalid_argument("diag tensor needs positive entries");
    t.value = [dxx, dyy](double, double) {
      Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
      m(0, 0) = dxx;
      m(1, 1) = dyy;
      return m;
    };
    t.lower = std::min(dxx, dyy);
    t.upper = std::max(dxx, dyy);
    return t;
  }
  if (d.name == "varying") {
    need(d, 2, "tensor");
    const double base = d.params[0], amp = d.params[1];
    if (!(amp >= 0.0) || !(base > amp))
      throw std::invalid_argument("varying tensor needs base > amp >= 0");
    t.value = [base, amp](double x, double y) {
      const double s = base + amp * std::sin(pi * x) * std::sin(pi * y);
      return (s * Eigen::Matrix2d::Identity()).eval();
    };
    t.lower = base - amp;
    t.upper = base + amp;
    return t;
  }
  throw std::invalid_argument("unknown tensor preset '" + d.name + "'");
}

ReactionPair parse_reaction(const std::string &desc) {
  const Descriptor d = split(desc);
  ReactionPair r;
  r.name = desc;
  if (d.name == "zero") {
    need(d, 0, "reaction");
    r.f = [](double, double) { return 0.0; };
    r.g = [](double, double) { return 0.0; };
    r.lipschitz = 0.0;
    r.origin_bound = 0.0;
    return r;
  }
  if (d.name == "linear") {
    need(d, 6, "reaction");
    const double al = d.params[0], be = d.params[1], ga = d.params[2],
                 de = d.params[3], f0 = d.params[4], g0 = d.params[5];
    r.f = [al, be, f0](double a, double b) { return al * b - be * a + f0; };
    r.g = [ga, de, g0](double a, double b) { return ga * a - de * b + g0; };
    r.lipschitz = std::max(std::hypot(al, be), std::hypot(ga, de));
    r.origin_bound = std::max(f0, g0);
    return r;
  }
  if (d.name == "clamped-monod") {
    need(d, 4, "reaction");
    const double mu = d.params[0], nu = d.params[1], kk = d.params[2],
                 cap = d.params[3];
    if (!(kk > 0.0) || !(cap > 0.0) || !(mu >= 0.0) || !(nu >= 0.0))
      throw std::invalid_argument(
          "clamped-monod needs mu,nu >= 0 and k,cap > 0");
    r.f = [mu, kk, cap](double a, double b) {
      const double ca = clamp01(a, cap), cb = clamp01(b, cap);
      return mu * ca * cb / (kk + cb);
    };
    r.g = [nu, kk, cap](double a, double b) {
      const double ca = clamp01(a, cap), cb = clamp01(b, cap);
      return -nu * ca * cb / (kk + cb);
    };
    // Slope bounds: |d/da| <= mu*cap/(k+cap), |d/db| <= mu*cap/k.
    const double m1 = std::hypot(mu * cap / (kk + cap), mu * cap / kk);
    const double m2 = std::hypot(nu * cap / (kk + cap), nu * cap / kk);
    r.lipschitz = std::max(m1, m2);
    r.origin_bound = 0.0;
    return r;
  }
  throw std::invalid_argument("unknown reaction preset '" + d.name + "'");
}

} // namespace crvi
