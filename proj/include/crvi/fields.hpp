// Scalar/vector/tensor field types and the named presets the CLI accepts.
//
// Preset descriptors are "name" or "name:p1,p2,..." strings. Reaction presets
// carry their own Lipschitz constant (an analytic upper bound on the slope of
// (a,b) -> F and (a,b) -> G) and the value bound at the origin; both are
// validated later against sampled slopes.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "crvi/mesh.hpp"

namespace crvi {

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Vec2(double, double)>;

/// Pointwise symmetric 2x2 diffusion tensor with uniform eigenvalue bounds
/// [lower, upper]; both are verified at cell barycenters during assembly.
struct TensorField {
  std::function<Eigen::Matrix2d(double, double)> value;
  double lower = 1.0;
  double upper = 1.0;
  std::string name = "identity";
};

/// Coupled reaction pair (f drives the constrained field, g the free one).
struct ReactionPair {
  std::function<double(double, double)> f; // f(a, b)
  std::function<double(double, double)> g; // g(a, b)
  double lipschitz = 0.0;    // joint bound M on both slopes
  double origin_bound = 0.0; // max(f(0,0), g(0,0))
  std::string name = "zero";
};

/// Scalar presets: zero | constant:c | bump:amp | wells:amp | affine:c0,cx,cy
///   | dome:base,amp
/// bump is amp*sin(pi x)*sin(pi y); wells is amp*16*x(1-x)y(1-y); dome is
/// base + amp*sin(pi x)*sin(pi y).
ScalarField parse_scalar_field(const std::string &desc);

/// Tensor presets: identity | scaled:c | diag:dxx,dyy | varying:base,amp
/// (varying is (base + amp*sin(pi x)sin(pi y)) * Id, needs base > amp >= 0).
TensorField parse_tensor_field(const std::string &desc);

/// Reaction presets: zero | linear:alpha,beta,gamma,delta,f0,g0
///   | clamped-monod:mu,nu,k,cap
/// linear is F = alpha*b - beta*a + f0, G = gamma*a - delta*b + g0.
/// clamped-monod clamps both arguments to [0, cap] and uses Monod kinetics
/// F = mu*a*b/(k+b), G = -nu*a*b/(k+b) on the clamped values.
ReactionPair parse_reaction(const std::string &desc);

} // namespace crvi
