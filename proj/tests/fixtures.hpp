#pragma once

#include "blowup/liouville.hpp"
#include "blowup/stationary.hpp"

namespace fixtures {

/// (kappa(d) (1 + eps (1 - y^2)), 0) on m nodes, p = 3.
inline blowup::SelfSimState perturbed_kappa(std::size_t m, double d = 0.3, double eps = 0.05, double theta = 0.0) {
  using namespace blowup;
  const CylinderGrid g(m, PowerParam(3.0));
  const auto y = g.y();
  const ComplexField k = kappa_field(g, d, theta);
  return {0.0, g, ComplexField::generate(m, [&](std::size_t j) { return (1.0 + eps * (1.0 - y[j] * y[j])) * k[j]; }),
          ComplexField(m)};
}

/// Perturbed kappa(0.3) with the unstable-mode coefficient tuned, m = 256.
/// Computed once per test binary.
inline const blowup::PreparedData& prepared_kappa03() {
  static const blowup::PreparedData data = [] {
    blowup::ShootingOptions opt;
    opt.policy = blowup::ExecPolicy::serial;
    return blowup::prepare_trapped(perturbed_kappa(256), 0.3, 0.0, opt);
  }();
  return data;
}

}  // namespace fixtures
