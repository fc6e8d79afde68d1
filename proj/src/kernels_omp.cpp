#include "kernels_body.hpp"

namespace blowup::kernels::omp {

namespace {

// Below this size the fork/join cost exceeds the loop body.
constexpr std::ptrdiff_t kMinParallel = 2048;

template <class Body>
void for_each_node(std::ptrdiff_t n, const Body& body) {
#pragma omp parallel for schedule(static) if (n >= kMinParallel)
  for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

}  // namespace

void wave_accel(const Grid1D& grid, const PowerParam& p, const ComplexField& u, AliveMask alive,
                ComplexField& a) {
  for_each_node(static_cast<std::ptrdiff_t>(grid.n()), detail::make_wave(grid, p, u, alive, a));
}

void kick(ComplexField& v, const ComplexField& a, double c, AliveMask alive) {
  for_each_node(static_cast<std::ptrdiff_t>(v.size()), detail::make_update(v, a, c, alive));
}

void drift(ComplexField& u, const ComplexField& v, double dt, AliveMask alive) {
  for_each_node(static_cast<std::ptrdiff_t>(u.size()), detail::make_update(u, v, dt, alive));
}

void cylinder_accel(const CylinderGrid& grid, const ComplexField& w, const ComplexField& ws,
                    ComplexField& out) {
  for_each_node(static_cast<std::ptrdiff_t>(grid.m()), detail::make_cylinder(grid, w, ws, out));
}

void axpy(const ComplexField& x, double c, const ComplexField& y, ComplexField& out) {
  for_each_node(static_cast<std::ptrdiff_t>(x.size()), detail::make_axpy(x, c, y, out));
}

}  // namespace blowup::kernels::omp

namespace blowup {

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

}  // namespace blowup
