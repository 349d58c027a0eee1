#pragma once

// Velocity and velocity-gradient containers. A field never outlives its
// grid; fields hold a non-owning grid pointer and all binary operations
// require identical (dim, n) layout.

#include <array>
#include <stdexcept>

#include "gsgf/common.hpp"
#include "gsgf/grid.hpp"

namespace gsgf {

class SpectralVectorField {
 public:
  SpectralVectorField() = default;
  explicit SpectralVectorField(const Grid& g) : grid_(&g) {
    for (int i = 0; i < g.dim(); ++i) comp_[static_cast<std::size_t>(i)].assign(g.size(), {0.0, 0.0});
  }

  const Grid& grid() const { return *grid_; }
  int dim() const { return grid_->dim(); }
  ComplexArray& operator[](int i) { return comp_[static_cast<std::size_t>(i)]; }
  const ComplexArray& operator[](int i) const { return comp_[static_cast<std::size_t>(i)]; }

 private:
  const Grid* grid_ = nullptr;
  std::array<ComplexArray, 3> comp_;
};

// d x d mode-space tensor, entries indexed (row i, col j).
class SpectralTensorField {
 public:
  SpectralTensorField() = default;
  explicit SpectralTensorField(const Grid& g) : grid_(&g) {
    for (int i = 0; i < g.dim() * g.dim(); ++i) comp_[static_cast<std::size_t>(i)].assign(g.size(), {0.0, 0.0});
  }

  const Grid& grid() const { return *grid_; }
  int dim() const { return grid_->dim(); }
  ComplexArray& operator()(int i, int j) { return comp_[static_cast<std::size_t>(i * grid_->dim() + j)]; }
  const ComplexArray& operator()(int i, int j) const {
    return comp_[static_cast<std::size_t>(i * grid_->dim() + j)];
  }

 private:
  const Grid* grid_ = nullptr;
  std::array<ComplexArray, 9> comp_;
};

// d x d collocation-space tensor.
class PhysicalTensorField {
 public:
  PhysicalTensorField() = default;
  explicit PhysicalTensorField(const Grid& g) : grid_(&g) {
    for (int i = 0; i < g.dim() * g.dim(); ++i) comp_[static_cast<std::size_t>(i)].assign(g.size(), 0.0);
  }

  const Grid& grid() const { return *grid_; }
  int dim() const { return grid_->dim(); }
  RealArray& operator()(int i, int j) { return comp_[static_cast<std::size_t>(i * grid_->dim() + j)]; }
  const RealArray& operator()(int i, int j) const {
    return comp_[static_cast<std::size_t>(i * grid_->dim() + j)];
  }

 private:
  const Grid* grid_ = nullptr;
  std::array<RealArray, 9> comp_;
};

inline void require_same_layout(const Grid& a, const Grid& b, const char* what) {
  if (!a.same_layout(b)) throw std::invalid_argument(std::string(what) + ": grid layout mismatch");
}

// y += s * x
inline void add_scaled(SpectralVectorField& y, double s, const SpectralVectorField& x) {
  require_same_layout(y.grid(), x.grid(), "add_scaled");
  for (int i = 0; i < y.dim(); ++i)
    for (std::size_t m = 0; m < y.grid().size(); ++m) y[i][m] += s * x[i][m];
}

inline SpectralVectorField scaled_sum(const SpectralVectorField& a, double s, const SpectralVectorField& b) {
  require_same_layout(a.grid(), b.grid(), "scaled_sum");
  SpectralVectorField out(a.grid());
  for (int i = 0; i < a.dim(); ++i)
    for (std::size_t m = 0; m < a.grid().size(); ++m) out[i][m] = a[i][m] + s * b[i][m];
  return out;
}

inline void scale(SpectralVectorField& u, double s) {
  for (int i = 0; i < u.dim(); ++i)
    for (std::size_t m = 0; m < u.grid().size(); ++m) u[i][m] *= s;
}

inline void apply_dealias(SpectralVectorField& u) {
  for (int i = 0; i < u.dim(); ++i) apply_dealias(u.grid(), u[i]);
}

// Largest mode magnitude across components; blow-up and symmetry guards key off this.
inline double max_mode_magnitude(const SpectralVectorField& u) {
  double m = 0.0;
  for (int i = 0; i < u.dim(); ++i)
    for (std::size_t k = 0; k < u.grid().size(); ++k) m = std::max(m, std::abs(u[i][k]));
  return m;
}

inline bool all_finite(const SpectralVectorField& u) {
  for (int i = 0; i < u.dim(); ++i)
    for (std::size_t k = 0; k < u.grid().size(); ++k)
      if (!std::isfinite(u[i][k].real()) || !std::isfinite(u[i][k].imag())) return false;
  return true;
}

}  // namespace gsgf
