#pragma once

// Periodic Fourier grid on (0,2*pi)^d, d in {2,3}.
//
// Modes live on the full complex lattice k in {-n/2+1, ..., n/2}^d, stored
// flat row-major (axis 0 slowest), axis index i <-> wavenumber k = i for
// i <= n/2 and k = i - n otherwise. Real fields are represented by
// conjugate-symmetric mode arrays; both transform directions are exposed
// only for that representation.
//
// Forward transform convention: u_hat(k) = (1/n^d) sum_x u(x) e^{-i k.x},
// so a plain sum of e^{+i k.x} recovers samples and Parseval reads
// integral |u|^2 = (2*pi)^d sum_k |u_hat(k)|^2.

#include <fftw3.h>

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsgf/common.hpp"

namespace gsgf {

class Grid {
 public:
  Grid(int dim, int n) : dim_(dim), n_(n) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("grid: dim must be 2 or 3");
    if (n < 8) throw std::invalid_argument("grid: n must be at least 8");
    if (n % 2 != 0) throw std::invalid_argument("grid: n must be even");

    size_ = 1;
    for (int a = 0; a < dim_; ++a) size_ *= static_cast<std::size_t>(n_);

    // Per-axis tables. Differentiation zeroes the Nyquist plane k = n/2:
    // that mode has no conjugate partner on the lattice, and i*(n/2) would
    // break the real-derivative symmetry.
    wavenumber_.resize(n_);
    deriv_symbol_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      int k = (i <= n_ / 2) ? i : i - n_;
      wavenumber_[i] = k;
      deriv_symbol_[i] = (i == n_ / 2) ? 0.0 : static_cast<double>(k);
    }

    stokes_eigenvalues_.resize(size_);
    dealias_mask_.resize(size_);
    negated_index_.resize(size_);
    const double cutoff = static_cast<double>(n_) / 3.0;
    for (std::size_t idx = 0; idx < size_; ++idx) {
      std::array<int, 3> iax = decompose(idx);
      double k2 = 0.0;
      bool keep = true;
      std::size_t neg = 0;
      for (int a = 0; a < dim_; ++a) {
        int k = wavenumber_[iax[a]];
        k2 += static_cast<double>(k) * static_cast<double>(k);
        if (std::abs(k) >= cutoff) keep = false;
        int ni = (n_ - iax[a]) % n_;  // index of -k; Nyquist maps to itself
        neg = neg * static_cast<std::size_t>(n_) + static_cast<std::size_t>(ni);
      }
      stokes_eigenvalues_[idx] = k2;
      dealias_mask_[idx] = keep ? 1 : 0;
      negated_index_[idx] = neg;
    }

    // Out-of-place c2c plans; executed with the new-array interface so the
    // planning buffers can be freed. FFTW_UNALIGNED keeps execution valid
    // for arbitrary caller buffers.
    std::vector<std::complex<double>> a(size_), b(size_);
    int ns[3] = {n_, n_, n_};
    fwd_ = fftw_plan_dft(dim_, ns, reinterpret_cast<fftw_complex*>(a.data()),
                         reinterpret_cast<fftw_complex*>(b.data()), FFTW_FORWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    bwd_ = fftw_plan_dft(dim_, ns, reinterpret_cast<fftw_complex*>(a.data()),
                         reinterpret_cast<fftw_complex*>(b.data()), FFTW_BACKWARD,
                         FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (fwd_ == nullptr || bwd_ == nullptr) throw std::runtime_error("grid: fftw plan creation failed");
  }

  ~Grid() {
    if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
    if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
  }

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  Grid(Grid&& o) noexcept
      : dim_(o.dim_),
        n_(o.n_),
        size_(o.size_),
        wavenumber_(std::move(o.wavenumber_)),
        deriv_symbol_(std::move(o.deriv_symbol_)),
        stokes_eigenvalues_(std::move(o.stokes_eigenvalues_)),
        dealias_mask_(std::move(o.dealias_mask_)),
        negated_index_(std::move(o.negated_index_)),
        fwd_(o.fwd_),
        bwd_(o.bwd_) {
    o.fwd_ = nullptr;
    o.bwd_ = nullptr;
  }

  Grid& operator=(Grid&& o) noexcept {
    if (this != &o) {
      if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
      if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
      dim_ = o.dim_;
      n_ = o.n_;
      size_ = o.size_;
      wavenumber_ = std::move(o.wavenumber_);
      deriv_symbol_ = std::move(o.deriv_symbol_);
      stokes_eigenvalues_ = std::move(o.stokes_eigenvalues_);
      dealias_mask_ = std::move(o.dealias_mask_);
      negated_index_ = std::move(o.negated_index_);
      fwd_ = o.fwd_;
      bwd_ = o.bwd_;
      o.fwd_ = nullptr;
      o.bwd_ = nullptr;
    }
    return *this;
  }

  int dim() const { return dim_; }
  int n() const { return n_; }
  std::size_t size() const { return size_; }
  double dx() const { return kTwoPi / static_cast<double>(n_); }
  double volume() const { return box_volume(dim_); }

  // Axis index of flat mode idx along axis a (0 = slowest).
  std::array<int, 3> decompose(std::size_t idx) const {
    std::array<int, 3> iax{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
      iax[a] = static_cast<int>(idx % static_cast<std::size_t>(n_));
      idx /= static_cast<std::size_t>(n_);
    }
    return iax;
  }

  std::size_t flatten(const std::array<int, 3>& iax) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim_; ++a) idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(iax[a]);
    return idx;
  }

  // Flat index of the mode with wavenumbers k (each in {-n/2+1..n/2}).
  std::size_t mode_index(const std::array<int, 3>& k) const {
    std::array<int, 3> iax{0, 0, 0};
    for (int a = 0; a < dim_; ++a) {
      int ka = k[a];
      if (ka < -n_ / 2 + 1 || ka > n_ / 2) throw std::invalid_argument("grid: wavenumber outside lattice");
      iax[a] = (ka >= 0) ? ka : ka + n_;
    }
    return flatten(iax);
  }

  int wavenumber(int axis_index) const { return wavenumber_[static_cast<std::size_t>(axis_index)]; }

  // ik multiplier value along one axis (0 on the Nyquist plane).
  double deriv_symbol(int axis_index) const { return deriv_symbol_[static_cast<std::size_t>(axis_index)]; }

  // |k|^2 per flat mode; eigenvalues of -Laplace on the lattice.
  const std::vector<double>& stokes_eigenvalues() const { return stokes_eigenvalues_; }

  // Two-thirds rule: 1 where |k_a| < n/3 for every axis.
  const std::vector<std::uint8_t>& dealias_mask() const { return dealias_mask_; }

  // Flat index of -k (Nyquist planes are their own image).
  std::size_t negated_index(std::size_t idx) const { return negated_index_[idx]; }

  // Collocation point of flat physical index.
  std::array<double, 3> point(std::size_t idx) const {
    std::array<int, 3> iax = decompose(idx);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[a] = dx() * static_cast<double>(iax[a]);
    return x;
  }

  // Physical samples -> normalized modes.
  void forward(std::span<const double> phys, std::span<std::complex<double>> spec) const {
    require_size(phys.size(), "forward input");
    require_size(spec.size(), "forward output");
    std::vector<std::complex<double>> in(size_);
    for (std::size_t i = 0; i < size_; ++i) in[i] = phys[i];
    fftw_execute_dft(fwd_, reinterpret_cast<fftw_complex*>(in.data()),
                     reinterpret_cast<fftw_complex*>(spec.data()));
    const double scale = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < size_; ++i) spec[i] *= scale;
  }

  ComplexArray forward(const RealArray& phys) const {
    ComplexArray spec(size_);
    forward(std::span<const double>(phys), std::span<std::complex<double>>(spec));
    return spec;
  }

  // Modes -> physical samples. Rejects mode arrays that are not
  // conjugate-symmetric to within 1e-10 of the largest magnitude: such
  // input has no real-valued preimage and signals corrupted state.
  void inverse(std::span<const std::complex<double>> spec, std::span<double> phys) const {
    require_size(spec.size(), "inverse input");
    require_size(phys.size(), "inverse output");
    check_conjugate_symmetry(spec);
    std::vector<std::complex<double>> out(size_);
    fftw_execute_dft(bwd_, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(spec.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
    for (std::size_t i = 0; i < size_; ++i) phys[i] = out[i].real();
  }

  RealArray inverse(const ComplexArray& spec) const {
    RealArray phys(size_);
    inverse(std::span<const std::complex<double>>(spec), std::span<double>(phys));
    return phys;
  }

  bool same_layout(const Grid& o) const { return dim_ == o.dim_ && n_ == o.n_; }

 private:
  void require_size(std::size_t got, const char* what) const {
    if (got != size_) throw std::invalid_argument(std::string("grid: ") + what + " has wrong length");
  }

  void check_conjugate_symmetry(std::span<const std::complex<double>> spec) const {
    double scale = 0.0;
    for (std::size_t i = 0; i < size_; ++i) scale = std::max(scale, std::abs(spec[i]));
    double worst = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      std::size_t j = negated_index_[i];
      if (j < i) continue;
      worst = std::max(worst, std::abs(spec[i] - std::conj(spec[j])));
    }
    if (worst > 1e-10 * std::max(1.0, scale))
      throw std::runtime_error("grid: inverse transform input is not conjugate-symmetric (corrupted state)");
  }

  int dim_;
  int n_;
  std::size_t size_;
  std::vector<int> wavenumber_;
  std::vector<double> deriv_symbol_;
  std::vector<double> stokes_eigenvalues_;
  std::vector<std::uint8_t> dealias_mask_;
  std::vector<std::size_t> negated_index_;
  fftw_plan fwd_;
  fftw_plan bwd_;
};

inline Grid make_grid(int dim, int n) { return Grid(dim, n); }

// Zero every mode outside the two-thirds mask. Idempotent.
inline void apply_dealias(const Grid& g, ComplexArray& modes) {
  if (modes.size() != g.size()) throw std::invalid_argument("apply_dealias: wrong field length");
  const auto& mask = g.dealias_mask();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (mask[i] == 0) modes[i] = 0.0;
}

}  // namespace gsgf
