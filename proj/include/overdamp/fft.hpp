#pragma once

// Thin FFTW wrapper for 2-D real<->complex transforms on an N x N periodic
// grid, plus the spectral bookkeeping (wavenumbers, dealias mask, Parseval
// sums) the solver needs.  Plan creation is serialized; execution is
// re-entrant per FFTW's contract.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace overdamp {

inline std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

class SpectralGrid {
 public:
  SpectralGrid(int n, double box_l) : n_(n), nc_(n / 2 + 1), l_(box_l) {
    if (n < 4 || (n & (n - 1)) != 0)
      throw std::invalid_argument("SpectralGrid: n must be a power of two >= 4");
    real_buf_.resize(static_cast<std::size_t>(n_) * n_);
    spec_buf_.resize(static_cast<std::size_t>(n_) * nc_);
    {
      std::lock_guard<std::mutex> lock(fftw_plan_mutex());
      fwd_ = fftw_plan_dft_r2c_2d(
          n_, n_, real_buf_.data(),
          reinterpret_cast<fftw_complex*>(spec_buf_.data()), FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_c2r_2d(
          n_, n_, reinterpret_cast<fftw_complex*>(spec_buf_.data()),
          real_buf_.data(), FFTW_ESTIMATE);
    }
    const double k0 = 2.0 * M_PI / l_;
    kx_.resize(n_);
    for (int i = 0; i < n_; ++i) kx_[i] = k0 * (i <= n_ / 2 ? i : i - n_);
    ky_.resize(nc_);
    for (int j = 0; j < nc_; ++j) ky_[j] = k0 * j;
    // 2/3-rule mask on integer indices.
    const int cut = n_ / 3;
    mask_.resize(spec_buf_.size());
    for (int i = 0; i < n_; ++i) {
      const int ii = i <= n_ / 2 ? i : i - n_;
      for (int j = 0; j < nc_; ++j)
        mask_[idx(i, j)] = (std::abs(ii) <= cut && j <= cut) ? 1.0 : 0.0;
    }
  }
  ~SpectralGrid() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  int n() const { return n_; }
  int nc() const { return nc_; }
  double box() const { return l_; }
  std::size_t real_size() const { return real_buf_.size(); }
  std::size_t spec_size() const { return spec_buf_.size(); }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * nc_ + j;
  }
  double kx(int i) const { return kx_[i]; }
  double ky(int j) const { return ky_[j]; }
  double k_sq(int i, int j) const {
    return kx_[i] * kx_[i] + ky_[j] * ky_[j];
  }
  double k_max_dealiased() const {
    const double k0 = 2.0 * M_PI / l_;
    return std::sqrt(2.0) * k0 * (n_ / 3);
  }

  // Unnormalized forward transform.
  void forward(const std::vector<double>& in,
               std::vector<std::complex<double>>& out) const {
    real_buf_ = in;
    fftw_execute_dft_r2c(fwd_, real_buf_.data(),
                         reinterpret_cast<fftw_complex*>(spec_buf_.data()));
    out = spec_buf_;
  }
  // Inverse transform with the 1/N^2 normalization.
  void inverse(const std::vector<std::complex<double>>& in,
               std::vector<double>& out) const {
    spec_buf_ = in;
    fftw_execute_dft_c2r(bwd_,
                         reinterpret_cast<fftw_complex*>(spec_buf_.data()),
                         real_buf_.data());
    out = real_buf_;
    const double inv = 1.0 / (static_cast<double>(n_) * n_);
    for (auto& x : out) x *= inv;
  }

  void apply_dealias(std::vector<std::complex<double>>& spec) const {
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= mask_[k];
  }

  // || Lambda^s f ||_{L^2(box)}^2 from the r2c spectrum of f (unnormalized
  // forward convention): off-axis modes are counted twice.
  double sobolev_sq(const std::vector<std::complex<double>>& spec,
                    double s) const {
    double sum = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < nc_; ++j) {
        const double w = (j == 0 || j == n_ / 2) ? 1.0 : 2.0;
        const double k2 = k_sq(i, j);
        if (s != 0.0 && k2 == 0.0) continue;
        sum += w * std::pow(k2, s) * std::norm(spec[idx(i, j)]);
      }
    }
    const double n2 = static_cast<double>(n_) * n_;
    return sum * l_ * l_ / (n2 * n2);
  }

 private:
  int n_, nc_;
  double l_;
  std::vector<double> kx_, ky_;
  std::vector<double> mask_;
  mutable std::vector<double> real_buf_;
  mutable std::vector<std::complex<double>> spec_buf_;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace overdamp
