#pragma once
// Periodic differentiation, interpolation and quadrature on uniform grids
// over [0, 2*pi).

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gapf {

enum class Scheme { spectral, fd2, fd4 };

inline std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::spectral: return "spectral";
    case Scheme::fd2: return "fd2";
    case Scheme::fd4: return "fd4";
  }
  return "?";
}

inline Scheme parse_scheme(std::string_view name) {
  if (name == "spectral") return Scheme::spectral;
  if (name == "fd2") return Scheme::fd2;
  if (name == "fd4") return Scheme::fd4;
  throw std::invalid_argument("unknown spatial scheme '" + std::string(name) + "'");
}

namespace detail {

using cplx = std::complex<double>;

/// Discrete Fourier transform of fixed length. Radix-2 iterative FFT for
/// powers of two; a direct O(n^2) transform with a precomputed twiddle table
/// otherwise. Forward uses exp(-2*pi*i*jk/n); inverse is unnormalized.
class Dft {
 public:
  explicit Dft(std::size_t n) : n_(n), pow2_(n != 0 && (n & (n - 1)) == 0) {
    twiddle_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const double a = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_);
      twiddle_[k] = {std::cos(a), std::sin(a)};
    }
    if (pow2_) {
      bitrev_.resize(n_);
      std::size_t bits = 0;
      while ((std::size_t{1} << bits) < n_) ++bits;
      for (std::size_t i = 0; i < n_; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
          if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
        bitrev_[i] = r;
      }
    }
  }

  std::size_t size() const { return n_; }

  void forward(std::vector<cplx>& a) const { transform(a, false); }
  void inverse(std::vector<cplx>& a) const { transform(a, true); }

 private:
  void transform(std::vector<cplx>& a, bool inverse) const {
    if (pow2_) {
      fft(a, inverse);
    } else {
      direct(a, inverse);
    }
  }

  void fft(std::vector<cplx>& a, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (i < bitrev_[i]) std::swap(a[i], a[bitrev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t stride = n_ / len;
      for (std::size_t i = 0; i < n_; i += len) {
        for (std::size_t j = 0; j < half; ++j) {
          cplx w = twiddle_[j * stride];
          if (inverse) w = std::conj(w);
          const cplx u = a[i + j];
          const cplx v = a[i + j + half] * w;
          a[i + j] = u + v;
          a[i + j + half] = u - v;
        }
      }
    }
  }

  void direct(std::vector<cplx>& a, bool inverse) const {
    std::vector<cplx> out(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      cplx acc{0.0, 0.0};
      for (std::size_t j = 0; j < n_; ++j) {
        cplx w = twiddle_[(j * k) % n_];
        if (inverse) w = std::conj(w);
        acc += a[j] * w;
      }
      out[k] = acc;
    }
    a = std::move(out);
  }

  std::size_t n_;
  bool pow2_;
  std::vector<cplx> twiddle_;
  std::vector<std::size_t> bitrev_;
};

/// Process-wide cache of transforms keyed by length. Plans are immutable once
/// built, so handing out shared references is thread safe.
inline const Dft& dft_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const Dft>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const Dft>(n);
  return *slot;
}

/// Signed wavenumber of DFT bin k on an n-point grid. Bin n/2 maps to +n/2.
inline double wavenumber(std::size_t k, std::size_t n) {
  return k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(n);
}

inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite input sample");
}

}  // namespace detail

/// First and second periodic derivatives evaluated together.
struct Derivatives {
  std::vector<double> d1;
  std::vector<double> d2;
};

/// d/dtheta and d^2/dtheta^2 of periodic samples. For the spectral scheme both
/// are recovered from a single inverse transform (the two spectra are
/// Hermitian, so d1 lands in the real part and d2 in the imaginary part).
inline Derivatives derivatives(std::span<const double> values, Scheme scheme) {
  const std::size_t n = values.size();
  if (n < 16) throw std::invalid_argument("periodic differentiation needs n >= 16");
  detail::require_finite(values, "diff_periodic");
  Derivatives out{std::vector<double>(n), std::vector<double>(n)};
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);

  switch (scheme) {
    case Scheme::spectral: {
      const auto& dft = detail::dft_for(n);
      std::vector<detail::cplx> a(values.begin(), values.end());
      dft.forward(a);
      const bool even = n % 2 == 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double w = detail::wavenumber(k, n);
        const detail::cplx ik1 = (even && k == n / 2) ? detail::cplx{0.0, 0.0} : detail::cplx{0.0, w};
        const detail::cplx c = a[k];
        // ik*c + i*(-k^2 c)
        a[k] = ik1 * c + detail::cplx{0.0, 1.0} * (-w * w) * c;
      }
      dft.inverse(a);
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t j = 0; j < n; ++j) {
        out.d1[j] = a[j].real() * inv_n;
        out.d2[j] = a[j].imag() * inv_n;
      }
      break;
    }
    case Scheme::fd2: {
      const double inv2h = 1.0 / (2.0 * h), invh2 = 1.0 / (h * h);
      for (std::size_t j = 0; j < n; ++j) {
        const double up = values[(j + 1) % n], um = values[(j + n - 1) % n];
        out.d1[j] = (up - um) * inv2h;
        out.d2[j] = (up - 2.0 * values[j] + um) * invh2;
      }
      break;
    }
    case Scheme::fd4: {
      const double inv12h = 1.0 / (12.0 * h), inv12h2 = 1.0 / (12.0 * h * h);
      for (std::size_t j = 0; j < n; ++j) {
        const double up2 = values[(j + 2) % n], up1 = values[(j + 1) % n];
        const double um1 = values[(j + n - 1) % n], um2 = values[(j + n - 2) % n];
        out.d1[j] = (-up2 + 8.0 * up1 - 8.0 * um1 + um2) * inv12h;
        out.d2[j] = (-up2 + 16.0 * up1 - 30.0 * values[j] + 16.0 * um1 - um2) * inv12h2;
      }
      break;
    }
  }
  return out;
}

/// Periodic derivative of order 1 or 2.
inline std::vector<double> diff_periodic(std::span<const double> values, int order, Scheme scheme) {
  if (order != 1 && order != 2) throw std::invalid_argument("diff_periodic: order must be 1 or 2");
  auto d = derivatives(values, scheme);
  return order == 1 ? std::move(d.d1) : std::move(d.d2);
}

/// Periodic trapezoid rule over [0, 2*pi).
inline double quadrature_periodic(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return 2.0 * std::numbers::pi / static_cast<double>(values.size()) * sum;
}

/// Trigonometric interpolation onto a new_n-point grid. The Nyquist bin is
/// split evenly between +n/2 and -n/2 so real band-limited data round-trips.
inline std::vector<double> resample(std::span<const double> values, std::size_t new_n) {
  const std::size_t n = values.size();
  if (n < 16 || new_n < 16 || n % 2 != 0 || new_n % 2 != 0)
    throw std::invalid_argument("resample: grid sizes must be even and >= 16");
  detail::require_finite(values, "resample");
  if (new_n == n) return {values.begin(), values.end()};

  std::vector<detail::cplx> a(values.begin(), values.end());
  detail::dft_for(n).forward(a);
  for (auto& c : a) c /= static_cast<double>(n);

  std::vector<detail::cplx> b(new_n, {0.0, 0.0});
  const std::size_t keep = std::min(n, new_n) / 2;  // modes |k| < keep copied, |k| == keep special
  for (std::size_t k = 0; k < keep; ++k) {
    b[k] = a[k];
    if (k > 0) b[new_n - k] = a[n - k];
  }
  if (new_n > n) {
    // old Nyquist split across +-n/2
    b[keep] = 0.5 * a[n / 2];
    b[new_n - keep] = 0.5 * a[n / 2];
  } else {
    // new Nyquist collects both +-new_n/2 components
    b[keep] = detail::cplx{(a[keep] + a[n - keep]).real(), 0.0};
  }
  detail::dft_for(new_n).inverse(b);
  std::vector<double> out(new_n);
  for (std::size_t j = 0; j < new_n; ++j) out[j] = b[j].real();
  return out;
}

/// Uniform grid angles theta_j = 2*pi*j/n.
inline std::vector<double> grid_angles(std::size_t n) {
  std::vector<double> th(n);
  for (std::size_t j = 0; j < n; ++j) th[j] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
  return th;
}

}  // namespace gapf
