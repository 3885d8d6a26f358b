#include "nlsdyn/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <fftw3.h>
#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(int dim, int n) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_pair(dim, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
  auto* buf = fftw_alloc_complex(total);
  PlanPair p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dim == 1) {
    p.forward = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
    p.inverse = fftw_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
  } else {
    p.forward = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
    p.inverse = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
  }
  fftw_free(buf);
  return cache.emplace(key, p).first->second;
}

struct PlanPairL {
  fftwl_plan forward = nullptr;
  fftwl_plan inverse = nullptr;
};

const PlanPairL& long_plans_for(int dim, int n) {
  static std::map<std::pair<int, int>, PlanPairL> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto key = std::make_pair(dim, n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
  auto* buf = fftwl_alloc_complex(total);
  PlanPairL p;
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (dim == 1) {
    p.forward = fftwl_plan_dft_1d(n, buf, buf, FFTW_FORWARD, flags);
    p.inverse = fftwl_plan_dft_1d(n, buf, buf, FFTW_BACKWARD, flags);
  } else {
    p.forward = fftwl_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, flags);
    p.inverse = fftwl_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, flags);
  }
  fftwl_free(buf);
  return cache.emplace(key, p).first->second;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

double pairing_re(const ComplexField& u, const ComplexField& v) {
  double s = 0.0;
  const cplx* a = u.data();
  const cplx* b = v.data();
  for (std::size_t i = 0; i < u.size(); ++i) s += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  return s * u.grid().cell_volume();
}

double pairing_im(const ComplexField& u, const ComplexField& v) {
  double s = 0.0;
  const cplx* a = u.data();
  const cplx* b = v.data();
  for (std::size_t i = 0; i < u.size(); ++i) s += a[i].imag() * b[i].real() - a[i].real() * b[i].imag();
  return s * u.grid().cell_volume();
}

}  // namespace

void fft_forward_inplace(const SpatialGrid& g, cplx* data) {
  fftw_execute_dft(plans_for(g.dim(), g.n()).forward, as_fftw(data), as_fftw(data));
}

void fft_inverse_inplace(const SpatialGrid& g, cplx* data) {
  fftw_execute_dft(plans_for(g.dim(), g.n()).inverse, as_fftw(data), as_fftw(data));
  const double scale = 1.0 / static_cast<double>(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) data[i] *= scale;
}

void fourier_multiply_extended(const SpatialGrid& g, cplx* data, const std::vector<std::complex<long double>>& mult,
                               std::vector<std::complex<long double>>& work) {
  const auto& p = long_plans_for(g.dim(), g.n());
  work.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) work[i] = {data[i].real(), data[i].imag()};
  auto* w = reinterpret_cast<fftwl_complex*>(work.data());
  fftwl_execute_dft(p.forward, w, w);
  const long double scale = 1.0L / static_cast<long double>(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) work[i] *= mult[i] * scale;
  fftwl_execute_dft(p.inverse, w, w);
  for (std::size_t i = 0; i < g.size(); ++i)
    data[i] = {static_cast<double>(work[i].real()), static_cast<double>(work[i].imag())};
}

std::vector<cplx> fft_forward(const ComplexField& u) {
  std::vector<cplx> out(u.values().begin(), u.values().end());
  fft_forward_inplace(u.grid(), out.data());
  return out;
}

ComplexField fft_inverse(const GridPtr& grid, std::vector<cplx> spectrum) {
  fft_inverse_inplace(*grid, spectrum.data());
  return ComplexField(grid, std::move(spectrum));
}

Pairings inner_products(const ComplexField& u, const ComplexField& v) {
  require_same_grid(u.grid(), v.grid(), "inner_products");
  return {pairing_re(u, v), pairing_im(u, v)};
}

double real_inner(const ComplexField& u, const ComplexField& v) {
  require_same_grid(u.grid(), v.grid(), "real_inner");
  return pairing_re(u, v);
}

double symplectic(const ComplexField& u, const ComplexField& v) {
  require_same_grid(u.grid(), v.grid(), "symplectic");
  return pairing_im(u, v);
}

double integrate(const RealField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s * f.grid().cell_volume();
}

ComplexField spectral_derivative(const ComplexField& u, int axis, int order) {
  const auto& g = u.grid();
  if (order != 1 && order != 2) throw UsageError(fmt::format("derivative order must be 1 or 2, got {}", order));
  if (axis < 0 || axis >= g.dim()) throw UsageError(fmt::format("axis {} out of range for d={}", axis, g.dim()));
  auto spec = fft_forward(u);
  const auto k = g.wavenumbers();
  const int n = g.n();
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    const int i = g.dim() == 1 ? static_cast<int>(idx) : (axis == 0 ? static_cast<int>(idx / n) : static_cast<int>(idx % n));
    double kk = k[i];
    // The Nyquist mode has no odd-derivative partner.
    if (order == 1 && i == n / 2) kk = 0.0;
    spec[idx] *= order == 1 ? cplx(0.0, kk) : cplx(-kk * kk, 0.0);
  }
  return fft_inverse(u.grid_ptr(), std::move(spec));
}

ComplexField gradient_component(const ComplexField& u, int axis) { return spectral_derivative(u, axis, 1); }

ComplexField laplacian(const ComplexField& u) {
  const auto& g = u.grid();
  auto spec = fft_forward(u);
  const auto k = g.wavenumbers();
  const int n = g.n();
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    double k2;
    if (g.dim() == 1) {
      k2 = k[idx] * k[idx];
    } else {
      const double kx = k[idx / n], ky = k[idx % n];
      k2 = kx * kx + ky * ky;
    }
    spec[idx] *= -k2;
  }
  return fft_inverse(u.grid_ptr(), std::move(spec));
}

double gradient_norm_squared(const ComplexField& u) {
  const auto& g = u.grid();
  auto spec = fft_forward(u);
  const auto k = g.wavenumbers();
  const int n = g.n();
  double s = 0.0;
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    double k2;
    if (g.dim() == 1) {
      const double kx = static_cast<int>(idx) == n / 2 ? 0.0 : k[idx];
      k2 = kx * kx;
    } else {
      const int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
      const double kx = i == n / 2 ? 0.0 : k[i];
      const double ky = j == n / 2 ? 0.0 : k[j];
      k2 = kx * kx + ky * ky;
    }
    s += k2 * std::norm(spec[idx]);
  }
  // Parseval: h^d sum |u|^2 = h^d / n^d sum |u_hat|^2.
  return s * g.cell_volume() / static_cast<double>(g.size());
}

Norms norms(const ComplexField& u) {
  const double l2sq = std::max(0.0, pairing_re(u, u));
  const double g2 = gradient_norm_squared(u);
  return {std::sqrt(l2sq), std::sqrt(l2sq + g2)};
}

double l2_norm(const ComplexField& u) { return std::sqrt(std::max(0.0, pairing_re(u, u))); }
double h1_norm(const ComplexField& u) { return norms(u).h1; }

std::vector<cplx> kernel_transform(const RealField& W) {
  const auto& g = W.grid();
  const int n = g.n();
  const int half = n / 2;
  std::vector<cplx> buf(g.size());
  // Move the sample at x = 0 (index n/2) to index 0.
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (g.dim() == 1) {
      buf[(idx + half) % n] = W[idx];
    } else {
      const int i = static_cast<int>(idx / n), j = static_cast<int>(idx % n);
      buf[static_cast<std::size_t>((i + half) % n) * n + (j + half) % n] = W[idx];
    }
  }
  fft_forward_inplace(g, buf.data());
  const double hd = g.cell_volume();
  for (auto& c : buf) c *= hd;
  return buf;
}

RealField periodic_convolution_hat(const std::vector<cplx>& W_hat, const RealField& g) {
  const auto& grid = g.grid();
  if (W_hat.size() != grid.size()) throw UsageError("periodic_convolution: kernel transform size mismatch");
  std::vector<cplx> buf(g.values().begin(), g.values().end());
  fft_forward_inplace(grid, buf.data());
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= W_hat[i];
  fft_inverse_inplace(grid, buf.data());
  RealField out(g.grid_ptr());
  double im_max = 0.0, re_max = 0.0;
  for (std::size_t i = 0; i < buf.size(); ++i) {
    out[i] = buf[i].real();
    im_max = std::max(im_max, std::abs(buf[i].imag()));
    re_max = std::max(re_max, std::abs(buf[i].real()));
  }
  if (im_max > 1e-10 * std::max(1.0, re_max))
    throw NumericalError(fmt::format("periodic_convolution: imaginary residue {:.3e} exceeds tolerance", im_max));
  return out;
}

RealField periodic_convolution(const RealField& W, const RealField& g) {
  require_same_grid(W.grid(), g.grid(), "periodic_convolution");
  return periodic_convolution_hat(kernel_transform(W), g);
}

ComplexField fourier_shift(const ComplexField& u, std::array<double, 2> shift) {
  const auto& g = u.grid();
  if (shift[0] == 0.0 && (g.dim() == 1 || shift[1] == 0.0)) return u;
  auto spec = fft_forward(u);
  const auto k = g.wavenumbers();
  const int n = g.n();
  std::vector<cplx> px(n), py(g.dim() == 2 ? n : 0);
  for (int i = 0; i < n; ++i) {
    px[i] = std::polar(1.0, -k[i] * shift[0]);
    if (g.dim() == 2) py[i] = std::polar(1.0, -k[i] * shift[1]);
  }
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    if (g.dim() == 1) {
      spec[idx] *= px[idx];
    } else {
      spec[idx] *= px[idx / n] * py[idx % n];
    }
  }
  return fft_inverse(u.grid_ptr(), std::move(spec));
}

}  // namespace nlsdyn
