#include "nlsdyn/grid.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nlsdyn/error.hpp"

namespace nlsdyn {

SpatialGrid::SpatialGrid(int dim, int n, double half_extent)
    : dim_(dim), n_(n), half_extent_(half_extent) {
  if (dim != 1 && dim != 2) throw UsageError(fmt::format("grid dimension must be 1 or 2, got {}", dim));
  if (n < 16 || (n & (n - 1)) != 0)
    throw UsageError(fmt::format("points per axis must be a power of two >= 16, got {}", n));
  if (!(half_extent > 0.0) || !std::isfinite(half_extent))
    throw UsageError(fmt::format("box half-extent must be positive, got {}", half_extent));
  h_ = 2.0 * half_extent / n;
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n;
  axis_.resize(n);
  k_.resize(n);
  const double dk = 3.141592653589793 / half_extent;
  for (int i = 0; i < n; ++i) {
    axis_[i] = -half_extent + i * h_;
    const int m = i < n / 2 ? i : i - n;
    k_[i] = dk * m;
  }
}

std::array<int, 2> SpatialGrid::multi_index(std::size_t idx) const {
  if (dim_ == 1) return {static_cast<int>(idx), 0};
  return {static_cast<int>(idx / n_), static_cast<int>(idx % n_)};
}

std::array<double, 2> SpatialGrid::point(std::size_t idx) const {
  const auto mi = multi_index(idx);
  if (dim_ == 1) return {axis_[mi[0]], 0.0};
  return {axis_[mi[0]], axis_[mi[1]]};
}

bool SpatialGrid::same_as(const SpatialGrid& o) const {
  return dim_ == o.dim_ && n_ == o.n_ && half_extent_ == o.half_extent_;
}

GridPtr make_grid(int dim, int n, double half_extent) {
  return std::make_shared<const SpatialGrid>(dim, n, half_extent);
}

void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where) {
  if (&a == &b || a.same_as(b)) return;
  throw UsageError(fmt::format("{}: grid mismatch (d={}, n={}, L={} vs d={}, n={}, L={})", where, a.dim(),
                               a.n(), a.half_extent(), b.dim(), b.n(), b.half_extent()));
}

template <typename T>
Field<T>::Field(GridPtr grid, std::vector<T> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size())
    throw UsageError(fmt::format("field has {} values but grid has {} points", values_.size(), grid_->size()));
}

template <typename T>
bool Field<T>::all_finite() const {
  for (const auto& v : values_) {
    if constexpr (std::is_same_v<T, cplx>) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    } else {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template <typename T>
Field<T>& Field<T>::operator+=(const Field& o) {
  require_same_grid(*grid_, *o.grid_, "field addition");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

template <typename T>
Field<T>& Field<T>::operator-=(const Field& o) {
  require_same_grid(*grid_, *o.grid_, "field subtraction");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

template <typename T>
Field<T>& Field<T>::operator*=(T s) {
  for (auto& v : values_) v *= s;
  return *this;
}

template class Field<cplx>;
template class Field<double>;

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cplx s, ComplexField a) { return a *= s; }
RealField operator+(RealField a, const RealField& b) { return a += b; }
RealField operator-(RealField a, const RealField& b) { return a -= b; }

ComplexField to_complex(const RealField& f) {
  ComplexField out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
  return out;
}

RealField real_part(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
  return out;
}

RealField imag_part(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].imag();
  return out;
}

RealField modulus_squared(const ComplexField& f) {
  RealField out(f.grid_ptr());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::norm(f[i]);
  return out;
}

ComplexField multiply(const RealField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid(), "pointwise product");
  ComplexField out(b.grid_ptr());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace nlsdyn
