#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace nlsdyn {

using cplx = std::complex<double>;

// Periodic box [-L, L)^d with n points per axis.
class SpatialGrid {
 public:
  SpatialGrid(int dim, int n, double half_extent);

  int dim() const { return dim_; }
  int n() const { return n_; }
  double half_extent() const { return half_extent_; }
  double spacing() const { return h_; }
  double cell_volume() const { return dim_ == 1 ? h_ : h_ * h_; }
  std::size_t size() const { return size_; }

  // Axis samples x_i = -L + i h and wavenumbers in FFT order.
  std::span<const double> axis() const { return axis_; }
  std::span<const double> wavenumbers() const { return k_; }
  double k_max() const { return 3.141592653589793 / h_; }

  // Coordinates of flat index idx (row-major, axis 0 slowest).
  std::array<double, 2> point(std::size_t idx) const;
  std::array<int, 2> multi_index(std::size_t idx) const;

  bool same_as(const SpatialGrid& other) const;

 private:
  int dim_;
  int n_;
  double half_extent_;
  double h_;
  std::size_t size_;
  std::vector<double> axis_;
  std::vector<double> k_;
};

using GridPtr = std::shared_ptr<const SpatialGrid>;

GridPtr make_grid(int dim, int n, double half_extent);

// Throws UsageError when the grids differ.
void require_same_grid(const SpatialGrid& a, const SpatialGrid& b, const char* where);

template <typename T>
class Field {
 public:
  Field() = default;
  explicit Field(GridPtr grid) : grid_(std::move(grid)), values_(grid_->size()) {}
  Field(GridPtr grid, std::vector<T> values);

  const SpatialGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  std::span<const T> values() const { return values_; }
  std::span<T> values() { return values_; }
  T* data() { return values_.data(); }
  const T* data() const { return values_.data(); }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  bool all_finite() const;

  Field& operator+=(const Field& o);
  Field& operator-=(const Field& o);
  Field& operator*=(T s);

 private:
  GridPtr grid_;
  std::vector<T> values_;
};

using ComplexField = Field<cplx>;
using RealField = Field<double>;

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cplx s, ComplexField a);
RealField operator+(RealField a, const RealField& b);
RealField operator-(RealField a, const RealField& b);

ComplexField to_complex(const RealField& f);
RealField real_part(const ComplexField& f);
RealField imag_part(const ComplexField& f);
RealField modulus_squared(const ComplexField& f);
// Pointwise product.
ComplexField multiply(const RealField& a, const ComplexField& b);

}  // namespace nlsdyn
