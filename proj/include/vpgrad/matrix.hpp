#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vpgrad {

using Complex = std::complex<double>;
using Index = std::size_t;

/// Counts live and peak complex words allocated through a TrackingAllocator.
/// One word is one stored Complex (16 bytes); smaller element types are
/// rounded up per allocation.
class AllocationTracker {
 public:
  void on_allocate(std::size_t bytes) {
    current_ += words_for(bytes);
    if (current_ > peak_) peak_ = current_;
  }
  void on_deallocate(std::size_t bytes) { current_ -= words_for(bytes); }

  std::size_t current() const { return current_; }
  std::size_t peak() const { return peak_; }
  void reset_peak() { peak_ = current_; }

 private:
  static std::size_t words_for(std::size_t bytes) {
    return (bytes + sizeof(Complex) - 1) / sizeof(Complex);
  }

  std::size_t current_ = 0;
  std::size_t peak_ = 0;
};

/// std::allocator wrapper that reports to an optional AllocationTracker.
/// A null tracker makes it behave exactly like std::allocator.
template <typename T>
class TrackingAllocator {
 public:
  using value_type = T;

  TrackingAllocator() noexcept = default;
  explicit TrackingAllocator(AllocationTracker* tracker) noexcept : tracker_(tracker) {}
  template <typename U>
  TrackingAllocator(const TrackingAllocator<U>& other) noexcept : tracker_(other.tracker()) {}

  T* allocate(std::size_t n) {
    T* p = std::allocator<T>{}.allocate(n);
    if (tracker_) tracker_->on_allocate(n * sizeof(T));
    return p;
  }
  void deallocate(T* p, std::size_t n) noexcept {
    if (tracker_) tracker_->on_deallocate(n * sizeof(T));
    std::allocator<T>{}.deallocate(p, n);
  }

  AllocationTracker* tracker() const noexcept { return tracker_; }

  // Copies of a tracked container start untracked unless a tracker is
  // passed explicitly.
  TrackingAllocator select_on_container_copy_construction() const { return TrackingAllocator{}; }

  template <typename U>
  bool operator==(const TrackingAllocator<U>& other) const noexcept {
    return tracker_ == other.tracker();
  }

 private:
  AllocationTracker* tracker_ = nullptr;
};

template <typename T>
using TrackedVector = std::vector<T, TrackingAllocator<T>>;

/// Dense complex matrix, column-major, so every column is a contiguous span.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(Index rows, Index cols, AllocationTracker* tracker = nullptr)
      : rows_(rows), cols_(cols), data_(rows * cols, Complex{}, TrackingAllocator<Complex>(tracker)) {}

  /// Untracked deep copy of `other` placed under `tracker`.
  DenseMatrix(const DenseMatrix& other, AllocationTracker* tracker)
      : rows_(other.rows_),
        cols_(other.cols_),
        data_(other.data_.begin(), other.data_.end(), TrackingAllocator<Complex>(tracker)) {}

  static DenseMatrix identity(Index n) {
    DenseMatrix id(n, n);
    for (Index i = 0; i < n; ++i) id(i, i) = 1.0;
    return id;
  }

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Complex& operator()(Index i, Index j) { return data_[j * rows_ + i]; }
  const Complex& operator()(Index i, Index j) const { return data_[j * rows_ + i]; }

  std::span<Complex> col(Index j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const Complex> col(Index j) const { return {data_.data() + j * rows_, rows_}; }

  std::span<Complex> values() { return data_; }
  std::span<const Complex> values() const { return data_; }

  bool all_finite() const;
  /// Conjugate transpose.
  DenseMatrix adjoint() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  TrackedVector<Complex> data_;
};

DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix operator-(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix operator+(const DenseMatrix& x, const DenseMatrix& y);

double frobenius_norm(const DenseMatrix& x);
/// Largest entry modulus.
double max_abs(const DenseMatrix& x);
/// max |x_ij - y_ij| / max |y_ij|; the standard discrepancy used by the
/// gradient checks.
double relative_discrepancy(const DenseMatrix& x, const DenseMatrix& y);

/// ‖QᴴQ − I‖ entrywise max.
double orthogonality_defect(const DenseMatrix& q);

/// Thrown for incompatible shapes or non-finite
/// input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void require_finite(const DenseMatrix& x, const char* what) {
  if (!x.all_finite()) throw InputError(std::string(what) + ": non-finite entry");
}

inline void require_same_rows(const DenseMatrix& x, const DenseMatrix& y, const char* what) {
  if (x.rows() != y.rows()) {
    throw InputError(std::string(what) + ": row counts differ (" + std::to_string(x.rows()) +
                     " vs " + std::to_string(y.rows()) + ")");
  }
}

}  // namespace vpgrad
