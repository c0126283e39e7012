#pragma once

#include <complex>
#include <cstddef>
#include <memory>

namespace peaktag::detail {

struct FftwDeleter {
  void operator()(std::complex<double>* p) const noexcept;
};

/// SIMD-aligned complex buffer owned by FFTW's allocator.
class ComplexBuffer {
 public:
  explicit ComplexBuffer(std::size_t count);

  std::complex<double>* data() noexcept { return data_.get(); }
  const std::complex<double>* data() const noexcept { return data_.get(); }
  std::size_t size() const noexcept { return size_; }
  std::complex<double>& operator[](std::size_t i) noexcept { return data_[i]; }
  const std::complex<double>& operator[](std::size_t i) const noexcept { return data_[i]; }

 private:
  std::unique_ptr<std::complex<double>[], FftwDeleter> data_;
  std::size_t size_;
};

/// In-place 2D complex DFT of a fixed rows × cols shape. Plans are created
/// under a process-wide lock; execution is safe from any thread.
class Fft2d {
 public:
  Fft2d(int rows, int cols);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  void forward(ComplexBuffer& data) const;
  /// Unnormalized inverse; divide by rows·cols.
  void inverse(ComplexBuffer& data) const;

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

 private:
  struct Plans;
  int rows_;
  int cols_;
  std::unique_ptr<Plans> plans_;
};

/// Smallest n' ≥ n whose prime factors are all in {2, 3, 5, 7}.
int next_fast_size(int n);

}  // namespace peaktag::detail
