#include "fft.hpp"

#include <mutex>
#include <new>

#include <fftw3.h>

namespace peaktag::detail {
namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

}  // namespace

void FftwDeleter::operator()(std::complex<double>* p) const noexcept { fftw_free(p); }

ComplexBuffer::ComplexBuffer(std::size_t count) : size_(count) {
  auto* raw = static_cast<std::complex<double>*>(
      fftw_malloc(sizeof(std::complex<double>) * (count == 0 ? 1 : count)));
  if (raw == nullptr) throw std::bad_alloc();
  data_.reset(raw);
  for (std::size_t i = 0; i < count; ++i) raw[i] = {0.0, 0.0};
}

struct Fft2d::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

Fft2d::Fft2d(int rows, int cols) : rows_(rows), cols_(cols), plans_(std::make_unique<Plans>()) {
  ComplexBuffer scratch(static_cast<std::size_t>(rows) * cols);
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft_2d(rows, cols, as_fftw(scratch.data()),
                                     as_fftw(scratch.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->inverse = fftw_plan_dft_2d(rows, cols, as_fftw(scratch.data()),
                                     as_fftw(scratch.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  if (plans_->forward == nullptr || plans_->inverse == nullptr) throw std::bad_alloc();
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->inverse) fftw_destroy_plan(plans_->inverse);
}

void Fft2d::forward(ComplexBuffer& data) const {
  fftw_execute_dft(plans_->forward, as_fftw(data.data()), as_fftw(data.data()));
}

void Fft2d::inverse(ComplexBuffer& data) const {
  fftw_execute_dft(plans_->inverse, as_fftw(data.data()), as_fftw(data.data()));
}

int next_fast_size(int n) {
  for (int m = n < 1 ? 1 : n;; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

}  // namespace peaktag::detail
