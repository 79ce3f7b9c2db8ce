#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace savrl {

using Vec = std::vector<double>;

// Dense row-major matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  Vec a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
  std::size_t size() const { return a.size(); }
};

// Work threshold below which the dispatching kernels stay serial.
inline constexpr std::int64_t kParallelWorkCutoff = 1 << 14;

// y = W x + b. Each output row is an independent dot product, so the omp
// variant matches the serial one bit for bit.
void affine_serial(const Mat& w, const Vec& b, std::span<const double> x, Vec& y);
void affine_omp(const Mat& w, const Vec& b, std::span<const double> x, Vec& y);
void affine(const Mat& w, const Vec& b, std::span<const double> x, Vec& y);

// y = W^T d (input gradient of an affine layer).
void matvec_transpose_serial(const Mat& w, std::span<const double> d, Vec& y);
void matvec_transpose_omp(const Mat& w, std::span<const double> d, Vec& y);
void matvec_transpose(const Mat& w, std::span<const double> d, Vec& y);

// gw += d x^T, gb += d.
void accumulate_outer_serial(std::span<const double> d, std::span<const double> x,
                             Mat& gw, Vec& gb);
void accumulate_outer_omp(std::span<const double> d, std::span<const double> x,
                          Mat& gw, Vec& gb);
void accumulate_outer(std::span<const double> d, std::span<const double> x,
                      Mat& gw, Vec& gb);

}  // namespace savrl
