#include "savrl/linalg.hpp"

#include "savrl/parallel.hpp"

namespace savrl {

namespace {

inline void affine_row(const Mat& w, const Vec& b, std::span<const double> x,
                       Vec& y, int r) {
  const double* wr = w.a.data() + static_cast<std::size_t>(r) * w.cols;
  double acc = b[static_cast<std::size_t>(r)];
  for (int c = 0; c < w.cols; ++c) acc += wr[c] * x[static_cast<std::size_t>(c)];
  y[static_cast<std::size_t>(r)] = acc;
}

}  // namespace

void affine_serial(const Mat& w, const Vec& b, std::span<const double> x, Vec& y) {
  y.resize(static_cast<std::size_t>(w.rows));
  for (int r = 0; r < w.rows; ++r) affine_row(w, b, x, y, r);
}

void affine_omp(const Mat& w, const Vec& b, std::span<const double> x, Vec& y) {
  y.resize(static_cast<std::size_t>(w.rows));
  parallel_for(w.rows, [&](std::int64_t r) { affine_row(w, b, x, y, static_cast<int>(r)); });
}

void affine(const Mat& w, const Vec& b, std::span<const double> x, Vec& y) {
  if (static_cast<std::int64_t>(w.size()) >= kParallelWorkCutoff) {
    affine_omp(w, b, x, y);
  } else {
    affine_serial(w, b, x, y);
  }
}

void matvec_transpose_serial(const Mat& w, std::span<const double> d, Vec& y) {
  y.resize(static_cast<std::size_t>(w.cols));
  for (int c = 0; c < w.cols; ++c) {
    double acc = 0.0;
    for (int r = 0; r < w.rows; ++r) acc += w(r, c) * d[static_cast<std::size_t>(r)];
    y[static_cast<std::size_t>(c)] = acc;
  }
}

void matvec_transpose_omp(const Mat& w, std::span<const double> d, Vec& y) {
  y.resize(static_cast<std::size_t>(w.cols));
  parallel_for(w.cols, [&](std::int64_t c) {
    double acc = 0.0;
    for (int r = 0; r < w.rows; ++r) acc += w(r, static_cast<int>(c)) * d[static_cast<std::size_t>(r)];
    y[static_cast<std::size_t>(c)] = acc;
  });
}

void matvec_transpose(const Mat& w, std::span<const double> d, Vec& y) {
  if (static_cast<std::int64_t>(w.size()) >= kParallelWorkCutoff) {
    matvec_transpose_omp(w, d, y);
  } else {
    matvec_transpose_serial(w, d, y);
  }
}

void accumulate_outer_serial(std::span<const double> d, std::span<const double> x,
                             Mat& gw, Vec& gb) {
  for (int r = 0; r < gw.rows; ++r) {
    double* gr = gw.a.data() + static_cast<std::size_t>(r) * gw.cols;
    const double dr = d[static_cast<std::size_t>(r)];
    for (int c = 0; c < gw.cols; ++c) gr[c] += dr * x[static_cast<std::size_t>(c)];
    gb[static_cast<std::size_t>(r)] += dr;
  }
}

void accumulate_outer_omp(std::span<const double> d, std::span<const double> x,
                          Mat& gw, Vec& gb) {
  parallel_for(gw.rows, [&](std::int64_t r) {
    double* gr = gw.a.data() + static_cast<std::size_t>(r) * gw.cols;
    const double dr = d[static_cast<std::size_t>(r)];
    for (int c = 0; c < gw.cols; ++c) gr[c] += dr * x[static_cast<std::size_t>(c)];
    gb[static_cast<std::size_t>(r)] += dr;
  });
}

void accumulate_outer(std::span<const double> d, std::span<const double> x,
                      Mat& gw, Vec& gb) {
  if (static_cast<std::int64_t>(gw.size()) >= kParallelWorkCutoff) {
    accumulate_outer_omp(d, x, gw, gb);
  } else {
    accumulate_outer_serial(d, x, gw, gb);
  }
}

}  // namespace savrl
