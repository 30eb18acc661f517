#include <cstdlib>
#include <string_view>

#include "csplab/kernels.hpp"

namespace csplab::kernels {

// Lives outside avx2.cpp so the check itself never runs AVX2 code.
bool avx2::supported() { return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"); }

namespace {

Backend detect() {
  const char* env = std::getenv("CSPLAB_SIMD");
  if (env && std::string_view(env) == "scalar") return Backend::Scalar;
  return avx2::supported() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

Backend active_backend() {
  static const Backend backend = detect();
  return backend;
}

const char* to_string(Backend backend) { return backend == Backend::Avx2 ? "avx2" : "scalar"; }

double dot(const double* a, const double* b, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::dot(a, b, n) : scalar::dot(a, b, n);
}

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
  if (active_backend() == Backend::Avx2)
    avx2::matvec(a, rows, cols, x, y);
  else
    scalar::matvec(a, rows, cols, x, y);
}

std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b, std::size_t n) {
  return active_backend() == Backend::Avx2 ? avx2::cdot(a, b, n) : scalar::cdot(a, b, n);
}

}  // namespace csplab::kernels
