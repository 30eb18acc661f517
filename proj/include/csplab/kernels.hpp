#pragma once

#include <complex>
#include <cstddef>

// Dense floating-point kernels used by the Fourier diagnostics. The scalar
// versions are the reference; the AVX2/FMA versions are picked at runtime
// when the CPU supports them, unless CSPLAB_SIMD=scalar is set.
namespace csplab::kernels {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
const char* to_string(Backend backend);

// Σ a_i b_i.
double dot(const double* a, const double* b, std::size_t n);
// y = A x with A row-major, rows × cols.
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
// Σ a_i conj(b_i).
std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
bool supported();
double dot(const double* a, const double* b, std::size_t n);
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
std::complex<double> cdot(const std::complex<double>* a, const std::complex<double>* b, std::size_t n);
}  // namespace avx2

}  // namespace csplab::kernels
