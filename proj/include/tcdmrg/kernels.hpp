#pragma once

#include <cstddef>

// Vector kernels behind the hot loops: Davidson orthogonalization, sparse MPO
// tensor application, truncation bookkeeping.  A scalar reference
// implementation always exists; on x86-64 an AVX2+FMA variant and on AArch64 a
// NEON variant are compiled in and one of them is selected once at startup
// from the CPU capabilities.  The scalar entry points stay exported so the
// dispatched path can be equivalence-tested against them.

namespace tcdmrg::kernels {

double dot(std::size_t n, const double* x, const double* y);
void axpy(std::size_t n, double a, const double* x, double* y);  // y += a*x
void scale(std::size_t n, double a, double* x);                  // x *= a

double dot_scalar(std::size_t n, const double* x, const double* y);
void axpy_scalar(std::size_t n, double a, const double* x, double* y);
void scale_scalar(std::size_t n, double a, double* x);

// Instruction set picked at startup: "avx2", "neon" or "scalar".
const char* active_isa();

}  // namespace tcdmrg::kernels
