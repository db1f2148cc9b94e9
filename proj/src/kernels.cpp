#include "tcdmrg/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define TCDMRG_KERNELS_X86 1
#elif defined(__aarch64__)
#define TCDMRG_KERNELS_NEON 1
#endif

namespace tcdmrg::kernels {

double dot_scalar(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_scalar(std::size_t n, double a, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(std::size_t n, double a, double* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

#if TCDMRG_KERNELS_X86
double dot_avx2(std::size_t n, const double* x, const double* y);
void axpy_avx2(std::size_t n, double a, const double* x, double* y);
void scale_avx2(std::size_t n, double a, double* x);
#endif
#if TCDMRG_KERNELS_NEON
double dot_neon(std::size_t n, const double* x, const double* y);
void axpy_neon(std::size_t n, double a, const double* x, double* y);
void scale_neon(std::size_t n, double a, double* x);
#endif

namespace {

struct Dispatch {
  double (*dot)(std::size_t, const double*, const double*);
  void (*axpy)(std::size_t, double, const double*, double*);
  void (*scale)(std::size_t, double, double*);
  const char* isa;
};

Dispatch pick() {
#if TCDMRG_KERNELS_X86
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return {dot_avx2, axpy_avx2, scale_avx2, "avx2"};
#elif TCDMRG_KERNELS_NEON
  // NEON with double-precision FMA is baseline on AArch64.
  return {dot_neon, axpy_neon, scale_neon, "neon"};
#endif
  return {dot_scalar, axpy_scalar, scale_scalar, "scalar"};
}

const Dispatch& dispatch() {
  static const Dispatch d = pick();
  return d;
}

}  // namespace

double dot(std::size_t n, const double* x, const double* y) {
  return dispatch().dot(n, x, y);
}

void axpy(std::size_t n, double a, const double* x, double* y) {
  dispatch().axpy(n, a, x, y);
}

void scale(std::size_t n, double a, double* x) {
  dispatch().scale(n, a, x);
}

const char* active_isa() { return dispatch().isa; }

}  // namespace tcdmrg::kernels
