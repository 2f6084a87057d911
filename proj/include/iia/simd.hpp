#pragma once

#include <cstddef>

#include "iia/jets.hpp"

namespace iia::simd {

enum class Isa { Scalar, Avx2, Neon };

// Highest instruction set usable on this CPU, decided once at startup.
Isa detected_isa();
const char* isa_name(Isa isa);
bool isa_available(Isa isa);

// Kernels used by the tensor engine. The dispatching versions pick the
// detected ISA; the suffixed ones are exposed for equivalence tests.
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
// acc += a * b in jet arithmetic.
void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b);
}  // namespace scalar

namespace avx2 {
bool available();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b);
}  // namespace avx2

namespace neon {
bool available();
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void jet_fma(Jet2& acc, const Jet2& a, const Jet2& b);
}  // namespace neon

// Force a kernel family; unavailable families fall back to scalar.
void set_isa(Isa isa);
Isa active_isa();

}  // namespace iia::simd
