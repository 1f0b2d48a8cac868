#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace chartkit::kernels {

// Dense double-precision kernels behind the adapter's linear algebra.
// Every operation has a scalar reference implementation and, where the host
// supports it, an AVX2/FMA or NEON variant selected once at startup. The
// variants are equivalence-tested against the scalar reference.

// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);

double dot(std::span<const double> a, std::span<const double> b);

// y = W x + bias; W is row-major [rows x cols], x has cols entries.
void affine(std::span<const double> w, std::span<const double> bias,
            std::span<const double> x, std::span<double> y, std::size_t rows,
            std::size_t cols);

// y = W^T d; W is row-major [rows x cols], d has rows entries.
void matvec_t(std::span<const double> w, std::span<const double> d,
              std::span<double> y, std::size_t rows, std::size_t cols);

// W += scale * d x^T (rank-1 update of a row-major [rows x cols] matrix).
void rank1_update(std::span<double> w, std::span<const double> d,
                  std::span<const double> x, double scale, std::size_t rows,
                  std::size_t cols);

// Classical momentum step over a parameter array:
//   v = mu * v - lr * g;  w += v
void momentum_step(std::span<double> w, std::span<double> v,
                   std::span<const double> g, double mu, double lr);

// Numerically stable in-place softmax.
void softmax_inplace(std::span<double> x);

// Name of the instruction set the dispatcher picked: "avx2", "neon" or
// "scalar".
std::string_view active_isa();

// Test hook: pin all kernels to the scalar reference path (true) or restore
// the detected best path (false).
void force_scalar(bool on);

namespace detail {
// Scalar reference implementations, exposed for equivalence tests.
void axpy_scalar(double a, std::span<const double> x, std::span<double> y);
double dot_scalar(std::span<const double> a, std::span<const double> b);
void momentum_step_scalar(std::span<double> w, std::span<double> v,
                          std::span<const double> g, double mu, double lr);
}  // namespace detail

}  // namespace chartkit::kernels
