#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chartkit/kernels.hpp"

using namespace chartkit::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v)
    x = static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
  return v;
}

bool close(double a, double b, double tol = 1e-9) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// Restores the detected dispatch after each forced-scalar block.
struct ScalarGuard {
  ScalarGuard() { force_scalar(true); }
  ~ScalarGuard() { force_scalar(false); }
};

}  // namespace

TEST_CASE("dispatcher reports a known instruction set") {
  std::string_view isa = active_isa();
  CHECK((isa == "avx2" || isa == "neon" || isa == "scalar"));
  {
    ScalarGuard guard;
    CHECK(active_isa() == "scalar");
  }
  CHECK((active_isa() == "avx2" || active_isa() == "neon" ||
         active_isa() == "scalar"));
}

TEST_CASE("axpy matches the scalar reference across sizes") {
  std::mt19937_64 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 64u, 257u, 1000u}) {
    std::vector<double> x = random_vec(rng, n);
    std::vector<double> y = random_vec(rng, n);
    std::vector<double> y_ref = y;
    double a = 0.7;
    axpy(a, x, y);
    detail::axpy_scalar(a, x, y_ref);
    for (std::size_t i = 0; i < n; ++i) CHECK(close(y[i], y_ref[i]));
  }
}

TEST_CASE("dot matches the scalar reference across sizes") {
  std::mt19937_64 rng(2);
  for (std::size_t n : {0u, 1u, 2u, 5u, 8u, 9u, 31u, 256u, 4096u}) {
    std::vector<double> a = random_vec(rng, n);
    std::vector<double> b = random_vec(rng, n);
    CHECK(close(dot(a, b), detail::dot_scalar(a, b)));
  }
}

TEST_CASE("momentum step matches the scalar reference") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 4u, 5u, 100u, 1023u}) {
    std::vector<double> w = random_vec(rng, n), w2 = w;
    std::vector<double> v = random_vec(rng, n), v2 = v;
    std::vector<double> g = random_vec(rng, n);
    momentum_step(w, v, g, 0.9, 0.05);
    detail::momentum_step_scalar(w2, v2, g, 0.9, 0.05);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(close(w[i], w2[i]));
      CHECK(close(v[i], v2[i]));
    }
  }
}

TEST_CASE("affine equals hand-rolled matrix-vector product") {
  std::mt19937_64 rng(4);
  const std::size_t rows = 7, cols = 13;
  std::vector<double> w = random_vec(rng, rows * cols);
  std::vector<double> b = random_vec(rng, rows);
  std::vector<double> x = random_vec(rng, cols);
  std::vector<double> y(rows);
  affine(w, b, x, y, rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double expect = b[r];
    for (std::size_t c = 0; c < cols; ++c) expect += w[r * cols + c] * x[c];
    CHECK(close(y[r], expect));
  }
}

TEST_CASE("matvec_t equals the transposed product") {
  std::mt19937_64 rng(5);
  const std::size_t rows = 6, cols = 9;
  std::vector<double> w = random_vec(rng, rows * cols);
  std::vector<double> d = random_vec(rng, rows);
  std::vector<double> y(cols);
  matvec_t(w, d, y, rows, cols);
  for (std::size_t c = 0; c < cols; ++c) {
    double expect = 0.0;
    for (std::size_t r = 0; r < rows; ++r) expect += w[r * cols + c] * d[r];
    CHECK(close(y[c], expect));
  }
}

TEST_CASE("rank1_update accumulates the outer product") {
  std::mt19937_64 rng(6);
  const std::size_t rows = 5, cols = 8;
  std::vector<double> w = random_vec(rng, rows * cols);
  std::vector<double> w0 = w;
  std::vector<double> d = random_vec(rng, rows);
  std::vector<double> x = random_vec(rng, cols);
  rank1_update(w, d, x, 2.0, rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      CHECK(close(w[r * cols + c], w0[r * cols + c] + 2.0 * d[r] * x[c]));
}

TEST_CASE("simd and scalar paths agree on long accumulations") {
  std::mt19937_64 rng(7);
  std::vector<double> a = random_vec(rng, 4096);
  std::vector<double> b = random_vec(rng, 4096);
  double fast = dot(a, b);
  double slow;
  {
    ScalarGuard guard;
    slow = dot(a, b);
  }
  CHECK(close(fast, slow, 1e-10));
}

TEST_CASE("softmax is normalized and stable under large logits") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x = random_vec(rng, 8);
    for (double& v : x) v = v * 500.0;  // stress the max-subtraction
    softmax_inplace(x);
    double sum = 0.0;
    for (double v : x) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-6);
  }
}
