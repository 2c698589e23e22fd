#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace seqparse {

using Real = double;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Rng = std::mt19937_64;

// Raised for any shape disagreement between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a computation produces NaN or infinity.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string shape_str(const Mat& m);

// result = W x + U y
Vec affine(const Mat& w, const Vec& x, const Mat& u, const Vec& y);

// Numerically stable softmax (max-subtracted). Throws on empty input.
Vec softmax(const Vec& u);

// log(softmax(u)[index]) without forming the full distribution twice.
Real log_softmax_at(const Vec& u, Eigen::Index index);

enum class Elementwise { kSigm, kTanh, kMultiply, kAdd };

Real sigm(Real z);
Vec sigm(const Vec& z);
Vec tanh(const Vec& z);
Vec elementwise(Elementwise op, const Vec& a);
Vec elementwise(Elementwise op, const Vec& a, const Vec& b);

// Fills with independent draws from U[-scale, scale].
void init_uniform(Mat& m, Real scale, Rng& rng);
void init_uniform(Vec& v, Real scale, Rng& rng);

bool all_finite(const Mat& m);
bool all_finite(const Vec& v);

using ScalarFn = std::function<Real(std::span<const Real>)>;

// Central finite-difference check of `analytic` against `f` at `theta`.
// Returns max_i |a_i - n_i| / max(1e-8, |a_i| + |n_i|).
Real grad_check(const ScalarFn& f, std::span<const Real> theta,
                std::span<const Real> analytic, Real eps = 1e-5);

}  // namespace seqparse
