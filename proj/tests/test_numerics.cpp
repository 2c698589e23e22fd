#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "seqparse/numerics.hpp"

using namespace seqparse;

namespace {

Vec vec(std::initializer_list<Real> xs) {
  Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (Real x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST_CASE("affine") {
  SUBCASE("identity plus zero") {
    Vec r = affine(Mat::Identity(2, 2), vec({3, 4}), Mat::Zero(2, 2), vec({9, 9}));
    CHECK(r == vec({3, 4}));
  }
  SUBCASE("all zero weights") {
    Vec r = affine(Mat::Zero(3, 2), vec({1, -2}), Mat::Zero(3, 4), vec({1, 2, 3, 4}));
    CHECK(r.isZero(0));
  }
  SUBCASE("hand arithmetic") {
    Mat w(2, 2);
    w << 1, 2, 3, 4;
    Vec r = affine(w, vec({1, 1}), Mat::Identity(2, 2), vec({5, 6}));
    CHECK(r == vec({8, 13}));
  }
  SUBCASE("shape mismatch names the shapes") {
    try {
      affine(Mat::Zero(2, 3), vec({1, 2}), Mat::Zero(2, 2), vec({1, 2}));
      FAIL("expected DimensionError");
    } catch (const DimensionError& e) {
      CHECK(std::string(e.what()).find("2x3") != std::string::npos);
    }
  }
}

TEST_CASE("affine is linear in x") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Mat w(4, 5);
    Vec x(5), y(5);
    init_uniform(w, 1.0, rng);
    init_uniform(x, 1.0, rng);
    init_uniform(y, 1.0, rng);
    const Real a = 0.3 * trial - 2, b = 1.7 - 0.1 * trial;
    const Mat z = Mat::Zero(4, 1);
    const Vec zy = Vec::Zero(1);
    const Vec lhs = affine(w, a * x + b * y, z, zy);
    const Vec rhs = a * affine(w, x, z, zy) + b * affine(w, y, z, zy);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("softmax") {
  CHECK(softmax(vec({0, 0})).isApprox(vec({0.5, 0.5})));
  for (Real c : {-1e4, -3.0, 0.0, 2.5, 1e4}) {
    const Vec s = softmax(vec({c, c, c, c}));
    CHECK((s - Vec::Constant(4, 0.25)).cwiseAbs().maxCoeff() < 1e-12);
  }
  const Vec s = softmax(vec({std::log(1.0), std::log(3.0)}));
  CHECK(s(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s(1) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_THROWS_AS(softmax(Vec()), DimensionError);
}

TEST_CASE("softmax sums to one and is shift invariant") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Vec u(1 + trial % 17);
    init_uniform(u, 50.0, rng);
    const Vec s = softmax(u);
    CHECK(std::abs(s.sum() - 1.0) < 1e-6);
    CHECK(s.minCoeff() > 0);
    CHECK(s.maxCoeff() <= 1.0);
    const Vec shifted = softmax((u.array() + 123.25).matrix());
    CHECK((s - shifted).cwiseAbs().maxCoeff() < 1e-9);
  }
  CHECK(softmax(vec({1000, 0}))(0) == doctest::Approx(1.0));
}

TEST_CASE("log_softmax_at agrees with log of softmax") {
  const Vec u = vec({0.1, -2, 3.5});
  for (Eigen::Index i = 0; i < 3; ++i) {
    CHECK(log_softmax_at(u, i) == doctest::Approx(std::log(softmax(u)(i))).epsilon(1e-12));
  }
}

TEST_CASE("elementwise") {
  CHECK(elementwise(Elementwise::kSigm, vec({0}))(0) == 0.5);
  CHECK(elementwise(Elementwise::kTanh, vec({0}))(0) == 0.0);
  CHECK(elementwise(Elementwise::kMultiply, vec({2, 3}), vec({4, 5})) == vec({8, 15}));
  CHECK(elementwise(Elementwise::kAdd, vec({2, 3}), vec({4, 5})) == vec({6, 8}));
  CHECK_THROWS_AS(elementwise(Elementwise::kAdd, vec({1}), vec({1, 2})), DimensionError);
}

TEST_CASE("grad_check") {
  SUBCASE("quadratic") {
    std::vector<Real> theta = {0.3, -1.2, 2.0, 0.01};
    std::vector<Real> grad;
    for (Real t : theta) grad.push_back(2 * t);
    ScalarFn f = [](std::span<const Real> x) {
      Real s = 0;
      for (Real v : x) s += v * v;
      return s;
    };
    CHECK(grad_check(f, theta, grad) < 1e-6);
  }
  SUBCASE("constant") {
    std::vector<Real> theta = {1, 2, 3};
    std::vector<Real> grad = {0, 0, 0};
    CHECK(grad_check([](std::span<const Real>) { return 4.0; }, theta, grad) == 0.0);
  }
  SUBCASE("detects a wrong gradient") {
    std::vector<Real> theta = {1.0};
    std::vector<Real> grad = {3.0};
    CHECK(grad_check([](std::span<const Real> x) { return x[0] * x[0]; }, theta, grad) > 0.1);
  }
  SUBCASE("non-finite objective") {
    std::vector<Real> theta = {1.0};
    std::vector<Real> grad = {0.0};
    CHECK_THROWS_AS(grad_check([](std::span<const Real>) { return NAN; }, theta, grad), NonFiniteError);
  }
}

TEST_CASE("differentiable kernels pass grad_check at random points") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Vec z(6);
    init_uniform(z, 2.0, rng);
    std::vector<Real> theta(z.data(), z.data() + z.size());
    Vec w(6);
    init_uniform(w, 1.0, rng);

    // f = w . sigm(z)
    std::vector<Real> g_sigm(6), g_tanh(6), g_soft(6);
    const Vec s = sigm(z), t = tanh(z), p = softmax(z);
    for (int i = 0; i < 6; ++i) {
      g_sigm[i] = w(i) * s(i) * (1 - s(i));
      g_tanh[i] = w(i) * (1 - t(i) * t(i));
    }
    const Real wp = w.dot(p);
    for (int i = 0; i < 6; ++i) g_soft[i] = p(i) * (w(i) - wp);

    auto as_vec = [](std::span<const Real> x) { return Vec(Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size()))); };
    CHECK(grad_check([&](std::span<const Real> x) { return w.dot(sigm(as_vec(x))); }, theta, g_sigm) < 1e-6);
    CHECK(grad_check([&](std::span<const Real> x) { return w.dot(tanh(as_vec(x))); }, theta, g_tanh) < 1e-6);
    CHECK(grad_check([&](std::span<const Real> x) { return w.dot(softmax(as_vec(x))); }, theta, g_soft) < 1e-6);
  }
}

TEST_CASE("init_uniform stays in range and is seeded") {
  Rng a(42), b(42);
  Mat m1(10, 10), m2(10, 10);
  init_uniform(m1, 0.08, a);
  init_uniform(m2, 0.08, b);
  CHECK(m1 == m2);
  CHECK(m1.cwiseAbs().maxCoeff() <= 0.08);
}
