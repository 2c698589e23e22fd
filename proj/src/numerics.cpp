#include "seqparse/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace seqparse {

std::string shape_str(const Mat& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

Vec affine(const Mat& w, const Vec& x, const Mat& u, const Vec& y) {
  if (w.cols() != x.size() || u.cols() != y.size() || w.rows() != u.rows()) {
    std::ostringstream os;
    os << "affine: W " << shape_str(w) << " * x[" << x.size() << "] + U "
       << shape_str(u) << " * y[" << y.size() << "]";
    throw DimensionError(os.str());
  }
  Vec out = w * x;
  out.noalias() += u * y;
  return out;
}

Vec softmax(const Vec& u) {
  if (u.size() == 0) throw DimensionError("softmax: empty input");
  Vec e = (u.array() - u.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Real log_softmax_at(const Vec& u, Eigen::Index index) {
  if (u.size() == 0) throw DimensionError("log_softmax_at: empty input");
  if (index < 0 || index >= u.size()) {
    throw DimensionError("log_softmax_at: index " + std::to_string(index) +
                         " outside [0," + std::to_string(u.size()) + ")");
  }
  const Real mx = u.maxCoeff();
  return u(index) - mx - std::log((u.array() - mx).exp().sum());
}

Real sigm(Real z) { return 1.0 / (1.0 + std::exp(-z)); }

Vec sigm(const Vec& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

Vec tanh(const Vec& z) { return z.array().tanh().matrix(); }

Vec elementwise(Elementwise op, const Vec& a) {
  switch (op) {
    case Elementwise::kSigm:
      return sigm(a);
    case Elementwise::kTanh:
      return tanh(a);
    default:
      throw std::invalid_argument("elementwise: binary op given one operand");
  }
}

Vec elementwise(Elementwise op, const Vec& a, const Vec& b) {
  if (op == Elementwise::kSigm || op == Elementwise::kTanh) {
    throw std::invalid_argument("elementwise: unary op given two operands");
  }
  if (a.size() != b.size()) {
    throw DimensionError("elementwise: lengths " + std::to_string(a.size()) +
                         " and " + std::to_string(b.size()));
  }
  if (op == Elementwise::kMultiply) return a.cwiseProduct(b);
  return a + b;
}

void init_uniform(Mat& m, Real scale, Rng& rng) {
  std::uniform_real_distribution<Real> dist(-scale, scale);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

void init_uniform(Vec& v, Real scale, Rng& rng) {
  std::uniform_real_distribution<Real> dist(-scale, scale);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
}

bool all_finite(const Mat& m) { return m.allFinite(); }
bool all_finite(const Vec& v) { return v.allFinite(); }

Real grad_check(const ScalarFn& f, std::span<const Real> theta,
                std::span<const Real> analytic, Real eps) {
  if (theta.size() != analytic.size()) {
    throw DimensionError("grad_check: " + std::to_string(theta.size()) +
                         " parameters but " + std::to_string(analytic.size()) +
                         " gradient entries");
  }
  if (!(eps > 0)) throw std::invalid_argument("grad_check: eps must be > 0");
  std::vector<Real> probe(theta.begin(), theta.end());
  Real worst = 0;
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const Real saved = probe[i];
    probe[i] = saved + eps;
    const Real plus = f(probe);
    probe[i] = saved - eps;
    const Real minus = f(probe);
    probe[i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw NonFiniteError("grad_check: non-finite objective at coordinate " +
                           std::to_string(i));
    }
    const Real numeric = (plus - minus) / (2 * eps);
    const Real denom = std::max<Real>(1e-8, std::abs(analytic[i]) + std::abs(numeric));
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace seqparse
