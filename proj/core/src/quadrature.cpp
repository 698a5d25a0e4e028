#include "prodint/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <type_traits>

#include "prodint/errors.hpp"

namespace prodint {

namespace {

struct Gauss5 {
  double node[5];
  double weight[5];
};

Gauss5 gauss5() {
  Gauss5 g;
  const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
  const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
  const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
  g.node[0] = -b; g.node[1] = -a; g.node[2] = 0.0; g.node[3] = a; g.node[4] = b;
  g.weight[0] = wb; g.weight[1] = wa; g.weight[2] = 128.0 / 225.0; g.weight[3] = wa; g.weight[4] = wb;
  return g;
}

std::vector<double> initial_edges(double a, double b, const std::vector<double>& breakpoints) {
  std::vector<double> edges;
  edges.push_back(a);
  for (double bp : breakpoints)
    if (bp > a && bp < b) edges.push_back(bp);
  edges.push_back(b);
  return edges;
}

std::vector<double> halve(const std::vector<double>& edges) {
  std::vector<double> out;
  out.reserve(edges.size() * 2 - 1);
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    out.push_back(edges[i]);
    out.push_back(0.5 * (edges[i] + edges[i + 1]));
  }
  out.push_back(edges.back());
  return out;
}

template <typename Value, typename Eval, typename Norm, typename Zero>
Value refine(const Eval& f, double a, double b, const std::vector<double>& breakpoints,
             const QuadratureOptions& opts, const Norm& norm, const Zero& zero) {
  static const Gauss5 g = gauss5();
  std::vector<double> edges = initial_edges(a, b, breakpoints);
  auto composite = [&](const std::vector<double>& es) {
    Value acc = zero();
    for (size_t i = 0; i + 1 < es.size(); ++i) {
      const double mid = 0.5 * (es[i] + es[i + 1]);
      const double half = 0.5 * (es[i + 1] - es[i]);
      for (int k = 0; k < 5; ++k) acc += (g.weight[k] * half) * f(mid + half * g.node[k]);
    }
    return acc;
  };
  Value prev = composite(edges);
  while (true) {
    edges = halve(edges);
    Value next = composite(edges);
    const double delta = norm(next - prev);
    if (delta <= opts.rel_tol * std::max(1.0, norm(next))) return next;
    if (static_cast<int>(edges.size()) - 1 > opts.max_panels) {
      if constexpr (std::is_same_v<Value, Mat>) {
        throw QuadratureError("quadrature did not reach tolerance within the panel cap", delta,
                              next);
      } else {
        throw QuadratureError("quadrature did not reach tolerance within the panel cap", delta,
                              Mat::Constant(1, 1, next));
      }
    }
    prev = next;
  }
}

}  // namespace

Mat riemann_integral(const Curve& gamma, const QuadratureOptions& opts) {
  return riemann_integral(gamma, gamma.lo(), gamma.hi(), opts);
}

Mat riemann_integral(const Curve& gamma, double a, double b, const QuadratureOptions& opts) {
  if (a == b) {
    const Mat probe = gamma(gamma.lo());
    return Mat::Zero(probe.rows(), probe.cols());
  }
  if (a > b) return -riemann_integral(gamma, b, a, opts);
  const Mat probe = gamma(a);
  const Eigen::Index r = probe.rows(), c = probe.cols();
  return refine<Mat>([&gamma](double t) { return gamma(t); }, a, b, gamma.breakpoints(), opts,
                     [](const Mat& m) { return max_norm(m); },
                     [r, c]() { return Mat::Zero(r, c); });
}

double integrate_scalar(const std::function<double(double)>& f, double a, double b,
                        const std::vector<double>& breakpoints, const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_scalar(f, b, a, breakpoints, opts);
  return refine<double>(f, a, b, breakpoints, opts, [](double d) { return std::abs(d); },
                        []() { return 0.0; });
}

}  // namespace prodint
