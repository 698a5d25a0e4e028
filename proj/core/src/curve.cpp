#include "prodint/curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "prodint/errors.hpp"

namespace prodint {

namespace {

constexpr double kEdgeTol = 1e-9;

void check_interval(double lo, double hi) {
  if (!(lo < hi)) throw ArgumentError("curve interval needs lo < hi");
}

}  // namespace

Curve::Curve(double lo, double hi, int order, EvalFn eval, std::vector<double> breakpoints)
    : lo_(lo), hi_(hi), order_(order), eval_(std::move(eval)), breakpoints_(std::move(breakpoints)) {
  check_interval(lo_, hi_);
  if (order_ < 0) throw ArgumentError("curve order must be >= 0");
  std::sort(breakpoints_.begin(), breakpoints_.end());
  for (double b : breakpoints_) {
    if (b <= lo_ || b >= hi_) throw ArgumentError("breakpoints must be interior");
  }
  breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end(),
                                 [&](double a, double b) { return std::abs(a - b) <= 1e-12 * length(); }),
                     breakpoints_.end());
}

Mat Curve::eval(double t, int deriv) const {
  const double tol = kEdgeTol * std::max(1.0, std::abs(lo_) + std::abs(hi_));
  if (t < lo_ - tol || t > hi_ + tol) {
    throw ArgumentError("curve evaluated outside its interval");
  }
  if (deriv < 0 || deriv > order_) {
    throw ArgumentError("curve derivative order " + std::to_string(deriv) +
                        " exceeds declared order");
  }
  return eval_(std::clamp(t, lo_, hi_), deriv);
}

std::vector<double> Curve::knots() const {
  std::vector<double> k;
  k.push_back(lo_);
  k.insert(k.end(), breakpoints_.begin(), breakpoints_.end());
  k.push_back(hi_);
  return k;
}

const std::vector<Curve>& Curve::pieces() const {
  if (!pieces_) throw ArgumentError("curve was not built from pieces");
  return *pieces_;
}

Curve Curve::restricted(double a, double b) const {
  check_interval(a, b);
  const double tol = kEdgeTol * std::max(1.0, std::abs(lo_) + std::abs(hi_));
  if (a < lo_ - tol || b > hi_ + tol) {
    throw ArgumentError("restriction interval is not contained in the curve interval");
  }
  std::vector<double> bps;
  for (double bp : breakpoints_)
    if (bp > a && bp < b) bps.push_back(bp);
  EvalFn inner = eval_;
  return Curve(a, b, order_, std::move(inner), std::move(bps));
}

Curve Curve::piecewise(std::vector<Curve> pieces, bool require_continuity) {
  if (pieces.empty()) throw ArgumentError("piecewise curve needs at least one piece");
  for (size_t p = 0; p + 1 < pieces.size(); ++p) {
    if (std::abs(pieces[p].hi() - pieces[p + 1].lo()) > 1e-12) {
      throw ArgumentError("piecewise pieces do not cover a contiguous interval");
    }
    if (require_continuity) {
      const Mat left = pieces[p].eval(pieces[p].hi(), 0);
      const Mat right = pieces[p + 1].eval(pieces[p + 1].lo(), 0);
      if (max_norm(left - right) > 1e-12 * std::max(1.0, max_norm(left))) {
        throw ArgumentError("piece values do not match at knot " +
                            std::to_string(pieces[p].hi()));
      }
    }
  }
  const double lo = pieces.front().lo();
  const double hi = pieces.back().hi();
  int order = pieces.front().order();
  std::vector<double> bps;
  for (size_t p = 0; p < pieces.size(); ++p) {
    order = std::min(order, pieces[p].order());
    if (p > 0) bps.push_back(pieces[p].lo());
    for (double b : pieces[p].breakpoints()) bps.push_back(b);
  }
  auto shared = std::make_shared<const std::vector<Curve>>(std::move(pieces));
  EvalFn fn = [shared](double t, int m) -> Mat {
    const auto& ps = *shared;
    size_t p = 0;
    while (p + 1 < ps.size() && t >= ps[p + 1].lo()) ++p;
    return ps[p].eval(t, m);
  };
  Curve glued(lo, hi, order, std::move(fn), std::move(bps));
  glued.pieces_ = shared;
  return glued;
}

Curve Curve::constant(const Mat& value, double lo, double hi) {
  const Mat zero = Mat::Zero(value.rows(), value.cols());
  return Curve(lo, hi, kSmoothOrder,
               [value, zero](double, int m) { return m == 0 ? value : zero; });
}

Curve Curve::polynomial(std::vector<Mat> coeffs, double lo, double hi) {
  if (coeffs.empty()) throw ArgumentError("polynomial curve needs coefficients");
  const Mat zero = Mat::Zero(coeffs.front().rows(), coeffs.front().cols());
  return Curve(lo, hi, kSmoothOrder, [coeffs, zero](double t, int m) {
    Mat acc = zero;
    double tp = 1.0;
    for (size_t k = static_cast<size_t>(m); k < coeffs.size(); ++k) {
      // d^m/dt^m t^k = k(k-1)...(k-m+1) t^(k-m)
      double fall = 1.0;
      for (int j = 0; j < m; ++j) fall *= static_cast<double>(k - static_cast<size_t>(j));
      acc += (fall * tp) * coeffs[k];
      tp *= t;
    }
    return acc;
  });
}

Curve Curve::sinusoid(const Mat& amplitude, double omega, double phase, double lo, double hi) {
  return Curve(lo, hi, kSmoothOrder, [amplitude, omega, phase](double t, int m) {
    const double arg = omega * t + phase + 0.5 * M_PI * m;  // repeated derivative shifts phase
    return (std::pow(omega, m) * std::sin(arg)) * amplitude;
  });
}

Curve Curve::from_fn(double lo, double hi, int order, EvalFn fn, std::vector<double> breakpoints) {
  return Curve(lo, hi, order, std::move(fn), std::move(breakpoints));
}

Curve operator+(const Curve& a, const Curve& b) {
  if (std::abs(a.lo() - b.lo()) > 1e-12 || std::abs(a.hi() - b.hi()) > 1e-12) {
    throw ArgumentError("curve sum needs a common interval");
  }
  std::vector<double> bps = a.breakpoints_;
  bps.insert(bps.end(), b.breakpoints_.begin(), b.breakpoints_.end());
  auto ea = a.eval_, eb = b.eval_;
  return Curve(a.lo(), a.hi(), std::min(a.order(), b.order()),
               [ea, eb](double t, int m) -> Mat { return ea(t, m) + eb(t, m); }, std::move(bps));
}

Curve operator*(double scale, const Curve& c) {
  auto e = c.eval_;
  return Curve(c.lo(), c.hi(), c.order(),
               [scale, e](double t, int m) -> Mat { return scale * e(t, m); }, c.breakpoints_);
}

ScalarCurve::ScalarCurve(double lo, double hi, int order, EvalFn eval)
    : lo_(lo), hi_(hi), order_(order), eval_(std::move(eval)) {
  check_interval(lo_, hi_);
  if (order_ < 0) throw ArgumentError("scalar curve order must be >= 0");
}

double ScalarCurve::eval(double t, int deriv) const {
  const double tol = kEdgeTol * std::max(1.0, std::abs(lo_) + std::abs(hi_));
  if (t < lo_ - tol || t > hi_ + tol) {
    throw ArgumentError("scalar curve evaluated outside its interval");
  }
  if (deriv < 0 || deriv > order_) throw ArgumentError("scalar curve derivative unavailable");
  return eval_(std::clamp(t, lo_, hi_), deriv);
}

ScalarCurve ScalarCurve::identity(double lo, double hi) { return affine(0.0, 1.0, lo, hi); }

ScalarCurve ScalarCurve::affine(double a, double b, double lo, double hi) {
  return ScalarCurve(lo, hi, kSmoothOrder, [a, b](double t, int m) {
    if (m == 0) return a + b * t;
    if (m == 1) return b;
    return 0.0;
  });
}

ScalarCurve ScalarCurve::reversal(double lo, double hi) { return affine(lo + hi, -1.0, lo, hi); }

ScalarCurve ScalarCurve::monomial(int k, double lo, double hi) {
  if (k < 0) throw ArgumentError("monomial degree must be >= 0");
  return ScalarCurve(lo, hi, kSmoothOrder, [k](double t, int m) {
    if (m > k) return 0.0;
    double fall = 1.0;
    for (int j = 0; j < m; ++j) fall *= static_cast<double>(k - j);
    return fall * std::pow(t, k - m);
  });
}

namespace {

// One summand of d^m/dt^m [rho' . (phi o rho)]: coeff * prod_j rho^(a_j)(t)
// * phi^(b)(rho(t)). Differentiation raises one rho factor's order or
// appends a fresh rho' while bumping the phi order.
struct PullbackTerm {
  double coeff;
  std::vector<int> rho_orders;  // sorted
  int phi_order;
};

std::vector<PullbackTerm> differentiate(const std::vector<PullbackTerm>& terms) {
  std::map<std::pair<std::vector<int>, int>, double> merged;
  for (const auto& term : terms) {
    for (size_t i = 0; i < term.rho_orders.size(); ++i) {
      std::vector<int> orders = term.rho_orders;
      orders[i] += 1;
      std::sort(orders.begin(), orders.end());
      merged[{std::move(orders), term.phi_order}] += term.coeff;
    }
    std::vector<int> orders = term.rho_orders;
    orders.push_back(1);
    std::sort(orders.begin(), orders.end());
    merged[{std::move(orders), term.phi_order + 1}] += term.coeff;
  }
  std::vector<PullbackTerm> out;
  out.reserve(merged.size());
  for (auto& [key, coeff] : merged) out.push_back({coeff, key.first, key.second});
  return out;
}

}  // namespace

Curve reparametrize_velocity(const Curve& phi, const ScalarCurve& rho) {
  if (!phi.breakpoints().empty()) {
    throw ArgumentError("velocity pullback across breakpoints is not supported; "
                        "restrict to smooth pieces first");
  }
  const int order = std::min(phi.order(), std::max(0, rho.order() - 1));
  Curve phi_copy = phi;
  ScalarCurve rho_copy = rho;
  return Curve(rho.lo(), rho.hi(), order, [phi_copy, rho_copy](double t, int m) -> Mat {
    std::vector<PullbackTerm> terms = {{1.0, {1}, 0}};
    for (int k = 0; k < m; ++k) terms = differentiate(terms);
    const double rt = rho_copy.eval(t, 0);
    Mat acc = Mat::Zero(phi_copy.eval(phi_copy.lo(), 0).rows(), phi_copy.eval(phi_copy.lo(), 0).cols());
    for (const auto& term : terms) {
      double scalar = term.coeff;
      for (int a : term.rho_orders) scalar *= rho_copy.eval(t, a);
      if (scalar == 0.0) continue;
      acc += scalar * phi_copy.eval(rt, term.phi_order);
    }
    return acc;
  });
}

Curve random_smooth_curve(Rng& rng, const LieContext& ctx, double lo, double hi,
                          double norm_bound, int trig_terms, double omega_max) {
  const int k = ctx.algebra_dim();
  auto random_unit = [&]() {
    Vec coords(k);
    for (int i = 0; i < k; ++i) coords(i) = rng.normal();
    Mat m = ctx.from_coords(coords);
    const double n = op_norm(m);
    return n > 0 ? Mat((1.0 / n) * m) : m;
  };
  // Split the norm budget over the constant and trig terms so the order-0
  // sup stays below norm_bound.
  std::vector<double> weights(static_cast<size_t>(trig_terms) + 1);
  double total = 0.0;
  for (auto& w : weights) {
    w = rng.uniform(0.2, 1.0);
    total += w;
  }
  for (auto& w : weights) w *= norm_bound / total;

  Curve acc = Curve::constant(weights[0] * random_unit(), lo, hi);
  for (int j = 0; j < trig_terms; ++j) {
    const double omega = rng.uniform(0.3, omega_max);
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    acc = acc + Curve::sinusoid(weights[static_cast<size_t>(j) + 1] * random_unit(), omega, phase,
                                lo, hi);
  }
  return acc;
}

namespace {

Mat matrix_from_flat(const nlohmann::json& row, int dim) {
  if (static_cast<int>(row.size()) != dim * dim) {
    throw ArgumentError("curve spec matrix has wrong length");
  }
  Mat m(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = row.at(static_cast<size_t>(k++)).get<double>();
  return m;
}

Curve curve_from_json_obj(const nlohmann::json& j, int dim) {
  const std::string family = j.at("family").get<std::string>();
  const double lo = j.at("interval").at(0).get<double>();
  const double hi = j.at("interval").at(1).get<double>();
  if (family == "constant") {
    return Curve::constant(matrix_from_flat(j.at("value"), dim), lo, hi);
  }
  if (family == "polynomial") {
    std::vector<Mat> coeffs;
    for (const auto& c : j.at("coeffs")) coeffs.push_back(matrix_from_flat(c, dim));
    return Curve::polynomial(std::move(coeffs), lo, hi);
  }
  if (family == "sinusoid") {
    return Curve::sinusoid(matrix_from_flat(j.at("amplitude"), dim),
                           j.at("omega").get<double>(), j.value("phase", 0.0), lo, hi);
  }
  if (family == "sum") {
    std::vector<Curve> parts;
    for (const auto& p : j.at("terms")) parts.push_back(curve_from_json_obj(p, dim));
    if (parts.empty()) throw ArgumentError("curve sum needs at least one term");
    Curve acc = parts.front();
    for (size_t i = 1; i < parts.size(); ++i) acc = acc + parts[i];
    return acc;
  }
  if (family == "piecewise-constant") {
    const auto& knots = j.at("knots");
    const auto& values = j.at("values");
    if (knots.size() != values.size() + 1) {
      throw ArgumentError("piecewise-constant spec needs one more knot than value");
    }
    std::vector<Curve> pieces;
    for (size_t p = 0; p < values.size(); ++p) {
      pieces.push_back(Curve::constant(matrix_from_flat(values.at(p), dim),
                                       knots.at(p).get<double>(), knots.at(p + 1).get<double>()));
    }
    return Curve::piecewise(std::move(pieces));
  }
  throw ArgumentError("unknown curve family: " + family);
}

}  // namespace

Curve curve_from_json(const std::string& text, int dim) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError(std::string("curve spec is not valid JSON: ") + e.what());
  }
  try {
    return curve_from_json_obj(j, dim);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("curve spec is missing required fields: ") + e.what());
  }
}

Curve load_curve_file(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open curve file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return curve_from_json(ss.str(), dim);
}

}  // namespace prodint
