#include "dgair/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "dgair/error.hpp"

namespace dgair {

namespace {

// P_n(x) and P_{n-1}(x) by the three-term recurrence.
void legendre(int n, double x, double& pn, double& pnm1) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pnm1 = p0;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one point");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pn = 0.0, pnm1 = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(n, x, pn, pnm1);
      const double dx = pn / (n * (x * pn - pnm1) / (x * x - 1.0));
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, pn, pnm1);
    const double dp = n * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

TriangleQuadrature triangle_quadrature(int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw InvalidArgument("unsupported quadrature degree " + std::to_string(degree));
  // x = a, y = b (1 - a), dx dy = (1 - a) da db. A degree-d monomial becomes a
  // polynomial of degree d+1 in a and d in b.
  const int n = (degree + 2 + 1) / 2;
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  TriangleQuadrature rule;
  rule.degree = degree;
  rule.points.reserve(n * n);
  rule.weights.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    const double a = 0.5 * (gx[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double b = 0.5 * (gx[j] + 1.0);
      rule.points.push_back({a, b * (1.0 - a)});
      rule.weights.push_back(0.25 * gw[i] * gw[j] * (1.0 - a));
    }
  }
  return rule;
}

EdgeQuadrature edge_quadrature(int degree) {
  if (degree < 0 || degree > kMaxQuadratureDegree)
    throw InvalidArgument("unsupported quadrature degree " + std::to_string(degree));
  const int n = (degree + 2) / 2;
  std::vector<double> gx, gw;
  gauss_legendre(n, gx, gw);
  EdgeQuadrature rule;
  rule.degree = degree;
  for (int i = 0; i < n; ++i) {
    rule.points.push_back(0.5 * (gx[i] + 1.0));
    rule.weights.push_back(0.5 * gw[i]);
  }
  return rule;
}

}  // namespace dgair
