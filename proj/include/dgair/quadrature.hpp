#pragma once

#include <vector>

#include "dgair/mesh.hpp"

namespace dgair {

/// Highest polynomial degree for which rules are generated.
inline constexpr int kMaxQuadratureDegree = 30;

/// Rule on the reference triangle {x, y >= 0, x + y <= 1}; weights sum to 1/2.
struct TriangleQuadrature {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Rule on [0, 1]; weights sum to 1.
struct EdgeQuadrature {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

/// n-point Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Conical-product (collapsed Gauss) rule exact for total degree <= d.
TriangleQuadrature triangle_quadrature(int degree);

/// Gauss-Legendre rule with ceil((d+1)/2) points.
EdgeQuadrature edge_quadrature(int degree);

}  // namespace dgair
