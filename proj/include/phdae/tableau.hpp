#pragma once

#include "phdae/types.hpp"

namespace phdae {

/// Butcher coefficients of a collocation method, with the Lagrange basis kept for
/// dense output.
///
///   alpha(i, j) = int_0^{gamma_i} l_j,   beta(j) = int_0^1 l_j
///
/// where l_j is the Lagrange polynomial on the nodes gamma.
struct ButcherTableau {
    int s = 0;
    Vec gamma;
    Vec beta;
    Mat alpha;
    /// Degree of exactness of the quadrature (gamma, beta).
    int p = 0;

    /// basis(j, k): coefficient of tau^k in l_j, k = 0..s-1.
    Mat basis;
    /// basis_integral(j, k): coefficient of tau^k in int_0^tau l_j, k = 0..s.
    Mat basis_integral;

    double lagrange(int j, double tau) const;
    double lagrange_integral(int j, double tau) const;
};

/// Collocation coefficients for arbitrary distinct nodes in [0, 1]. `p` is recorded as given.
ButcherTableau collocation_tableau(const Vec& nodes, int exactness);

/// Gauss-Legendre collocation: nodes at the roots of the shifted Legendre polynomial of
/// degree s, p = 2s - 1. Supports 1 <= s <= 5.
ButcherTableau gauss_legendre_tableau(int s);

}  // namespace phdae
