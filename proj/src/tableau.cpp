#include "phdae/tableau.hpp"

#include "phdae/error.hpp"

#include <cmath>
#include <numbers>

namespace phdae {

namespace {

double horner(const auto& coeffs, double tau) {
    double acc = 0.0;
    for (Index k = coeffs.size() - 1; k >= 0; --k) acc = acc * tau + coeffs[k];
    return acc;
}

/// Roots of P_s on [-1, 1] by Newton on the three-term recurrence, ascending.
Vec legendre_roots(int s) {
    Vec roots(s);
    for (int i = 0; i < (s + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (s + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= s; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double dp = s * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        roots[s - 1 - i] = x;
        roots[i] = -x;
    }
    if (s % 2 == 1) roots[s / 2] = 0.0;
    return roots;
}

}  // namespace

double ButcherTableau::lagrange(int j, double tau) const { return horner(basis.row(j), tau); }

double ButcherTableau::lagrange_integral(int j, double tau) const { return horner(basis_integral.row(j), tau); }

ButcherTableau collocation_tableau(const Vec& nodes, int exactness) {
    const int s = static_cast<int>(nodes.size());
    if (s < 1) throw Error("collocation tableau needs at least one node");

    ButcherTableau tab;
    tab.s = s;
    tab.gamma = nodes;
    tab.p = exactness;
    tab.basis = Mat::Zero(s, s);
    tab.basis_integral = Mat::Zero(s, s + 1);

    for (int j = 0; j < s; ++j) {
        // Expand prod_{k != j} (tau - gamma_k) / (gamma_j - gamma_k) in ascending powers.
        Vec poly = Vec::Zero(s);
        poly[0] = 1.0;
        int degree = 0;
        for (int k = 0; k < s; ++k) {
            if (k == j) continue;
            const double denom = nodes[j] - nodes[k];
            if (denom == 0.0) throw Error("collocation nodes must be distinct");
            Vec next = Vec::Zero(s);
            for (int d = 0; d <= degree; ++d) {
                next[d + 1] += poly[d] / denom;
                next[d] -= poly[d] * nodes[k] / denom;
            }
            poly = next;
            ++degree;
        }
        tab.basis.row(j) = poly.transpose();
        for (int d = 0; d < s; ++d) tab.basis_integral(j, d + 1) = poly[d] / (d + 1);
    }

    tab.alpha.resize(s, s);
    tab.beta.resize(s);
    for (int j = 0; j < s; ++j) {
        tab.beta[j] = tab.lagrange_integral(j, 1.0);
        for (int i = 0; i < s; ++i) tab.alpha(i, j) = tab.lagrange_integral(j, nodes[i]);
    }
    return tab;
}

ButcherTableau gauss_legendre_tableau(int s) {
    if (s < 1 || s > 5) throw Error("Gauss-Legendre tableau supports 1 <= s <= 5, got " + std::to_string(s));
    const Vec roots = legendre_roots(s);
    Vec nodes = (roots.array() + 1.0) / 2.0;
    // Symmetric about 1/2.
    for (int i = 0; i < s / 2; ++i) nodes[s - 1 - i] = 1.0 - nodes[i];
    if (s % 2 == 1) nodes[s / 2] = 0.5;
    return collocation_tableau(nodes, 2 * s - 1);
}

}  // namespace phdae
