#pragma once

#include "fsl/common.hpp"

#include <initializer_list>
#include <span>
#include <string>
#include <variant>

namespace fsl {

// Largest M*L accepted by the expansion machinery.
inline constexpr int kMaxExpandedDegree = 512;
// Largest k for which k! is finite in double precision.
inline constexpr int kMaxMultinomialOrder = 170;

// P(x, y) = sum_{zeta, nu <= M} a(zeta, nu) x^zeta y^nu, defining the cost
// C = -log P. M must be tight: some coefficient in row M or column M of a
// is nonzero.
class PolynomialCost1D {
public:
    PolynomialCost1D(int degree_bound, Matrix coeffs);

    int degree_bound() const noexcept { return m_; }
    const Matrix& coeffs() const noexcept { return a_; }

    double operator()(double x, double y) const;

private:
    int m_;
    Matrix a_;
};

// 1 - (y - x) / tau, the log-type ranking cost in unscaled coordinates.
PolynomialCost1D ranking_polynomial(double tau);

// C = -log(1 - kappa <x, y>) in the plane. kappa = 1 is the reflector cost,
// 0 < kappa < 1 the refractor cost.
struct ReflectorRefractorCost {
    double kappa = 1.0;

    explicit ReflectorRefractorCost(double k);
    double operator()(double x1, double x2, double y1, double y2) const {
        return 1.0 - kappa * (x1 * y1 + x2 * y2);
    }
};

// Throw SupportError with the first (i, j) (row-major) where P leaves (0, 1).
void validate_support(const PolynomialCost1D& cost, const Vector& xs, const Vector& ys);
void validate_support(const ReflectorRefractorCost& cost, const Points2D& xs, const Points2D& ys);

// C_ij = -log P(x_i, y_j), after validation.
Matrix cost_matrix(const PolynomialCost1D& cost, const Vector& xs, const Vector& ys);
Matrix cost_matrix(const ReflectorRefractorCost& cost, const Points2D& xs, const Points2D& ys);

// k! / (k_1! ... k_m!) via the ratio recursion: start from (0, ..., 0, k) = 1
// and move units from the last part into the others one at a time.
double multinomial(int k, std::span<const int> parts);
double multinomial(int k, std::initializer_list<int> parts);

// T(p, q) = multinomial(L; p, q, L - p - q) for p + q <= L, zero elsewhere.
// Walks the triangle with one recursion step per entry.
Matrix trinomial_triangle(int L);

// Coefficients b of P^L: sum b(zeta, nu) x^zeta y^nu == P(x, y)^L.
// Computed by L - 1 successive bivariate convolutions.
Matrix expand_power_1d(const PolynomialCost1D& cost, int L);

// Closed form of expand_power_1d for P = 1 + x - y:
// b(zeta, nu) = (-1)^nu multinomial(L; zeta, nu, L - zeta - nu).
Matrix ranking_power_coefficients(int L);

using CostSpec = std::variant<PolynomialCost1D, ReflectorRefractorCost>;

// {"M": int, "coeffs": [[a_00, a_01, ...], [a_10, ...], ...]} or {"kappa": real}.
// coeffs[zeta][nu] multiplies x^zeta y^nu.
CostSpec parse_cost_json(const std::string& text);

}  // namespace fsl
