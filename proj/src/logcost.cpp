#include "fsl/logcost.hpp"

#include <json.hpp>

#include <cmath>
#include <numeric>
#include <string>

namespace fsl {

// ---------------------------------------------------------------------------
// Cost descriptions

PolynomialCost1D::PolynomialCost1D(int degree_bound, Matrix coeffs)
    : m_(degree_bound), a_(std::move(coeffs)) {
    if (m_ < 0) throw ConfigError("degree bound M must be nonnegative");
    if (a_.rows() != m_ + 1 || a_.cols() != m_ + 1) {
        throw ConfigError("coefficient table must be (M+1)x(M+1) for M = " + std::to_string(m_));
    }
    if (!a_.allFinite()) throw ConfigError("polynomial coefficients must be finite");
    // Tightness: something in the last row or column is nonzero. For M = 0
    // that is a_00 itself.
    if (a_.row(m_).isZero(0.0) && a_.col(m_).isZero(0.0)) {
        throw ConfigError("degree bound M = " + std::to_string(m_) +
                          " is not attained by any coefficient");
    }
}

double PolynomialCost1D::operator()(double x, double y) const {
    double result = 0.0;
    for (int zeta = m_; zeta >= 0; --zeta) {
        double inner = 0.0;
        for (int nu = m_; nu >= 0; --nu) inner = inner * y + a_(zeta, nu);
        result = result * x + inner;
    }
    return result;
}

PolynomialCost1D ranking_polynomial(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive");
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 0) = 1.0 / tau;
    a(0, 1) = -1.0 / tau;
    return PolynomialCost1D(1, std::move(a));
}

ReflectorRefractorCost::ReflectorRefractorCost(double k) : kappa(k) {
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ConfigError("kappa must lie in (0, 1]");
}

// ---------------------------------------------------------------------------
// Support validation and cost matrices

namespace {

inline bool in_unit_interval(double p) { return p > 0.0 && p < 1.0; }

template <class Derived>
void check_points(const Eigen::MatrixBase<Derived>& pts, const char* name) {
    if (pts.rows() == 0) throw ConfigError(std::string(name) + " support is empty");
    if (!pts.allFinite()) throw ConfigError(std::string(name) + " support has non-finite coordinates");
}

}  // namespace

void validate_support(const PolynomialCost1D& cost, const Vector& xs, const Vector& ys) {
    check_points(xs, "x");
    check_points(ys, "y");
    for (Index i = 0; i < xs.size(); ++i) {
        for (Index j = 0; j < ys.size(); ++j) {
            const double p = cost(xs[i], ys[j]);
            if (!in_unit_interval(p)) throw SupportError(i, j, p);
        }
    }
}

void validate_support(const ReflectorRefractorCost& cost, const Points2D& xs, const Points2D& ys) {
    check_points(xs, "x");
    check_points(ys, "y");
    // Strictly positive coordinates give <x, y> > 0, and Cauchy-Schwarz bounds
    // <x, y> by max|x| max|y|; together they settle the whole grid at once.
    const bool positive = (xs.array() > 0.0).all() && (ys.array() > 0.0).all();
    if (positive) {
        const double bound = cost.kappa * xs.rowwise().norm().maxCoeff() *
                             ys.rowwise().norm().maxCoeff();
        if (bound < 1.0) return;
    }
    for (Index i = 0; i < xs.rows(); ++i) {
        for (Index j = 0; j < ys.rows(); ++j) {
            const double p = cost(xs(i, 0), xs(i, 1), ys(j, 0), ys(j, 1));
            if (!in_unit_interval(p)) throw SupportError(i, j, p);
        }
    }
}

Matrix cost_matrix(const PolynomialCost1D& cost, const Vector& xs, const Vector& ys) {
    validate_support(cost, xs, ys);
    Matrix c(xs.size(), ys.size());
    for (Index j = 0; j < ys.size(); ++j) {
        for (Index i = 0; i < xs.size(); ++i) c(i, j) = -std::log(cost(xs[i], ys[j]));
    }
    return c;
}

Matrix cost_matrix(const ReflectorRefractorCost& cost, const Points2D& xs, const Points2D& ys) {
    validate_support(cost, xs, ys);
    Matrix c(xs.rows(), ys.rows());
    for (Index j = 0; j < ys.rows(); ++j) {
        for (Index i = 0; i < xs.rows(); ++i) {
            c(i, j) = -std::log(cost(xs(i, 0), xs(i, 1), ys(j, 0), ys(j, 1)));
        }
    }
    return c;
}

// ---------------------------------------------------------------------------
// Multinomials and expansions

double multinomial(int k, std::span<const int> parts) {
    if (k < 1) throw ConfigError("multinomial order must be positive");
    if (k > kMaxMultinomialOrder) {
        throw ConfigError("multinomial order " + std::to_string(k) + " exceeds " +
                          std::to_string(kMaxMultinomialOrder));
    }
    if (parts.empty()) throw ConfigError("multinomial needs at least one part");
    long total = 0;
    for (int p : parts) {
        if (p < 0) throw ConfigError("multinomial parts must be nonnegative");
        total += p;
    }
    if (total != k) throw ConfigError("multinomial parts do not sum to k");

    double value = 1.0;
    int last = k;
    for (std::size_t p = 0; p + 1 < parts.size(); ++p) {
        for (int u = 1; u <= parts[p]; ++u) {
            value = value * last / u;
            --last;
        }
    }
    return value;
}

double multinomial(int k, std::initializer_list<int> parts) {
    return multinomial(k, std::span<const int>(parts.begin(), parts.size()));
}

Matrix trinomial_triangle(int L) {
    if (L < 1) throw ConfigError("L must be positive");
    if (L > kMaxMultinomialOrder) throw ConfigError("L exceeds the multinomial ceiling");
    Matrix t = Matrix::Zero(L + 1, L + 1);
    t(0, 0) = 1.0;
    for (int q = 1; q <= L; ++q) t(0, q) = t(0, q - 1) * (L - q + 1) / q;
    for (int p = 1; p <= L; ++p) {
        for (int q = 0; p + q <= L; ++q) t(p, q) = t(p - 1, q) * (L - p - q + 1) / p;
    }
    return t;
}

Matrix expand_power_1d(const PolynomialCost1D& cost, int L) {
    if (L < 1) throw ConfigError("L must be positive");
    const int m = cost.degree_bound();
    if (static_cast<long>(m) * L > kMaxExpandedDegree) {
        throw ConfigError("M*L = " + std::to_string(static_cast<long>(m) * L) + " exceeds " +
                          std::to_string(kMaxExpandedDegree));
    }
    const Matrix& a = cost.coeffs();
    Matrix b = a;
    for (int power = 2; power <= L; ++power) {
        const Index deg = static_cast<Index>(m) * power;
        Matrix next = Matrix::Zero(deg + 1, deg + 1);
        for (Index z1 = 0; z1 < b.rows(); ++z1) {
            for (Index n1 = 0; n1 < b.cols(); ++n1) {
                const double v = b(z1, n1);
                if (v == 0.0) continue;
                for (Index z2 = 0; z2 <= m; ++z2) {
                    for (Index n2 = 0; n2 <= m; ++n2) {
                        if (a(z2, n2) != 0.0) next(z1 + z2, n1 + n2) += v * a(z2, n2);
                    }
                }
            }
        }
        b = std::move(next);
    }
    return b;
}

Matrix ranking_power_coefficients(int L) {
    Matrix b = trinomial_triangle(L);
    for (Index nu = 1; nu <= L; nu += 2) b.col(nu) = -b.col(nu);
    return b;
}

// ---------------------------------------------------------------------------
// JSON

CostSpec parse_cost_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("cost JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("cost JSON must be an object");
    try {
        if (j.contains("kappa")) return ReflectorRefractorCost(j.at("kappa").get<double>());
        if (j.contains("M") && j.contains("coeffs")) {
            const int m = j.at("M").get<int>();
            const auto& rows = j.at("coeffs");
            if (!rows.is_array()) throw ConfigError("coeffs must be an array of rows");
            Matrix a = Matrix::Zero(rows.size(), rows.empty() ? 0 : rows[0].size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != static_cast<std::size_t>(a.cols())) {
                    throw ConfigError("coeffs rows have differing lengths");
                }
                for (std::size_t c = 0; c < rows[r].size(); ++c) {
                    a(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c].get<double>();
                }
            }
            return PolynomialCost1D(m, std::move(a));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("cost JSON: ") + e.what());
    }
    throw ConfigError("cost JSON needs either \"kappa\" or \"M\" and \"coeffs\"");
}

}  // namespace fsl
