#include "fsl/fsl1d.hpp"

#include <cmath>
#include <string>

namespace fsl {

int integer_inverse(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("epsilon must be positive and finite");
    }
    const double inv = 1.0 / epsilon;
    const double rounded = std::round(inv);
    if (rounded < 1.0 || std::abs(inv - rounded) > 1e-9 * rounded) {
        throw ConfigError("1/epsilon = " + std::to_string(inv) +
                          " is not a positive integer; the expansion kernel needs eps = 1/L");
    }
    return static_cast<int>(rounded);
}

MonomialMatrix1D::MonomialMatrix1D(const Vector& points, int degree) {
    if (degree < 0) throw ConfigError("monomial degree must be nonnegative");
    if (points.size() == 0) throw ConfigError("monomial matrix needs at least one point");
    values_.resize(degree + 1, points.size());
    values_.row(0).setOnes();
    for (int k = 1; k <= degree; ++k) {
        values_.row(k) = values_.row(k - 1).cwiseProduct(points.transpose());
    }
}

FslKernel1D::FslKernel1D(const Vector& xs, const Vector& ys, Matrix coefficients,
                         Summation summation)
    : ax_(xs, static_cast<int>(coefficients.rows()) - 1),
      ay_(ys, static_cast<int>(coefficients.cols()) - 1),
      axt_(ax_.values().transpose()),
      ayt_(ay_.values().transpose()),
      b_(std::move(coefficients)),
      summation_(summation) {
    if (b_.rows() != b_.cols() || b_.rows() == 0) {
        throw ConfigError("coefficient table must be square and nonempty");
    }
    if (b_.rows() - 1 > kMaxExpandedDegree) {
        throw ConfigError("expanded degree exceeds " + std::to_string(kMaxExpandedDegree));
    }
    if (!b_.allFinite()) throw ConfigError("coefficient table has non-finite entries");
    for (Index zeta = 0; zeta < b_.rows(); ++zeta) {
        for (Index nu = 0; nu < b_.cols(); ++nu) {
            if (b_(zeta, nu) != 0.0) terms_.push_back({zeta, nu, b_(zeta, nu)});
        }
    }
    eta_.resize(b_.rows());
    s_.resize(b_.rows());
}

void FslKernel1D::contract(const Matrix& from, const Matrix& to, bool transpose,
                           const Vector& xi, Vector& out) const {
    const Index degree_rows = from.cols();
    const Index n_from = from.rows();
    const Index n_to = to.rows();
    out.resize(n_to);

    // Step 1: eta = A^from xi.
    // Step 2: S = b eta (or b^T eta), structural zeros skipped.
    // Step 3: out = (A^to)^T S.
    if (summation_ == Summation::Plain) {
        eta_.noalias() = from.transpose() * xi;
        s_.setZero();
        if (transpose) {
            for (const Term& t : terms_) s_[t.nu] += t.value * eta_[t.zeta];
        } else {
            for (const Term& t : terms_) s_[t.zeta] += t.value * eta_[t.nu];
        }
        out.noalias() = to * s_;
    } else {
        for (Index k = 0; k < degree_rows; ++k) {
            double sum = 0.0, c = 0.0;
            for (Index j = 0; j < n_from; ++j) {
                const double y = from(j, k) * xi[j] - c;
                const double t = sum + y;
                c = (t - sum) - y;
                sum = t;
            }
            eta_[k] = sum;
        }
        s_.setZero();
        if (transpose) {
            for (const Term& t : terms_) s_[t.nu] += t.value * eta_[t.zeta];
        } else {
            for (const Term& t : terms_) s_[t.zeta] += t.value * eta_[t.nu];
        }
        for (Index i = 0; i < n_to; ++i) {
            double sum = 0.0, c = 0.0;
            for (Index k = 0; k < degree_rows; ++k) {
                const double y = to(i, k) * s_[k] - c;
                const double t = sum + y;
                c = (t - sum) - y;
                sum = t;
            }
            out[i] = sum;
        }
    }
    count(static_cast<std::uint64_t>(degree_rows) * static_cast<std::uint64_t>(n_from + n_to) +
          terms_.size());
}

void FslKernel1D::apply(const Vector& xi, Vector& out) const {
    check_apply_size(xi);
    contract(ayt_, axt_, false, xi, out);
}

void FslKernel1D::apply_transpose(const Vector& xi, Vector& out) const {
    check_transpose_size(xi);
    contract(axt_, ayt_, true, xi, out);
}

std::unique_ptr<KernelApplicator> FslKernel1D::clone() const {
    return std::make_unique<FslKernel1D>(*this);
}

FslKernel1D build_fsl1d(const PolynomialCost1D& cost, const Vector& xs, const Vector& ys, int L) {
    if (L < 1) throw ConfigError("L must be positive");
    if (static_cast<long>(cost.degree_bound()) * L >= kMaxExpandedDegree) {
        throw ConfigError("M*L must stay below " + std::to_string(kMaxExpandedDegree));
    }
    validate_support(cost, xs, ys);
    return FslKernel1D(xs, ys, expand_power_1d(cost, L));
}

}  // namespace fsl
