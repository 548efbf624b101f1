#pragma once

#include "fsl/core_ot.hpp"
#include "fsl/logcost.hpp"

#include <vector>

namespace fsl {

// Returns L = 1/eps when it is a positive integer (to 1e-9 relative), else
// throws ConfigError. The expansion path only exists for integer L.
int integer_inverse(double epsilon);

// Rows are powers of the support points: values(k, j) = z_j^k, k = 0..degree.
class MonomialMatrix1D {
public:
    MonomialMatrix1D(const Vector& points, int degree);

    const Matrix& values() const noexcept { return values_; }
    int degree() const noexcept { return static_cast<int>(values_.rows()) - 1; }
    Index points() const noexcept { return values_.cols(); }

private:
    Matrix values_;
};

enum class Summation { Plain, Compensated };

// K_ij = sum_{zeta, nu} b(zeta, nu) x_i^zeta y_j^nu applied in linear time:
//   eta = A^y xi, S = b eta (nonzeros only), K xi = (A^x)^T S.
// The transpose swaps the roles of A^x and A^y and uses b^T.
//
// eta and S are scratch owned by the instance, so concurrent applies on one
// instance are not allowed; clone() per thread instead.
class FslKernel1D final : public KernelApplicator {
public:
    FslKernel1D(const Vector& xs, const Vector& ys, Matrix coefficients,
                Summation summation = default_summation());

    Index rows() const override { return ax_.points(); }
    Index cols() const override { return ay_.points(); }
    using KernelApplicator::apply;
    using KernelApplicator::apply_transpose;
    void apply(const Vector& xi, Vector& out) const override;
    void apply_transpose(const Vector& xi, Vector& out) const override;
    std::unique_ptr<KernelApplicator> clone() const override;

    const MonomialMatrix1D& ax() const noexcept { return ax_; }
    const MonomialMatrix1D& ay() const noexcept { return ay_; }
    const Matrix& coefficients() const noexcept { return b_; }
    std::size_t nonzero_coefficients() const noexcept { return terms_.size(); }

    Summation summation() const noexcept { return summation_; }
    void set_summation(Summation s) noexcept { summation_ = s; }

    static Summation default_summation() noexcept {
#ifdef FSL_DEFAULT_COMPENSATED
        return Summation::Compensated;
#else
        return Summation::Plain;
#endif
    }

private:
    struct Term {
        Index zeta;
        Index nu;
        double value;
    };

    void contract(const Matrix& from, const Matrix& to, bool transpose, const Vector& xi,
                  Vector& out) const;

    MonomialMatrix1D ax_;
    MonomialMatrix1D ay_;
    // Point-major copies (N x T): both contraction steps then run over long columns.
    Matrix axt_;
    Matrix ayt_;
    Matrix b_;
    std::vector<Term> terms_;
    Summation summation_;
    mutable Vector eta_;
    mutable Vector s_;
};

// Validates the supports, expands P^L by convolution, and builds the kernel
// for eps = 1/L in the coordinates the polynomial is written in.
FslKernel1D build_fsl1d(const PolynomialCost1D& cost, const Vector& xs, const Vector& ys, int L);

}  // namespace fsl
