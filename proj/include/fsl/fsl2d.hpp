#pragma once

#include "fsl/core_ot.hpp"
#include "fsl/logcost.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace fsl {

// Graded lexicographic numbering of {(p, q) : p, q >= 0, p + q <= L}:
// by total degree p + q, then by p. (0,0) -> 0, (0,1) -> 1, (1,0) -> 2, ...
class TriangularIndex {
public:
    explicit TriangularIndex(int L);

    int degree() const noexcept { return l_; }
    Index size() const noexcept { return static_cast<Index>(l_ + 1) * (l_ + 2) / 2; }

    static Index index(int p, int q) noexcept {
        const Index d = p + q;
        return d * (d + 1) / 2 + p;
    }
    std::pair<int, int> pq(Index row) const;

private:
    int l_;
};

// values(index(p, q), j) = z_{j,1}^p z_{j,2}^q for p + q <= L.
class MonomialMatrix2D {
public:
    MonomialMatrix2D(const Points2D& points, int L);

    const Matrix& values() const noexcept { return values_; }
    const TriangularIndex& index_map() const noexcept { return index_; }
    Index points() const noexcept { return values_.cols(); }

private:
    TriangularIndex index_;
    Matrix values_;
};

// b_pq = (-kappa)^(p+q) multinomial(L; p, q, L-p-q) in TriangularIndex order.
Vector reflector_coefficients(double kappa, int L);

// Kernel of C = -log(1 - kappa <x, y>) at eps = 1/L:
//   (K xi)_i = sum_{p+q<=L} b_pq A^x_{pq,i} (A^y xi)_pq.
// Same scratch contract as FslKernel1D.
class FslKernel2D final : public KernelApplicator {
public:
    FslKernel2D(const Points2D& xs, const Points2D& ys, double kappa, int L);

    Index rows() const override { return ax_.points(); }
    Index cols() const override { return ay_.points(); }
    using KernelApplicator::apply;
    using KernelApplicator::apply_transpose;
    void apply(const Vector& xi, Vector& out) const override;
    void apply_transpose(const Vector& xi, Vector& out) const override;
    std::unique_ptr<KernelApplicator> clone() const override;

    const MonomialMatrix2D& ax() const noexcept { return ax_; }
    const MonomialMatrix2D& ay() const noexcept { return ay_; }
    const Vector& coefficients() const noexcept { return bpq_; }
    double kappa() const noexcept { return kappa_; }
    int L() const noexcept { return ax_.index_map().degree(); }

    // True when L^2 >= N, where the expansion no longer beats the dense product.
    bool expansion_not_cheaper() const noexcept {
        const Index n = std::max(rows(), cols());
        return static_cast<Index>(L()) * L() >= n;
    }

private:
    void contract(const Matrix& from, const Matrix& to, const Vector& xi, Vector& out) const;

    MonomialMatrix2D ax_;
    MonomialMatrix2D ay_;
    Vector bpq_;
    double kappa_;
    mutable Vector scratch_;
};

// Validates 1 - kappa <x_i, y_j> in (0, 1) and builds the kernel.
FslKernel2D build_fsl2d(double kappa, const Points2D& xs, const Points2D& ys, int L);

// n x n grid (i h, j h), i, j = 1..n, row-major in i.
Points2D grid_points(int n, double h);

// Grid length 0.7 / (1.1 n), keeping the grid inside (0, 1)^2 with
// <x, y> < 1 for every pair.
inline double default_grid_length(int n) { return 0.7 / (1.1 * n); }

// {"n": int, "h": real} for a grid, or [[x1, x2], ...] for a point cloud.
Points2D parse_points_json(const std::string& text);

}  // namespace fsl
