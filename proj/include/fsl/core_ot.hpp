#pragma once

#include "fsl/common.hpp"

#include <cstdint>
#include <functional>
#include <memory>

namespace fsl {

// Probability vector with strictly positive entries.
class DiscreteMeasure {
public:
    static constexpr double kSumTolerance = 1e-12;

    explicit DiscreteMeasure(Vector weights);

    static DiscreteMeasure uniform(Index n);

    const Vector& weights() const noexcept { return weights_; }
    Index size() const noexcept { return weights_.size(); }
    double operator[](Index i) const { return weights_[i]; }

private:
    Vector weights_;
};

// Action of a positive kernel matrix K (rows() x cols()) on vectors.
//
// Implementations may keep scratch buffers, in which case a single instance
// must not be applied from several threads at once; use clone() to get an
// independent instance per thread.
class KernelApplicator {
public:
    virtual ~KernelApplicator() = default;

    virtual Index rows() const = 0;
    virtual Index cols() const = 0;

    // out = K * xi, with xi of length cols().
    virtual void apply(const Vector& xi, Vector& out) const = 0;
    // out = K^T * xi, with xi of length rows().
    virtual void apply_transpose(const Vector& xi, Vector& out) const = 0;

    virtual std::unique_ptr<KernelApplicator> clone() const = 0;

    // Row i of K. The default goes through apply_transpose on a basis vector.
    virtual Vector row(Index i) const;

    // Dense copy of K. The default reconstructs column by column and refuses
    // when either dimension exceeds max_dim.
    virtual Matrix materialize(Index max_dim) const;

    Vector apply(const Vector& xi) const;
    Vector apply_transpose(const Vector& xi) const;

    // Multiply-adds performed by apply/apply_transpose since the last reset.
    std::uint64_t multiply_adds() const noexcept { return multiply_adds_; }
    void reset_counters() const noexcept { multiply_adds_ = 0; }

protected:
    void count(std::uint64_t n) const noexcept { multiply_adds_ += n; }
    void check_apply_size(const Vector& xi) const;
    void check_transpose_size(const Vector& xi) const;

private:
    mutable std::uint64_t multiply_adds_ = 0;
};

// Materialized kernel K = exp(-C / eps); apply is an ordinary N^2 product.
class DenseKernel final : public KernelApplicator {
public:
    // Takes K as given; entries must be finite and nonnegative.
    explicit DenseKernel(Matrix kernel);

    Index rows() const override { return k_.rows(); }
    Index cols() const override { return k_.cols(); }
    using KernelApplicator::apply;
    using KernelApplicator::apply_transpose;
    void apply(const Vector& xi, Vector& out) const override;
    void apply_transpose(const Vector& xi, Vector& out) const override;
    std::unique_ptr<KernelApplicator> clone() const override;
    Vector row(Index i) const override { return k_.row(i).transpose(); }
    Matrix materialize(Index) const override { return k_; }

    const Matrix& matrix() const noexcept { return k_; }

private:
    Matrix k_;
};

// Builds K_ij = exp(-C_ij / eps). Throws ConfigError for eps <= 0, non-finite
// costs, or when some entry underflows to exactly zero.
DenseKernel dense_kernel(const Matrix& cost, double epsilon);

struct StoppingRule {
    enum class Mode { FixedIterations, Tolerance };

    Mode mode = Mode::FixedIterations;
    std::size_t max_iterations = 1000;
    double tolerance = 0.0;

    static StoppingRule fixed(std::size_t iterations) {
        return {Mode::FixedIterations, iterations, 0.0};
    }
    static StoppingRule until(double tol, std::size_t cap) {
        return {Mode::Tolerance, cap, tol};
    }
};

struct ScalingPair {
    Vector phi;
    Vector psi;
    std::size_t iterations = 0;
    // l1 column-marginal residual of (phi, psi).
    double final_marginal_error = 0.0;
    // False only in tolerance mode when the cap was reached first.
    bool converged = true;
};

// Called once per evaluated pair with (iterations done, marginal error).
using IterationObserver = std::function<void(std::size_t, double)>;

// Alternating scaling updates psi <- b / (K^T phi), phi <- a / (K psi),
// starting from phi0 and psi = 1. The marginal error is evaluated for every
// pair from the K^T phi product the next psi update needs anyway.
ScalingPair run_sinkhorn(const KernelApplicator& kernel, const DiscreteMeasure& a,
                         const DiscreteMeasure& b, const Vector& phi0, const StoppingRule& stop,
                         const IterationObserver& observer = {});

// Same with phi0 = 1/N.
ScalingPair run_sinkhorn(const KernelApplicator& kernel, const DiscreteMeasure& a,
                         const DiscreteMeasure& b, const StoppingRule& stop,
                         const IterationObserver& observer = {});

struct TransportPlan {
    Matrix entries;

    double mass() const { return entries.sum(); }
    Vector row_sums() const { return entries.rowwise().sum(); }
    Vector col_sums() const { return entries.colwise().sum().transpose(); }
};

inline constexpr Index kDefaultReconstructCap = 4096;

// diag(phi) K diag(psi). Kernels without stored entries are reconstructed,
// which is refused above max_dim.
TransportPlan transport_plan(const KernelApplicator& kernel, const ScalingPair& scalings,
                             Index max_dim = kDefaultReconstructCap);

// Gamma * v = phi .* K(psi .* v), without forming Gamma.
Vector plan_apply(const KernelApplicator& kernel, const ScalingPair& scalings, const Vector& v);

double transport_cost(const TransportPlan& plan, const Matrix& cost);

// || psi .* (K^T phi) - b ||_1
double marginal_error(const KernelApplicator& kernel, const ScalingPair& scalings,
                      const DiscreteMeasure& b);

// ||Gamma_1 - Gamma_2||_F, streamed one row at a time (O(N) memory).
double plan_frobenius_distance(const KernelApplicator& k1, const ScalingPair& s1,
                               const KernelApplicator& k2, const ScalingPair& s2,
                               Index max_dim = kDefaultReconstructCap);

}  // namespace fsl
