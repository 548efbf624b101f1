#include "fsl/core_ot.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace fsl {

SupportError::SupportError(Index i, Index j, double value)
    : ConfigError([&] {
          std::ostringstream os;
          os << "P(x_" << i << ", y_" << j << ") = " << value << " is outside (0, 1)";
          return os.str();
      }()),
      i_(i), j_(j), value_(value) {}

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(Vector weights) : weights_(std::move(weights)) {
    if (weights_.size() == 0) throw ConfigError("measure must have at least one point");
    for (Index i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
            throw ConfigError("measure weight " + std::to_string(i) +
                              " is not strictly positive and finite");
        }
    }
    const double total = weights_.sum();
    if (std::abs(total - 1.0) > kSumTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << "measure weights sum to " << total << ", expected 1";
        throw ConfigError(os.str());
    }
}

DiscreteMeasure DiscreteMeasure::uniform(Index n) {
    if (n < 1) throw ConfigError("uniform measure needs n >= 1");
    return DiscreteMeasure(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

// ---------------------------------------------------------------------------
// KernelApplicator

Vector KernelApplicator::apply(const Vector& xi) const {
    Vector out(rows());
    apply(xi, out);
    return out;
}

Vector KernelApplicator::apply_transpose(const Vector& xi) const {
    Vector out(cols());
    apply_transpose(xi, out);
    return out;
}

Vector KernelApplicator::row(Index i) const {
    if (i < 0 || i >= rows()) throw ConfigError("row index out of range");
    Vector e = Vector::Zero(rows());
    e[i] = 1.0;
    return apply_transpose(e);
}

Matrix KernelApplicator::materialize(Index max_dim) const {
    if (rows() > max_dim || cols() > max_dim) {
        throw ConfigError("kernel of size " + std::to_string(rows()) + "x" +
                          std::to_string(cols()) + " exceeds the reconstruction cap " +
                          std::to_string(max_dim));
    }
    Matrix k(rows(), cols());
    Vector e = Vector::Zero(cols());
    Vector column(rows());
    for (Index j = 0; j < cols(); ++j) {
        e[j] = 1.0;
        apply(e, column);
        k.col(j) = column;
        e[j] = 0.0;
    }
    return k;
}

void KernelApplicator::check_apply_size(const Vector& xi) const {
    if (xi.size() != cols()) {
        throw ConfigError("apply: vector of length " + std::to_string(xi.size()) +
                          " for kernel with " + std::to_string(cols()) + " columns");
    }
}

void KernelApplicator::check_transpose_size(const Vector& xi) const {
    if (xi.size() != rows()) {
        throw ConfigError("apply_transpose: vector of length " + std::to_string(xi.size()) +
                          " for kernel with " + std::to_string(rows()) + " rows");
    }
}

// ---------------------------------------------------------------------------
// DenseKernel

DenseKernel::DenseKernel(Matrix kernel) : k_(std::move(kernel)) {
    if (k_.size() == 0) throw ConfigError("empty kernel matrix");
    if (!k_.allFinite() || (k_.array() < 0.0).any()) {
        throw ConfigError("kernel entries must be finite and nonnegative");
    }
}

void DenseKernel::apply(const Vector& xi, Vector& out) const {
    check_apply_size(xi);
    out.noalias() = k_ * xi;
    count(static_cast<std::uint64_t>(k_.size()));
}

void DenseKernel::apply_transpose(const Vector& xi, Vector& out) const {
    check_transpose_size(xi);
    out.noalias() = k_.transpose() * xi;
    count(static_cast<std::uint64_t>(k_.size()));
}

std::unique_ptr<KernelApplicator> DenseKernel::clone() const {
    return std::make_unique<DenseKernel>(*this);
}

DenseKernel dense_kernel(const Matrix& cost, double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("epsilon must be positive and finite");
    }
    if (cost.size() == 0) throw ConfigError("empty cost matrix");
    if (!cost.allFinite()) throw ConfigError("cost matrix has non-finite entries");
    Matrix k = (-cost.array() / epsilon).exp().matrix();
    for (Index j = 0; j < k.cols(); ++j) {
        for (Index i = 0; i < k.rows(); ++i) {
            if (k(i, j) == 0.0) {
                throw ConfigError("exp(-C/eps) underflows to 0 at (" + std::to_string(i) + ", " +
                                  std::to_string(j) + "); eps too small for the dense kernel");
            }
        }
    }
    return DenseKernel(std::move(k));
}

// ---------------------------------------------------------------------------
// Sinkhorn loop

namespace {

constexpr double kDivisionGuard = 1e-300;

// out = num ./ den, refusing tiny or non-finite denominators.
void guarded_divide(const Vector& num, const Vector& den, Vector& out, std::size_t iteration,
                    const char* which) {
    for (Index i = 0; i < den.size(); ++i) {
        const double d = den[i];
        if (!(d >= kDivisionGuard) || !std::isfinite(d)) {
            std::ostringstream os;
            os << which << " update diverged at iteration " << iteration << ": denominator " << d
               << " at index " << i;
            throw DivergenceError(os.str(), iteration);
        }
        out[i] = num[i] / d;
        if (!std::isfinite(out[i])) {
            std::ostringstream os;
            os << which << " update produced a non-finite value at iteration " << iteration;
            throw DivergenceError(os.str(), iteration);
        }
    }
}

double l1_residual(const Vector& psi, const Vector& ktphi, const Vector& b) {
    return (psi.array() * ktphi.array() - b.array()).abs().sum();
}

}  // namespace

ScalingPair run_sinkhorn(const KernelApplicator& kernel, const DiscreteMeasure& a,
                         const DiscreteMeasure& b, const Vector& phi0, const StoppingRule& stop,
                         const IterationObserver& observer) {
    if (a.size() != kernel.rows() || b.size() != kernel.cols()) {
        throw ConfigError("marginal sizes do not match the kernel dimensions");
    }
    if (phi0.size() != kernel.rows()) throw ConfigError("phi0 has the wrong length");
    if (!phi0.allFinite() || (phi0.array() <= 0.0).any()) {
        throw ConfigError("phi0 must be strictly positive and finite");
    }
    if (stop.mode == StoppingRule::Mode::Tolerance && !(stop.tolerance >= 0.0)) {
        throw ConfigError("tolerance must be nonnegative");
    }

    ScalingPair s;
    s.phi = phi0;
    s.psi = Vector::Ones(kernel.cols());
    Vector ktphi(kernel.cols());
    Vector kpsi(kernel.rows());

    const bool tolerance_mode = stop.mode == StoppingRule::Mode::Tolerance;
    for (;;) {
        kernel.apply_transpose(s.phi, ktphi);
        const double err = l1_residual(s.psi, ktphi, b.weights());
        s.final_marginal_error = err;
        if (observer) observer(s.iterations, err);

        if (tolerance_mode && err <= stop.tolerance) {
            s.converged = true;
            break;
        }
        if (s.iterations >= stop.max_iterations) {
            s.converged = !tolerance_mode;
            break;
        }

        guarded_divide(b.weights(), ktphi, s.psi, s.iterations + 1, "psi");
        kernel.apply(s.psi, kpsi);
        guarded_divide(a.weights(), kpsi, s.phi, s.iterations + 1, "phi");
        ++s.iterations;
    }
    return s;
}

ScalingPair run_sinkhorn(const KernelApplicator& kernel, const DiscreteMeasure& a,
                         const DiscreteMeasure& b, const StoppingRule& stop,
                         const IterationObserver& observer) {
    const Vector phi0 = Vector::Constant(kernel.rows(), 1.0 / static_cast<double>(kernel.rows()));
    return run_sinkhorn(kernel, a, b, phi0, stop, observer);
}

// ---------------------------------------------------------------------------
// Plan-level quantities

namespace {

void check_scalings(const KernelApplicator& kernel, const ScalingPair& s) {
    if (s.phi.size() != kernel.rows() || s.psi.size() != kernel.cols()) {
        throw ConfigError("scaling vectors do not match the kernel dimensions");
    }
}

}  // namespace

TransportPlan transport_plan(const KernelApplicator& kernel, const ScalingPair& scalings,
                             Index max_dim) {
    check_scalings(kernel, scalings);
    TransportPlan plan;
    plan.entries = scalings.phi.asDiagonal() * kernel.materialize(max_dim) *
                   scalings.psi.asDiagonal();
    return plan;
}

Vector plan_apply(const KernelApplicator& kernel, const ScalingPair& scalings, const Vector& v) {
    check_scalings(kernel, scalings);
    if (v.size() != kernel.cols()) throw ConfigError("plan_apply: vector has the wrong length");
    const Vector scaled = scalings.psi.cwiseProduct(v);
    return scalings.phi.cwiseProduct(kernel.apply(scaled));
}

double transport_cost(const TransportPlan& plan, const Matrix& cost) {
    if (plan.entries.rows() != cost.rows() || plan.entries.cols() != cost.cols()) {
        throw ConfigError("transport_cost: plan and cost sizes differ");
    }
    return plan.entries.cwiseProduct(cost).sum();
}

double marginal_error(const KernelApplicator& kernel, const ScalingPair& scalings,
                      const DiscreteMeasure& b) {
    check_scalings(kernel, scalings);
    if (b.size() != kernel.cols()) throw ConfigError("marginal_error: measure has the wrong length");
    return l1_residual(scalings.psi, kernel.apply_transpose(scalings.phi), b.weights());
}

double plan_frobenius_distance(const KernelApplicator& k1, const ScalingPair& s1,
                               const KernelApplicator& k2, const ScalingPair& s2,
                               Index max_dim) {
    check_scalings(k1, s1);
    check_scalings(k2, s2);
    if (k1.rows() != k2.rows() || k1.cols() != k2.cols()) {
        throw ConfigError("plan_frobenius_distance: kernel sizes differ");
    }
    if (k1.rows() > max_dim || k1.cols() > max_dim) {
        throw ConfigError("plan comparison above the reconstruction cap " + std::to_string(max_dim));
    }
    double sum = 0.0;
    for (Index i = 0; i < k1.rows(); ++i) {
        const Vector r1 = s1.phi[i] * k1.row(i).cwiseProduct(s1.psi);
        const Vector r2 = s2.phi[i] * k2.row(i).cwiseProduct(s2.psi);
        sum += (r1 - r2).squaredNorm();
    }
    return std::sqrt(sum);
}

}  // namespace fsl
