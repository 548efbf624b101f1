#pragma once

#include "fsl/core_ot.hpp"

#include <memory>

namespace fsl {

// Hard ranks are a permutation of 1..N stored as doubles; soft ranks are reals.
using RankVector = Vector;

enum class CostKind { Log, Squared };
enum class Backend { Fsl, Dense };

const char* to_string(CostKind kind) noexcept;
const char* to_string(Backend backend) noexcept;

// Inputs of the Sinkhorn ranking operator with cost C_ij = h(y_j - x_i):
//   squared: h(z) = z^2
//   log:     h(z) = -log(1 - z / tau), needs max x < y_1 and tau > y_N - min x.
struct RankingProblem {
    Vector x;
    Vector y;
    DiscreteMeasure a;
    DiscreteMeasure b;
    CostKind kind = CostKind::Squared;
    double tau = 0.0;
    double epsilon = 0.1;

    // Throws ConfigError when an invariant above does not hold.
    void validate() const;
};

// ranks_i = #{j : x_j <= x_i}. Entries must be distinct.
RankVector hard_rank(const Vector& x);

// Standardize (population std) and squash through the logistic function.
Vector preprocess_x(const Vector& x);

struct GridAndTau {
    Vector y;
    double tau = 0.0;  // zero for the squared cost
};

// Log: y on [1, 2], tau = (2 - min x) / (1 - 1/e). Squared: y on [0, 1].
GridAndTau default_grid_and_tau(const Vector& x_preprocessed, CostKind kind);

// Raw scores -> preprocessed x, default grid and tau, uniform marginals.
RankingProblem make_ranking_problem(const Vector& raw_x, CostKind kind, double epsilon);

Matrix ranking_cost_matrix(const RankingProblem& problem);

// Dense kernel for either cost, or the expansion kernel for the log cost
// (eps must be 1/L) over tau-scaled supports centred on their midpoints.
std::unique_ptr<KernelApplicator> ranking_kernel(const RankingProblem& problem, Backend backend);

// N * phi .* K(psi .* cumsum(b)) ./ a, without forming the plan.
RankVector soft_ranks(const KernelApplicator& kernel, const ScalingPair& scalings,
                      const DiscreteMeasure& a, const DiscreteMeasure& b);

// Sinkhorn from phi0 = 1/N followed by soft_ranks.
RankVector sinkhorn_rank(const RankingProblem& problem, const StoppingRule& stop, Backend backend);

RankVector minmax_normalize(const RankVector& r);

double mse(const Vector& u, const Vector& v);

}  // namespace fsl
