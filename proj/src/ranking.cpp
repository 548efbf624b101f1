#include "fsl/ranking.hpp"

#include "fsl/fsl1d.hpp"
#include "fsl/logcost.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace fsl {

const char* to_string(CostKind kind) noexcept {
    return kind == CostKind::Log ? "log" : "squared";
}

const char* to_string(Backend backend) noexcept {
    return backend == Backend::Fsl ? "fsl" : "dense";
}

void RankingProblem::validate() const {
    const Index n = x.size();
    if (n == 0) throw ConfigError("ranking input is empty");
    if (y.size() != n || a.size() != n || b.size() != n) {
        throw ConfigError("x, y, a and b must have the same length");
    }
    if (!x.allFinite() || !y.allFinite()) throw ConfigError("ranking inputs must be finite");
    for (Index j = 1; j < n; ++j) {
        if (!(y[j] > y[j - 1])) throw ConfigError("anchor grid y must be strictly increasing");
    }
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (kind == CostKind::Log) {
        if (!(x.maxCoeff() < y[0])) throw ConfigError("log cost needs max(x) < y_1");
        if (!(tau > y[n - 1] - x.minCoeff())) throw ConfigError("log cost needs tau > y_N - min(x)");
    }
}

RankVector hard_rank(const Vector& x) {
    const Index n = x.size();
    if (n == 0) throw ConfigError("hard_rank of an empty vector");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index i, Index j) { return x[i] < x[j]; });
    RankVector ranks(n);
    for (Index k = 0; k < n; ++k) {
        if (k > 0 && x[order[k]] == x[order[k - 1]]) {
            throw ConfigError("hard_rank: duplicate entries have no defined rank");
        }
        ranks[order[k]] = static_cast<double>(k + 1);
    }
    return ranks;
}

Vector preprocess_x(const Vector& x) {
    if (x.size() < 2) throw ConfigError("preprocess_x needs at least two entries");
    const double mean = x.mean();
    const Vector centered = x.array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(x.size()));
    if (!(sd > 0.0)) throw ConfigError("preprocess_x: input has zero variance");
    return (1.0 / (1.0 + (-centered.array() / sd).exp())).matrix();
}

GridAndTau default_grid_and_tau(const Vector& x_preprocessed, CostKind kind) {
    const Index n = x_preprocessed.size();
    if (n < 2) throw ConfigError("the anchor grid needs N >= 2");
    GridAndTau g;
    g.y.resize(n);
    const double offset = kind == CostKind::Log ? 1.0 : 0.0;
    for (Index i = 0; i < n; ++i) g.y[i] = offset + static_cast<double>(i) / static_cast<double>(n - 1);
    if (kind == CostKind::Log) {
        g.tau = (2.0 - x_preprocessed.minCoeff()) / (1.0 - std::exp(-1.0));
    }
    return g;
}

RankingProblem make_ranking_problem(const Vector& raw_x, CostKind kind, double epsilon) {
    Vector x = preprocess_x(raw_x);
    GridAndTau g = default_grid_and_tau(x, kind);
    const Index n = x.size();
    RankingProblem p{std::move(x), std::move(g.y), DiscreteMeasure::uniform(n),
                     DiscreteMeasure::uniform(n), kind, g.tau, epsilon};
    p.validate();
    return p;
}

Matrix ranking_cost_matrix(const RankingProblem& problem) {
    problem.validate();
    if (problem.kind == CostKind::Log) {
        return cost_matrix(ranking_polynomial(problem.tau), problem.x, problem.y);
    }
    const Index n = problem.x.size();
    Matrix c(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double d = problem.y[j] - problem.x[i];
            c(i, j) = d * d;
        }
    }
    return c;
}

std::unique_ptr<KernelApplicator> ranking_kernel(const RankingProblem& problem, Backend backend) {
    if (backend == Backend::Dense) {
        return std::make_unique<DenseKernel>(dense_kernel(ranking_cost_matrix(problem), problem.epsilon));
    }
    if (problem.kind != CostKind::Log) {
        throw ConfigError("the expansion backend only supports the log cost");
    }
    problem.validate();
    const int L = integer_inverse(problem.epsilon);
    // In x/tau, y/tau the polynomial is 1 + x - y. Expanding it around the
    // centre of the support box instead of the origin keeps the monomial sums
    // close to the kernel values; at L = 20 the origin expansion loses about
    // ten digits on the smallest kernel columns.
    const Vector xs = problem.x / problem.tau;
    const Vector ys = problem.y / problem.tau;
    const double cx = 0.5 * (xs.minCoeff() + xs.maxCoeff());
    const double cy = 0.5 * (ys.minCoeff() + ys.maxCoeff());
    Matrix centred(2, 2);
    centred << 1.0 + cx - cy, -1.0, 1.0, 0.0;
    const Matrix coeffs = expand_power_1d(PolynomialCost1D(1, centred), L);
    return std::make_unique<FslKernel1D>((xs.array() - cx).matrix(), (ys.array() - cy).matrix(),
                                         coeffs);
}

RankVector soft_ranks(const KernelApplicator& kernel, const ScalingPair& scalings,
                      const DiscreteMeasure& a, const DiscreteMeasure& b) {
    Vector cumulative(b.size());
    std::partial_sum(b.weights().begin(), b.weights().end(), cumulative.begin());
    const Vector gamma_v = plan_apply(kernel, scalings, cumulative);
    return static_cast<double>(a.size()) * gamma_v.cwiseQuotient(a.weights());
}

RankVector sinkhorn_rank(const RankingProblem& problem, const StoppingRule& stop, Backend backend) {
    const auto kernel = ranking_kernel(problem, backend);
    const ScalingPair s = run_sinkhorn(*kernel, problem.a, problem.b, stop);
    return soft_ranks(*kernel, s, problem.a, problem.b);
}

RankVector minmax_normalize(const RankVector& r) {
    if (r.size() == 0) throw ConfigError("minmax_normalize of an empty vector");
    const double lo = r.minCoeff();
    const double hi = r.maxCoeff();
    if (!(hi > lo)) throw ConfigError("minmax_normalize: constant vector");
    return ((r.array() - lo) / (hi - lo)).matrix();
}

double mse(const Vector& u, const Vector& v) {
    if (u.size() != v.size()) throw ConfigError("mse: length mismatch");
    if (u.size() == 0) throw ConfigError("mse of empty vectors");
    return (u - v).squaredNorm() / static_cast<double>(u.size());
}

}  // namespace fsl
