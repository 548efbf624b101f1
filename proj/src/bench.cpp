#include "fsl/bench.hpp"

#include "fsl/fsl1d.hpp"
#include "fsl/fsl2d.hpp"
#include "fsl/logcost.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

namespace fsl {

// ---------------------------------------------------------------------------
// Randomness

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master) ^ (stream * 0xd1b54a32d192ed03ULL));
}

double Rng::uniform_open() {
    // 53 random bits, shifted half a step off zero.
    const std::uint64_t bits = engine_() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw ConfigError("Rng::below needs a positive bound");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % bound;
}

DiscreteMeasure gen_random_measure(Index n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("gen_random_measure needs n >= 1");
    Rng rng(seed);
    Vector w(n);
    for (Index i = 0; i < n; ++i) w[i] = rng.uniform_open();
    w /= w.sum();
    return DiscreteMeasure(std::move(w));
}

Vector random_permutation_values(Index n, Rng& rng) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = static_cast<double>(i + 1);
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(i + 1)));
        std::swap(v[i], v[j]);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Config

const char* to_string(Experiment e) noexcept {
    switch (e) {
        case Experiment::RankCompare: return "rank-compare";
        case Experiment::FslVsDense1D: return "fsl-vs-dense-1d";
        case Experiment::FslVsDense2D: return "fsl-vs-dense-2d";
        case Experiment::MarginalCurve: return "marginal-curve";
    }
    return "?";
}

const char* to_string(BackendSet b) noexcept {
    switch (b) {
        case BackendSet::Fsl: return "fsl";
        case BackendSet::Dense: return "dense";
        case BackendSet::Both: return "both";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    if (n < 2) throw ConfigError("n must be at least 2");
    if (L.empty()) throw ConfigError("at least one L is required");
    for (int l : L) {
        if (l < 1) throw ConfigError("L must be positive");
        if (l > kMaxMultinomialOrder) throw ConfigError("L exceeds the multinomial ceiling");
    }
    if (repeats < 1) throw ConfigError("repeats must be at least 1");
    if (!(kappa > 0.0 && kappa <= 1.0)) throw ConfigError("kappa must lie in (0, 1]");
    if (experiment == Experiment::MarginalCurve) {
        if (!(tol > 0.0)) throw ConfigError("tol must be positive");
        if (tol_points < 1) throw ConfigError("tol schedule must be nonempty");
        if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
    }
    if (reconstruct_cap < 1) throw ConfigError("reconstruction cap must be positive");
}

bool ExperimentConfig::uses(Backend b) const noexcept {
    if (backends == BackendSet::Both) return true;
    return (b == Backend::Fsl) == (backends == BackendSet::Fsl);
}

const ReportRow* ExperimentReport::find(const std::string& kind, const std::string& backend,
                                        int L) const {
    for (const auto& row : rows) {
        if (row.kind == kind && row.backend == backend && (L < 0 || row.L == L)) return &row;
    }
    return nullptr;
}

bool is_timing_field(const std::string& key) noexcept { return key.rfind("time_", 0) == 0; }

// ---------------------------------------------------------------------------
// Helpers

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class Fn>
void for_each_repeat(int repeats, bool parallel, Fn&& fn) {
    if (!parallel || repeats == 1) {
        for (int r = 0; r < repeats; ++r) fn(r);
        return;
    }
    const unsigned workers =
        std::max(1u, std::min(std::thread::hardware_concurrency(), static_cast<unsigned>(repeats)));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int r = next++; r < repeats; r = next++) {
                    try {
                        fn(r);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

[[noreturn]] void rethrow_with_run(const DivergenceError& e, int run) {
    throw DivergenceError("run " + std::to_string(run) + ": " + e.what(), e.iteration());
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

ExperimentReport new_report(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;
    report.version = FSL_VERSION;
    return report;
}

// A test instance with both kernels (or one) and its marginals.
struct Instance {
    std::unique_ptr<KernelApplicator> fsl;
    std::unique_ptr<KernelApplicator> dense;
    DiscreteMeasure a;
    DiscreteMeasure b;
    double setup_fsl = 0.0;
    double setup_dense = 0.0;

    const KernelApplicator& kernel(Backend backend) const {
        return backend == Backend::Fsl ? *fsl : *dense;
    }
};

// Log-type ranking cost on a shuffled permutation, uniform marginals.
Instance ranking_instance(const ExperimentConfig& config, int L) {
    Rng rng(derive_seed(config.seed, 0));
    const Vector theta = random_permutation_values(config.n, rng);
    const RankingProblem problem =
        make_ranking_problem(theta, CostKind::Log, 1.0 / static_cast<double>(L));
    Instance inst{nullptr, nullptr, problem.a, problem.b};
    if (config.uses(Backend::Fsl)) {
        const auto t0 = Clock::now();
        inst.fsl = ranking_kernel(problem, Backend::Fsl);
        inst.setup_fsl = seconds_since(t0);
    }
    if (config.uses(Backend::Dense)) {
        const auto t0 = Clock::now();
        inst.dense = ranking_kernel(problem, Backend::Dense);
        inst.setup_dense = seconds_since(t0);
    }
    return inst;
}

// Reflector/refractor cost on the n x n grid, random marginals.
Instance grid_instance(const ExperimentConfig& config, int L) {
    const Points2D pts = grid_points(config.n, default_grid_length(config.n));
    const Index n = pts.rows();
    Instance inst{nullptr, nullptr, gen_random_measure(n, derive_seed(config.seed, 1)),
                  gen_random_measure(n, derive_seed(config.seed, 2))};
    if (config.uses(Backend::Fsl)) {
        const auto t0 = Clock::now();
        inst.fsl = std::make_unique<FslKernel2D>(build_fsl2d(config.kappa, pts, pts, L));
        inst.setup_fsl = seconds_since(t0);
    }
    if (config.uses(Backend::Dense)) {
        const auto t0 = Clock::now();
        const Matrix c = cost_matrix(ReflectorRefractorCost(config.kappa), pts, pts);
        inst.dense = std::make_unique<DenseKernel>(dense_kernel(c, 1.0 / static_cast<double>(L)));
        inst.setup_dense = seconds_since(t0);
    }
    return inst;
}

std::vector<Backend> selected_backends(const ExperimentConfig& config) {
    std::vector<Backend> out;
    if (config.uses(Backend::Fsl)) out.push_back(Backend::Fsl);
    if (config.uses(Backend::Dense)) out.push_back(Backend::Dense);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// rank-compare

RankComparison compare_rankings(const Vector& x, int L, std::size_t iterations,
                                BackendSet backends) {
    RankComparison out;
    const double eps = 1.0 / static_cast<double>(L);
    out.hard = hard_rank(x);
    const Vector hard_n = minmax_normalize(out.hard);
    const StoppingRule stop = StoppingRule::fixed(iterations);

    const RankingProblem log_problem = make_ranking_problem(x, CostKind::Log, eps);
    const RankingProblem sq_problem = make_ranking_problem(x, CostKind::Squared, eps);

    auto timed_rank = [&](const RankingProblem& p, Backend backend, double& seconds) {
        const auto kernel = ranking_kernel(p, backend);
        const auto t0 = Clock::now();
        const ScalingPair s = run_sinkhorn(*kernel, p.a, p.b, stop);
        seconds = seconds_since(t0);
        return soft_ranks(*kernel, s, p.a, p.b);
    };

    const bool dense = backends != BackendSet::Fsl;
    const bool fast = backends != BackendSet::Dense;
    if (dense) out.soft_log = timed_rank(log_problem, Backend::Dense, out.time_log_dense);
    if (fast) {
        RankVector r = timed_rank(log_problem, Backend::Fsl, out.time_log_fsl);
        if (dense) {
            out.max_backend_diff = (r - out.soft_log).cwiseAbs().maxCoeff();
        } else {
            out.soft_log = std::move(r);
        }
    }
    out.soft_sq = timed_rank(sq_problem, Backend::Dense, out.time_sq);
    out.mse_log = mse(minmax_normalize(out.soft_log), hard_n);
    out.mse_sq = mse(minmax_normalize(out.soft_sq), hard_n);
    return out;
}

ExperimentReport run_rank_compare(const ExperimentConfig& config) {
    ExperimentReport report = new_report(config);
    const int L = config.L.front();
    std::vector<RankComparison> results(static_cast<std::size_t>(config.repeats));

    for_each_repeat(config.repeats, config.parallel_repeats, [&](int r) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(r)));
        const Vector x = random_permutation_values(config.n, rng);
        try {
            results[static_cast<std::size_t>(r)] =
                compare_rankings(x, L, config.iterations, config.backends);
        } catch (const DivergenceError& e) {
            rethrow_with_run(e, r);
        }
    });

    std::vector<double> mse_log, mse_sq, t_log_dense, t_log_fsl, t_sq;
    for (int r = 0; r < config.repeats; ++r) {
        const RankComparison& c = results[static_cast<std::size_t>(r)];
        ReportRow row{"run", r, L, "", {}};
        row.values["mse_log"] = c.mse_log;
        row.values["mse_sq"] = c.mse_sq;
        row.values["time_iter_sq_s"] = c.time_sq;
        if (config.backends != BackendSet::Fsl) row.values["time_iter_log_dense_s"] = c.time_log_dense;
        if (config.backends != BackendSet::Dense) row.values["time_iter_log_fsl_s"] = c.time_log_fsl;
        if (config.backends == BackendSet::Both) row.values["max_backend_diff"] = c.max_backend_diff;
        report.rows.push_back(std::move(row));
        mse_log.push_back(c.mse_log);
        mse_sq.push_back(c.mse_sq);
        t_log_dense.push_back(c.time_log_dense);
        t_log_fsl.push_back(c.time_log_fsl);
        t_sq.push_back(c.time_sq);
    }

    ReportRow summary{"summary", 0, L, "", {}};
    summary.values["mse_log"] = mean(mse_log);
    summary.values["mse_sq"] = mean(mse_sq);
    summary.values["log_better_count"] = static_cast<double>(std::count_if(
        results.begin(), results.end(), [](const RankComparison& c) { return c.mse_log < c.mse_sq; }));
    summary.values["time_iter_sq_s"] = mean(t_sq);
    if (config.backends != BackendSet::Fsl) summary.values["time_iter_log_dense_s"] = mean(t_log_dense);
    if (config.backends != BackendSet::Dense) summary.values["time_iter_log_fsl_s"] = mean(t_log_fsl);
    report.rows.push_back(std::move(summary));
    return report;
}

// ---------------------------------------------------------------------------
// fsl-vs-dense

ExperimentReport run_fsl_vs_dense(const ExperimentConfig& config) {
    if (config.experiment != Experiment::FslVsDense1D &&
        config.experiment != Experiment::FslVsDense2D) {
        throw ConfigError("run_fsl_vs_dense needs a fsl-vs-dense experiment");
    }
    ExperimentReport report = new_report(config);
    const int L = config.L.front();
    const Instance inst = config.experiment == Experiment::FslVsDense1D ? ranking_instance(config, L)
                                                                        : grid_instance(config, L);
    const StoppingRule stop = StoppingRule::fixed(config.iterations);
    const auto backends = selected_backends(config);

    std::map<Backend, ScalingPair> last;
    std::map<Backend, std::vector<double>> times;
    for (Backend backend : backends) {
        auto& t = times[backend];
        t.assign(static_cast<std::size_t>(config.repeats), 0.0);
        std::vector<ScalingPair> runs(static_cast<std::size_t>(config.repeats));
        for_each_repeat(config.repeats, config.parallel_repeats, [&](int r) {
            const auto kernel = inst.kernel(backend).clone();
            const auto t0 = Clock::now();
            try {
                runs[static_cast<std::size_t>(r)] = run_sinkhorn(*kernel, inst.a, inst.b, stop);
            } catch (const DivergenceError& e) {
                rethrow_with_run(e, r);
            }
            t[static_cast<std::size_t>(r)] = seconds_since(t0);
        });
        for (int r = 0; r < config.repeats; ++r) {
            const ScalingPair& s = runs[static_cast<std::size_t>(r)];
            ReportRow row{"run", r, L, to_string(backend), {}};
            row.values["time_iter_s"] = t[static_cast<std::size_t>(r)];
            row.values["iterations"] = static_cast<double>(s.iterations);
            row.values["marginal_error"] = s.final_marginal_error;
            report.rows.push_back(std::move(row));
        }
        last[backend] = runs.back();
    }

    ReportRow summary{"summary", 0, L, "", {}};
    summary.values["n_points"] = static_cast<double>(inst.a.size());
    if (config.uses(Backend::Fsl)) {
        summary.values["time_iter_fsl_s"] = mean(times[Backend::Fsl]);
        summary.values["time_setup_fsl_s"] = inst.setup_fsl;
    }
    if (config.uses(Backend::Dense)) {
        summary.values["time_iter_dense_s"] = mean(times[Backend::Dense]);
        summary.values["time_setup_dense_s"] = inst.setup_dense;
    }
    if (config.backends == BackendSet::Both) {
        summary.values["time_speedup"] =
            summary.values["time_iter_dense_s"] / summary.values["time_iter_fsl_s"];
        if (inst.a.size() <= config.reconstruct_cap) {
            summary.values["frobenius"] =
                plan_frobenius_distance(*inst.fsl, last[Backend::Fsl], *inst.dense,
                                        last[Backend::Dense], config.reconstruct_cap);
        } else {
            summary.values["frobenius_skipped"] = 1.0;
        }
    }
    report.rows.push_back(std::move(summary));
    return report;
}

// ---------------------------------------------------------------------------
// marginal-curve

std::vector<double> tolerance_schedule(double initial, double smallest, int points) {
    if (points < 1) throw ConfigError("tolerance schedule needs at least one point");
    if (!(smallest > 0.0)) throw ConfigError("tolerance schedule needs a positive smallest tolerance");
    // Already met at the start: a single zero-iteration point.
    if (!(initial > smallest)) return {smallest};
    std::vector<double> out(static_cast<std::size_t>(points));
    const double ratio = std::pow(smallest / initial, 1.0 / points);
    for (int k = 1; k <= points; ++k) out[static_cast<std::size_t>(k - 1)] = initial * std::pow(ratio, k);
    out.back() = smallest;
    return out;
}

ExperimentReport run_marginal_curve(const ExperimentConfig& config) {
    if (config.experiment != Experiment::MarginalCurve) {
        throw ConfigError("run_marginal_curve needs the marginal-curve experiment");
    }
    ExperimentReport report = new_report(config);
    const auto backends = selected_backends(config);

    for (int L : config.L) {
        const Instance inst = config.dim == 1 ? ranking_instance(config, L) : grid_instance(config, L);
        const KernelApplicator& probe = inst.kernel(backends.front());
        ScalingPair start;
        start.phi = Vector::Constant(probe.rows(), 1.0 / static_cast<double>(probe.rows()));
        start.psi = Vector::Ones(probe.cols());
        const double e0 = marginal_error(probe, start, inst.b);
        const std::vector<double> schedule = tolerance_schedule(e0, config.tol, config.tol_points);
        const std::size_t K = schedule.size();
        const StoppingRule stop = StoppingRule::until(schedule.back(), config.iterations);

        for (Backend backend : backends) {
            std::vector<double> time_sum(K, 0.0);
            std::vector<double> iters(K, static_cast<double>(config.iterations));
            std::vector<int> reached(K, 0);
            // Time-to-tolerance runs are kept serial: they are the measurement.
            for (int r = 0; r < config.repeats; ++r) {
                const auto kernel = inst.kernel(backend).clone();
                std::vector<double> hit_time(K, -1.0);
                std::vector<std::size_t> hit_iter(K, 0);
                std::size_t next = 0;
                const auto t0 = Clock::now();
                ScalingPair s;
                try {
                    s = run_sinkhorn(*kernel, inst.a, inst.b,
                                     Vector::Constant(kernel->rows(),
                                                      1.0 / static_cast<double>(kernel->rows())),
                                     stop, [&](std::size_t it, double err) {
                                         while (next < K && err <= schedule[next]) {
                                             hit_time[next] = seconds_since(t0);
                                             hit_iter[next] = it;
                                             ++next;
                                         }
                                     });
                } catch (const DivergenceError& e) {
                    rethrow_with_run(e, r);
                }
                const double total = seconds_since(t0);
                for (std::size_t k = 0; k < K; ++k) {
                    if (hit_time[k] >= 0.0) {
                        time_sum[k] += hit_time[k];
                        iters[k] = static_cast<double>(hit_iter[k]);
                        reached[k] = 1;
                    } else {
                        time_sum[k] += total;
                        reached[k] = 0;
                        report.cap_hit = true;
                    }
                }
            }
            for (std::size_t k = 0; k < K; ++k) {
                ReportRow row{"curve", static_cast<int>(k), L, to_string(backend), {}};
                row.values["tolerance"] = schedule[k];
                row.values["iterations"] = iters[k];
                row.values["reached"] = reached[k];
                row.values["time_to_tol_s"] = time_sum[k] / config.repeats;
                report.rows.push_back(std::move(row));
            }
        }
    }
    return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    switch (config.experiment) {
        case Experiment::RankCompare: return run_rank_compare(config);
        case Experiment::FslVsDense1D:
        case Experiment::FslVsDense2D: return run_fsl_vs_dense(config);
        case Experiment::MarginalCurve: return run_marginal_curve(config);
    }
    throw ConfigError("unknown experiment");
}

}  // namespace fsl
