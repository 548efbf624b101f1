// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "fixtures.hpp"
#include "properties.hpp"

#include "fsl/bench.hpp"
#include "fsl/fsl1d.hpp"
#include "fsl/ranking.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace fsl;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(const char* id, const char* title, double time_limit_s,
               const std::function<Verdict()>& body) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (secs > time_limit_s) {
        v.pass = false;
        v.detail += " [over the " + std::to_string(time_limit_s) + " s limit]";
    }
    if (!v.pass) ++failures;
    std::printf("%s %s  %s: %s (%.2f s)\n", id, v.pass ? "PASS" : "FAIL", title, v.detail.c_str(),
                secs);
    std::fflush(stdout);
}

ExperimentConfig config(Experiment e, int n, int L) {
    ExperimentConfig c;
    c.experiment = e;
    c.n = n;
    c.L = {L};
    c.iterations = 1000;
    c.repeats = 1;
    return c;
}

Verdict three_point() {
    const RankingProblem p = fixtures::three_point_problem();
    const bool hard_ok = hard_rank(p.x) == fixtures::three_point_ranks().array().round().matrix();
    const DenseKernel k = dense_kernel(ranking_cost_matrix(p), p.epsilon);
    const ScalingPair s = run_sinkhorn(k, p.a, p.b, StoppingRule::fixed(1000));
    const double plan_err =
        (transport_plan(k, s).entries - fixtures::three_point_plan()).cwiseAbs().maxCoeff();
    const RankVector r = soft_ranks(k, s, p.a, p.b);
    const double rank_err = (r - fixtures::three_point_ranks()).cwiseAbs().maxCoeff();
    std::ostringstream os;
    os << "hard ranks " << (hard_ok ? "exact" : "WRONG") << ", soft ranks (" << r[0] << ", " << r[1]
       << ", " << r[2] << ") max err " << rank_err << " <= 2e-3, plan max err " << plan_err
       << " <= 5e-4";
    return {hard_ok && rank_err <= 2e-3 && plan_err <= 5e-4, os.str()};
}

Verdict fsl_dense_1d() {
    const ExperimentReport r = run_fsl_vs_dense(config(Experiment::FslVsDense1D, 200, 10));
    const double f = r.find("summary")->values.at("frobenius");
    std::ostringstream os;
    os << "N=200, L=10, 1000 iterations: plan Frobenius difference " << f << " <= 1e-12";
    return {f <= 1e-12, os.str()};
}

Verdict fsl_dense_2d() {
    std::ostringstream os;
    bool ok = true;
    for (double kappa : {1.0, 0.5}) {
        ExperimentConfig c = config(Experiment::FslVsDense2D, 20, 10);
        c.kappa = kappa;
        const double f = run_fsl_vs_dense(c).find("summary")->values.at("frobenius");
        ok = ok && f <= 1e-12;
        os << "kappa=" << kappa << ": " << f << "  ";
    }
    os << "(20x20 grid, L=10, bound 1e-12)";
    return {ok, os.str()};
}

Verdict cost_comparison() {
    std::ostringstream os;
    bool ok = true;
    for (int n : {200, 400}) {
        ExperimentConfig c = config(Experiment::RankCompare, n, 10);
        c.repeats = 10;
        const ExperimentReport r = run_rank_compare(c);
        int better = 0;
        double lo = 1.0, hi = 0.0;
        for (const auto& row : r.rows) {
            if (row.kind != "run") continue;
            const double ml = row.values.at("mse_log");
            better += ml < row.values.at("mse_sq") ? 1 : 0;
            lo = std::min(lo, ml);
            hi = std::max(hi, ml);
        }
        ok = ok && better >= 9 && lo >= 1e-3 && hi <= 1e-2;
        os << "N=" << n << ": log better in " << better << "/10, MSE(log) in [" << lo << ", " << hi
           << "], mean sq " << r.find("summary")->values.at("mse_sq") << "  ";
    }
    return {ok, os.str()};
}

Verdict linear_scaling() {
    std::ostringstream os;
    double counts[3];
    for (int k = 0; k < 3; ++k) {
        const int n = 400 << k;
        Rng rng(derive_seed(42, static_cast<std::uint64_t>(k)));
        const RankingProblem p =
            make_ranking_problem(random_permutation_values(n, rng), CostKind::Log, 0.1);
        const auto kernel = ranking_kernel(p, Backend::Fsl);
        kernel->reset_counters();
        kernel->apply(Vector::Ones(n));
        counts[k] = static_cast<double>(kernel->multiply_adds());
    }
    const double r1 = counts[1] / counts[0], r2 = counts[2] / counts[1];
    bool ok = r1 >= 1.9 && r1 <= 2.1 && r2 >= 1.9 && r2 <= 2.1;
    os << "multiply-adds at N=400/800/1600: ratios " << r1 << ", " << r2 << " in [1.9, 2.1]; ";

    ExperimentConfig c = config(Experiment::FslVsDense1D, 1600, 10);
    c.repeats = 10;
    const ExperimentReport r = run_fsl_vs_dense(c);
    const auto& v = r.find("summary")->values;
    const double speedup = v.at("time_speedup");
    ok = ok && speedup >= 50.0;
    os << "N=1600 1000 iterations: fsl " << v.at("time_iter_fsl_s") << " s, dense "
       << v.at("time_iter_dense_s") << " s, speedup " << speedup << "x >= 50x";
    return {ok, os.str()};
}

Verdict property_suites() {
    struct Suite {
        const char* name;
        props::Outcome o;
    };
    const Suite suites[] = {
        {"fsl1d vs dense", props::fsl1d_matches_dense(100, 1001)},
        {"fsl1d adjoint", props::fsl1d_adjoint(100, 1002)},
        {"fsl2d vs dense", props::fsl2d_matches_dense(100, 1003)},
        {"fsl2d adjoint", props::fsl2d_adjoint(100, 1004)},
        {"expansion identity", props::expansion_identity(100, 1005)},
        {"multinomial k<=20", props::multinomial_compositions(20)},
        {"hard rank vs assignment", props::hard_rank_matches_assignment(50, 1006)},
    };
    std::ostringstream os;
    bool ok = true;
    for (const Suite& s : suites) {
        ok = ok && s.o.ok();
        os << s.name << " " << s.o.cases - s.o.failures << "/" << s.o.cases << " (worst " << s.o.worst
           << ")";
        if (!s.o.ok()) os << " first failure: " << s.o.first_failure;
        os << "; ";
    }
    return {ok, os.str()};
}

Verdict marginal_curve() {
    ExperimentConfig c;
    c.experiment = Experiment::MarginalCurve;
    c.n = 2000;
    c.L = {10, 15, 20};
    c.iterations = 10000;
    c.repeats = 3;
    const ExperimentReport r = run_marginal_curve(c);
    std::ostringstream os;
    bool ok = true;
    int compared = 0, slower = 0;
    double worst_ratio = 0.0;
    for (const auto& row : r.rows) {
        if (row.backend != "fsl") continue;
        const ReportRow* dense = nullptr;
        for (const auto& d : r.rows) {
            if (d.backend == "dense" && d.L == row.L && d.index == row.index) dense = &d;
        }
        ++compared;
        const bool fsl_reached = row.values.at("reached") == 1.0;
        const bool dense_reached = dense->values.at("reached") == 1.0;
        const double tf = row.values.at("time_to_tol_s"), td = dense->values.at("time_to_tol_s");
        const bool point_ok = fsl_reached && (!dense_reached || tf <= td);
        if (!point_ok) {
            ++slower;
            ok = false;
        }
        if (td > 0.0) worst_ratio = std::max(worst_ratio, tf / td);
    }
    os << "N=2000, L in {10,15,20}, " << compared << " tolerances down to " << c.tol << ": FSL at or below"
       << " dense at " << compared - slower << "/" << compared << ", worst time ratio " << worst_ratio;
    return {ok, os.str()};
}

}  // namespace

int main() {
    criterion("AC1", "three-point ranking example", 1.0, three_point);
    criterion("AC2", "expansion = dense, 1D", 30.0, fsl_dense_1d);
    criterion("AC3", "expansion = dense, 2D", 120.0, fsl_dense_2d);
    criterion("AC4", "log vs squared cost", 600.0, cost_comparison);
    criterion("AC5", "linear scaling and speedup", 600.0, linear_scaling);
    criterion("AC6", "property suites", 600.0, property_suites);
    criterion("AC7", "time to marginal-error tolerance", 600.0, marginal_curve);
    std::printf("%d of 7 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
