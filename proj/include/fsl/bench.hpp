#pragma once

#include "fsl/core_ot.hpp"
#include "fsl/ranking.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace fsl {

// ---------------------------------------------------------------------------
// Randomness
//
// mt19937_64 is specified bit-for-bit by the standard; the distributions on
// top of it are written out here because std:: distributions are not.

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent stream seed for repeat `stream` of a run seeded with `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in (0, 1), never exactly 0 or 1.
    double uniform_open();
    // Uniform integer in [0, bound), by rejection.
    std::uint64_t below(std::uint64_t bound);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

// i.i.d. U(0,1) weights normalized to unit l1 norm.
DiscreteMeasure gen_random_measure(Index n, std::uint64_t seed);

// (theta(1), ..., theta(n)) for a uniformly shuffled permutation theta of 1..n.
Vector random_permutation_values(Index n, Rng& rng);

// ---------------------------------------------------------------------------
// Experiments

enum class Experiment { RankCompare, FslVsDense1D, FslVsDense2D, MarginalCurve };
enum class BackendSet { Fsl, Dense, Both };

const char* to_string(Experiment e) noexcept;
const char* to_string(BackendSet b) noexcept;

struct ExperimentConfig {
    Experiment experiment = Experiment::RankCompare;
    int n = 200;                    // support size, or grid side in 2D
    std::vector<int> L = {10};      // marginal-curve sweeps all; others use L[0]
    double kappa = 1.0;
    std::size_t iterations = 1000;  // fixed count, or the cap in marginal-curve
    double tol = 1e-12;             // smallest tolerance of the marginal-curve schedule
    int tol_points = 10;
    int repeats = 30;
    std::uint64_t seed = 42;
    BackendSet backends = BackendSet::Both;
    int dim = 1;                    // marginal-curve only: 1 (ranking cost) or 2 (reflector grid)
    bool parallel_repeats = false;
    Index reconstruct_cap = kDefaultReconstructCap;

    void validate() const;
    bool uses(Backend b) const noexcept;
};

// One output record. Keys starting with "time_" hold wall-clock data; every
// other field is reproducible from (config, seed).
struct ReportRow {
    std::string kind;     // "run", "summary" or "curve"
    int index = 0;
    int L = 0;
    std::string backend;  // "fsl", "dense" or empty
    std::map<std::string, double> values;

    bool operator==(const ReportRow&) const = default;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::string version;
    std::vector<ReportRow> rows;
    // Some marginal-curve run stopped at the iteration cap.
    bool cap_hit = false;

    const ReportRow* find(const std::string& kind, const std::string& backend = "",
                          int L = -1) const;
};

bool is_timing_field(const std::string& key) noexcept;

// Hard ranks and both soft rankings of one raw input, min-max normalized
// MSEs against the hard ranks. The log cost runs on the selected backends
// (MSE from dense when both run); the squared cost always runs dense.
struct RankComparison {
    RankVector hard;
    RankVector soft_log;
    RankVector soft_sq;
    double mse_log = 0.0;
    double mse_sq = 0.0;
    double max_backend_diff = 0.0;
    double time_log_dense = 0.0;
    double time_log_fsl = 0.0;
    double time_sq = 0.0;
};

RankComparison compare_rankings(const Vector& x, int L, std::size_t iterations,
                                BackendSet backends);

ExperimentReport run_rank_compare(const ExperimentConfig& config);
ExperimentReport run_fsl_vs_dense(const ExperimentConfig& config);
ExperimentReport run_marginal_curve(const ExperimentConfig& config);
ExperimentReport run_experiment(const ExperimentConfig& config);

// Geometric schedule from just below `initial` down to `smallest`, `points`
// entries; just {smallest} when `initial` does not exceed it.
std::vector<double> tolerance_schedule(double initial, double smallest, int points);

// ---------------------------------------------------------------------------
// Serialization

std::string report_to_json(const ExperimentReport& report);
// Header "kind,index,L,backend,<sorted value keys>", empty cells for missing
// values, '#' lines for the config echo. Doubles are written with 17 digits.
std::string report_to_csv(const ExperimentReport& report);
std::vector<ReportRow> parse_report_csv(const std::string& text);

// A JSON array of numbers, or CSV with one value per line (first column; a
// non-numeric first line is taken as a header).
Vector parse_scores(const std::string& text);

}  // namespace fsl
