#ifndef PERMREG_EVAL_HPP
#define PERMREG_EVAL_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "permreg/data.hpp"
#include "permreg/optimizer.hpp"

namespace permreg {

// R² score as the unsquared ratio of RMS norms:
//   1 - ||y_test - y_pred|| / ||y_test - mean(y_test)|| .
// 1 for perfect predictions, 0 for predicting the test mean, negative when
// doing worse than that. Note this is NOT the conventional squared-norm R².
double r2_score(const Vector& y_test, const Vector& y_pred);

// Conventional coefficient of determination (squared norms), reported next
// to the RMS-ratio score when cross-tool comparisons are needed.
double r2_score_conventional(const Vector& y_test, const Vector& y_pred);

struct MannWhitneyResult {
    double u = 0.0;        // U statistic of the first sample, midrank ties
    double p_value = 1.0;  // two-sided
    bool exact = false;    // true when enumerated rather than approximated
};

// Two-sided Mann-Whitney test. Exact enumeration when both samples have at
// most 8 elements and there are no ties; otherwise the normal approximation
// with tie-corrected variance and continuity correction.
MannWhitneyResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b);

// The two routes individually (the exact one doubles as the oracle for the
// approximation). mann_whitney_exact requires tie-free samples.
MannWhitneyResult mann_whitney_exact(const std::vector<double>& a,
                                     const std::vector<double>& b);
MannWhitneyResult mann_whitney_normal(const std::vector<double>& a,
                                      const std::vector<double>& b);

// 25 grid points log-spaced in [1e-4, 1e4].
std::vector<double> default_lambda_grid();

struct RidgeCvResult {
    double lambda = 0.0;
    Vector beta;  // standardized scale, use predict() with meta
    StandardizationMeta meta;
    double runtime_seconds = 0.0;
};

// k-fold cross-validated ridge: seeded fold assignment, grid search for the
// lambda with the smallest mean validation RMS error, refit on the full
// training data.
RidgeCvResult ridge_cv_baseline(const Dataset& train, std::size_t folds,
                                const std::vector<double>& lambda_grid, std::uint64_t seed,
                                bool standardize_x = true);

enum class MethodKind { Bkk, Sbkk, Abkk, RidgeCv, Ols };

std::string method_name(MethodKind kind);
MethodKind method_from_name(const std::string& name);

struct MethodSpec {
    std::string label;
    MethodKind kind = MethodKind::Bkk;
};

struct MethodScore {
    double r2 = 0.0;
    double r2_conventional = 0.0;
    double runtime_seconds = 0.0;           // fit wall time only
    std::optional<std::size_t> iterations;  // gradient-trained methods only
    std::optional<std::size_t> sparsity_selected;  // saturated-in gate count
};

struct BenchmarkOptions {
    std::size_t T = 30;
    AdamConfig adam;
    TrainOptions train;
    std::size_t cv_folds = 5;
    std::vector<double> lambda_grid;  // empty means default_lambda_grid()
    double test_fraction = 0.2;       // CSV sources: per-repetition split
    double mw_alpha = 0.05;
    std::size_t jobs = 1;
};

// Either a synthetic scenario regenerated per repetition or a fixed dataset
// split per repetition. Exactly one must be set.
struct DataSource {
    std::optional<ScenarioConfig> scenario;
    std::optional<Dataset> fixed;

    std::string label() const;
};

struct BenchmarkReport {
    std::string dataset;
    std::size_t repetitions = 0;
    std::uint64_t master_seed = 0;
    double mw_alpha = 0.05;
    std::vector<std::string> methods;
    std::vector<std::vector<MethodScore>> scores;  // [method][repetition]
    std::map<std::string, double> mw_scores;       // "a|b" -> two-sided p
    std::map<std::string, double> mw_runtimes;
    std::vector<std::string> score_winners;    // best mean and its MW-ties
    std::vector<std::string> runtime_winners;  // fastest mean and its MW-ties
};

// M repetitions of: draw a fresh train/test pair, fit every method, score on
// the test set. Aggregates pairwise Mann-Whitney tests on scores and
// runtimes. Deterministic (timings aside) given the master seed; any
// repetition failure aborts with the method, repetition index, and cause.
BenchmarkReport run_benchmark(const std::vector<MethodSpec>& methods, const DataSource& source,
                              std::size_t M, std::uint64_t master_seed,
                              const BenchmarkOptions& options = {});

// Artifact serialization. `invocation` echoes the flags that produced the
// artifact. All timing-derived fields are grouped under the "timing" key so
// reproducibility checks can redact them in one place.
using InvocationEcho = std::vector<std::pair<std::string, std::string>>;

std::string report_to_json(const BenchmarkReport& report, const InvocationEcho& invocation = {});
std::string report_to_csv(const BenchmarkReport& report);
std::string fit_to_json(const FitResult& fit, const InvocationEcho& invocation = {});
std::string fit_summary(const FitResult& fit);

}  // namespace permreg

#endif  // PERMREG_EVAL_HPP
