#include "permreg/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "permreg/errors.hpp"
#include "permreg/rng.hpp"

namespace permreg {

using nlohmann::json;

double r2_score(const Vector& y_test, const Vector& y_pred) {
    if (y_test.size() != y_pred.size()) {
        throw InvalidInputError("r2_score: length mismatch");
    }
    const double mean = y_test.mean();
    const Vector centered = y_test.array() - mean;
    const double denom = norm2(centered);
    if (denom <= 0.0) {
        throw DegenerateDataError("r2_score: test response is constant");
    }
    return 1.0 - norm2(y_test - y_pred) / denom;
}

double r2_score_conventional(const Vector& y_test, const Vector& y_pred) {
    if (y_test.size() != y_pred.size()) {
        throw InvalidInputError("r2_score: length mismatch");
    }
    const double mean = y_test.mean();
    const double denom = (y_test.array() - mean).square().sum();
    if (denom <= 0.0) {
        throw DegenerateDataError("r2_score: test response is constant");
    }
    return 1.0 - (y_test - y_pred).squaredNorm() / denom;
}

namespace {

// Midranks of the pooled sample plus the U statistic of sample a.
struct RankedSamples {
    double u = 0.0;
    double tie_term = 0.0;  // Σ (t³ - t) over tie groups
    bool has_ties = false;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

RankedSamples rank_samples(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw InvalidInputError("mann_whitney: both samples must be nonempty");
    }
    RankedSamples ranked;
    ranked.n1 = a.size();
    ranked.n2 = b.size();

    struct Entry {
        double value;
        bool from_a;
    };
    std::vector<Entry> pooled;
    pooled.reserve(a.size() + b.size());
    for (double v : a) pooled.push_back({v, true});
    for (double v : b) pooled.push_back({v, false});
    std::stable_sort(pooled.begin(), pooled.end(),
                     [](const Entry& x, const Entry& y) { return x.value < y.value; });

    double rank_sum_a = 0.0;
    std::size_t i = 0;
    while (i < pooled.size()) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
        const std::size_t count = j - i;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        if (count > 1) {
            ranked.has_ties = true;
            const double t = static_cast<double>(count);
            ranked.tie_term += t * t * t - t;
        }
        for (std::size_t k = i; k < j; ++k) {
            if (pooled[k].from_a) rank_sum_a += midrank;
        }
        i = j;
    }
    const double n1 = static_cast<double>(ranked.n1);
    ranked.u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;
    return ranked;
}

}  // namespace

MannWhitneyResult mann_whitney_normal(const std::vector<double>& a,
                                      const std::vector<double>& b) {
    const RankedSamples ranked = rank_samples(a, b);
    const double n1 = static_cast<double>(ranked.n1);
    const double n2 = static_cast<double>(ranked.n2);
    const double n = n1 + n2;
    const double mean_u = n1 * n2 / 2.0;
    const double variance =
        n1 * n2 / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));

    MannWhitneyResult result;
    result.u = ranked.u;
    result.exact = false;
    if (variance <= 0.0) {
        // Every pooled value tied: no evidence of a difference.
        result.p_value = 1.0;
        return result;
    }
    const double z = std::max(0.0, std::abs(ranked.u - mean_u) - 0.5) / std::sqrt(variance);
    result.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return result;
}

MannWhitneyResult mann_whitney_exact(const std::vector<double>& a,
                                     const std::vector<double>& b) {
    const RankedSamples ranked = rank_samples(a, b);
    if (ranked.has_ties) {
        throw InvalidInputError("mann_whitney_exact: ties are not supported");
    }
    const std::size_t n1 = ranked.n1;
    const std::size_t n = ranked.n1 + ranked.n2;
    const double mean_u = static_cast<double>(ranked.n1 * ranked.n2) / 2.0;
    const double observed_gap = std::abs(ranked.u - mean_u);

    // Enumerate all rank subsets of size n1; the null distribution of U is
    // uniform over them.
    std::uint64_t total = 0;
    std::uint64_t at_least_as_extreme = 0;
    std::vector<std::size_t> combo(n1);
    std::iota(combo.begin(), combo.end(), 1);  // ranks are 1..n
    while (true) {
        const double rank_sum = static_cast<double>(std::accumulate(combo.begin(), combo.end(),
                                                                    std::size_t{0}));
        const double u = rank_sum - static_cast<double>(n1 * (n1 + 1)) / 2.0;
        ++total;
        if (std::abs(u - mean_u) >= observed_gap - 1e-12) ++at_least_as_extreme;

        // next combination
        std::size_t k = n1;
        while (k > 0 && combo[k - 1] == n - n1 + k) --k;
        if (k == 0) break;
        ++combo[k - 1];
        for (std::size_t j = k; j < n1; ++j) combo[j] = combo[j - 1] + 1;
    }

    MannWhitneyResult result;
    result.u = ranked.u;
    result.exact = true;
    result.p_value = static_cast<double>(at_least_as_extreme) / static_cast<double>(total);
    return result;
}

MannWhitneyResult mann_whitney(const std::vector<double>& a, const std::vector<double>& b) {
    const RankedSamples ranked = rank_samples(a, b);
    if (!ranked.has_ties && std::max(ranked.n1, ranked.n2) <= 8) {
        return mann_whitney_exact(a, b);
    }
    return mann_whitney_normal(a, b);
}

std::vector<double> default_lambda_grid() {
    std::vector<double> grid(25);
    const double lo = std::log10(1e-4);
    const double hi = std::log10(1e4);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = std::pow(10.0, lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(grid.size() - 1));
    }
    return grid;
}

RidgeCvResult ridge_cv_baseline(const Dataset& train, std::size_t folds,
                                const std::vector<double>& lambda_grid, std::uint64_t seed,
                                bool standardize_x) {
    if (folds < 2) {
        throw InvalidInputError("ridge_cv_baseline: need at least 2 folds");
    }
    if (lambda_grid.empty()) {
        throw InvalidInputError("ridge_cv_baseline: empty lambda grid");
    }
    const auto start = std::chrono::steady_clock::now();

    auto [data, meta] = standardize(train, standardize_x);
    const std::size_t n = static_cast<std::size_t>(data.n());
    if (folds > n) {
        throw InvalidInputError("ridge_cv_baseline: more folds than rows leaves empty folds");
    }

    // Seeded fold assignment: shuffled indices cut into k nearly equal parts.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> fold_members(folds);
    for (std::size_t i = 0; i < n; ++i) {
        fold_members[i % folds].push_back(order[i]);
    }

    std::vector<double> mean_error(lambda_grid.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<char> in_validation(n, 0);
        for (std::size_t idx : fold_members[f]) in_validation[idx] = 1;

        const Eigen::Index n_val = static_cast<Eigen::Index>(fold_members[f].size());
        const Eigen::Index n_fit = static_cast<Eigen::Index>(n) - n_val;
        if (n_val < 1 || n_fit < 1) {
            throw InvalidInputError("ridge_cv_baseline: empty fold");
        }
        Matrix x_fit(n_fit, data.p()), x_val(n_val, data.p());
        Vector y_fit(n_fit), y_val(n_val);
        Eigen::Index fit_row = 0, val_row = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (in_validation[i]) {
                x_val.row(val_row) = data.X.row(static_cast<Eigen::Index>(i));
                y_val(val_row++) = data.Y(static_cast<Eigen::Index>(i));
            } else {
                x_fit.row(fit_row) = data.X.row(static_cast<Eigen::Index>(i));
                y_fit(fit_row++) = data.Y(static_cast<Eigen::Index>(i));
            }
        }

        const Matrix gram = x_fit.transpose() * x_fit;
        const Vector xty = x_fit.transpose() * y_fit;
        for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
            Matrix A = gram;
            A.diagonal().array() += lambda_grid[g];
            const Vector beta = CholeskyFactor(A).solve(xty);
            mean_error[g] += norm2(y_val - x_val * beta) / static_cast<double>(folds);
        }
    }

    std::size_t best = 0;
    for (std::size_t g = 1; g < lambda_grid.size(); ++g) {
        if (mean_error[g] < mean_error[best]) best = g;
    }

    RidgeCvResult result;
    result.lambda = lambda_grid[best];
    result.beta = beta_ridge(result.lambda, data.X, data.Y);
    result.meta = meta;
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::string method_name(MethodKind kind) {
    switch (kind) {
        case MethodKind::Bkk:
            return "bkk";
        case MethodKind::Sbkk:
            return "sbkk";
        case MethodKind::Abkk:
            return "abkk";
        case MethodKind::RidgeCv:
            return "ridgecv";
        case MethodKind::Ols:
            return "ols";
    }
    return "bkk";
}

MethodKind method_from_name(const std::string& name) {
    if (name == "bkk") return MethodKind::Bkk;
    if (name == "sbkk") return MethodKind::Sbkk;
    if (name == "abkk") return MethodKind::Abkk;
    if (name == "ridgecv") return MethodKind::RidgeCv;
    if (name == "ols") return MethodKind::Ols;
    throw InvalidInputError("unknown method '" + name +
                            "' (expected bkk, sbkk, abkk, ridgecv or ols)");
}

std::string DataSource::label() const {
    if (scenario) {
        std::ostringstream out;
        out << "scenario-" << scenario_name(scenario->scenario) << "-sigma" << scenario->sigma;
        return out.str();
    }
    if (fixed) {
        return fixed->name.empty() ? "dataset" : fixed->name;
    }
    return "unset";
}

namespace {

MethodScore score_method(const MethodSpec& method, const Dataset& train_ds,
                         const Dataset& test_ds, std::uint64_t fit_seed,
                         const BenchmarkOptions& options) {
    MethodScore score;
    Vector predictions;
    switch (method.kind) {
        case MethodKind::Bkk:
        case MethodKind::Sbkk:
        case MethodKind::Abkk: {
            const FamilyTag family = method.kind == MethodKind::Bkk ? FamilyTag::Ridge
                                     : method.kind == MethodKind::Sbkk
                                         ? FamilyTag::SparseRidge
                                         : FamilyTag::Aggregated;
            const FitResult fit = train(family, train_ds.X, train_ds.Y, options.adam, options.T,
                                        fit_seed, options.train);
            score.runtime_seconds = fit.wall_time_seconds;
            score.iterations = fit.iterations;
            if (family != FamilyTag::Ridge) {
                const Vector gates =
                    sparsifier_gates(fit.theta_hat.kappa, fit.theta_hat.gamma,
                                     options.train.normalized_spread);
                score.sparsity_selected = sparsity_report(gates).selected_in;
            }
            predictions = predict(fit.beta_hat, test_ds.X, fit.meta);
            break;
        }
        case MethodKind::RidgeCv: {
            const std::vector<double>& grid =
                options.lambda_grid.empty() ? default_lambda_grid() : options.lambda_grid;
            const RidgeCvResult fit = ridge_cv_baseline(train_ds, options.cv_folds, grid,
                                                        fit_seed, options.train.standardize_x);
            score.runtime_seconds = fit.runtime_seconds;
            predictions = predict(fit.beta, test_ds.X, fit.meta);
            break;
        }
        case MethodKind::Ols: {
            const auto start = std::chrono::steady_clock::now();
            auto [data, meta] = standardize(train_ds, options.train.standardize_x);
            const Vector beta = data.X.colPivHouseholderQr().solve(data.Y);
            score.runtime_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            predictions = predict(beta, test_ds.X, meta);
            break;
        }
    }
    score.r2 = r2_score(test_ds.Y, predictions);
    score.r2_conventional = r2_score_conventional(test_ds.Y, predictions);
    return score;
}

std::vector<MethodScore> run_repetition(const std::vector<MethodSpec>& methods,
                                        const DataSource& source, std::size_t repetition,
                                        std::uint64_t master_seed,
                                        const BenchmarkOptions& options) {
    const std::uint64_t data_seed = derive_seed(master_seed, 2 * repetition);
    const std::uint64_t fit_seed = derive_seed(master_seed, 2 * repetition + 1);

    Dataset train_ds, test_ds;
    if (source.scenario) {
        ScenarioConfig cfg = *source.scenario;
        cfg.seed = data_seed;
        ScenarioData generated = generate_scenario(cfg);
        train_ds = std::move(generated.train);
        test_ds = std::move(generated.test);
    } else {
        auto parts = split(*source.fixed, options.test_fraction, data_seed);
        train_ds = std::move(parts.first);
        test_ds = std::move(parts.second);
    }

    std::vector<MethodScore> scores;
    scores.reserve(methods.size());
    for (const MethodSpec& method : methods) {
        try {
            scores.push_back(score_method(method, train_ds, test_ds, fit_seed, options));
        } catch (const std::exception& e) {
            throw std::runtime_error("benchmark repetition " + std::to_string(repetition) +
                                     ", method '" + method.label + "': " + e.what());
        }
    }
    return scores;
}

std::string pair_key(const std::string& a, const std::string& b) { return a + "|" + b; }

std::vector<std::string> pick_winners(const std::vector<std::string>& methods,
                                      const std::vector<std::vector<double>>& samples,
                                      const std::map<std::string, double>& p_values,
                                      double alpha, bool higher_is_better) {
    std::size_t best = 0;
    double best_mean = std::accumulate(samples[0].begin(), samples[0].end(), 0.0) /
                       static_cast<double>(samples[0].size());
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double mean = std::accumulate(samples[i].begin(), samples[i].end(), 0.0) /
                            static_cast<double>(samples[i].size());
        if ((higher_is_better && mean > best_mean) || (!higher_is_better && mean < best_mean)) {
            best = i;
            best_mean = mean;
        }
    }
    std::vector<std::string> winners;
    for (std::size_t i = 0; i < methods.size(); ++i) {
        if (i == best) {
            winners.push_back(methods[i]);
            continue;
        }
        const std::string key = i < best ? pair_key(methods[i], methods[best])
                                         : pair_key(methods[best], methods[i]);
        const auto it = p_values.find(key);
        if (it != p_values.end() && it->second >= alpha) {
            winners.push_back(methods[i]);  // statistically indistinguishable from the best
        }
    }
    return winners;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<MethodSpec>& methods, const DataSource& source,
                              std::size_t M, std::uint64_t master_seed,
                              const BenchmarkOptions& options) {
    if (M < 2) {
        throw InvalidInputError("run_benchmark: need at least 2 repetitions");
    }
    if (methods.empty()) {
        throw InvalidInputError("run_benchmark: no methods given");
    }
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            if (methods[i].label == methods[j].label) {
                throw InvalidInputError("run_benchmark: duplicate method label '" +
                                        methods[i].label + "'");
            }
        }
    }
    if (static_cast<bool>(source.scenario) == static_cast<bool>(source.fixed)) {
        throw InvalidInputError("run_benchmark: exactly one data source must be set");
    }

    std::vector<std::vector<MethodScore>> by_repetition(M);
    const std::size_t jobs = std::max<std::size_t>(1, options.jobs);
    if (jobs == 1) {
        for (std::size_t m = 0; m < M; ++m) {
            by_repetition[m] = run_repetition(methods, source, m, master_seed, options);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(M);
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < std::min(jobs, M); ++w) {
            workers.emplace_back([&]() {
                for (std::size_t m = next.fetch_add(1); m < M; m = next.fetch_add(1)) {
                    try {
                        by_repetition[m] = run_repetition(methods, source, m, master_seed, options);
                    } catch (...) {
                        errors[m] = std::current_exception();
                    }
                }
            });
        }
        for (auto& worker : workers) worker.join();
        for (std::size_t m = 0; m < M; ++m) {
            if (errors[m]) std::rethrow_exception(errors[m]);
        }
    }

    BenchmarkReport report;
    report.dataset = source.label();
    report.repetitions = M;
    report.master_seed = master_seed;
    report.mw_alpha = options.mw_alpha;
    for (const MethodSpec& method : methods) report.methods.push_back(method.label);
    report.scores.assign(methods.size(), {});
    for (std::size_t i = 0; i < methods.size(); ++i) {
        report.scores[i].reserve(M);
        for (std::size_t m = 0; m < M; ++m) {
            report.scores[i].push_back(by_repetition[m][i]);
        }
    }

    std::vector<std::vector<double>> r2_samples(methods.size()), runtime_samples(methods.size());
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (const MethodScore& s : report.scores[i]) {
            r2_samples[i].push_back(s.r2);
            runtime_samples[i].push_back(s.runtime_seconds);
        }
    }
    for (std::size_t i = 0; i < methods.size(); ++i) {
        for (std::size_t j = i + 1; j < methods.size(); ++j) {
            const std::string key = pair_key(report.methods[i], report.methods[j]);
            report.mw_scores[key] = mann_whitney(r2_samples[i], r2_samples[j]).p_value;
            report.mw_runtimes[key] = mann_whitney(runtime_samples[i], runtime_samples[j]).p_value;
        }
    }
    report.score_winners = pick_winners(report.methods, r2_samples, report.mw_scores,
                                        options.mw_alpha, /*higher_is_better=*/true);
    report.runtime_winners = pick_winners(report.methods, runtime_samples, report.mw_runtimes,
                                          options.mw_alpha, /*higher_is_better=*/false);
    return report;
}

namespace {

json invocation_to_json(const InvocationEcho& invocation) {
    json echo = json::object();
    for (const auto& [key, value] : invocation) echo[key] = value;
    return echo;
}

}  // namespace

std::string report_to_json(const BenchmarkReport& report, const InvocationEcho& invocation) {
    json out;
    out["dataset"] = report.dataset;
    out["M"] = report.repetitions;
    out["master_seed"] = report.master_seed;
    out["alpha"] = report.mw_alpha;
    out["methods"] = report.methods;

    json scores = json::array(), conventional = json::array(), runtimes = json::array();
    json iterations = json::array(), sparsity = json::array();
    for (const auto& method_scores : report.scores) {
        json s = json::array(), c = json::array(), r = json::array(), it = json::array(),
             sp = json::array();
        for (const MethodScore& score : method_scores) {
            s.push_back(score.r2);
            c.push_back(score.r2_conventional);
            r.push_back(score.runtime_seconds);
            it.push_back(score.iterations ? json(*score.iterations) : json(nullptr));
            sp.push_back(score.sparsity_selected ? json(*score.sparsity_selected)
                                                 : json(nullptr));
        }
        scores.push_back(std::move(s));
        conventional.push_back(std::move(c));
        runtimes.push_back(std::move(r));
        iterations.push_back(std::move(it));
        sparsity.push_back(std::move(sp));
    }
    out["scores"] = std::move(scores);
    out["scores_conventional"] = std::move(conventional);
    out["runtimes"] = std::move(runtimes);
    out["iterations"] = std::move(iterations);
    out["sparsity_selected"] = std::move(sparsity);
    out["mw"]["scores"] = report.mw_scores;
    out["mw"]["runtimes"] = report.mw_runtimes;
    out["winners"]["scores"] = report.score_winners;
    out["winners"]["runtimes"] = report.runtime_winners;
    if (!invocation.empty()) out["invocation"] = invocation_to_json(invocation);
    return out.dump(2) + "\n";
}

std::string report_to_csv(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "repetition,method,r2,r2_conventional,runtime_seconds,iterations,sparsity_selected\n";
    char buffer[40];
    const auto fmt = [&buffer](double v) {
        std::snprintf(buffer, sizeof(buffer), "%.17g", v);
        return std::string(buffer);
    };
    for (std::size_t m = 0; m < report.repetitions; ++m) {
        for (std::size_t i = 0; i < report.methods.size(); ++i) {
            const MethodScore& score = report.scores[i][m];
            out << m << ',' << report.methods[i] << ',' << fmt(score.r2) << ','
                << fmt(score.r2_conventional) << ',' << fmt(score.runtime_seconds) << ',';
            if (score.iterations) out << *score.iterations;
            out << ',';
            if (score.sparsity_selected) out << *score.sparsity_selected;
            out << '\n';
        }
    }
    return out.str();
}

std::string fit_to_json(const FitResult& fit, const InvocationEcho& invocation) {
    json out;
    out["family"] = family_name(fit.family);
    out["seed"] = fit.seed;
    out["T"] = fit.T;
    out["iterations"] = fit.iterations;
    out["converged"] = fit.converged;

    json theta;
    theta["lambda"] = fit.theta_hat.lambda;
    if (fit.family != FamilyTag::Ridge) {
        theta["kappa"] = fit.theta_hat.kappa;
        theta["gamma"] = std::vector<double>(fit.theta_hat.gamma.data(),
                                             fit.theta_hat.gamma.data() + fit.theta_hat.gamma.size());
    }
    if (fit.family == FamilyTag::Aggregated) {
        theta["mu"] = fit.theta_hat.mu;
    }
    out["theta"] = std::move(theta);
    out["beta_standardized"] =
        std::vector<double>(fit.beta_hat.data(), fit.beta_hat.data() + fit.beta_hat.size());
    out["standardization"] = {
        {"x_mean", std::vector<double>(fit.meta.x_mean.data(),
                                       fit.meta.x_mean.data() + fit.meta.x_mean.size())},
        {"x_scale", std::vector<double>(fit.meta.x_scale.data(),
                                        fit.meta.x_scale.data() + fit.meta.x_scale.size())},
        {"y_mean", fit.meta.y_mean},
        {"y_scale", fit.meta.y_scale},
    };
    out["criterion_trace"] = fit.criterion_trace;
    out["work"] = {
        {"evaluations", fit.work.evaluations},
        {"forward_fits", fit.work.forward_fits},
        {"factorizations", fit.work.factorizations},
        {"forward_solves", fit.work.forward_solves},
        {"gradient_solves", fit.work.gradient_solves},
    };
    if (fit.family != FamilyTag::Ridge) {
        const Vector gates = sparsifier_gates(fit.theta_hat.kappa, fit.theta_hat.gamma);
        const SparsityReport sparsity = sparsity_report(gates);
        out["sparsity"] = {
            {"selected_in", sparsity.selected_in},
            {"selected_out", sparsity.selected_out},
            {"undecided", sparsity.undecided},
        };
    }
    out["timing"] = {{"wall_time_seconds", fit.wall_time_seconds}};
    if (!invocation.empty()) out["invocation"] = invocation_to_json(invocation);
    return out.dump(2) + "\n";
}

std::string fit_summary(const FitResult& fit) {
    std::ostringstream out;
    out << "family:      " << family_name(fit.family) << "\n"
        << "seed:        " << fit.seed << "\n"
        << "T:           " << fit.T << "\n"
        << "iterations:  " << fit.iterations << (fit.converged ? " (converged)" : " (budget)")
        << "\n"
        << "criterion:   " << (fit.criterion_trace.empty() ? 0.0 : fit.criterion_trace.back())
        << "\n"
        << "lambda:      " << fit.theta_hat.lambda << "\n";
    if (fit.family != FamilyTag::Ridge) {
        const Vector gates = sparsifier_gates(fit.theta_hat.kappa, fit.theta_hat.gamma);
        const SparsityReport sparsity = sparsity_report(gates);
        out << "kappa:       " << fit.theta_hat.kappa << "\n"
            << "gates in/out/undecided: " << sparsity.selected_in << "/" << sparsity.selected_out
            << "/" << sparsity.undecided << "\n";
    }
    if (fit.family == FamilyTag::Aggregated) {
        out << "mu:          " << fit.theta_hat.mu << " (ridge weight " << sigmoid(fit.theta_hat.mu)
            << ")\n";
    }
    out << "wall time:   " << fit.wall_time_seconds << " s\n"
        << "work:        " << fit.work.evaluations << " evaluations, " << fit.work.forward_fits
        << " forward fits\n";
    return out.str();
}

}  // namespace permreg
