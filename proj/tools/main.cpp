// permreg command-line tool: train the permutation-regularized estimators,
// benchmark them against baselines, generate synthetic scenarios, and verify
// criterion gradients against finite differences.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <permreg/criterion.hpp>
#include <permreg/data.hpp>
#include <permreg/errors.hpp>
#include <permreg/eval.hpp>
#include <permreg/optimizer.hpp>
#include <permreg/rng.hpp>

using namespace permreg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitVerificationFailed = 2;

struct DataOptions {
    std::string scenario;
    std::string csv_path;
    std::string target = "y";
    std::string delimiter = ",";
    std::size_t n_train = 100;
    std::size_t n_test = 1000;
    std::size_t p = 80;
    double sigma = 10.0;
    double rho = -1.0;
    std::size_t sparsity = 10;
    bool wide = false;
};

struct OptimOptions {
    AdamConfig adam;
    std::string stop_rule = "value";
    bool no_standardize_x = false;
    bool kink_zero = false;
    bool normalized_spread = false;
    double guard_eps = 1e-12;
};

void add_data_flags(CLI::App* cmd, DataOptions& opt, bool with_sizes) {
    cmd->add_option("--scenario", opt.scenario, "Synthetic scenario: A, B or C");
    cmd->add_option("--csv", opt.csv_path, "CSV input file (numeric, header row)");
    cmd->add_option("--target", opt.target, "Target column name for --csv (default y)");
    cmd->add_option("--delimiter", opt.delimiter, "CSV delimiter (default ,)");
    if (with_sizes) {
        cmd->add_option("--n-train", opt.n_train, "Scenario train size (default 100)");
        cmd->add_option("--n-test", opt.n_test, "Scenario test size (default 1000)");
        cmd->add_option("--p", opt.p, "Scenario feature count (default 80)");
        cmd->add_option("--sigma", opt.sigma, "Scenario noise std (default 10)");
        cmd->add_option("--rho", opt.rho, "Feature correlation (default per scenario)");
        cmd->add_option("--sparsity", opt.sparsity, "Nonzero coefficients in B/C (default 10)");
        cmd->add_flag("--wide", opt.wide, "Preset for n < p data (n-train 50, p 200)");
    }
}

void add_optim_flags(CLI::App* cmd, OptimOptions& opt) {
    cmd->add_option("--lr", opt.adam.learning_rate, "ADAM learning rate (default 0.5)");
    cmd->add_option("--beta1", opt.adam.beta1, "ADAM beta1 (default 0.5)");
    cmd->add_option("--beta2", opt.adam.beta2, "ADAM beta2 (default 0.9)");
    cmd->add_option("--adam-eps", opt.adam.eps, "ADAM epsilon (default 1e-8)");
    cmd->add_option("--tol", opt.adam.tolerance, "Stopping tolerance (default 1e-4)");
    cmd->add_option("--max-iter", opt.adam.max_iter, "Iteration budget (default 1000)");
    cmd->add_option("--stop-rule", opt.stop_rule,
                    "Stopping metric: value, grad or theta (default value)");
    cmd->add_flag("--no-standardize-x", opt.no_standardize_x,
                  "Keep X columns on their raw scale");
    cmd->add_flag("--kink-zero", opt.kink_zero,
                  "Use a zero subgradient at criterion kinks instead of retrying");
    cmd->add_flag("--normalized-spread", opt.normalized_spread,
                  "Divide the sparsifier spread by p (experimentation knob)");
    cmd->add_option("--guard-eps", opt.guard_eps, "Differentiability guard (default 1e-12)");
}

StopRule parse_stop_rule(const std::string& name) {
    if (name == "value") return StopRule::ValueChange;
    if (name == "grad") return StopRule::GradNorm;
    if (name == "theta") return StopRule::ThetaChange;
    throw InvalidInputError("unknown stop rule '" + name + "' (expected value, grad or theta)");
}

char parse_delimiter(const std::string& text) {
    if (text.size() != 1) {
        throw InvalidInputError("delimiter must be a single character");
    }
    return text[0];
}

void apply_wide_preset(DataOptions& data, const CLI::App* cmd) {
    if (!data.wide) return;
    if (cmd->count("--n-train") == 0) data.n_train = 50;
    if (cmd->count("--p") == 0) data.p = 200;
}

ScenarioConfig scenario_config(const DataOptions& data, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.scenario = scenario_from_name(data.scenario);
    cfg.n_train = data.n_train;
    cfg.n_test = data.n_test;
    cfg.p = data.p;
    cfg.sigma = data.sigma;
    cfg.rho = data.rho;
    cfg.sparsity = data.sparsity;
    cfg.seed = seed;
    return cfg;
}

TrainOptions train_options(const OptimOptions& optim) {
    TrainOptions options;
    options.standardize_x = !optim.no_standardize_x;
    options.guard_eps = optim.guard_eps;
    options.kink_subgradient_zero = optim.kink_zero;
    options.normalized_spread = optim.normalized_spread;
    return options;
}

AdamConfig adam_config(const OptimOptions& optim) {
    AdamConfig cfg = optim.adam;
    cfg.stop_rule = parse_stop_rule(optim.stop_rule);
    return cfg;
}

std::vector<std::size_t> parse_t_list(const std::string& text) {
    std::vector<std::size_t> values;
    std::stringstream stream(text);
    std::string token;
    while (std::getline(stream, token, ',')) {
        if (token.empty()) continue;
        values.push_back(static_cast<std::size_t>(std::stoull(token)));
    }
    if (values.empty()) {
        throw InvalidInputError("--T needs at least one value");
    }
    return values;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInputError("cannot write '" + path.string() + "'");
    }
    out << contents;
}

std::string format_number(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%g", v);
    return buffer;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainCmd {
    DataOptions data;
    OptimOptions optim;
    std::string family = "bkk";
    std::size_t T = 30;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

int run_train(const TrainCmd& cmd) {
    Dataset train_ds;
    if (!cmd.data.scenario.empty()) {
        train_ds = generate_scenario(scenario_config(cmd.data, cmd.seed)).train;
    } else if (!cmd.data.csv_path.empty()) {
        std::size_t dropped = 0;
        train_ds = load_csv(cmd.data.csv_path, cmd.data.target,
                            parse_delimiter(cmd.data.delimiter), &dropped);
        if (dropped > 0) {
            std::cerr << "note: dropped " << dropped << " rows with missing values\n";
        }
    } else {
        throw InvalidInputError("train needs --scenario or --csv");
    }

    const FamilyTag family = family_from_name(cmd.family);
    const FitResult fit = train(family, train_ds.X, train_ds.Y, adam_config(cmd.optim), cmd.T,
                                cmd.seed, train_options(cmd.optim));

    InvocationEcho echo{
        {"command", "train"},
        {"family", cmd.family},
        {"T", std::to_string(cmd.T)},
        {"seed", std::to_string(cmd.seed)},
        {"lr", format_number(cmd.optim.adam.learning_rate)},
        {"beta1", format_number(cmd.optim.adam.beta1)},
        {"beta2", format_number(cmd.optim.adam.beta2)},
        {"tol", format_number(cmd.optim.adam.tolerance)},
        {"max-iter", std::to_string(cmd.optim.adam.max_iter)},
        {"stop-rule", cmd.optim.stop_rule},
        {"standardize-x", cmd.optim.no_standardize_x ? "false" : "true"},
    };
    if (!cmd.data.scenario.empty()) {
        echo.emplace_back("scenario", cmd.data.scenario);
        echo.emplace_back("n-train", std::to_string(cmd.data.n_train));
        echo.emplace_back("p", std::to_string(cmd.data.p));
        echo.emplace_back("sigma", format_number(cmd.data.sigma));
    } else {
        echo.emplace_back("csv", cmd.data.csv_path);
        echo.emplace_back("target", cmd.data.target);
    }

    std::filesystem::create_directories(cmd.out_dir);
    const std::filesystem::path out(cmd.out_dir);
    write_file(out / "fit.json", fit_to_json(fit, echo));
    write_file(out / "fit_summary.txt", fit_summary(fit));
    std::cout << fit_summary(fit);
    std::cout << "wrote " << (out / "fit.json").string() << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// benchmark
// ---------------------------------------------------------------------------

struct BenchmarkCmd {
    DataOptions data;
    OptimOptions optim;
    std::string methods = "bkk,ridgecv";
    std::string t_values = "30";
    bool sweep_t = false;
    std::size_t repetitions = 100;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::size_t folds = 5;
    double test_fraction = 0.2;
    bool conventional_r2 = false;
    std::string out_dir = ".";
};

int run_benchmark_cmd(const BenchmarkCmd& cmd) {
    std::vector<MethodSpec> methods;
    {
        std::stringstream stream(cmd.methods);
        std::string token;
        while (std::getline(stream, token, ',')) {
            if (token.empty()) continue;
            methods.push_back({token, method_from_name(token)});
        }
    }
    if (methods.empty()) {
        throw InvalidInputError("--methods needs at least one method");
    }

    DataSource source;
    if (!cmd.data.scenario.empty()) {
        source.scenario = scenario_config(cmd.data, 0);
    } else if (!cmd.data.csv_path.empty()) {
        std::size_t dropped = 0;
        source.fixed = load_csv(cmd.data.csv_path, cmd.data.target,
                                parse_delimiter(cmd.data.delimiter), &dropped);
        if (dropped > 0) {
            std::cerr << "note: dropped " << dropped << " rows with missing values\n";
        }
    } else {
        throw InvalidInputError("benchmark needs --scenario or --csv");
    }

    const std::vector<std::size_t> t_values = parse_t_list(cmd.t_values);
    if (!cmd.sweep_t && t_values.size() != 1) {
        throw InvalidInputError("pass --sweep-T to benchmark several T values");
    }

    BenchmarkOptions options;
    options.adam = adam_config(cmd.optim);
    options.train = train_options(cmd.optim);
    options.cv_folds = cmd.folds;
    options.test_fraction = cmd.test_fraction;
    options.jobs = cmd.jobs;

    std::filesystem::create_directories(cmd.out_dir);
    const std::filesystem::path out(cmd.out_dir);

    for (std::size_t T : t_values) {
        options.T = T;
        const BenchmarkReport report =
            run_benchmark(methods, source, cmd.repetitions, cmd.seed, options);

        InvocationEcho echo{
            {"command", "benchmark"},
            {"methods", cmd.methods},
            {"M", std::to_string(cmd.repetitions)},
            {"T", std::to_string(T)},
            {"seed", std::to_string(cmd.seed)},
            {"jobs", std::to_string(cmd.jobs)},
            {"folds", std::to_string(cmd.folds)},
            {"dataset", report.dataset},
        };

        const std::string stem = cmd.sweep_t ? "report_T" + std::to_string(T) : "report";
        write_file(out / (stem + ".json"), report_to_json(report, echo));
        write_file(out / (stem + ".csv"), report_to_csv(report));

        std::cout << "dataset " << report.dataset << ", M=" << report.repetitions
                  << ", T=" << T << "\n";
        for (std::size_t i = 0; i < report.methods.size(); ++i) {
            double mean_r2 = 0.0, mean_conv = 0.0, mean_rt = 0.0;
            for (const MethodScore& s : report.scores[i]) {
                mean_r2 += s.r2;
                mean_conv += s.r2_conventional;
                mean_rt += s.runtime_seconds;
            }
            const double M = static_cast<double>(report.repetitions);
            std::cout << "  " << report.methods[i] << ": mean R2 " << mean_r2 / M;
            if (cmd.conventional_r2) {
                std::cout << " (conventional " << mean_conv / M << ")";
            }
            std::cout << ", mean fit time " << mean_rt / M << " s\n";
        }
        std::cout << "  best R2: ";
        for (const std::string& w : report.score_winners) std::cout << w << " ";
        std::cout << "| fastest: ";
        for (const std::string& w : report.runtime_winners) std::cout << w << " ";
        std::cout << "\n  wrote " << (out / (stem + ".json")).string() << "\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// synthetic
// ---------------------------------------------------------------------------

struct SyntheticCmd {
    DataOptions data;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

int run_synthetic(const SyntheticCmd& cmd) {
    if (cmd.data.scenario.empty()) {
        throw InvalidInputError("synthetic needs --scenario");
    }
    const ScenarioConfig cfg = scenario_config(cmd.data, cmd.seed);
    const ScenarioData generated = generate_scenario(cfg);

    std::filesystem::create_directories(cmd.out_dir);
    const std::filesystem::path out(cmd.out_dir);
    write_csv((out / "train.csv").string(), generated.train);
    write_csv((out / "test.csv").string(), generated.test);

    std::ostringstream truth;
    truth << "{\n  \"scenario\": \"" << scenario_name(cfg.scenario) << "\",\n"
          << "  \"n_train\": " << cfg.n_train << ",\n"
          << "  \"n_test\": " << cfg.n_test << ",\n"
          << "  \"p\": " << cfg.p << ",\n"
          << "  \"sigma\": " << cfg.sigma << ",\n"
          << "  \"rho\": " << cfg.effective_rho() << ",\n"
          << "  \"seed\": " << cfg.seed << ",\n  \"beta_star\": [";
    for (Eigen::Index j = 0; j < generated.beta_star.size(); ++j) {
        truth << (j ? ", " : "") << generated.beta_star(j);
    }
    truth << "]\n}\n";
    write_file(out / "truth.json", truth.str());

    std::cout << "wrote " << (out / "train.csv").string() << " ("
              << generated.train.X.rows() << "x" << generated.train.X.cols() << "), "
              << (out / "test.csv").string() << " (" << generated.test.X.rows() << "x"
              << generated.test.X.cols() << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// gradcheck
// ---------------------------------------------------------------------------

struct GradcheckCmd {
    std::string family = "bkk";
    std::size_t draws = 20;
    std::size_t n = 30;
    std::size_t p = 6;
    std::size_t T = 10;
    std::uint64_t seed = 0;
    bool corrupt = false;  // negative-control hook for tests
};

int run_gradcheck(const GradcheckCmd& cmd) {
    const FamilyTag family = family_from_name(cmd.family);

    Rng rng(derive_seed(cmd.seed, 42));
    Dataset raw;
    raw.X = Matrix(cmd.n, cmd.p);
    raw.Y = Vector(cmd.n);
    for (std::size_t i = 0; i < cmd.n; ++i) {
        raw.Y(static_cast<Eigen::Index>(i)) = rng.normal();
        for (std::size_t j = 0; j < cmd.p; ++j) {
            raw.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
        }
    }
    const Dataset data = standardize(raw).first;

    CriterionSpec spec;
    spec.family = family;
    spec.perms = make_permutations(cmd.n, cmd.T, derive_seed(cmd.seed, 1));

    const auto fd_step = [](double v) { return 1e-5 * (1.0 + std::abs(v)); };
    const auto rel_err = [](double a, double f) {
        return std::abs(a - f) / std::max({std::abs(a), std::abs(f), 1e-6});
    };

    double worst = 0.0;
    std::string worst_label;
    std::printf("%-6s %-10s %14s %14s %10s\n", "draw", "component", "analytic", "fd", "rel");
    for (std::size_t draw = 0; draw < cmd.draws; ++draw) {
        RegParams theta = default_params(static_cast<Eigen::Index>(cmd.p));
        theta.lambda = std::pow(10.0, rng.uniform(-2.0, 4.0));
        theta.kappa = std::pow(10.0, rng.uniform(-2.0, 1.0));
        for (Eigen::Index j = 0; j < theta.gamma.size(); ++j) theta.gamma(j) = 1.5 * rng.normal();
        theta.mu = rng.uniform(-3.0, 3.0);

        CriterionGradient analytic = criterion_gradient(spec, theta, data.X, data.Y);
        if (cmd.corrupt) {
            analytic.d_lambda += 1e-2 * (1.0 + std::abs(analytic.d_lambda));
        }

        const auto fd_of = [&](RegParams plus, RegParams minus, double h) {
            return (bkks_value(spec, plus, data.X, data.Y) -
                    bkks_value(spec, minus, data.X, data.Y)) /
                   (2.0 * h);
        };
        const auto report = [&](const std::string& label, double a, double f) {
            const double rel = rel_err(a, f);
            std::printf("%-6zu %-10s %14.6e %14.6e %10.2e%s\n", draw, label.c_str(), a, f, rel,
                        rel > 1e-3 ? "  <-- FAIL" : "");
            if (rel > worst) {
                worst = rel;
                worst_label = "draw " + std::to_string(draw) + " " + label;
            }
        };

        {
            const double h = fd_step(theta.lambda);
            RegParams plus = theta, minus = theta;
            plus.lambda += h;
            minus.lambda -= h;
            report("lambda", analytic.d_lambda, fd_of(plus, minus, h));
        }
        if (family != FamilyTag::Ridge) {
            const double h = fd_step(theta.kappa);
            RegParams plus = theta, minus = theta;
            plus.kappa += h;
            minus.kappa -= h;
            report("kappa", analytic.d_kappa, fd_of(plus, minus, h));
            for (Eigen::Index j = 0; j < theta.gamma.size(); ++j) {
                const double hg = fd_step(theta.gamma(j));
                RegParams gp = theta, gm = theta;
                gp.gamma(j) += hg;
                gm.gamma(j) -= hg;
                report("gamma" + std::to_string(j), analytic.d_gamma(j), fd_of(gp, gm, hg));
            }
        }
        if (family == FamilyTag::Aggregated) {
            const double h = fd_step(theta.mu);
            RegParams plus = theta, minus = theta;
            plus.mu += h;
            minus.mu -= h;
            report("mu", analytic.d_mu, fd_of(plus, minus, h));
        }
    }

    std::printf("worst relative error: %.3e (%s)\n", worst, worst_label.c_str());
    if (worst > 1e-3) {
        std::printf("FAIL: gradient check exceeded 1e-3\n");
        return kExitVerificationFailed;
    }
    std::printf("PASS: all components within 1e-3 of finite differences\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Permutation-regularized linear regression toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a key=value file");

    TrainCmd train_cmd;
    CLI::App* train_app = app.add_subcommand("train", "Fit one estimator family");
    add_data_flags(train_app, train_cmd.data, true);
    add_optim_flags(train_app, train_cmd.optim);
    train_app->add_option("--family", train_cmd.family, "bkk, sbkk or abkk (default bkk)");
    train_app->add_option("--T", train_cmd.T, "Number of permutations (default 30)");
    train_app->add_option("--seed", train_cmd.seed, "Master seed (default 0)");
    train_app->add_option("--out", train_cmd.out_dir, "Output directory (default .)");

    BenchmarkCmd bench_cmd;
    CLI::App* bench_app = app.add_subcommand("benchmark", "Compare methods over repetitions");
    add_data_flags(bench_app, bench_cmd.data, true);
    add_optim_flags(bench_app, bench_cmd.optim);
    bench_app->add_option("--methods", bench_cmd.methods,
                          "Comma list of bkk,sbkk,abkk,ridgecv,ols (default bkk,ridgecv)");
    bench_app->add_option("--M", bench_cmd.repetitions, "Repetitions (default 100, minimum 2)");
    bench_app->add_option("--T", bench_cmd.t_values,
                          "Permutation count, or comma list with --sweep-T (default 30)");
    bench_app->add_flag("--sweep-T", bench_cmd.sweep_t, "One report per value in --T");
    bench_app->add_option("--seed", bench_cmd.seed, "Master seed (default 0)");
    bench_app->add_option("--jobs", bench_cmd.jobs, "Parallel repetitions (default 1)");
    bench_app->add_option("--folds", bench_cmd.folds, "ridgecv folds (default 5)");
    bench_app->add_option("--test-fraction", bench_cmd.test_fraction,
                          "Test fraction for --csv sources (default 0.2)");
    bench_app->add_flag("--conventional-r2", bench_cmd.conventional_r2,
                        "Also print conventional (squared-norm) R2 means");
    bench_app->add_option("--out", bench_cmd.out_dir, "Output directory (default .)");

    SyntheticCmd synth_cmd;
    CLI::App* synth_app = app.add_subcommand("synthetic", "Write scenario data to CSV");
    add_data_flags(synth_app, synth_cmd.data, true);
    synth_app->add_option("--seed", synth_cmd.seed, "Master seed (default 0)");
    synth_app->add_option("--out", synth_cmd.out_dir, "Output directory (default .)");

    GradcheckCmd grad_cmd;
    CLI::App* grad_app =
        app.add_subcommand("gradcheck", "Verify criterion gradients against finite differences");
    grad_app->add_option("--family", grad_cmd.family, "bkk, sbkk or abkk (default bkk)");
    grad_app->add_option("--draws", grad_cmd.draws, "Random parameter draws (default 20)");
    grad_app->add_option("--n", grad_cmd.n, "Rows of the check instance (default 30)");
    grad_app->add_option("--p", grad_cmd.p, "Features of the check instance (default 6)");
    grad_app->add_option("--T", grad_cmd.T, "Permutations in the criterion (default 10)");
    grad_app->add_option("--seed", grad_cmd.seed, "Master seed (default 0)");
    grad_app->add_flag("--corrupt-gradient", grad_cmd.corrupt,
                       "Deliberately corrupt one component (negative control)")
        ->group("");  // hidden

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train_app) return run_train(train_cmd);
        if (*bench_app) return run_benchmark_cmd(bench_cmd);
        if (*synth_app) return run_synthetic(synth_cmd);
        if (*grad_app) return run_gradcheck(grad_cmd);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
