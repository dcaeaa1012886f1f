#include "permreg/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "permreg/errors.hpp"
#include "permreg/rng.hpp"

namespace permreg {

std::string scenario_name(Scenario s) {
    switch (s) {
        case Scenario::A:
            return "A";
        case Scenario::B:
            return "B";
        case Scenario::C:
            return "C";
    }
    return "B";
}

Scenario scenario_from_name(const std::string& name) {
    if (name == "A" || name == "a") return Scenario::A;
    if (name == "B" || name == "b") return Scenario::B;
    if (name == "C" || name == "c") return Scenario::C;
    throw InvalidInputError("unknown scenario '" + name + "' (expected A, B or C)");
}

double ScenarioConfig::effective_rho() const {
    if (rho >= 0.0) return rho;
    return scenario == Scenario::B ? 0.0 : 0.9;
}

namespace {

void validate_scenario_config(const ScenarioConfig& cfg) {
    if (cfg.n_train < 2 || cfg.n_test < 2) {
        throw InvalidInputError("generate_scenario: train and test need at least 2 rows each");
    }
    if (cfg.p < 1) {
        throw InvalidInputError("generate_scenario: p must be at least 1");
    }
    if (cfg.sparsity > cfg.p) {
        throw InvalidInputError("generate_scenario: sparsity cannot exceed p");
    }
    if (cfg.sigma < 0.0 || !std::isfinite(cfg.sigma)) {
        throw InvalidInputError("generate_scenario: sigma must be nonnegative");
    }
    if (cfg.rho >= 1.0) {
        throw InvalidInputError("generate_scenario: rho must be below 1");
    }
}

// Rows i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|, generated exactly by the
// stationary AR(1) recursion (unit marginal variance).
Matrix draw_design(std::size_t n, std::size_t p, double rho, Rng& rng) {
    Matrix X(n, p);
    const double innovation = std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        double previous = rng.normal();
        X(i, 0) = previous;
        for (std::size_t j = 1; j < p; ++j) {
            previous = rho * previous + innovation * rng.normal();
            X(i, j) = previous;
        }
    }
    return X;
}

Dataset assemble(Matrix X, const Vector& beta_star, double sigma, Rng& rng,
                 const std::string& name) {
    Dataset data;
    data.Y = X * beta_star;
    for (Eigen::Index i = 0; i < data.Y.size(); ++i) {
        data.Y(i) += sigma == 0.0 ? 0.0 : rng.normal(0.0, sigma);
    }
    data.X = std::move(X);
    data.name = name;
    data.feature_names.reserve(static_cast<std::size_t>(data.X.cols()));
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
        data.feature_names.push_back("x" + std::to_string(j));
    }
    return data;
}

}  // namespace

ScenarioData generate_scenario(const ScenarioConfig& cfg) {
    validate_scenario_config(cfg);
    const double rho = cfg.effective_rho();

    Vector beta_star = Vector::Zero(cfg.p);
    switch (cfg.scenario) {
        case Scenario::A:
            beta_star.setOnes();
            break;
        case Scenario::B:
        case Scenario::C:
            // Nonzeros on a leading block; under rho > 0 (scenario C) the
            // active features are therefore mutually correlated.
            beta_star.head(static_cast<Eigen::Index>(cfg.sparsity)).setConstant(10.0);
            break;
    }

    std::ostringstream label;
    label << "scenario-" << scenario_name(cfg.scenario) << "-sigma" << cfg.sigma << "-seed"
          << cfg.seed;

    Rng train_rng(derive_seed(cfg.seed, 10));
    Rng test_rng(derive_seed(cfg.seed, 11));

    ScenarioData out;
    out.beta_star = beta_star;
    out.train = assemble(draw_design(cfg.n_train, cfg.p, rho, train_rng), beta_star, cfg.sigma,
                         train_rng, label.str() + "-train");
    out.test = assemble(draw_design(cfg.n_test, cfg.p, rho, test_rng), beta_star, cfg.sigma,
                        test_rng, label.str() + "-test");
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') {
            quoted = !quoted;
        } else if (c == delimiter && !quoted) {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& target_column, char delimiter,
                 std::size_t* dropped_rows) {
    std::ifstream file(path);
    if (!file) {
        throw InvalidInputError("load_csv: cannot open file '" + path + "'");
    }
    std::string line;
    if (!std::getline(file, line)) {
        throw ParseError("load_csv: '" + path + "' is empty", 1, 1);
    }
    std::vector<std::string> header = split_fields(line, delimiter);
    for (auto& name : header) name = trim(name);

    std::size_t target_index = header.size();
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == target_column) {
            target_index = j;
            break;
        }
    }
    if (target_index == header.size()) {
        throw InvalidInputError("load_csv: target column '" + target_column + "' not found in '" +
                                path + "'");
    }
    if (header.size() < 2) {
        throw InvalidInputError("load_csv: need at least one feature column besides the target");
    }

    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    std::size_t dropped = 0;
    std::size_t line_number = 1;  // header is line 1
    while (std::getline(file, line)) {
        ++line_number;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split_fields(line, delimiter);
        if (fields.size() != header.size()) {
            throw ParseError("load_csv: line " + std::to_string(line_number) + " has " +
                                 std::to_string(fields.size()) + " fields, expected " +
                                 std::to_string(header.size()),
                             line_number, fields.size() + 1);
        }
        bool missing = false;
        std::vector<double> values(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const std::string cell = trim(fields[j]);
            if (cell.empty()) {
                missing = true;
                break;
            }
            char* end = nullptr;
            values[j] = std::strtod(cell.c_str(), &end);
            if (end != cell.c_str() + cell.size() || !std::isfinite(values[j])) {
                throw ParseError("load_csv: non-numeric cell '" + cell + "' at row " +
                                     std::to_string(line_number) + ", column " +
                                     std::to_string(j + 1) + " (" + header[j] + ")",
                                 line_number, j + 1);
            }
        }
        if (missing) {
            ++dropped;
            continue;
        }
        targets.push_back(values[target_index]);
        values.erase(values.begin() + static_cast<std::ptrdiff_t>(target_index));
        rows.push_back(std::move(values));
    }
    if (dropped_rows) *dropped_rows = dropped;
    if (rows.empty()) {
        throw InvalidInputError("load_csv: no usable data rows in '" + path + "'");
    }

    Dataset data;
    data.name = path;
    data.X.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(header.size() - 1));
    data.Y.resize(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j + 1 < header.size(); ++j) {
            data.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
        data.Y(static_cast<Eigen::Index>(i)) = targets[i];
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j != target_index) data.feature_names.push_back(header[j]);
    }
    return data;
}

void write_csv(const std::string& path, const Dataset& data, const std::string& target_column,
               char delimiter) {
    std::ofstream file(path);
    if (!file) {
        throw InvalidInputError("write_csv: cannot open '" + path + "' for writing");
    }
    char buffer[40];
    for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
        const std::string name = static_cast<std::size_t>(j) < data.feature_names.size()
                                     ? data.feature_names[static_cast<std::size_t>(j)]
                                     : "x" + std::to_string(j);
        file << name << delimiter;
    }
    file << target_column << '\n';
    for (Eigen::Index i = 0; i < data.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < data.X.cols(); ++j) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", data.X(i, j));
            file << buffer << delimiter;
        }
        std::snprintf(buffer, sizeof(buffer), "%.17g", data.Y(i));
        file << buffer << '\n';
    }
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
        throw InvalidInputError("split: test_fraction must lie strictly between 0 and 1");
    }
    const std::size_t n = static_cast<std::size_t>(data.n());
    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    const std::size_t n_train = n - n_test;
    if (n_test < 2 || n_train < 2) {
        throw InvalidInputError("split: both parts must end up with at least 2 rows (got " +
                                std::to_string(n_train) + "/" + std::to_string(n_test) + ")");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);

    std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train_idx(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    // Keep original row order inside each part.
    std::sort(test_idx.begin(), test_idx.end());
    std::sort(train_idx.begin(), train_idx.end());

    const auto take = [&](const std::vector<std::size_t>& idx, const std::string& suffix) {
        Dataset part;
        part.name = data.name.empty() ? suffix : data.name + "-" + suffix;
        part.feature_names = data.feature_names;
        part.X.resize(static_cast<Eigen::Index>(idx.size()), data.X.cols());
        part.Y.resize(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            part.X.row(static_cast<Eigen::Index>(i)) =
                data.X.row(static_cast<Eigen::Index>(idx[i]));
            part.Y(static_cast<Eigen::Index>(i)) = data.Y(static_cast<Eigen::Index>(idx[i]));
        }
        return part;
    };
    return {take(train_idx, "train"), take(test_idx, "test")};
}

}  // namespace permreg
