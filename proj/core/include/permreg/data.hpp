#ifndef PERMREG_DATA_HPP
#define PERMREG_DATA_HPP

#include <cstdint>
#include <string>
#include <tuple>
#include <utility>

#include "permreg/dataset.hpp"

namespace permreg {

enum class Scenario { A, B, C };

std::string scenario_name(Scenario s);
Scenario scenario_from_name(const std::string& name);

// Synthetic regression scenarios:
//   A — correlated features (AR(1) with rho = 0.9), dense coefficients (all 1)
//   B — independent features, sparse coefficients (`sparsity` entries of 10)
//   C — sparse coefficients placed on a correlated block (rho = 0.9)
// Rows of X are i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|; the response is
// X beta_star + noise with noise i.i.d. N(0, sigma²).
struct ScenarioConfig {
    Scenario scenario = Scenario::B;
    std::size_t n_train = 100;
    std::size_t n_test = 1000;
    std::size_t p = 80;
    double sigma = 10.0;
    double rho = -1.0;        // < 0 means the scenario default (A, C: 0.9; B: 0)
    std::size_t sparsity = 10;
    std::uint64_t seed = 0;

    double effective_rho() const;
};

struct ScenarioData {
    Dataset train;
    Dataset test;
    Vector beta_star;
};

// Train and test share beta_star and the feature covariance but use
// disjoint RNG substreams; fixed seed gives bit-identical datasets.
ScenarioData generate_scenario(const ScenarioConfig& cfg);

// Reads a delimited numeric file with a header row. Every column except
// `target_column` becomes a feature, in file order. Rows with empty cells
// are dropped (count reported through dropped_rows); a non-empty cell that
// does not parse as a number raises ParseError with its file line and
// column.
Dataset load_csv(const std::string& path, const std::string& target_column,
                 char delimiter = ',', std::size_t* dropped_rows = nullptr);

// Writes a dataset back out in the same format (features then target).
void write_csv(const std::string& path, const Dataset& data,
               const std::string& target_column = "y", char delimiter = ',');

// Seeded uniform partition without replacement; the test part receives
// round(n * test_fraction) rows. Both parts must end up with at least two
// rows.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed);

}  // namespace permreg

#endif  // PERMREG_DATA_HPP
