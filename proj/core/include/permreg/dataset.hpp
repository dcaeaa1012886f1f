#ifndef PERMREG_DATASET_HPP
#define PERMREG_DATASET_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace permreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A design matrix with its response. Feature names are optional (CSV inputs
// carry them, synthetic generators label columns x0..x{p-1}).
struct Dataset {
    Matrix X;
    Vector Y;
    std::string name;
    std::vector<std::string> feature_names;

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index p() const { return X.cols(); }
};

}  // namespace permreg

#endif  // PERMREG_DATASET_HPP
