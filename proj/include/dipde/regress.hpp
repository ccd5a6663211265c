#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dipde/dynamics.hpp"
#include "dipde/jetgrid.hpp"
#include "dipde/liealg.hpp"

namespace dipde {

class RegressError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LibrarySpec {
    enum class Mode { Linear, Poly2 };
    Mode mode = Mode::Linear;
    std::vector<Expr> inputs;
    bool include_constant = false;
};

std::string to_string(LibrarySpec::Mode m);
LibrarySpec::Mode parse_library_mode(const std::string& s);

/// constant (if any), inputs in order, then products i <= j in lexicographic order.
std::vector<Expr> build_library(const LibrarySpec& spec);

using Mask = std::vector<bool>;

/// target = W . features with W = C (.) M.
struct SparseModel {
    Expr target;
    std::vector<Expr> features;
    Eigen::VectorXd coef;  // zero where masked
    Mask mask;
    double threshold = 0.0;
    double lambda = 0.0;
    std::vector<Mask> history;
    int iterations = 0;
    double min_singular_value = 0.0;
    double condition_number = 0.0;
    bool rank_deficient = false;

    Eigen::VectorXd W() const;
    std::size_t active() const;
};

struct StlsqOptions {
    double threshold = 0.5;
    int max_iters = 20;
    double ridge = 1e-10;  // relative to each diagonal entry of the active Gram block
};

/// Thresholded least squares on precomputed normal equations G w = r.
/// Masked coefficients never re-enter.
SparseModel stlsq_normal(const Eigen::MatrixXd& G, const Eigen::VectorXd& r, const StlsqOptions& opts);

SparseModel stlsq(const FeatureMatrix& fm, const StlsqOptions& opts);
SparseModel stlsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const StlsqOptions& opts);

/// Rows of pr v[feature_j] and pr v[target] over the feature matrix points,
/// one block per generator.
struct SymmetryPenalty {
    Eigen::MatrixXd A;  // (points * generators) x features
    Eigen::VectorXd b;
    Eigen::Index rows_per_generator = 0;
};

SymmetryPenalty symmetry_penalty(std::span<const JetGrid> jets, const FeatureMatrix& fm,
                                 std::span<const ProlongedVectorField> generators,
                                 const std::map<std::string, double>& constants);

/// Minimise mean|y - Theta w|^2 + lambda * sum_v mean|pr v[F]|^2, F = target - w . features,
/// with the same thresholding loop as stlsq.
SparseModel stlsq_regularized(const FeatureMatrix& fm, const SymmetryPenalty& pen, double lambda,
                              const StlsqOptions& opts);

/// target - sum_{M_j} C_j feat_j, simplified.
Expr model_to_equation(const SparseModel& m);

/// Coefficients w* with target - w* . features proportional to `truth`
/// (after substituting constants), or nullopt when the truth equation is not
/// in the span of {target} + features.
std::optional<Eigen::VectorXd> project_truth(const Expr& truth, const Expr& target, const std::vector<Expr>& features,
                                             const std::map<std::string, double>& constants);

/// Model with W = w*, mask = (w* != 0).
SparseModel truth_model(const Expr& truth, const Expr& target, const std::vector<Expr>& features,
                        const std::map<std::string, double>& constants, double threshold);

std::string model_to_json(const SparseModel& m, int indent = 2);
SparseModel model_from_json(const std::string& text);

/// Integrate the discovered equation from `ic`.
IntegrationResult integrate_model(const SparseModel& m, const std::map<std::string, double>& constants,
                                  const Eigen::ArrayXd& ic, const SolverConfig& cfg, double t_start = 0.0);

}  // namespace dipde
