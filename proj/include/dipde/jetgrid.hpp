#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dipde/expr.hpp"
#include "dipde/trajectory.hpp"

namespace dipde {

class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Central difference stencils on a periodic axis (O(h^2) each).

template <typename Derived>
Eigen::ArrayXd periodic_shift(const Eigen::ArrayBase<Derived>& f, int s) {
    const Eigen::Index n = f.size();
    Eigen::ArrayXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = f[((i + s) % n + n) % n];
    return out;
}

/// d^k f / dx^k for k in 0..4 with the standard 3- and 5-point central stencils.
template <typename Derived>
Eigen::ArrayXd central_difference(const Eigen::ArrayBase<Derived>& f, int k, double h) {
    const Eigen::ArrayXd v = f;
    switch (k) {
    case 0:
        return v;
    case 1:
        return (periodic_shift(v, 1) - periodic_shift(v, -1)) / (2.0 * h);
    case 2:
        return (periodic_shift(v, 1) - 2.0 * v + periodic_shift(v, -1)) / (h * h);
    case 3:
        return (-0.5 * periodic_shift(v, -2) + periodic_shift(v, -1) - periodic_shift(v, 1) +
                0.5 * periodic_shift(v, 2)) /
               (h * h * h);
    case 4:
        return (periodic_shift(v, -2) - 4.0 * periodic_shift(v, -1) + 6.0 * v - 4.0 * periodic_shift(v, 1) +
                periodic_shift(v, 2)) /
               (h * h * h * h);
    default:
        throw GridError("central_difference supports orders 0..4");
    }
}

/// Prolonged dataset: u and its derivatives on the interior time samples.
class JetGrid {
public:
    JetGrid(const TrajectoryGrid& traj, int max_order, int t_begin, int t_end, std::map<JetVariable, Field> values);

    /// First/last base-grid time indices with full stencils (inclusive).
    int t_begin() const { return t_begin_; }
    int t_end() const { return t_end_; }
    int rows() const { return t_end_ - t_begin_ + 1; }
    int cols() const { return static_cast<int>(x_.size()); }
    Eigen::Index points() const { return static_cast<Eigen::Index>(rows()) * cols(); }
    int max_order() const { return max_order_; }

    const Eigen::ArrayXd& t() const { return t_; }
    const Eigen::ArrayXd& x() const { return x_; }
    const TrajectoryMeta& meta() const { return meta_; }

    /// Jet coordinates available at every point: t, x, u, u_t, u_x, ...
    const std::vector<JetVariable>& variables() const { return vars_; }
    bool has(const JetVariable& v) const;
    /// Field for a dependent coordinate (rows x cols).
    const Field& values(const JetVariable& v) const;

    /// Fill `slots` (length variables().size()) with the coordinates of point (row, col).
    void point(int row, int col, std::span<double> slots) const;

private:
    Eigen::ArrayXd t_;
    Eigen::ArrayXd x_;
    TrajectoryMeta meta_;
    int max_order_;
    int t_begin_;
    int t_end_;
    std::vector<JetVariable> vars_;
    std::map<JetVariable, Field> values_;
};

/// Spatial derivatives up to order n with periodic wrap, u_t by central
/// difference in time; the first and last time samples are dropped.
JetGrid finite_differences(const TrajectoryGrid& traj, int n = 4);

struct PointIndex {
    int traj = 0;
    int t = 0;  // base-grid time index
    int x = 0;
};

/// Features (and a target) evaluated on jet points.
struct FeatureMatrix {
    std::vector<Expr> columns;
    Expr target;
    Eigen::MatrixXd values;  // points x features
    Eigen::VectorXd y;
    std::vector<PointIndex> index;
    Eigen::Index dropped = 0;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

struct FeatureOptions {
    int t_stride = 1;
    int x_stride = 1;
};

/// One row per valid point, one column per feature. Rows with a non-finite
/// entry are dropped and counted. Throws MissingSymbolError for unbound
/// named constants or unavailable jet coordinates.
FeatureMatrix evaluate_features(const JetGrid& jet, const std::vector<Expr>& feats, const Expr& target,
                                const std::map<std::string, double>& constants, const FeatureOptions& opts = {},
                                int traj_id = 0);

/// Stack feature matrices with identical columns.
FeatureMatrix concatenate(std::span<const FeatureMatrix> parts);

/// Evaluate arbitrary expressions at the points listed in `index`
/// (index[k].traj selects the jet). Returns points x exprs.
Eigen::MatrixXd evaluate_at(std::span<const JetGrid> jets, const std::vector<Expr>& exprs,
                            const std::vector<PointIndex>& index, const std::map<std::string, double>& constants);

/// features.csv: traj,t_index,x_index, then one column per feature, then target.
void write_features_csv(const FeatureMatrix& fm, const std::string& path, const JetSpace& space = JetSpace::standard());

}  // namespace dipde
