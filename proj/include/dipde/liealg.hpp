#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dipde/expr.hpp"

namespace dipde {

class JetGrid;

class LieError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// v = sum_i xi^i(x,u) d/dx^i + sum_a phi_a(x,u) d/du^a.
struct VectorField {
    std::vector<Expr> xi;   // one per independent variable
    std::vector<Expr> phi;  // one per dependent variable

    /// Throws LieError unless xi/phi have the right sizes and depend only on
    /// base coordinates (x, u).
    void validate(const JetSpace& space) const;

    /// Parse "xi_t; xi_x; phi_u" style component lists.
    static VectorField parse(const std::vector<std::string>& xi, const std::vector<std::string>& phi,
                             const JetSpace& space = JetSpace::standard());
};

std::string to_string(const VectorField& v, const JetSpace& space = JetSpace::standard());

/// n-th prolongation: the base field plus coefficients phi_a^J for every
/// derivative coordinate u^a_J (1 <= |J| <= n) of the jet space.
class ProlongedVectorField {
public:
    ProlongedVectorField(VectorField base, JetSpace space, std::map<JetVariable, Expr> coeffs);

    const VectorField& base() const { return base_; }
    const JetSpace& space() const { return space_; }
    int order() const { return space_.order(); }
    const std::map<JetVariable, Expr>& coefficients() const { return coeffs_; }
    /// phi^J for u_J; throws LieError if u_J is not a coordinate of this prolongation.
    const Expr& coefficient(const JetVariable& uJ) const;

    /// Drop coefficients above order n.
    ProlongedVectorField truncated(int n) const;

    /// Axis i if this prolonged field is exactly d/dx^i, otherwise nullopt.
    std::optional<int> translation_axis() const;

private:
    VectorField base_;
    JetSpace space_;
    std::map<JetVariable, Expr> coeffs_;
};

/// phi_a^J = D_J(phi_a - sum_i xi^i u^a_i) + sum_i xi^i u^a_{J,i}, simplified.
/// `space` supplies names and which u_J are coordinates; its order is replaced by n.
ProlongedVectorField prolong(const VectorField& v, int n, const JetSpace& space = JetSpace::standard());

/// pr v [e] = sum xi^i de/dx^i + sum phi_a de/du^a + sum phi_a^J de/du^a_J.
Expr apply(const ProlongedVectorField& pv, const Expr& e);

struct SamplingOptions {
    double lo = -2.0;
    double hi = 2.0;
    double denominator_guard = 1e-3;
    int retry_cap = 100;
    std::map<std::string, double> constants;
};

/// Raised when random jet points keep landing on vanishing denominators.
class SingularityError : public LieError {
public:
    SingularityError(std::string msg, std::vector<std::map<std::string, double>> points)
        : LieError(std::move(msg)), points_(std::move(points)) {}
    const std::vector<std::map<std::string, double>>& points() const { return points_; }

private:
    std::vector<std::map<std::string, double>> points_;
};

/// Draw a random jet point for the space (coordinates uniform in the box),
/// rejecting points where any of `guarded` is smaller than the guard.
/// Deterministic in (seed, index).
Binding sample_jet_point(const JetSpace& space, const std::vector<Expr>& guarded, std::uint64_t seed,
                         std::uint64_t index, const SamplingOptions& opts, int* resampled = nullptr);

struct InvarianceReport {
    Expr residual;             // simplified pr v [eta]
    bool symbolic_zero = false;
    double max_abs = 0.0;      // over the sampled points
    int samples = 0;
    int resampled = 0;

    bool invariant(double tol = 1e-9) const { return symbolic_zero && max_abs < tol; }
};

InvarianceReport check_invariant(const ProlongedVectorField& pv, const Expr& eta, int samples, std::uint64_t seed,
                                 const SamplingOptions& opts = {});

struct CriterionReport {
    Expr residual;
    bool symbolic_zero = false;
    std::optional<double> on_manifold_max;  // present when solution data was supplied
};

/// Symbolic check of pr v [F] == 0, plus the max of |pr v [F]| over the
/// points of a JetGrid when one is given.
CriterionReport check_symmetry_criterion(const ProlongedVectorField& pv, const Expr& F, const JetGrid* jet = nullptr,
                                         const std::map<std::string, double>& constants = {});

}  // namespace dipde
