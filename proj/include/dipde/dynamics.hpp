#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dipde/expr.hpp"
#include "dipde/trajectory.hpp"

namespace dipde {

class BlowUpError : public std::runtime_error {
public:
    BlowUpError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// Raised when an equation cannot be put in the form u_t = g(t, x, u, u_x, ...).
class EvolutionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Scheme { Etdrk4, Rk4 };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& s);

struct SolverConfig {
    int nx = 256;
    double length = 20.0;
    double dt = 0.01;  // output sampling interval
    int nt = 501;      // output samples; horizon = dt * (nt - 1)
    double transient = 0.0;  // integrated and discarded before the first sample
    Scheme scheme = Scheme::Etdrk4;
    bool dealias = true;
    int substeps = 4;  // internal steps per output interval (a minimum)
    std::map<std::string, double> parameters;

    double horizon() const { return dt * (nt - 1); }
    /// Throws std::invalid_argument.
    void validate(const std::string& system = "") const;
};

/// Defaults per system (kdv, ks, burgers, nkdv).
SolverConfig default_solver(const std::string& system);

struct IcFamily {
    int min_modes = 2;
    int max_modes = 3;
    double amp_lo = 0.5;
    double amp_hi = 1.5;
    int k_lo = 1;
    int k_hi = 3;
    double phase_lo = 0.0;
    double phase_hi = 6.283185307179586;
};

/// Sum of a_j sin(2 pi k_j x / L + p_j) with the mean over the grid removed.
Eigen::ArrayXd sample_initial_condition(const Eigen::ArrayXd& x, double length, std::uint64_t seed,
                                        const IcFamily& family = {});

/// u_t = rate(t) * (sum_j lin[j] d^j u/dx^j + nonlinear(x, u, u_x, ...)).
struct EvolutionForm {
    std::array<double, 5> lin{};
    Expr nonlinear;
    Expr rate;  // depends on t only
};

/// Rearrange F = 0 (F affine in u_t with a t-only coefficient) after
/// substituting `constants`.
EvolutionForm evolution_form(const Expr& F, const std::map<std::string, double>& constants);

struct IntegrationResult {
    TrajectoryGrid traj;  // rows up to the last finite sample
    std::optional<int> blowup_step;
};

/// Integrate F = 0 from `ic` at time t_start, sampling cfg.nt points
/// spaced cfg.dt. ETDRK4 runs in the rescaled time tau = int rate dt;
/// RK4 steps the physical time directly with stability-limited substeps.
/// Blow-up (|u| > 1e6 or non-finite) truncates the result.
IntegrationResult integrate_equation(const Expr& F, const std::map<std::string, double>& constants,
                                     const Eigen::ArrayXd& ic, const SolverConfig& cfg, double t_start = 0.0);

/// Ground-truth trajectory for a catalog system; throws BlowUpError.
TrajectoryGrid solve_pde(const std::string& system, const Eigen::ArrayXd& ic, const SolverConfig& cfg);

/// Uniform periodic grid i * L / n.
Eigen::ArrayXd periodic_grid(int n, double length);

}  // namespace dipde
