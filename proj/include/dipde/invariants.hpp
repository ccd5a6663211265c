#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dipde/expr.hpp"
#include "dipde/liealg.hpp"

namespace dipde {

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A complete set of functionally independent differential invariants for a
/// group given by its generators. `lhs` marks the evolution invariant (the
/// unique eta containing u_t), used as the regression target.
struct InvariantSet {
    std::string system;
    JetSpace space = JetSpace::standard();
    std::vector<VectorField> generators;
    std::vector<Expr> etas;
    std::optional<std::size_t> lhs;
    /// Values of the named constants (t0, nu) used during verification.
    std::map<std::string, double> constants;

    /// All etas except the lhs, in order.
    std::vector<Expr> features() const;
    const Expr& target() const;
};

/// Index of the unique eta containing the time derivative u_t. Returns
/// nullopt when none does; throws CatalogError when several do.
std::optional<std::size_t> find_evolution_invariant(const std::vector<Expr>& etas, const JetSpace& space);

/// Build a user-supplied set; lhs is detected by the u_t rule.
InvariantSet make_invariant_set(std::string system, std::vector<VectorField> generators, std::vector<Expr> etas,
                                std::map<std::string, double> constants = {},
                                const JetSpace& space = JetSpace::standard(), bool require_lhs = true);

/// Catalog entry for a PDE system.
struct SystemInfo {
    std::string id;
    Expr equation;  // F with F = 0 the governing equation, in named constants
    std::map<std::string, double> constants;
    InvariantSet invariants;
};

std::vector<std::string> builtin_systems();

/// Verified catalog entry; verification runs once per process and a failure
/// is raised as CatalogError.
const SystemInfo& builtin_system(std::string_view id);
const InvariantSet& builtin_set(std::string_view id);

struct EliminationResult {
    std::vector<JetVariable> coordinates;         // reduced jet coordinate list
    std::vector<JetVariable> eliminated;          // translated independent variables
    std::vector<std::size_t> remaining_generators;  // indices not consumed
};

/// Drop x^i from the full coordinate list for every generator whose
/// prolongation is exactly d/dx^i.
EliminationResult eliminate_translations(const std::vector<VectorField>& generators, int n,
                                         const JetSpace& space = JetSpace::standard());

struct PairCheck {
    std::size_t generator = 0;
    std::size_t eta = 0;
    InvarianceReport report;
};

struct VerificationReport {
    std::vector<PairCheck> invariance;
    int samples = 0;
    int full_rank_samples = 0;
    double min_singular_value = 0.0;  // smallest over all samples
    int min_rank = 0;
    std::vector<std::string> failures;

    double full_rank_fraction() const { return samples ? double(full_rank_samples) / samples : 0.0; }
    bool invariance_ok() const;
    bool independence_ok() const;
    bool pass() const { return failures.empty(); }
};

struct VerifyOptions {
    double numeric_tol = 1e-9;
    double singular_value_floor = 1e-8;
    double rank_fraction = 0.99;
    SamplingOptions sampling;
};

/// Invariance of every (generator, eta) pair (symbolic and sampled), and
/// functional independence through the rank of d eta / d(jet coordinates).
/// Collects every failure instead of stopping at the first.
VerificationReport verify_set(const InvariantSet& s, int samples, std::uint64_t seed, VerifyOptions opts = {});

}  // namespace dipde
