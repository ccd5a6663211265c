#include "dipde/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dipde/jetgrid.hpp"
#include "dipde/rng.hpp"

namespace dipde {

void VectorField::validate(const JetSpace& space) const {
    if (static_cast<int>(xi.size()) != space.p())
        throw LieError("vector field has " + std::to_string(xi.size()) + " xi components, expected " +
                       std::to_string(space.p()));
    if (static_cast<int>(phi.size()) != space.q())
        throw LieError("vector field has " + std::to_string(phi.size()) + " phi components, expected " +
                       std::to_string(space.q()));
    auto check = [&](const Expr& e) {
        for (const auto& v : jet_variables(e))
            if (v.order() > 0)
                throw LieError("point symmetry component depends on " + space.name(v) + ": " + dipde::to_string(e, space));
    };
    for (const auto& e : xi) check(e);
    for (const auto& e : phi) check(e);
}

VectorField VectorField::parse(const std::vector<std::string>& xi, const std::vector<std::string>& phi,
                               const JetSpace& space) {
    VectorField v;
    for (const auto& s : xi) v.xi.push_back(dipde::parse(s, space));
    for (const auto& s : phi) v.phi.push_back(dipde::parse(s, space));
    v.validate(space);
    return v;
}

std::string to_string(const VectorField& v, const JetSpace& space) {
    std::ostringstream os;
    bool first = true;
    auto term = [&](const Expr& c, const std::string& name) {
        Expr s = simplify(c);
        if (s.is_zero()) return;
        if (!first) os << " + ";
        first = false;
        if (!s.is_one()) os << "(" << dipde::to_string(s, space) << ")*";
        os << "d/d" << name;
    };
    for (int i = 0; i < static_cast<int>(v.xi.size()); ++i) term(v.xi[i], space.independent_names()[i]);
    for (int a = 0; a < static_cast<int>(v.phi.size()); ++a) term(v.phi[a], space.dependent_names()[a]);
    if (first) os << "0";
    return os.str();
}

ProlongedVectorField::ProlongedVectorField(VectorField base, JetSpace space, std::map<JetVariable, Expr> coeffs)
    : base_(std::move(base)), space_(std::move(space)), coeffs_(std::move(coeffs)) {}

const Expr& ProlongedVectorField::coefficient(const JetVariable& uJ) const {
    auto it = coeffs_.find(uJ);
    if (it == coeffs_.end()) throw LieError("no prolongation coefficient for " + space_.name(uJ));
    return it->second;
}

ProlongedVectorField ProlongedVectorField::truncated(int n) const {
    JetSpace s(space_.independent_names(), space_.dependent_names(), std::min(n, order()), space_.evolution_only());
    std::map<JetVariable, Expr> c;
    for (const auto& [v, e] : coeffs_)
        if (v.order() <= n) c.emplace(v, e);
    return ProlongedVectorField(base_, std::move(s), std::move(c));
}

std::optional<int> ProlongedVectorField::translation_axis() const {
    std::optional<int> axis;
    for (int i = 0; i < static_cast<int>(base_.xi.size()); ++i) {
        Expr s = simplify(base_.xi[i]);
        if (s.is_zero()) continue;
        if (!s.is_one() || axis) return std::nullopt;
        axis = i;
    }
    for (const auto& p : base_.phi)
        if (!is_identically_zero(p)) return std::nullopt;
    for (const auto& [v, e] : coeffs_)
        if (!e.is_zero()) return std::nullopt;
    return axis;
}

ProlongedVectorField prolong(const VectorField& v, int n, const JetSpace& space) {
    if (n < 1) throw LieError("prolongation order must be >= 1");
    JetSpace target(space.independent_names(), space.dependent_names(), n, space.evolution_only());
    v.validate(target);
    const int p = target.p();

    std::map<JetVariable, Expr> coeffs;
    for (int a = 0; a < target.q(); ++a) {
        // characteristic Q = phi_a - sum_i xi^i u^a_i
        std::vector<Expr> parts{v.phi[a]};
        for (int i = 0; i < p; ++i)
            parts.push_back(Expr(-1.0) * v.xi[i] * Expr(JetVariable::dependent(a, MultiIndex{i})));
        const Expr Q = simplify(Expr::sum(std::move(parts)));

        std::map<MultiIndex, Expr> DQ{{MultiIndex{}, Q}};
        auto derivative = [&](const MultiIndex& J, auto&& self) -> const Expr& {
            if (auto it = DQ.find(J); it != DQ.end()) return it->second;
            std::vector<int> head = J.indices();
            const int last = head.back();
            head.pop_back();
            const Expr& prev = self(MultiIndex(head), self);
            return DQ.emplace(J, total_derivative(prev, last, n + 1)).first->second;
        };

        for (const auto& J : target.derivative_indices()) {
            std::vector<Expr> terms{derivative(J, derivative)};
            for (int i = 0; i < p; ++i)
                terms.push_back(v.xi[i] * Expr(JetVariable::dependent(a, J.with(i))));
            Expr c = simplify(Expr::sum(std::move(terms)));
            if (max_derivative_order(c) > n)
                throw LieError("prolongation coefficient for " + target.name(JetVariable::dependent(a, J)) +
                               " kept order-" + std::to_string(n + 1) + " terms: " + to_string(c, target));
            coeffs.emplace(JetVariable::dependent(a, J), std::move(c));
        }
    }
    return ProlongedVectorField(v, std::move(target), std::move(coeffs));
}

Expr apply(const ProlongedVectorField& pv, const Expr& e) {
    const auto& space = pv.space();
    std::vector<Expr> terms;
    for (const auto& var : jet_variables(e)) {
        Expr coef;
        if (var.is_independent()) {
            if (var.index() >= static_cast<int>(pv.base().xi.size()))
                throw LieError("unknown independent variable in " + to_string(e, space));
            coef = pv.base().xi[var.index()];
        } else if (var.order() == 0) {
            coef = pv.base().phi.at(var.index());
        } else {
            auto it = pv.coefficients().find(var);
            if (it == pv.coefficients().end())
                throw LieError("expression uses " + space.name(var) + " beyond the order-" + std::to_string(pv.order()) +
                               " prolongation");
            coef = it->second;
        }
        if (is_identically_zero(coef)) continue;
        terms.push_back(coef * partial_derivative(e, var));
    }
    return simplify(Expr::sum(std::move(terms)));
}

Binding sample_jet_point(const JetSpace& space, const std::vector<Expr>& guarded, std::uint64_t seed,
                         std::uint64_t index, const SamplingOptions& opts, int* resampled) {
    const auto coords = space.coordinates();
    std::vector<std::map<std::string, double>> bad;
    for (int attempt = 0; attempt <= opts.retry_cap; ++attempt) {
        Rng rng(derive_seed(seed, index, static_cast<std::uint64_t>(attempt)));
        std::uniform_real_distribution<double> dist(opts.lo, opts.hi);
        Binding b;
        for (const auto& [name, value] : opts.constants) b.set(name, value);
        for (const auto& c : coords) b.set(c, dist(rng));
        bool ok = true;
        for (const auto& d : guarded) {
            double v = evaluate(d, b, space).value;
            if (!(std::abs(v) >= opts.denominator_guard)) {
                ok = false;
                break;
            }
        }
        if (ok) return b;
        if (resampled) ++*resampled;
        if (bad.size() < 5) {
            std::map<std::string, double> pt;
            for (const auto& [v, x] : b.variables()) pt[space.name(v)] = x;
            bad.push_back(std::move(pt));
        }
    }
    throw SingularityError("denominator vanished at " + std::to_string(opts.retry_cap + 1) +
                               " consecutive samples for point " + std::to_string(index),
                           std::move(bad));
}

InvarianceReport check_invariant(const ProlongedVectorField& pv, const Expr& eta, int samples, std::uint64_t seed,
                                 const SamplingOptions& opts) {
    if (samples < 1) throw LieError("check_invariant needs at least one sample");
    InvarianceReport rep;
    rep.residual = apply(pv, eta);
    rep.symbolic_zero = rep.residual.is_zero();
    rep.samples = samples;

    std::vector<Expr> guarded = denominators(eta);
    for (const auto& d : denominators(rep.residual)) guarded.push_back(d);
    const auto& space = pv.space();
    std::vector<JetVariable> slots = space.coordinates();
    CompiledExpr f(rep.residual, slots, opts.constants, space);
    std::vector<double> buf(slots.size());
    for (int k = 0; k < samples; ++k) {
        Binding b = sample_jet_point(space, guarded, seed, static_cast<std::uint64_t>(k), opts, &rep.resampled);
        for (size_t s = 0; s < slots.size(); ++s) buf[s] = *b.find(slots[s]);
        const double v = std::abs(f(buf));
        rep.max_abs = std::isnan(v) ? v : std::max(rep.max_abs, v);
        if (std::isnan(rep.max_abs)) break;
    }
    return rep;
}

CriterionReport check_symmetry_criterion(const ProlongedVectorField& pv, const Expr& F, const JetGrid* jet,
                                         const std::map<std::string, double>& constants) {
    CriterionReport rep;
    rep.residual = apply(pv, F);
    rep.symbolic_zero = rep.residual.is_zero();
    if (jet) {
        CompiledExpr f(rep.residual, jet->variables(), constants, pv.space());
        std::vector<double> buf(jet->variables().size());
        double worst = 0.0;
        for (int r = 0; r < jet->rows(); ++r)
            for (int c = 0; c < jet->cols(); ++c) {
                jet->point(r, c, buf);
                worst = std::max(worst, std::abs(f(buf)));
            }
        rep.on_manifold_max = worst;
    }
    return rep;
}

}  // namespace dipde
