#include "dipde/invariants.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <mutex>

#include "dipde/rng.hpp"

namespace dipde {

std::vector<Expr> InvariantSet::features() const {
    std::vector<Expr> out;
    for (std::size_t i = 0; i < etas.size(); ++i)
        if (!lhs || i != *lhs) out.push_back(etas[i]);
    return out;
}

const Expr& InvariantSet::target() const {
    if (!lhs) throw CatalogError("invariant set '" + system + "' has no evolution invariant");
    return etas.at(*lhs);
}

std::optional<std::size_t> find_evolution_invariant(const std::vector<Expr>& etas, const JetSpace& space) {
    if (space.p() < 2 || !space.evolution_only()) return std::nullopt;
    const JetVariable ut = JetVariable::dependent(0, MultiIndex{0});
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < etas.size(); ++i) {
        if (!depends_on(etas[i], ut)) continue;
        if (found)
            throw CatalogError("several invariants contain " + space.name(ut) + ": " + to_string(etas[*found], space) +
                               " and " + to_string(etas[i], space));
        found = i;
    }
    return found;
}

InvariantSet make_invariant_set(std::string system, std::vector<VectorField> generators, std::vector<Expr> etas,
                                std::map<std::string, double> constants, const JetSpace& space, bool require_lhs) {
    InvariantSet s;
    s.system = std::move(system);
    s.space = space;
    for (auto& g : generators) g.validate(space);
    s.generators = std::move(generators);
    for (auto& e : etas) e = simplify(e);
    s.etas = std::move(etas);
    s.constants = std::move(constants);
    s.lhs = find_evolution_invariant(s.etas, space);
    if (require_lhs && !s.lhs)
        throw CatalogError("invariant set '" + s.system + "' has no invariant containing the time derivative");
    return s;
}

namespace {

SystemInfo make_system(const std::string& id, const std::string& equation, std::map<std::string, double> constants,
                       const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>& gens,
                       const std::vector<std::string>& etas, const JetSpace& space = JetSpace::standard(),
                       bool require_lhs = true) {
    std::vector<VectorField> g;
    for (const auto& [xi, phi] : gens) g.push_back(VectorField::parse(xi, phi, space));
    std::vector<Expr> e;
    for (const auto& s : etas) e.push_back(parse(s, space));
    SystemInfo info;
    info.id = id;
    info.equation = equation.empty() ? Expr(0.0) : simplify(parse(equation, space));
    info.constants = constants;
    info.invariants = make_invariant_set(id, std::move(g), std::move(e), std::move(constants), space, require_lhs);
    return info;
}

const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> kGalilean = {
    {{"0", "1"}, {"0"}},  // d/dx
    {{"1", "0"}, {"0"}},  // d/dt
    {{"0", "t"}, {"1"}},  // t d/dx + d/du
};

const std::vector<std::string> kGalileanInvariants = {"u_t + u*u_x", "u_x", "u_xx", "u_xxx", "u_xxxx"};

std::map<std::string, SystemInfo> build_catalog() {
    std::map<std::string, SystemInfo> c;
    c.emplace("kdv", make_system("kdv", "u_t + u*u_x + u_xxx", {}, kGalilean, kGalileanInvariants));
    c.emplace("ks", make_system("ks", "u_t + u_xx + u_xxxx + u*u_x", {}, kGalilean, kGalileanInvariants));
    c.emplace("burgers", make_system("burgers", "u_t + u*u_x - nu*u_xx", {{"nu", 0.1}}, kGalilean, kGalileanInvariants));
    c.emplace("nkdv", make_system("nkdv", "exp(-t/t0)*u_t + u*u_x + u_xxx", {{"t0", 1.0}},
                                  {
                                      {{"0", "1"}, {"0"}},
                                      {{"exp(-t/t0)", "0"}, {"0"}},
                                      {{"0", "t0*(exp(t/t0) - 1)"}, {"1"}},
                                  },
                                  {"exp(-t/t0)*u_t + u*u_x", "u_x", "u_xx", "u_xxx", "u_xxxx"}));
    // Rotations of the (x, u) plane. The radius enters squared (the sqrt is
    // not an expression head); (x^2 + u^2) is functionally equivalent.
    static const JetSpace so2_space({"x"}, {"u"}, 1, false);
    c.emplace("so2-demo", make_system("so2-demo", "", {}, {{{"-u"}, {"x"}}},
                                      {"x^2 + u^2", "(x*u_x - u)/(u*u_x + x)"}, so2_space, false));
    return c;
}

const std::map<std::string, SystemInfo>& catalog() {
    static const std::map<std::string, SystemInfo> c = [] {
        auto cat = build_catalog();
        for (const auto& [id, info] : cat) {
            auto rep = verify_set(info.invariants, 200, 0x5eedULL);
            if (!rep.pass()) {
                std::string msg = "catalog entry '" + id + "' failed verification:";
                for (const auto& f : rep.failures) msg += "\n  " + f;
                throw CatalogError(msg);
            }
        }
        return cat;
    }();
    return c;
}

}  // namespace

std::vector<std::string> builtin_systems() { return {"kdv", "ks", "burgers", "nkdv", "so2-demo"}; }

const SystemInfo& builtin_system(std::string_view id) {
    const auto& c = catalog();
    auto it = c.find(std::string(id));
    if (it == c.end()) throw CatalogError("unknown system '" + std::string(id) + "'");
    return it->second;
}

const InvariantSet& builtin_set(std::string_view id) { return builtin_system(id).invariants; }

EliminationResult eliminate_translations(const std::vector<VectorField>& generators, int n, const JetSpace& space) {
    JetSpace s(space.independent_names(), space.dependent_names(), n, space.evolution_only());
    EliminationResult r;
    r.coordinates = s.coordinates();
    for (std::size_t g = 0; g < generators.size(); ++g) {
        auto axis = prolong(generators[g], std::max(n, 1), s).translation_axis();
        if (!axis) {
            r.remaining_generators.push_back(g);
            continue;
        }
        const JetVariable xi = JetVariable::independent(*axis);
        auto it = std::find(r.coordinates.begin(), r.coordinates.end(), xi);
        if (it != r.coordinates.end()) {
            r.coordinates.erase(it);
            r.eliminated.push_back(xi);
        }
    }
    return r;
}

bool VerificationReport::invariance_ok() const {
    return std::all_of(invariance.begin(), invariance.end(), [](const PairCheck& c) { return c.report.symbolic_zero; });
}

bool VerificationReport::independence_ok() const { return samples > 0 && full_rank_fraction() >= 0.99; }

VerificationReport verify_set(const InvariantSet& s, int samples, std::uint64_t seed, VerifyOptions opts) {
    const auto& space = s.space;
    const auto k = static_cast<Eigen::Index>(s.etas.size());
    if (samples < k) throw CatalogError("verify_set needs at least as many samples as invariants");
    for (const auto& [name, v] : s.constants) opts.sampling.constants.emplace(name, v);

    VerificationReport rep;
    rep.samples = samples;

    for (std::size_t g = 0; g < s.generators.size(); ++g) {
        ProlongedVectorField pv = [&] {
            return prolong(s.generators[g], space.order(), space);
        }();
        for (std::size_t e = 0; e < s.etas.size(); ++e) {
            PairCheck pc{g, e, {}};
            try {
                pc.report = check_invariant(pv, s.etas[e], samples, derive_seed(seed, g, e), opts.sampling);
            } catch (const std::exception& ex) {
                rep.failures.push_back("generator " + std::to_string(g) + ", eta " + std::to_string(e) + ": " + ex.what());
                continue;
            }
            if (!pc.report.symbolic_zero)
                rep.failures.push_back("generator " + std::to_string(g) + " (" + to_string(s.generators[g], space) +
                                       ") does not annihilate " + to_string(s.etas[e], space) + ": residual " +
                                       to_string(pc.report.residual, space));
            else if (!(pc.report.max_abs < opts.numeric_tol))
                rep.failures.push_back("numeric residual " + std::to_string(pc.report.max_abs) + " for eta " +
                                       to_string(s.etas[e], space));
            rep.invariance.push_back(std::move(pc));
        }
    }

    // functional independence: rank of the Jacobian w.r.t. all jet coordinates
    const auto coords = space.coordinates();
    const auto m = static_cast<Eigen::Index>(coords.size());
    std::vector<std::vector<CompiledExpr>> jac;
    std::vector<Expr> guarded;
    try {
        for (const auto& eta : s.etas) {
            std::vector<CompiledExpr> row;
            for (const auto& c : coords) row.emplace_back(partial_derivative(eta, c), coords, opts.sampling.constants, space);
            jac.push_back(std::move(row));
            for (const auto& d : denominators(eta)) guarded.push_back(d);
        }
    } catch (const std::exception& ex) {
        rep.failures.push_back(std::string("jacobian: ") + ex.what());
        return rep;
    }

    rep.min_singular_value = std::numeric_limits<double>::infinity();
    rep.min_rank = static_cast<int>(k);
    std::vector<double> buf(coords.size());
    Eigen::MatrixXd J(k, m);
    const std::uint64_t jseed = derive_seed(seed, 0xA11CEULL);
    for (int n = 0; n < samples; ++n) {
        Binding b;
        try {
            b = sample_jet_point(space, guarded, jseed, static_cast<std::uint64_t>(n), opts.sampling);
        } catch (const std::exception& ex) {
            rep.failures.push_back(std::string("independence sampling: ") + ex.what());
            break;
        }
        for (std::size_t i = 0; i < coords.size(); ++i) buf[i] = *b.find(coords[i]);
        for (Eigen::Index r = 0; r < k; ++r)
            for (Eigen::Index c = 0; c < m; ++c) J(r, c) = jac[r][c](buf);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
        const auto& sv = svd.singularValues();
        const double smin = k <= m ? sv[k - 1] : 0.0;
        int rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv[i] > opts.singular_value_floor) ++rank;
        rep.min_rank = std::min(rep.min_rank, rank);
        rep.min_singular_value = std::min(rep.min_singular_value, smin);
        if (smin > opts.singular_value_floor) ++rep.full_rank_samples;
    }
    if (rep.full_rank_fraction() < opts.rank_fraction)
        rep.failures.push_back("invariants not functionally independent: full rank at " +
                               std::to_string(rep.full_rank_samples) + "/" + std::to_string(samples) +
                               " samples (min rank " + std::to_string(rep.min_rank) + " of " + std::to_string(k) + ")");
    return rep;
}

}  // namespace dipde
