#include "dipde/regress.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <json.hpp>

namespace dipde {

std::string to_string(LibrarySpec::Mode m) { return m == LibrarySpec::Mode::Linear ? "linear" : "poly2"; }

LibrarySpec::Mode parse_library_mode(const std::string& s) {
    if (s == "linear") return LibrarySpec::Mode::Linear;
    if (s == "poly2") return LibrarySpec::Mode::Poly2;
    throw RegressError("unknown library mode '" + s + "'");
}

std::vector<Expr> build_library(const LibrarySpec& spec) {
    if (spec.inputs.empty()) throw RegressError("library needs at least one input");
    std::vector<Expr> in;
    for (const auto& e : spec.inputs) {
        Expr s = simplify(e);
        for (const auto& prev : in)
            if (prev == s) throw RegressError("duplicate library input " + to_string(s));
        in.push_back(s);
    }
    std::vector<Expr> out;
    if (spec.include_constant) out.emplace_back(1.0);
    out.insert(out.end(), in.begin(), in.end());
    if (spec.mode == LibrarySpec::Mode::Poly2)
        for (std::size_t i = 0; i < in.size(); ++i)
            for (std::size_t j = i; j < in.size(); ++j) out.push_back(simplify(in[i] * in[j]));
    return out;
}

Eigen::VectorXd SparseModel::W() const {
    Eigen::VectorXd w = coef;
    for (std::size_t j = 0; j < mask.size(); ++j)
        if (!mask[j]) w[static_cast<Eigen::Index>(j)] = 0.0;
    return w;
}

std::size_t SparseModel::active() const { return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true)); }

namespace {

std::vector<Eigen::Index> support(const Mask& m) {
    std::vector<Eigen::Index> s;
    for (std::size_t j = 0; j < m.size(); ++j)
        if (m[j]) s.push_back(static_cast<Eigen::Index>(j));
    return s;
}

struct Solve {
    Eigen::VectorXd c;
    double min_sv = 0.0;
    double cond = 0.0;
};

Solve solve_active(const Eigen::MatrixXd& G, const Eigen::VectorXd& r, const Mask& mask, double ridge) {
    const auto s = support(mask);
    Solve out;
    out.c = Eigen::VectorXd::Zero(G.rows());
    if (s.empty()) return out;
    const auto k = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd Gs(k, k);
    Eigen::VectorXd rs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
        rs[a] = r[s[a]];
        for (Eigen::Index b = 0; b < k; ++b) Gs(a, b) = G(s[a], s[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Gs, Eigen::EigenvaluesOnly);
    const double lo = std::max(eig.eigenvalues().minCoeff(), 0.0);
    const double hi = eig.eigenvalues().maxCoeff();
    out.min_sv = std::sqrt(lo);
    out.cond = lo > 0 ? std::sqrt(hi / lo) : std::numeric_limits<double>::infinity();
    // per-column scaling: columns differ in magnitude by many decades
    Gs.diagonal().array() *= 1.0 + ridge;
    const Eigen::VectorXd cs = Gs.ldlt().solve(rs);
    for (Eigen::Index a = 0; a < k; ++a) out.c[s[a]] = cs[a];
    return out;
}

}  // namespace

SparseModel stlsq_normal(const Eigen::MatrixXd& G, const Eigen::VectorXd& r, const StlsqOptions& opts) {
    if (!(opts.threshold > 0)) throw RegressError("threshold must be positive");
    if (G.rows() != G.cols() || G.rows() != r.size()) throw RegressError("normal equations have inconsistent shapes");
    SparseModel m;
    m.threshold = opts.threshold;
    m.mask.assign(static_cast<std::size_t>(G.rows()), true);
    Solve sol;
    for (int it = 1; it <= opts.max_iters; ++it) {
        sol = solve_active(G, r, m.mask, opts.ridge);
        m.iterations = it;
        Mask next = m.mask;
        for (std::size_t j = 0; j < next.size(); ++j)
            if (next[j] && std::abs(sol.c[static_cast<Eigen::Index>(j)]) < opts.threshold) next[j] = false;
        m.history.push_back(next);
        if (next == m.mask) break;
        m.mask = std::move(next);
        if (it == opts.max_iters) sol = solve_active(G, r, m.mask, opts.ridge);
    }
    m.coef = sol.c;
    m.min_singular_value = sol.min_sv;
    m.condition_number = sol.cond;
    m.rank_deficient = m.active() > 0 && sol.min_sv < 1e-10;
    return m;
}

SparseModel stlsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, const StlsqOptions& opts) {
    if (A.rows() <= A.cols()) throw RegressError("need more rows than features");
    const double n = static_cast<double>(A.rows());
    const Eigen::MatrixXd G = A.transpose() * A / n;
    const Eigen::VectorXd r = A.transpose() * y / n;
    return stlsq_normal(G, r, opts);
}

SparseModel stlsq(const FeatureMatrix& fm, const StlsqOptions& opts) {
    SparseModel m = stlsq(fm.values, fm.y, opts);
    m.target = fm.target;
    m.features = fm.columns;
    return m;
}

SymmetryPenalty symmetry_penalty(std::span<const JetGrid> jets, const FeatureMatrix& fm,
                                 std::span<const ProlongedVectorField> generators,
                                 const std::map<std::string, double>& constants) {
    SymmetryPenalty p;
    const Eigen::Index n = fm.rows();
    const Eigen::Index k = fm.cols();
    p.rows_per_generator = n;
    p.A.resize(n * static_cast<Eigen::Index>(generators.size()), k);
    p.b.resize(p.A.rows());
    for (std::size_t g = 0; g < generators.size(); ++g) {
        std::vector<Expr> exprs;
        for (const auto& f : fm.columns) exprs.push_back(apply(generators[g], f));
        exprs.push_back(apply(generators[g], fm.target));
        const Eigen::MatrixXd v = evaluate_at(jets, exprs, fm.index, constants);
        const Eigen::Index at = static_cast<Eigen::Index>(g) * n;
        p.A.middleRows(at, n) = v.leftCols(k);
        p.b.segment(at, n) = v.col(k);
    }
    return p;
}

SparseModel stlsq_regularized(const FeatureMatrix& fm, const SymmetryPenalty& pen, double lambda,
                              const StlsqOptions& opts) {
    if (!(lambda >= 0)) throw RegressError("lambda must be non-negative");
    if (fm.rows() <= fm.cols()) throw RegressError("need more rows than features");
    const double n = static_cast<double>(fm.rows());
    Eigen::MatrixXd G = fm.values.transpose() * fm.values / n;
    Eigen::VectorXd r = fm.values.transpose() * fm.y / n;
    if (lambda > 0 && pen.A.rows() > 0) {
        if (pen.A.cols() != fm.cols()) throw RegressError("penalty rows do not match the features");
        const double np = static_cast<double>(pen.rows_per_generator);
        G += lambda * (pen.A.transpose() * pen.A) / np;
        r += lambda * (pen.A.transpose() * pen.b) / np;
    }
    SparseModel m = stlsq_normal(G, r, opts);
    m.target = fm.target;
    m.features = fm.columns;
    m.lambda = lambda;
    return m;
}

Expr model_to_equation(const SparseModel& m) {
    std::vector<Expr> terms{m.target};
    for (std::size_t j = 0; j < m.features.size(); ++j)
        if (m.mask[j]) terms.push_back(Expr(-m.coef[static_cast<Eigen::Index>(j)]) * m.features[j]);
    return simplify(Expr::sum(std::move(terms)));
}

namespace {

/// canonical monomial (coefficient 1) -> coefficient
std::map<std::string, double> monomials(const Expr& e, const std::map<std::string, double>& constants) {
    const Expr s = simplify(substitute(e, constants));
    std::map<std::string, double> out;
    std::vector<Expr> terms;
    if (s.kind() == Expr::Kind::Sum)
        terms.assign(s.children().begin(), s.children().end());
    else if (!s.is_zero())
        terms.push_back(s);
    for (const auto& t : terms) {
        double c = 1.0;
        Expr mono = t;
        if (t.is_constant()) {
            c = t.value();
            mono = Expr(1.0);
        } else if (t.kind() == Expr::Kind::Product && t.children()[0].is_constant()) {
            c = t.children()[0].value();
            mono = simplify(Expr::product({t.children().begin() + 1, t.children().end()}));
        }
        out[to_string(mono)] += c;
    }
    return out;
}

}  // namespace

std::optional<Eigen::VectorXd> project_truth(const Expr& truth, const Expr& target, const std::vector<Expr>& features,
                                             const std::map<std::string, double>& constants) {
    std::vector<std::map<std::string, double>> cols;
    cols.push_back(monomials(target, constants));
    for (const auto& f : features) cols.push_back(monomials(f, constants));
    const auto rhs = monomials(truth, constants);
    std::map<std::string, Eigen::Index> basis;
    auto index = [&](const std::string& k) { return basis.emplace(k, static_cast<Eigen::Index>(basis.size())).first->second; };
    for (const auto& c : cols)
        for (const auto& [k, v] : c) index(k);
    for (const auto& [k, v] : rhs) index(k);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(cols.size()));
    Eigen::VectorXd b = Eigen::VectorXd::Zero(A.rows());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (const auto& [k, v] : cols[j]) A(basis[k], static_cast<Eigen::Index>(j)) = v;
    for (const auto& [k, v] : rhs) b[basis[k]] = v;
    const Eigen::VectorXd c = A.completeOrthogonalDecomposition().solve(b);
    if ((A * c - b).norm() > 1e-9 * std::max(1.0, b.norm()) || std::abs(c[0]) < 1e-12) return std::nullopt;
    Eigen::VectorXd w = -c.tail(c.size() - 1) / c[0];
    for (auto& v : w) {
        // the solve leaves ulp noise on short decimals such as 1 or 0.1
        std::ostringstream os;
        os << std::setprecision(12) << v;
        v = std::abs(v) < 1e-12 ? 0.0 : std::stod(os.str());
    }
    return w;
}

SparseModel truth_model(const Expr& truth, const Expr& target, const std::vector<Expr>& features,
                        const std::map<std::string, double>& constants, double threshold) {
    auto w = project_truth(truth, target, features, constants);
    if (!w)
        throw RegressError("true equation " + to_string(truth) + " is not expressible as " + to_string(target) +
                           " = W . features");
    SparseModel m;
    m.target = target;
    m.features = features;
    m.coef = *w;
    m.threshold = threshold;
    for (auto v : *w) m.mask.push_back(v != 0.0);
    return m;
}

std::string model_to_json(const SparseModel& m, int indent) {
    nlohmann::ordered_json j;
    j["target"] = to_string(m.target);
    std::vector<std::string> f;
    for (const auto& e : m.features) f.push_back(to_string(e));
    j["features"] = f;
    j["coefficients"] = std::vector<double>(m.coef.data(), m.coef.data() + m.coef.size());
    std::vector<int> mask(m.mask.begin(), m.mask.end());
    j["mask"] = mask;
    j["threshold"] = m.threshold;
    j["lambda"] = m.lambda;
    j["iterations"] = m.iterations;
    j["min_singular_value"] = m.min_singular_value;
    j["condition_number"] = std::isfinite(m.condition_number) ? nlohmann::ordered_json(m.condition_number) : nullptr;
    j["rank_deficient"] = m.rank_deficient;
    std::vector<std::vector<int>> hist;
    for (const auto& h : m.history) hist.emplace_back(h.begin(), h.end());
    j["history"] = hist;
    j["equation"] = to_string(model_to_equation(m)) + " = 0";
    return j.dump(indent);
}

SparseModel model_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    SparseModel m;
    m.target = parse(j.at("target").get<std::string>());
    for (const auto& s : j.at("features")) m.features.push_back(parse(s.get<std::string>()));
    const auto c = j.at("coefficients").get<std::vector<double>>();
    m.coef = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
    for (int v : j.at("mask").get<std::vector<int>>()) m.mask.push_back(v != 0);
    if (m.mask.size() != m.features.size() || c.size() != m.features.size())
        throw RegressError("model file has inconsistent feature, mask and coefficient counts");
    m.threshold = j.value("threshold", 0.0);
    m.lambda = j.value("lambda", 0.0);
    m.iterations = j.value("iterations", 0);
    m.min_singular_value = j.value("min_singular_value", 0.0);
    m.condition_number = j.contains("condition_number") && j["condition_number"].is_number()
                             ? j["condition_number"].get<double>()
                             : std::numeric_limits<double>::infinity();
    m.rank_deficient = j.value("rank_deficient", false);
    if (j.contains("history"))
        for (const auto& h : j["history"]) {
            Mask mk;
            for (int v : h.get<std::vector<int>>()) mk.push_back(v != 0);
            m.history.push_back(std::move(mk));
        }
    return m;
}

IntegrationResult integrate_model(const SparseModel& m, const std::map<std::string, double>& constants,
                                  const Eigen::ArrayXd& ic, const SolverConfig& cfg, double t_start) {
    return integrate_equation(model_to_equation(m), constants, ic, cfg, t_start);
}

}  // namespace dipde
