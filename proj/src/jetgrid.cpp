#include "dipde/jetgrid.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace dipde {

namespace {

JetVariable ux(int k) { return JetVariable::dependent(0, MultiIndex(std::vector<int>(k, 1))); }
const JetVariable kU = JetVariable::dependent(0, MultiIndex{});
const JetVariable kUt = JetVariable::dependent(0, MultiIndex{0});

}  // namespace

JetGrid::JetGrid(const TrajectoryGrid& traj, int max_order, int t_begin, int t_end, std::map<JetVariable, Field> values)
    : x_(traj.x), meta_(traj.meta), max_order_(max_order), t_begin_(t_begin), t_end_(t_end), values_(std::move(values)) {
    t_ = traj.t.segment(t_begin, t_end - t_begin + 1);
    vars_ = {JetVariable::independent(0), JetVariable::independent(1)};
    for (const auto& [v, f] : values_) {
        if (f.rows() != rows() || f.cols() != cols()) throw GridError("jet field shape mismatch");
        vars_.push_back(v);
    }
}

bool JetGrid::has(const JetVariable& v) const {
    return v.is_independent() ? v.index() < 2 : values_.count(v) > 0;
}

const Field& JetGrid::values(const JetVariable& v) const {
    auto it = values_.find(v);
    if (it == values_.end()) throw GridError("jet grid has no values for this coordinate");
    return it->second;
}

void JetGrid::point(int row, int col, std::span<double> slots) const {
    slots[0] = t_[row];
    slots[1] = x_[col];
    std::size_t k = 2;
    for (const auto& [v, f] : values_) slots[k++] = f(row, col);
}

JetGrid finite_differences(const TrajectoryGrid& traj, int n) {
    if (n < 0 || n > 4) throw GridError("finite_differences supports spatial orders 0..4");
    if (traj.nx() < 2 * n + 1 || traj.nx() < 5) throw GridError("grid too small: need at least 5 x samples");
    if (traj.nt() < 3) throw GridError("grid too small: need at least 3 time samples");
    const double h = traj.dx();
    const double dt = traj.dt();
    const int nt = traj.nt();
    const int rows = nt - 2;

    std::map<JetVariable, Field> vals;
    vals[kU] = traj.u.middleRows(1, rows);
    vals[kUt] = (traj.u.bottomRows(rows) - traj.u.topRows(rows)) / (2.0 * dt);
    for (int k = 1; k <= n; ++k) {
        Field d(rows, traj.nx());
        for (int r = 0; r < rows; ++r) d.row(r) = central_difference(traj.u.row(r + 1).transpose(), k, h).transpose();
        vals[ux(k)] = std::move(d);
    }
    for (const auto& [v, f] : vals)
        if (!f.allFinite()) throw GridError("non-finite derivative estimate");
    return JetGrid(traj, n, 1, nt - 2, std::move(vals));
}

FeatureMatrix evaluate_features(const JetGrid& jet, const std::vector<Expr>& feats, const Expr& target,
                                const std::map<std::string, double>& constants, const FeatureOptions& opts,
                                int traj_id) {
    if (opts.t_stride < 1 || opts.x_stride < 1) throw GridError("strides must be >= 1");
    const auto& slots = jet.variables();
    auto compile = [&](const Expr& e) {
        for (const auto& v : jet_variables(e))
            if (!jet.has(v)) throw MissingSymbolError(JetSpace::standard().name(v));
        return CompiledExpr(e, slots, constants);
    };
    std::vector<CompiledExpr> f;
    for (const auto& e : feats) f.push_back(compile(e));
    CompiledExpr y = compile(target);

    FeatureMatrix fm;
    fm.columns = feats;
    fm.target = target;
    const Eigen::Index cap = ((jet.rows() + opts.t_stride - 1) / opts.t_stride) *
                             static_cast<Eigen::Index>((jet.cols() + opts.x_stride - 1) / opts.x_stride);
    fm.values.resize(cap, static_cast<Eigen::Index>(feats.size()));
    fm.y.resize(cap);
    fm.index.reserve(cap);
    std::vector<double> buf(slots.size());
    Eigen::Index n = 0;
    for (int r = 0; r < jet.rows(); r += opts.t_stride)
        for (int c = 0; c < jet.cols(); c += opts.x_stride) {
            jet.point(r, c, buf);
            bool ok = true;
            for (std::size_t j = 0; j < f.size(); ++j) {
                const double v = f[j](buf);
                ok = ok && std::isfinite(v);
                fm.values(n, static_cast<Eigen::Index>(j)) = v;
            }
            const double yv = y(buf);
            if (!ok || !std::isfinite(yv)) {
                ++fm.dropped;
                continue;
            }
            fm.y[n] = yv;
            fm.index.push_back({traj_id, jet.t_begin() + r, c});
            ++n;
        }
    fm.values.conservativeResize(n, Eigen::NoChange);
    fm.y.conservativeResize(n);
    return fm;
}

FeatureMatrix concatenate(std::span<const FeatureMatrix> parts) {
    if (parts.empty()) throw GridError("nothing to concatenate");
    FeatureMatrix out;
    out.columns = parts[0].columns;
    out.target = parts[0].target;
    Eigen::Index rows = 0;
    for (const auto& p : parts) {
        if (p.columns != out.columns || !(p.target == out.target))
            throw GridError("feature matrices have different columns");
        rows += p.rows();
        out.dropped += p.dropped;
    }
    out.values.resize(rows, static_cast<Eigen::Index>(out.columns.size()));
    out.y.resize(rows);
    Eigen::Index at = 0;
    for (const auto& p : parts) {
        out.values.middleRows(at, p.rows()) = p.values;
        out.y.segment(at, p.rows()) = p.y;
        out.index.insert(out.index.end(), p.index.begin(), p.index.end());
        at += p.rows();
    }
    return out;
}

Eigen::MatrixXd evaluate_at(std::span<const JetGrid> jets, const std::vector<Expr>& exprs,
                            const std::vector<PointIndex>& index, const std::map<std::string, double>& constants) {
    if (jets.empty()) throw GridError("no jet grids");
    const auto& slots = jets[0].variables();
    for (const auto& j : jets)
        if (j.variables() != slots) throw GridError("jet grids carry different coordinates");
    std::vector<CompiledExpr> f;
    for (const auto& e : exprs) {
        for (const auto& v : jet_variables(e))
            if (!jets[0].has(v)) throw MissingSymbolError(JetSpace::standard().name(v));
        f.emplace_back(e, slots, constants);
    }
    Eigen::MatrixXd out(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(exprs.size()));
    std::vector<double> buf(slots.size());
    for (std::size_t k = 0; k < index.size(); ++k) {
        const auto& p = index[k];
        const auto& jet = jets[p.traj];
        jet.point(p.t - jet.t_begin(), p.x, buf);
        for (std::size_t j = 0; j < f.size(); ++j)
            out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = f[j](buf);
    }
    return out;
}

void write_features_csv(const FeatureMatrix& fm, const std::string& path, const JetSpace& space) {
    std::ofstream os(path);
    if (!os) throw GridError("cannot write " + path);
    auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
    os << "traj,t_index,x_index";
    for (const auto& c : fm.columns) os << ',' << quoted(to_string(c, space));
    os << ',' << quoted(to_string(fm.target, space)) << '\n';
    char buf[32];
    auto num = [&](double v) {
        auto r = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, r.ptr);
    };
    for (Eigen::Index r = 0; r < fm.rows(); ++r) {
        const auto& p = fm.index[static_cast<std::size_t>(r)];
        os << p.traj << ',' << p.t << ',' << p.x;
        for (Eigen::Index c = 0; c < fm.cols(); ++c) os << ',' << num(fm.values(r, c));
        os << ',' << num(fm.y[r]) << '\n';
    }
}

}  // namespace dipde
