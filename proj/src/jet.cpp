#include "dipde/jet.hpp"

#include <algorithm>

namespace dipde {

MultiIndex::MultiIndex(std::initializer_list<int> idx) : idx_(idx) {
    std::sort(idx_.begin(), idx_.end());
}

MultiIndex::MultiIndex(std::vector<int> idx) : idx_(std::move(idx)) {
    std::sort(idx_.begin(), idx_.end());
}

int MultiIndex::count(int i) const {
    return static_cast<int>(std::count(idx_.begin(), idx_.end(), i));
}

MultiIndex MultiIndex::with(int i) const {
    auto v = idx_;
    v.insert(std::upper_bound(v.begin(), v.end(), i), i);
    MultiIndex out;
    out.idx_ = std::move(v);
    return out;
}

JetSpace::JetSpace(std::vector<std::string> independent, std::vector<std::string> dependent, int order,
                   bool evolution_only)
    : indep_(std::move(independent)), dep_(std::move(dependent)), order_(order), evolution_only_(evolution_only) {
    if (indep_.empty() || dep_.empty()) throw JetError("jet space needs at least one independent and one dependent variable");
    if (order_ < 0) throw JetError("negative jet order");
    for (const auto& n : indep_)
        if (n.size() != 1) throw JetError("independent variable names must be single characters: '" + n + "'");
    if (evolution_only_ && indep_.size() < 2) evolution_only_ = false;
}

const JetSpace& JetSpace::standard() {
    static const JetSpace space({"t", "x"}, {"u"}, 4, true);
    return space;
}

std::vector<MultiIndex> JetSpace::derivative_indices() const {
    std::vector<MultiIndex> out;
    if (evolution_only_) {
        // index 0 is time: u_t, then pure derivatives in the remaining variables
        if (order_ >= 1) out.push_back(MultiIndex{0});
        std::vector<std::vector<int>> level{{}};
        for (int k = 1; k <= order_; ++k) {
            std::vector<std::vector<int>> next;
            for (const auto& J : level) {
                int lo = J.empty() ? 1 : J.back();
                for (int i = lo; i < p(); ++i) {
                    auto K = J;
                    K.push_back(i);
                    next.push_back(K);
                }
            }
            for (const auto& J : next) out.emplace_back(J);
            level = std::move(next);
        }
    } else {
        std::vector<std::vector<int>> level{{}};
        for (int k = 1; k <= order_; ++k) {
            std::vector<std::vector<int>> next;
            for (const auto& J : level) {
                int lo = J.empty() ? 0 : J.back();
                for (int i = lo; i < p(); ++i) {
                    auto K = J;
                    K.push_back(i);
                    next.push_back(K);
                }
            }
            for (const auto& J : next) out.emplace_back(J);
            level = std::move(next);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<JetVariable> JetSpace::coordinates() const {
    std::vector<JetVariable> out;
    for (int i = 0; i < p(); ++i) out.push_back(JetVariable::independent(i));
    for (int a = 0; a < q(); ++a) out.push_back(JetVariable::dependent(a));
    const auto Js = derivative_indices();
    for (int a = 0; a < q(); ++a)
        for (const auto& J : Js) out.push_back(JetVariable::dependent(a, J));
    return out;
}

bool JetSpace::contains(const JetVariable& v) const {
    if (v.is_independent()) return v.index() >= 0 && v.index() < p();
    if (v.index() < 0 || v.index() >= q()) return false;
    const auto& J = v.multi_index();
    if (J.order() > order_) return false;
    for (int i : J.indices())
        if (i < 0 || i >= p()) return false;
    if (evolution_only_ && J.count(0) > 0 && J.order() > 1) return false;
    return true;
}

std::string JetSpace::name(const JetVariable& v) const {
    if (v.is_independent()) {
        if (v.index() < p()) return indep_[v.index()];
        return "x" + std::to_string(v.index());
    }
    std::string s = v.index() < q() ? dep_[v.index()] : "u" + std::to_string(v.index());
    if (!v.multi_index().empty()) {
        s += '_';
        for (int i : v.multi_index().indices()) s += i < p() ? indep_[i] : "?";
    }
    return s;
}

std::optional<int> JetSpace::independent_index(std::string_view name) const {
    for (int i = 0; i < p(); ++i)
        if (indep_[i] == name) return i;
    return std::nullopt;
}

std::optional<JetVariable> JetSpace::lookup(std::string_view name) const {
    if (auto i = independent_index(name)) return JetVariable::independent(*i);
    for (int a = 0; a < q(); ++a) {
        const auto& d = dep_[a];
        if (name == d) return JetVariable::dependent(a);
        if (name.size() > d.size() + 1 && name.substr(0, d.size()) == d && name[d.size()] == '_') {
            std::vector<int> idx;
            for (char c : name.substr(d.size() + 1)) {
                auto i = independent_index(std::string_view(&c, 1));
                if (!i) {
                    idx.clear();
                    break;
                }
                idx.push_back(*i);
            }
            if (!idx.empty()) return JetVariable::dependent(a, MultiIndex(std::move(idx)));
        }
    }
    return std::nullopt;
}

}  // namespace dipde
