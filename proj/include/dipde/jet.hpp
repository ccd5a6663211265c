#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dipde {

/// Sorted list of independent-variable indices (0-based). Empty means u itself.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> idx);
    explicit MultiIndex(std::vector<int> idx);

    int order() const { return static_cast<int>(idx_.size()); }
    bool empty() const { return idx_.empty(); }
    const std::vector<int>& indices() const { return idx_; }
    int count(int i) const;

    /// J extended by one more index i (the J,i of total derivatives).
    MultiIndex with(int i) const;

    auto operator<=>(const MultiIndex& o) const {
        if (auto c = order() <=> o.order(); c != 0) return c;
        return idx_ <=> o.idx_;
    }
    bool operator==(const MultiIndex&) const = default;

private:
    std::vector<int> idx_;
};

/// A coordinate of jet space: either an independent variable x^i or a
/// derivative u^alpha_J (J empty for u^alpha).
class JetVariable {
public:
    static JetVariable independent(int i) { return JetVariable(true, i, {}); }
    static JetVariable dependent(int alpha, MultiIndex J = {}) {
        return JetVariable(false, alpha, std::move(J));
    }

    bool is_independent() const { return indep_; }
    bool is_dependent() const { return !indep_; }
    /// index i for independent variables, alpha for dependent ones
    int index() const { return index_; }
    const MultiIndex& multi_index() const { return J_; }
    int order() const { return indep_ ? 0 : J_.order(); }

    auto operator<=>(const JetVariable& o) const {
        if (indep_ != o.indep_) return indep_ ? std::strong_ordering::less : std::strong_ordering::greater;
        if (indep_) return index_ <=> o.index_;
        if (auto c = index_ <=> o.index_; c != 0) return c;
        return J_ <=> o.J_;
    }
    bool operator==(const JetVariable&) const = default;

private:
    JetVariable(bool indep, int index, MultiIndex J) : indep_(indep), index_(index), J_(std::move(J)) {}
    bool indep_;
    int index_;
    MultiIndex J_;
};

class JetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Names and bounds of X x U^(n). Independent variable names must be single
/// characters so that derivative names like `u_tx` parse unambiguously.
class JetSpace {
public:
    JetSpace(std::vector<std::string> independent, std::vector<std::string> dependent, int order,
             bool evolution_only = true);

    /// (t, x; u), order 4, derivatives restricted to u_t plus pure x-derivatives.
    static const JetSpace& standard();

    int p() const { return static_cast<int>(indep_.size()); }
    int q() const { return static_cast<int>(dep_.size()); }
    int order() const { return order_; }
    /// Only u_t and pure spatial derivatives are coordinates (first-order in time).
    bool evolution_only() const { return evolution_only_; }
    const std::vector<std::string>& independent_names() const { return indep_; }
    const std::vector<std::string>& dependent_names() const { return dep_; }

    /// Multi-indices J with 1 <= |J| <= order that belong to this jet space.
    std::vector<MultiIndex> derivative_indices() const;
    /// Full coordinate list: independent vars, then u, then derivatives.
    std::vector<JetVariable> coordinates() const;

    bool contains(const JetVariable& v) const;

    std::string name(const JetVariable& v) const;
    std::optional<JetVariable> lookup(std::string_view name) const;
    std::optional<int> independent_index(std::string_view name) const;

    bool operator==(const JetSpace&) const = default;

private:
    std::vector<std::string> indep_;
    std::vector<std::string> dep_;
    int order_;
    bool evolution_only_;
};

}  // namespace dipde
