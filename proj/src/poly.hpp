#pragma once

// Canonical polynomial form behind Expr::simplify and the derivative
// operators. Not part of the public interface.
//
// A Poly is a sorted sum of terms coef * monomial. A monomial is a sorted
// product of factors raised to nonzero integer powers, where a factor is a
// named constant, a jet variable, exp(Poly) (always power 1, at most one per
// monomial), or a sum base (a Poly with >= 2 terms, leading coefficient 1,
// no common monomial content) which only ever carries negative powers.
// Positive powers of sums are always expanded. All terms of a Poly carry the
// same sum-base exponents (common denominator).

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "dipde/jet.hpp"

namespace dipde::detail {

struct Poly;
using PolyPtr = std::shared_ptr<const Poly>;

struct Factor {
    enum class Kind : int { Named = 0, Exp = 1, Sum = 2, Variable = 3 };
    Kind kind = Kind::Named;
    JetVariable var = JetVariable::independent(0);
    std::string name;
    PolyPtr poly;

    static Factor named(std::string n) {
        Factor f;
        f.kind = Kind::Named;
        f.name = std::move(n);
        return f;
    }
    static Factor variable(JetVariable v) {
        Factor f;
        f.kind = Kind::Variable;
        f.var = std::move(v);
        return f;
    }
};

struct FactorPower {
    Factor base;
    int exp;
};

using Monomial = std::vector<FactorPower>;

struct Term {
    Monomial mono;
    double coef;
};

struct Poly {
    std::vector<Term> terms;

    bool empty() const { return terms.empty(); }
    /// Single term with empty monomial (or no terms).
    bool is_constant() const { return terms.empty() || (terms.size() == 1 && terms[0].mono.empty()); }
    double constant_value() const { return terms.empty() ? 0.0 : terms[0].coef; }
};

int compare(const Factor& a, const Factor& b);
int compare(const Monomial& a, const Monomial& b);
int compare(const Poly& a, const Poly& b);

Poly constant(double c);
Poly from_factor(const Factor& f, int exp = 1);
Poly add(const Poly& a, const Poly& b);
Poly scale(const Poly& a, double s);
Poly mul(const Poly& a, const Poly& b);
Poly pow(const Poly& a, int k);
Poly inverse(const Poly& a);
Poly exp_of(const Poly& arg);

Poly diff(const Poly& p, const JetVariable& v);

void collect_variables(const Poly& p, std::set<JetVariable>& out);

}  // namespace dipde::detail
