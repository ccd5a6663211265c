#include "poly.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dipde/expr.hpp"

namespace dipde::detail {

namespace {

int sign_of(auto c) { return c < 0 ? -1 : (c > 0 ? 1 : 0); }

struct MonoLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) < 0; }
};

using Accumulator = std::map<Monomial, double, MonoLess>;

void accumulate(Accumulator& acc, const Term& t) {
    auto [it, inserted] = acc.try_emplace(t.mono, t.coef);
    if (!inserted) it->second += t.coef;
}

Poly drain(Accumulator& acc) {
    Poly p;
    p.terms.reserve(acc.size());
    for (auto& [m, c] : acc)
        if (c != 0.0) p.terms.push_back(Term{m, c});
    return p;
}

int exponent_of(const Monomial& m, const Factor& f) {
    for (const auto& fp : m)
        if (compare(fp.base, f) == 0) return fp.exp;
    return 0;
}

Monomial sorted(Monomial m) {
    std::sort(m.begin(), m.end(), [](const FactorPower& a, const FactorPower& b) { return compare(a.base, b.base) < 0; });
    return m;
}

bool has_sum_factors(const Poly& p) {
    for (const auto& t : p.terms)
        for (const auto& fp : t.mono)
            if (fp.base.kind == Factor::Kind::Sum) return true;
    return false;
}

Poly normalize_denominators(Poly p);

// Product of two terms. Exponentials merge, sum bases add exponents and
// positive results are expanded.
Poly mul_terms(const Term& a, const Term& b) {
    Monomial out;
    out.reserve(a.mono.size() + b.mono.size());
    const double coef = a.coef * b.coef;
    std::vector<std::pair<PolyPtr, int>> expand;
    std::vector<const Poly*> exps;

    auto push = [&](const FactorPower& fp) {
        if (fp.exp == 0) return;
        if (fp.base.kind == Factor::Kind::Sum && fp.exp > 0)
            expand.emplace_back(fp.base.poly, fp.exp);
        else
            out.push_back(fp);
    };
    auto split = [&](const Monomial& m) {
        Monomial rest;
        for (const auto& fp : m) {
            if (fp.base.kind == Factor::Kind::Exp)
                exps.push_back(fp.base.poly.get());
            else
                rest.push_back(fp);
        }
        return rest;
    };
    const Monomial ma = split(a.mono);
    const Monomial mb = split(b.mono);

    size_t i = 0, j = 0;
    while (i < ma.size() || j < mb.size()) {
        if (j == mb.size()) {
            push(ma[i++]);
        } else if (i == ma.size()) {
            push(mb[j++]);
        } else if (int c = compare(ma[i].base, mb[j].base); c < 0) {
            push(ma[i++]);
        } else if (c > 0) {
            push(mb[j++]);
        } else {
            push(FactorPower{ma[i].base, ma[i].exp + mb[j].exp});
            ++i;
            ++j;
        }
    }

    Poly result{{Term{std::move(out), coef}}};
    if (!exps.empty()) {
        Poly arg;
        for (const Poly* e : exps) arg = add(arg, *e);
        const Poly e = exp_of(arg);
        // splice the single exp factor (or constant) into the term
        Term& t = result.terms[0];
        t.coef *= e.terms[0].coef;
        for (const auto& fp : e.terms[0].mono) t.mono.push_back(fp);
        t.mono = sorted(std::move(t.mono));
    }
    for (auto& [base, k] : expand) result = mul(result, pow(*base, k));
    return result;
}

Poly normalize_denominators(Poly p) {
    if (p.terms.size() < 2 || !has_sum_factors(p)) return p;
    // lowest exponent per sum base over all terms (absent counts as 0)
    std::vector<FactorPower> lowest;
    for (const auto& t : p.terms)
        for (const auto& fp : t.mono) {
            if (fp.base.kind != Factor::Kind::Sum) continue;
            auto it = std::find_if(lowest.begin(), lowest.end(),
                                   [&](const FactorPower& l) { return compare(l.base, fp.base) == 0; });
            if (it == lowest.end())
                lowest.push_back(FactorPower{fp.base, std::min(fp.exp, 0)});
            else
                it->exp = std::min(it->exp, fp.exp);
        }
    bool uniform = true;
    for (const auto& t : p.terms)
        for (const auto& l : lowest)
            if (exponent_of(t.mono, l.base) != l.exp) uniform = false;
    if (uniform) return p;

    Accumulator acc;
    for (const auto& t : p.terms) {
        Monomial m;
        std::vector<std::pair<PolyPtr, int>> lift;
        for (const auto& fp : t.mono)
            if (fp.base.kind != Factor::Kind::Sum) m.push_back(fp);
        for (const auto& l : lowest) {
            int have = exponent_of(t.mono, l.base);
            m.push_back(FactorPower{l.base, l.exp});
            if (have > l.exp) lift.emplace_back(l.base.poly, have - l.exp);
        }
        Poly r{{Term{sorted(std::move(m)), t.coef}}};
        for (auto& [base, k] : lift) {
            Poly e = pow(*base, k);  // base carries no sum factors
            Accumulator inner;
            for (const auto& a : r.terms)
                for (const auto& b : e.terms)
                    for (const auto& x : mul_terms(a, b).terms) accumulate(inner, x);
            r = drain(inner);
        }
        for (const auto& x : r.terms) accumulate(acc, x);
    }
    return drain(acc);
}

Poly inverse_term(const Term& t) {
    if (t.coef == 0.0) throw ExprError("division by zero");
    Poly r = constant(1.0 / t.coef);
    for (const auto& fp : t.mono) {
        switch (fp.base.kind) {
        case Factor::Kind::Named:
        case Factor::Kind::Variable:
            r = mul(r, Poly{{Term{Monomial{FactorPower{fp.base, -fp.exp}}, 1.0}}});
            break;
        case Factor::Kind::Exp:
            r = mul(r, exp_of(scale(*fp.base.poly, -1.0)));
            break;
        case Factor::Kind::Sum:
            // negative power in the term, so the inverse is an expansion
            r = mul(r, pow(*fp.base.poly, -fp.exp));
            break;
        }
    }
    return r;
}

}  // namespace

int compare(const Factor& a, const Factor& b) {
    if (a.kind != b.kind) return sign_of(static_cast<int>(a.kind) - static_cast<int>(b.kind));
    switch (a.kind) {
    case Factor::Kind::Named:
        return sign_of(a.name.compare(b.name));
    case Factor::Kind::Variable: {
        auto c = a.var <=> b.var;
        return c < 0 ? -1 : (c > 0 ? 1 : 0);
    }
    case Factor::Kind::Exp:
    case Factor::Kind::Sum:
        if (a.poly == b.poly) return 0;
        return compare(*a.poly, *b.poly);
    }
    return 0;
}

// Reverse lexicographic: compare from the highest factor downward, so that
// `u_t`, `u*u_x`, `u_xxx` print in that order.
int compare(const Monomial& a, const Monomial& b) {
    auto i = static_cast<long>(a.size()) - 1;
    auto j = static_cast<long>(b.size()) - 1;
    while (i >= 0 && j >= 0) {
        if (int c = compare(a[i].base, b[j].base); c != 0) return c;
        if (a[i].exp != b[j].exp) return a[i].exp < b[j].exp ? -1 : 1;
        --i;
        --j;
    }
    if (i < 0 && j < 0) return 0;
    return i < 0 ? -1 : 1;
}

int compare(const Poly& a, const Poly& b) {
    const size_t n = std::min(a.terms.size(), b.terms.size());
    for (size_t k = 0; k < n; ++k) {
        if (int c = compare(a.terms[k].mono, b.terms[k].mono); c != 0) return c;
        if (a.terms[k].coef != b.terms[k].coef) return a.terms[k].coef < b.terms[k].coef ? -1 : 1;
    }
    return sign_of(static_cast<long>(a.terms.size()) - static_cast<long>(b.terms.size()));
}

Poly constant(double c) {
    Poly p;
    if (c != 0.0) p.terms.push_back(Term{{}, c});
    return p;
}

Poly from_factor(const Factor& f, int exp) {
    if (exp == 0) return constant(1.0);
    if (f.kind == Factor::Kind::Exp) return exp_of(scale(*f.poly, exp));
    if (f.kind == Factor::Kind::Sum) return pow(*f.poly, exp);
    return Poly{{Term{Monomial{FactorPower{f, exp}}, 1.0}}};
}

Poly add(const Poly& a, const Poly& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    Poly out;
    out.terms.reserve(a.terms.size() + b.terms.size());
    size_t i = 0, j = 0;
    while (i < a.terms.size() || j < b.terms.size()) {
        if (j == b.terms.size()) {
            out.terms.push_back(a.terms[i++]);
        } else if (i == a.terms.size()) {
            out.terms.push_back(b.terms[j++]);
        } else {
            int c = compare(a.terms[i].mono, b.terms[j].mono);
            if (c < 0) {
                out.terms.push_back(a.terms[i++]);
            } else if (c > 0) {
                out.terms.push_back(b.terms[j++]);
            } else {
                double s = a.terms[i].coef + b.terms[j].coef;
                if (s != 0.0) out.terms.push_back(Term{a.terms[i].mono, s});
                ++i;
                ++j;
            }
        }
    }
    return normalize_denominators(std::move(out));
}

Poly scale(const Poly& a, double s) {
    if (s == 0.0) return {};
    Poly out = a;
    for (auto& t : out.terms) t.coef *= s;
    return out;
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Accumulator acc;
    for (const auto& x : a.terms)
        for (const auto& y : b.terms)
            for (const auto& t : mul_terms(x, y).terms) accumulate(acc, t);
    return normalize_denominators(drain(acc));
}

Poly pow(const Poly& a, int k) {
    if (k == 0) return constant(1.0);
    if (k < 0) return pow(inverse(a), -k);
    Poly r = a;
    for (int i = 1; i < k; ++i) r = mul(r, a);
    return r;
}

Poly inverse(const Poly& a) {
    if (a.empty()) throw ExprError("division by zero");
    if (a.terms.size() == 1) return inverse_term(a.terms[0]);

    // monomial content: lowest exponent of each non-exp factor (absent = 0)
    std::vector<FactorPower> content;
    {
        std::vector<Factor> bases;
        for (const auto& t : a.terms)
            for (const auto& fp : t.mono)
                if (fp.base.kind != Factor::Kind::Exp &&
                    std::none_of(bases.begin(), bases.end(), [&](const Factor& f) { return compare(f, fp.base) == 0; }))
                    bases.push_back(fp.base);
        for (const auto& f : bases) {
            int lo = exponent_of(a.terms[0].mono, f);
            for (const auto& t : a.terms) lo = std::min(lo, exponent_of(t.mono, f));
            // positive content only when present in every term (min handles it)
            if (lo != 0) content.push_back(FactorPower{f, lo});
        }
        // a shared exponential factor
        const Factor* shared_exp = nullptr;
        bool all_same = true;
        for (const auto& t : a.terms) {
            const Factor* e = nullptr;
            for (const auto& fp : t.mono)
                if (fp.base.kind == Factor::Kind::Exp) e = &fp.base;
            if (!e) {
                all_same = false;
                break;
            }
            if (!shared_exp)
                shared_exp = e;
            else if (compare(*shared_exp, *e) != 0)
                all_same = false;
        }
        if (all_same && shared_exp) content.push_back(FactorPower{*shared_exp, 1});
    }

    Poly base;
    for (const auto& t : a.terms) {
        Monomial m;
        for (const auto& fp : t.mono) {
            int e = fp.exp;
            for (const auto& c : content)
                if (compare(c.base, fp.base) == 0) e -= c.exp;
            if (e != 0) m.push_back(FactorPower{fp.base, e});
        }
        base.terms.push_back(Term{std::move(m), t.coef});
    }
    // content removal can reorder terms; re-canonicalize
    {
        Accumulator acc;
        for (const auto& t : base.terms) accumulate(acc, t);
        base = drain(acc);
    }
    if (base.empty()) throw ExprError("division by zero");

    Term content_term{sorted(content), 1.0};
    Poly inv_content = inverse_term(content_term);
    if (base.terms.size() == 1) return mul(inv_content, inverse_term(base.terms[0]));

    const double lead = base.terms[0].coef;
    base = scale(base, 1.0 / lead);
    Factor f;
    f.kind = Factor::Kind::Sum;
    f.poly = std::make_shared<const Poly>(std::move(base));
    Poly atom{{Term{Monomial{FactorPower{f, -1}}, 1.0 / lead}}};
    return mul(inv_content, atom);
}

Poly exp_of(const Poly& arg) {
    double c0 = 0.0;
    Poly rest;
    for (const auto& t : arg.terms) {
        if (t.mono.empty())
            c0 += t.coef;
        else
            rest.terms.push_back(t);
    }
    const double k = std::exp(c0);
    if (rest.empty()) return constant(k);
    Factor f;
    f.kind = Factor::Kind::Exp;
    f.poly = std::make_shared<const Poly>(std::move(rest));
    return Poly{{Term{Monomial{FactorPower{f, 1}}, k}}};
}

Poly diff(const Poly& p, const JetVariable& v) {
    Accumulator acc;
    for (const auto& t : p.terms) {
        for (size_t k = 0; k < t.mono.size(); ++k) {
            const auto& fp = t.mono[k];
            switch (fp.base.kind) {
            case Factor::Kind::Named:
                break;
            case Factor::Kind::Variable: {
                if (fp.base.var != v) break;
                Monomial m = t.mono;
                if (fp.exp == 1)
                    m.erase(m.begin() + static_cast<long>(k));
                else
                    m[k].exp -= 1;
                accumulate(acc, Term{std::move(m), t.coef * fp.exp});
                break;
            }
            case Factor::Kind::Exp: {
                Poly inner = diff(*fp.base.poly, v);
                if (inner.empty()) break;
                for (const auto& x : mul(Poly{{t}}, inner).terms) accumulate(acc, x);
                break;
            }
            case Factor::Kind::Sum: {
                Poly inner = diff(*fp.base.poly, v);
                if (inner.empty()) break;
                Monomial m = t.mono;
                m[k].exp -= 1;
                for (const auto& x : mul(Poly{{Term{std::move(m), t.coef * fp.exp}}}, inner).terms) accumulate(acc, x);
                break;
            }
            }
        }
    }
    return normalize_denominators(drain(acc));
}

void collect_variables(const Poly& p, std::set<JetVariable>& out) {
    for (const auto& t : p.terms)
        for (const auto& fp : t.mono) {
            if (fp.base.kind == Factor::Kind::Variable)
                out.insert(fp.base.var);
            else if (fp.base.poly)
                collect_variables(*fp.base.poly, out);
        }
}

}  // namespace dipde::detail
