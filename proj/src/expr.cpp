#include "dipde/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>

#include "poly.hpp"

namespace dipde {

struct Expr::Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    JetVariable var = JetVariable::independent(0);
    std::string symbol;
    int exponent = 0;
    std::vector<Expr> children;
};

namespace {

using detail::Factor;
using detail::Poly;

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Constant;
    n->value = c;
    node_ = std::move(n);
}

Expr::Expr(JetVariable v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Variable;
    n->var = std::move(v);
    node_ = std::move(n);
}

Expr Expr::constant(double c) { return Expr(c); }
Expr Expr::variable(JetVariable v) { return Expr(std::move(v)); }

Expr Expr::named(std::string symbol) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Named;
    n->symbol = std::move(symbol);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::sum(std::vector<Expr> terms) {
    if (terms.empty()) return Expr(0.0);
    if (terms.size() == 1) return terms.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Sum;
    n->children = std::move(terms);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::product(std::vector<Expr> factors) {
    if (factors.empty()) return Expr(1.0);
    if (factors.size() == 1) return factors.front();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Product;
    n->children = std::move(factors);
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::power(Expr base, int exponent) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Power;
    n->exponent = exponent;
    n->children.push_back(std::move(base));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::exp(Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Exp;
    n->children.push_back(std::move(arg));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::quotient(Expr numerator, Expr denominator) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Quotient;
    n->children.push_back(std::move(numerator));
    n->children.push_back(std::move(denominator));
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const JetVariable& Expr::variable() const { return node_->var; }
const std::string& Expr::symbol() const { return node_->symbol; }
int Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::children() const { return node_->children; }

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = static_cast<int>(a.kind()) <=> static_cast<int>(b.kind()); c != 0) return c;
    switch (a.kind()) {
    case Expr::Kind::Constant:
        if (a.value() < b.value()) return std::strong_ordering::less;
        if (a.value() > b.value()) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    case Expr::Kind::Variable:
        return a.variable() <=> b.variable();
    case Expr::Kind::Named:
        return a.symbol() <=> b.symbol();
    case Expr::Kind::Power:
        if (auto c = a.exponent() <=> b.exponent(); c != 0) return c;
        break;
    default:
        break;
    }
    auto ca = a.children();
    auto cb = b.children();
    if (auto c = ca.size() <=> cb.size(); c != 0) return c;
    for (size_t i = 0; i < ca.size(); ++i)
        if (auto c = ca[i] <=> cb[i]; c != 0) return c;
    return std::strong_ordering::equal;
}

bool operator==(const Expr& a, const Expr& b) { return (a <=> b) == 0; }

Expr operator+(const Expr& a, const Expr& b) { return Expr::sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::sum({a, Expr::product({Expr(-1.0), b})}); }
Expr operator-(const Expr& a) { return Expr::product({Expr(-1.0), a}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::quotient(a, b); }
Expr pow(const Expr& base, int exponent) { return Expr::power(base, exponent); }
Expr exp(const Expr& arg) { return Expr::exp(arg); }

namespace sym {
Expr t() { return Expr(JetVariable::independent(0)); }
Expr x() { return Expr(JetVariable::independent(1)); }
Expr u(std::string_view derivs) {
    if (derivs.empty()) return Expr(JetVariable::dependent(0));
    auto v = JetSpace::standard().lookup("u_" + std::string(derivs));
    if (!v) throw ExprError("bad derivative suffix '" + std::string(derivs) + "'");
    return Expr(*v);
}
Expr c(std::string symbol) { return Expr::named(std::move(symbol)); }
}  // namespace sym

// ---------------------------------------------------------------------------
// canonical form

namespace {

Poly to_poly(const Expr& e) {
    switch (e.kind()) {
    case Expr::Kind::Constant:
        return detail::constant(e.value());
    case Expr::Kind::Variable:
        return detail::from_factor(Factor::variable(e.variable()));
    case Expr::Kind::Named:
        return detail::from_factor(Factor::named(e.symbol()));
    case Expr::Kind::Sum: {
        Poly acc;
        for (const auto& c : e.children()) acc = detail::add(acc, to_poly(c));
        return acc;
    }
    case Expr::Kind::Product: {
        Poly acc = detail::constant(1.0);
        for (const auto& c : e.children()) {
            acc = detail::mul(acc, to_poly(c));
            if (acc.empty()) break;
        }
        return acc;
    }
    case Expr::Kind::Power:
        return detail::pow(to_poly(e.children()[0]), e.exponent());
    case Expr::Kind::Exp:
        return detail::exp_of(to_poly(e.children()[0]));
    case Expr::Kind::Quotient:
        return detail::mul(to_poly(e.children()[0]), detail::inverse(to_poly(e.children()[1])));
    }
    return {};
}

Expr to_expr(const Poly& p);

Expr factor_expr(const detail::FactorPower& fp) {
    switch (fp.base.kind) {
    case Factor::Kind::Named: {
        Expr b = Expr::named(fp.base.name);
        return fp.exp == 1 ? b : Expr::power(b, fp.exp);
    }
    case Factor::Kind::Variable: {
        Expr b(fp.base.var);
        return fp.exp == 1 ? b : Expr::power(b, fp.exp);
    }
    case Factor::Kind::Exp:
        return Expr::exp(to_expr(*fp.base.poly));
    case Factor::Kind::Sum:
        return Expr::power(to_expr(*fp.base.poly), fp.exp);
    }
    return Expr();
}

Expr to_expr(const Poly& p) {
    if (p.empty()) return Expr(0.0);
    std::vector<Expr> terms;
    terms.reserve(p.terms.size());
    for (const auto& t : p.terms) {
        std::vector<Expr> factors;
        if (t.coef != 1.0 || t.mono.empty()) factors.emplace_back(t.coef);
        for (const auto& fp : t.mono) factors.push_back(factor_expr(fp));
        terms.push_back(Expr::product(std::move(factors)));
    }
    return Expr::sum(std::move(terms));
}

Poly variable_poly(const JetVariable& v) { return detail::from_factor(Factor::variable(v)); }

}  // namespace

Expr simplify(const Expr& e) { return to_expr(to_poly(e)); }

bool is_identically_zero(const Expr& e) { return to_poly(e).empty(); }

Expr partial_derivative(const Expr& e, const JetVariable& v) { return to_expr(detail::diff(to_poly(e), v)); }

namespace {

Poly total_derivative_poly(const Poly& p, int i, int max_order) {
    Poly out = detail::diff(p, JetVariable::independent(i));
    std::set<JetVariable> vars;
    detail::collect_variables(p, vars);
    for (const auto& v : vars) {
        if (!v.is_dependent()) continue;
        Poly d = detail::diff(p, v);
        if (d.empty()) continue;
        JetVariable next = JetVariable::dependent(v.index(), v.multi_index().with(i));
        if (next.order() > max_order)
            throw DerivativeCapError("total derivative needs order " + std::to_string(next.order()) +
                                     " above cap " + std::to_string(max_order));
        out = detail::add(out, detail::mul(variable_poly(next), d));
    }
    return out;
}

}  // namespace

Expr total_derivative(const Expr& e, int i, int max_order) {
    return to_expr(total_derivative_poly(to_poly(e), i, max_order));
}

Expr total_derivative(const Expr& e, const MultiIndex& J, int max_order) {
    Poly p = to_poly(e);
    for (int i : J.indices()) p = total_derivative_poly(p, i, max_order);
    return to_expr(p);
}

// ---------------------------------------------------------------------------
// inspection and substitution

namespace {

void walk(const Expr& e, const std::function<void(const Expr&)>& f) {
    f(e);
    for (const auto& c : e.children()) walk(c, f);
}

Expr rebuild(const Expr& e, const std::function<std::optional<Expr>(const Expr&)>& leaf) {
    if (auto r = leaf(e)) return *r;
    if (e.children().empty()) return e;
    std::vector<Expr> kids;
    kids.reserve(e.children().size());
    for (const auto& c : e.children()) kids.push_back(rebuild(c, leaf));
    switch (e.kind()) {
    case Expr::Kind::Sum:
        return Expr::sum(std::move(kids));
    case Expr::Kind::Product:
        return Expr::product(std::move(kids));
    case Expr::Kind::Power:
        return Expr::power(kids[0], e.exponent());
    case Expr::Kind::Exp:
        return Expr::exp(kids[0]);
    case Expr::Kind::Quotient:
        return Expr::quotient(kids[0], kids[1]);
    default:
        return e;
    }
}

}  // namespace

std::set<JetVariable> jet_variables(const Expr& e) {
    std::set<JetVariable> out;
    walk(e, [&](const Expr& n) {
        if (n.kind() == Expr::Kind::Variable) out.insert(n.variable());
    });
    return out;
}

std::set<std::string> named_constants(const Expr& e) {
    std::set<std::string> out;
    walk(e, [&](const Expr& n) {
        if (n.kind() == Expr::Kind::Named) out.insert(n.symbol());
    });
    return out;
}

int max_derivative_order(const Expr& e) {
    int k = 0;
    for (const auto& v : jet_variables(e)) k = std::max(k, v.order());
    return k;
}

bool depends_on(const Expr& e, const JetVariable& v) {
    bool found = false;
    walk(e, [&](const Expr& n) {
        if (n.kind() == Expr::Kind::Variable && n.variable() == v) found = true;
    });
    return found;
}

Expr substitute(const Expr& e, const std::map<std::string, double>& values) {
    return rebuild(e, [&](const Expr& n) -> std::optional<Expr> {
        if (n.kind() != Expr::Kind::Named) return std::nullopt;
        auto it = values.find(n.symbol());
        if (it == values.end()) return std::nullopt;
        return Expr(it->second);
    });
}

Expr substitute(const Expr& e, const JetVariable& v, const Expr& replacement) {
    return rebuild(e, [&](const Expr& n) -> std::optional<Expr> {
        if (n.kind() == Expr::Kind::Variable && n.variable() == v) return replacement;
        return std::nullopt;
    });
}

std::vector<Expr> denominators(const Expr& e) {
    std::vector<Expr> out;
    walk(e, [&](const Expr& n) {
        if (n.kind() == Expr::Kind::Power && n.exponent() < 0) out.push_back(n.children()[0]);
        if (n.kind() == Expr::Kind::Quotient) out.push_back(n.children()[1]);
    });
    return out;
}

// ---------------------------------------------------------------------------
// evaluation

namespace {

double eval(const Expr& e, const Binding& b, const JetSpace& space) {
    switch (e.kind()) {
    case Expr::Kind::Constant:
        return e.value();
    case Expr::Kind::Variable:
        if (const double* v = b.find(e.variable())) return *v;
        throw MissingSymbolError(space.name(e.variable()));
    case Expr::Kind::Named:
        if (const double* v = b.find(e.symbol())) return *v;
        throw MissingSymbolError(e.symbol());
    case Expr::Kind::Sum: {
        double s = 0.0;
        for (const auto& c : e.children()) s += eval(c, b, space);
        return s;
    }
    case Expr::Kind::Product: {
        double s = 1.0;
        for (const auto& c : e.children()) s *= eval(c, b, space);
        return s;
    }
    case Expr::Kind::Power:
        return std::pow(eval(e.children()[0], b, space), e.exponent());
    case Expr::Kind::Exp:
        return std::exp(eval(e.children()[0], b, space));
    case Expr::Kind::Quotient:
        return eval(e.children()[0], b, space) / eval(e.children()[1], b, space);
    }
    return 0.0;
}

}  // namespace

EvalResult evaluate(const Expr& e, const Binding& b, const JetSpace& space) { return EvalResult{eval(e, b, space)}; }

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<JetVariable>& slots,
                           const std::map<std::string, double>& constants, const JetSpace& space) {
    emit(e, slots, constants, space, 1);
    if (max_stack_ > 256) throw ExprError("expression too deep to compile");
}

void CompiledExpr::emit(const Expr& e, const std::vector<JetVariable>& slots,
                        const std::map<std::string, double>& constants, const JetSpace& space, int depth) {
    max_stack_ = std::max(max_stack_, depth);
    switch (e.kind()) {
    case Expr::Kind::Constant:
        code_.push_back({Op::Const, 0, e.value()});
        return;
    case Expr::Kind::Variable: {
        auto it = std::find(slots.begin(), slots.end(), e.variable());
        if (it == slots.end()) throw MissingSymbolError(space.name(e.variable()));
        code_.push_back({Op::Load, static_cast<int>(it - slots.begin()), 0.0});
        return;
    }
    case Expr::Kind::Named: {
        auto it = constants.find(e.symbol());
        if (it == constants.end()) throw MissingSymbolError(e.symbol());
        code_.push_back({Op::Const, 0, it->second});
        return;
    }
    case Expr::Kind::Sum:
    case Expr::Kind::Product: {
        int k = 0;
        for (const auto& c : e.children()) emit(c, slots, constants, space, depth + k++);
        code_.push_back({e.kind() == Expr::Kind::Sum ? Op::Add : Op::Mul, k, 0.0});
        return;
    }
    case Expr::Kind::Power:
        emit(e.children()[0], slots, constants, space, depth);
        code_.push_back({Op::Pow, e.exponent(), 0.0});
        return;
    case Expr::Kind::Exp:
        emit(e.children()[0], slots, constants, space, depth);
        code_.push_back({Op::Exp, 0, 0.0});
        return;
    case Expr::Kind::Quotient:
        emit(e.children()[0], slots, constants, space, depth);
        emit(e.children()[1], slots, constants, space, depth + 1);
        code_.push_back({Op::Div, 0, 0.0});
        return;
    }
}

double CompiledExpr::operator()(std::span<const double> slot_values) const {
    std::array<double, 258> stack;
    int top = 0;
    for (const auto& in : code_) {
        switch (in.op) {
        case Op::Const:
            stack[top++] = in.value;
            break;
        case Op::Load:
            stack[top++] = slot_values[static_cast<size_t>(in.arg)];
            break;
        case Op::Add: {
            double s = 0.0;
            for (int i = top - in.arg; i < top; ++i) s += stack[i];
            top -= in.arg;
            stack[top++] = s;
            break;
        }
        case Op::Mul: {
            double s = 1.0;
            for (int i = top - in.arg; i < top; ++i) s *= stack[i];
            top -= in.arg;
            stack[top++] = s;
            break;
        }
        case Op::Pow: {
            double& b = stack[top - 1];
            switch (in.arg) {
            case 1: break;
            case 2: b = b * b; break;
            case -1: b = 1.0 / b; break;
            default: b = std::pow(b, in.arg);
            }
            break;
        }
        case Op::Exp:
            stack[top - 1] = std::exp(stack[top - 1]);
            break;
        case Op::Div:
            stack[top - 2] /= stack[top - 1];
            --top;
            break;
        }
    }
    return stack[0];
}

// ---------------------------------------------------------------------------
// text form

namespace {

std::string format_number(double v) {
    std::array<char, 64> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}

bool negative_lead(const Expr& e) {
    if (e.kind() == Expr::Kind::Constant) return e.value() < 0 || std::signbit(e.value());
    if (e.kind() == Expr::Kind::Product && !e.children().empty() && e.children()[0].kind() == Expr::Kind::Constant)
        return std::signbit(e.children()[0].value());
    return false;
}

// precedence of the surrounding context: 0 top, 1 sum operand, 2 product
// operand, 3 power base
void print(const Expr& e, const JetSpace& space, int ctx, std::string& out);

void print_product_body(const Expr& e, const JetSpace& space, bool drop_sign, std::string& out) {
    auto kids = e.children();
    size_t start = 0;
    if (kids[0].kind() == Expr::Kind::Constant) {
        double c = kids[0].value();
        if (drop_sign) c = -c;
        if (std::signbit(c)) {
            out += '-';
            c = -c;
        }
        if (c != 1.0 || kids.size() == 1) {
            out += format_number(c);
            if (kids.size() > 1) out += '*';
        }
        start = 1;
    }
    for (size_t i = start; i < kids.size(); ++i) {
        if (i > start) out += '*';
        const bool quotient_inside = kids[i].kind() == Expr::Kind::Quotient && i > 0;
        if (quotient_inside) out += '(';
        print(kids[i], space, 2, out);
        if (quotient_inside) out += ')';
    }
}

void print(const Expr& e, const JetSpace& space, int ctx, std::string& out) {
    switch (e.kind()) {
    case Expr::Kind::Constant: {
        const bool paren = ctx >= 2 && std::signbit(e.value());
        if (paren) out += '(';
        out += format_number(e.value());
        if (paren) out += ')';
        return;
    }
    case Expr::Kind::Variable:
        out += space.name(e.variable());
        return;
    case Expr::Kind::Named:
        out += e.symbol();
        return;
    case Expr::Kind::Sum: {
        const bool paren = ctx >= 1;
        if (paren) out += '(';
        auto kids = e.children();
        for (size_t i = 0; i < kids.size(); ++i) {
            const auto& k = kids[i];
            if (i == 0) {
                print(k, space, 1, out);
            } else if (negative_lead(k)) {
                out += " - ";
                if (k.kind() == Expr::Kind::Constant)
                    out += format_number(-k.value());
                else
                    print_product_body(k, space, true, out);
            } else {
                out += " + ";
                print(k, space, 1, out);
            }
        }
        if (paren) out += ')';
        return;
    }
    case Expr::Kind::Product: {
        const bool paren = ctx >= 2;
        if (paren) out += '(';
        print_product_body(e, space, false, out);
        if (paren) out += ')';
        return;
    }
    case Expr::Kind::Power: {
        const Expr& b = e.children()[0];
        const bool atomic = b.kind() == Expr::Kind::Variable || b.kind() == Expr::Kind::Named ||
                            b.kind() == Expr::Kind::Exp ||
                            (b.kind() == Expr::Kind::Constant && !std::signbit(b.value()));
        if (!atomic) out += '(';
        print(b, space, 0, out);
        if (!atomic) out += ')';
        out += '^';
        out += std::to_string(e.exponent());
        return;
    }
    case Expr::Kind::Exp:
        out += "exp(";
        print(e.children()[0], space, 0, out);
        out += ')';
        return;
    case Expr::Kind::Quotient: {
        const bool paren = ctx >= 3;
        if (paren) out += '(';
        const Expr& n = e.children()[0];
        const Expr& d = e.children()[1];
        const bool num_paren = n.kind() == Expr::Kind::Sum;
        if (num_paren) out += '(';
        print(n, space, num_paren ? 0 : 1, out);
        if (num_paren) out += ')';
        out += '/';
        print(d, space, 3, out);
        if (paren) out += ')';
        return;
    }
    }
}

class Parser {
public:
    Parser(std::string_view s, const JetSpace& space) : s_(s), space_(space) {}

    Expr parse_all() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg + " at offset " + std::to_string(pos_) + " in '" + std::string(s_) + "'");
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    static Expr negate(const Expr& e) {
        if (e.kind() == Expr::Kind::Constant) return Expr(-e.value());
        if (e.kind() == Expr::Kind::Product) {
            auto kids = e.children();
            std::vector<Expr> v(kids.begin(), kids.end());
            if (v[0].kind() == Expr::Kind::Constant)
                v[0] = Expr(-v[0].value());
            else
                v.insert(v.begin(), Expr(-1.0));
            return Expr::product(std::move(v));
        }
        return Expr::product({Expr(-1.0), e});
    }

    Expr parse_expr() {
        std::vector<Expr> terms;
        terms.push_back(parse_term());
        while (true) {
            if (accept('+'))
                terms.push_back(parse_term());
            else if (accept('-'))
                terms.push_back(negate(parse_term()));
            else
                break;
        }
        return Expr::sum(std::move(terms));
    }

    Expr parse_term() {
        if (accept('-')) return negate(parse_term());
        std::vector<Expr> factors;
        factors.push_back(parse_power());
        while (true) {
            if (accept('*')) {
                factors.push_back(parse_power());
            } else if (accept('/')) {
                Expr num = Expr::product(std::move(factors));
                factors.clear();
                factors.push_back(Expr::quotient(num, parse_power()));
            } else {
                break;
            }
        }
        return Expr::product(std::move(factors));
    }

    Expr parse_power() {
        Expr base = parse_primary();
        if (accept('^')) {
            skip_ws();
            int sign = 1;
            if (accept('-'))
                sign = -1;
            else
                accept('+');
            skip_ws();
            bool paren = accept('(');
            if (paren) {
                if (accept('-')) sign = -sign;
                skip_ws();
            }
            int k = 0;
            auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), k);
            if (ec != std::errc()) fail("expected integer exponent");
            pos_ = static_cast<size_t>(p - s_.data());
            if (paren && !accept(')')) fail("expected ')'");
            return Expr::power(base, sign * k);
        }
        return base;
    }

    Expr parse_primary() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            auto [p, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("bad number");
            pos_ = static_cast<size_t>(p - s_.data());
            return Expr(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string_view id = s_.substr(start, pos_ - start);
            if (id == "exp" && peek() == '(') {
                ++pos_;
                Expr arg = parse_expr();
                if (!accept(')')) fail("expected ')'");
                return Expr::exp(arg);
            }
            if (auto v = space_.lookup(id)) return Expr(*v);
            return Expr::named(std::string(id));
        }
        fail(c == '\0' ? "unexpected end of input" : "unexpected '" + std::string(1, c) + "'");
    }

    std::string_view s_;
    const JetSpace& space_;
    size_t pos_ = 0;
};

}  // namespace

std::string to_string(const Expr& e, const JetSpace& space) {
    std::string out;
    print(e, space, 0, out);
    return out;
}

Expr parse(std::string_view text, const JetSpace& space) { return Parser(text, space).parse_all(); }

}  // namespace dipde
