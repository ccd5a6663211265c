#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dipde/jet.hpp"

namespace dipde {

class ExprError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a total derivative would reference u_J above the allowed order.
class DerivativeCapError : public ExprError {
public:
    using ExprError::ExprError;
};

class MissingSymbolError : public ExprError {
public:
    MissingSymbolError(std::string symbol)
        : ExprError("unbound symbol '" + symbol + "'"), symbol_(std::move(symbol)) {}
    const std::string& symbol() const { return symbol_; }

private:
    std::string symbol_;
};

class ParseError : public ExprError {
public:
    using ExprError::ExprError;
};

/// Immutable expression tree over jet coordinates and named constants.
///
/// Trees built with the arithmetic operators are kept exactly as written;
/// `simplify` produces the canonical form (expanded sum of monomials, one
/// merged exponential per monomial, sums under negative powers kept as
/// denominators brought to a common denominator).
class Expr {
public:
    enum class Kind { Constant, Variable, Named, Sum, Product, Power, Exp, Quotient };

    Expr();  // constant 0
    Expr(double c);  // NOLINT(google-explicit-constructor)
    Expr(JetVariable v);  // NOLINT(google-explicit-constructor)

    static Expr constant(double c);
    static Expr variable(JetVariable v);
    static Expr named(std::string symbol);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    static Expr power(Expr base, int exponent);
    static Expr exp(Expr arg);
    static Expr quotient(Expr numerator, Expr denominator);

    Kind kind() const;
    double value() const;                  // Constant
    const JetVariable& variable() const;   // Variable
    const std::string& symbol() const;     // Named
    int exponent() const;                  // Power
    std::span<const Expr> children() const;

    bool is_constant() const { return kind() == Kind::Constant; }
    bool is_zero() const { return is_constant() && value() == 0.0; }
    bool is_one() const { return is_constant() && value() == 1.0; }

    /// Structural identity of trees (not semantic equality; simplify first).
    friend bool operator==(const Expr& a, const Expr& b);
    friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr pow(const Expr& base, int exponent);
Expr exp(const Expr& arg);

/// Shorthand for building standard (t, x; u) expressions in code.
namespace sym {
Expr t();
Expr x();
Expr u(std::string_view derivs = "");
Expr c(std::string symbol);
}  // namespace sym

/// Canonical form; idempotent.
Expr simplify(const Expr& e);

/// d e / d v, every other jet coordinate held fixed. Result canonical.
Expr partial_derivative(const Expr& e, const JetVariable& v);

/// D_i e = de/dx^i + sum_{alpha,J} u^alpha_{J,i} de/du^alpha_J. Throws
/// DerivativeCapError if a u_{J,i} with |J,i| > max_order would be needed.
Expr total_derivative(const Expr& e, int i, int max_order);

/// D_J e applied index by index.
Expr total_derivative(const Expr& e, const MultiIndex& J, int max_order);

/// True when the canonical form is the literal constant 0.
bool is_identically_zero(const Expr& e);

std::set<JetVariable> jet_variables(const Expr& e);
std::set<std::string> named_constants(const Expr& e);
/// Highest derivative order of any u_J in e (0 if only base variables).
int max_derivative_order(const Expr& e);
bool depends_on(const Expr& e, const JetVariable& v);

/// Replace named constants by numbers (unlisted names are left alone).
Expr substitute(const Expr& e, const std::map<std::string, double>& values);
/// Replace a jet variable by an expression.
Expr substitute(const Expr& e, const JetVariable& v, const Expr& replacement);

/// Factors that may vanish: bases of negative powers and quotient denominators.
std::vector<Expr> denominators(const Expr& e);

/// Values for the free symbols of an expression.
class Binding {
public:
    Binding& set(const JetVariable& v, double value) {
        vars_[v] = value;
        return *this;
    }
    Binding& set(const std::string& symbol, double value) {
        named_[symbol] = value;
        return *this;
    }
    const double* find(const JetVariable& v) const {
        auto it = vars_.find(v);
        return it == vars_.end() ? nullptr : &it->second;
    }
    const double* find(const std::string& s) const {
        auto it = named_.find(s);
        return it == named_.end() ? nullptr : &it->second;
    }
    const std::map<JetVariable, double>& variables() const { return vars_; }
    const std::map<std::string, double>& constants() const { return named_; }

private:
    std::map<JetVariable, double> vars_;
    std::map<std::string, double> named_;
};

/// Evaluation outcome; a non-finite value is flagged rather than hidden.
struct EvalResult {
    double value = 0.0;
    bool finite() const { return std::isfinite(value); }
};

/// Throws MissingSymbolError naming the first unbound symbol.
EvalResult evaluate(const Expr& e, const Binding& b, const JetSpace& space = JetSpace::standard());

/// Flat stack program for evaluating one expression many times. Symbols are
/// mapped to slots once; evaluation then reads a plain array.
class CompiledExpr {
public:
    /// `slots` lists the jet variables in slot order; named constants are
    /// baked in from `constants` (missing ones raise MissingSymbolError).
    CompiledExpr(const Expr& e, const std::vector<JetVariable>& slots,
                 const std::map<std::string, double>& constants,
                 const JetSpace& space = JetSpace::standard());

    double operator()(std::span<const double> slot_values) const;

private:
    enum class Op : unsigned char { Const, Load, Add, Mul, Pow, Exp, Div };
    struct Instr {
        Op op;
        int arg;  // slot, arity or exponent
        double value;
    };
    void emit(const Expr& e, const std::vector<JetVariable>& slots, const std::map<std::string, double>& constants,
              const JetSpace& space, int depth);
    std::vector<Instr> code_;
    int max_stack_ = 0;
};

/// Infix text form: `u_t + u*u_x + u_xxx`, `exp(-t0^-1*t)*u_t`,
/// `(u + x)^-1`. Canonical (simplified) expressions round-trip exactly:
/// parse(to_string(e)) == e.
std::string to_string(const Expr& e, const JetSpace& space = JetSpace::standard());
Expr parse(std::string_view text, const JetSpace& space = JetSpace::standard());

}  // namespace dipde
