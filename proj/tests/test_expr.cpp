#include <doctest.h>

#include <random>

#include "dipde/expr.hpp"

using namespace dipde;
using namespace dipde::sym;

namespace {

const JetSpace& J = JetSpace::standard();

JetVariable var(const char* name) { return *J.lookup(name); }

Expr P(const char* text) { return simplify(parse(text)); }

bool same(const Expr& a, const Expr& b) { return simplify(a) == simplify(b); }

// random polynomial over u, u_x, u_xx, t, x with small integer coefficients
Expr random_poly(std::mt19937_64& rng, int terms = 4) {
    const std::vector<Expr> atoms = {t(), x(), u(), u("x"), u("xx"), u("t")};
    std::uniform_int_distribution<int> pick(0, static_cast<int>(atoms.size()) - 1), deg(0, 2), coef(-3, 3);
    Expr e = 0.0;
    for (int k = 0; k < terms; ++k) {
        Expr m = double(coef(rng));
        for (int f = deg(rng); f >= 0; --f) m = m * atoms[pick(rng)];
        e = e + m;
    }
    return e;
}

Binding random_binding(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    Binding b;
    for (const auto& v : J.coordinates()) b.set(v, d(rng));
    b.set("t0", 1.3).set("nu", 0.1);
    return b;
}

}  // namespace

TEST_CASE("partial derivatives") {
    CHECK(same(partial_derivative(pow(u("x"), 2), var("u_x")), 2.0 * u("x")));
    CHECK(same(partial_derivative(u() * u("x"), var("u")), u("x")));
    CHECK(same(partial_derivative(P("exp(-t/t0)*u_t"), var("t")), P("-t0^-1*exp(-t/t0)*u_t")));
    CHECK(partial_derivative(u("xx"), var("u_x")).is_zero());
}

TEST_CASE("total derivatives") {
    CHECK(total_derivative(u(), 1, 4) == u("x"));
    CHECK(same(total_derivative(x() + u() * u("x"), 1, 4), 1.0 + pow(u("x"), 2) + u() * u("xx")));
    CHECK_THROWS_AS(total_derivative(u("xxxx"), 1, 4), DerivativeCapError);

    // D_t(-exp(-t/t0) u_t) in an order-2 space that carries u_tt
    const JetSpace full({"t", "x"}, {"u"}, 2, false);
    const Expr e = parse("-exp(-t/t0)*u_t", full);
    CHECK(simplify(total_derivative(e, 0, 2)) == simplify(parse("t0^-1*exp(-t/t0)*u_t - exp(-t/t0)*u_tt", full)));
}

TEST_CASE("simplify examples") {
    CHECK(simplify(u("x") + u("x") - 2.0 * u("x")).is_zero());
    CHECK(simplify(1.0 * u("xxx") + 0.0 * u()) == u("xxx"));
    CHECK(simplify((-u("x")) * 1.0 + u("x")).is_zero());
    CHECK(simplify(exp(t()) * exp(-t())) == Expr(1.0));
}

TEST_CASE("evaluate examples") {
    Binding b;
    b.set(var("u"), 2).set(var("u_x"), 3).set(var("u_t"), 1);
    CHECK(evaluate(P("u_t + u*u_x"), b).value == 7.0);

    Binding c;
    c.set(var("t"), 0).set(var("u_t"), 5).set("t0", 1.0);
    CHECK(evaluate(P("exp(-t/t0)*u_t"), c).value == doctest::Approx(5.0));

    const JetSpace so2({"x"}, {"u"}, 1, false);
    Binding d;
    d.set(*so2.lookup("x"), 1).set(*so2.lookup("u"), 0).set(*so2.lookup("u_x"), 1);
    CHECK(evaluate(parse("(x*u_x - u)/(u*u_x + x)", so2), d, so2).value == doctest::Approx(1.0));
}

TEST_CASE("evaluate reports unbound symbols and non-finite values") {
    Binding b;
    b.set(var("u"), 1.0);
    try {
        evaluate(P("u + u_x"), b);
        FAIL("expected MissingSymbolError");
    } catch (const MissingSymbolError& e) {
        CHECK(e.symbol() == "u_x");
    }
    CHECK_THROWS_AS(evaluate(P("t0*u"), b), MissingSymbolError);
    b.set(var("u_x"), 0.0);
    CHECK_FALSE(evaluate(P("u/u_x"), b).finite());
}

TEST_CASE("infix text round-trips canonical forms") {
    for (const char* s : {"u_t + u*u_x + u_xxx", "exp(-t/t0)*u_t + u*u_x", "u_t + u*u_x - nu*u_xx",
                          "(x*u_x - u)/(u*u_x + x)", "2.5*u^3 - t*u_x^2", "exp(t/t0)"}) {
        const Expr e = P(s);
        CHECK(parse(to_string(e)) == e);
    }
    CHECK(to_string(P("u_xxx + u*u_x + u_t")) == "u_t + u*u_x + u_xxx");
    CHECK_THROWS_AS(parse("u_t +"), ParseError);
    CHECK_THROWS_AS(parse("u*(u_x"), ParseError);
}

TEST_CASE("mixed partials canonicalize") {
    const JetSpace full({"t", "x"}, {"u"}, 2, false);
    CHECK(parse("u_xt", full) == parse("u_tx", full));
    CHECK(MultiIndex({1, 0}) == MultiIndex({0, 1}));
}

TEST_CASE("property: simplify is idempotent and preserves values") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 200; ++k) {
        const Expr e = random_poly(rng) * random_poly(rng, 2) + exp(double(k % 3) * t()) * random_poly(rng, 2);
        const Expr s = simplify(e);
        CHECK(simplify(s) == s);
        const Binding b = random_binding(rng);
        const double a = evaluate(e, b).value, c = evaluate(s, b).value;
        CHECK(std::abs(a - c) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("property: total derivatives commute") {
    const JetSpace full({"t", "x"}, {"u"}, 4, false);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 60; ++k) {
        const Expr e = parse(to_string(simplify(random_poly(rng))), full);
        const Expr xt = simplify(total_derivative(total_derivative(e, 1, 4), 0, 4));
        const Expr tx = simplify(total_derivative(total_derivative(e, 0, 4), 1, 4));
        CHECK(xt == tx);
    }
}

TEST_CASE("property: partial derivative matches central differences") {
    std::mt19937_64 rng(5);
    const std::vector<JetVariable> coords = J.coordinates();
    for (int k = 0; k < 100; ++k) {
        const Expr e = random_poly(rng) + exp(0.3 * t()) * random_poly(rng, 2);
        const JetVariable v = coords[k % coords.size()];
        Binding b = random_binding(rng);
        const double v0 = *b.find(v), h = 1e-5;
        const double d = evaluate(partial_derivative(e, v), b).value;
        b.set(v, v0 + h);
        const double fp = evaluate(e, b).value;
        b.set(v, v0 - h);
        const double fm = evaluate(e, b).value;
        CHECK(std::abs(d - (fp - fm) / (2 * h)) < 1e-6 * std::max(1.0, std::abs(d)));
    }
}

TEST_CASE("compiled expressions agree with the tree walker") {
    std::mt19937_64 rng(3);
    const std::vector<JetVariable> slots = J.coordinates();
    for (int k = 0; k < 50; ++k) {
        const Expr e = simplify(random_poly(rng) + P("exp(-t/t0)*u_t") + random_poly(rng) / (2.5 + pow(u(), 2)));
        const CompiledExpr ce(e, slots, {{"t0", 1.3}});
        const Binding b = random_binding(rng);
        std::vector<double> vals;
        for (const auto& v : slots) vals.push_back(*b.find(v));
        CHECK(ce(vals) == doctest::Approx(evaluate(e, b).value).epsilon(1e-12));
    }
}
