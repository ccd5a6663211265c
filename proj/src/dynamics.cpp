#include "dipde/dynamics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "dipde/invariants.hpp"
#include "dipde/rng.hpp"

namespace dipde {

using cd = std::complex<double>;
using Spectrum = Eigen::ArrayXcd;

void TrajectoryGrid::validate(bool strict_sizes) const {
    if (u.rows() != t.size() || u.cols() != x.size()) throw std::invalid_argument("trajectory shape mismatch");
    if (!(length > 0.0)) throw std::invalid_argument("trajectory length must be positive");
    if (!u.allFinite() || !x.allFinite() || !t.allFinite()) throw std::invalid_argument("trajectory has non-finite values");
    if (strict_sizes) {
        if (nx() < 16 || (nx() & (nx() - 1)) != 0)
            throw std::invalid_argument("Nx must be a power of two >= 16, got " + std::to_string(nx()));
        if (nt() < 8) throw std::invalid_argument("Nt must be >= 8");
    }
}

void add_noise(TrajectoryGrid& traj, double sigma, std::uint64_t seed) {
    traj.meta.noise_sigma = sigma;
    traj.meta.noise_seed = seed;
    if (sigma == 0.0) return;
    const double mean = traj.u.mean();
    const double sd = std::sqrt((traj.u - mean).square().mean());
    Rng rng(seed);
    std::normal_distribution<double> n(0.0, sigma * sd);
    for (Eigen::Index i = 0; i < traj.u.size(); ++i) traj.u.data()[i] += n(rng);
}

std::string to_string(Scheme s) { return s == Scheme::Etdrk4 ? "etdrk4" : "rk4"; }

Scheme parse_scheme(const std::string& s) {
    if (s == "etdrk4") return Scheme::Etdrk4;
    if (s == "rk4" || s == "rk4-spectral") return Scheme::Rk4;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

void SolverConfig::validate(const std::string& system) const {
    if (nx < 16 || (nx & (nx - 1)) != 0) throw std::invalid_argument("nx must be a power of two >= 16");
    if (nt < 8) throw std::invalid_argument("nt must be >= 8");
    if (!(length > 0) || !(dt > 0) || transient < 0 || substeps < 1)
        throw std::invalid_argument("solver length, dt and substeps must be positive");
    auto positive = [&](const char* name) {
        auto it = parameters.find(name);
        if (it == parameters.end() || !(it->second > 0))
            throw std::invalid_argument(std::string("parameter ") + name + " must be set and positive");
    };
    if (system == "burgers") positive("nu");
    if (system == "nkdv") positive("t0");
}

SolverConfig default_solver(const std::string& system) {
    SolverConfig c;
    if (system == "kdv") {
        c.length = 20.0;
        c.dt = 0.01;
        c.nt = 501;
    } else if (system == "nkdv") {
        c.length = 20.0;
        c.dt = 0.01;
        c.nt = 201;
        c.parameters = {{"t0", 1.0}};
    } else if (system == "ks") {
        c.length = 32.0 * std::numbers::pi;
        c.dt = 0.05;
        c.nt = 501;
        c.transient = 25.0;
        c.substeps = 2;
    } else if (system == "burgers") {
        c.length = 2.0 * std::numbers::pi;
        c.dt = 0.005;
        c.nt = 401;
        c.scheme = Scheme::Rk4;
        c.substeps = 1;
        c.parameters = {{"nu", 0.1}};
    } else {
        throw std::invalid_argument("no solver defaults for system '" + system + "'");
    }
    return c;
}

Eigen::ArrayXd periodic_grid(int n, double length) {
    return Eigen::ArrayXd::LinSpaced(n, 0.0, n - 1.0) * (length / n);
}

Eigen::ArrayXd sample_initial_condition(const Eigen::ArrayXd& x, double length, std::uint64_t seed,
                                        const IcFamily& f) {
    Rng rng(seed);
    const int m = std::uniform_int_distribution<int>(f.min_modes, f.max_modes)(rng);
    std::uniform_real_distribution<double> amp(f.amp_lo, f.amp_hi);
    std::uniform_int_distribution<int> wave(f.k_lo, f.k_hi);
    std::uniform_real_distribution<double> phase(f.phase_lo, f.phase_hi);
    Eigen::ArrayXd u = Eigen::ArrayXd::Zero(x.size());
    for (int j = 0; j < m; ++j) {
        const double a = amp(rng);
        const int k = wave(rng);
        const double p = phase(rng);
        u += a * (2.0 * std::numbers::pi * k / length * x + p).sin();
    }
    return u - u.mean();
}

// ---------------------------------------------------------------------------

namespace {

const JetVariable kT = JetVariable::independent(0);
const JetVariable kX = JetVariable::independent(1);
const JetVariable kUt = JetVariable::dependent(0, MultiIndex{0});

JetVariable ux(int k) { return JetVariable::dependent(0, MultiIndex(std::vector<int>(k, 1))); }

std::vector<Expr> terms_of(const Expr& e) {
    if (e.kind() == Expr::Kind::Sum) return {e.children().begin(), e.children().end()};
    if (e.is_zero()) return {};
    return {e};
}

/// Pseudo-spectral helper on a periodic grid (half spectrum, real fields).
class Spectral {
public:
    Spectral(int n, double length, bool dealias) : n_(n), m_(n / 2 + 1), k_(m_), keep_(m_) {
        fft_.SetFlag(Eigen::FFT<double>::HalfSpectrum);
        for (int j = 0; j < m_; ++j) {
            k_[j] = j == n / 2 ? 0.0 : 2.0 * std::numbers::pi * j / length;
            keep_[j] = !dealias || 3 * j < n ? 1.0 : 0.0;
        }
        keep_[n / 2] = 0.0;
    }

    int n() const { return n_; }
    int m() const { return m_; }
    const Eigen::ArrayXd& k() const { return k_; }

    void fwd(const Eigen::ArrayXd& u, Spectrum& uh) {
        uh.resize(m_);
        fft_.fwd(uh.data(), u.data(), n_);
    }
    void inv(const Spectrum& uh, Eigen::ArrayXd& u) {
        u.resize(n_);
        tmp_ = uh;  // the real inverse may scribble on its input
        fft_.inv(u.data(), tmp_.data(), n_);
    }
    /// (i k)^j
    Spectrum ik_pow(int j) const {
        Spectrum s(m_);
        for (int q = 0; q < m_; ++q) s[q] = std::pow(cd(0.0, k_[q]), j);
        return s;
    }
    const Eigen::ArrayXd& keep() const { return keep_; }

private:
    int n_;
    int m_;
    Eigen::ArrayXd k_;
    Eigen::ArrayXd keep_;
    Eigen::FFT<double> fft_;
    Spectrum tmp_;
};

/// Right-hand side pieces in Fourier space: L (diagonal) and N(v).
class Rhs {
public:
    Rhs(const EvolutionForm& form, const Eigen::ArrayXd& x, double length, bool dealias)
        : sp_(static_cast<int>(x.size()), length, dealias), x_(x), L_(Spectrum::Zero(sp_.m())) {
        for (int j = 0; j <= 4; ++j)
            if (form.lin[j] != 0.0) L_ += form.lin[j] * sp_.ik_pow(j);
        slots_ = {kX};
        for (int j = 0; j <= 4; ++j) slots_.push_back(ux(j));
        for (int j = 0; j <= 4; ++j) {
            used_[j] = depends_on(form.nonlinear, ux(j));
            D_[j] = sp_.ik_pow(j);
        }
        has_nonlinear_ = !form.nonlinear.is_zero();
        if (has_nonlinear_) g_.emplace(form.nonlinear, slots_, std::map<std::string, double>{});
        for (int j = 0; j <= 4; ++j) fields_[j].resize(x.size());
        buf_.resize(slots_.size());
    }

    Spectral& spectral() { return sp_; }
    const Spectrum& L() const { return L_; }

    Spectrum N(const Spectrum& v) {
        if (!has_nonlinear_) return Spectrum::Zero(sp_.m());
        const Spectrum vt = v * sp_.keep();
        for (int j = 0; j <= 4; ++j)
            if (used_[j]) sp_.inv(vt * D_[j], fields_[j]);
        Eigen::ArrayXd out(x_.size());
        for (Eigen::Index i = 0; i < x_.size(); ++i) {
            buf_[0] = x_[i];
            for (int j = 0; j <= 4; ++j) buf_[1 + j] = used_[j] ? fields_[j][i] : 0.0;
            out[i] = (*g_)(buf_);
        }
        Spectrum r;
        sp_.fwd(out, r);
        return r * sp_.keep();
    }

private:
    Spectral sp_;
    Eigen::ArrayXd x_;
    Spectrum L_;
    std::array<Spectrum, 5> D_;
    std::array<bool, 5> used_{};
    bool has_nonlinear_ = false;
    std::optional<CompiledExpr> g_;
    std::vector<JetVariable> slots_;
    std::array<Eigen::ArrayXd, 5> fields_;
    std::vector<double> buf_;
};

struct EtdCoefficients {
    double h = -1.0;
    Spectrum E, E2, Q, f1, f2, f3;
};

void etd_coefficients(const Spectrum& L, double h, EtdCoefficients& c) {
    if (c.h == h) return;
    constexpr int M = 32;
    const Eigen::Index m = L.size();
    c.h = h;
    c.E = (h * L).exp();
    c.E2 = (h * L / 2.0).exp();
    c.Q = c.f1 = c.f2 = c.f3 = Spectrum::Zero(m);
    for (int j = 0; j < M; ++j) {
        const cd r = std::exp(cd(0.0, 2.0 * std::numbers::pi * (j + 0.5) / M));
        const Spectrum z = h * L + r;
        const Spectrum ez = z.exp();
        const Spectrum z3 = z * z * z;
        c.Q += ((z / 2.0).exp() - 1.0) / z;
        c.f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
        c.f2 += (2.0 + z + ez * (z - 2.0)) / z3;
        c.f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    c.Q *= h / M;
    c.f1 *= h / M;
    c.f2 *= h / M;
    c.f3 *= h / M;
}

/// tau(t) - tau(t_start) for the rate function.
class TimeMap {
public:
    TimeMap(const Expr& rate, double t_start) : t0_(t_start), rate_(rate, {kT}, {}) {
        Expr r = simplify(rate);
        if (r.is_constant()) {
            kind_ = Kind::Constant;
            a_ = r.value();
            return;
        }
        Expr e = r;
        if (r.kind() == Expr::Kind::Product && r.children().size() == 2 && r.children()[0].is_constant() &&
            r.children()[1].kind() == Expr::Kind::Exp) {
            e = r.children()[1];
        }
        if (e.kind() == Expr::Kind::Exp) {
            const Expr slope = partial_derivative(e.children()[0], kT);
            if (slope.is_constant() && slope.value() != 0.0) {
                kind_ = Kind::Exponential;
                a_ = slope.value();
                return;
            }
        }
        kind_ = Kind::Quadrature;
    }

    double rate(double t) const {
        const double v[1] = {t};
        return rate_(v);
    }

    double operator()(double t) const {
        switch (kind_) {
        case Kind::Constant:
            return a_ * (t - t0_);
        case Kind::Exponential:
            // rate = b e^{a t + c}, so tau = (rate(t) - rate(t0)) / a
            return (rate(t) - rate(t0_)) / a_;
        case Kind::Quadrature:
            break;
        }
        // composite Simpson, 64 panels per unit of |t - t0| (at least 64)
        const int panels = 2 * std::max(32, static_cast<int>(std::ceil(32 * std::abs(t - t0_))));
        const double h = (t - t0_) / panels;
        double s = rate(t0_) + rate(t);
        for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * rate(t0_ + i * h);
        return s * h / 3.0;
    }

private:
    enum class Kind { Constant, Exponential, Quadrature };
    Kind kind_;
    double t0_;
    double a_ = 0.0;
    CompiledExpr rate_;
};

bool blown_up(const Eigen::ArrayXd& u) { return !u.allFinite() || u.abs().maxCoeff() > 1e6; }

}  // namespace

EvolutionForm evolution_form(const Expr& F, const std::map<std::string, double>& constants) {
    const Expr G = simplify(substitute(F, constants));
    if (auto names = named_constants(G); !names.empty()) throw MissingSymbolError(*names.begin());
    const Expr alpha = partial_derivative(G, kUt);
    for (const auto& v : jet_variables(alpha))
        if (v != kT) throw EvolutionError("coefficient of u_t must depend on t only: " + to_string(alpha));
    if (is_identically_zero(alpha)) throw EvolutionError("equation does not contain u_t: " + to_string(G));
    const Expr R = simplify(substitute(G, kUt, Expr(0.0)));

    EvolutionForm form;
    form.rate = simplify(Expr(1.0) / alpha);
    std::vector<Expr> rest;
    for (const auto& term : terms_of(simplify(-R))) {
        const auto vars = jet_variables(term);
        if (vars.count(kT)) throw EvolutionError("explicit t dependence outside the u_t coefficient: " + to_string(term));
        for (const auto& v : vars)
            if (!v.is_independent() && v.multi_index().count(0) > 0)
                throw EvolutionError("time derivatives on the right-hand side: " + to_string(term));
        if (vars.size() == 1 && !vars.begin()->is_independent()) {
            const Expr d = partial_derivative(term, *vars.begin());
            if (d.is_constant()) {
                form.lin[vars.begin()->order()] += d.value();
                continue;
            }
        }
        for (const auto& v : vars)
            if (!v.is_independent() && v.order() > 4) throw EvolutionError("derivative order above 4: " + to_string(term));
        rest.push_back(term);
    }
    form.nonlinear = simplify(Expr::sum(std::move(rest)));
    return form;
}

IntegrationResult integrate_equation(const Expr& F, const std::map<std::string, double>& constants,
                                     const Eigen::ArrayXd& ic, const SolverConfig& cfg, double t_start) {
    cfg.validate();
    if (ic.size() != cfg.nx) throw std::invalid_argument("initial condition length differs from nx");
    const EvolutionForm form = evolution_form(F, constants);
    const Eigen::ArrayXd x = periodic_grid(cfg.nx, cfg.length);
    Rhs rhs(form, x, cfg.length, cfg.dealias);
    Spectral& sp = rhs.spectral();
    TimeMap tau(form.rate, t_start);
    const double maxL = rhs.L().abs().maxCoeff();

    Spectrum v;
    sp.fwd(ic, v);
    EtdCoefficients etd;

    // advance v from physical time ta to tb
    auto advance = [&](double ta, double tb) {
        if (cfg.scheme == Scheme::Etdrk4) {
            const double span = tau(tb) - tau(ta);
            const double hmax = cfg.dt / cfg.substeps;
            const int s = std::max(cfg.substeps, static_cast<int>(std::ceil(std::abs(span) / hmax - 1e-9)));
            const double h = span / s;
            etd_coefficients(rhs.L(), h, etd);
            for (int i = 0; i < s; ++i) {
                const Spectrum Nv = rhs.N(v);
                const Spectrum a = etd.E2 * v + etd.Q * Nv;
                const Spectrum Na = rhs.N(a);
                const Spectrum b = etd.E2 * v + etd.Q * Na;
                const Spectrum Nb = rhs.N(b);
                const Spectrum c = etd.E2 * a + etd.Q * (2.0 * Nb - Nv);
                const Spectrum Nc = rhs.N(c);
                v = etd.E * v + Nv * etd.f1 + 2.0 * (Na + Nb) * etd.f2 + Nc * etd.f3;
            }
        } else {
            const double rmax = std::max({std::abs(tau.rate(ta)), std::abs(tau.rate(tb)),
                                          std::abs(tau.rate(0.5 * (ta + tb)))});
            const int s = std::max(cfg.substeps,
                                   static_cast<int>(std::ceil((tb - ta) * rmax * maxL / 2.5)));
            const double h = (tb - ta) / s;
            auto f = [&](double t, const Spectrum& w) -> Spectrum { return tau.rate(t) * (rhs.L() * w + rhs.N(w)); };
            for (int i = 0; i < s; ++i) {
                const double t = ta + i * h;
                const Spectrum k1 = f(t, v);
                const Spectrum k2 = f(t + h / 2, v + h / 2 * k1);
                const Spectrum k3 = f(t + h / 2, v + h / 2 * k2);
                const Spectrum k4 = f(t + h, v + h * k3);
                v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
    };

    Eigen::ArrayXd u;
    double t = t_start;
    if (cfg.transient > 0.0) {
        const int chunks = static_cast<int>(std::ceil(cfg.transient / cfg.dt - 1e-9));
        for (int i = 0; i < chunks; ++i) {
            const double tn = t_start + std::min(cfg.transient, (i + 1) * cfg.dt);
            advance(t, tn);
            t = tn;
            sp.inv(v, u);
            if (blown_up(u)) throw BlowUpError("blow-up during transient at t=" + std::to_string(t), -1);
        }
    }

    IntegrationResult res;
    auto& tr = res.traj;
    tr.x = x;
    tr.length = cfg.length;
    tr.t.resize(cfg.nt);
    tr.u.resize(cfg.nt, cfg.nx);
    const double t_first = t;
    u = cfg.transient > 0.0 ? u : ic;
    tr.t[0] = t_first;
    tr.u.row(0) = u.transpose();
    int good = 1;
    for (int k = 1; k < cfg.nt; ++k) {
        const double tn = t_first + k * cfg.dt;
        advance(t, tn);
        t = tn;
        sp.inv(v, u);
        if (blown_up(u)) {
            res.blowup_step = k;
            break;
        }
        tr.t[k] = tn;
        tr.u.row(k) = u.transpose();
        good = k + 1;
    }
    if (good < cfg.nt) {
        tr.t.conservativeResize(good);
        tr.u.conservativeResize(good, Eigen::NoChange);
    }
    return res;
}

TrajectoryGrid solve_pde(const std::string& system, const Eigen::ArrayXd& ic, const SolverConfig& cfg) {
    cfg.validate(system);
    const auto& info = builtin_system(system);
    std::map<std::string, double> constants = info.constants;
    for (const auto& [k, v] : cfg.parameters) constants[k] = v;
    auto res = integrate_equation(info.equation, constants, ic, cfg, 0.0);
    if (res.blowup_step)
        throw BlowUpError(system + " solution blew up at output step " + std::to_string(*res.blowup_step),
                          *res.blowup_step);
    res.traj.meta.system = system;
    res.traj.meta.parameters = constants;
    return std::move(res.traj);
}

}  // namespace dipde
