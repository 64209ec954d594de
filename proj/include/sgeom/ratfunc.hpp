#ifndef SGEOM_RATFUNC_HPP
#define SGEOM_RATFUNC_HPP

#include <string>
#include <utility>
#include <vector>

#include "sgeom/polynomial.hpp"

namespace sgeom {

/// Rational function in canonical form: numerator and denominator coprime,
/// denominator nonzero with lexicographic leading coefficient one, zero
/// represented as 0/1. Equality is structural.
class RatFunc {
public:
    explicit RatFunc(int nvars = 0) : num_(nvars), den_(Polynomial::constant(nvars, Rational(1))) {}

    RatFunc(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) { reduce(); }

    static RatFunc from_poly(Polynomial p) {
        RatFunc r(p.nvars());
        r.num_ = std::move(p);
        return r;
    }

    static RatFunc constant(int nvars, const Rational& c) {
        return from_poly(Polynomial::constant(nvars, c));
    }

    static RatFunc variable(int nvars, int i) { return from_poly(Polynomial::variable(nvars, i)); }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }
    int nvars() const { return num_.nvars(); }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_ == Polynomial::constant(nvars(), Rational(1)); }

    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Rational constant_value() const { return num_.constant_value() / den_.constant_value(); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    RatFunc operator-() const {
        RatFunc r = *this;
        r.num_ = -r.num_;
        return r;
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator*(const Rational& c, const RatFunc& f) {
        return RatFunc(c * f.num_, f.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw domain_error("division by the zero rational function");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }

    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }

    bool operator==(const RatFunc& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const RatFunc& o) const { return !(*this == o); }

    Rational eval(const RatVector& x) const {
        Rational d = den_.eval(x);
        if (sgn(d) == 0) throw pole_error("denominator vanishes at evaluation point");
        return num_.eval(x) / d;
    }

    RatFunc partial(int var) const {
        // quotient rule, renormalized
        return RatFunc(num_.partial(var) * den_ - num_ * den_.partial(var), den_ * den_);
    }

    RatFunc remap(int new_nvars, const std::vector<int>& image) const {
        Polynomial d = den_.remap(new_nvars, image);
        if (d.is_zero()) throw pole_error("denominator vanishes identically under substitution");
        return RatFunc(num_.remap(new_nvars, image), std::move(d));
    }

    RatFunc with_nvars(int n) const {
        return RatFunc(num_.with_nvars(n), den_.with_nvars(n));
    }

    /// Substitutes args[i] for variable i; args are rational functions in a
    /// common variable set. Throws pole_error when the denominator collapses.
    RatFunc substitute(const std::vector<RatFunc>& args) const {
        if (static_cast<int>(args.size()) != nvars()) throw dimension_error("substitution arity mismatch");
        RatFunc n = substitute_poly(num_, args);
        RatFunc d = substitute_poly(den_, args);
        if (d.is_zero()) throw pole_error("denominator vanishes identically under composition");
        return n / d;
    }

    /// Substitutes rational functions into a polynomial via a common
    /// denominator per variable.
    static RatFunc substitute_poly(const Polynomial& p, const std::vector<RatFunc>& args) {
        int target = args.empty() ? 0 : args[0].nvars();
        for (const auto& a : args)
            if (a.nvars() != target) throw dimension_error("substitution argument arity mismatch");
        if (p.is_zero()) return RatFunc(target);
        const int m = p.nvars();
        std::vector<int> maxdeg(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < m; ++i) maxdeg[static_cast<std::size_t>(i)] = p.degree_in(i);
        // power tables for numerators and denominators
        std::vector<std::vector<Polynomial>> npow(static_cast<std::size_t>(m)), dpow(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            npow[ui].push_back(Polynomial::constant(target, Rational(1)));
            dpow[ui].push_back(Polynomial::constant(target, Rational(1)));
            for (int k = 1; k <= maxdeg[ui]; ++k) {
                npow[ui].push_back(npow[ui].back() * args[ui].num());
                dpow[ui].push_back(dpow[ui].back() * args[ui].den());
            }
        }
        Polynomial acc(target);
        for (const auto& [e, c] : p.terms()) {
            Polynomial t = Polynomial::constant(target, c);
            for (int i = 0; i < m; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                t = t * npow[ui][e[ui]];
                t = t * dpow[ui][static_cast<std::size_t>(maxdeg[ui]) - e[ui]];
            }
            acc += t;
        }
        Polynomial den = Polynomial::constant(target, Rational(1));
        for (int i = 0; i < m; ++i) den = den * dpow[static_cast<std::size_t>(i)].back();
        return RatFunc(std::move(acc), std::move(den));
    }

    std::string to_string() const {
        if (is_polynomial()) return num_.to_string();
        return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
    }

private:
    void reduce() {
        if (den_.is_zero()) throw domain_error("zero denominator");
        if (num_.is_zero()) {
            den_ = Polynomial::constant(num_.nvars(), Rational(1));
            return;
        }
        Polynomial g = gcd(num_, den_);
        if (!(g == Polynomial::constant(g.nvars(), Rational(1)))) {
            num_ = detail::divide_exact(num_, g);
            den_ = detail::divide_exact(den_, g);
        }
        Rational lc = den_.leading_coeff();
        if (lc != Rational(1)) {
            Rational inv = Rational(1) / lc;
            num_ = inv * num_;
            den_ = inv * den_;
        }
    }

    Polynomial num_, den_;
};

/// Map from an open subset of Q^arity to Q^codim with rational-function
/// coordinates. The exact stand-in for smooth component functions.
class RationalMap {
public:
    RationalMap() : arity_(0) {}
    RationalMap(int arity, int codim)
        : arity_(arity), comps_(static_cast<std::size_t>(codim), RatFunc(arity)) {}
    RationalMap(int arity, std::vector<RatFunc> comps) : arity_(arity), comps_(std::move(comps)) {
        for (const auto& c : comps_)
            if (c.nvars() != arity_) throw dimension_error("component arity mismatch");
    }

    static RationalMap identity(int n) {
        RationalMap m(n, n);
        for (int i = 0; i < n; ++i) m.comps_[static_cast<std::size_t>(i)] = RatFunc::variable(n, i);
        return m;
    }

    static RationalMap constant(int arity, const RatVector& v) {
        RationalMap m(arity, static_cast<int>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) m.comps_[i] = RatFunc::constant(arity, v[i]);
        return m;
    }

    /// Linear map given by a codim x arity matrix.
    static RationalMap linear(const std::vector<RatVector>& mat, int arity) {
        RationalMap m(arity, static_cast<int>(mat.size()));
        for (std::size_t r = 0; r < mat.size(); ++r) {
            if (static_cast<int>(mat[r].size()) != arity) throw dimension_error("matrix shape mismatch");
            Polynomial p(arity);
            for (int c = 0; c < arity; ++c)
                p += mat[r][static_cast<std::size_t>(c)] * Polynomial::variable(arity, c);
            m.comps_[r] = RatFunc::from_poly(p);
        }
        return m;
    }

    int arity() const { return arity_; }
    int codim() const { return static_cast<int>(comps_.size()); }
    const std::vector<RatFunc>& comps() const { return comps_; }
    const RatFunc& comp(int i) const { return comps_[static_cast<std::size_t>(i)]; }
    RatFunc& comp(int i) { return comps_[static_cast<std::size_t>(i)]; }

    bool is_zero() const {
        for (const auto& c : comps_)
            if (!c.is_zero()) return false;
        return true;
    }

    RatVector eval(const RatVector& x) const {
        RatVector out;
        out.reserve(comps_.size());
        for (const auto& c : comps_) out.push_back(c.eval(x));
        return out;
    }

    /// Exact partial derivative in coordinate slot `var`, componentwise.
    RationalMap partial(int var) const {
        RationalMap m(arity_, codim());
        for (std::size_t i = 0; i < comps_.size(); ++i) m.comps_[i] = comps_[i].partial(var);
        return m;
    }

    /// Directional derivative along a vector of scalars or rational functions.
    RationalMap directional(const std::vector<RatFunc>& dir) const {
        if (static_cast<int>(dir.size()) != arity_) throw dimension_error("direction arity mismatch");
        RationalMap m(arity_, codim());
        for (std::size_t i = 0; i < comps_.size(); ++i) {
            RatFunc acc(arity_);
            for (int v = 0; v < arity_; ++v)
                acc += dir[static_cast<std::size_t>(v)] * comps_[i].partial(v);
            m.comps_[i] = acc;
        }
        return m;
    }

    RationalMap directional(const RatVector& dir) const {
        std::vector<RatFunc> d;
        d.reserve(dir.size());
        for (const auto& c : dir) d.push_back(RatFunc::constant(arity_, c));
        return directional(d);
    }

    /// this after g: components substituted with g's components.
    RationalMap after(const RationalMap& g) const {
        if (g.codim() != arity_) throw dimension_error("composition shape mismatch");
        RationalMap m(g.arity(), codim());
        for (std::size_t i = 0; i < comps_.size(); ++i) m.comps_[i] = comps_[i].substitute(g.comps_);
        return m;
    }

    RationalMap remap(int new_nvars, const std::vector<int>& image) const {
        RationalMap m(new_nvars, codim());
        for (std::size_t i = 0; i < comps_.size(); ++i) m.comps_[i] = comps_[i].remap(new_nvars, image);
        return m;
    }

    friend RationalMap operator+(const RationalMap& a, const RationalMap& b) {
        if (a.arity_ != b.arity_ || a.codim() != b.codim()) throw dimension_error("map shape mismatch");
        RationalMap m(a.arity_, a.codim());
        for (std::size_t i = 0; i < a.comps_.size(); ++i) m.comps_[i] = a.comps_[i] + b.comps_[i];
        return m;
    }

    friend RationalMap operator-(const RationalMap& a, const RationalMap& b) {
        if (a.arity_ != b.arity_ || a.codim() != b.codim()) throw dimension_error("map shape mismatch");
        RationalMap m(a.arity_, a.codim());
        for (std::size_t i = 0; i < a.comps_.size(); ++i) m.comps_[i] = a.comps_[i] - b.comps_[i];
        return m;
    }

    friend RationalMap operator*(const RatFunc& c, const RationalMap& a) {
        RationalMap m(a.arity_, a.codim());
        for (std::size_t i = 0; i < a.comps_.size(); ++i) m.comps_[i] = c * a.comps_[i];
        return m;
    }

    bool operator==(const RationalMap& o) const { return arity_ == o.arity_ && comps_ == o.comps_; }
    bool operator!=(const RationalMap& o) const { return !(*this == o); }

private:
    int arity_;
    std::vector<RatFunc> comps_;
};

/// Equality as reduced rational functions. Canonical form makes this
/// structural; the cross-multiplied identity is kept as the defining check.
inline bool rmap_equal(const RatFunc& f, const RatFunc& g) {
    if (f.nvars() != g.nvars()) throw dimension_error("arity mismatch");
    return (f.num() * g.den() - g.num() * f.den()).is_zero();
}

inline bool rmap_equal(const RationalMap& f, const RationalMap& g) {
    if (f.arity() != g.arity() || f.codim() != g.codim()) throw dimension_error("map shape mismatch");
    for (int i = 0; i < f.codim(); ++i)
        if (!rmap_equal(f.comp(i), g.comp(i))) return false;
    return true;
}

} // namespace sgeom

#endif
