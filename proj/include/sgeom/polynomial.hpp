#ifndef SGEOM_POLYNOMIAL_HPP
#define SGEOM_POLYNOMIAL_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "sgeom/rational.hpp"

namespace sgeom {

/// Sparse multivariate polynomial over the rationals. Terms are kept in a
/// map ordered lexicographically on exponent vectors, with no zero
/// coefficients, so equality is structural.
class Polynomial {
public:
    using Exponents = std::vector<unsigned>;
    using TermMap = std::map<Exponents, Rational>;

    explicit Polynomial(int nvars = 0) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c) {
        Polynomial p(nvars);
        p.add_term(Exponents(static_cast<std::size_t>(nvars), 0u), c);
        return p;
    }

    static Polynomial variable(int nvars, int i) {
        if (i < 0 || i >= nvars) throw dimension_error("variable index out of range");
        Polynomial p(nvars);
        Exponents e(static_cast<std::size_t>(nvars), 0u);
        e[static_cast<std::size_t>(i)] = 1u;
        p.add_term(std::move(e), Rational(1));
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return terms_.empty(); }
    const TermMap& terms() const { return terms_; }

    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() > 1) return false;
        return total_degree(terms_.begin()->first) == 0;
    }

    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw domain_error("polynomial is not constant");
        return terms_.begin()->second;
    }

    void add_term(Exponents e, const Rational& c) {
        if (static_cast<int>(e.size()) != nvars_) throw dimension_error("exponent arity mismatch");
        if (sgn(c) == 0) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(std::move(e), c);
        } else {
            it->second += c;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& o) {
        check_arity(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& o) {
        check_arity(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    Polynomial operator-() const {
        Polynomial r(nvars_);
        for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
        return r;
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_arity(b);
        Polynomial r(a.nvars_);
        for (const auto& [ea, ca] : a.terms_)
            for (const auto& [eb, cb] : b.terms_) {
                Exponents e(ea);
                for (std::size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(std::move(e), ca * cb);
            }
        return r;
    }

    friend Polynomial operator*(const Rational& c, const Polynomial& p) {
        Polynomial r(p.nvars_);
        if (sgn(c) == 0) return r;
        for (const auto& [e, pc] : p.terms_) r.terms_.emplace(e, c * pc);
        return r;
    }

    bool operator==(const Polynomial& o) const { return nvars_ == o.nvars_ && terms_ == o.terms_; }
    bool operator!=(const Polynomial& o) const { return !(*this == o); }

    Polynomial pow(unsigned k) const {
        Polynomial r = constant(nvars_, Rational(1));
        for (unsigned i = 0; i < k; ++i) r = r * *this;
        return r;
    }

    int total_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(total_degree(e)));
        return d; // -1 for the zero polynomial
    }

    int degree_in(int var) const {
        int d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(e[static_cast<std::size_t>(var)]));
        return d;
    }

    bool depends_on(int var) const { return degree_in(var) > 0; }

    Rational eval(const RatVector& x) const {
        if (static_cast<int>(x.size()) != nvars_) throw dimension_error("evaluation point arity mismatch");
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational t(c);
            for (std::size_t i = 0; i < e.size(); ++i)
                for (unsigned k = 0; k < e[i]; ++k) t *= x[i];
            acc += t;
        }
        return acc;
    }

    Polynomial partial(int var) const {
        Polynomial r(nvars_);
        const auto v = static_cast<std::size_t>(var);
        for (const auto& [e, c] : terms_) {
            if (e[v] == 0) continue;
            Exponents d(e);
            --d[v];
            r.add_term(std::move(d), Rational(static_cast<long>(e[v])) * c);
        }
        return r;
    }

    /// Re-homes the polynomial into a new variable set: old variable i becomes
    /// image[i]; image[i] == -1 substitutes zero for it.
    Polynomial remap(int new_nvars, const std::vector<int>& image) const {
        if (static_cast<int>(image.size()) != nvars_) throw dimension_error("remap table arity mismatch");
        Polynomial r(new_nvars);
        for (const auto& [e, c] : terms_) {
            Exponents ne(static_cast<std::size_t>(new_nvars), 0u);
            bool dead = false;
            for (std::size_t i = 0; i < e.size() && !dead; ++i) {
                if (e[i] == 0) continue;
                if (image[i] < 0)
                    dead = true;
                else
                    ne[static_cast<std::size_t>(image[i])] += e[i];
            }
            if (!dead) r.add_term(std::move(ne), c);
        }
        return r;
    }

    Polynomial with_nvars(int n) const {
        if (n < nvars_) throw dimension_error("cannot shrink variable set");
        std::vector<int> image(static_cast<std::size_t>(nvars_));
        for (int i = 0; i < nvars_; ++i) image[static_cast<std::size_t>(i)] = i;
        return remap(n, image);
    }

    /// Leading coefficient with respect to the lexicographic term order.
    Rational leading_coeff() const {
        if (terms_.empty()) return Rational(0);
        return terms_.rbegin()->second;
    }

    std::string to_string(const std::vector<std::string>& names = {}) const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            if (!first) out += " + ";
            first = false;
            out += rat_to_string(it->second);
            for (std::size_t i = 0; i < it->first.size(); ++i) {
                if (it->first[i] == 0) continue;
                out += "*";
                out += (i < names.size()) ? names[i] : ("x" + std::to_string(i + 1));
                if (it->first[i] > 1) out += "^" + std::to_string(it->first[i]);
            }
        }
        return out;
    }

private:
    static unsigned total_degree(const Exponents& e) {
        unsigned d = 0;
        for (unsigned x : e) d += x;
        return d;
    }

    void check_arity(const Polynomial& o) const {
        if (nvars_ != o.nvars_) throw dimension_error("polynomial arity mismatch");
    }

    int nvars_;
    TermMap terms_;
};

namespace detail {

/// Exact division; throws domain_error when the division is not exact.
inline Polynomial divide_exact(const Polynomial& num, const Polynomial& den) {
    if (den.is_zero()) throw domain_error("polynomial division by zero");
    Polynomial rem = num;
    Polynomial quot(num.nvars());
    const auto& dlt = *den.terms().rbegin();
    while (!rem.is_zero()) {
        const auto& rlt = *rem.terms().rbegin();
        Polynomial::Exponents qe(rlt.first);
        bool divisible = true;
        for (std::size_t i = 0; i < qe.size(); ++i) {
            if (qe[i] < dlt.first[i]) {
                divisible = false;
                break;
            }
            qe[i] -= dlt.first[i];
        }
        if (!divisible) throw domain_error("inexact polynomial division");
        Rational qc = rlt.second / dlt.second;
        Polynomial t(num.nvars());
        t.add_term(qe, qc);
        quot += t;
        rem -= t * den;
    }
    return quot;
}

/// Collects a polynomial as univariate in `var` with polynomial coefficients
/// (still carried at the full arity, with exponent zero in `var`).
inline std::map<unsigned, Polynomial> collect(const Polynomial& p, int var) {
    std::map<unsigned, Polynomial> out;
    const auto v = static_cast<std::size_t>(var);
    for (const auto& [e, c] : p.terms()) {
        unsigned d = e[v];
        Polynomial::Exponents rest(e);
        rest[v] = 0;
        auto [it, inserted] = out.try_emplace(d, Polynomial(p.nvars()));
        it->second.add_term(std::move(rest), c);
    }
    return out;
}

inline Polynomial from_collected(const std::map<unsigned, Polynomial>& coeffs, int var, int nvars) {
    Polynomial r(nvars);
    for (const auto& [d, c] : coeffs) {
        Polynomial xv = Polynomial::variable(nvars, var).pow(d);
        r += c * xv;
    }
    return r;
}

Polynomial poly_gcd(const Polynomial& a, const Polynomial& b);

/// GCD of the univariate coefficient list of `p` in `var`.
inline Polynomial poly_content(const Polynomial& p, int var) {
    Polynomial g(p.nvars());
    for (const auto& [d, c] : collect(p, var)) g = poly_gcd(g, c);
    return g;
}

/// Pseudo-remainder of a by b in the variable `var`.
inline Polynomial pseudo_rem(Polynomial a, const Polynomial& b, int var) {
    auto bc = collect(b, var);
    const unsigned db = bc.rbegin()->first;
    const Polynomial& lb = bc.rbegin()->second;
    while (true) {
        if (a.is_zero()) return a;
        auto ac = collect(a, var);
        const unsigned da = ac.rbegin()->first;
        if (da < db) return a;
        const Polynomial& la = ac.rbegin()->second;
        Polynomial shift = Polynomial::variable(a.nvars(), var).pow(da - db);
        a = lb * a - la * shift * b;
    }
}

inline int pick_main_var(const Polynomial& a, const Polynomial& b) {
    for (int v = a.nvars() - 1; v >= 0; --v)
        if (a.depends_on(v) || b.depends_on(v)) return v;
    return -1;
}

/// GCD over Q, normalized so the lexicographic leading coefficient is one.
inline Polynomial poly_gcd(const Polynomial& a, const Polynomial& b) {
    if (a.nvars() != b.nvars()) throw dimension_error("gcd arity mismatch");
    auto normalize = [](Polynomial p) {
        if (p.is_zero()) return p;
        Rational lc = p.leading_coeff();
        return (Rational(1) / lc) * p;
    };
    if (a.is_zero()) return normalize(b);
    if (b.is_zero()) return normalize(a);
    // nonzero constants are units over the rationals
    if (a.is_constant() || b.is_constant()) return Polynomial::constant(a.nvars(), Rational(1));
    if (a == b) return normalize(a);
    int var = pick_main_var(a, b);
    if (var < 0) return Polynomial::constant(a.nvars(), Rational(1));

    if (!a.depends_on(var) || !b.depends_on(var)) {
        // One side is free of the main variable: gcd divides that side's
        // coefficient gcd paired with the other side's content.
        const Polynomial& free_side = a.depends_on(var) ? b : a;
        const Polynomial& other = a.depends_on(var) ? a : b;
        return poly_gcd(free_side, poly_content(other, var));
    }

    Polynomial ca = poly_content(a, var);
    Polynomial cb = poly_content(b, var);
    Polynomial pa = divide_exact(a, ca);
    Polynomial pb = divide_exact(b, cb);
    Polynomial cont = poly_gcd(ca, cb);

    // Primitive PRS in the main variable.
    while (!pb.is_zero()) {
        Polynomial r = pseudo_rem(pa, pb, var);
        pa = pb;
        if (r.is_zero()) {
            pb = r;
        } else {
            pb = divide_exact(r, poly_content(r, var));
        }
    }
    Polynomial g = cont * divide_exact(pa, poly_content(pa, var));
    return normalize(g);
}

} // namespace detail

inline Polynomial gcd(const Polynomial& a, const Polynomial& b) { return detail::poly_gcd(a, b); }

} // namespace sgeom

#endif
