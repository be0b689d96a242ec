#pragma once

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

#include "groupsparse/error.hpp"

namespace groupsparse {

/// One multiplicative factor of a candidate term: a state variable, an
/// optional derivative multi-index (per spatial axis), and an integer power.
struct TermFactor {
    std::string var;
    std::vector<int> deriv;  // empty means the plain variable
    int power = 1;

    int derivative_order() const {
        int s = 0;
        for (int d : deriv) s += d;
        return s;
    }

    friend bool operator==(const TermFactor& a, const TermFactor& b) {
        return a.var == b.var && a.deriv == b.deriv && a.power == b.power;
    }
};

/// Orders derivative multi-indices: lower total order first, then earlier
/// axes first (u_x before u_y, u_xx before u_yy).
inline bool deriv_less(const std::vector<int>& a, const std::vector<int>& b) {
    int oa = 0, ob = 0;
    for (int d : a) oa += d;
    for (int d : b) ob += d;
    if (oa != ob) return oa < ob;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

inline bool factor_key_less(const TermFactor& a, const TermFactor& b) {
    if (a.var != b.var) return a.var < b.var;
    if (a.deriv != b.deriv) return deriv_less(a.deriv, b.deriv);
    return false;
}

/// A candidate right-hand-side term: a product of factors, optionally times
/// a measured exogenous input (always power one). The empty product is the
/// constant term "1".
struct TermLabel {
    std::vector<TermFactor> factors;
    std::string exogenous;

    static TermLabel constant() { return {}; }

    static TermLabel variable(const std::string& var, int power = 1) {
        TermLabel l;
        l.factors.push_back({var, {}, power});
        return l;
    }

    static TermLabel derivative(const std::string& var, std::vector<int> orders, int power = 1) {
        TermLabel l;
        l.factors.push_back({var, std::move(orders), power});
        return l;
    }

    /// Total polynomial degree: sum of factor powers plus one for an
    /// exogenous input, counting derivative factors as well.
    int degree() const {
        int d = exogenous.empty() ? 0 : 1;
        for (const auto& f : factors) d += f.power;
        return d;
    }

    int max_derivative_order() const {
        int m = 0;
        for (const auto& f : factors) m = std::max(m, f.derivative_order());
        return m;
    }

    bool is_constant() const { return factors.empty() && exogenous.empty(); }

    void canonicalize() {
        std::sort(factors.begin(), factors.end(), factor_key_less);
        // Merge repeated (var, deriv) factors.
        std::vector<TermFactor> merged;
        for (auto& f : factors) {
            if (!merged.empty() && merged.back().var == f.var && merged.back().deriv == f.deriv)
                merged.back().power += f.power;
            else
                merged.push_back(f);
        }
        factors = std::move(merged);
    }

    friend TermLabel operator*(const TermLabel& a, const TermLabel& b) {
        require(a.exogenous.empty() || b.exogenous.empty(), errc::invalid_argument,
                "term labels: at most one exogenous factor");
        TermLabel out = a;
        out.factors.insert(out.factors.end(), b.factors.begin(), b.factors.end());
        if (out.exogenous.empty()) out.exogenous = b.exogenous;
        out.canonicalize();
        return out;
    }

    friend bool operator==(const TermLabel& a, const TermLabel& b) {
        return a.factors == b.factors && a.exogenous == b.exogenous;
    }

    std::string str() const {
        if (is_constant()) return "1";
        std::string s;
        static const char axes[] = {'x', 'y', 'z'};
        for (const auto& f : factors) {
            if (!s.empty()) s += '*';
            s += f.var;
            if (f.derivative_order() > 0) {
                s += '_';
                for (std::size_t a = 0; a < f.deriv.size(); ++a)
                    for (int k = 0; k < f.deriv[a]; ++k) s += axes[a];
            }
            if (f.power != 1) s += '^' + std::to_string(f.power);
        }
        if (!exogenous.empty()) {
            if (!s.empty()) s += '*';
            s += exogenous;
        }
        return s;
    }
};

/// Graded lexicographic order: lower total degree first; within a degree,
/// earlier variables and higher powers first (x1, x2, x1^2, x1*x2, x2^2).
inline bool grlex_less(const TermLabel& a, const TermLabel& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    const std::size_t n = std::max(a.factors.size(), b.factors.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= a.factors.size()) return false;  // a has trailing exogenous only
        if (i >= b.factors.size()) return true;
        const auto& fa = a.factors[i];
        const auto& fb = b.factors[i];
        if (factor_key_less(fa, fb)) return true;
        if (factor_key_less(fb, fa)) return false;
        if (fa.power != fb.power) return fa.power > fb.power;
    }
    return a.exogenous < b.exogenous;
}

/// Exchanges the roles of two species in a label (u^2 v -> v^2 u,
/// u_xx -> v_xx). Labels touching neither species are returned unchanged;
/// the operation is an involution.
inline TermLabel swap_image(const TermLabel& label, const std::string& a, const std::string& b) {
    TermLabel out = label;
    for (auto& f : out.factors) {
        if (f.var == a)
            f.var = b;
        else if (f.var == b)
            f.var = a;
    }
    out.canonicalize();
    return out;
}

}  // namespace groupsparse
