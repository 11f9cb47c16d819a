#pragma once

// Equality prover: Equal when normal forms coincide, NotEqual when one of the
// refutation oracles fires on the normalized pair, Unknown otherwise. Each
// oracle is a known disequality; its hypotheses are checked
// against attrs_of, never assumed.

#include <uexp/eval.hpp>
#include <uexp/rewrite.hpp>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace uexp {

namespace oracles {
    /// E1(p, q) != q for every nonprincipal q.
    inline constexpr std::string_view noid = "O-NOID";
    /// a^p = a^q iff p = q, and p^a = p^b iff a = b.
    inline constexpr std::string_view inj_exp = "O-INJ-EXP";
    /// p^a * p^b != p^(a+b) for nonprincipal p.
    inline constexpr std::string_view neqr = "O-NEQR";
    /// u + ap = v + bp forces a = b for nonprincipal p.
    inline constexpr std::string_view mal = "O-MAL";
    /// q + p != s * r when all four are nonprincipal and r is all-divisible.
    inline constexpr std::string_view hs = "O-HS";
    /// Distinct naturals.
    inline constexpr std::string_view principal = "O-PRINCIPAL";
} // namespace oracles

struct Refutation {
    std::string oracle;
    /// The oracle's metavariables and what they matched.
    std::vector<std::pair<std::string, UExpr>> bindings;
    /// For reductions (a^p vs a^q reduces to p vs q), the inner refutation.
    std::shared_ptr<const Refutation> via;
};

enum class VerdictKind { Equal, NotEqual, Unknown };

inline const char * verdict_name(VerdictKind k)
{
    switch (k) {
    case VerdictKind::Equal: return "Equal";
    case VerdictKind::NotEqual: return "NotEqual";
    case VerdictKind::Unknown: return "Unknown";
    }
    return "?";
}

struct Verdict {
    VerdictKind kind = VerdictKind::Unknown;
    UExpr lhs_normal;
    UExpr rhs_normal;
    Trace lhs_trace;
    Trace rhs_trace;
    std::optional<Refutation> refutation; ///< set iff kind == NotEqual
};

namespace detail {

    inline bool np(const UExpr & e)
    {
        return attrs_of(e).has(AttrSet::nonprincipal);
    }

    // x viewed as base^k, with k = 1 when x is not a natural power.
    inline std::pair<UExpr, BigNat> power_view(const UExpr & x)
    {
        if (x.is(Kind::Exp1) && x.rhs().is_nat())
            return {x.lhs(), x.rhs().value()};
        return {x, 1};
    }

    // x viewed as a * core, with a = 1 when x carries no scalar.
    inline std::pair<BigNat, UExpr> scale_view(const UExpr & x)
    {
        if (x.is(Kind::Prod) && x.lhs().is_nat())
            return {x.lhs().value(), x.rhs()};
        return {1, x};
    }

    std::optional<Refutation> refute(const UExpr & a, const UExpr & b, int depth);

    // One orientation of each oracle; refute() tries both.
    inline std::optional<Refutation> refute_oriented(const UExpr & a, const UExpr & b, int depth)
    {
        if (a.is_nat() && b.is_nat() && a.value() != b.value())
            return Refutation {std::string(oracles::principal), {{"m", a}, {"n", b}}, nullptr};

        if (a.is(Kind::Exp1) && a.rhs() == b && np(b))
            return Refutation {std::string(oracles::noid), {{"p", a.lhs()}, {"q", b}}, nullptr};

        if (a.is(Kind::Exp1) && b.is(Kind::Exp1)) {
            auto & ab = a.lhs();
            auto & bb = b.lhs();
            if (ab.is_nat() && bb.is_nat() && ab.value() == bb.value() && ab.value() >= 2 && depth < 64) {
                if (auto inner = refute(a.rhs(), b.rhs(), depth + 1))
                    return Refutation {std::string(oracles::inj_exp), {{"a", ab}, {"p", a.rhs()}, {"q", b.rhs()}},
                        std::make_shared<const Refutation>(std::move(*inner))};
            }
            if (ab == bb && a.rhs().is_nat() && b.rhs().is_nat() && a.rhs().value() != b.rhs().value() && np(ab))
                return Refutation {std::string(oracles::inj_exp), {{"p", ab}, {"a", a.rhs()}, {"b", b.rhs()}}, nullptr};
        }

        if (a.is(Kind::Prod) && b.is(Kind::Exp1) && b.rhs().is_nat()) {
            auto [x, i] = power_view(a.lhs());
            auto [y, j] = power_view(a.rhs());
            auto & p = b.lhs();
            if (x == p && y == p && i + j == b.rhs().value() && np(p))
                return Refutation {std::string(oracles::neqr), {{"p", p}, {"a", UExpr::nat(i)}, {"b", UExpr::nat(j)}}, nullptr};
        }

        if (a.is(Kind::Sum) && b.is(Kind::Sum)) {
            auto [i, p] = scale_view(a.rhs());
            auto [j, q] = scale_view(b.rhs());
            if (p == q && i != j && np(p))
                return Refutation {std::string(oracles::mal),
                    {{"u", a.lhs()}, {"v", b.lhs()}, {"p", p}, {"a", UExpr::nat(i)}, {"b", UExpr::nat(j)}}, nullptr};
        }
        if (! a.is(Kind::Sum) && ! b.is(Kind::Sum)) {
            // ap = bp would give 1 + ap = 1 + bp.
            auto [i, p] = scale_view(a);
            auto [j, q] = scale_view(b);
            if (p == q && i != j && np(p))
                return Refutation {std::string(oracles::mal),
                    {{"u", UExpr::nat(1)}, {"v", UExpr::nat(1)}, {"p", p}, {"a", UExpr::nat(i)}, {"b", UExpr::nat(j)}}, nullptr};
        }

        if (a.is(Kind::Sum) && b.is(Kind::Prod)) {
            auto & q = a.lhs();
            auto & p = a.rhs();
            auto & s = b.lhs();
            auto & r = b.rhs();
            if (np(p) && np(q) && np(s) && np(r) && attrs_of(r).has(AttrSet::all_divisible))
                return Refutation {std::string(oracles::hs), {{"q", q}, {"p", p}, {"s", s}, {"r", r}}, nullptr};
        }

        return std::nullopt;
    }

    inline std::optional<Refutation> refute(const UExpr & a, const UExpr & b, int depth)
    {
        if (auto r = refute_oriented(a, b, depth))
            return r;
        return refute_oriented(b, a, depth);
    }

} // namespace detail

/// Runs every refutation oracle on a pair of (already normalized) terms in
/// both orientations. Exposed so tests can check that no oracle ever fires on
/// a pair the rewriter proved equal.
inline std::optional<Refutation> run_oracles(const UExpr & a, const UExpr & b)
{
    return detail::refute(a, b, 0);
}

/// Decides e1 = e2 as far as the rule catalog and oracles allow. Attributes
/// declared on either side are shared by name before normalizing.
inline Verdict prove_equal(const UExpr & e1, const UExpr & e2, const NormalizeOptions & opts = {})
{
    std::map<std::string, AttrSet> env;
    collect_vars(e1, env);
    collect_vars(e2, env);

    auto l = normalize_traced(with_unified_attrs(e1, env), opts);
    auto r = normalize_traced(with_unified_attrs(e2, env), opts);

    Verdict v;
    v.lhs_normal = l.expr;
    v.rhs_normal = r.expr;
    v.lhs_trace = std::move(l.trace);
    v.rhs_trace = std::move(r.trace);

    if (v.lhs_normal == v.rhs_normal) {
        v.kind = VerdictKind::Equal;
        return v;
    }
    if (auto refutation = run_oracles(v.lhs_normal, v.rhs_normal)) {
        v.kind = VerdictKind::NotEqual;
        v.refutation = std::move(refutation);
        return v;
    }
    v.kind = VerdictKind::Unknown;
    return v;
}

} // namespace uexp
