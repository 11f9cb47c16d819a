#pragma once

// Normalization by the exponent/logarithm laws. Rules fire innermost-first in
// catalog order until no rule applies; every firing is recorded with the path
// of the rewritten subterm, so a trace can be replayed against the input.
//
// Catalog (see docs/rules.md for the law behind each rule):
//   FOLD      op(n1, n2) -> integer value (all children naturals)
//   FOLD-ONE  p^1 -> p,  1^p -> 1,  1*p -> p
//   E2CAN     E2(p, n) -> n^p,  E2(n, p) -> p^n
//   SCALCTR   p + n -> n + p,  p * n -> n * p       (p not a natural)
//   LOGPOW    log_b(c^q) -> log_b(c) * q           (c an exact power of b)
//   BASEROOT  c^q -> d^(k*q)                        (c = d^k, d minimal, k >= 2)
//   E1FLAT    (p^q)^r -> p^(q*r)
//   E2ASSOC   E2(p, E2(q, r)) -> E2(p*q, r)
//   SAMEBASE  a^p * a^q -> a^(p+q)                  (a >= 2)

#include <uexp/eval.hpp>
#include <uexp/expr.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uexp {

namespace rules {
    inline constexpr std::string_view fold = "FOLD";
    inline constexpr std::string_view fold_one = "FOLD-ONE";
    inline constexpr std::string_view e2can = "E2CAN";
    inline constexpr std::string_view scalctr = "SCALCTR";
    inline constexpr std::string_view logpow = "LOGPOW";
    inline constexpr std::string_view baseroot = "BASEROOT";
    inline constexpr std::string_view e1flat = "E1FLAT";
    inline constexpr std::string_view e2assoc = "E2ASSOC";
    inline constexpr std::string_view samebase = "SAMEBASE";

    inline constexpr std::array<std::string_view, 9> catalog {fold, fold_one, e2can, scalctr, logpow, baseroot, e1flat, e2assoc, samebase};
} // namespace rules

/// One rule firing: `before` was the subterm at `path` and became `after`.
struct RewriteStep {
    std::string rule;
    Path path;
    UExpr before;
    UExpr after;
};

using Trace = std::vector<RewriteStep>;

struct NormalizeOptions {
    BigNat cap = default_cap();
    std::size_t max_steps = 100000;
};

struct Normalized {
    UExpr expr;
    Trace trace;
};

namespace detail {

    struct RootRewrite {
        std::string_view rule;
        UExpr result;
    };

    inline bool all_nat_children(const UExpr & e)
    {
        if (e.arity() == 0)
            return false;
        for (std::size_t i = 0; i < e.arity(); ++i)
            if (! e.child(i).is_nat())
                return false;
        return true;
    }

    inline std::optional<RootRewrite> rewrite_root(const UExpr & e, const BigNat & cap)
    {
        using rules::fold;

        if (all_nat_children(e)) {
            try {
                return RootRewrite {fold, UExpr::nat(eval_principal(e, cap))};
            }
            catch (const DomainError &) {
                // log of a non-power, F(1), ... : no integer value, leave it
            }
        }

        const Kind k = e.kind();

        if (k == Kind::Exp1 && e.rhs().is_nat(1))
            return RootRewrite {rules::fold_one, e.lhs()};
        if (k == Kind::Exp1 && e.lhs().is_nat(1))
            return RootRewrite {rules::fold_one, UExpr::nat(1)};
        if (k == Kind::Prod && e.lhs().is_nat(1))
            return RootRewrite {rules::fold_one, e.rhs()};

        if (k == Kind::Exp2 && e.rhs().is_nat())
            return RootRewrite {rules::e2can, UExpr::exp1(e.rhs(), e.lhs())};
        if (k == Kind::Exp2 && e.lhs().is_nat())
            return RootRewrite {rules::e2can, UExpr::exp1(e.rhs(), e.lhs())};

        if ((k == Kind::Sum || k == Kind::Prod) && e.rhs().is_nat() && ! e.lhs().is_nat())
            return RootRewrite {rules::scalctr, e.with_children(e.rhs(), e.lhs())};

        if (k == Kind::Lift && e.lift_id().kind() == LiftKind::log && e.arg().is(Kind::Exp1) && e.arg().lhs().is_nat()) {
            if (auto j = exact_log(e.arg().lhs().value(), e.lift_id().base()))
                return RootRewrite {rules::logpow, UExpr::prod(UExpr::nat(*j), e.arg().rhs())};
        }

        if (k == Kind::Exp1 && e.lhs().is_nat() && ! e.rhs().is_nat()) {
            auto root = minimal_root(e.lhs().value());
            if (root.exponent >= 2)
                return RootRewrite {rules::baseroot, UExpr::exp1(UExpr::nat(root.root), UExpr::prod(UExpr::nat(root.exponent), e.rhs()))};
        }

        if (k == Kind::Exp1 && e.lhs().is(Kind::Exp1))
            return RootRewrite {rules::e1flat, UExpr::exp1(e.lhs().lhs(), UExpr::prod(e.lhs().rhs(), e.rhs()))};

        if (k == Kind::Exp2 && e.rhs().is(Kind::Exp2))
            return RootRewrite {rules::e2assoc, UExpr::exp2(UExpr::prod(e.lhs(), e.rhs().lhs()), e.rhs().rhs())};

        if (k == Kind::Prod && e.lhs().is(Kind::Exp1) && e.rhs().is(Kind::Exp1)) {
            auto & a = e.lhs().lhs();
            auto & b = e.rhs().lhs();
            if (a.is_nat() && b.is_nat() && a.value() == b.value() && a.value() >= 2)
                return RootRewrite {rules::samebase, UExpr::exp1(a, UExpr::sum(e.lhs().rhs(), e.rhs().rhs()))};
        }

        return std::nullopt;
    }

    class Normalizer {
    public:
        explicit Normalizer(const NormalizeOptions & o) : opts_(o) {}

        UExpr run(UExpr e)
        {
            Path path;
            return visit(std::move(e), path);
        }

        Trace take_trace() { return std::move(trace_); }

    private:
        UExpr visit(UExpr e, Path & path)
        {
            for (;;) {
                e = visit_children(std::move(e), path);
                auto r = rewrite_root(e, opts_.cap);
                if (! r)
                    return e;
                if (trace_.size() >= opts_.max_steps)
                    throw RewriteBudgetExceeded("rewrite step budget exhausted");
                trace_.push_back({std::string(r->rule), path, e, r->result});
                e = std::move(r->result);
            }
        }

        UExpr visit_children(UExpr e, Path & path)
        {
            if (e.arity() == 0)
                return e;
            path.push_back(0);
            UExpr a = visit(e.child(0), path);
            path.pop_back();
            if (e.arity() == 1)
                return a == e.child(0) ? e : e.with_children(std::move(a));
            path.push_back(1);
            UExpr b = visit(e.child(1), path);
            path.pop_back();
            if (a == e.child(0) && b == e.child(1))
                return e;
            return e.with_children(std::move(a), std::move(b));
        }

        const NormalizeOptions & opts_;
        Trace trace_;
    };

} // namespace detail

/// Normal form plus the replayable sequence of rule firings.
///
/// Throws CapExceeded when FOLD would produce a value above the cap and
/// RewriteBudgetExceeded if more than `max_steps` rules fire.
inline Normalized normalize_traced(const UExpr & e, const NormalizeOptions & opts = {})
{
    detail::Normalizer n(opts);
    UExpr out = n.run(e);
    return {std::move(out), n.take_trace()};
}

inline UExpr normalize(const UExpr & e, const NormalizeOptions & opts = {})
{
    return normalize_traced(e, opts).expr;
}

inline Trace rule_trace(const UExpr & e, const NormalizeOptions & opts = {})
{
    return normalize_traced(e, opts).trace;
}

/// Applies a trace step by step. Throws if a step's `before` does not match
/// the subterm found at its path.
inline UExpr replay(const UExpr & e, const Trace & trace)
{
    UExpr cur = e;
    for (auto & step : trace) {
        if (! (subterm_at(cur, step.path) == step.before))
            throw Error("trace step " + step.rule + " does not match the term at its path");
        cur = replace_at(cur, step.path, step.after);
    }
    return cur;
}

/// Lexicographic termination measure. Every rule firing strictly decreases it:
///   0: Exp2 nodes            (E2CAN, E2ASSOC)
///   1: Exp1 nodes            (E1FLAT, SAMEBASE, LOGPOW, FOLD-ONE on powers)
///   2: Exp1 nodes whose base is variable-free but not a minimal-root natural (BASEROOT)
///   3: Lift nodes
///   4: variable-free inner nodes (FOLD)
///   5: Sum/Prod nodes with a natural on the right only (SCALCTR)
///   6: tree size             (FOLD-ONE on 1*p)
using Measure = std::array<std::size_t, 7>;

inline Measure termination_measure(const UExpr & e)
{
    Measure m {};
    auto walk = [&](auto && self, const UExpr & n) -> void {
        ++m[6];
        switch (n.kind()) {
        case Kind::Exp2: ++m[0]; break;
        case Kind::Exp1: {
            ++m[1];
            auto & b = n.lhs();
            bool minimal_nat = b.is_nat() && minimal_root(b.value()).exponent == 1;
            if (! b.has_vars() && ! minimal_nat)
                ++m[2];
            break;
        }
        case Kind::Lift: ++m[3]; break;
        case Kind::Sum:
        case Kind::Prod:
            if (n.rhs().is_nat() && ! n.lhs().is_nat())
                ++m[5];
            break;
        default: break;
        }
        if (n.arity() > 0 && ! n.has_vars())
            ++m[4];
        for (std::size_t i = 0; i < n.arity(); ++i)
            self(self, n.child(i));
    };
    walk(walk, e);
    return m;
}

} // namespace uexp
