#pragma once

#include <uexp/expr.hpp>
#include <uexp/numth.hpp>

#include <cstdint>
#include <limits>

namespace uexp {

/// Applies the integer function behind a Lift to a natural.
inline BigNat apply_lift(const LiftId & fn, const BigNat & n, const BigNat & cap)
{
    switch (fn.kind()) {
    case LiftKind::log: {
        auto k = exact_log(n, fn.base());
        if (! k)
            throw DomainError("log_" + std::to_string(fn.base()) + " of " + n.str() + ": not an exact power");
        return *k;
    }
    case LiftKind::pow: return checked_pow(fn.base(), n, cap);
    case LiftKind::Omega: return numth::fn_Omega(n);
    case LiftKind::F: return numth::fn_F(n);
    case LiftKind::G: return numth::fn_G(n);
    case LiftKind::H: return numth::fn_H(n);
    }
    throw DomainError("unknown lift");
}

/// Integer value of a variable-free expression. Every intermediate value must
/// stay within `cap`. Exp1(n, m) = n^m and Exp2(n, m) = m^n.
///
/// Throws CapExceeded, or DomainError for log of a non-power, F/G/H of 1, a
/// zero result (Omega(1) = 0 is not a natural) or a variable.
inline BigNat eval_principal(const UExpr & e, const BigNat & cap = default_cap())
{
    auto checked = [&](BigNat v) {
        if (v > cap)
            throw CapExceeded("value exceeds cap");
        return v;
    };
    switch (e.kind()) {
    case Kind::Nat: return checked(e.value());
    case Kind::Var: throw DomainError("cannot evaluate variable '" + e.name() + "' on principal semantics");
    case Kind::Sum: return checked_add(eval_principal(e.lhs(), cap), eval_principal(e.rhs(), cap), cap);
    case Kind::Prod: return checked_mul(eval_principal(e.lhs(), cap), eval_principal(e.rhs(), cap), cap);
    case Kind::Exp1: return checked_pow(eval_principal(e.lhs(), cap), eval_principal(e.rhs(), cap), cap);
    case Kind::Exp2: {
        auto first = eval_principal(e.lhs(), cap);
        auto second = eval_principal(e.rhs(), cap);
        return checked_pow(second, first, cap);
    }
    case Kind::Lift: {
        auto v = apply_lift(e.lift_id(), eval_principal(e.arg(), cap), cap);
        if (v == 0)
            throw DomainError(e.lift_id().name() + " evaluated to 0, which is not a natural");
        return checked(v);
    }
    }
    throw DomainError("unknown node");
}

namespace detail {
    inline bool nonprincipal(const UExpr & e);

    // Sound test that e is not the principal ultrafilter 1.
    inline bool not_one(const UExpr & e)
    {
        switch (e.kind()) {
        case Kind::Nat: return e.value() >= 2;
        case Kind::Var: return e.attrs().has(AttrSet::nonprincipal);
        case Kind::Sum: return true;
        case Kind::Prod: return not_one(e.lhs()) || not_one(e.rhs());
        case Kind::Exp1: return not_one(e.lhs());
        case Kind::Exp2: return not_one(e.rhs());
        case Kind::Lift: return e.lift_id().kind() == LiftKind::pow || nonprincipal(e);
        }
        return false;
    }

    inline bool nonprincipal(const UExpr & e)
    {
        switch (e.kind()) {
        case Kind::Nat: return false;
        case Kind::Var: return e.attrs().has(AttrSet::nonprincipal);
        // The nonprincipal ultrafilters form an ideal for both operations.
        case Kind::Sum:
        case Kind::Prod: return nonprincipal(e.lhs()) || nonprincipal(e.rhs());
        // n -> n^m is finite-to-one on n >= 2 for each fixed m, and m -> n^m
        // is injective once n >= 2; a base that may be 1 collapses everything.
        case Kind::Exp1: return nonprincipal(e.lhs()) || (nonprincipal(e.rhs()) && not_one(e.lhs()));
        case Kind::Exp2: return nonprincipal(e.rhs()) || (nonprincipal(e.lhs()) && not_one(e.rhs()));
        case Kind::Lift:
            switch (e.lift_id().kind()) {
            case LiftKind::pow:
            case LiftKind::log: return nonprincipal(e.arg());
            default: return false; // F, Omega, G, H can collapse a nonprincipal argument
            }
        }
        return false;
    }
} // namespace detail

/// Attributes derivable for a compound expression. Variables report their
/// declared flags; compound terms report `nonprincipal` when it follows from
/// their parts and nothing else.
inline AttrSet attrs_of(const UExpr & e)
{
    if (e.is_var())
        return e.attrs();
    return detail::nonprincipal(e) ? AttrSet(AttrSet::nonprincipal) : AttrSet();
}

} // namespace uexp
