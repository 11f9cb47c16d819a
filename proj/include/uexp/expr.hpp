#pragma once

// Term algebra for expressions over ultrafilters on the positive naturals.
//
// A UExpr is an immutable tree of naturals, attributed variables, and the
// operations Sum (the extension of +), Prod (of *), Exp1 / Exp2 (the two
// exponentiations) and Lift (the continuous extension of an integer function).
// The tree constructors never reorder or reassociate operands.

#include <uexp/bignat.hpp>
#include <uexp/error.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace uexp {

/// Semantic flags carried by variables. Implications between flags are closed
/// on construction, so two sets compare equal iff they mean the same thing.
class AttrSet {
public:
    enum Flag : unsigned {
        nonprincipal = 1u << 0,
        add_idempotent = 1u << 1,
        mul_idempotent = 1u << 2,
        min_ideal_closure = 1u << 3, ///< member of the closure of K(betaN, *)
        vdw_witness = 1u << 4,
        esw_member = 1u << 5,
        all_divisible = 1u << 6, ///< aZ belongs to it for infinitely many a
    };

    constexpr AttrSet() = default;
    constexpr explicit AttrSet(unsigned bits) : bits_(close(bits)) {}

    constexpr bool has(Flag f) const { return (bits_ & f) != 0; }
    constexpr AttrSet with(Flag f) const { return AttrSet(bits_ | f); }
    constexpr AttrSet operator|(AttrSet o) const { return AttrSet(bits_ | o.bits_); }
    constexpr unsigned bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }

    friend constexpr bool operator==(AttrSet, AttrSet) = default;

    struct Name {
        Flag flag;
        std::string_view name;
    };

    /// Concrete-syntax names, in printing order.
    static constexpr std::array<Name, 7> names {{
        {nonprincipal, "nonprincipal"},
        {add_idempotent, "add_idem"},
        {mul_idempotent, "mul_idem"},
        {min_ideal_closure, "min_ideal"},
        {vdw_witness, "vdw"},
        {esw_member, "esw"},
        {all_divisible, "all_divisible"},
    }};

    static std::optional<Flag> flag_named(std::string_view n)
    {
        for (auto & e : names)
            if (e.name == n)
                return e.flag;
        return std::nullopt;
    }

    std::vector<std::string_view> flag_names() const
    {
        std::vector<std::string_view> out;
        for (auto & e : names)
            if (has(e.flag))
                out.push_back(e.name);
        return out;
    }

private:
    // closure of K is inside the vdW witnesses; every flag except esw forces
    // the ultrafilter to be nonprincipal (1 is trivially an exponential
    // Schur witness, so esw alone says nothing).
    static constexpr unsigned close(unsigned b)
    {
        if (b & min_ideal_closure)
            b |= vdw_witness;
        if (b & (add_idempotent | mul_idempotent | min_ideal_closure | vdw_witness | all_divisible))
            b |= nonprincipal;
        return b;
    }

    unsigned bits_ = 0;
};

enum class LiftKind { log, pow, Omega, F, G, H };

/// Which integer function a Lift node extends. log and pow carry a base >= 2.
class LiftId {
public:
    static LiftId log(std::uint64_t base) { return LiftId(LiftKind::log, check_base(base)); }
    static LiftId pow(std::uint64_t base) { return LiftId(LiftKind::pow, check_base(base)); }
    static LiftId omega() { return LiftId(LiftKind::Omega, 0); }
    static LiftId F() { return LiftId(LiftKind::F, 0); }
    static LiftId G() { return LiftId(LiftKind::G, 0); }
    static LiftId H() { return LiftId(LiftKind::H, 0); }

    LiftKind kind() const { return kind_; }
    std::uint64_t base() const { return base_; }

    std::string name() const
    {
        switch (kind_) {
        case LiftKind::log: return "log";
        case LiftKind::pow: return "pow";
        case LiftKind::Omega: return "Omega";
        case LiftKind::F: return "F";
        case LiftKind::G: return "G";
        case LiftKind::H: return "H";
        }
        return "?";
    }

    friend bool operator==(const LiftId &, const LiftId &) = default;

private:
    LiftId(LiftKind k, std::uint64_t b) : kind_(k), base_(b) {}

    static std::uint64_t check_base(std::uint64_t b)
    {
        if (b < 2)
            throw DomainError("log/pow base must be >= 2");
        return b;
    }

    LiftKind kind_;
    std::uint64_t base_;
};

enum class Kind { Nat, Var, Sum, Prod, Exp1, Exp2, Lift };

inline const char * kind_name(Kind k)
{
    switch (k) {
    case Kind::Nat: return "Nat";
    case Kind::Var: return "Var";
    case Kind::Sum: return "Sum";
    case Kind::Prod: return "Prod";
    case Kind::Exp1: return "Exp1";
    case Kind::Exp2: return "Exp2";
    case Kind::Lift: return "Lift";
    }
    return "?";
}

class UExpr {
    struct Node;

public:
    static UExpr nat(BigNat v)
    {
        if (v < 1)
            throw DomainError("naturals start at 1; 0 is not an atom");
        auto n = std::make_shared<Node>(Kind::Nat);
        n->value = std::move(v);
        return UExpr(std::move(n));
    }

    static UExpr var(std::string name, AttrSet attrs = {})
    {
        auto n = std::make_shared<Node>(Kind::Var);
        n->name = std::move(name);
        n->attrs = attrs;
        return UExpr(std::move(n));
    }

    static UExpr sum(UExpr l, UExpr r) { return binary(Kind::Sum, std::move(l), std::move(r)); }
    static UExpr prod(UExpr l, UExpr r) { return binary(Kind::Prod, std::move(l), std::move(r)); }
    /// E1(base, exp): base read from the first argument, exponent from the second.
    static UExpr exp1(UExpr base, UExpr exp) { return binary(Kind::Exp1, std::move(base), std::move(exp)); }
    /// E2(first, second): exponent read from the first argument, base from the second.
    static UExpr exp2(UExpr first, UExpr second) { return binary(Kind::Exp2, std::move(first), std::move(second)); }

    static UExpr lift(LiftId fn, UExpr arg)
    {
        auto n = std::make_shared<Node>(Kind::Lift);
        n->lift = fn;
        n->children[0] = std::move(arg);
        return UExpr(std::move(n));
    }

    /// Rebuilds this node with new children (same kind, payload).
    UExpr with_children(UExpr a, UExpr b = {}) const
    {
        auto n = std::make_shared<Node>(*node_);
        n->children[0] = std::move(a);
        n->children[1] = std::move(b);
        return UExpr(std::move(n));
    }

    UExpr() = default;

    bool valid() const { return node_ != nullptr; }
    Kind kind() const { return node_->kind; }
    bool is(Kind k) const { return node_->kind == k; }
    bool is_nat() const { return is(Kind::Nat); }
    bool is_nat(const BigNat & v) const { return is(Kind::Nat) && node_->value == v; }
    bool is_var() const { return is(Kind::Var); }

    const BigNat & value() const { return node_->value; }
    const std::string & name() const { return node_->name; }
    AttrSet attrs() const { return node_->attrs; }
    const LiftId & lift_id() const { return node_->lift; }

    std::size_t arity() const
    {
        switch (kind()) {
        case Kind::Nat:
        case Kind::Var: return 0;
        case Kind::Lift: return 1;
        default: return 2;
        }
    }

    const UExpr & child(std::size_t i) const { return node_->children[i]; }
    const UExpr & lhs() const { return node_->children[0]; }
    const UExpr & rhs() const { return node_->children[1]; }
    const UExpr & arg() const { return node_->children[0]; }

    std::size_t size() const
    {
        std::size_t s = 1;
        for (std::size_t i = 0; i < arity(); ++i)
            s += child(i).size();
        return s;
    }

    bool has_vars() const
    {
        if (is_var())
            return true;
        for (std::size_t i = 0; i < arity(); ++i)
            if (child(i).has_vars())
                return true;
        return false;
    }

    /// Structural equality: same shape, same payloads, same attributes.
    friend bool operator==(const UExpr & a, const UExpr & b)
    {
        if (a.node_ == b.node_)
            return true;
        if (! a.node_ || ! b.node_ || a.kind() != b.kind())
            return false;
        switch (a.kind()) {
        case Kind::Nat: return a.value() == b.value();
        case Kind::Var: return a.name() == b.name() && a.attrs() == b.attrs();
        case Kind::Lift: return a.lift_id() == b.lift_id() && a.arg() == b.arg();
        default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
        }
    }

private:
    struct Node {
        explicit Node(Kind k) : kind(k), children(2) {}
        Kind kind;
        BigNat value;
        std::string name;
        AttrSet attrs;
        LiftId lift = LiftId::omega();
        std::vector<UExpr> children;
    };

    explicit UExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static UExpr binary(Kind k, UExpr l, UExpr r)
    {
        auto n = std::make_shared<Node>(k);
        n->children[0] = std::move(l);
        n->children[1] = std::move(r);
        return UExpr(std::move(n));
    }

    std::shared_ptr<const Node> node_;
};

/// Position of a subterm: child indices from the root.
using Path = std::vector<unsigned>;

inline const UExpr & subterm_at(const UExpr & e, const Path & path)
{
    const UExpr * cur = &e;
    for (unsigned i : path) {
        if (i >= cur->arity())
            throw Error("path does not address a subterm");
        cur = &cur->child(i);
    }
    return *cur;
}

inline UExpr replace_at(const UExpr & e, const Path & path, const UExpr & replacement, std::size_t depth = 0)
{
    if (depth == path.size())
        return replacement;
    unsigned i = path[depth];
    if (i >= e.arity())
        throw Error("path does not address a subterm");
    if (e.arity() == 1)
        return e.with_children(replace_at(e.arg(), path, replacement, depth + 1));
    if (i == 0)
        return e.with_children(replace_at(e.lhs(), path, replacement, depth + 1), e.rhs());
    return e.with_children(e.lhs(), replace_at(e.rhs(), path, replacement, depth + 1));
}

/// Every variable name with the attributes it carries (unioned over occurrences).
inline void collect_vars(const UExpr & e, std::map<std::string, AttrSet> & out)
{
    if (e.is_var()) {
        out[e.name()] = out[e.name()] | e.attrs();
        return;
    }
    for (std::size_t i = 0; i < e.arity(); ++i)
        collect_vars(e.child(i), out);
}

/// Gives every occurrence of a variable the union of the attributes declared
/// on any occurrence in `env`.
inline UExpr with_unified_attrs(const UExpr & e, const std::map<std::string, AttrSet> & env)
{
    if (e.is_var()) {
        auto it = env.find(e.name());
        if (it == env.end() || it->second == e.attrs())
            return e;
        return UExpr::var(e.name(), it->second);
    }
    if (e.arity() == 0)
        return e;
    if (e.arity() == 1)
        return e.with_children(with_unified_attrs(e.arg(), env));
    return e.with_children(with_unified_attrs(e.lhs(), env), with_unified_attrs(e.rhs(), env));
}

/// Substitutes naturals for variables; unbound variables are left alone.
inline UExpr instantiate(const UExpr & e, const std::map<std::string, BigNat> & binding)
{
    if (e.is_var()) {
        auto it = binding.find(e.name());
        return it == binding.end() ? e : UExpr::nat(it->second);
    }
    if (e.arity() == 0)
        return e;
    if (e.arity() == 1)
        return e.with_children(instantiate(e.arg(), binding));
    return e.with_children(instantiate(e.lhs(), binding), instantiate(e.rhs(), binding));
}

namespace detail {
    // Precedence levels: 1 sum, 2 product, 3 power, 4 atom.
    inline int precedence(const UExpr & e)
    {
        switch (e.kind()) {
        case Kind::Sum: return 1;
        case Kind::Prod: return 2;
        case Kind::Exp1: return 3;
        default: return 4;
        }
    }

    inline void print(const UExpr & e, int min_prec, std::set<std::string> & declared, std::string & out)
    {
        bool parens = precedence(e) < min_prec;
        if (parens)
            out += '(';
        switch (e.kind()) {
        case Kind::Nat: out += e.value().str(); break;
        case Kind::Var:
            out += e.name();
            if (! e.attrs().empty() && declared.insert(e.name()).second) {
                out += ":{";
                bool first = true;
                for (auto n : e.attrs().flag_names()) {
                    if (! first)
                        out += ',';
                    out += n;
                    first = false;
                }
                out += '}';
            }
            break;
        case Kind::Sum:
            print(e.lhs(), 1, declared, out);
            out += " + ";
            print(e.rhs(), 2, declared, out);
            break;
        case Kind::Prod:
            print(e.lhs(), 2, declared, out);
            out += " * ";
            print(e.rhs(), 3, declared, out);
            break;
        case Kind::Exp1:
            print(e.lhs(), 4, declared, out);
            out += " ^ ";
            print(e.rhs(), 3, declared, out);
            break;
        case Kind::Exp2:
            out += "E2(";
            print(e.lhs(), 0, declared, out);
            out += ", ";
            print(e.rhs(), 0, declared, out);
            out += ')';
            break;
        case Kind::Lift:
            out += e.lift_id().name();
            out += '(';
            if (e.lift_id().kind() == LiftKind::log || e.lift_id().kind() == LiftKind::pow)
                out += std::to_string(e.lift_id().base()) + ", ";
            print(e.arg(), 0, declared, out);
            out += ')';
            break;
        }
        if (parens)
            out += ')';
    }

    inline void print_tree(const UExpr & e, std::string & out)
    {
        out += kind_name(e.kind());
        switch (e.kind()) {
        case Kind::Nat: out += ' ' + e.value().str(); return;
        case Kind::Var:
            out += ' ' + e.name();
            if (! e.attrs().empty()) {
                out += '{';
                bool first = true;
                for (auto n : e.attrs().flag_names()) {
                    if (! first)
                        out += ',';
                    out += n;
                    first = false;
                }
                out += '}';
            }
            return;
        case Kind::Lift:
            out += '(' + e.lift_id().name();
            if (e.lift_id().kind() == LiftKind::log || e.lift_id().kind() == LiftKind::pow)
                out += '_' + std::to_string(e.lift_id().base());
            out += ", ";
            print_tree(e.arg(), out);
            out += ')';
            return;
        default:
            out += '(';
            print_tree(e.lhs(), out);
            out += ", ";
            print_tree(e.rhs(), out);
            out += ')';
        }
    }
} // namespace detail

/// Concrete syntax accepted by parse_expr. A variable's attributes are printed
/// on its first occurrence only; the parser spreads them to the rest.
inline std::string to_string(const UExpr & e)
{
    std::string out;
    std::set<std::string> declared;
    detail::print(e, 0, declared, out);
    return out;
}

/// Constructor form, e.g. `Exp1(Nat 2, Var p{nonprincipal})`.
inline std::string to_tree_string(const UExpr & e)
{
    std::string out;
    detail::print_tree(e, out);
    return out;
}

} // namespace uexp
