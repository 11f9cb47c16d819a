#pragma once

// Configuration templates {t1, ..., tm} over integer variables, their DSL
//
//   config {x, y, x^y} where x>1, y>1, distinct(x, y), log2_le(x, y);
//
// and enumeration of their instances inside an interval [lo..hi].

#include <uexp/parse.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

namespace uexp::pr {

using Value = std::uint64_t;

/// Largest supported interval end; keeps sums of two in-range values exact.
inline constexpr Value max_hi = Value(1) << 62;

struct Constraint {
    enum class Kind {
        greater,    ///< var > bound
        greater_eq, ///< var >= bound
        distinct,   ///< pairwise distinct values
        log2_le,    ///< ceil(log2 vars[0]) <= vars[1]
    };
    Kind kind;
    std::vector<std::size_t> vars;
    Value bound = 0;
};

struct ConfigTemplate {
    std::vector<std::string> variables;
    std::vector<UExpr> terms;
    std::vector<Constraint> constraints;
};

namespace detail {

    inline void check_term(const UExpr & e, std::size_t offset)
    {
        switch (e.kind()) {
        case Kind::Nat:
            if (e.value() > BigNat(max_hi))
                throw ParseError("constant too large for a configuration term", offset);
            return;
        case Kind::Var:
            if (! e.attrs().empty())
                throw ParseError("configuration variables take no attributes", offset);
            return;
        case Kind::Sum:
        case Kind::Prod:
        case Kind::Exp1:
            check_term(e.lhs(), offset);
            check_term(e.rhs(), offset);
            return;
        default: throw ParseError("configuration terms use only naturals, variables, +, * and ^", offset, {"+", "*", "^"});
        }
    }

    inline void collect_order(const UExpr & e, std::vector<std::string> & order)
    {
        if (e.is_var()) {
            if (std::find(order.begin(), order.end(), e.name()) == order.end())
                order.push_back(e.name());
            return;
        }
        for (std::size_t i = 0; i < e.arity(); ++i)
            collect_order(e.child(i), order);
    }

    inline std::string strip_comments(std::string_view text)
    {
        std::string out;
        bool comment = false;
        for (char c : text) {
            if (c == '#')
                comment = true;
            if (c == '\n')
                comment = false;
            out += comment ? ' ' : c;
        }
        return out;
    }

    class ConfigParser {
    public:
        explicit ConfigParser(std::string text) : text_(std::move(text)) {}

        ConfigTemplate parse()
        {
            ConfigTemplate cfg;
            expect_word("config");
            expect('{');
            for (;;) {
                skip_ws();
                std::size_t start = pos_;
                std::size_t end = scan_term_end();
                std::string_view piece(text_.data() + start, end - start);
                UExpr t;
                try {
                    t = parse_expr(piece);
                }
                catch (const ParseError & e) {
                    std::string msg = e.what();
                    msg = msg.substr(msg.find(": ") + 2);
                    msg = msg.substr(0, msg.find(" (expected one of:"));
                    throw ParseError("in configuration term: " + msg, start + e.offset(), e.expected());
                }
                check_term(t, start);
                cfg.terms.push_back(std::move(t));
                pos_ = end;
                if (accept(','))
                    continue;
                expect('}');
                break;
            }
            for (auto & t : cfg.terms)
                collect_order(t, cfg.variables);

            if (accept_word("where")) {
                do
                    cfg.constraints.push_back(parse_constraint(cfg));
                while (accept(','));
            }
            expect(';');
            skip_ws();
            if (pos_ != text_.size())
                fail("unexpected input after ';'", {"end of input"});
            return cfg;
        }

    private:
        Constraint parse_constraint(const ConfigTemplate & cfg)
        {
            skip_ws();
            std::size_t at = pos_;
            std::string name = ident();
            if (name == "distinct" || name == "log2_le") {
                expect('(');
                std::vector<std::size_t> vars;
                do {
                    skip_ws();
                    std::size_t v_at = pos_;
                    vars.push_back(var_index(cfg, ident(), v_at));
                } while (accept(','));
                expect(')');
                if (name == "distinct" && vars.size() < 2)
                    fail("distinct needs at least two variables", {","});
                if (name == "log2_le") {
                    if (vars.size() != 2)
                        fail("log2_le takes exactly two variables", {")"});
                    return {Constraint::Kind::log2_le, vars, 0};
                }
                return {Constraint::Kind::distinct, vars, 0};
            }
            auto v = var_index(cfg, name, at);
            Constraint::Kind k;
            if (accept_str(">="))
                k = Constraint::Kind::greater_eq;
            else if (accept_str(">"))
                k = Constraint::Kind::greater;
            else
                fail("expected a comparison", {">", ">="});
            skip_ws();
            std::size_t start = pos_;
            Value bound = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                bound = bound * 10 + Value(text_[pos_++] - '0');
                if (bound > max_hi)
                    fail("bound too large", {});
            }
            if (pos_ == start)
                fail("expected a numeric bound", {"natural"});
            return {k, {v}, bound};
        }

        std::size_t var_index(const ConfigTemplate & cfg, const std::string & name, std::size_t at)
        {
            auto it = std::find(cfg.variables.begin(), cfg.variables.end(), name);
            if (it == cfg.variables.end()) {
                pos_ = at;
                fail("constraint mentions undeclared variable '" + name + "'", cfg.variables);
            }
            return std::size_t(it - cfg.variables.begin());
        }

        // End of the current term: the next ',' or '}' at paren depth 0.
        std::size_t scan_term_end()
        {
            int depth = 0;
            for (std::size_t i = pos_; i < text_.size(); ++i) {
                char c = text_[i];
                if (c == '(' || c == '{')
                    ++depth;
                else if (c == ')' && depth > 0)
                    --depth;
                else if (c == '}' && depth > 0)
                    --depth;
                else if ((c == ',' || c == '}') && depth == 0)
                    return i;
            }
            pos_ = text_.size();
            fail("unterminated term list", {",", "}"});
        }

        std::string ident()
        {
            skip_ws();
            std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            if (start == pos_)
                fail("expected an identifier", {"identifier"});
            return text_.substr(start, pos_ - start);
        }

        void expect_word(std::string_view w)
        {
            if (! accept_word(w))
                fail("expected '" + std::string(w) + "'", {std::string(w)});
        }

        bool accept_word(std::string_view w)
        {
            skip_ws();
            if (text_.compare(pos_, w.size(), w) != 0)
                return false;
            std::size_t after = pos_ + w.size();
            if (after < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[after])) || text_[after] == '_'))
                return false;
            pos_ = after;
            return true;
        }

        bool accept_str(std::string_view s)
        {
            skip_ws();
            if (text_.compare(pos_, s.size(), s) != 0)
                return false;
            pos_ += s.size();
            return true;
        }

        bool accept(char c)
        {
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == c) {
                ++pos_;
                return true;
            }
            return false;
        }

        void expect(char c)
        {
            if (! accept(c))
                fail(pos_ >= text_.size() ? "unexpected end of input" : "unexpected token", {std::string(1, c)});
        }

        void skip_ws()
        {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }

        [[noreturn]] void fail(const std::string & what, std::vector<std::string> expected)
        {
            throw ParseError(what, pos_, std::move(expected));
        }

        std::string text_;
        std::size_t pos_ = 0;
    };

} // namespace detail

/// Parses the configuration DSL; `#` starts a comment running to end of line.
/// Variables are ordered by first appearance in the term list.
inline ConfigTemplate parse_config(std::string_view text)
{
    return detail::ConfigParser(detail::strip_comments(text)).parse();
}

inline std::string to_string(const ConfigTemplate & cfg)
{
    std::string out = "config {";
    for (std::size_t i = 0; i < cfg.terms.size(); ++i) {
        if (i)
            out += ", ";
        out += uexp::to_string(cfg.terms[i]);
    }
    out += '}';
    for (std::size_t i = 0; i < cfg.constraints.size(); ++i) {
        auto & c = cfg.constraints[i];
        out += i ? ", " : " where ";
        switch (c.kind) {
        case Constraint::Kind::greater: out += cfg.variables[c.vars[0]] + ">" + std::to_string(c.bound); break;
        case Constraint::Kind::greater_eq: out += cfg.variables[c.vars[0]] + ">=" + std::to_string(c.bound); break;
        case Constraint::Kind::distinct:
        case Constraint::Kind::log2_le: {
            out += c.kind == Constraint::Kind::distinct ? "distinct(" : "log2_le(";
            for (std::size_t j = 0; j < c.vars.size(); ++j)
                out += (j ? ", " : "") + cfg.variables[c.vars[j]];
            out += ')';
            break;
        }
        }
    }
    return out + ";";
}

/// An assignment of the template's variables and the resulting term values.
struct Instance {
    std::vector<std::pair<std::string, Value>> binding;
    std::vector<Value> term_values;

    friend bool operator==(const Instance &, const Instance &) = default;
};

namespace detail {

    inline constexpr Value over = std::numeric_limits<Value>::max();

    // Terms compiled to postfix for fast evaluation. Arithmetic saturates to
    // `over` as soon as a value passes the limit, which is exact here since
    // every term is monotone in each variable on the naturals.
    class CompiledTerm {
    public:
        CompiledTerm(const UExpr & e, const std::vector<std::string> & vars)
        {
            compile(e, vars);
            for (auto & op : code_)
                if (op.code == Op::var)
                    max_var_ = std::max<long>(max_var_, long(op.arg));
        }

        /// Highest variable index the term reads, or -1 for constants.
        long max_var() const { return max_var_; }

        bool uses(std::size_t v) const
        {
            return std::any_of(code_.begin(), code_.end(), [&](const Ins & i) { return i.code == Op::var && i.arg == v; });
        }

        Value eval(const Value * vals, Value limit) const
        {
            Value stack[64];
            std::size_t sp = 0;
            for (auto & op : code_) {
                switch (op.code) {
                case Op::konst: stack[sp++] = op.arg > limit ? over : op.arg; break;
                case Op::var: stack[sp++] = vals[op.arg] > limit ? over : vals[op.arg]; break;
                case Op::add: {
                    Value b = stack[--sp], a = stack[sp - 1];
                    stack[sp - 1] = (a == over || b == over || a + b > limit) ? over : a + b;
                    break;
                }
                case Op::mul: {
                    Value b = stack[--sp], a = stack[sp - 1];
                    stack[sp - 1] = mul(a, b, limit);
                    break;
                }
                case Op::pow: {
                    Value b = stack[--sp], a = stack[sp - 1];
                    stack[sp - 1] = power(a, b, limit);
                    break;
                }
                }
            }
            return stack[0];
        }

    private:
        enum class Op : std::uint8_t { konst, var, add, mul, pow };
        struct Ins {
            Op code;
            Value arg;
        };

        static Value mul(Value a, Value b, Value limit)
        {
            if (a == over || b == over)
                return over;
            unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
            return r > limit ? over : Value(r);
        }

        static Value power(Value base, Value exp, Value limit)
        {
            if (base == 1)
                return 1;
            if (base == over)
                return over;
            if (exp == over)
                return over;
            Value r = 1;
            for (Value i = 0; i < exp; ++i) {
                r = mul(r, base, limit);
                if (r == over)
                    return over;
            }
            return r;
        }

        void compile(const UExpr & e, const std::vector<std::string> & vars)
        {
            switch (e.kind()) {
            case Kind::Nat: code_.push_back({Op::konst, e.value().convert_to<Value>()}); return;
            case Kind::Var: {
                auto it = std::find(vars.begin(), vars.end(), e.name());
                code_.push_back({Op::var, Value(it - vars.begin())});
                return;
            }
            default:
                compile(e.lhs(), vars);
                compile(e.rhs(), vars);
                code_.push_back({e.is(Kind::Sum) ? Op::add : e.is(Kind::Prod) ? Op::mul : Op::pow, 0});
                if (code_.size() > 60)
                    throw Error("configuration term too deep");
            }
        }

        std::vector<Ins> code_;
        long max_var_ = -1;
    };

    inline unsigned ceil_log2(Value x)
    {
        unsigned r = 0;
        while ((Value(1) << r) < x)
            ++r;
        return r;
    }

    inline bool constraint_holds(const Constraint & c, const Value * vals)
    {
        switch (c.kind) {
        case Constraint::Kind::greater: return vals[c.vars[0]] > c.bound;
        case Constraint::Kind::greater_eq: return vals[c.vars[0]] >= c.bound;
        case Constraint::Kind::distinct:
            for (std::size_t i = 0; i < c.vars.size(); ++i)
                for (std::size_t j = i + 1; j < c.vars.size(); ++j)
                    if (vals[c.vars[i]] == vals[c.vars[j]])
                        return false;
            return true;
        case Constraint::Kind::log2_le: return ceil_log2(vals[c.vars[0]]) <= vals[c.vars[1]];
        }
        return false;
    }

    /// Depth-first instance enumerator over a subset of the template's terms
    /// and variables (a connected component, or everything). Variables are
    /// assigned in increasing order, so instances come out lexicographically.
    class Enumerator {
    public:
        Enumerator(const ConfigTemplate & cfg, std::vector<std::size_t> term_ids, std::vector<std::size_t> var_ids, Value lo, Value hi)
            : cfg_(cfg), term_ids_(std::move(term_ids)), vars_(std::move(var_ids)), lo_(lo), hi_(hi)
        {
            if (hi > max_hi)
                throw DomainError("interval end exceeds 2^62");
            for (auto t : term_ids_)
                compiled_.emplace_back(cfg.terms[t], cfg.variables);
            vals_.assign(cfg.variables.size(), 0);
            // Variables range over [lo..hi] like the terms.
            min_.assign(cfg.variables.size(), lo);
            for (auto & c : cfg.constraints) {
                if (c.kind == Constraint::Kind::greater)
                    min_[c.vars[0]] = std::max(min_[c.vars[0]], c.bound + 1);
                if (c.kind == Constraint::Kind::greater_eq)
                    min_[c.vars[0]] = std::max(min_[c.vars[0]], c.bound);
            }
            // Term k is fully known once the deepest of its variables is set.
            depth_of_var_.assign(cfg.variables.size(), -1);
            for (std::size_t d = 0; d < vars_.size(); ++d)
                depth_of_var_[vars_[d]] = long(d);
            completes_at_.resize(vars_.size() + 1);
            for (std::size_t t = 0; t < compiled_.size(); ++t) {
                long deepest = -1;
                for (auto v : vars_)
                    if (compiled_[t].uses(v))
                        deepest = std::max(deepest, depth_of_var_[v]);
                completes_at_[std::size_t(deepest + 1)].push_back(t);
            }
            for (std::size_t ci = 0; ci < cfg.constraints.size(); ++ci) {
                long deepest = -1;
                bool relevant = false;
                for (auto v : cfg.constraints[ci].vars) {
                    if (depth_of_var_[v] >= 0) {
                        relevant = true;
                        deepest = std::max(deepest, depth_of_var_[v]);
                    }
                }
                if (relevant && cfg.constraints[ci].kind != Constraint::Kind::greater && cfg.constraints[ci].kind != Constraint::Kind::greater_eq)
                    constraint_at_.emplace_back(std::size_t(deepest), ci);
            }
        }

        /// Restricts enumeration to instances whose every term value has
        /// colour `colour` under `colours` (indexed by value - lo).
        void require_colour(const unsigned * colours, unsigned colour)
        {
            colours_ = colours;
            colour_ = colour;
        }

        std::uint64_t skipped() const { return skipped_; }

        /// Calls `visit(values, term_values)` per instance until it returns false.
        void run(const std::function<bool(const Value *, const Value *)> & visit)
        {
            for (auto v : vars_)
                vals_[v] = min_[v];
            term_vals_.assign(compiled_.size(), 0);
            stop_ = false;
            if (! check_completed(0))
                return;
            descend(0, visit);
        }

        /// Largest value of vars_[d] for which no term exceeds hi with the
        /// other variables at their minimum (monotone, so binary search).
        Value upper_bound(std::size_t d)
        {
            for (auto v : vars_)
                vals_[v] = min_[v];
            auto v = vars_[d];
            auto fits = [&](Value t) {
                vals_[v] = t;
                for (auto & c : compiled_)
                    if (c.eval(vals_.data(), hi_) == over)
                        return false;
                return true;
            };
            Value low = min_[v], high = hi_;
            if (low > high || ! fits(low))
                return low - 1;
            while (low < high) {
                Value mid = low + (high - low + 1) / 2;
                if (fits(mid))
                    low = mid;
                else
                    high = mid - 1;
            }
            vals_[v] = min_[v];
            return low;
        }

        Value minimum(std::size_t d) const { return min_[vars_[d]]; }

    private:
        // Checks terms that become fully known at `depth` (i.e. whose
        // deepest variable is vars_[depth - 1]).
        bool check_completed(std::size_t depth)
        {
            for (auto t : completes_at_[depth]) {
                Value x = compiled_[t].eval(vals_.data(), hi_);
                if (x == over || x < lo_)
                    return false;
                if (colours_ && colours_[x - lo_] != colour_)
                    return false;
                term_vals_[t] = x;
            }
            return true;
        }

        bool lower_bounds_fit()
        {
            // Later variables sit at their minimum, so each term is at its
            // smallest possible value for this prefix.
            for (auto & c : compiled_)
                if (c.eval(vals_.data(), hi_) == over)
                    return false;
            return true;
        }

        bool constraints_hold(std::size_t d)
        {
            for (auto & [depth, ci] : constraint_at_)
                if (depth == d && ! constraint_holds(cfg_.constraints[ci], vals_.data()))
                    return false;
            return true;
        }

        void descend(std::size_t d, const std::function<bool(const Value *, const Value *)> & visit)
        {
            if (d == vars_.size()) {
                if (! visit(vals_.data(), term_vals_.data()))
                    stop_ = true;
                return;
            }
            auto v = vars_[d];
            for (Value x = min_[v]; x <= hi_ && ! stop_; ++x) {
                vals_[v] = x;
                if (! lower_bounds_fit()) {
                    ++skipped_;
                    break;
                }
                if (! constraints_hold(d))
                    continue;
                if (! check_completed(d + 1))
                    continue;
                descend(d + 1, visit);
            }
            vals_[v] = min_[v];
        }

        const ConfigTemplate & cfg_;
        std::vector<std::size_t> term_ids_;
        std::vector<std::size_t> vars_;
        Value lo_, hi_;
        std::vector<CompiledTerm> compiled_;
        std::vector<Value> vals_;
        std::vector<Value> min_;
        std::vector<long> depth_of_var_;
        std::vector<std::vector<std::size_t>> completes_at_;
        std::vector<std::pair<std::size_t, std::size_t>> constraint_at_;
        std::vector<Value> term_vals_;
        const unsigned * colours_ = nullptr;
        unsigned colour_ = 0;
        std::uint64_t skipped_ = 0;
        bool stop_ = false;
    };

    inline std::vector<std::size_t> iota(std::size_t n)
    {
        std::vector<std::size_t> v(n);
        std::iota(v.begin(), v.end(), std::size_t(0));
        return v;
    }

    inline Instance make_instance(const ConfigTemplate & cfg, const Value * vals, const Value * terms)
    {
        Instance inst;
        for (std::size_t i = 0; i < cfg.variables.size(); ++i)
            inst.binding.emplace_back(cfg.variables[i], vals[i]);
        inst.term_values.assign(terms, terms + cfg.terms.size());
        return inst;
    }

} // namespace detail

struct Enumeration {
    std::vector<Instance> instances;
    /// Bindings abandoned because a term left the interval from above.
    std::uint64_t skipped = 0;
};

/// Every binding satisfying the constraints with all term values in
/// [lo..hi], in lexicographic order of the variable values. Duplicate
/// term-value multisets are kept.
inline Enumeration enumerate_instances(const ConfigTemplate & cfg, Value lo, Value hi)
{
    if (lo < 1 || hi < lo)
        throw DomainError("need 1 <= lo <= hi");
    detail::Enumerator en(cfg, detail::iota(cfg.terms.size()), detail::iota(cfg.variables.size()), lo, hi);
    Enumeration out;
    en.run([&](const Value * vals, const Value * terms) {
        out.instances.push_back(detail::make_instance(cfg, vals, terms));
        return true;
    });
    out.skipped = en.skipped();
    return out;
}

/// Streams instances without materializing them.
inline void for_each_instance(const ConfigTemplate & cfg, Value lo, Value hi, const std::function<bool(const Value * vals, const Value * terms)> & visit)
{
    if (lo < 1 || hi < lo)
        throw DomainError("need 1 <= lo <= hi");
    detail::Enumerator en(cfg, detail::iota(cfg.terms.size()), detail::iota(cfg.variables.size()), lo, hi);
    en.run(visit);
}

} // namespace uexp::pr
