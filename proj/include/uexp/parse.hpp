#pragma once

// Recursive-descent parser for the expression syntax:
//
//   expr   := sum ;  sum := prod { "+" prod } ;  prod := pow { "*" pow } ;
//   pow    := unary [ "^" pow ] ;
//   unary  := nat | var | call | "(" expr ")" ;
//   call   := ("E1"|"E2"|"log"|"pow"|"Omega"|"F"|"G"|"H") "(" args ")" ;
//   var    := ident [ ":" "{" attr { "," attr } "}" ] ;
//
// A call keyword not followed by "(" is an ordinary variable name.

#include <uexp/expr.hpp>

#include <cctype>
#include <limits>
#include <map>
#include <string>
#include <string_view>

namespace uexp {

namespace detail {

    class ExprParser {
    public:
        explicit ExprParser(std::string_view text) : text_(text) {}

        UExpr parse_sum()
        {
            UExpr e = parse_prod();
            while (accept('+'))
                e = UExpr::sum(std::move(e), parse_prod());
            return e;
        }

        void expect_end()
        {
            skip_ws();
            if (pos_ != text_.size())
                fail("unexpected trailing input", {"+", "*", "^", "end of input"});
        }

        bool accept_str(std::string_view s)
        {
            skip_ws();
            if (text_.substr(pos_, s.size()) == s) {
                pos_ += s.size();
                return true;
            }
            return false;
        }

        std::size_t offset() const { return pos_; }

        const std::map<std::string, AttrSet> & declared() const { return declared_; }

        [[noreturn]] void fail(const std::string & what, std::vector<std::string> expected)
        {
            throw ParseError(what, pos_, std::move(expected));
        }

    private:
        UExpr parse_prod()
        {
            UExpr e = parse_pow();
            while (accept('*'))
                e = UExpr::prod(std::move(e), parse_pow());
            return e;
        }

        UExpr parse_pow()
        {
            UExpr base = parse_unary();
            if (accept('^'))
                return UExpr::exp1(std::move(base), parse_pow());
            return base;
        }

        UExpr parse_unary()
        {
            skip_ws();
            if (pos_ >= text_.size())
                fail("unexpected end of input", {"natural", "identifier", "("});
            char c = text_[pos_];
            if (c == '(') {
                ++pos_;
                UExpr e = parse_sum();
                expect(')');
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)))
                return parse_nat();
            if (is_ident_start(c))
                return parse_ident();
            fail(std::string("unexpected character '") + c + "'", {"natural", "identifier", "("});
        }

        UExpr parse_nat()
        {
            std::size_t start = pos_;
            BigNat v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                v = v * 10 + (text_[pos_++] - '0');
            if (v == 0) {
                pos_ = start;
                fail("natural literal 0 (naturals start at 1)", {"natural >= 1"});
            }
            return UExpr::nat(std::move(v));
        }

        std::uint64_t parse_base()
        {
            skip_ws();
            std::size_t start = pos_;
            if (pos_ >= text_.size() || ! std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail("expected a numeric base", {"natural >= 2"});
            BigNat v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                v = v * 10 + (text_[pos_++] - '0');
            if (v < 2 || v > BigNat(std::numeric_limits<std::uint64_t>::max())) {
                pos_ = start;
                fail("log/pow base must be a natural in [2, 2^64)", {"natural >= 2"});
            }
            return v.convert_to<std::uint64_t>();
        }

        UExpr parse_ident()
        {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_]))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));

            if (is_call_name(name) && peek_is('(')) {
                expect('(');
                UExpr e = parse_call(name);
                expect(')');
                return e;
            }

            AttrSet attrs;
            if (accept(':')) {
                expect('{');
                do {
                    skip_ws();
                    std::size_t at = pos_;
                    while (pos_ < text_.size() && is_ident_char(text_[pos_]))
                        ++pos_;
                    auto attr = text_.substr(at, pos_ - at);
                    auto flag = AttrSet::flag_named(attr);
                    if (! flag) {
                        pos_ = at;
                        std::vector<std::string> known;
                        for (auto & n : AttrSet::names)
                            known.emplace_back(n.name);
                        fail("unknown attribute '" + std::string(attr) + "'", known);
                    }
                    attrs = attrs.with(*flag);
                } while (accept(','));
                expect('}');
            }
            declared_[name] = declared_[name] | attrs;
            return UExpr::var(std::move(name), attrs);
        }

        UExpr parse_call(const std::string & name)
        {
            if (name == "E1" || name == "E2") {
                UExpr a = parse_sum();
                expect(',');
                UExpr b = parse_sum();
                return name == "E1" ? UExpr::exp1(std::move(a), std::move(b)) : UExpr::exp2(std::move(a), std::move(b));
            }
            if (name == "log" || name == "pow") {
                auto base = parse_base();
                expect(',');
                UExpr arg = parse_sum();
                return UExpr::lift(name == "log" ? LiftId::log(base) : LiftId::pow(base), std::move(arg));
            }
            UExpr arg = parse_sum();
            LiftId id = name == "Omega" ? LiftId::omega() : name == "F" ? LiftId::F() : name == "G" ? LiftId::G() : LiftId::H();
            return UExpr::lift(id, std::move(arg));
        }

        static bool is_call_name(const std::string & n)
        {
            return n == "E1" || n == "E2" || n == "log" || n == "pow" || n == "Omega" || n == "F" || n == "G" || n == "H";
        }

        static bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
        static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

        void skip_ws()
        {
            while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }

        bool peek_is(char c)
        {
            skip_ws();
            return pos_ < text_.size() && text_[pos_] == c;
        }

        bool accept(char c)
        {
            if (peek_is(c)) {
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

        std::string_view text_;
        std::size_t pos_ = 0;
        std::map<std::string, AttrSet> declared_;
    };

} // namespace detail

/// Parses one expression. Attributes declared on any occurrence of a variable
/// apply to all of its occurrences.
inline UExpr parse_expr(std::string_view text)
{
    detail::ExprParser p(text);
    UExpr e = p.parse_sum();
    p.expect_end();
    return with_unified_attrs(e, p.declared());
}

/// Parses `lhs == rhs` as one document, so attributes are shared across sides.
inline std::pair<UExpr, UExpr> parse_equation(std::string_view text)
{
    detail::ExprParser p(text);
    UExpr l = p.parse_sum();
    if (! p.accept_str("=="))
        p.fail("expected '=='", {"==", "+", "*", "^"});
    UExpr r = p.parse_sum();
    p.expect_end();
    return {with_unified_attrs(l, p.declared()), with_unified_attrs(r, p.declared())};
}

} // namespace uexp
