#include <uexp/eval.hpp>
#include <uexp/parse.hpp>

#include <support/random_expr.hpp>

#include <gtest/gtest.h>

using namespace uexp;

namespace {

const AttrSet np {AttrSet::nonprincipal};

UExpr nat(unsigned v) { return UExpr::nat(v); }
UExpr var(const char * n, AttrSet a = {}) { return UExpr::var(n, a); }

} // namespace

TEST(Parse, PowerOfVariable)
{
    EXPECT_EQ(parse_expr("2 ^ p"), UExpr::exp1(nat(2), var("p")));
    EXPECT_EQ(to_tree_string(parse_expr("2 ^ p")), "Exp1(Nat 2, Var p)");
}

TEST(Parse, SecondExponentiationCall)
{
    EXPECT_EQ(parse_expr("E2(p, 3)"), UExpr::exp2(var("p"), nat(3)));
}

TEST(Parse, PowerIsRightAssociative)
{
    auto e = parse_expr("2 ^ 3 ^ 2");
    EXPECT_EQ(e, UExpr::exp1(nat(2), UExpr::exp1(nat(3), nat(2))));
    // 2^9, not 8^2
    BigNat right = 1;
    for (int i = 0; i < 9; ++i)
        right *= 2;
    EXPECT_EQ(eval_principal(e), right);
    EXPECT_NE(eval_principal(e), BigNat(64));
}

TEST(Parse, SumAndProductAreLeftAssociative)
{
    EXPECT_EQ(parse_expr("a + b + c"), UExpr::sum(UExpr::sum(var("a"), var("b")), var("c")));
    EXPECT_EQ(parse_expr("a * b * c"), UExpr::prod(UExpr::prod(var("a"), var("b")), var("c")));
    EXPECT_EQ(parse_expr("a + b * c ^ d"), UExpr::sum(var("a"), UExpr::prod(var("b"), UExpr::exp1(var("c"), var("d")))));
}

TEST(Parse, OperandOrderIsKept)
{
    EXPECT_EQ(parse_expr("p + 2"), UExpr::sum(var("p"), nat(2)));
    EXPECT_FALSE(parse_expr("p + q") == parse_expr("q + p"));
}

TEST(Parse, Calls)
{
    EXPECT_EQ(parse_expr("E1(p, q)"), UExpr::exp1(var("p"), var("q")));
    EXPECT_EQ(parse_expr("log(2, 8)"), UExpr::lift(LiftId::log(2), nat(8)));
    EXPECT_EQ(parse_expr("pow(3, p)"), UExpr::lift(LiftId::pow(3), var("p")));
    EXPECT_EQ(parse_expr("Omega(12)"), UExpr::lift(LiftId::omega(), nat(12)));
    EXPECT_EQ(parse_expr("F(x) * G(x) + H(x)"),
        UExpr::sum(UExpr::prod(UExpr::lift(LiftId::F(), var("x")), UExpr::lift(LiftId::G(), var("x"))), UExpr::lift(LiftId::H(), var("x"))));
}

TEST(Parse, CallNamesWithoutParensAreVariables)
{
    EXPECT_EQ(parse_expr("F + log"), UExpr::sum(var("F"), var("log")));
}

TEST(Parse, AttributesAreSharedByName)
{
    auto e = parse_expr("p:{nonprincipal,mul_idem} * p");
    AttrSet a = AttrSet(AttrSet::mul_idempotent);
    EXPECT_EQ(e, UExpr::prod(var("p", a), var("p", a)));
    EXPECT_TRUE(e.rhs().attrs().has(AttrSet::nonprincipal));
}

TEST(Parse, EquationSharesAttributesAcrossSides)
{
    auto [l, r] = parse_equation("E1(p, q:{nonprincipal}) == q");
    EXPECT_EQ(r, var("q", np));
    EXPECT_EQ(l.rhs(), var("q", np));
}

TEST(Parse, ErrorsCarryOffsetAndExpectations)
{
    try {
        parse_expr("2 + ");
        FAIL();
    }
    catch (const ParseError & e) {
        EXPECT_EQ(e.offset(), 4u);
        EXPECT_FALSE(e.expected().empty());
    }
    try {
        parse_expr("(2 + 3");
        FAIL();
    }
    catch (const ParseError & e) {
        EXPECT_EQ(e.offset(), 6u);
        ASSERT_EQ(e.expected().size(), 1u);
        EXPECT_EQ(e.expected()[0], ")");
    }
    EXPECT_THROW(parse_expr("2 3"), ParseError);
    EXPECT_THROW(parse_expr("p:{bogus}"), ParseError);
    EXPECT_THROW(parse_expr("log(1, 8)"), ParseError);
    EXPECT_THROW(parse_expr("E2(p)"), ParseError);
}

TEST(Parse, ZeroIsRejected)
{
    try {
        parse_expr("p + 0");
        FAIL();
    }
    catch (const ParseError & e) {
        EXPECT_EQ(e.offset(), 4u);
    }
    EXPECT_THROW(UExpr::nat(0), DomainError);
}

TEST(Parse, UnknownAttributeListsKnownNames)
{
    try {
        parse_expr("p:{idem}");
        FAIL();
    }
    catch (const ParseError & e) {
        EXPECT_EQ(e.offset(), 3u);
        EXPECT_NE(std::find(e.expected().begin(), e.expected().end(), "add_idem"), e.expected().end());
    }
}

TEST(Print, RoundTripsRandomTrees)
{
    fuzz::ExprGen gen(11, {.max_depth = 6, .max_atoms = 9, .max_leaf = 40, .lifts = true, .vars = {"p", "q", "r"}});
    for (int i = 0; i < 3000; ++i) {
        UExpr e = gen.any();
        std::string text = to_string(e);
        UExpr back = parse_expr(text);
        ASSERT_EQ(back, e) << text;
        ASSERT_EQ(to_string(back), text);
    }
}

TEST(Print, AttributesOnFirstOccurrenceOnly)
{
    auto e = parse_expr("p:{add_idem} + p");
    EXPECT_EQ(to_string(e), "p:{nonprincipal,add_idem} + p");
    EXPECT_EQ(parse_expr(to_string(e)), e);
}

TEST(Print, Parenthesization)
{
    EXPECT_EQ(to_string(parse_expr("(2 ^ 3) ^ 2")), "(2 ^ 3) ^ 2");
    EXPECT_EQ(to_string(parse_expr("a + (b + c)")), "a + (b + c)");
    EXPECT_EQ(to_string(parse_expr("a * (b + c)")), "a * (b + c)");
    EXPECT_EQ(to_string(parse_expr("2 ^ (p * q)")), "2 ^ (p * q)");
}

TEST(AttrSet, ClosureImplications)
{
    EXPECT_TRUE(AttrSet(AttrSet::add_idempotent).has(AttrSet::nonprincipal));
    EXPECT_TRUE(AttrSet(AttrSet::mul_idempotent).has(AttrSet::nonprincipal));
    AttrSet k(AttrSet::min_ideal_closure);
    EXPECT_TRUE(k.has(AttrSet::vdw_witness));
    EXPECT_TRUE(k.has(AttrSet::nonprincipal));
    EXPECT_FALSE(AttrSet(AttrSet::esw_member).has(AttrSet::nonprincipal));
}

TEST(Eval, Examples)
{
    EXPECT_EQ(eval_principal(UExpr::exp1(nat(2), nat(3))), 8);
    EXPECT_EQ(eval_principal(UExpr::exp2(nat(2), nat(3))), 9);
    EXPECT_EQ(eval_principal(UExpr::lift(LiftId::log(2), nat(8))), 3);
    EXPECT_THROW(eval_principal(UExpr::lift(LiftId::log(2), nat(6))), DomainError);
    EXPECT_EQ(eval_principal(UExpr::lift(LiftId::pow(3), nat(4))), 81);
    EXPECT_EQ(eval_principal(parse_expr("Omega(12) + F(12) + G(12) + H(108)")), 3 + 3 + 1 + 27);
}

TEST(Eval, Errors)
{
    EXPECT_THROW(eval_principal(parse_expr("F(1)")), DomainError);
    EXPECT_THROW(eval_principal(parse_expr("Omega(1)")), DomainError);
    EXPECT_THROW(eval_principal(parse_expr("p + 1")), DomainError);
    EXPECT_EQ(eval_principal(parse_expr("2 ^ 64")), BigNat(1) << 64);
    EXPECT_THROW(eval_principal(parse_expr("2 ^ 65")), CapExceeded);
    EXPECT_THROW(eval_principal(parse_expr("2 ^ 64"), (BigNat(1) << 64) - 1), CapExceeded);
    EXPECT_THROW(eval_principal(parse_expr("2 ^ 2 ^ 2 ^ 2 ^ 2")), CapExceeded);
    EXPECT_THROW(eval_principal(parse_expr("10 * 10"), 99), CapExceeded);
}

TEST(Eval, OneTowersDoNotOverflow)
{
    EXPECT_EQ(eval_principal(parse_expr("1 ^ (2 ^ 60)")), 1);
}

TEST(Eval, BothExponentiationsAgreeOnNaturals)
{
    for (unsigned a = 1; a <= 16; ++a)
        for (unsigned b = 1; b <= 16; ++b)
            ASSERT_EQ(eval_principal(UExpr::exp1(nat(a), nat(b)), BigNat(1) << 64),
                eval_principal(UExpr::exp2(nat(b), nat(a)), BigNat(1) << 64)) << a << "," << b;
}

TEST(Eval, IntegerAssociativity)
{
    for (unsigned a = 1; a <= 10; ++a)
        for (unsigned b = 1; b <= 10; ++b)
            for (unsigned c = 1; c <= 10; ++c) {
                EXPECT_EQ(eval_principal(UExpr::sum(UExpr::sum(nat(a), nat(b)), nat(c))), eval_principal(UExpr::sum(nat(a), UExpr::sum(nat(b), nat(c)))));
                EXPECT_EQ(eval_principal(UExpr::prod(UExpr::prod(nat(a), nat(b)), nat(c))), eval_principal(UExpr::prod(nat(a), UExpr::prod(nat(b), nat(c)))));
            }
    // the constructors themselves never reassociate
    EXPECT_FALSE(parse_expr("(a + b) + c") == parse_expr("a + (b + c)"));
}

TEST(Attrs, Propagation)
{
    EXPECT_EQ(attrs_of(var("p", np)), np);
    EXPECT_EQ(attrs_of(UExpr::exp1(nat(2), var("p", np))), np);
    EXPECT_TRUE(attrs_of(nat(7)).empty());
    EXPECT_TRUE(attrs_of(nat(1)).empty());
    EXPECT_EQ(attrs_of(parse_expr("p:{nonprincipal} + 3")), np);
    EXPECT_EQ(attrs_of(parse_expr("E2(p:{nonprincipal}, 5)")), np);
    EXPECT_EQ(attrs_of(parse_expr("p:{nonprincipal} ^ q")), np);
}

TEST(Attrs, BaseThatMayBeOneBlocksPropagation)
{
    // 1^q = 1 whatever q is, so an unknown base hides the exponent.
    EXPECT_TRUE(attrs_of(parse_expr("r ^ q:{nonprincipal}")).empty());
    EXPECT_TRUE(attrs_of(parse_expr("1 ^ q:{nonprincipal}")).empty());
    EXPECT_EQ(attrs_of(parse_expr("r:{vdw} ^ q:{nonprincipal}")), np);
    EXPECT_TRUE(attrs_of(parse_expr("E2(q:{nonprincipal}, r)")).empty());
}

TEST(Attrs, CollapsingLiftsDropNonprincipality)
{
    EXPECT_TRUE(attrs_of(parse_expr("F(p:{nonprincipal})")).empty());
    EXPECT_TRUE(attrs_of(parse_expr("Omega(p:{nonprincipal})")).empty());
    EXPECT_EQ(attrs_of(parse_expr("pow(2, p:{nonprincipal})")), np);
    EXPECT_EQ(attrs_of(parse_expr("log(2, p:{nonprincipal})")), np);
}

TEST(Paths, SubtermAndReplace)
{
    auto e = parse_expr("2 ^ (p * q)");
    EXPECT_EQ(subterm_at(e, {1, 0}), var("p"));
    EXPECT_EQ(replace_at(e, {1, 1}, nat(3)), parse_expr("2 ^ (p * 3)"));
    EXPECT_THROW(subterm_at(e, {0, 0}), Error);
}

TEST(Instantiate, ReplacesVariables)
{
    auto e = parse_expr("p ^ q + p");
    EXPECT_EQ(eval_principal(instantiate(e, {{"p", 3}, {"q", 2}})), 12);
}
