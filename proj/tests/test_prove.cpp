#include <uexp/parse.hpp>
#include <uexp/prove.hpp>

#include <support/random_expr.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <vector>

using namespace uexp;

namespace {

Verdict prove(const char * text)
{
    auto [l, r] = parse_equation(text);
    return prove_equal(l, r);
}

std::string oracle_of(const Verdict & v)
{
    return v.refutation ? v.refutation->oracle : std::string("-");
}

} // namespace

TEST(Prove, NoIdempotentForFirstExponentiation)
{
    auto v = prove_equal(UExpr::exp1(UExpr::var("p"), UExpr::var("q", AttrSet(AttrSet::nonprincipal))), UExpr::var("q", AttrSet(AttrSet::nonprincipal)));
    EXPECT_EQ(v.kind, VerdictKind::NotEqual);
    EXPECT_EQ(oracle_of(v), oracles::noid);
    // the hypothesis matters: q may be principal
    EXPECT_EQ(prove("E1(p, q) == q").kind, VerdictKind::Unknown);
}

TEST(Prove, SelfPowerIsNeverIdempotent)
{
    for (auto attr : AttrSet::names) {
        auto q = UExpr::var("q", AttrSet(attr.flag));
        if (! q.attrs().has(AttrSet::nonprincipal))
            continue;
        auto v = prove_equal(UExpr::exp1(q, q), q);
        ASSERT_EQ(v.kind, VerdictKind::NotEqual) << attr.name;
        EXPECT_EQ(oracle_of(v), oracles::noid);
    }
}

TEST(Prove, NormalizationGivesEqual)
{
    auto v = prove_equal(UExpr::exp1(UExpr::exp1(UExpr::var("p"), UExpr::nat(2)), UExpr::nat(3)),
                         UExpr::exp1(UExpr::var("p"), UExpr::nat(6)));
    EXPECT_EQ(v.kind, VerdictKind::Equal);
    EXPECT_FALSE(v.lhs_trace.empty());
    EXPECT_TRUE(v.rhs_trace.empty());
    EXPECT_EQ(prove("p == p").kind, VerdictKind::Equal);
    EXPECT_EQ(prove("2 ^ p * 4 ^ q == 2 ^ (p + 2 * q)").kind, VerdictKind::Equal);
    EXPECT_EQ(prove("E2(p, 3) == 3 ^ p").kind, VerdictKind::Equal);
}

TEST(Prove, SumOfPowersRefuted)
{
    auto v = prove("p:{nonprincipal} ^ 2 * p ^ 3 == p ^ 5");
    EXPECT_EQ(v.kind, VerdictKind::NotEqual);
    EXPECT_EQ(oracle_of(v), oracles::neqr);
    EXPECT_EQ(prove("p ^ 2 * p ^ 3 == p ^ 5").kind, VerdictKind::Unknown);
    // a natural base does satisfy the law
    EXPECT_EQ(prove("2 ^ 2 * 2 ^ 3 == 2 ^ 5").kind, VerdictKind::Equal);
}

TEST(Prove, InjectiveExponents)
{
    auto v = prove("p:{nonprincipal} ^ 2 == p ^ 3");
    EXPECT_EQ(v.kind, VerdictKind::NotEqual);
    EXPECT_EQ(oracle_of(v), oracles::inj_exp);

    // a^x = a^y reduces to x = y
    auto w = prove("2 ^ E1(r, q:{nonprincipal}) == 2 ^ q");
    EXPECT_EQ(w.kind, VerdictKind::NotEqual);
    ASSERT_TRUE(w.refutation && w.refutation->via);
    EXPECT_EQ(w.refutation->oracle, oracles::inj_exp);
    EXPECT_EQ(w.refutation->via->oracle, oracles::noid);

    EXPECT_EQ(prove("2 ^ p == 2 ^ q").kind, VerdictKind::Unknown);
}

TEST(Prove, ScaledSummandsRefuted)
{
    auto v = prove("u + 2 * p:{nonprincipal} == v + 3 * p");
    EXPECT_EQ(v.kind, VerdictKind::NotEqual);
    EXPECT_EQ(oracle_of(v), oracles::mal);
    EXPECT_EQ(prove("u + 2 * p == u + 3 * p").kind, VerdictKind::Unknown);
    EXPECT_EQ(oracle_of(prove("2 * p:{nonprincipal} == 3 * p")), oracles::mal);
}

TEST(Prove, SumIsNotProduct)
{
    auto v = prove("q:{nonprincipal} + p:{nonprincipal} == s:{nonprincipal} * r:{all_divisible}");
    EXPECT_EQ(v.kind, VerdictKind::NotEqual);
    EXPECT_EQ(oracle_of(v), oracles::hs);
    EXPECT_EQ(prove("q:{nonprincipal} + p:{nonprincipal} == s:{nonprincipal} * r:{nonprincipal}").kind, VerdictKind::Unknown);
}

TEST(Prove, DistinctNaturals)
{
    auto v = prove("2 + 3 == 7");
    EXPECT_EQ(v.kind, VerdictKind::NotEqual);
    EXPECT_EQ(oracle_of(v), oracles::principal);
}

TEST(Prove, OpenEquationsStayUnknown)
{
    const char * open[] = {
        "E1(p, q) == E1(q, p)",
        "E2(p, q) == E2(q, p)",
        "E1(p, q) == E2(q, p)",
        "E1(q, p) * p == p",
        "E1(q, p) * q == q",
        "E1(r, p) * E1(r, q) == E1(r, p + q)",
        "E2(q, p) * p == p",
        "E2(q, p) * q == q",
        "E2(p, r) * E2(q, r) == E2(p + q, r)",
    };
    for (auto text : open) {
        for (auto flags : {"", ":{nonprincipal}"}) {
            // declare every variable with the same flags
            std::string s = text;
            if (*flags) {
                std::vector<std::size_t> at;
                for (char name : {'p', 'q', 'r'})
                    if (auto i = s.find(name); i != std::string::npos)
                        at.push_back(i + 1);
                std::sort(at.rbegin(), at.rend());
                for (auto i : at)
                    s.insert(i, flags);
            }
            auto v = prove(s.c_str());
            EXPECT_EQ(v.kind, VerdictKind::Unknown) << s << " gave " << verdict_name(v.kind) << " " << oracle_of(v);
        }
    }
    EXPECT_EQ(prove("E1(p:{nonprincipal}, q:{nonprincipal}) == E2(p, q)").kind, VerdictKind::Unknown);
}

// No pair gets Equal from normalization and NotEqual from an oracle, and an
// Equal verdict agrees with every principal instantiation.
TEST(Prove, OraclesNeverContradictNormalization)
{
    fuzz::ExprGen gen(11, {.max_depth = 4, .max_atoms = 6, .max_leaf = 9, .lifts = true, .vars = {"p", "q", "r"}});
    auto & rng = gen.rng();
    const AttrSet flags[] = {AttrSet(), AttrSet(AttrSet::nonprincipal), AttrSet(AttrSet::all_divisible)};
    std::map<std::string, AttrSet> env;
    int equal = 0;
    for (int i = 0; i < 6000; ++i) {
        for (auto n : {"p", "q", "r"})
            env[n] = flags[rng() % 3];
        UExpr a = with_unified_attrs(gen.any(), env);
        UExpr b;
        switch (rng() % 3) {
        case 0: b = with_unified_attrs(gen.any(), env); break;
        case 1: b = UExpr::prod(UExpr::nat(1), UExpr::exp1(a, UExpr::nat(1))); break;
        default: b = UExpr::exp2(UExpr::nat(1), a); break;
        }
        Verdict v;
        try {
            v = prove_equal(a, b);
        }
        catch (const CapExceeded &) {
            continue;
        }
        ASSERT_FALSE(run_oracles(v.lhs_normal, v.lhs_normal)) << to_string(v.lhs_normal);
        if (v.kind != VerdictKind::Equal)
            continue;
        ++equal;
        ASSERT_FALSE(run_oracles(a, b)) << to_string(a) << " vs " << to_string(b);
        for (int j = 0; j < 3; ++j) {
            std::map<std::string, BigNat> bind {{"p", BigNat(1 + rng() % 5)}, {"q", BigNat(1 + rng() % 5)}, {"r", BigNat(1 + rng() % 5)}};
            try {
                ASSERT_EQ(eval_principal(instantiate(a, bind)), eval_principal(instantiate(b, bind)));
            }
            catch (const Error &) {
            }
        }
    }
    EXPECT_GT(equal, 3000);
}

TEST(Prove, VerdictRefutationOnlyWhenNotEqual)
{
    for (auto text : {"p == p", "2 == 3", "E1(p, q) == E1(q, p)"}) {
        auto v = prove(text);
        EXPECT_EQ(v.refutation.has_value(), v.kind == VerdictKind::NotEqual) << text;
    }
}
