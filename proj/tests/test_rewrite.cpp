#include <uexp/parse.hpp>
#include <uexp/rewrite.hpp>

#include <support/random_expr.hpp>

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace uexp;

namespace {

UExpr P(const char * s) { return parse_expr(s); }
UExpr nat(unsigned v) { return UExpr::nat(v); }
UExpr var(const char * n) { return UExpr::var(n); }

std::vector<std::string> rules_of(const Trace & t)
{
    std::vector<std::string> out;
    for (auto & s : t)
        out.push_back(s.rule);
    return out;
}

bool less(const Measure & a, const Measure & b) { return a < b; }

} // namespace

TEST(Normalize, FlattenNestedPowers)
{
    EXPECT_EQ(normalize(UExpr::exp1(UExpr::exp1(var("p"), nat(2)), nat(3))), UExpr::exp1(var("p"), nat(6)));
}

TEST(Normalize, SameBaseAfterRoot)
{
    auto e = UExpr::prod(UExpr::exp1(nat(2), var("p")), UExpr::exp1(nat(4), var("q")));
    EXPECT_EQ(normalize(e), UExpr::exp1(nat(2), UExpr::sum(var("p"), UExpr::prod(nat(2), var("q")))));
}

TEST(Normalize, SecondExponentiationWithNaturalExponent)
{
    EXPECT_EQ(normalize(UExpr::exp2(var("p"), nat(5))), UExpr::exp1(nat(5), var("p")));
    EXPECT_EQ(normalize(UExpr::exp2(nat(5), var("p"))), UExpr::exp1(var("p"), nat(5)));
}

TEST(Normalize, FoldsNaturalTowers)
{
    EXPECT_EQ(normalize(UExpr::exp1(UExpr::exp1(nat(2), nat(3)), nat(2))), nat(64));
}

TEST(Normalize, UnitRules)
{
    EXPECT_EQ(normalize(P("p ^ 1")), var("p"));
    EXPECT_EQ(normalize(P("1 ^ p")), nat(1));
    EXPECT_EQ(normalize(P("1 * p")), var("p"));
    EXPECT_EQ(normalize(P("p * 1")), var("p"));
    // 1 + p is not p
    EXPECT_EQ(normalize(P("p + 1")), P("1 + p"));
}

TEST(Normalize, ScalarsMoveLeft)
{
    EXPECT_EQ(normalize(P("p * 3")), P("3 * p"));
    EXPECT_EQ(normalize(P("p + 3")), P("3 + p"));
    // only naturals commute; variables keep their order
    EXPECT_EQ(normalize(P("q * p")), P("q * p"));
}

TEST(Normalize, LogOfPower)
{
    EXPECT_EQ(normalize(P("log(2, 8 ^ q)")), P("3 * q"));
    EXPECT_EQ(normalize(P("log(2, 16 ^ q)")), P("4 * q"));
    // the base is rooted first, so 16^q is seen as 2^(4*q)
    EXPECT_EQ(normalize(P("log(4, 16 ^ q)")), P("log(4, 2 ^ (4 * q))"));
    EXPECT_EQ(normalize(P("log(8, 2 ^ q)")), P("log(8, 2 ^ q)"));
    // log of a non-power stays symbolic
    EXPECT_EQ(normalize(P("log(2, 6)")), P("log(2, 6)"));
}

TEST(Normalize, SecondExponentiationAssociates)
{
    EXPECT_EQ(normalize(P("E2(p, E2(q, r))")), P("E2(p * q, r)"));
}

TEST(Normalize, IsDeterministicAndIdempotent)
{
    for (auto s : {"E2(3, 4 ^ p) * 2 ^ p", "((p ^ 2) ^ q) ^ 3", "log(2, 4 ^ (p + 1)) * 2", "E2(p, E2(q, E2(r, 7)))"}) {
        auto n = normalize(P(s));
        EXPECT_EQ(normalize(n), n) << s;
        EXPECT_TRUE(rule_trace(n).empty()) << s;
    }
}

TEST(Trace, Examples)
{
    EXPECT_TRUE(rule_trace(nat(5)).empty());
    EXPECT_EQ(rules_of(rule_trace(UExpr::exp2(var("p"), nat(3)))), std::vector<std::string> {"E2CAN"});

    auto e = UExpr::exp1(UExpr::exp1(nat(2), nat(3)), var("q"));
    auto n = normalize_traced(e);
    EXPECT_EQ(rules_of(n.trace), (std::vector<std::string> {"FOLD", "BASEROOT"}));
    EXPECT_EQ(n.expr, UExpr::exp1(nat(2), UExpr::prod(nat(3), var("q"))));
    EXPECT_EQ(replay(e, n.trace), n.expr);
}

TEST(Trace, StepsRecordPaths)
{
    auto e = P("q + (p ^ 2) ^ 3");
    auto n = normalize_traced(e);
    ASSERT_FALSE(n.trace.empty());
    EXPECT_EQ(n.trace.front().rule, "E1FLAT");
    EXPECT_EQ(n.trace.front().path, (Path {1}));
    EXPECT_EQ(replay(e, n.trace), n.expr);
}

TEST(Trace, ReplayRejectsForeignTrace)
{
    auto t = rule_trace(P("E2(p, 3)"));
    EXPECT_THROW(replay(P("E2(p, 4)"), t), Error);
}

TEST(Normalize, CapIsEnforced)
{
    EXPECT_THROW(normalize(P("2 ^ 100")), CapExceeded);
    EXPECT_EQ(normalize(P("2 ^ 100"), {BigNat(1) << 100}), UExpr::nat(BigNat(1) << 100));
    EXPECT_EQ(normalize(P("2 ^ 100 + p"), {BigNat(1) << 128}).lhs(), UExpr::nat(BigNat(1) << 100));
}

TEST(Normalize, StepBudget)
{
    NormalizeOptions o;
    o.max_steps = 2;
    EXPECT_THROW(normalize(P("((p ^ 2) ^ 3) ^ 4 * 5"), o), RewriteBudgetExceeded);
}

TEST(Properties, VariableFreeSoundness)
{
    fuzz::ExprGen gen(1, {});
    for (int i = 0; i < 3000; ++i) {
        UExpr e = gen.valid(default_cap());
        auto n = normalize(e);
        ASSERT_EQ(eval_principal(n), eval_principal(e)) << to_string(e);
        ASSERT_TRUE(n.is_nat()) << to_string(e);
    }
}

TEST(Properties, IdempotenceWithVariables)
{
    fuzz::ExprGen gen(2, {.max_depth = 5, .max_atoms = 8, .max_leaf = 16, .lifts = true, .vars = {"p", "q", "r"}});
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        UExpr e = gen.any();
        UExpr n;
        try {
            n = normalize(e);
        }
        catch (const CapExceeded &) {
            continue;
        }
        ASSERT_EQ(normalize(n), n) << to_string(e);
        ++checked;
    }
    EXPECT_GT(checked, 2500);
}

// Every rule must hold for all principal values of its variables.
TEST(Properties, InstantiationSoundness)
{
    fuzz::ExprGen gen(3, {.max_depth = 4, .max_atoms = 6, .max_leaf = 9, .lifts = true, .vars = {"p", "q"}});
    std::mt19937_64 & rng = gen.rng();
    int compared = 0;
    for (int i = 0; i < 4000; ++i) {
        UExpr e = gen.any();
        UExpr n;
        try {
            n = normalize(e);
        }
        catch (const CapExceeded &) {
            continue;
        }
        for (int j = 0; j < 4; ++j) {
            std::map<std::string, BigNat> b {{"p", BigNat(1 + rng() % 6)}, {"q", BigNat(1 + rng() % 6)}};
            BigNat want;
            try {
                want = eval_principal(instantiate(e, b));
            }
            catch (const Error &) {
                continue;
            }
            BigNat got;
            try {
                got = eval_principal(instantiate(n, b));
            }
            catch (const CapExceeded &) {
                continue; // regrouped exponents can pass through larger intermediates
            }
            ASSERT_EQ(got, want) << to_string(e) << "  =>  " << to_string(n);
            ++compared;
        }
    }
    EXPECT_GT(compared, 3000);
}

TEST(Properties, MeasureDecreasesOnEveryStep)
{
    fuzz::ExprGen gen(4, {.max_depth = 6, .max_atoms = 10, .max_leaf = 64, .lifts = true, .vars = {"p", "q", "r"}});
    std::size_t steps = 0;
    for (int i = 0; i < 3000; ++i) {
        UExpr e = gen.any();
        Normalized n;
        try {
            n = normalize_traced(e);
        }
        catch (const CapExceeded &) {
            continue;
        }
        UExpr cur = e;
        for (auto & s : n.trace) {
            UExpr next = replace_at(cur, s.path, s.after);
            ASSERT_TRUE(less(termination_measure(next), termination_measure(cur)))
                << s.rule << " on " << to_string(s.before) << " inside " << to_string(cur);
            cur = next;
            ++steps;
        }
        ASSERT_EQ(cur, n.expr);
    }
    EXPECT_GT(steps, 1000u);
}

TEST(Properties, EveryRuleFiresInFuzzing)
{
    fuzz::ExprGen gen(5, {.max_depth = 5, .max_atoms = 8, .max_leaf = 16, .lifts = true, .vars = {"p", "q"}});
    std::set<std::string> seen;
    for (int i = 0; i < 5000; ++i) {
        try {
            for (auto & s : rule_trace(gen.any()))
                seen.insert(s.rule);
        }
        catch (const CapExceeded &) {
        }
    }
    for (auto r : rules::catalog)
        EXPECT_TRUE(seen.count(std::string(r))) << r;
}
