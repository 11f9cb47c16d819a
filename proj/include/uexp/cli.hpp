#pragma once

// Command-line front end. run() takes the arguments after the program name
// and returns the exit code with the text that would go to stdout/stderr.
//
// Exit codes: 0 success, 1 negative verdict (NotEqual, Forced, monochromatic
// instance, Reject, no witness), 2 budget/cap hit or undecided (Unknown,
// UnknownAtCap), 64 usage error, 65 malformed input data.

#include <uexp/io.hpp>
#include <uexp/parse.hpp>

#include <CLI11.hpp>

#include <optional>
#include <string>
#include <vector>

namespace uexp::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_negative = 1,
    exit_budget = 2,
    exit_usage = 64,
    exit_data = 65,
};

struct CommandResult {
    int exit_code = exit_ok;
    std::string payload;     ///< stdout
    std::string diagnostics; ///< stderr
};

namespace detail {

    using io::json;

    struct Globals {
        bool json = false;
        bool trace_json = false;
        std::uint64_t budget_nodes = pr::SearchBudget {}.nodes;
        double budget_secs = 0;
        std::string cap = "2^64";
        unsigned threads = 1;

        BigNat cap_value() const
        {
            auto v = parse_bignat(cap);
            if (! v || *v < 1)
                throw CLI::ValidationError("--cap", "expected a natural such as 18446744073709551616, 2^64 or 1e18");
            return *v;
        }

        pr::SearchOptions search() const { return {{budget_nodes, budget_secs}, threads}; }
    };

    inline std::string join(const std::vector<std::string> & words)
    {
        std::string out;
        for (auto & w : words)
            out += (out.empty() ? "" : " ") + w;
        return out;
    }

    inline std::string trimmed(const std::string & s)
    {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos)
            return {};
        return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
    }

    // --config, --coloring and --set take a file path or the document itself.
    inline pr::ConfigTemplate load_config(const std::string & arg)
    {
        auto t = trimmed(arg);
        return pr::parse_config(t.starts_with("config") ? t : io::read_file(arg));
    }

    inline pr::Coloring load_coloring(const std::string & arg)
    {
        auto t = trimmed(arg);
        return io::coloring_from_json(io::parse_json(t.starts_with("{") ? t : io::read_file(arg), "coloring"));
    }

    inline expip::IntSet load_set(const std::string & arg)
    {
        auto t = trimmed(arg);
        if (t.starts_with("[") || t.starts_with("interval:") || t.starts_with("powers:"))
            return io::set_from_text(t);
        return io::set_from_text(io::read_file(arg));
    }

    inline std::vector<BigNat> parse_list(const std::string & text)
    {
        std::vector<BigNat> out;
        std::string item;
        std::istringstream in(text);
        while (std::getline(in, item, ',')) {
            auto v = parse_bignat(trimmed(item));
            if (! v)
                throw io::DataError("not a natural: '" + item + "'");
            out.push_back(*v);
        }
        if (out.empty())
            throw io::DataError("empty sequence");
        return out;
    }

    inline std::string nats_text(const std::vector<BigNat> & xs)
    {
        std::string out;
        for (auto & x : xs)
            out += (out.empty() ? "" : ",") + x.str();
        return out;
    }

    inline json nats_json(const std::vector<BigNat> & xs)
    {
        json a = json::array();
        for (auto & x : xs)
            a.push_back(io::nat_json(x));
        return a;
    }

    inline std::string trace_text(const Trace & t, const std::string & indent)
    {
        std::string out;
        for (auto & s : t) {
            std::string path;
            for (auto i : s.path)
                path += (path.empty() ? "" : ".") + std::to_string(i);
            out += indent + s.rule + " @" + (path.empty() ? "root" : path) + ": " + to_string(s.before) + "  ->  " + to_string(s.after) + "\n";
        }
        return out;
    }

    inline std::string refutation_text(const Refutation & r)
    {
        std::string out = r.oracle + " with";
        for (auto & [k, v] : r.bindings)
            out += " " + k + " = " + to_string(v) + ";";
        out.pop_back();
        if (r.via)
            out += ", since " + refutation_text(*r.via);
        return out;
    }

    inline std::string instance_text(const pr::Instance & inst)
    {
        std::string out;
        for (auto & [n, v] : inst.binding)
            out += (out.empty() ? "" : ", ") + n + "=" + std::to_string(v);
        out += " -> (";
        for (std::size_t i = 0; i < inst.term_values.size(); ++i)
            out += (i ? ", " : "") + std::to_string(inst.term_values[i]);
        return out + ")";
    }

    struct Runner {
        Globals g;
        CommandResult out;

        void emit(const json & j) { out.payload = j.dump(2) + "\n"; }
        void emit(const std::string & text) { out.payload = text; }

        void normalize(const std::string & text)
        {
            auto e = parse_expr(text);
            auto n = normalize_traced(e, {g.cap_value()});
            if (g.trace_json)
                return emit(io::trace_json(n.trace));
            if (g.json)
                return emit(json {{"command", "normalize"}, {"input", to_string(e)}, {"normal", to_string(n.expr)},
                    {"tree", to_tree_string(n.expr)}, {"trace", io::trace_json(n.trace)}});
            emit(to_string(n.expr) + "\n" + trace_text(n.trace, "  "));
        }

        void prove(const std::string & text)
        {
            auto [l, r] = parse_equation(text);
            auto v = prove_equal(l, r, {g.cap_value()});
            out.exit_code = v.kind == VerdictKind::Equal ? exit_ok : v.kind == VerdictKind::NotEqual ? exit_negative : exit_budget;
            std::string verdict = verdict_name(v.kind);
            if (v.refutation)
                verdict += "(" + v.refutation->oracle + ")";
            if (g.trace_json) {
                json t = json::array();
                for (auto [side, tr] : {std::pair {"lhs", &v.lhs_trace}, std::pair {"rhs", &v.rhs_trace}})
                    for (auto & step : io::trace_json(*tr)) {
                        step["side"] = side;
                        t.push_back(step);
                    }
                return emit(t);
            }
            if (g.json) {
                json j {{"command", "prove"}, {"verdict", verdict_name(v.kind)}, {"lhs", to_string(l)}, {"rhs", to_string(r)},
                    {"lhs_normal", to_string(v.lhs_normal)}, {"rhs_normal", to_string(v.rhs_normal)},
                    {"lhs_trace", io::trace_json(v.lhs_trace)}, {"rhs_trace", io::trace_json(v.rhs_trace)},
                    {"refutation", v.refutation ? io::refutation_json(*v.refutation) : json(nullptr)}};
                return emit(j);
            }
            std::string s = verdict + "\n";
            s += "lhs: " + to_string(v.lhs_normal) + "\n" + trace_text(v.lhs_trace, "  ");
            s += "rhs: " + to_string(v.rhs_normal) + "\n" + trace_text(v.rhs_trace, "  ");
            if (v.refutation)
                s += "by " + refutation_text(*v.refutation) + "\n";
            emit(s);
        }

        void eval(const std::string & text)
        {
            auto e = parse_expr(text);
            auto v = eval_principal(e, g.cap_value());
            if (g.json)
                return emit(json {{"command", "eval"}, {"input", to_string(e)}, {"value", io::nat_json(v)}});
            emit(v.str() + "\n");
        }

        void numfn(const std::string & fn, const std::string & arg)
        {
            auto n = parse_bignat(arg);
            if (! n || *n > BigNat(std::numeric_limits<std::uint64_t>::max()))
                throw io::DataError("numfn argument must be a natural below 2^64");
            auto x = n->convert_to<std::uint64_t>();
            std::uint64_t v;
            if (fn == "F")
                v = numth::fn_F(x);
            else if (fn == "G")
                v = numth::fn_G(x);
            else if (fn == "H")
                v = numth::fn_H(x);
            else
                v = numth::fn_Omega(x);
            if (g.json)
                return emit(json {{"command", "numfn"}, {"function", fn}, {"n", x}, {"value", v}});
            emit(std::to_string(v) + "\n");
        }

        void logpre(std::uint64_t base, const std::string & set_arg)
        {
            auto a = load_set(set_arg);
            if (a.kind() != expip::IntSet::Kind::Explicit)
                throw io::DataError("logpre needs a finite explicit set");
            std::set<std::uint64_t> values;
            for (auto & x : a.items())
                if (x <= BigNat(std::numeric_limits<std::uint64_t>::max()))
                    values.insert(x.convert_to<std::uint64_t>());
            auto pre = numth::log_preimage(values, base);
            if (g.json)
                return emit(json {{"command", "logpre"}, {"base", base}, {"values", pre}});
            std::string s = "{";
            for (auto v : pre)
                s += (s.size() > 1 ? ", " : "") + std::to_string(v);
            emit(s + "}\n");
        }

        void pr_min(const std::string & cfg_arg, unsigned k, pr::Value lo, pr::Value max)
        {
            auto cfg = load_config(cfg_arg);
            auto b = pr::min_forced_n(cfg, k, lo, max, g.search());
            auto opt = [](const std::optional<pr::Value> & v) { return v ? json(*v) : json(nullptr); };
            const char * status = b.kind == pr::Boundary::Kind::Found ? "Found" : b.kind == pr::Boundary::Kind::Budget ? "Budget" : "NoBoundary";
            out.exit_code = b.kind == pr::Boundary::Kind::Budget ? exit_budget : exit_ok;
            if (g.json)
                return emit(json {{"command", "pr-min"}, {"status", status}, {"last_avoidable", opt(b.last_avoidable)},
                    {"first_forced", opt(b.first_forced)}, {"budget_at", opt(b.budget_at)},
                    {"witness", b.witness ? io::coloring_json(*b.witness) : json(nullptr)}});
            std::string s;
            auto num = [](const std::optional<pr::Value> & v) { return v ? std::to_string(*v) : std::string("none"); };
            switch (b.kind) {
            case pr::Boundary::Kind::Found: s = "(" + num(b.last_avoidable) + ", " + num(b.first_forced) + ")\n"; break;
            case pr::Boundary::Kind::Budget: s = "budget exhausted at N = " + num(b.budget_at) + " (last avoidable " + num(b.last_avoidable) + ")\n"; break;
            case pr::Boundary::Kind::NoBoundary: s = "every N up to " + std::to_string(max) + " is avoidable\n"; break;
            }
            if (b.witness)
                s += "witness at N = " + num(b.last_avoidable) + ": " + io::coloring_json(*b.witness).dump() + "\n";
            emit(s);
        }

        void pr_avoid(const std::string & cfg_arg, unsigned k, pr::Value lo, pr::Value hi, const std::string & out_path)
        {
            auto cfg = load_config(cfg_arg);
            auto r = pr::find_avoiding_coloring(cfg, k, lo, hi, g.search());
            out.exit_code = r.kind == pr::SearchOutcome::Kind::Avoidable ? exit_ok : r.kind == pr::SearchOutcome::Kind::Forced ? exit_negative : exit_budget;
            if (r.witness && ! out_path.empty())
                io::write_file(out_path, io::coloring_json(*r.witness).dump() + "\n");
            if (g.json) {
                json j {{"command", "pr-avoid"}, {"outcome", pr::outcome_name(r.kind)}, {"nodes", r.nodes},
                    {"reason", r.reason.empty() ? json(nullptr) : json(r.reason)}, {"witness", nullptr}};
                if (r.witness && out_path.empty())
                    j["witness"] = io::coloring_json(*r.witness);
                return emit(j);
            }
            std::string s = std::string(pr::outcome_name(r.kind)) + " (nodes: " + std::to_string(r.nodes) + (r.reason.empty() ? "" : ", limit: " + r.reason) + ")\n";
            if (r.witness)
                s += out_path.empty() ? io::coloring_json(*r.witness).dump() + "\n" : "witness written to " + out_path + "\n";
            emit(s);
        }

        void pr_check(const std::string & cfg_arg, const std::string & col_arg)
        {
            auto cfg = load_config(cfg_arg);
            auto c = load_coloring(col_arg);
            auto inst = pr::check_coloring(c, cfg);
            out.exit_code = inst ? exit_negative : exit_ok;
            if (g.json) {
                json j {{"command", "pr-check"}, {"monochromatic", bool(inst)}, {"instance", nullptr}, {"color", nullptr}};
                if (inst) {
                    j["instance"] = io::instance_json(*inst);
                    j["color"] = c.color_of(inst->term_values.front());
                }
                return emit(j);
            }
            if (! inst)
                return emit("no monochromatic instance on [" + std::to_string(c.lo) + ".." + std::to_string(c.hi) + "]\n");
            emit("monochromatic instance in color " + std::to_string(c.color_of(inst->term_values.front())) + ": " + instance_text(*inst) + "\n");
        }

        void pr_cnf(const std::string & cfg_arg, unsigned k, pr::Value lo, pr::Value hi, const std::string & out_path)
        {
            auto cfg = load_config(cfg_arg);
            auto cnf = pr::export_cnf(cfg, k, lo, hi);
            auto text = cnf.dimacs();
            if (! out_path.empty())
                io::write_file(out_path, text);
            if (g.json) {
                json j {{"command", "pr-cnf"}, {"variables", cnf.num_vars}, {"clauses", cnf.clauses.size()},
                    {"out", out_path.empty() ? json(nullptr) : json(out_path)}};
                if (out_path.empty())
                    j["dimacs"] = text;
                return emit(j);
            }
            emit(out_path.empty() ? text : "wrote " + std::to_string(cnf.num_vars) + " variables, " + std::to_string(cnf.clauses.size()) + " clauses to " + out_path + "\n");
        }

        void log_transform(const std::string & col_arg, pr::Value base, const std::string & out_path)
        {
            auto c = pr::log_transform(load_coloring(col_arg), base);
            auto doc = io::coloring_json(c);
            if (! out_path.empty())
                io::write_file(out_path, doc.dump() + "\n");
            if (g.json)
                return emit(json {{"command", "log-transform"}, {"base", base}, {"coloring", doc}});
            emit(doc.dump() + "\n");
        }

        void expip_find(const std::string & set_arg, std::size_t depth)
        {
            auto a = load_set(set_arg);
            auto w = expip::find_expip(a, depth, g.cap_value());
            out.exit_code = w ? exit_ok : exit_negative;
            if (g.json)
                return emit(json {{"command", "expip-find"}, {"depth", depth}, {"found", bool(w)}, {"xs", w ? nats_json(w->xs) : json(nullptr)}});
            emit(w ? nats_text(w->xs) + "\n" : std::string("no witness of depth " + std::to_string(depth) + " up to cap\n"));
        }

        void expip_verify(const std::string & set_arg, const std::string & xs_arg)
        {
            auto a = load_set(set_arg);
            auto xs = parse_list(xs_arg);
            auto v = expip::verify_expip(a, xs, g.cap_value());
            using K = expip::ExpipVerdict::Kind;
            out.exit_code = v.kind == K::Accept ? exit_ok : v.kind == K::Reject ? exit_negative : exit_budget;
            auto opt = [](const std::optional<BigNat> & x) { return x ? io::nat_json(*x) : json(nullptr); };
            if (g.json)
                return emit(json {{"command", "expip-verify"}, {"verdict", expip::verdict_name(v.kind)},
                    {"index", v.kind == K::Accept ? json(nullptr) : json(v.index)}, {"base", opt(v.base)},
                    {"exponent", opt(v.exponent)}, {"value", opt(v.value)}});
            std::string s = expip::verdict_name(v.kind);
            if (v.kind != K::Accept && ! v.exponent)
                s += ": x" + std::to_string(v.index) + " = " + v.value->str() + " is not in the set";
            else if (v.kind != K::Accept) {
                s += ": n=" + std::to_string(v.index) + ", y=" + v.exponent->str() + ", " + v.base->str() + "^" + v.exponent->str();
                if (v.value)
                    s += " = " + v.value->str();
                s += v.kind == K::Reject ? " is not in the set" : " exceeds the cap";
            }
            emit(s + "\n");
        }
    };

} // namespace detail

inline CommandResult run(const std::vector<std::string> & args)
{
    detail::Runner r;
    auto & g = r.g;

    CLI::App app {"Symbolic algebra and finite search for ultrafilter exponentiation", "uexp"};
    app.require_subcommand(1);
    app.add_flag("--json", g.json, "Machine-readable JSON output");
    app.add_flag("--trace-json", g.trace_json, "normalize/prove: print the rule trace as a JSON array");
    app.add_option("--budget-nodes", g.budget_nodes, "Search node budget")->capture_default_str();
    app.add_option("--budget-secs", g.budget_secs, "Search wall-clock budget in seconds (0 = none)")->capture_default_str();
    app.add_option("--cap", g.cap, "Largest integer value allowed during evaluation and search")->capture_default_str();
    app.add_option("--threads", g.threads, "Worker threads for search (results do not depend on it)")->check(CLI::Range(1u, 256u));

    std::function<void()> action;
    std::vector<std::string> words;
    std::string fn, num, config, coloring, set, out_path, xs;
    unsigned k = 2;
    pr::Value lo = 1, hi = 1, max = 1, base = 2;
    std::size_t depth = 1;

    auto words_cmd = [&](const char * name, const char * desc, void (detail::Runner::*m)(const std::string &)) {
        auto * c = app.add_subcommand(name, desc)->fallthrough();
        c->add_option("expr", words, "Expression text (words are joined with spaces)")->required();
        c->callback([&, m] { action = [&, m] { (r.*m)(detail::join(words)); }; });
    };
    words_cmd("normalize", "Normalize an expression and print the rule trace", &detail::Runner::normalize);
    words_cmd("prove", "Decide lhs == rhs: Equal, NotEqual (with oracle) or Unknown", &detail::Runner::prove);
    words_cmd("eval", "Evaluate a variable-free expression on the naturals", &detail::Runner::eval);

    auto * numfn = app.add_subcommand("numfn", "Number-theoretic functions F, Omega, G, H")->fallthrough();
    numfn->add_option("function", fn)->required()->check(CLI::IsMember({"F", "Omega", "G", "H"}));
    numfn->add_option("n", num)->required();
    numfn->callback([&] { action = [&] { r.numfn(fn, num); }; });

    auto * logpre = app.add_subcommand("logpre", "Preimage {n >= 1 : base^n in A} of a finite set")->fallthrough();
    logpre->add_option("--base", base)->required()->check(CLI::Range(pr::Value(2), std::numeric_limits<pr::Value>::max()));
    logpre->add_option("--set", set, "JSON array file or inline array")->required();
    logpre->callback([&] { action = [&] { r.logpre(base, set); }; });

    auto add_range = [&](CLI::App * c, bool with_hi) {
        c->add_option("--config", config, "Configuration file or inline 'config {...};' text")->required();
        c->add_option("-k,--colors", k, "Number of colors")->required()->check(CLI::Range(1u, 64u));
        c->add_option("--lo", lo, "Interval start")->required()->check(CLI::Range(pr::Value(1), pr::max_hi));
        if (with_hi)
            c->add_option("--hi", hi, "Interval end")->required()->check(CLI::Range(pr::Value(1), pr::max_hi));
    };

    auto * prmin = app.add_subcommand("pr-min", "Smallest N with every coloring of [lo..N] forced")->fallthrough();
    add_range(prmin, false);
    prmin->add_option("--max", max, "Largest N to try")->required();
    prmin->callback([&] { action = [&] { r.pr_min(config, k, lo, max); }; });

    auto * avoid = app.add_subcommand("pr-avoid", "Search for a coloring with no monochromatic instance")->fallthrough();
    add_range(avoid, true);
    avoid->add_option("--out", out_path, "Write the witness coloring JSON here");
    avoid->callback([&] { action = [&] { r.pr_avoid(config, k, lo, hi, out_path); }; });

    auto * check = app.add_subcommand("pr-check", "Find the first monochromatic instance of a coloring")->fallthrough();
    check->add_option("--config", config)->required();
    check->add_option("--coloring", coloring, "Coloring JSON file or inline object")->required();
    check->callback([&] { action = [&] { r.pr_check(config, coloring); }; });

    auto * cnf = app.add_subcommand("pr-cnf", "Export the avoidance problem as DIMACS CNF")->fallthrough();
    add_range(cnf, true);
    cnf->add_option("--out", out_path, "Write DIMACS here instead of stdout");
    cnf->callback([&] { action = [&] { r.pr_cnf(config, k, lo, hi, out_path); }; });

    auto * logt = app.add_subcommand("log-transform", "Color n like base^n")->fallthrough();
    logt->add_option("--coloring", coloring)->required();
    logt->add_option("--base", base)->required()->check(CLI::Range(pr::Value(2), std::numeric_limits<pr::Value>::max()));
    logt->add_option("--out", out_path);
    logt->callback([&] { action = [&] { r.log_transform(coloring, base, out_path); }; });

    auto * efind = app.add_subcommand("expip-find", "Search for an exponential-IP witness inside a set")->fallthrough();
    efind->add_option("--set", set, "JSON array, interval:a..b or powers:B[:K] (file or inline)")->required();
    efind->add_option("--depth", depth)->required()->check(CLI::Range(std::size_t(1), std::size_t(24)));
    efind->callback([&] { action = [&] { r.expip_find(set, depth); }; });

    auto * everify = app.add_subcommand("expip-verify", "Check a sequence against the exponential-IP condition")->fallthrough();
    everify->add_option("--set", set)->required();
    everify->add_option("--xs", xs, "Comma-separated sequence")->required();
    everify->callback([&] { action = [&] { r.expip_verify(set, xs); }; });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &) {
        return {exit_ok, app.help(), ""};
    }
    catch (const CLI::CallForAllHelp &) {
        return {exit_ok, app.help("", CLI::AppFormatMode::All), ""};
    }
    catch (const CLI::ParseError & e) {
        return {exit_usage, "", std::string(e.what()) + "\nRun with --help for usage.\n"};
    }

    auto fail = [&](int code, const std::string & kind, const std::string & msg) {
        r.out.exit_code = code;
        if (g.json)
            r.out.payload = detail::json {{"error", kind}, {"message", msg}}.dump(2) + "\n";
        else
            r.out.payload.clear();
        r.out.diagnostics = msg + "\n";
        return r.out;
    };
    try {
        action();
    }
    catch (const CLI::ValidationError & e) {
        return fail(exit_usage, "usage", e.what());
    }
    catch (const CapExceeded & e) {
        return fail(exit_budget, "cap", e.what());
    }
    catch (const RewriteBudgetExceeded & e) {
        return fail(exit_budget, "budget", e.what());
    }
    catch (const Error & e) {
        return fail(exit_data, "data", e.what());
    }
    return r.out;
}

} // namespace uexp::cli
