#pragma once

// Finite partition-regularity engine: colorings of [lo..hi], monochromatic
// instance checks, backtracking search for avoiding colorings, DIMACS export
// and the log-base transform.

#include <uexp/config.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace uexp::pr {

struct Coloring {
    Value lo = 1;
    Value hi = 1;
    unsigned k = 1;
    std::vector<unsigned> colors; ///< colors[v - lo]

    unsigned color_of(Value v) const { return colors.at(v - lo); }

    /// Throws DomainError unless the invariants hold.
    void validate() const
    {
        if (lo < 1 || hi < lo)
            throw DomainError("coloring range must satisfy 1 <= lo <= hi");
        if (k < 1)
            throw DomainError("coloring needs k >= 1");
        if (colors.size() != hi - lo + 1)
            throw DomainError("coloring has " + std::to_string(colors.size()) + " entries, expected " + std::to_string(hi - lo + 1));
        for (auto c : colors)
            if (c >= k)
                throw DomainError("color " + std::to_string(c) + " is not below k = " + std::to_string(k));
    }

    friend bool operator==(const Coloring &, const Coloring &) = default;
};

namespace detail {

    struct Component {
        std::vector<std::size_t> vars;
        std::vector<std::size_t> terms;
        double volume = 0;
    };

    inline std::vector<Component> components(const ConfigTemplate & cfg)
    {
        std::vector<std::size_t> parent(cfg.variables.size());
        std::iota(parent.begin(), parent.end(), std::size_t(0));
        auto find = [&](std::size_t v) {
            while (parent[v] != v)
                v = parent[v] = parent[parent[v]];
            return v;
        };
        auto unite = [&](const std::vector<std::size_t> & vs) {
            for (std::size_t i = 1; i < vs.size(); ++i)
                parent[find(vs[i])] = find(vs[0]);
        };
        std::vector<std::vector<std::size_t>> term_vars;
        for (auto & t : cfg.terms) {
            std::vector<std::size_t> vs;
            for (std::size_t v = 0; v < cfg.variables.size(); ++v)
                if (CompiledTerm(t, cfg.variables).uses(v))
                    vs.push_back(v);
            unite(vs);
            term_vars.push_back(std::move(vs));
        }
        for (auto & c : cfg.constraints)
            unite(c.vars);

        std::vector<Component> out;
        std::map<std::size_t, std::size_t> slot;
        Component constants;
        for (std::size_t t = 0; t < cfg.terms.size(); ++t) {
            if (term_vars[t].empty()) {
                constants.terms.push_back(t);
                continue;
            }
            auto root = find(term_vars[t][0]);
            auto [it, fresh] = slot.try_emplace(root, out.size());
            if (fresh)
                out.emplace_back();
            out[it->second].terms.push_back(t);
        }
        for (std::size_t v = 0; v < cfg.variables.size(); ++v) {
            auto it = slot.find(find(v));
            if (it != slot.end())
                out[it->second].vars.push_back(v);
        }
        if (! constants.terms.empty())
            out.insert(out.begin(), std::move(constants));
        return out;
    }

} // namespace detail

/// First monochromatic instance in enumeration order, or none.
///
/// The template is split into variable-disjoint components, each searched
/// for its lexicographically least instance of a given color with the
/// coloring pruning every completed term; the per-component minima combine
/// into the global lexicographic minimum.
inline std::optional<Instance> check_coloring(const Coloring & c, const ConfigTemplate & cfg)
{
    c.validate();
    auto comps = detail::components(cfg);
    std::vector<detail::Enumerator> enums;
    enums.reserve(comps.size());
    for (auto & comp : comps) {
        auto & en = enums.emplace_back(cfg, comp.terms, comp.vars, c.lo, c.hi);
        double vol = 1;
        for (std::size_t d = 0; d < comp.vars.size(); ++d) {
            Value ub = en.upper_bound(d);
            Value mn = en.minimum(d);
            vol *= ub < mn ? 0.0 : double(ub - mn + 1);
        }
        comp.volume = vol;
        if (vol == 0)
            return std::nullopt;
    }
    std::vector<std::size_t> order(comps.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return comps[a].volume < comps[b].volume; });

    std::optional<Instance> best;
    std::vector<Value> vals(cfg.variables.size()), terms(cfg.terms.size());
    for (unsigned col = 0; col < c.k; ++col) {
        bool all = true;
        for (auto ci : order) {
            auto & en = enums[ci];
            en.require_colour(c.colors.data(), col);
            bool found = false;
            en.run([&](const Value * v, const Value * t) {
                for (auto var : comps[ci].vars)
                    vals[var] = v[var];
                for (std::size_t j = 0; j < comps[ci].terms.size(); ++j)
                    terms[comps[ci].terms[j]] = t[j];
                found = true;
                return false;
            });
            if (! found) {
                all = false;
                break;
            }
        }
        if (! all)
            continue;
        auto inst = detail::make_instance(cfg, vals.data(), terms.data());
        if (! best || inst.binding < best->binding)
            best = std::move(inst);
    }
    return best;
}

struct SearchBudget {
    std::uint64_t nodes = 100'000'000;
    /// Wall-clock limit; zero means none.
    double seconds = 0;
};

struct SearchOptions {
    SearchBudget budget;
    unsigned threads = 1;
};

struct SearchOutcome {
    enum class Kind { Avoidable, Forced, Budget };
    Kind kind = Kind::Budget;
    std::optional<Coloring> witness; ///< set iff Avoidable
    /// Nodes explored (Avoidable, Forced) or the limit that was hit (Budget).
    std::uint64_t nodes = 0;
    std::string reason; ///< "nodes" or "time" for Budget
};

inline const char * outcome_name(SearchOutcome::Kind k)
{
    switch (k) {
    case SearchOutcome::Kind::Avoidable: return "Avoidable";
    case SearchOutcome::Kind::Forced: return "Forced";
    case SearchOutcome::Kind::Budget: return "Budget";
    }
    return "?";
}

namespace detail {

    // For each position, the instances whose largest value sits there, each
    // stored as the other distinct positions it touches.
    struct InstanceIndex {
        std::size_t n = 0;
        std::vector<std::uint32_t> first;   ///< per position, into `bounds`
        std::vector<std::uint32_t> bounds;  ///< per instance, into `members`
        std::vector<std::uint32_t> members;

        static InstanceIndex build(const ConfigTemplate & cfg, Value lo, Value hi)
        {
            InstanceIndex ix;
            ix.n = std::size_t(hi - lo + 1);
            std::vector<std::vector<std::vector<std::uint32_t>>> per(ix.n);
            std::vector<std::uint32_t> pos;
            for_each_instance(cfg, lo, hi, [&](const Value *, const Value * terms) {
                pos.clear();
                for (std::size_t t = 0; t < cfg.terms.size(); ++t)
                    pos.push_back(std::uint32_t(terms[t] - lo));
                std::sort(pos.begin(), pos.end());
                pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
                auto top = pos.back();
                pos.pop_back();
                per[top].push_back(pos);
                return true;
            });
            ix.first.push_back(0);
            ix.bounds.push_back(0);
            for (auto & list : per) {
                std::sort(list.begin(), list.end());
                list.erase(std::unique(list.begin(), list.end()), list.end());
                for (auto & inst : list) {
                    ix.members.insert(ix.members.end(), inst.begin(), inst.end());
                    ix.bounds.push_back(std::uint32_t(ix.members.size()));
                }
                ix.first.push_back(std::uint32_t(ix.bounds.size() - 1));
            }
            return ix;
        }

        std::uint64_t forbidden(std::size_t i, const std::vector<std::uint8_t> & col, std::uint64_t all) const
        {
            std::uint64_t mask = 0;
            for (auto j = first[i]; j < first[i + 1]; ++j) {
                auto b = bounds[j], e = bounds[j + 1];
                if (b == e)
                    return all;
                auto c0 = col[members[b]];
                bool mono = true;
                for (auto m = b + 1; m < e && mono; ++m)
                    mono = col[members[m]] == c0;
                if (mono)
                    mask |= std::uint64_t(1) << c0;
            }
            return mask & all;
        }

        /// Other positions of the first instance at i that would be
        /// monochromatic in color c, or null if there is none.
        const std::uint32_t * mono(std::size_t i, unsigned c, const std::vector<std::uint8_t> & col, std::uint32_t & len) const
        {
            for (auto j = first[i]; j < first[i + 1]; ++j) {
                auto b = bounds[j], e = bounds[j + 1];
                bool all_c = true;
                for (auto m = b; m < e && all_c; ++m)
                    all_c = col[members[m]] == c;
                if (all_c) {
                    len = e - b;
                    return members.data() + b;
                }
            }
            return nullptr;
        }
    };

    using Clock = std::chrono::steady_clock;

    struct Backtracker {
        const InstanceIndex & ix;
        unsigned k;
        std::optional<Clock::time_point> deadline;

        enum class Stop { exhausted, found, node_limit, time_limit, cancelled };

        struct Result {
            Stop stop;
            std::uint64_t nodes = 0;
            std::vector<std::uint8_t> colors;
        };

        // Chronological enumeration of every conflict-free coloring of the
        // first `depth` positions, in search order. Colors are capped at one
        // more than the largest color used so far, which breaks the symmetry
        // of global color permutations.
        template <class Emit>
        Result prefixes(std::size_t depth, std::uint64_t node_limit, Emit && emit) const
        {
            return run({}, node_limit, depth, emit, [] { return false; });
        }

        // Depth-first completion of `prefix` with conflict-directed
        // backjumping: each position records the earlier positions that
        // caused its failures, and exhausting a position jumps straight to
        // the latest of them. Only subtrees without solutions are skipped,
        // so the first solution is the same as plain backtracking finds.
        template <class Cancel>
        Result solve(std::vector<std::uint8_t> prefix, std::uint64_t node_limit, Cancel && cancelled) const
        {
            const std::size_t n = ix.n;
            const std::size_t start = prefix.size();
            Result r;
            std::vector<std::uint8_t> col = std::move(prefix);
            col.resize(n, 0);
            std::vector<int> maxu(n + 1, -1);
            std::vector<std::uint32_t> firstpos(k, 0);
            for (std::size_t i = 0; i < start; ++i) {
                if (int(col[i]) > maxu[i])
                    firstpos[col[i]] = std::uint32_t(i);
                maxu[i + 1] = std::max(maxu[i], int(col[i]));
            }
            std::vector<unsigned> cand(n);
            std::vector<std::vector<std::uint32_t>> conf(n);

            auto finish = [&](Stop s) {
                r.stop = s;
                if (s == Stop::found)
                    r.colors = col;
                return r;
            };
            if (start == n)
                return finish(Stop::found);

            std::size_t i = start;
            cand[i] = 0;
            conf[i].clear();
            for (;;) {
                unsigned limit = std::min<unsigned>(k, unsigned(maxu[i] + 2));
                bool placed = false;
                for (unsigned c = cand[i]; c < limit; ++c) {
                    std::uint32_t len = 0;
                    if (auto others = ix.mono(i, c, col, len)) {
                        conf[i].insert(conf[i].end(), others, others + len);
                        continue;
                    }
                    col[i] = std::uint8_t(c);
                    cand[i] = c + 1;
                    if (int(c) > maxu[i])
                        firstpos[c] = std::uint32_t(i);
                    maxu[i + 1] = std::max(maxu[i], int(c));
                    if (++r.nodes > node_limit)
                        return finish(Stop::node_limit);
                    if ((r.nodes & 0x3fff) == 0) {
                        if (deadline && Clock::now() > *deadline)
                            return finish(Stop::time_limit);
                        if (cancelled())
                            return finish(Stop::cancelled);
                    }
                    if (++i == n)
                        return finish(Stop::found);
                    cand[i] = 0;
                    conf[i].clear();
                    placed = true;
                    break;
                }
                if (placed)
                    continue;
                // Colors above the cap were skipped only because they are
                // interchangeable with the fresh one, which depends on where
                // each used color first appeared.
                if (limit < k)
                    for (int c = 0; c <= maxu[i]; ++c)
                        conf[i].push_back(firstpos[std::size_t(c)]);
                auto & cs = conf[i];
                if (cs.empty())
                    return finish(Stop::exhausted);
                std::sort(cs.begin(), cs.end());
                cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
                std::size_t h = cs.back();
                if (h < start)
                    return finish(Stop::exhausted);
                conf[h].insert(conf[h].end(), cs.begin(), cs.end() - 1);
                i = h;
            }
        }

        template <class Emit, class Cancel>
        Result run(std::vector<std::uint8_t> prefix, std::uint64_t node_limit, std::size_t emit_depth, Emit && emit, Cancel && cancelled) const
        {
            const std::size_t n = ix.n;
            const std::size_t start = prefix.size();
            const std::uint64_t all = k >= 64 ? ~std::uint64_t(0) : (std::uint64_t(1) << k) - 1;
            Result r;
            std::vector<std::uint8_t> col = std::move(prefix);
            col.resize(n, 0);
            std::vector<int> maxu(n + 1, -1);
            for (std::size_t i = 0; i < start; ++i)
                maxu[i + 1] = std::max(maxu[i], int(col[i]));
            std::vector<std::uint64_t> forb(n);
            std::vector<unsigned> cand(n);

            auto finish = [&](Stop s) {
                r.stop = s;
                if (s == Stop::found)
                    r.colors = col;
                return r;
            };
            if (start == n)
                return finish(Stop::found);

            std::size_t i = start;
            auto enter = [&](std::size_t at) {
                forb[at] = ix.forbidden(at, col, all);
                cand[at] = 0;
            };
            enter(i);
            for (;;) {
                unsigned limit = std::min<unsigned>(k, unsigned(maxu[i] + 2));
                unsigned c = cand[i];
                while (c < limit && (forb[i] >> c & 1))
                    ++c;
                if (c < limit) {
                    col[i] = std::uint8_t(c);
                    cand[i] = c + 1;
                    maxu[i + 1] = std::max(maxu[i], int(c));
                    if (++r.nodes > node_limit)
                        return finish(Stop::node_limit);
                    if ((r.nodes & 0x3fff) == 0) {
                        if (deadline && Clock::now() > *deadline)
                            return finish(Stop::time_limit);
                        if (cancelled())
                            return finish(Stop::cancelled);
                    }
                    ++i;
                    if (i == emit_depth && i < n) {
                        emit(std::vector<std::uint8_t>(col.begin(), col.begin() + std::ptrdiff_t(i)));
                        --i;
                        continue;
                    }
                    if (i == n) {
                        if (emit_depth == n) {
                            emit(std::vector<std::uint8_t>(col.begin(), col.end()));
                            --i;
                            continue;
                        }
                        return finish(Stop::found);
                    }
                    enter(i);
                }
                else {
                    if (i == start)
                        return finish(Stop::exhausted);
                    --i;
                }
            }
        }
    };

    // Prefix length for splitting work; depends only on (k, n) so the
    // explored tree, and therefore every count, is independent of threads.
    inline std::size_t split_depth(unsigned k, std::size_t n)
    {
        std::size_t d = k <= 1 ? 1 : std::size_t(std::log(1024.0) / std::log(double(k))) + 1;
        return std::min(d, n);
    }

} // namespace detail

/// Looks for a k-coloring of [lo..hi] with no monochromatic instance.
///
/// Positions are colored in increasing order; a color is rejected as soon as
/// it completes a monochromatic instance within the colored prefix. Position
/// lo always gets color 0 and each new color is the smallest unused one.
/// Avoidable carries the first witness in this order, Forced means the tree
/// was exhausted, and Budget that a limit was hit first.
inline SearchOutcome find_avoiding_coloring(const ConfigTemplate & cfg, unsigned k, Value lo, Value hi, const SearchOptions & opts = {})
{
    if (k < 1 || k > 64)
        throw DomainError("k must be in [1, 64]");
    if (lo < 1 || hi < lo)
        throw DomainError("need 1 <= lo <= hi");
    if (hi - lo >= (Value(1) << 31))
        throw DomainError("interval too long for search");

    using detail::Backtracker;
    std::optional<detail::Clock::time_point> deadline;
    if (opts.budget.seconds > 0)
        deadline = detail::Clock::now() + std::chrono::duration_cast<detail::Clock::duration>(std::chrono::duration<double>(opts.budget.seconds));

    auto ix = detail::InstanceIndex::build(cfg, lo, hi);
    Backtracker bt {ix, k, deadline};
    const std::uint64_t limit = opts.budget.nodes;

    SearchOutcome out;
    auto budget = [&](const char * why) {
        out.kind = SearchOutcome::Kind::Budget;
        out.reason = why;
        out.nodes = limit;
        return out;
    };
    auto avoidable = [&](const std::vector<std::uint8_t> & cols, std::uint64_t nodes) {
        out.kind = SearchOutcome::Kind::Avoidable;
        out.nodes = nodes;
        Coloring c {lo, hi, k, std::vector<unsigned>(cols.begin(), cols.end())};
        out.witness = std::move(c);
        return out;
    };

    std::vector<std::vector<std::uint8_t>> tasks;
    auto gen = bt.prefixes(detail::split_depth(k, ix.n), limit, [&](std::vector<std::uint8_t> p) { tasks.push_back(std::move(p)); });
    if (gen.stop == Backtracker::Stop::node_limit)
        return budget("nodes");
    if (gen.stop == Backtracker::Stop::time_limit)
        return budget("time");
    std::uint64_t total = gen.nodes;

    const unsigned threads = std::max(1u, opts.threads);
    if (threads == 1 || tasks.size() < 2) {
        for (auto & t : tasks) {
            auto r = bt.solve(t, limit - total, [] { return false; });
            if (r.stop == Backtracker::Stop::node_limit)
                return budget("nodes");
            if (r.stop == Backtracker::Stop::time_limit)
                return budget("time");
            total += r.nodes;
            if (r.stop == Backtracker::Stop::found)
                return avoidable(r.colors, total);
        }
        out.kind = SearchOutcome::Kind::Forced;
        out.nodes = total;
        return out;
    }

    // Workers claim tasks in order and abandon any task later than the
    // earliest success; results are then folded in task order exactly as
    // the sequential loop above would.
    std::vector<std::optional<Backtracker::Result>> results(tasks.size());
    std::atomic<std::size_t> next {0};
    std::atomic<std::size_t> earliest {tasks.size()};
    auto worker = [&] {
        for (;;) {
            std::size_t t = next.fetch_add(1);
            if (t >= tasks.size() || t > earliest.load())
                return;
            auto r = bt.solve(tasks[t], limit, [&] { return t > earliest.load(); });
            if (r.stop == Backtracker::Stop::found) {
                std::size_t cur = earliest.load();
                while (t < cur && ! earliest.compare_exchange_weak(cur, t)) {
                }
            }
            results[t] = std::move(r);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back(worker);
    for (auto & th : pool)
        th.join();

    for (std::size_t t = 0; t < tasks.size(); ++t) {
        auto & r = *results[t];
        if (r.stop == Backtracker::Stop::time_limit)
            return budget("time");
        if (r.stop == Backtracker::Stop::node_limit || r.nodes > limit - total)
            return budget("nodes");
        total += r.nodes;
        if (r.stop == Backtracker::Stop::found)
            return avoidable(r.colors, total);
    }
    out.kind = SearchOutcome::Kind::Forced;
    out.nodes = total;
    return out;
}

struct Boundary {
    enum class Kind { Found, Budget, NoBoundary };
    Kind kind = Kind::NoBoundary;
    /// Largest avoidable N below the first forced one, absent if lo itself is forced.
    std::optional<Value> last_avoidable;
    std::optional<Coloring> witness;
    std::optional<Value> first_forced;
    /// N at which the budget ran out (Budget only).
    std::optional<Value> budget_at;
};

/// Runs find_avoiding_coloring on [lo..N] for N = lo, lo+1, ... up to n_max
/// and reports where avoidance first fails. The budget applies per N.
inline Boundary min_forced_n(const ConfigTemplate & cfg, unsigned k, Value lo, Value n_max, const SearchOptions & opts = {})
{
    if (n_max < lo)
        throw DomainError("need n_max >= lo");
    Boundary b;
    for (Value n = lo; n <= n_max; ++n) {
        auto r = find_avoiding_coloring(cfg, k, lo, n, opts);
        if (r.kind == SearchOutcome::Kind::Budget) {
            b.kind = Boundary::Kind::Budget;
            b.budget_at = n;
            return b;
        }
        if (r.kind == SearchOutcome::Kind::Forced) {
            b.kind = Boundary::Kind::Found;
            b.first_forced = n;
            return b;
        }
        b.last_avoidable = n;
        b.witness = std::move(r.witness);
    }
    b.kind = Boundary::Kind::NoBoundary;
    return b;
}

struct Cnf {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    std::vector<std::string> comments;

    std::string dimacs() const
    {
        std::ostringstream os;
        for (auto & c : comments)
            os << "c " << c << '\n';
        os << "p cnf " << num_vars << ' ' << clauses.size() << '\n';
        for (auto & cl : clauses) {
            for (int lit : cl)
                os << lit << ' ';
            os << "0\n";
        }
        return os.str();
    }
};

/// DIMACS encoding with v(n, c) = (n - lo) * k + c + 1: one at-least-one
/// clause and the pairwise at-most-one clauses per position, then one clause
/// per instance and color forbidding that instance in that color. Repeated
/// values inside an instance give a single literal.
inline Cnf export_cnf(const ConfigTemplate & cfg, unsigned k, Value lo, Value hi)
{
    if (k < 1)
        throw DomainError("k must be >= 1");
    if (lo < 1 || hi < lo)
        throw DomainError("need 1 <= lo <= hi");
    auto var = [&](Value n, unsigned c) { return int((n - lo) * k + c + 1); };
    if ((hi - lo + 1) * k > Value(std::numeric_limits<int>::max()))
        throw DomainError("too many CNF variables");

    Cnf cnf;
    cnf.num_vars = int((hi - lo + 1) * k);
    cnf.comments.push_back("partition-regularity instance: " + to_string(cfg));
    cnf.comments.push_back("range " + std::to_string(lo) + ".." + std::to_string(hi) + ", colors " + std::to_string(k));
    cnf.comments.push_back("variable v(n,c) = (n - " + std::to_string(lo) + ") * " + std::to_string(k) + " + c + 1 means n has color c");
    for (Value n = lo; n <= hi; ++n) {
        std::vector<int> alo;
        for (unsigned c = 0; c < k; ++c)
            alo.push_back(var(n, c));
        cnf.clauses.push_back(std::move(alo));
        for (unsigned c = 0; c < k; ++c)
            for (unsigned d = c + 1; d < k; ++d)
                cnf.clauses.push_back({-var(n, c), -var(n, d)});
    }
    std::size_t instances = 0;
    std::vector<Value> vals;
    for_each_instance(cfg, lo, hi, [&](const Value *, const Value * terms) {
        ++instances;
        vals.assign(terms, terms + cfg.terms.size());
        std::sort(vals.begin(), vals.end());
        vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
        for (unsigned c = 0; c < k; ++c) {
            std::vector<int> cl;
            for (auto v : vals)
                cl.push_back(-var(v, c));
            cnf.clauses.push_back(std::move(cl));
        }
        return true;
    });
    cnf.comments.push_back("instances " + std::to_string(instances));
    return cnf;
}

/// Coloring of [1..floor(log_base hi)] with n colored like base^n.
inline Coloring log_transform(const Coloring & c, Value base)
{
    c.validate();
    if (base < 2)
        throw DomainError("log-transform base must be >= 2");
    if (base < c.lo)
        throw DomainError("log-transform needs base >= lo");
    Coloring out;
    out.lo = 1;
    out.k = c.k;
    Value p = base;
    for (;;) {
        if (p > c.hi)
            break;
        out.colors.push_back(c.color_of(p));
        unsigned __int128 next = static_cast<unsigned __int128>(p) * base;
        if (next > c.hi)
            break;
        p = Value(next);
    }
    if (out.colors.empty())
        throw DomainError("log-transform range is empty");
    out.hi = out.colors.size();
    return out;
}

} // namespace uexp::pr
