#pragma once

// JSON encodings shared by the command-line tool: traces, colorings,
// instances and integer sets. Naturals that fit in 64 bits are JSON numbers;
// larger ones are decimal strings.

#include <uexp/expip.hpp>
#include <uexp/prove.hpp>
#include <uexp/prsearch.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace uexp::io {

using nlohmann::json;

/// Malformed input document (bad JSON, wrong shape, unreadable file).
class DataError : public Error {
public:
    using Error::Error;
};

inline json nat_json(const BigNat & n)
{
    if (n <= BigNat(std::numeric_limits<std::uint64_t>::max()))
        return n.convert_to<std::uint64_t>();
    return n.str();
}

inline BigNat nat_from_json(const json & j)
{
    if (j.is_number_unsigned())
        return BigNat(j.get<std::uint64_t>());
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
        return BigNat(j.get<std::int64_t>());
    if (j.is_string())
        if (auto v = parse_bignat(j.get<std::string>()))
            return *v;
    throw DataError("expected a natural number, got " + j.dump());
}

inline json trace_json(const Trace & t)
{
    json out = json::array();
    for (auto & s : t)
        out.push_back({{"rule", s.rule}, {"path", s.path}, {"before", to_string(s.before)}, {"after", to_string(s.after)}});
    return out;
}

inline json refutation_json(const Refutation & r)
{
    json b = json::object();
    for (auto & [k, v] : r.bindings)
        b[k] = to_string(v);
    json out {{"oracle", r.oracle}, {"bindings", b}};
    if (r.via)
        out["via"] = refutation_json(*r.via);
    return out;
}

inline std::string read_file(const std::string & path)
{
    std::ifstream in(path, std::ios::binary);
    if (! in)
        throw DataError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string & path, const std::string & text)
{
    std::ofstream out(path, std::ios::binary);
    if (! out || ! (out << text))
        throw DataError("cannot write '" + path + "'");
}

inline json parse_json(const std::string & text, const std::string & what)
{
    try {
        return json::parse(text);
    }
    catch (const json::parse_error & e) {
        throw DataError(what + ": " + e.what());
    }
}

inline json coloring_json(const pr::Coloring & c)
{
    return {{"lo", c.lo}, {"hi", c.hi}, {"k", c.k}, {"colors", c.colors}};
}

inline pr::Coloring coloring_from_json(const json & j)
{
    try {
        pr::Coloring c;
        c.lo = j.at("lo").get<pr::Value>();
        c.hi = j.at("hi").get<pr::Value>();
        c.k = j.at("k").get<unsigned>();
        c.colors = j.at("colors").get<std::vector<unsigned>>();
        c.validate();
        return c;
    }
    catch (const json::exception & e) {
        throw DataError(std::string("coloring: ") + e.what());
    }
    catch (const DomainError & e) {
        throw DataError(std::string("coloring: ") + e.what());
    }
}

inline json instance_json(const pr::Instance & inst)
{
    json b = json::object();
    for (auto & [name, v] : inst.binding)
        b[name] = v;
    return {{"binding", b}, {"term_values", inst.term_values}};
}

/// `interval:a..b`, `powers:B[:K]`, or a JSON array of naturals.
inline expip::IntSet set_from_text(const std::string & text)
{
    std::string t = text;
    t.erase(0, t.find_first_not_of(" \t\r\n"));
    t.erase(t.find_last_not_of(" \t\r\n") + 1);
    try {
        if (auto s = expip::parse_set_shorthand(t))
            return *s;
    }
    catch (const DomainError & e) {
        throw DataError(std::string("set: ") + e.what());
    }
    auto j = parse_json(t, "set");
    if (! j.is_array())
        throw DataError("set must be a JSON array or a shorthand");
    std::vector<BigNat> xs;
    for (auto & e : j)
        xs.push_back(nat_from_json(e));
    try {
        return expip::IntSet::explicit_set(std::move(xs));
    }
    catch (const DomainError & e) {
        throw DataError(std::string("set: ") + e.what());
    }
}

} // namespace uexp::io
