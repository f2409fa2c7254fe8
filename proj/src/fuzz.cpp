#include "stacl/fuzz.hpp"

#include "stacl/diagram.hpp"
#include "stacl/generator.hpp"
#include "stacl/parser.hpp"
#include "stacl/semantics.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace stacl {

using json = nlohmann::json;

std::size_t Rng::below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: empty range");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do x = eng_();
    while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

int Rng::between(int lo, int hi) {
    if (hi < lo) throw std::invalid_argument("Rng::between: empty range");
    return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo) + 1));
}

bool Rng::chance(const Rational& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    auto den = p.get_den().get_ui();
    return below(den) < p.get_num().get_ui();
}

void FuzzConfig::check() const {
    if (domain_size < 2 || domain_size > 3) throw std::invalid_argument("domain_size must be 2 or 3");
    if (var_count < 1 || var_count > 6) throw std::invalid_argument("var_count must be in 1..6");
    if (name_count < 0 || name_count > 6) throw std::invalid_argument("name_count must be in 0..6");
    if (denominator_bound < domain_size) throw std::invalid_argument("denominator_bound must be at least domain_size");
    for (const auto* p : {&edge_probability, &positive_probability, &degenerate_row, &constant_function})
        if (*p < 0 || *p > 1) throw std::invalid_argument("probabilities must lie in [0, 1]");
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
}

namespace {

[[noreturn]] void skip(const std::string& why) { throw std::invalid_argument(why); }

std::vector<Rational> random_dist(Rng& r, int d, int bound, bool positive) {
    int den = r.between(positive ? d : 1, bound);
    std::vector<int> units(static_cast<std::size_t>(d), positive ? 1 : 0);
    for (int i = positive ? d : 0; i < den; ++i) ++units[r.below(static_cast<std::size_t>(d))];
    std::vector<Rational> out;
    for (int u : units) {
        Rational q(u, den);
        q.canonicalize();
        out.push_back(q);
    }
    return out;
}

std::vector<Rational> point_row(int d, int at) {
    std::vector<Rational> out(static_cast<std::size_t>(d), Rational(0));
    out[static_cast<std::size_t>(at)] = 1;
    return out;
}

json row_json(const std::vector<Rational>& row) {
    json out = json::array();
    for (const auto& q : row) out.push_back(q.get_str() + (q.get_den() == 1 ? "/1" : ""));
    return out;
}

}  // namespace

Model random_model(const FuzzConfig& cfg, std::uint64_t seed) {
    cfg.check();
    Rng r(seed);
    const int d = r.between(2, cfg.domain_size);
    const int n = cfg.var_count <= 2 ? cfg.var_count : r.between(2, cfg.var_count);
    const int k = cfg.name_count == 0 ? 0 : r.between(1, cfg.name_count);
    const bool positive = r.chance(cfg.positive_probability);

    json doc;
    doc["id"] = "w" + std::to_string(seed % 1000000);
    doc["domain_size"] = d;
    doc["names"] = json::object();
    doc["constants"] = json::object();
    doc["functions"] = json::object();
    doc["generator"] = json::object();
    std::vector<std::string> names;
    for (int i = 1; i <= k; ++i) {
        names.push_back("n" + std::to_string(i));
        doc["names"][names.back()] = row_json(random_dist(r, d, cfg.denominator_bound, positive));
    }
    for (int i = 0; i < d; ++i) doc["constants"]["c" + std::to_string(i)] = i;

    std::vector<std::string> order;
    for (int i = 1; i <= n; ++i) order.push_back("v" + std::to_string(i));
    r.shuffle(order);
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto& v = order[j];
        std::vector<std::string> args;
        for (std::size_t i = 0; i < j; ++i)
            if (r.chance(cfg.edge_probability)) args.push_back(order[i]);
        std::sort(args.begin(), args.end());
        if (!names.empty() && r.chance(Rational(3, 4))) args.push_back(r.pick(names));
        if (args.empty()) {
            bool constant = names.empty() || (!positive && r.chance(Rational(1, 5)));
            doc["generator"][v] = constant ? "c" + std::to_string(r.below(static_cast<std::size_t>(d)))
                                           : r.pick(names);
            continue;
        }
        if (args.size() == 1 && args[0][0] == 'n' && r.chance(Rational(1, 3))) {
            doc["generator"][v] = args[0];
            continue;
        }
        std::string f = "f" + v, call = f + "(";
        for (std::size_t i = 0; i < args.size(); ++i) call += (i ? ", " : "") + args[i];
        doc["generator"][v] = call + ")";
        json table = json::object();
        const bool flat = !positive && r.chance(cfg.constant_function);
        const int flat_at = static_cast<int>(r.below(static_cast<std::size_t>(d)));
        std::vector<int> row(args.size(), 0);
        while (true) {
            std::string key;
            for (std::size_t i = 0; i < row.size(); ++i) key += (i ? "," : "") + std::to_string(row[i]);
            std::vector<Rational> dist;
            if (flat) dist = point_row(d, flat_at);
            else if (!positive && r.chance(cfg.degenerate_row))
                dist = point_row(d, static_cast<int>(r.below(static_cast<std::size_t>(d))));
            else dist = random_dist(r, d, cfg.denominator_bound, positive);
            table[key] = row_json(dist);
            std::size_t i = row.size();
            while (i > 0 && ++row[i - 1] == d) row[--i] = 0;
            if (i == 0) break;
        }
        doc["functions"][f] = {{"arity", args.size()}, {"table", table}};
    }
    return model_from_json(doc);
}

json FuzzReport::to_json() const {
    json j;
    j["schema"] = schema;
    j["expect"] = expect_valid ? "valid" : "invalid";
    j["trials"] = trials;
    j["non_vacuous"] = non_vacuous;
    j["violations"] = violations;
    j["incomplete"] = incomplete;
    j["ok"] = ok();
    if (first) j["counterexample"] = counterexample_to_json(*first);
    return j;
}

json counterexample_to_json(const Counterexample& c) {
    json j;
    j["model"] = c.model;
    j["generator"] = c.generator;
    j["bindings"] = c.bindings;
    j["formula"] = c.formula;
    return j;
}

Counterexample counterexample_from_json(const json& j) {
    Counterexample c;
    try {
        c.model = j.at("model");
        c.generator = j.at("generator").get<std::string>();
        c.bindings = j.at("bindings").get<Bindings>();
        c.formula = j.at("formula").get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("counterexample: ") + e.what());
    }
    return c;
}

namespace {

// ---------------------------------------------------------------------------
// Binding samplers.

std::string text(const VarTuple& v) { return to_string(v); }

std::vector<Assign> parse_a(const std::string& s) { return make_assigns(parse_assigns(s)); }

Intervention iv_of(const std::string& a, bool lazy) { return Intervention{lazy, parse_a(a)}; }

World world_at(const std::shared_ptr<const Model>& m, const GenRef& g) {
    World w(m);
    for (const auto& s : g.steps) w = w.intervened(s);
    return w;
}

class Ctx {
public:
    Ctx(Rng& r, std::shared_ptr<const Model> m, GenRef j)
        : rng(r), model(std::move(m)), J(std::move(j)), gJ(apply_steps(model->gen, J)), dJ(gJ) {
        vars = model->gen.defined_vars();
        for (const auto& [n, p] : model->interp.names) names.push_back(n);
        for (const auto& [f, t] : model->interp.functions) fsyms.push_back(f);
        d = model->interp.domain;
    }

    Rng& rng;
    std::shared_ptr<const Model> model;
    GenRef J;
    DataGenerator gJ;
    Diagram dJ;
    std::vector<std::string> vars, names, fsyms;
    int d = 2;

    bool coin() { return rng.below(2) == 0; }
    bool often() { return rng.below(4) != 0; }

    // Disjoint tuples with at least mins[i] variables each.
    std::vector<VarTuple> parts(const std::vector<int>& mins) {
        int need = 0;
        for (int m : mins) need += m;
        if (need > static_cast<int>(vars.size())) skip("not enough variables");
        auto pool = vars;
        rng.shuffle(pool);
        std::vector<std::vector<std::string>> out(mins.size());
        std::size_t next = 0;
        for (std::size_t i = 0; i < mins.size(); ++i)
            for (int k = 0; k < mins[i]; ++k) out[i].push_back(pool[next++]);
        for (; next < pool.size(); ++next)
            if (coin()) out[rng.below(out.size())].push_back(pool[next]);
        std::vector<VarTuple> res;
        for (auto& o : out) res.emplace_back(o);
        return res;
    }
    VarTuple some() { return parts({1})[0]; }
    VarTuple subset_of(const VarTuple& x, bool nonempty) {
        std::vector<std::string> out;
        for (const auto& v : x.vars())
            if (coin()) out.push_back(v);
        if (nonempty && out.empty() && !x.empty()) out.push_back(x.vars()[rng.below(x.size())]);
        return VarTuple(out);
    }

    std::string cst() { return "c" + std::to_string(rng.below(static_cast<std::size_t>(d))); }
    std::string consts(std::size_t k) {
        if (k == 1) return cst();
        std::string s = "tuple(";
        for (std::size_t i = 0; i < k; ++i) s += (i ? ", " : "") + cst();
        return s + ")";
    }
    std::string assign(const VarTuple& x) {
        std::string s;
        for (const auto& v : x.vars()) s += (s.empty() ? "" : ",") + v + ":=" + cst();
        return s;
    }
    // Assignment using the values of deterministic variables in the world at g when available.
    std::string assign_likely(const VarTuple& x, const GenRef& g) {
        try {
            auto dist = world_at(model, g).marginal(x);
            if (dist.size() == 1 && often()) {
                const auto& vals = dist.begin()->first;
                std::string s;
                for (std::size_t i = 0; i < x.size(); ++i)
                    s += (s.empty() ? "" : ",") + x.vars()[i] + ":=c" + std::to_string(vals[i]);
                return s;
            }
        } catch (const std::invalid_argument&) {
        }
        return assign(x);
    }

    GenRef step(const GenRef& g, const std::string& a, bool lazy) const {
        return a.empty() ? g : g.then(iv_of(a, lazy));
    }
    std::string gen() {
        switch (rng.below(4)) {
        case 0:
            return to_string(J);
        case 1:
            return model->gen.id;
        default:
            return to_string(GenRef{model->gen.id, {}}.then(iv_of(assign(some()), coin())));
        }
    }
    std::string cond_text(const VarTuple& y, const VarTuple& z, const VarTuple& x, const std::string& vals = "") {
        CondVar cv{y, z, x, {}};
        auto fixed = vals.empty() ? std::vector<Assign>{} : parse_a(vals);
        if (vals.empty())
            for (std::size_t i = 0; i < x.size(); ++i) cv.vals.push_back(Const{cst()});
        else
            for (const auto& a : fixed) cv.vals.push_back(a.value);
        return to_string(KernelRef::cond(cv));
    }
    std::string cond_random() {
        auto p = parts({1, 0, 0});
        return cond_text(p[0], p[1], coin() ? VarTuple() : p[2]);
    }
    std::string canon(const std::string& g, const std::string& cond) { return "#f(" + g + "; " + cond + ")"; }
    std::string kernel() {
        switch (rng.below(3)) {
        case 0:
            if (!fsyms.empty()) return rng.pick(fsyms);
            [[fallthrough]];
        case 1:
            return canon(gen(), cond_random());
        default:
            return cond_random();
        }
    }
    std::string function_symbol() {
        if (!fsyms.empty() && coin()) return rng.pick(fsyms);
        return canon(gen(), cond_random());
    }
    std::string name() {
        if (names.empty() || coin()) return "#n(" + gen() + "; " + text(some()) + ")";
        return rng.pick(names);
    }

    // Application of a model function symbol to arguments of the right arity.
    std::string app(bool rigid) {
        if (fsyms.empty()) skip("no function symbols");
        const auto& f = rng.pick(fsyms);
        int arity = model->interp.functions.at(f).arity;
        std::string s = f + "(";
        for (int i = 0; i < arity; ++i) {
            std::string a;
            if (!rigid && coin()) a = text(VarTuple::single(rng.pick(vars)));
            else if (!names.empty() && coin()) a = rng.pick(names);
            else a = cst();
            s += (i ? ", " : "") + a;
        }
        return s + ")";
    }
    std::string term(int depth = 1) {
        switch (rng.below(depth > 0 ? 9 : 4)) {
        case 0:
            return text(some());
        case 1:
            return names.empty() ? cst() : rng.pick(names);
        case 2:
            return cst();
        case 3:
            return "#n(" + gen() + "; " + text(some()) + ")";
        case 4: {
            auto x = some();
            return "margin(" + text(x) + "; " + text(subset_of(x, true)) + ")";
        }
        case 5:
            return app(false);
        case 6: {
            auto p = parts({1, 1});
            auto t = coin() ? text(p[1]) : "#n(" + gen() + "; " + text(p[1]) + ")";
            return cond_text(p[0], p[1], VarTuple()) + "(" + t + ")";
        }
        case 7:
            return "tuple(" + term(depth - 1) + ", " + term(depth - 1) + ")";
        default:
            return "margin(" + term(depth - 1) + "; " + text(some()) + ")";
        }
    }
    std::string rigid_term() {
        switch (rng.below(5)) {
        case 0:
            return names.empty() ? cst() : rng.pick(names);
        case 1:
            return cst();
        case 2:
            return "#n(" + gen() + "; " + text(some()) + ")";
        case 3:
            return app(true);
        default: {
            auto x = some();
            return "margin(#n(" + gen() + "; " + text(x) + "); " + text(subset_of(x, true)) + ")";
        }
        }
    }
    std::string cpred() {
        static const std::vector<std::string> preds{"pa", "npa", "anc", "nanc", "allnanc", "dsep"};
        const auto& p = rng.pick(preds);
        if (p == "dsep") {
            auto t = parts({1, 1, 0});
            return "dsep(" + text(t[0]) + "; " + text(t[1]) + "; " + text(t[2]) + ")";
        }
        if (p == "allnanc") {
            auto t = parts({0, 1, 1});
            return "allnanc(" + text(t[0]) + "; " + text(t[1]) + "; " + text(t[2]) + ")";
        }
        auto t = parts({0, 1});
        return p + "(" + text(t[0]) + "; " + text(t[1]) + ")";
    }
    std::string atom() {
        switch (rng.below(8)) {
        case 0:
            return "pos(" + text(some()) + ")";
        case 1:
            return term() + " == " + term();
        case 2: {
            auto x = some();
            return text(x) + " == #n(" + gen() + "; " + text(x) + ")";
        }
        case 3:
        case 4:
            return cpred();
        case 5:
            return kernel() + " == " + kernel();
        case 6: {
            auto c = cond_random();
            return canon(gen(), c) + " == " + c;
        }
        default: {
            auto x = some();
            return text(x) + " == " + consts(x.size());
        }
        }
    }
    std::string formula(int depth) {
        if (depth <= 0 || rng.below(3) == 0) return atom();
        switch (rng.below(5)) {
        case 0:
            return "!(" + formula(depth - 1) + ")";
        case 1:
            return "(" + formula(depth - 1) + ") & (" + formula(depth - 1) + ")";
        case 2:
            return "(" + formula(depth - 1) + ") -> (" + formula(depth - 1) + ")";
        default:
            return "[" + assign(some()) + "]" + (coin() ? "E" : "L") + " (" + formula(depth - 1) + ")";
        }
    }

    // Boolean combination of template atoms; '@' marks replaceable positions.
    std::string combine(const std::function<std::string()>& atom_fn, int depth) {
        if (depth <= 0 || rng.below(3) == 0) return atom_fn();
        switch (rng.below(3)) {
        case 0:
            return "!(" + combine(atom_fn, depth - 1) + ")";
        default:
            return "(" + combine(atom_fn, depth - 1) + ") & (" + combine(atom_fn, depth - 1) + ")";
        }
    }
};

std::string fill(const std::string& tpl, const std::function<std::string()>& each) {
    std::string out;
    for (char c : tpl) {
        if (c == '@') out += each();
        else out += c;
    }
    return out;
}

Bindings sample_eq2(Ctx& c) {
    Bindings b;
    std::string u1, u2;
    std::function<std::string()> atom;
    switch (c.rng.below(3)) {
    case 0: {
        switch (c.rng.below(4)) {
        case 0: {
            auto x = c.some();
            u1 = text(x);
            u2 = "#n(" + to_string(c.J) + "; " + text(x) + ")";
            break;
        }
        case 1: {
            auto x = c.some();
            u1 = "margin(" + text(x) + "; " + text(c.subset_of(x, true)) + ")";
            u2 = text(parse_term(u1)->vars);
            break;
        }
        case 2:
            u1 = c.rigid_term();
            u2 = c.coin() ? u1 : c.rigid_term();
            break;
        default:
            u1 = c.term();
            u2 = c.term();
        }
        if (c.coin()) std::swap(u1, u2);
        b["u1"] = u1;
        b["u2"] = u2;
        atom = [&c, u1, u2]() -> std::string {
            std::string other = c.rng.below(3) == 0 ? c.term() : (c.coin() ? u1 : u2);
            switch (c.rng.below(6)) {
            case 0:
                return "@ == " + other;
            case 1:
                return other + " == @";
            case 2:
                return "margin(@; " + text(c.some()) + ") == " + other;
            case 3:
                return "tuple(@) == " + other;
            case 4:
                return "[" + c.assign(c.some()) + "]E (@ == " + other + ")";
            default:
                return c.atom();
            }
        };
        break;
    }
    case 1: {
        // Function symbols: two plain symbols, or two canonical ones with the same labels.
        if (!c.fsyms.empty() && c.coin()) {
            u1 = c.rng.pick(c.fsyms);
            u2 = c.coin() ? u1 : c.rng.pick(c.fsyms);
        } else {
            auto p = c.parts({1, 0, 0});
            u1 = c.canon(c.gen(), c.cond_text(p[0], p[1], p[2]));
            u2 = c.canon(c.gen(), c.cond_text(p[0], p[1], c.coin() ? p[2] : VarTuple()));
        }
        b["k1"] = u1;
        b["k2"] = u2;
        atom = [&c, u1, u2]() -> std::string {
            std::string other = c.rng.below(3) == 0 ? c.kernel() : (c.coin() ? u1 : u2);
            switch (c.rng.below(4)) {
            case 0:
                return "@ == " + other;
            case 1:
                return other + " == @";
            case 2:
                return "[" + c.assign(c.some()) + "]L (@ == " + other + ")";
            default:
                return c.atom();
            }
        };
        break;
    }
    default: {
        // Conditional variables with the same target and given variables.
        auto p = c.parts({1, 0, 1});
        auto x2 = c.subset_of(p[2], false);
        u1 = c.cond_text(p[0], p[1], p[2]);
        u2 = c.cond_text(p[0], p[1], x2);
        if (c.coin()) std::swap(u1, u2);
        b["k1"] = u1;
        b["k2"] = u2;
        atom = [&c, u1, u2, p]() -> std::string {
            switch (c.rng.below(5)) {
            case 0:
                return c.canon(to_string(c.J), u1) + " == @";
            case 1:
                return "@ == " + c.canon(c.gen(), c.cond_text(p[0], p[1], p[2]));
            case 2:
                return "@ == " + (c.fsyms.empty() ? u1 : c.rng.pick(c.fsyms));
            case 3:
                return "@ == @";
            default:
                return c.atom();
            }
        };
    }
    }
    auto tpl = c.combine(atom, 2);
    b["phi1"] = fill(tpl, [&] { return u1; });
    b["phi2"] = fill(tpl, [&] { return c.coin() ? u1 : u2; });
    return b;
}

// Template atoms over the conditional variable K = y|z for Do1-Do3.
std::string cond_atom(Ctx& c, const std::string& K, const VarTuple& y, const VarTuple& z, const VarTuple& x,
                      const std::string& xv, bool rigid_only) {
    auto G = c.gen();
    switch (c.rng.below(rigid_only ? 6 : 8)) {
    case 0:
        return c.canon(G, K) + " == " + K;
    case 1:
        return K + " == " + c.canon(G, c.cond_text(y, z, x, xv));
    case 2:
        return (c.fsyms.empty() ? K : c.rng.pick(c.fsyms)) + " == " + K;
    case 3:
        return K + " == " + K;
    case 4:
        return c.rigid_term() + " == margin(" + K + "(#n(" + G + "; " + text(z) + ")); " + text(y) + ")";
    case 5:
        return c.rigid_term() + " == " + c.rigid_term();
    case 6:
        return K + " == " + c.cond_text(y, merge_tuples(z, x), VarTuple());
    default:
        return c.atom();
    }
}

using Sampler = std::function<Bindings(Ctx&)>;

const std::map<std::string, Sampler>& samplers() {
    static const std::map<std::string, Sampler> table = [] {
        std::map<std::string, Sampler> t;
        auto J = [](Ctx& c) { return to_string(c.J); };
        t["Eq1"] = [](Ctx& c) { return c.coin() ? Bindings{{"u", c.term()}} : Bindings{{"k", c.kernel()}}; };
        t["Eq2"] = sample_eq2;
        t["EqN"] = [](Ctx& c) { return Bindings{{"x", text(c.some())}}; };
        t["EqF"] = [](Ctx& c) { return Bindings{{"k", c.cond_random()}}; };
        t["PD"] = [J](Ctx& c) {
            auto p = c.parts({1, 1});
            auto G = c.often() ? J(c) : c.gen();
            return Bindings{{"x", text(p[0])},
                            {"y", text(p[1])},
                            {"f", c.canon(G, c.cond_text(p[1], p[0], VarTuple()))},
                            {"n0", c.often() ? "#n(" + J(c) + "; " + text(p[0]) + ")" : c.name()},
                            {"n1", c.often() ? "#n(" + J(c) + "; " + text(merge_tuples(p[0], p[1])) + ")" : c.name()}};
        };
        t["MPD"] = [](Ctx& c) {
            auto x = c.some();
            return Bindings{{"x1", text(x)}, {"x2", text(c.subset_of(x, true))}};
        };
        t["Effect_EI"] = [](Ctx& c) { return Bindings{{"a", c.assign(c.some())}}; };
        t["Eq_EI"] = [](Ctx& c) {
            auto u1 = c.rigid_term();
            return Bindings{{"u1", u1}, {"u2", c.coin() ? u1 : c.rigid_term()}, {"a", c.assign(c.some())}};
        };
        for (const char* r : {"Split_EI", "Split_LI"})
            t[r] = [](Ctx& c) {
                auto p = c.parts({1, 1});
                return Bindings{{"a1", c.assign(p[0])}, {"a2", c.assign(p[1])}, {"phi", c.formula(2)}};
            };
        t["Simul_EI"] = [](Ctx& c) {
            return Bindings{{"a1", c.assign(c.some())}, {"a2", c.assign(c.some())}, {"phi", c.formula(2)}};
        };
        t["Simul_LI"] = t["Split_EI"];
        for (const char* r : {"Rpt_EI", "Rpt_LI", "DistrEI_not", "DistrLI_not"})
            t[r] = [](Ctx& c) { return Bindings{{"a", c.assign(c.some())}, {"phi", c.formula(2)}}; };
        for (const char* r : {"DistrEI_and", "DistrLI_and"})
            t[r] = [](Ctx& c) {
                return Bindings{{"a", c.assign(c.some())}, {"phi1", c.formula(2)}, {"phi2", c.formula(2)}};
            };
        for (bool lazy : {false, true})
            t[lazy ? "Cmp_LI" : "Cmp_EI"] = [lazy](Ctx& c) {
                auto p = c.parts({1, 1, 1});
                auto a1 = c.assign(p[0]);
                auto g1 = c.step(c.J, a1, lazy);
                auto u = c.often() ? "#n(" + to_string(g1) + "; " + text(p[2]) + ")" : c.term();
                return Bindings{{"a1", a1}, {"a2", c.assign_likely(p[1], g1)}, {"x3", text(p[2])}, {"u", u}};
            };
        t["Effect_LI"] = [J](Ctx& c) {
            auto x = c.some();
            return Bindings{{"a", c.assign(x)}, {"u", c.often() ? "#n(" + J(c) + "; " + text(x) + ")" : c.rigid_term()}};
        };
        t["Cond_LI"] = [J](Ctx& c) {
            auto p = c.parts({1, 1, 0});
            auto a = c.assign(p[0]);
            auto f = c.often() ? c.canon(J(c), c.cond_text(p[1], p[2], p[0], a)) : c.function_symbol();
            return Bindings{{"a", a}, {"f", f}, {"y", text(p[1])}, {"z", text(p[2])}};
        };
        t["Expd_EILI"] = [](Ctx& c) {
            auto p = c.parts({1, 1});
            auto a = c.assign(p[0]);
            auto n = c.often() ? "#n(" + to_string(c.step(c.J, a, c.coin())) + "; " + text(p[1]) + ")" : c.name();
            return Bindings{{"a", a}, {"n", n}, {"y", text(p[1])}};
        };
        t["Excd_EILI"] = [](Ctx& c) {
            auto p = c.parts({1, 1, 0});
            auto a = c.assign(p[0]);
            auto f = c.often() ? c.canon(to_string(c.step(c.J, a, c.coin())), c.cond_text(p[1], p[2], VarTuple()))
                               : c.function_symbol();
            return Bindings{{"a", a}, {"f", f}, {"y", text(p[1])}, {"z", text(p[2])}};
        };
        auto xyz = [](Ctx& c) {
            auto p = c.parts({1, 1, 0});
            return Bindings{{"x", text(p[0])}, {"y", text(p[1])}, {"z", text(p[2])}};
        };
        for (const char* r : {"DsepCInd1", "DsepSm", "Nanc5", "DsepDG"}) t[r] = xyz;
        t["DsepCInd2"] = [](Ctx& c) {
            auto p = c.parts({1, 1, 0});
            return Bindings{{"a", c.assign(p[0])}, {"y", text(p[1])}, {"z", text(p[2])}};
        };
        t["Dsep_EI2"] = t["Dsep_LI2"] = t["DsepCInd2"];
        for (const char* r : {"DsepDc", "DsepWu", "DsepCn"}) {
            std::string extra = std::string(r) == "DsepDc" ? "y2" : "v";
            t[r] = [extra](Ctx& c) {
                auto p = c.parts({1, 1, 1, 0});
                return Bindings{{"x", text(p[0])}, {"y", text(p[1])}, {extra, text(p[2])}, {"z", text(p[3])}};
            };
        }
        t["Dsep_EI1"] = [](Ctx& c) {
            // z must have no parents, so draw it from the roots of the path graph.
            std::vector<std::string> roots, rest;
            for (const auto& v : c.vars)
                (c.dJ.parents_of(c.dJ.index_of(v)).empty() ? roots : rest).push_back(v);
            if (roots.empty() || rest.size() < 2) skip("no parentless variables");
            c.rng.shuffle(roots);
            c.rng.shuffle(rest);
            std::vector<std::string> z{roots[0]}, x{rest[0]}, y{rest[1]};
            for (std::size_t i = 1; i < roots.size(); ++i) (c.coin() ? z : rest).push_back(roots[i]);
            for (std::size_t i = 2; i < rest.size(); ++i)
                if (!c.often()) (c.coin() ? x : y).push_back(rest[i]);
            return Bindings{{"x", text(VarTuple(x))}, {"y", text(VarTuple(y))}, {"a", c.assign(VarTuple(z))}};
        };
        for (const char* r : {"Dsep_LI1"})
            t[r] = [](Ctx& c) {
                auto p = c.parts({1, 1, 1});
                return Bindings{{"x", text(p[0])}, {"y", text(p[1])}, {"a", c.assign(p[2])}};
            };
        t["Dsep_LI3"] = [](Ctx& c) {
            auto p = c.parts({1, 1, 1, 0});
            return Bindings{{"x", text(p[0])}, {"y", text(p[1])}, {"a", c.assign(p[2])}, {"z2", text(p[3])}};
        };
        t["Nanc1"] = [J](Ctx& c) {
            auto p = c.parts({1, 1});
            auto a = c.assign(p[0]);
            auto n = c.often() ? "#n(" + (c.coin() ? J(c) : to_string(c.step(c.J, a, false))) + "; " + text(p[1]) + ")"
                               : c.name();
            return Bindings{{"a", a}, {"n", n}, {"y", text(p[1])}};
        };
        t["Nanc2"] = [J](Ctx& c) {
            auto p = c.parts({1, 1, 0});
            auto a = c.assign(p[0]);
            auto G = c.coin() ? J(c) : to_string(c.step(c.J, a, false));
            auto f = c.often() ? c.canon(G, c.cond_text(p[1], p[2], VarTuple())) : c.function_symbol();
            return Bindings{{"a", a}, {"f", f}, {"y", text(p[1])}, {"z", text(p[2])}};
        };
        for (const char* r : {"Nanc3", "Nanc4"})
            t[r] = [](Ctx& c) {
                auto p = c.parts({1, 1});
                return Bindings{{"a", c.assign(p[0])}, {"y", text(p[1])}};
            };
        t["AllNanc"] = [](Ctx& c) {
            auto p = c.parts({1, 1});
            auto x = c.often() ? p[0].minus(c.dJ.ancestors(p[1])) : c.subset_of(p[0], false);
            return Bindings{{"x", text(x)}, {"y", text(p[0])}, {"z", text(p[1])}};
        };
        t["PaToNanc"] = [](Ctx& c) {
            auto y = c.some();
            auto x = c.often() ? c.dJ.parents(y) : c.some();
            return Bindings{{"x", text(x)}, {"y", text(y)}};
        };
        t["PaDG"] = t["PaToNanc"];
        t["NancDG"] = [](Ctx& c) {
            auto p = c.parts({1, 1});
            return Bindings{{"x", text(p[0])}, {"y", text(p[1])}};
        };
        t["PaToDsep"] = [](Ctx& c) {
            auto x = c.some();
            auto z = c.often() ? c.dJ.parents(x) : c.some();
            std::vector<std::string> rest;
            for (const auto& v : c.vars)
                if (!x.contains(v) && !z.contains(v) && c.coin()) rest.push_back(v);
            if (rest.empty()) skip("no room for y");
            return Bindings{{"z", text(z)}, {"a", c.assign(x)}, {"y", text(VarTuple(rest))}};
        };
        t["DG_Eq"] = [](Ctx& c) { return Bindings{{"x", text(VarTuple::single(c.rng.pick(c.vars)))}}; };
        for (const char* r : {"DG_EI", "DG_LI"})
            t[r] = [](Ctx& c) { return Bindings{{"a", c.assign(c.some())}, {"phi", c.formula(2)}}; };
        t["Do1"] = [](Ctx& c) {
            auto p = c.parts({1, 1, 0, 0});
            auto K = c.cond_text(p[1], p[2], VarTuple());
            Bindings b{{"x", text(p[0])}, {"y", text(p[1])}, {"z", text(p[2])}};
            if (!p[3].empty() && c.coin()) b["v"] = c.assign(p[3]);
            b["phi0"] = c.combine([&] { return cond_atom(c, K, p[1], p[2], p[0], "", false); }, 2);
            std::string occ;
            for (int i = 0; i < 3; ++i)
                if (c.coin()) occ += (occ.empty() ? "" : ",") + std::to_string(i);
            b["occ"] = occ;
            return b;
        };
        t["Do2"] = [](Ctx& c) {
            auto p = c.parts({1, 1, 0, 0});
            auto K = c.cond_text(p[1], p[2], VarTuple());
            auto a = c.assign(p[0]);
            Bindings b{{"x", a}, {"y", text(p[1])}, {"z", text(p[2])}};
            if (!p[3].empty() && c.coin()) b["v"] = c.assign(p[3]);
            b["phi0"] = c.combine([&] { return cond_atom(c, K, p[1], p[2], p[0], a, true); }, 2);
            return b;
        };
        t["Do3"] = [](Ctx& c) {
            auto p = c.parts({1, 1, 0, 0});
            Bindings b{{"y", text(p[1])}, {"z", text(p[2])}};
            std::string v;
            if (!p[3].empty() && c.coin()) b["v"] = v = c.assign(p[3]);
            Diagram dv(apply_steps(c.model->gen, c.step(c.J, v, false)));
            auto x1 = c.often() ? p[0].minus(dv.ancestors(p[1])) : c.subset_of(p[0], false);
            auto x2 = p[0].minus(x1);
            if (!x1.empty()) b["x1"] = c.assign(x1);
            if (!x2.empty()) b["x2"] = c.assign(x2);
            auto K = c.cond_text(p[1], p[2], VarTuple());
            b["phi"] = c.combine(
                [&] {
                    if (p[2].empty() && c.rng.below(3) == 0)
                        return text(p[1]) + " == " + c.rigid_term();
                    return cond_atom(c, K, p[1], p[2], p[0], "", true);
                },
                2);
            return b;
        };
        t["Unq"] = [](Ctx& c) {
            auto x = c.some(), y = c.some();
            auto a = c.assign(x);
            auto d1 = c.consts(y.size()), d2 = c.consts(y.size());
            try {
                auto dist = world_at(c.model, c.step(c.J, a, false)).marginal(y);
                if (dist.size() == 1 && c.often()) {
                    const auto& vals = dist.begin()->first;
                    d1 = vals.size() == 1 ? "c" + std::to_string(vals[0]) : "tuple(";
                    if (vals.size() > 1) {
                        for (std::size_t i = 0; i < vals.size(); ++i) d1 += (i ? ", c" : "c") + std::to_string(vals[i]);
                        d1 += ")";
                    }
                }
            } catch (const std::invalid_argument&) {
            }
            return Bindings{{"a", a}, {"y", text(y)}, {"d", d1}, {"d2", d2}};
        };

        // Invalid schemas.
        auto det = [](Ctx& c, const VarTuple& x, const GenRef& g) { return c.assign_likely(x, g); };
        t["StrengthenedIntervention"] = [](Ctx& c) {
            auto p = c.parts({1, 1});
            return Bindings{{"a1", c.assign(p[0])}, {"a2", c.assign(p[1])}, {"phi", c.formula(1)}};
        };
        for (const char* r : {"PseudoTransitivity", "WeakPseudoTransitivity", "PseudoContraposition"})
            t[r] = [det, r](Ctx& c) {
                auto p = c.parts({1, 1});
                auto a = c.assign(p[0]);
                Bindings b{{"a", a}, {"b", det(c, p[1], c.step(c.J, a, false))}};
                if (std::string(r) != "PseudoContraposition") b["phi"] = c.formula(1);
                return b;
            };
        for (const char* r : {"ConjunctionAsIntervention", "PseudoModusPonens", "PseudoModusTollens"})
            t[r] = [det](Ctx& c) { return Bindings{{"a", det(c, c.some(), c.J)}, {"phi", c.formula(1)}}; };
        return t;
    }();
    return table;
}

// Instances of the schemas that are not axioms of the calculus.
FormulaP extra_schema(const std::string& name, const Bindings& b) {
    auto get = [&](const std::string& k) -> const std::string& {
        auto it = b.find(k);
        if (it == b.end()) throw std::invalid_argument("missing binding '" + k + "'");
        return it->second;
    };
    auto E = [](const std::vector<Assign>& a, FormulaP f) { return f_eager(a, std::move(f)); };
    auto vars_of = [](const std::vector<Assign>& a) {
        std::vector<std::string> v;
        for (const auto& x : a) v.push_back(x.var);
        return VarTuple(v);
    };
    auto value_term = [](const std::vector<Assign>& a) {
        if (a.size() == 1) return t_const(a[0].value.id);
        std::vector<TermP> items;
        for (const auto& x : a) items.push_back(t_const(x.value.id));
        return t_tuple(items);
    };
    auto disjoint = [&](const std::vector<Assign>& a, const std::vector<Assign>& c) {
        if (!vars_of(a).disjoint(vars_of(c))) throw std::invalid_argument("assignments overlap");
    };
    auto both = [](const std::vector<Assign>& a, const std::vector<Assign>& c) {
        auto all = a;
        all.insert(all.end(), c.begin(), c.end());
        return make_assigns(all);
    };
    auto check_keys = [&](std::set<std::string> keys) {
        for (const auto& [k, v] : b)
            if (!keys.count(k)) throw std::invalid_argument("unexpected binding '" + k + "'");
    };
    if (name == "Unq") {
        check_keys({"a", "y", "d", "d2"});
        auto a = parse_a(get("a"));
        auto y = t_vars(parse_var_tuple(get("y")));
        auto d1 = parse_term(get("d")), d2 = parse_term(get("d2"));
        auto constant = [](const TermP& t) {
            if (t->kind == Term::Kind::Const) return true;
            return t->kind == Term::Kind::Tuple &&
                   std::all_of(t->args.begin(), t->args.end(),
                               [](const TermP& u) { return u->kind == Term::Kind::Const; });
        };
        auto width = [](const TermP& t) { return t->kind == Term::Kind::Const ? 1 : t->args.size(); };
        if (!constant(d1) || !constant(d2)) throw std::invalid_argument("Unq: d and d2 must be constants");
        if (width(d1) != y->vars.size() || width(d2) != y->vars.size())
            throw std::invalid_argument("Unq: constants must match the width of y");
        if (same_term(d1, d2)) throw std::invalid_argument("Unq: d and d2 must differ");
        return f_imp(E(a, f_eq(y, d1)), E(a, f_not(f_eq(y, d2))));
    }
    if (name == "StrengthenedIntervention") {
        check_keys({"a1", "a2", "phi"});
        auto a1 = parse_a(get("a1")), a2 = parse_a(get("a2"));
        disjoint(a1, a2);
        auto phi = parse_formula(get("phi"));
        return f_imp(E(a1, phi), E(both(a1, a2), phi));
    }
    auto a = parse_a(get("a"));
    auto x_eq_u = f_eq(t_vars(vars_of(a)), value_term(a));
    if (name == "PseudoTransitivity" || name == "WeakPseudoTransitivity" || name == "PseudoContraposition") {
        auto bb = parse_a(get("b"));
        disjoint(a, bb);
        auto y_eq_d = f_eq(t_vars(vars_of(bb)), value_term(bb));
        if (name == "PseudoContraposition") {
            check_keys({"a", "b"});
            return f_imp(E(a, f_eq(value_term(bb), t_vars(vars_of(bb)))), E(bb, x_eq_u));
        }
        check_keys({"a", "b", "phi"});
        auto phi = parse_formula(get("phi"));
        auto mid = name == "PseudoTransitivity" ? E(bb, phi) : E(both(a, bb), phi);
        return f_imp(f_and(E(a, y_eq_d), mid), E(a, phi));
    }
    check_keys({"a", "phi"});
    auto phi = parse_formula(get("phi"));
    if (name == "ConjunctionAsIntervention") return f_imp(f_and(x_eq_u, phi), E(a, phi));
    if (name == "PseudoModusPonens") return f_imp(f_and(x_eq_u, E(a, phi)), phi);
    if (name == "PseudoModusTollens") return f_imp(f_and(f_not(phi), E(a, phi)), f_not(x_eq_u));
    throw std::invalid_argument("unknown fuzz schema '" + name + "'");
}

bool is_shift_rule(const std::string& name) { return name == "DG_EI" || name == "DG_LI"; }

bool antecedents_hold(const World& w, FormulaP f) {
    FormulaP lhs, rhs;
    while (as_imp(f, lhs, rhs)) {
        if (!w.satisfies(lhs)) return false;
        f = rhs;
    }
    return true;
}

// Semantic content of a shift rule: [a]phi at g agrees with phi at the
// generator g[a] built from scratch.
bool shift_rule_holds(const std::shared_ptr<const Model>& m, const GenRef& g, const std::string& rule,
                      const Bindings& b) {
    auto iv = iv_of(b.at("a"), rule == "DG_LI");
    auto phi = parse_formula(b.at("phi"));
    bool here = world_at(m, g).satisfies(f_modal(iv, phi));
    World there(m, apply_steps(m->gen, g.then(iv)));
    return here == there.satisfies(phi);
}

struct Outcome {
    bool drawn = false;
    bool non_vacuous = false;
    bool violated = false;
    Counterexample cx;
};

Outcome run_trial(const std::string& schema, const FuzzConfig& cfg, std::uint64_t seed, bool insist) {
    Rng rng(seed);
    auto model = std::make_shared<const Model>(random_model(cfg, rng.next()));
    const auto& sampler = samplers().at(schema);
    const int attempts = 40;
    Outcome last;
    for (int k = 0; k < attempts; ++k) {
        GenRef J{model->gen.id, {}};
        if (rng.below(4) == 0) {
            auto vars = model->gen.defined_vars();
            std::string a = vars[rng.below(vars.size())] + ":=c" + std::to_string(rng.below(
                                                                     static_cast<std::size_t>(model->interp.domain)));
            J = J.then(iv_of(a, rng.below(2) == 0));
        }
        Outcome o;
        try {
            Ctx c(rng, model, J);
            Bindings b = sampler(c);
            o.cx.bindings = b;
            o.cx.generator = to_string(J);
            if (is_shift_rule(schema)) {
                o.violated = !shift_rule_holds(model, J, schema, b);
                o.non_vacuous = true;
                o.cx.formula = "[" + b.at("a") + "]" + (schema == "DG_LI" ? "L" : "E") + " (" + b.at("phi") + ")";
            } else {
                auto f = instantiate_fuzz_schema(schema, b, J, model.get());
                World w = world_at(model, J);
                o.non_vacuous = antecedents_hold(w, f);
                o.violated = !w.satisfies(f);
                o.cx.formula = to_string(f);
            }
        } catch (const std::invalid_argument&) {
            continue;
        }
        o.drawn = true;
        if (o.violated) o.cx.model = model_to_json(*model);
        last = o;
        if (!insist || o.non_vacuous || o.violated) return o;
    }
    return last;
}

}  // namespace

const std::vector<std::string>& valid_schemas() {
    static const std::vector<std::string> names{
        "Eq1",       "Eq2",       "EqN",         "EqF",         "PD",          "MPD",       "DG_EI",     "Effect_EI",
        "Eq_EI",     "Split_EI",  "Simul_EI",    "Rpt_EI",      "Cmp_EI",      "DistrEI_not", "DistrEI_and",
        "DG_LI",     "Effect_LI", "Cond_LI",     "Split_LI",    "Simul_LI",    "Rpt_LI",    "Cmp_LI",
        "DistrLI_not", "DistrLI_and", "Expd_EILI", "Excd_EILI", "DsepCInd1", "DsepCInd2", "DsepSm",
        "DsepDc",    "DsepWu",    "DsepCn",      "Dsep_EI1",    "Dsep_EI2",    "Dsep_LI1",  "Dsep_LI2",
        "Dsep_LI3",  "Nanc1",     "Nanc2",       "Nanc3",       "Nanc4",       "Nanc5",     "AllNanc",
        "PaToNanc",  "PaToDsep",  "DG_Eq",       "DsepDG",      "NancDG",      "PaDG",      "Do1",
        "Do2",       "Do3",       "Unq"};
    return names;
}

const std::vector<std::string>& invalid_schemas() {
    static const std::vector<std::string> names{"StrengthenedIntervention", "PseudoTransitivity",
                                                "WeakPseudoTransitivity",   "PseudoContraposition",
                                                "ConjunctionAsIntervention", "PseudoModusPonens",
                                                "PseudoModusTollens"};
    return names;
}

bool is_fuzz_schema(const std::string& name) {
    const auto& v = valid_schemas();
    const auto& w = invalid_schemas();
    return std::find(v.begin(), v.end(), name) != v.end() || std::find(w.begin(), w.end(), name) != w.end();
}

FormulaP instantiate_fuzz_schema(const std::string& name, const Bindings& b, const GenRef& g, const Model* m) {
    if (is_axiom(name)) return instantiate_axiom(name, b, g, m);
    return extra_schema(name, b);
}

FuzzReport check_schema_validity(const std::string& schema, const FuzzConfig& cfg) {
    cfg.check();
    if (!is_fuzz_schema(schema)) throw std::invalid_argument("unknown fuzz schema '" + schema + "'");
    FuzzReport r;
    r.schema = schema;
    for (int i = 0; i < cfg.trials; ++i) {
        auto o = run_trial(schema, cfg, cfg.seed + static_cast<std::uint64_t>(i), i % 2 == 1);
        ++r.trials;
        if (!o.drawn) {
            ++r.incomplete;
            continue;
        }
        if (o.non_vacuous) ++r.non_vacuous;
        if (o.violated) {
            ++r.violations;
            if (!r.first) r.first = o.cx;
        }
    }
    return r;
}

FuzzReport find_counterexample(const std::string& schema, const FuzzConfig& cfg) {
    cfg.check();
    if (!is_fuzz_schema(schema)) throw std::invalid_argument("unknown fuzz schema '" + schema + "'");
    FuzzReport r;
    r.schema = schema;
    r.expect_valid = false;
    for (int i = 0; i < cfg.trials; ++i) {
        auto o = run_trial(schema, cfg, cfg.seed + static_cast<std::uint64_t>(i), false);
        ++r.trials;
        if (!o.drawn) {
            ++r.incomplete;
            continue;
        }
        if (o.non_vacuous) ++r.non_vacuous;
        if (o.violated) {
            ++r.violations;
            r.first = o.cx;
            break;
        }
    }
    return r;
}

FuzzReport run_fuzz(const std::string& schema, const FuzzConfig& cfg) {
    const auto& w = invalid_schemas();
    if (std::find(w.begin(), w.end(), schema) != w.end()) return find_counterexample(schema, cfg);
    return check_schema_validity(schema, cfg);
}

bool reverify(const std::string& schema, const Counterexample& c) {
    auto model = std::make_shared<const Model>(model_from_json(c.model));
    auto g = parse_genref(c.generator);
    if (is_shift_rule(schema)) return !shift_rule_holds(model, g, schema, c.bindings);
    auto f = instantiate_fuzz_schema(schema, c.bindings, g, model.get());
    if (to_string(f) != c.formula) return false;
    return !world_at(model, g).satisfies(f);
}

}  // namespace stacl
