#include "stacl/generator.hpp"

#include "stacl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <queue>
#include <stdexcept>

namespace stacl {

CausalTerm CausalTerm::app(std::string f, std::vector<CausalTerm> args) {
    for (const auto& a : args)
        if (a.kind == Kind::App) throw std::invalid_argument("causal term nests applications");
    return {Kind::App, std::move(f), std::move(args)};
}

namespace {

CausalTerm classify(const std::string& id) {
    if (is_const_id(id)) return CausalTerm::constant(id);
    if (is_name_id(id)) return CausalTerm::name(id);
    if (is_fsym_id(id) || is_keyword(id)) throw std::invalid_argument("'" + id + "' cannot be a mechanism atom");
    return CausalTerm::var(id);
}

}  // namespace

CausalTerm parse_causal_term(const std::string& text) {
    std::vector<std::string> toks;
    for (std::size_t i = 0; i < text.size();) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(' || c == ')' || c == ',') {
            toks.emplace_back(1, c);
            ++i;
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' || text[j] == '\''))
                ++j;
            toks.push_back(text.substr(i, j - i));
            i = j;
        } else {
            throw std::invalid_argument("unexpected character in causal term '" + text + "'");
        }
    }
    auto bad = [&]() { return std::invalid_argument("malformed causal term '" + text + "'"); };
    if (toks.empty() || toks[0] == "(" || toks[0] == ")" || toks[0] == ",") throw bad();
    if (toks.size() == 1) return classify(toks[0]);
    if (!is_fsym_id(toks[0]) || toks[1] != "(" || toks.back() != ")") throw bad();
    std::vector<CausalTerm> args;
    std::size_t i = 2;
    if (toks[i] != ")") {
        while (true) {
            if (i >= toks.size() - 1 || toks[i] == "(" || toks[i] == ")" || toks[i] == ",") throw bad();
            args.push_back(classify(toks[i++]));
            if (toks[i] == ")") break;
            if (toks[i] != ",") throw bad();
            ++i;
        }
    }
    if (i != toks.size() - 1) throw bad();
    return CausalTerm::app(toks[0], std::move(args));
}

std::string to_string(const CausalTerm& t) {
    if (t.kind != CausalTerm::Kind::App) return t.id;
    std::string s = t.id + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) s += ", ";
        s += t.args[i].id;
    }
    return s + ")";
}

std::set<std::string> fv(const CausalTerm& t) {
    std::set<std::string> out;
    if (t.kind == CausalTerm::Kind::Var) out.insert(t.id);
    for (const auto& a : t.args)
        if (a.kind == CausalTerm::Kind::Var) out.insert(a.id);
    return out;
}

std::set<std::string> fnc(const CausalTerm& t) {
    std::set<std::string> out;
    auto add = [&](const CausalTerm& a) {
        if (a.kind == CausalTerm::Kind::Name || a.kind == CausalTerm::Kind::Const) out.insert(a.id);
    };
    add(t);
    for (const auto& a : t.args) add(a);
    return out;
}

CausalTerm substitute(const CausalTerm& t, const std::string& x, const CausalTerm& r) {
    if (t.kind == CausalTerm::Kind::Var) return t.id == x ? r : t;
    if (t.kind != CausalTerm::Kind::App) return t;
    if (r.kind == CausalTerm::Kind::App) throw std::invalid_argument("substitution would nest applications");
    CausalTerm out = t;
    for (auto& a : out.args)
        if (a.kind == CausalTerm::Kind::Var && a.id == x) a = r;
    return out;
}

bool DataGenerator::defined(const std::string& x) const {
    auto it = assign.find(x);
    return it != assign.end() && it->second.has_value();
}

const CausalTerm& DataGenerator::at(const std::string& x) const {
    auto it = assign.find(x);
    if (it == assign.end() || !it->second) throw std::invalid_argument("variable '" + x + "' is not defined");
    return *it->second;
}

std::vector<std::string> DataGenerator::defined_vars() const {
    std::vector<std::string> out;
    for (const auto& [x, t] : assign)
        if (t) out.push_back(x);
    return out;
}

ValidationReport validate(const DataGenerator& g) {
    ValidationReport rep;
    for (const auto& [x, t] : g.assign) {
        if (!t) continue;
        if (is_const_id(x) || is_name_id(x) || is_fsym_id(x) || is_keyword(x))
            rep.violations.push_back({Violation::Kind::Malformed, {x}, "'" + x + "' is not a variable identifier"});
        for (const auto& y : fv(*t)) {
            if (!g.has(y))
                rep.violations.push_back({Violation::Kind::NotClosed, {x},
                                          "mechanism of '" + x + "' reads undeclared variable '" + y + "'"});
            else if (!g.defined(y))
                rep.violations.push_back({Violation::Kind::NotClosed, {x},
                                          "mechanism of '" + x + "' reads undefined variable '" + y + "'"});
        }
    }
    // Tarjan's strongly connected components over the defined variables.
    std::map<std::string, int> index, low;
    std::vector<std::string> stack;
    std::set<std::string> on_stack;
    int counter = 0;
    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : fv(g.at(v))) {
            if (!g.defined(w)) continue;
            if (!index.count(w)) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.count(w)) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::string> comp;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                comp.push_back(w);
            } while (w != v);
            bool self = comp.size() == 1 && fv(g.at(v)).count(v);
            if (comp.size() > 1 || self) {
                std::sort(comp.begin(), comp.end());
                std::string msg = "cycle through";
                for (const auto& c : comp) msg += " " + c;
                rep.violations.push_back({Violation::Kind::Cycle, comp, msg});
            }
        }
    };
    for (const auto& x : g.defined_vars())
        if (!index.count(x)) visit(x);
    return rep;
}

void require_valid(const DataGenerator& g) {
    auto rep = validate(g);
    if (!rep.ok()) throw std::invalid_argument("invalid generator '" + g.id + "': " + rep.violations.front().message);
}

std::vector<std::string> topo_order(const DataGenerator& g) {
    std::map<std::string, int> pending;
    std::map<std::string, std::vector<std::string>> dependents;
    for (const auto& x : g.defined_vars()) {
        pending[x] = 0;
        for (const auto& y : fv(g.at(x))) {
            if (!g.defined(y)) continue;
            ++pending[x];
            dependents[y].push_back(x);
        }
    }
    std::set<std::string> ready;
    for (const auto& [x, n] : pending)
        if (n == 0) ready.insert(x);
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string x = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(x);
        for (const auto& d : dependents[x])
            if (--pending[d] == 0) ready.insert(d);
    }
    if (order.size() != pending.size()) throw std::invalid_argument("generator '" + g.id + "' is cyclic");
    return order;
}

namespace {

void check_assigns(const DataGenerator& g, const std::vector<Assign>& assigns) {
    std::set<std::string> seen;
    for (const auto& a : assigns) {
        if (!g.has(a.var)) throw std::invalid_argument("intervention on unknown variable '" + a.var + "'");
        if (!seen.insert(a.var).second)
            throw std::invalid_argument("duplicate intervention variable '" + a.var + "'");
    }
}

}  // namespace

DataGenerator intervene_eager(const DataGenerator& g, const std::vector<Assign>& assigns) {
    check_assigns(g, assigns);
    DataGenerator out = g;
    for (const auto& a : assigns) out.assign[a.var] = CausalTerm::constant(a.value.id);
    return out;
}

DataGenerator intervene_lazy(const DataGenerator& g, const std::vector<Assign>& assigns) {
    check_assigns(g, assigns);
    DataGenerator out = g;
    for (auto& [y, t] : out.assign) {
        if (!t) continue;
        for (const auto& a : assigns) *t = substitute(*t, a.var, CausalTerm::constant(a.value.id));
    }
    return out;
}

DataGenerator intervene(const DataGenerator& g, const Intervention& iv) {
    return iv.lazy ? intervene_lazy(g, iv.assigns) : intervene_eager(g, iv.assigns);
}

DataGenerator apply_steps(const DataGenerator& g, const GenRef& ref) {
    DataGenerator out = g;
    for (const auto& st : ref.steps) out = intervene(out, st);
    out.id = to_string(ref);
    return out;
}

std::string primed(const std::string& x) { return x + "'"; }

DataGenerator expand(const DataGenerator& g) {
    DataGenerator out;
    out.id = g.id + "'";
    auto defined = g.defined_vars();
    for (const auto& x : defined)
        if (g.has(primed(x))) throw std::invalid_argument("expansion collides with existing '" + primed(x) + "'");
    for (const auto& [x, t] : g.assign) {
        if (!t) {
            out.assign[x] = std::nullopt;
            continue;
        }
        CausalTerm r = *t;
        for (const auto& y : fv(*t)) r = substitute(r, y, CausalTerm::var(primed(y)));
        out.assign[x] = r;
        out.assign[primed(x)] = CausalTerm::var(x);
    }
    return out;
}

}  // namespace stacl
