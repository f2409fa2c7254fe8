#include "stacl/diagram.hpp"

#include "stacl/parser.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace stacl {

Diagram::Diagram(const DataGenerator& g) {
    vars_ = g.defined_vars();
    std::set<std::string> names;
    for (const auto& x : vars_) {
        const auto& t = g.at(x);
        for (const auto& u : fnc(t)) {
            exo_.insert(u);
            edges_.emplace_back(u, x);
            if (!is_const_id(u)) names.insert(u);
        }
        for (const auto& y : fv(t)) edges_.emplace_back(y, x);
    }
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    nodes_ = vars_;
    nodes_.insert(nodes_.end(), names.begin(), names.end());
    std::map<std::string, std::size_t> idx;
    for (std::size_t i = 0; i < nodes_.size(); ++i) idx[nodes_[i]] = i;
    pa_.assign(nodes_.size(), {});
    ch_.assign(nodes_.size(), {});
    for (const auto& [from, to] : edges_) {
        auto f = idx.find(from);
        if (f == idx.end()) continue;  // constants carry no path
        std::size_t t = idx.at(to);
        pa_[t].push_back(f->second);
        ch_[f->second].push_back(t);
    }
}

bool Diagram::is_var(const std::string& v) const { return std::binary_search(vars_.begin(), vars_.end(), v); }

std::size_t Diagram::index_of(const std::string& v) const {
    auto it = std::lower_bound(vars_.begin(), vars_.end(), v);
    if (it == vars_.end() || *it != v) throw std::invalid_argument("unknown variable '" + v + "'");
    return static_cast<std::size_t>(it - vars_.begin());
}

VarTuple Diagram::parents(const VarTuple& ys) const {
    std::set<std::string> out;
    for (const auto& y : ys.vars())
        for (auto p : pa_[index_of(y)])
            if (p < vars_.size()) out.insert(nodes_[p]);
    return VarTuple(std::vector<std::string>(out.begin(), out.end()));
}

VarTuple Diagram::ancestors(const VarTuple& ys) const {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> work;
    for (const auto& y : ys.vars()) work.push_back(index_of(y));
    while (!work.empty()) {
        auto v = work.back();
        work.pop_back();
        for (auto p : pa_[v])
            if (!seen[p]) {
                seen[p] = true;
                work.push_back(p);
            }
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (seen[i]) out.push_back(vars_[i]);
    return VarTuple(std::move(out));
}

std::vector<bool> Diagram::ancestors_star(const VarTuple& zs) const {
    std::vector<bool> in(nodes_.size(), false);
    std::vector<std::size_t> work;
    for (const auto& z : zs.vars()) {
        auto i = index_of(z);
        if (!in[i]) {
            in[i] = true;
            work.push_back(i);
        }
    }
    while (!work.empty()) {
        auto v = work.back();
        work.pop_back();
        for (auto p : pa_[v])
            if (!in[p]) {
                in[p] = true;
                work.push_back(p);
            }
    }
    return in;
}

namespace {

// Validates a query; returns false when the answer is decided by overlap.
bool well_formed(const Diagram& d, const VarTuple& x, const VarTuple& y, const VarTuple& z) {
    if (x.empty() || y.empty()) throw std::invalid_argument("dsep needs non-empty x and y");
    for (const auto* t : {&x, &y, &z})
        for (const auto& v : t->vars()) d.index_of(v);
    return x.disjoint(y) && x.disjoint(z) && y.disjoint(z);
}

std::vector<bool> mask(const Diagram& d, const VarTuple& t) {
    std::vector<bool> m(d.node_count(), false);
    for (const auto& v : t.vars()) m[d.index_of(v)] = true;
    return m;
}

}  // namespace

bool d_separated(const Diagram& d, const VarTuple& x, const VarTuple& y, const VarTuple& z) {
    if (!well_formed(d, x, y, z)) return false;
    auto in_z = mask(d, z);
    auto in_y = mask(d, y);
    auto anc = d.ancestors_star(z);
    // Active-trail reachability over (node, arrived-from-child) states.
    std::size_t n = d.node_count();
    std::vector<bool> visited(2 * n, false);
    std::vector<std::pair<std::size_t, bool>> work;
    for (const auto& v : x.vars()) work.emplace_back(d.index_of(v), true);
    while (!work.empty()) {
        auto [v, up] = work.back();
        work.pop_back();
        std::size_t key = 2 * v + (up ? 1 : 0);
        if (visited[key]) continue;
        visited[key] = true;
        if (!in_z[v] && in_y[v]) return false;
        if (up) {
            if (in_z[v]) continue;
            for (auto p : d.parents_of(v)) work.emplace_back(p, true);
            for (auto c : d.children_of(v)) work.emplace_back(c, false);
        } else {
            if (!in_z[v])
                for (auto c : d.children_of(v)) work.emplace_back(c, false);
            if (anc[v])
                for (auto p : d.parents_of(v)) work.emplace_back(p, true);
        }
    }
    return true;
}

namespace {

struct PathSearch {
    const Diagram& d;
    std::vector<bool> in_z, in_y, anc, on_path;
    std::vector<std::size_t> path;

    bool points_into(std::size_t from, std::size_t to) const {
        const auto& p = d.parents_of(to);
        return std::find(p.begin(), p.end(), from) != p.end();
    }

    bool blocked_at(std::size_t k) const {
        std::size_t a = path[k - 1], v = path[k], b = path[k + 1];
        bool collider = points_into(a, v) && points_into(b, v);
        return collider ? !anc[v] : in_z[v];
    }

    // True when an unblocked path from the current endpoint reaches y.
    bool extend() {
        std::size_t v = path.back();
        if (path.size() >= 3 && blocked_at(path.size() - 2)) return false;
        if (path.size() >= 2 && in_y[v]) return true;
        std::vector<std::size_t> nbrs = d.parents_of(v);
        nbrs.insert(nbrs.end(), d.children_of(v).begin(), d.children_of(v).end());
        for (auto w : nbrs) {
            if (on_path[w]) continue;
            on_path[w] = true;
            path.push_back(w);
            bool found = extend();
            path.pop_back();
            on_path[w] = false;
            if (found) return true;
        }
        return false;
    }
};

}  // namespace

bool d_separated_naive(const Diagram& d, const VarTuple& x, const VarTuple& y, const VarTuple& z) {
    if (!well_formed(d, x, y, z)) return false;
    PathSearch s{d, mask(d, z), mask(d, y), d.ancestors_star(z), std::vector<bool>(d.node_count(), false), {}};
    for (const auto& v : x.vars()) {
        auto i = d.index_of(v);
        s.on_path[i] = true;
        s.path = {i};
        bool found = s.extend();
        s.on_path[i] = false;
        if (found) return false;
    }
    return true;
}

bool eval_causal_pred(const Diagram& d, const std::string& pred, const std::vector<VarTuple>& args) {
    if (!is_causal_pred(pred)) throw std::invalid_argument("unknown causal predicate '" + pred + "'");
    if (args.size() != causal_pred_arity(pred))
        throw std::invalid_argument("arity mismatch for causal predicate '" + pred + "'");
    const auto& a = args[0];
    const auto& b = args[1];
    for (const auto& t : args)
        for (const auto& v : t.vars()) d.index_of(v);
    if (pred == "pa") return a == d.parents(b) && a.disjoint(b);
    if (pred == "npa") return a.disjoint(d.parents(b)) && a.disjoint(b);
    if (pred == "anc") return a == d.ancestors(b) && a.disjoint(b);
    if (pred == "nanc") return a.disjoint(d.ancestors(b)) && a.disjoint(b);
    if (pred == "allnanc") return a == b.minus(d.ancestors(args[2]));
    return d_separated(d, a, b, args[2]);
}

bool backdoor_criterion(const DataGenerator& g, const VarTuple& x, const VarTuple& y, const VarTuple& z) {
    Diagram base(g);
    if (!eval_causal_pred(base, "nanc", {x, z})) return false;
    std::vector<Assign> assigns;
    for (const auto& v : x.vars()) assigns.push_back({v, Const{"0"}});
    Diagram lazy(intervene_lazy(g, assigns));
    return d_separated(lazy, x, y, z);
}

}  // namespace stacl
