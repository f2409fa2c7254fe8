#include "stacl/semantics.hpp"

#include "stacl/parser.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace stacl {

Dist point_mass(std::vector<int> values) { return Dist{{std::move(values), Rational(1)}}; }

Dist product(const Dist& a, const Dist& b) {
    Dist out;
    for (const auto& [ka, pa] : a)
        for (const auto& [kb, pb] : b) {
            auto k = ka;
            k.insert(k.end(), kb.begin(), kb.end());
            out[k] = pa * pb;
        }
    return out;
}

std::size_t dist_arity(const Dist& d) { return d.empty() ? 0 : d.begin()->first.size(); }

nlohmann::json dist_to_json(const Dist& d) {
    std::map<std::string, std::string> sorted;
    for (const auto& [k, p] : d) {
        std::string key;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (i) key += ",";
            key += std::to_string(k[i]);
        }
        sorted[key] = rational_string(p);
    }
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : sorted) j[k] = v;
    return j;
}

namespace {

using Context = std::map<std::string, int>;

Context row_context(const Kernel& k, const std::vector<int>& g) {
    Context c;
    for (std::size_t i = 0; i < k.cv.given.size(); ++i) c[k.cv.given.vars()[i]] = g[i];
    if (k.origin == Kernel::Origin::Cond)
        for (std::size_t i = 0; i < k.cv.fixed.size(); ++i) c[k.cv.fixed.vars()[i]] = k.fixed_vals[i];
    return c;
}

bool compatible(const Context& a, const Context& b) {
    for (const auto& [v, x] : a) {
        auto it = b.find(v);
        if (it != b.end() && it->second != x) return false;
    }
    return true;
}

// Marginal of a labelled row on the target positions.
Dist target_part(const Kernel& k, const Dist& row) {
    auto labels = kernel_output_labels(k.cv).vars();
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (k.cv.target.contains(labels[i])) keep.push_back(i);
    Dist out;
    for (const auto& [key, p] : row) {
        std::vector<int> t;
        for (auto i : keep) t.push_back(key[i]);
        out[t] += p;
    }
    return out;
}

bool cylindrical_equal(const Kernel& a, const Kernel& b) {
    if (a.cv.target != b.cv.target) return false;
    for (const auto& [ga, ra] : a.rows) {
        auto ca = row_context(a, ga);
        auto ta = target_part(a, ra);
        for (const auto& [gb, rb] : b.rows)
            if (compatible(ca, row_context(b, gb)) && ta != target_part(b, rb)) return false;
    }
    return true;
}

bool all_rows_equal(const Kernel& a, const Kernel& b) {
    return a.in_arity == b.in_arity && a.out_arity == b.out_arity && a.rows == b.rows;
}

}  // namespace

bool kernels_equal(const Kernel& a, const Kernel& b) {
    using O = Kernel::Origin;
    if (a.origin == O::Plain && b.origin == O::Cond) return kernels_equal(b, a);
    if (a.origin == O::Cond && b.origin == O::Plain) {
        if (b.in_arity != a.cv.given.size() || b.out_arity != a.cv.target.size()) return false;
        for (const auto& [g, row] : a.rows) {
            auto it = b.rows.find(g);
            if (it == b.rows.end() || it->second != target_part(a, row)) return false;
        }
        return true;
    }
    if (a.origin == O::Cond || b.origin == O::Cond) return cylindrical_equal(a, b);
    if (a.origin == O::Canon && b.origin == O::Canon) {
        if (a.cv.target != b.cv.target || a.cv.given != b.cv.given) return false;
        return a.rows == b.rows;
    }
    return all_rows_equal(a, b);
}

struct ModelContext {
    std::map<std::string, Dist> names;
    std::map<std::string, Kernel> kernels;
};

// Dense joint over columns; column i has stride d^i.
struct World::Table {
    std::vector<std::string> cols;
    std::vector<Rational> p;
    int d = 2;

    std::size_t stride(std::size_t col) const {
        std::size_t s = 1;
        for (std::size_t i = 0; i < col; ++i) s *= static_cast<std::size_t>(d);
        return s;
    }
    std::size_t col_index(const std::string& c) const {
        auto it = std::find(cols.begin(), cols.end(), c);
        if (it == cols.end()) throw std::logic_error("missing joint column '" + c + "'");
        return static_cast<std::size_t>(it - cols.begin());
    }
    int value(std::size_t cell, std::size_t col) const {
        return static_cast<int>((cell / stride(col)) % static_cast<std::size_t>(d));
    }
    void add_independent(const std::string& c, const std::vector<Rational>& dist) {
        std::size_t n = p.size();
        std::vector<Rational> out(n * static_cast<std::size_t>(d));
        for (std::size_t i = 0; i < n; ++i) {
            if (sgn(p[i]) == 0) continue;
            for (int v = 0; v < d; ++v) out[i + static_cast<std::size_t>(v) * n] = p[i] * dist[static_cast<std::size_t>(v)];
        }
        p = std::move(out);
        cols.push_back(c);
    }
    void marginalize(const std::string& c) {
        std::size_t j = col_index(c);
        std::size_t sj = stride(j);
        std::size_t n = p.size() / static_cast<std::size_t>(d);
        std::vector<Rational> out(n);
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (sgn(p[i]) == 0) continue;
            std::size_t low = i % sj, high = i / (sj * static_cast<std::size_t>(d));
            out[low + high * sj] += p[i];
        }
        p = std::move(out);
        cols.erase(cols.begin() + static_cast<long>(j));
    }
    Dist project(const std::vector<std::string>& want) const {
        std::vector<std::size_t> idx, strides;
        for (const auto& c : want) {
            idx.push_back(col_index(c));
            strides.push_back(stride(idx.back()));
        }
        std::size_t m = 1;
        for (std::size_t i = 0; i < want.size(); ++i) m *= static_cast<std::size_t>(d);
        std::vector<Rational> acc(m);
        for (std::size_t cell = 0; cell < p.size(); ++cell) {
            if (sgn(p[cell]) == 0) continue;
            std::size_t k = 0, s = 1;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                k += ((cell / strides[i]) % static_cast<std::size_t>(d)) * s;
                s *= static_cast<std::size_t>(d);
            }
            acc[k] += p[cell];
        }
        Dist out;
        for (std::size_t k = 0; k < m; ++k) {
            if (sgn(acc[k]) == 0) continue;
            std::vector<int> key(want.size());
            std::size_t r = k;
            for (std::size_t i = 0; i < want.size(); ++i) {
                key[i] = static_cast<int>(r % static_cast<std::size_t>(d));
                r /= static_cast<std::size_t>(d);
            }
            out[std::move(key)] = acc[k];
        }
        return out;
    }
};

World::World(std::shared_ptr<const Model> model) : World(model, model->gen) {}

World::World(std::shared_ptr<const Model> model, DataGenerator gen)
    : World(std::move(model), std::make_shared<ModelContext>(), std::move(gen)) {}

World::World(std::shared_ptr<const Model> model, std::shared_ptr<ModelContext> ctx, DataGenerator gen)
    : model_(std::move(model)), ctx_(std::move(ctx)), gen_(std::move(gen)) {
    require_valid(gen_);
}

World World::intervened(const Intervention& iv) const {
    DataGenerator g = intervene(gen_, iv);
    g.id = gen_.id + to_string(iv);
    return World(model_, ctx_, std::move(g));
}

World World::intervened(const std::vector<Assign>& assigns, bool lazy) const {
    return intervened(Intervention{lazy, make_assigns(assigns)});
}

const Diagram& World::diagram() const {
    if (!diagram_) diagram_ = std::make_shared<Diagram>(gen_);
    return *diagram_;
}

std::shared_ptr<const World::Table> World::table(const std::vector<std::string>& kept_names) const {
    auto it = tables_.find(kept_names);
    if (it != tables_.end()) return it->second;
    const Interp& I = interp();
    auto order = topo_order(gen_);
    std::set<std::string> kept(kept_names.begin(), kept_names.end());
    std::map<std::string, std::size_t> last_use;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const auto& a : fnc(gen_.at(order[i])))
            if (!is_const_id(a)) last_use[a] = i;
    auto t = std::make_shared<Table>();
    t->d = I.domain;
    t->p = {Rational(1)};
    auto name_dist = [&](const std::string& n) -> const std::vector<Rational>& {
        auto f = I.names.find(n);
        if (f == I.names.end()) throw std::invalid_argument("undefined name '" + n + "'");
        return f->second;
    };
    std::size_t d = static_cast<std::size_t>(I.domain);
    for (std::size_t step = 0; step < order.size(); ++step) {
        const std::string& x = order[step];
        const CausalTerm& m = gen_.at(x);
        std::vector<const CausalTerm*> atoms;
        if (m.kind == CausalTerm::Kind::App)
            for (const auto& a : m.args) atoms.push_back(&a);
        else
            atoms.push_back(&m);
        for (const auto* a : atoms)
            if (a->kind == CausalTerm::Kind::Name &&
                std::find(t->cols.begin(), t->cols.end(), a->id) == t->cols.end())
                t->add_independent(a->id, name_dist(a->id));
        // Position of each atom: a column index, or a fixed constant value.
        std::vector<std::pair<long, int>> src;
        for (const auto* a : atoms) {
            if (a->kind == CausalTerm::Kind::Const)
                src.emplace_back(-1, I.const_value(a->id));
            else
                src.emplace_back(static_cast<long>(t->col_index(a->id)), 0);
        }
        std::vector<std::size_t> strides;
        for (const auto& [c, v] : src) strides.push_back(c < 0 ? 0 : t->stride(static_cast<std::size_t>(c)));
        const FunctionTable* f = nullptr;
        if (m.kind == CausalTerm::Kind::App) {
            auto ft = I.functions.find(m.id);
            if (ft == I.functions.end()) throw std::invalid_argument("undefined function '" + m.id + "'");
            f = &ft->second;
            if (f->arity != static_cast<int>(atoms.size()))
                throw std::invalid_argument("function '" + m.id + "' applied with wrong arity");
        }
        std::size_t n = t->p.size();
        std::vector<Rational> out(n * d);
        for (std::size_t i = 0; i < n; ++i) {
            if (sgn(t->p[i]) == 0) continue;
            std::size_t row = 0, rs = 1;
            int direct = 0;
            for (std::size_t k = 0; k < src.size(); ++k) {
                int v = src[k].first < 0 ? src[k].second : static_cast<int>((i / strides[k]) % d);
                row += static_cast<std::size_t>(v) * rs;
                rs *= d;
                direct = v;
            }
            if (f) {
                const auto& dist = f->rows[row];
                for (std::size_t v = 0; v < d; ++v)
                    if (sgn(dist[v]) != 0) out[i + v * n] = t->p[i] * dist[v];
            } else {
                out[i + static_cast<std::size_t>(direct) * n] = t->p[i];
            }
        }
        t->p = std::move(out);
        t->cols.push_back(x);
        for (const auto* a : atoms)
            if (a->kind == CausalTerm::Kind::Name && last_use[a->id] == step && !kept.count(a->id) &&
                std::find(t->cols.begin(), t->cols.end(), a->id) != t->cols.end())
                t->marginalize(a->id);
    }
    for (const auto& n : kept_names)
        if (std::find(t->cols.begin(), t->cols.end(), n) == t->cols.end()) t->add_independent(n, name_dist(n));
    tables_[kept_names] = t;
    return t;
}

Dist World::joint(const std::vector<std::string>& columns) const {
    std::vector<std::string> names;
    for (const auto& c : columns) {
        if (gen_.defined(c)) continue;
        if (gen_.has(c)) throw std::invalid_argument("variable '" + c + "' is undefined in " + gen_.id);
        if (!interp().names.count(c)) throw std::invalid_argument("unknown variable or name '" + c + "'");
        names.push_back(c);
    }
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return table(names)->project(columns);
}

Dist World::marginal(const VarTuple& x) const {
    for (const auto& v : x.vars())
        if (!gen_.defined(v)) throw std::invalid_argument("variable '" + v + "' is undefined in " + gen_.id);
    return joint(x.vars());
}

bool World::positive(const PosTarget& p) const {
    Dist m = marginal(p.vars);
    std::vector<std::size_t> pos;
    std::vector<int> vals;
    for (std::size_t i = 0; i < p.fixed.size(); ++i) {
        const auto& v = p.fixed.vars()[i];
        pos.push_back(static_cast<std::size_t>(
            std::find(p.vars.vars().begin(), p.vars.vars().end(), v) - p.vars.vars().begin()));
        vals.push_back(interp().const_value(p.vals[i]));
    }
    std::size_t need = 1;
    for (std::size_t i = p.fixed.size(); i < p.vars.size(); ++i) need *= static_cast<std::size_t>(domain());
    std::size_t have = 0;
    for (const auto& [k, pr] : m) {
        bool match = true;
        for (std::size_t i = 0; i < pos.size(); ++i) match = match && k[pos[i]] == vals[i];
        if (match) ++have;
    }
    return have == need;
}

Kernel World::interpret_cond(const CondVar& cv) const {
    cv.check();
    auto cols = cv.target.unite(cv.given).unite(cv.fixed);
    Dist j = marginal(cols);
    const auto& cv_ = cols.vars();
    std::vector<int> fixed_vals;
    for (const auto& c : cv.vals) fixed_vals.push_back(interp().const_value(c));
    std::vector<std::size_t> gpos, fpos, opos;
    for (std::size_t i = 0; i < cv_.size(); ++i) {
        if (cv.given.contains(cv_[i])) gpos.push_back(i);
        if (cv.fixed.contains(cv_[i])) fpos.push_back(i);
        else opos.push_back(i);
    }
    std::map<std::vector<int>, Rational> mass;
    std::map<std::vector<int>, Dist> rows;
    for (const auto& [k, p] : j) {
        bool match = true;
        for (std::size_t i = 0; i < fpos.size(); ++i) match = match && k[fpos[i]] == fixed_vals[i];
        if (!match) continue;
        std::vector<int> g, o;
        for (auto i : gpos) g.push_back(k[i]);
        for (auto i : opos) o.push_back(k[i]);
        mass[g] += p;
        rows[g][o] += p;
    }
    Kernel K;
    K.origin = Kernel::Origin::Cond;
    K.in_arity = cv.given.size();
    K.out_arity = opos.size();
    K.cv = cv;
    K.fixed_vals = fixed_vals;
    for (auto& [g, row] : rows) {
        for (auto& [o, p] : row) p /= mass[g];
        K.rows[g] = std::move(row);
    }
    return K;
}

namespace {

std::vector<std::vector<int>> all_tuples(std::size_t k, int d) {
    std::vector<std::vector<int>> out{{}};
    for (std::size_t i = 0; i < k; ++i) {
        std::vector<std::vector<int>> next;
        for (const auto& t : out)
            for (int v = 0; v < d; ++v) {
                auto u = t;
                u.push_back(v);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

DataGenerator resolve_generator(const Model& m, const GenRef& ref) {
    if (ref.base != m.gen.id)
        throw std::invalid_argument("canonical symbol refers to unknown generator '" + ref.base + "'");
    return apply_steps(m.gen, ref);
}

}  // namespace

Kernel World::canonical_kernel(const KernelRef& k) const {
    auto key = to_string(k);
    auto it = ctx_->kernels.find(key);
    if (it != ctx_->kernels.end()) return it->second;
    World g(model_, ctx_, resolve_generator(*model_, k.gen));
    Kernel K = g.interpret_cond(k.cv);
    K.origin = Kernel::Origin::Canon;
    auto labels = kernel_output_labels(k.cv).vars();
    for (const auto& gv : all_tuples(k.cv.given.size(), domain())) {
        if (K.rows.count(gv)) continue;
        Dist row;
        for (const auto& tv : all_tuples(k.cv.target.size(), domain())) {
            std::vector<int> o;
            std::size_t ti = 0, gi = 0;
            for (const auto& l : labels) o.push_back(k.cv.target.contains(l) ? tv[ti++] : gv[gi++]);
            Rational p(1);
            for (std::size_t i = 0; i < k.cv.target.size(); ++i) p /= domain();
            row[o] = p;
        }
        K.rows[gv] = std::move(row);
    }
    ctx_->kernels[key] = K;
    return K;
}

Kernel World::kernel(const KernelRef& k) const {
    switch (k.kind) {
    case KernelRef::Kind::Fsym: {
        auto it = interp().functions.find(k.id);
        if (it == interp().functions.end()) throw std::invalid_argument("undefined function symbol '" + k.id + "'");
        Kernel K;
        K.origin = Kernel::Origin::Plain;
        K.in_arity = static_cast<std::size_t>(it->second.arity);
        K.out_arity = 1;
        auto inputs = all_tuples(K.in_arity, domain());
        for (const auto& in : inputs) {
            std::size_t idx = 0, s = 1;
            for (int v : in) {
                idx += static_cast<std::size_t>(v) * s;
                s *= static_cast<std::size_t>(domain());
            }
            Dist row;
            const auto& r = it->second.rows[idx];
            for (int v = 0; v < domain(); ++v)
                if (sgn(r[static_cast<std::size_t>(v)]) != 0) row[{v}] = r[static_cast<std::size_t>(v)];
            K.rows[in] = std::move(row);
        }
        return K;
    }
    case KernelRef::Kind::Canon:
        return canonical_kernel(k);
    case KernelRef::Kind::Cond:
        return interpret_cond(k.cv);
    }
    throw std::logic_error("bad kernel kind");
}

Dist World::canonical_name(const TermP& u) const {
    auto key = to_string(u);
    auto it = ctx_->names.find(key);
    if (it != ctx_->names.end()) return it->second;
    World g(model_, ctx_, resolve_generator(*model_, u->gen));
    Dist d = g.marginal(u->vars);
    ctx_->names[key] = d;
    return d;
}

namespace {

struct StateColumns {
    std::vector<std::string> plain;       // variables and names read from the joint
    std::vector<std::string> canonical;   // printed canonical names
    std::vector<const Term*> canon_terms;
};

void collect_columns(const TermP& u, StateColumns& sc) {
    auto add = [](std::vector<std::string>& v, const std::string& s) {
        if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
    };
    switch (u->kind) {
    case Term::Kind::Vars:
        for (const auto& v : u->vars.vars()) add(sc.plain, v);
        break;
    case Term::Kind::Name:
        add(sc.plain, u->id);
        break;
    case Term::Kind::CanonName: {
        auto key = to_string(u);
        if (std::find(sc.canonical.begin(), sc.canonical.end(), key) == sc.canonical.end()) {
            sc.canonical.push_back(key);
            sc.canon_terms.push_back(u.get());
        }
        break;
    }
    default:
        for (const auto& a : u->args) collect_columns(a, sc);
    }
}

}  // namespace

std::optional<Dist> World::eval_in_state(const TermP& u, const std::map<std::string, int>& state) const {
    // Canonical blocks are stored under "<printed>#<position>".
    switch (u->kind) {
    case Term::Kind::Vars: {
        std::vector<int> v;
        for (const auto& x : u->vars.vars()) v.push_back(state.at(x));
        return point_mass(std::move(v));
    }
    case Term::Kind::Name:
        return point_mass({state.at(u->id)});
    case Term::Kind::CanonName: {
        auto key = to_string(u);
        std::vector<int> v;
        for (std::size_t i = 0; i < u->vars.size(); ++i) v.push_back(state.at(key + "#" + std::to_string(i)));
        return point_mass(std::move(v));
    }
    case Term::Kind::Const:
        return point_mass({interp().const_value(u->id)});
    case Term::Kind::Tuple:
    case Term::Kind::App: {
        Dist acc = point_mass({});
        for (const auto& a : u->args) {
            auto d = eval_in_state(a, state);
            if (!d) return std::nullopt;
            acc = product(acc, *d);
        }
        if (u->kind == Term::Kind::Tuple) return acc;
        Kernel K = kernel(u->head);
        if (dist_arity(acc) != K.in_arity) return std::nullopt;
        Dist out;
        for (const auto& [in, p] : acc) {
            auto row = K.rows.find(in);
            if (row == K.rows.end()) return std::nullopt;
            for (const auto& [o, q] : row->second) out[o] += p * q;
        }
        return out;
    }
    case Term::Kind::Margin: {
        auto labels = term_labels(u->args[0]);
        if (!labels) return std::nullopt;
        std::vector<std::size_t> pos;
        for (const auto& k : u->vars.vars()) {
            auto it = std::find(labels->begin(), labels->end(), k);
            if (it == labels->end()) return std::nullopt;
            pos.push_back(static_cast<std::size_t>(it - labels->begin()));
        }
        auto body = eval_in_state(u->args[0], state);
        if (!body) return std::nullopt;
        if (dist_arity(*body) != labels->size()) return std::nullopt;
        Dist out;
        for (const auto& [k, p] : *body) {
            std::vector<int> o;
            for (auto i : pos) o.push_back(k[i]);
            out[o] += p;
        }
        return out;
    }
    }
    return std::nullopt;
}

std::optional<Dist> World::interpret(const TermP& u) const {
    if (u->kind == Term::Kind::Vars) return marginal(u->vars);
    StateColumns sc;
    collect_columns(u, sc);
    for (const auto& c : sc.plain)
        if (gen_.has(c) && !gen_.defined(c))
            throw std::invalid_argument("variable '" + c + "' is undefined in " + gen_.id);
    Dist states = joint(sc.plain);
    std::vector<std::string> keys = sc.plain;
    for (std::size_t i = 0; i < sc.canon_terms.size(); ++i) {
        TermP t(std::shared_ptr<const Term>{}, sc.canon_terms[i]);
        states = product(states, canonical_name(t));
        for (std::size_t j = 0; j < sc.canon_terms[i]->vars.size(); ++j)
            keys.push_back(sc.canonical[i] + "#" + std::to_string(j));
    }
    Dist out;
    std::map<std::string, int> state;
    for (const auto& [k, p] : states) {
        for (std::size_t i = 0; i < keys.size(); ++i) state[keys[i]] = k[i];
        auto d = eval_in_state(u, state);
        if (!d) return std::nullopt;
        for (const auto& [o, q] : *d) out[o] += p * q;
    }
    return out;
}

bool World::satisfies(const FormulaP& f) const {
    switch (f->kind) {
    case Formula::Kind::Top:
        return true;
    case Formula::Kind::Pos:
        return positive(f->pos);
    case Formula::Kind::CPred:
        return eval_causal_pred(diagram(), f->pred, f->tuples);
    case Formula::Kind::EqTerm: {
        auto l = interpret(f->lt);
        auto r = interpret(f->rt);
        if (!l || !r) return !l && !r;
        return *l == *r;
    }
    case Formula::Kind::EqKernel:
        return kernels_equal(kernel(f->lk), kernel(f->rk));
    case Formula::Kind::Not:
        return !satisfies(f->a);
    case Formula::Kind::And:
        return satisfies(f->a) && satisfies(f->b);
    case Formula::Kind::Modal:
        return intervened(f->iv).satisfies(f->a);
    }
    return false;
}

Dist causal_effect(const World& w, const std::vector<Assign>& assigns, const VarTuple& y) {
    return w.intervened(assigns, false).marginal(y);
}

Dist truncated_factorization(const Model& m, const std::vector<Assign>& assigns, const VarTuple& y) {
    const auto& g = m.gen;
    const Interp& I = m.interp;
    auto vars = g.defined_vars();
    std::set<std::string> names_set;
    for (const auto& x : vars)
        for (const auto& a : fnc(g.at(x)))
            if (!is_const_id(a)) names_set.insert(a);
    std::vector<std::string> names(names_set.begin(), names_set.end());
    std::map<std::string, int> clamp;
    for (const auto& a : assigns) clamp[a.var] = I.const_value(a.value);
    for (const auto& v : y.vars())
        if (!g.defined(v)) throw std::invalid_argument("variable '" + v + "' is undefined");
    std::vector<std::string> all = names;
    all.insert(all.end(), vars.begin(), vars.end());
    Dist out;
    for (const auto& vals : all_tuples(all.size(), I.domain)) {
        std::map<std::string, int> env;
        for (std::size_t i = 0; i < all.size(); ++i) env[all[i]] = vals[i];
        Rational p(1);
        for (const auto& n : names) p *= I.names.at(n)[static_cast<std::size_t>(env[n])];
        for (const auto& x : vars) {
            if (sgn(p) == 0) break;
            if (clamp.count(x)) {
                if (env[x] != clamp[x]) p = 0;
                continue;
            }
            const auto& t = g.at(x);
            auto atom = [&](const CausalTerm& a) {
                return a.kind == CausalTerm::Kind::Const ? I.const_value(a.id) : env.at(a.id);
            };
            if (t.kind == CausalTerm::Kind::App) {
                std::size_t row = 0, s = 1;
                for (const auto& a : t.args) {
                    row += static_cast<std::size_t>(atom(a)) * s;
                    s *= static_cast<std::size_t>(I.domain);
                }
                p *= I.functions.at(t.id).rows[row][static_cast<std::size_t>(env[x])];
            } else if (atom(t) != env[x]) {
                p = 0;
            }
        }
        if (sgn(p) == 0) continue;
        std::vector<int> key;
        for (const auto& v : y.vars()) key.push_back(env[v]);
        out[key] += p;
    }
    return out;
}

}  // namespace stacl
