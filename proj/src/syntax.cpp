#include "stacl/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

namespace stacl {

VarTuple::VarTuple(std::vector<std::string> vars) : vars_(std::move(vars)) {
    std::sort(vars_.begin(), vars_.end());
    auto dup = std::adjacent_find(vars_.begin(), vars_.end());
    if (dup != vars_.end()) throw std::invalid_argument("duplicate variable '" + *dup + "' in tuple");
}

bool VarTuple::contains(const std::string& v) const {
    return std::binary_search(vars_.begin(), vars_.end(), v);
}

bool VarTuple::subset_of(const VarTuple& other) const {
    return std::includes(other.vars_.begin(), other.vars_.end(), vars_.begin(), vars_.end());
}

bool VarTuple::disjoint(const VarTuple& other) const { return intersect(other).empty(); }

VarTuple VarTuple::minus(const VarTuple& other) const {
    VarTuple r;
    std::set_difference(vars_.begin(), vars_.end(), other.vars_.begin(), other.vars_.end(),
                        std::back_inserter(r.vars_));
    return r;
}

VarTuple VarTuple::unite(const VarTuple& other) const {
    VarTuple r;
    std::set_union(vars_.begin(), vars_.end(), other.vars_.begin(), other.vars_.end(),
                   std::back_inserter(r.vars_));
    return r;
}

VarTuple VarTuple::intersect(const VarTuple& other) const {
    VarTuple r;
    std::set_intersection(vars_.begin(), vars_.end(), other.vars_.begin(), other.vars_.end(),
                          std::back_inserter(r.vars_));
    return r;
}

VarTuple merge_tuples(const VarTuple& a, const VarTuple& b) {
    auto common = a.intersect(b);
    if (!common.empty())
        throw std::invalid_argument("tuple merge overlaps on '" + common.vars().front() + "'");
    return a.unite(b);
}

bool Const::is_literal() const {
    return !id.empty() && std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isdigit(c); });
}

VarTuple Intervention::vars() const {
    std::vector<std::string> v;
    for (const auto& a : assigns) v.push_back(a.var);
    return VarTuple(std::move(v));
}

std::vector<Const> Intervention::values() const {
    std::vector<Const> v;
    for (const auto& a : assigns) v.push_back(a.value);
    return v;
}

std::vector<Assign> make_assigns(std::vector<Assign> assigns) {
    std::sort(assigns.begin(), assigns.end(),
              [](const Assign& a, const Assign& b) { return a.var < b.var; });
    for (std::size_t i = 1; i < assigns.size(); ++i)
        if (assigns[i].var == assigns[i - 1].var)
            throw std::invalid_argument("duplicate intervention variable '" + assigns[i].var + "'");
    return assigns;
}

GenRef GenRef::then(const Intervention& iv) const {
    GenRef r = *this;
    if (!iv.assigns.empty()) r.steps.push_back(iv);
    return r;
}

std::optional<GenRef> GenRef::parent() const {
    if (steps.empty()) return std::nullopt;
    GenRef r = *this;
    r.steps.pop_back();
    return r;
}

void CondVar::check() const {
    if (fixed.size() != vals.size()) throw std::invalid_argument("fixed values do not match fixed variables");
    if (!target.disjoint(given) || !target.disjoint(fixed) || !given.disjoint(fixed))
        throw std::invalid_argument("conditional variable parts overlap");
}

KernelRef KernelRef::fsym(std::string id) {
    KernelRef k;
    k.kind = Kind::Fsym;
    k.id = std::move(id);
    return k;
}

KernelRef KernelRef::canon(GenRef g, CondVar cv) {
    cv.check();
    KernelRef k;
    k.kind = Kind::Canon;
    k.gen = std::move(g);
    k.cv = std::move(cv);
    return k;
}

KernelRef KernelRef::cond(CondVar cv) {
    cv.check();
    KernelRef k;
    k.kind = Kind::Cond;
    k.cv = std::move(cv);
    return k;
}

TermP t_vars(VarTuple v) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Vars;
    t->vars = std::move(v);
    return t;
}

TermP t_var(const std::string& v) { return t_vars(VarTuple::single(v)); }

TermP t_name(std::string id) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Name;
    t->id = std::move(id);
    return t;
}

TermP t_canon_name(GenRef g, VarTuple v) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::CanonName;
    t->gen = std::move(g);
    t->vars = std::move(v);
    return t;
}

TermP t_const(std::string id) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Const;
    t->id = std::move(id);
    return t;
}

TermP t_app(KernelRef head, std::vector<TermP> args) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::App;
    t->head = std::move(head);
    t->args = std::move(args);
    return t;
}

TermP t_margin(TermP body, VarTuple keep) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Margin;
    t->vars = std::move(keep);
    t->args = {std::move(body)};
    return t;
}

TermP t_tuple(std::vector<TermP> items) {
    auto t = std::make_shared<Term>();
    t->kind = Term::Kind::Tuple;
    t->args = std::move(items);
    return t;
}

bool PosTarget::operator<(const PosTarget& o) const {
    auto key = [](const PosTarget& p) {
        std::vector<std::string> v;
        for (const auto& c : p.vals) v.push_back(c.id);
        return std::make_tuple(p.vars.vars(), p.fixed.vars(), v);
    };
    return key(*this) < key(o);
}

namespace {

std::shared_ptr<Formula> node(Formula::Kind k) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    return f;
}

const std::map<std::string, std::size_t>& pred_arity() {
    static const std::map<std::string, std::size_t> m = {
        {"pa", 2}, {"npa", 2}, {"anc", 2}, {"nanc", 2}, {"allnanc", 3}, {"dsep", 3}};
    return m;
}

}  // namespace

FormulaP f_top() { return node(Formula::Kind::Top); }

FormulaP f_pos(VarTuple v) {
    PosTarget p;
    p.vars = std::move(v);
    return f_pos(std::move(p));
}

FormulaP f_pos(PosTarget p) {
    if (p.fixed.size() != p.vals.size() || !p.fixed.subset_of(p.vars))
        throw std::invalid_argument("malformed conditional positivity target");
    auto f = node(Formula::Kind::Pos);
    f->pos = std::move(p);
    return f;
}

FormulaP f_cpred(std::string name, std::vector<VarTuple> args) {
    if (!is_causal_pred(name)) throw std::invalid_argument("unknown causal predicate '" + name + "'");
    if (args.size() != causal_pred_arity(name))
        throw std::invalid_argument("arity mismatch for causal predicate '" + name + "'");
    auto f = node(Formula::Kind::CPred);
    f->pred = std::move(name);
    f->tuples = std::move(args);
    return f;
}

FormulaP f_eq(TermP l, TermP r) {
    auto f = node(Formula::Kind::EqTerm);
    f->lt = std::move(l);
    f->rt = std::move(r);
    return f;
}

FormulaP f_keq(KernelRef l, KernelRef r) {
    auto f = node(Formula::Kind::EqKernel);
    f->lk = std::move(l);
    f->rk = std::move(r);
    return f;
}

FormulaP f_not(FormulaP a) {
    auto f = node(Formula::Kind::Not);
    f->a = std::move(a);
    return f;
}

FormulaP f_and(FormulaP a, FormulaP b) {
    auto f = node(Formula::Kind::And);
    f->a = std::move(a);
    f->b = std::move(b);
    return f;
}

FormulaP f_imp(FormulaP a, FormulaP b) { return f_not(f_and(std::move(a), f_not(std::move(b)))); }

FormulaP f_iff(FormulaP a, FormulaP b) { return f_and(f_imp(a, b), f_imp(b, a)); }

FormulaP f_or(FormulaP a, FormulaP b) { return f_not(f_and(f_not(std::move(a)), f_not(std::move(b)))); }

FormulaP f_modal(Intervention iv, FormulaP a) {
    if (iv.assigns.empty()) return a;
    iv.assigns = make_assigns(std::move(iv.assigns));
    auto f = node(Formula::Kind::Modal);
    f->iv = std::move(iv);
    f->a = std::move(a);
    return f;
}

FormulaP f_eager(std::vector<Assign> assigns, FormulaP a) {
    return f_modal(Intervention{false, std::move(assigns)}, std::move(a));
}

FormulaP f_lazy(std::vector<Assign> assigns, FormulaP a) {
    return f_modal(Intervention{true, std::move(assigns)}, std::move(a));
}

FormulaP f_conj(const std::vector<FormulaP>& parts) {
    if (parts.empty()) return f_top();
    FormulaP acc = parts.front();
    for (std::size_t i = 1; i < parts.size(); ++i) acc = f_and(acc, parts[i]);
    return acc;
}

bool as_imp(const FormulaP& f, FormulaP& lhs, FormulaP& rhs) {
    if (f->kind != Formula::Kind::Not || f->a->kind != Formula::Kind::And) return false;
    if (f->a->b->kind != Formula::Kind::Not) return false;
    lhs = f->a->a;
    rhs = f->a->b->a;
    return true;
}

bool as_iff(const FormulaP& f, FormulaP& lhs, FormulaP& rhs) {
    if (f->kind != Formula::Kind::And) return false;
    FormulaP a1, b1, a2, b2;
    if (!as_imp(f->a, a1, b1) || !as_imp(f->b, a2, b2)) return false;
    if (!same_formula(a1, b2) || !same_formula(b1, a2)) return false;
    lhs = a1;
    rhs = b1;
    return true;
}

bool is_causal_pred(const std::string& name) { return pred_arity().count(name) > 0; }

std::size_t causal_pred_arity(const std::string& name) {
    auto it = pred_arity().find(name);
    if (it == pred_arity().end()) throw std::invalid_argument("unknown causal predicate '" + name + "'");
    return it->second;
}

TermP substitute(const TermP& u, const std::string& x, const TermP& r) {
    switch (u->kind) {
    case Term::Kind::Vars: {
        if (!u->vars.contains(x)) return u;
        if (u->vars.size() == 1) return r;
        std::vector<TermP> items;
        for (const auto& v : u->vars.vars()) items.push_back(v == x ? r : t_var(v));
        return t_tuple(std::move(items));
    }
    case Term::Kind::App:
    case Term::Kind::Tuple: {
        std::vector<TermP> args;
        for (const auto& a : u->args) args.push_back(substitute(a, x, r));
        if (u->kind == Term::Kind::App) return t_app(u->head, std::move(args));
        return t_tuple(std::move(args));
    }
    case Term::Kind::Margin:
        return t_margin(substitute(u->args[0], x, r), u->vars);
    default:
        return u;
    }
}

namespace {

void collect_fv(const TermP& u, std::vector<std::string>& out);

void collect_fv(const KernelRef& k, std::vector<std::string>& out) {
    if (k.kind != KernelRef::Kind::Cond) return;
    for (const auto* t : {&k.cv.target, &k.cv.given, &k.cv.fixed})
        out.insert(out.end(), t->vars().begin(), t->vars().end());
}

void collect_fv(const TermP& u, std::vector<std::string>& out) {
    switch (u->kind) {
    case Term::Kind::Vars:
        out.insert(out.end(), u->vars.vars().begin(), u->vars.vars().end());
        break;
    case Term::Kind::App:
        collect_fv(u->head, out);
        for (const auto& a : u->args) collect_fv(a, out);
        break;
    case Term::Kind::Tuple:
        for (const auto& a : u->args) collect_fv(a, out);
        break;
    case Term::Kind::Margin:
        collect_fv(u->args[0], out);
        break;
    default:
        break;
    }
}

void collect_fv(const FormulaP& f, std::vector<std::string>& out) {
    switch (f->kind) {
    case Formula::Kind::Pos:
        out.insert(out.end(), f->pos.vars.vars().begin(), f->pos.vars.vars().end());
        break;
    case Formula::Kind::CPred:
        for (const auto& t : f->tuples) out.insert(out.end(), t.vars().begin(), t.vars().end());
        break;
    case Formula::Kind::EqTerm:
        collect_fv(f->lt, out);
        collect_fv(f->rt, out);
        break;
    case Formula::Kind::EqKernel:
        collect_fv(f->lk, out);
        collect_fv(f->rk, out);
        break;
    case Formula::Kind::Not:
        collect_fv(f->a, out);
        break;
    case Formula::Kind::And:
        collect_fv(f->a, out);
        collect_fv(f->b, out);
        break;
    case Formula::Kind::Modal:
        for (const auto& a : f->iv.assigns) out.push_back(a.var);
        collect_fv(f->a, out);
        break;
    default:
        break;
    }
}

template <class T>
VarTuple fv_of(const T& x) {
    std::vector<std::string> v;
    collect_fv(x, v);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return VarTuple(std::move(v));
}

}  // namespace

VarTuple free_vars(const TermP& u) { return fv_of(u); }
VarTuple free_vars(const KernelRef& k) { return fv_of(k); }
VarTuple free_vars(const FormulaP& f) { return fv_of(f); }

bool is_rigid(const KernelRef& k) { return k.kind != KernelRef::Kind::Cond; }

bool is_rigid(const TermP& u) {
    switch (u->kind) {
    case Term::Kind::Vars:
        return false;
    case Term::Kind::App:
        if (!is_rigid(u->head)) return false;
        [[fallthrough]];
    case Term::Kind::Tuple:
    case Term::Kind::Margin:
        return std::all_of(u->args.begin(), u->args.end(), [](const TermP& a) { return is_rigid(a); });
    default:
        return true;
    }
}

bool same_kernel(const KernelRef& a, const KernelRef& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case KernelRef::Kind::Fsym:
        return a.id == b.id;
    case KernelRef::Kind::Canon:
        return a.gen == b.gen && a.cv == b.cv;
    case KernelRef::Kind::Cond:
        return a.cv == b.cv;
    }
    return false;
}

bool same_term(const TermP& a, const TermP& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Term::Kind::Vars:
        return a->vars == b->vars;
    case Term::Kind::Name:
    case Term::Kind::Const:
        return a->id == b->id;
    case Term::Kind::CanonName:
        return a->gen == b->gen && a->vars == b->vars;
    case Term::Kind::App:
        if (!same_kernel(a->head, b->head)) return false;
        [[fallthrough]];
    case Term::Kind::Tuple:
    case Term::Kind::Margin:
        if (a->kind == Term::Kind::Margin && a->vars != b->vars) return false;
        if (a->args.size() != b->args.size()) return false;
        for (std::size_t i = 0; i < a->args.size(); ++i)
            if (!same_term(a->args[i], b->args[i])) return false;
        return true;
    }
    return false;
}

bool same_formula(const FormulaP& a, const FormulaP& b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Formula::Kind::Top:
        return true;
    case Formula::Kind::Pos:
        return a->pos == b->pos;
    case Formula::Kind::CPred:
        return a->pred == b->pred && a->tuples == b->tuples;
    case Formula::Kind::EqTerm:
        return same_term(a->lt, b->lt) && same_term(a->rt, b->rt);
    case Formula::Kind::EqKernel:
        return same_kernel(a->lk, b->lk) && same_kernel(a->rk, b->rk);
    case Formula::Kind::Not:
        return same_formula(a->a, b->a);
    case Formula::Kind::And:
        return same_formula(a->a, b->a) && same_formula(a->b, b->b);
    case Formula::Kind::Modal:
        return a->iv == b->iv && same_formula(a->a, b->a);
    }
    return false;
}

namespace {

void cdv_kernel(const KernelRef& k, std::set<PosTarget>& out) {
    if (k.kind != KernelRef::Kind::Cond) return;
    PosTarget plain;
    plain.vars = merge_tuples(k.cv.given, k.cv.fixed);
    if (!plain.vars.empty()) out.insert(plain);
    if (!k.cv.fixed.empty()) {
        PosTarget cond = plain;
        cond.fixed = k.cv.fixed;
        cond.vals = k.cv.vals;
        out.insert(cond);
    }
}

void cdv_term(const TermP& u, std::set<PosTarget>& out) {
    if (u->kind == Term::Kind::App) cdv_kernel(u->head, out);
    for (const auto& a : u->args) cdv_term(a, out);
}

void cdv_formula(const FormulaP& f, std::set<PosTarget>& out) {
    switch (f->kind) {
    case Formula::Kind::EqTerm:
        cdv_term(f->lt, out);
        cdv_term(f->rt, out);
        break;
    case Formula::Kind::EqKernel:
        cdv_kernel(f->lk, out);
        cdv_kernel(f->rk, out);
        break;
    case Formula::Kind::Not:
    case Formula::Kind::Modal:
        cdv_formula(f->a, out);
        break;
    case Formula::Kind::And:
        cdv_formula(f->a, out);
        cdv_formula(f->b, out);
        break;
    default:
        break;
    }
}

}  // namespace

std::set<PosTarget> cond_vars(const FormulaP& f) {
    std::set<PosTarget> out;
    cdv_formula(f, out);
    return out;
}

VarTuple kernel_output_labels(const CondVar& cv) { return cv.target.unite(cv.given); }

std::optional<std::vector<std::string>> term_labels(const TermP& u) {
    switch (u->kind) {
    case Term::Kind::Vars:
    case Term::Kind::CanonName:
        return u->vars.vars();
    case Term::Kind::Margin:
        return u->vars.vars();
    case Term::Kind::App:
        if (u->head.kind == KernelRef::Kind::Fsym) return std::nullopt;
        return kernel_output_labels(u->head.cv).vars();
    case Term::Kind::Tuple: {
        std::vector<std::string> all;
        for (const auto& a : u->args) {
            auto l = term_labels(a);
            if (!l) return std::nullopt;
            all.insert(all.end(), l->begin(), l->end());
        }
        auto sorted = all;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return std::nullopt;
        return all;
    }
    default:
        return std::nullopt;
    }
}

}  // namespace stacl
