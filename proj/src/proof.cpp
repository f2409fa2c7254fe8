#include "stacl/proof.hpp"

#include "stacl/diagram.hpp"
#include "stacl/generator.hpp"
#include "stacl/parser.hpp"
#include "stacl/semantics.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <stdexcept>
#include <type_traits>

namespace stacl {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Reads typed metavariables and remembers which were consumed.
class Binder {
public:
    explicit Binder(const Bindings& b) : b_(b) {}

    bool has(const std::string& k) const { return b_.count(k) > 0; }

    const std::string& text(const std::string& k) {
        auto it = b_.find(k);
        if (it == b_.end()) fail("missing binding '" + k + "'");
        used_.insert(k);
        return it->second;
    }
    VarTuple tuple(const std::string& k) {
        return parsed(k, [](const std::string& s) { return parse_var_tuple(s); });
    }
    VarTuple tuple_or_empty(const std::string& k) { return has(k) ? tuple(k) : VarTuple(); }
    std::vector<Assign> assigns(const std::string& k) {
        auto a = assigns_or_empty(k);
        if (a.empty()) fail("binding '" + k + "' needs at least one assignment");
        return a;
    }
    std::vector<Assign> assigns_or_empty(const std::string& k) {
        if (!has(k)) return {};
        const auto& s = text(k);
        if (s.find_first_not_of(" \t") == std::string::npos) return {};
        return parsed(k, [](const std::string& t) { return make_assigns(parse_assigns(t)); });
    }
    TermP term(const std::string& k) {
        return parsed(k, [](const std::string& s) { return parse_term(s); });
    }
    KernelRef kernel(const std::string& k) {
        return parsed(k, [](const std::string& s) { return parse_kernel(s); });
    }
    FormulaP formula(const std::string& k) {
        return parsed(k, [](const std::string& s) { return parse_formula(s); });
    }
    void finish() const {
        for (const auto& [k, v] : b_)
            if (!used_.count(k)) fail("unexpected binding '" + k + "'");
    }

private:
    template <class F>
    std::invoke_result_t<F, const std::string&> parsed(const std::string& k, F f) {
        const std::string& s = text(k);
        try {
            return f(s);
        } catch (const ParseError& e) {
            fail("binding '" + k + "': " + e.what());
        } catch (const std::invalid_argument& e) {
            fail("binding '" + k + "': " + e.what());
        }
    }

    const Bindings& b_;
    std::set<std::string> used_;
};

struct RuleCtx {
    GenRef gen;
    const Model* model = nullptr;
};

VarTuple vars_of(const std::vector<Assign>& a) {
    std::vector<std::string> v;
    for (const auto& x : a) v.push_back(x.var);
    return VarTuple(v);
}

std::vector<Assign> combine(const std::vector<Assign>& a, const std::vector<Assign>& b) {
    std::vector<Assign> all = a;
    all.insert(all.end(), b.begin(), b.end());
    return make_assigns(all);
}

void require_disjoint(const std::vector<std::pair<std::string, VarTuple>>& parts) {
    for (std::size_t i = 0; i < parts.size(); ++i)
        for (std::size_t j = i + 1; j < parts.size(); ++j)
            if (!parts[i].second.disjoint(parts[j].second))
                fail("disjointness: " + parts[i].first + " and " + parts[j].first + " overlap");
}

void require_nonempty(const std::string& name, const VarTuple& v) {
    if (v.empty()) fail("binding '" + name + "' must be a non-empty tuple");
}

KernelRef cond(const VarTuple& y, const VarTuple& z) { return KernelRef::cond(CondVar{y, z, {}, {}}); }

KernelRef cond_at(const VarTuple& y, const VarTuple& z, const std::vector<Assign>& a) {
    CondVar cv{y, z, vars_of(a), {}};
    for (const auto& x : a) cv.vals.push_back(x.value);
    cv.check();
    return KernelRef::cond(cv);
}

FormulaP dsep(const VarTuple& x, const VarTuple& y, const VarTuple& z) { return f_cpred("dsep", {x, y, z}); }
FormulaP pred2(const std::string& p, const VarTuple& x, const VarTuple& y) { return f_cpred(p, {x, y}); }
FormulaP E(const std::vector<Assign>& a, FormulaP f) { return f_eager(a, std::move(f)); }
FormulaP L(const std::vector<Assign>& a, FormulaP f) { return f_lazy(a, std::move(f)); }

TermP consts_term(const std::vector<Assign>& a) {
    if (a.size() == 1) return t_const(a[0].value.id);
    std::vector<TermP> items;
    for (const auto& x : a) items.push_back(t_const(x.value.id));
    return t_tuple(items);
}

TermP rigid_name(Binder& B, const std::string& k) {
    auto t = B.term(k);
    if (t->kind != Term::Kind::Name && t->kind != Term::Kind::CanonName)
        fail("binding '" + k + "' must be a name");
    return t;
}

KernelRef function_symbol(Binder& B, const std::string& k) {
    auto f = B.kernel(k);
    if (!f.is_function()) fail("binding '" + k + "' must be a function symbol");
    return f;
}

FormulaP pos_conj(const std::set<PosTarget>& s) {
    std::vector<FormulaP> parts;
    for (const auto& p : s) parts.push_back(f_pos(p));
    return f_conj(parts);
}

FormulaP with_pos(FormulaP head, const std::set<PosTarget>& s) {
    return s.empty() ? head : f_and(std::move(head), pos_conj(s));
}

// ---------------------------------------------------------------------------
// Replacement of equal terms or kernels (Eq2).

struct Replacer {
    enum class Mode { Term, Function, Guarded };
    Mode mode = Mode::Term;
    TermP u1, u2;
    KernelRef k1, k2;

    bool formula(const FormulaP& a, const FormulaP& b, bool modal) const {
        if (a->kind != b->kind) return false;
        switch (a->kind) {
        case Formula::Kind::Top:
            return true;
        case Formula::Kind::Pos:
            return a->pos == b->pos;
        case Formula::Kind::CPred:
            return a->pred == b->pred && a->tuples == b->tuples;
        case Formula::Kind::EqTerm:
            return term(a->lt, b->lt, true, modal) && term(a->rt, b->rt, true, modal);
        case Formula::Kind::EqKernel:
            return side(a->lk, b->lk, a->rk, modal) && side(a->rk, b->rk, a->lk, modal);
        case Formula::Kind::Not:
            return formula(a->a, b->a, modal);
        case Formula::Kind::And:
            return formula(a->a, b->a, modal) && formula(a->b, b->b, modal);
        case Formula::Kind::Modal:
            return a->iv == b->iv && formula(a->a, b->a, true);
        }
        return false;
    }

    bool term(const TermP& a, const TermP& b, bool admissible, bool modal) const {
        if (same_term(a, b)) return true;
        if (mode == Mode::Term && admissible && same_term(a, u1) && same_term(b, u2) &&
            (!modal || (is_rigid(u1) && is_rigid(u2))))
            return true;
        if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
        switch (a->kind) {
        case Term::Kind::App:
            if (!head(a->head, b->head)) return false;
            for (std::size_t i = 0; i < a->args.size(); ++i)
                if (!term(a->args[i], b->args[i], admissible && a->args.size() == 1, modal)) return false;
            return true;
        case Term::Kind::Margin:
            return a->vars == b->vars && term_labels(a->args[0]) == term_labels(b->args[0]) &&
                   term(a->args[0], b->args[0], admissible, modal);
        case Term::Kind::Tuple:
            for (std::size_t i = 0; i < a->args.size(); ++i)
                if (!term(a->args[i], b->args[i], admissible && a->args.size() == 1, modal)) return false;
            return true;
        default:
            return false;
        }
    }

    bool replaced(const KernelRef& a, const KernelRef& b) const {
        return mode != Mode::Term && same_kernel(a, k1) && same_kernel(b, k2);
    }

    bool head(const KernelRef& a, const KernelRef& b) const {
        return same_kernel(a, b) || (mode == Mode::Function && replaced(a, b));
    }

    bool side(const KernelRef& a, const KernelRef& b, const KernelRef& other, bool modal) const {
        if (same_kernel(a, b)) return true;
        if (!replaced(a, b)) return false;
        if (mode == Mode::Function) return true;
        if (modal) return false;
        if (other.kind == KernelRef::Kind::Fsym || same_kernel(other, k1)) return true;
        return other.kind == KernelRef::Kind::Canon && other.cv.target == k1.cv.target &&
               other.cv.given == k1.cv.given;
    }
};

// ---------------------------------------------------------------------------
// Occurrences of a conditional variable, numbered in preorder.

struct CondSite {
    std::size_t index;
    bool kernel_side;         // a side of a kernel equation (otherwise a function head)
    const KernelRef* other;   // the opposite side for kernel equations
    bool modal;
};

struct CondRewriter {
    CondVar from;
    std::function<std::optional<KernelRef>(const CondSite&)> pick;
    std::size_t count = 0;

    KernelRef kernel(const KernelRef& k, bool kside, const KernelRef* other, bool modal) {
        if (k.kind != KernelRef::Kind::Cond || !(k.cv == from)) return k;
        auto r = pick(CondSite{count++, kside, other, modal});
        return r ? *r : k;
    }

    TermP term(const TermP& u, bool modal) {
        if (u->kind != Term::Kind::App && u->args.empty()) return u;
        auto t = std::make_shared<Term>(*u);
        if (u->kind == Term::Kind::App) t->head = kernel(u->head, false, nullptr, modal);
        for (auto& a : t->args) a = term(a, modal);
        return t;
    }

    FormulaP formula(const FormulaP& f, bool modal) {
        auto g = std::make_shared<Formula>(*f);
        switch (f->kind) {
        case Formula::Kind::EqTerm:
            g->lt = term(f->lt, modal);
            g->rt = term(f->rt, modal);
            break;
        case Formula::Kind::EqKernel:
            g->lk = kernel(f->lk, true, &f->rk, modal);
            g->rk = kernel(f->rk, true, &f->lk, modal);
            break;
        case Formula::Kind::Not:
            g->a = formula(f->a, modal);
            break;
        case Formula::Kind::And:
            g->a = formula(f->a, modal);
            g->b = formula(f->b, modal);
            break;
        case Formula::Kind::Modal:
            g->a = formula(f->a, true);
            break;
        default:
            break;
        }
        return g;
    }
};

// Rejects any world-dependent content other than the conditional variable
// y|z (and, when z is empty, the variable tuple y itself).
void require_only_cond(const FormulaP& f, const CondVar& only, bool allow_vars, const std::string& rule) {
    std::function<void(const KernelRef&)> kern = [&](const KernelRef& k) {
        if (k.kind == KernelRef::Kind::Cond && !(k.cv == only))
            fail(rule + ": conditional variable " + to_string(k) + " is not allowed");
    };
    std::function<void(const TermP&)> term = [&](const TermP& u) {
        if (u->kind == Term::Kind::Vars && !(allow_vars && u->vars == only.target))
            fail(rule + ": variable tuple " + to_string(u) + " is not allowed");
        if (u->kind == Term::Kind::App) kern(u->head);
        for (const auto& a : u->args) term(a);
    };
    std::function<void(const FormulaP&)> walk = [&](const FormulaP& g) {
        switch (g->kind) {
        case Formula::Kind::Pos:
        case Formula::Kind::CPred:
        case Formula::Kind::Modal:
            fail(rule + ": " + to_string(g) + " is not allowed in the formula");
        case Formula::Kind::EqTerm:
            term(g->lt);
            term(g->rt);
            break;
        case Formula::Kind::EqKernel:
            kern(g->lk);
            kern(g->rk);
            break;
        case Formula::Kind::Not:
            walk(g->a);
            break;
        case Formula::Kind::And:
            walk(g->a);
            walk(g->b);
            break;
        default:
            break;
        }
    };
    walk(f);
}

std::set<std::size_t> parse_indices(const std::string& s) {
    std::set<std::size_t> out;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        if (cur.find_first_not_of("0123456789") != std::string::npos) fail("bad occurrence index '" + cur + "'");
        out.insert(static_cast<std::size_t>(std::stoul(cur)));
        cur.clear();
    };
    for (char c : s) {
        if (c == ',' || c == ' ') flush();
        else cur += c;
    }
    flush();
    return out;
}

TermP term_of(const CausalTerm& t) {
    switch (t.kind) {
    case CausalTerm::Kind::Name:
        return t_name(t.id);
    case CausalTerm::Kind::Const:
        return t_const(t.id);
    case CausalTerm::Kind::Var:
        return t_var(t.id);
    case CausalTerm::Kind::App: {
        std::vector<TermP> args;
        for (const auto& a : t.args) args.push_back(term_of(a));
        return t_app(KernelRef::fsym(t.id), args);
    }
    }
    fail("bad causal term");
}

DataGenerator concrete(const RuleCtx& c, const std::string& rule) {
    if (!c.model) fail(rule + " needs a concrete generator");
    if (c.gen.base != c.model->gen.id)
        fail(rule + ": generator '" + to_string(c.gen) + "' is not derived from model '" + c.model->gen.id + "'");
    return apply_steps(c.model->gen, c.gen);
}

FormulaP diagram_fact(const RuleCtx& c, const std::string& rule, const std::string& pred,
                      const std::vector<VarTuple>& args) {
    Diagram d(concrete(c, rule));
    if (!eval_causal_pred(d, pred, args)) fail(rule + ": " + pred + " does not hold in the diagram");
    return f_cpred(pred, args);
}

// ---------------------------------------------------------------------------
// Schemas.

using Schema = std::function<FormulaP(Binder&, const RuleCtx&)>;

FormulaP eq2(Binder& B, const RuleCtx&) {
    Replacer r;
    FormulaP premise;
    if (B.has("u1") || B.has("u2")) {
        r.mode = Replacer::Mode::Term;
        r.u1 = B.term("u1");
        r.u2 = B.term("u2");
        premise = f_eq(r.u1, r.u2);
    } else {
        r.k1 = B.kernel("k1");
        r.k2 = B.kernel("k2");
        using K = KernelRef::Kind;
        if (r.k1.is_function() && r.k2.is_function()) {
            if (r.k1.kind != r.k2.kind) fail("Eq2: function symbols of different kinds");
            if (r.k1.kind == K::Canon && (r.k1.cv.target != r.k2.cv.target || r.k1.cv.given != r.k2.cv.given))
                fail("Eq2: canonical symbols with different labels");
            r.mode = Replacer::Mode::Function;
            premise = f_keq(r.k1, r.k2);
        } else if (r.k1.kind == K::Cond && r.k2.kind == K::Cond) {
            if (r.k1.cv.target != r.k2.cv.target || r.k1.cv.given != r.k2.cv.given)
                fail("Eq2: conditional variables must share target and given variables");
            // Cylindrical equality is vacuous between incompatible fixings.
            const auto& c1 = r.k1.cv;
            const auto& c2 = r.k2.cv;
            for (std::size_t i = 0; i < c1.fixed.size(); ++i)
                for (std::size_t j = 0; j < c2.fixed.size(); ++j)
                    if (c1.fixed.vars()[i] == c2.fixed.vars()[j] && !(c1.vals[i] == c2.vals[j]))
                        fail("Eq2: conditional variables fix '" + c1.fixed.vars()[i] + "' to different values");
            r.mode = Replacer::Mode::Guarded;
            auto eq = f_keq(r.k1, r.k2);
            auto s = cond_vars(eq);
            premise = s.empty() ? eq : f_and(pos_conj(s), eq);
        } else {
            fail("Eq2: cannot replace a conditional variable by a function symbol");
        }
    }
    auto phi1 = B.formula("phi1");
    auto phi2 = B.formula("phi2");
    if (!r.formula(phi1, phi2, false)) fail("Eq2: phi2 is not phi1 with admissible occurrences replaced");
    return f_imp(premise, f_imp(phi1, phi2));
}

FormulaP simul(Binder& B, bool lazy) {
    auto a1 = B.assigns("a1");
    auto a2 = B.assigns("a2");
    auto phi = B.formula("phi");
    auto x2 = vars_of(a2);
    std::vector<Assign> rest;
    for (const auto& a : a1)
        if (!x2.contains(a.var)) rest.push_back(a);
    if (lazy && rest.size() != a1.size()) fail("Simul_LI: x1 and x2 must be disjoint");
    auto M = lazy ? L : E;
    return f_imp(M(a1, M(a2, phi)), M(combine(rest, a2), phi));
}

FormulaP split(Binder& B, bool lazy) {
    auto a1 = B.assigns("a1");
    auto a2 = B.assigns("a2");
    auto phi = B.formula("phi");
    require_disjoint({{"x1", vars_of(a1)}, {"x2", vars_of(a2)}});
    auto M = lazy ? L : E;
    return f_imp(M(combine(a1, a2), phi), M(a1, M(a2, phi)));
}

FormulaP cmp(Binder& B, bool lazy) {
    auto a1 = B.assigns("a1");
    auto a2 = B.assigns("a2");
    auto x3 = B.tuple("x3");
    auto u = B.term("u");
    require_nonempty("x3", x3);
    require_disjoint({{"x1", vars_of(a1)}, {"x2", vars_of(a2)}, {"x3", x3}});
    auto M = lazy ? L : E;
    auto eq3 = f_eq(t_vars(x3), u);
    return f_imp(f_and(M(a1, f_eq(t_vars(vars_of(a2)), consts_term(a2))), M(a1, eq3)), M(combine(a1, a2), eq3));
}

FormulaP rpt(Binder& B, bool lazy) {
    auto a = B.assigns("a");
    auto phi = B.formula("phi");
    auto M = lazy ? L : E;
    return f_imp(M(a, phi), M(a, M(a, phi)));
}

FormulaP distr_not(Binder& B, bool lazy) {
    auto a = B.assigns("a");
    auto phi = B.formula("phi");
    auto M = lazy ? L : E;
    return f_iff(M(a, f_not(phi)), f_not(M(a, phi)));
}

FormulaP distr_and(Binder& B, bool lazy) {
    auto a = B.assigns("a");
    auto p1 = B.formula("phi1");
    auto p2 = B.formula("phi2");
    auto M = lazy ? L : E;
    return f_iff(M(a, f_and(p1, p2)), f_and(M(a, p1), M(a, p2)));
}

// Common metavariables of the d-separation schemas.
struct XYZ {
    VarTuple x, y, z;
};

XYZ xyz(Binder& B) {
    XYZ r{B.tuple("x"), B.tuple("y"), B.tuple_or_empty("z")};
    require_nonempty("x", r.x);
    require_nonempty("y", r.y);
    require_disjoint({{"x", r.x}, {"y", r.y}, {"z", r.z}});
    return r;
}

FormulaP do1(Binder& B) {
    auto v = B.assigns_or_empty("v");
    auto x = B.tuple("x"), y = B.tuple("y"), z = B.tuple_or_empty("z");
    auto phi0 = B.formula("phi0");
    auto occ = B.has("occ") ? parse_indices(B.text("occ")) : std::set<std::size_t>{};
    require_nonempty("x", x);
    require_nonempty("y", y);
    require_disjoint({{"v", vars_of(v)}, {"x", x}, {"y", y}, {"z", z}});
    CondRewriter rw;
    rw.from = CondVar{y, z, {}, {}};
    KernelRef to = cond(y, merge_tuples(z, x));
    rw.pick = [&](const CondSite& s) -> std::optional<KernelRef> {
        if (!occ.count(s.index)) return std::nullopt;
        if (!s.kernel_side || s.modal || s.other->kind == KernelRef::Kind::Fsym)
            fail("Do1: occurrence " + std::to_string(s.index) + " is not admissible");
        return to;
    };
    auto phi1 = rw.formula(phi0, false);
    if (!occ.empty() && *occ.rbegin() >= rw.count)
        fail("Do1: occurrence index " + std::to_string(*occ.rbegin()) + " out of range");
    auto s = cond_vars(phi0);
    for (const auto& p : cond_vars(phi1)) s.insert(p);
    auto pre = with_pos(dsep(x, y, z), s);
    return f_imp(E(v, pre), f_iff(E(v, phi0), E(v, phi1)));
}

FormulaP do2(Binder& B) {
    auto v = B.assigns_or_empty("v");
    auto a = B.assigns("x");
    auto y = B.tuple("y"), z = B.tuple_or_empty("z");
    auto phi0 = B.formula("phi0");
    auto x = vars_of(a);
    require_nonempty("y", y);
    require_disjoint({{"v", vars_of(v)}, {"x", x}, {"y", y}, {"z", z}});
    CondVar from{y, z, {}, {}};
    require_only_cond(phi0, from, false, "Do2");
    CondRewriter rw;
    rw.from = from;
    KernelRef to = cond_at(y, z, a);
    rw.pick = [&](const CondSite&) -> std::optional<KernelRef> { return to; };
    auto phi1 = rw.formula(phi0, false);
    auto s = cond_vars(phi0);
    for (const auto& p : cond_vars(phi1)) s.insert(p);
    auto pre = with_pos(dsep(x, y, z), s);
    return f_imp(E(v, L(a, pre)), f_iff(E(combine(v, a), phi0), E(v, phi1)));
}

FormulaP do3(Binder& B) {
    auto v = B.assigns_or_empty("v");
    auto a1 = B.assigns_or_empty("x1");
    auto a2 = B.assigns_or_empty("x2");
    auto y = B.tuple("y"), z = B.tuple_or_empty("z");
    auto phi = B.formula("phi");
    auto x = merge_tuples(vars_of(a1), vars_of(a2));
    require_nonempty("x1::x2", x);
    require_nonempty("y", y);
    require_disjoint({{"v", vars_of(v)}, {"x", x}, {"y", y}, {"z", z}});
    require_only_cond(phi, CondVar{y, z, {}, {}}, z.empty(), "Do3");
    auto inner = z.empty() ? dsep(x, y, z) : f_and(dsep(x, y, z), f_pos(z));
    auto pre = f_and(f_cpred("allnanc", {vars_of(a1), x, y}), E(a1, inner));
    auto all = combine(combine(v, a1), a2);
    return f_imp(E(v, pre), f_iff(E(v, phi), E(all, phi)));
}

const std::map<std::string, Schema>& schemas() {
    static const std::map<std::string, Schema> table = [] {
        std::map<std::string, Schema> t;
        // Propositional, equality and intervention axioms (AX)
        t["Eq1"] = [](Binder& B, const RuleCtx&) {
            if (B.has("u")) {
                auto u = B.term("u");
                return f_eq(u, u);
            }
            auto k = B.kernel("k");
            return f_keq(k, k);
        };
        t["Eq2"] = eq2;
        t["EqN"] = [](Binder& B, const RuleCtx& c) {
            auto x = B.tuple("x");
            require_nonempty("x", x);
            return f_eq(t_canon_name(c.gen, x), t_vars(x));
        };
        t["EqF"] = [](Binder& B, const RuleCtx& c) {
            auto k = B.kernel("k");
            if (k.kind != KernelRef::Kind::Cond) fail("EqF: binding 'k' must be a conditional variable");
            return f_keq(KernelRef::canon(c.gen, k.cv), k);
        };
        t["PD"] = [](Binder& B, const RuleCtx&) {
            auto x = B.tuple("x"), y = B.tuple("y");
            auto n0 = rigid_name(B, "n0"), n1 = rigid_name(B, "n1");
            auto f = B.kernel("f");
            require_nonempty("x", x);
            require_nonempty("y", y);
            require_disjoint({{"x", x}, {"y", y}});
            if (f.kind != KernelRef::Kind::Canon || f.cv.target != y || f.cv.given != x)
                fail("PD: f must be a canonical symbol for y given x");
            auto pre = f_conj({f_pos(x), f_eq(n0, t_vars(x)), f_keq(f, cond(y, x)),
                               f_eq(n1, t_vars(merge_tuples(x, y)))});
            return f_imp(pre, f_eq(n1, t_app(f, {n0})));
        };
        t["MPD"] = [](Binder& B, const RuleCtx&) {
            auto x1 = B.tuple("x1"), x2 = B.tuple("x2");
            require_nonempty("x2", x2);
            if (!x2.subset_of(x1)) fail("MPD: x2 must be a subset of x1");
            return f_eq(t_margin(t_vars(x1), x2), t_vars(x2));
        };
        t["Effect_EI"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            return E(a, f_eq(t_vars(vars_of(a)), consts_term(a)));
        };
        t["Eq_EI"] = [](Binder& B, const RuleCtx&) {
            auto u1 = B.term("u1"), u2 = B.term("u2");
            auto a = B.assigns("a");
            if (!free_vars(u1).empty() || !free_vars(u2).empty()) fail("Eq_EI: u1 and u2 must have no free variables");
            auto eq = f_eq(u1, u2);
            return f_iff(eq, E(a, eq));
        };
        t["Split_EI"] = [](Binder& B, const RuleCtx&) { return split(B, false); };
        t["Simul_EI"] = [](Binder& B, const RuleCtx&) { return simul(B, false); };
        t["Rpt_EI"] = [](Binder& B, const RuleCtx&) { return rpt(B, false); };
        t["Cmp_EI"] = [](Binder& B, const RuleCtx&) { return cmp(B, false); };
        t["DistrEI_not"] = [](Binder& B, const RuleCtx&) { return distr_not(B, false); };
        t["DistrEI_and"] = [](Binder& B, const RuleCtx&) { return distr_and(B, false); };
        t["Effect_LI"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto u = B.term("u");
            if (!free_vars(u).empty()) fail("Effect_LI: u must have no free variables");
            // With several variables the lazy step rewrites the mechanisms among them.
            if (a.size() != 1) fail("Effect_LI: x must be a single variable");
            auto eq = f_eq(t_vars(vars_of(a)), u);
            return f_iff(eq, L(a, eq));
        };
        t["Cond_LI"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto f = function_symbol(B, "f");
            auto y = B.tuple("y"), z = B.tuple_or_empty("z");
            require_nonempty("y", y);
            require_disjoint({{"x", vars_of(a)}, {"y", y}, {"z", z}});
            auto eq = f_keq(f, cond_at(y, z, a));
            return f_iff(eq, L(a, eq));
        };
        t["Split_LI"] = [](Binder& B, const RuleCtx&) { return split(B, true); };
        t["Simul_LI"] = [](Binder& B, const RuleCtx&) { return simul(B, true); };
        t["Rpt_LI"] = [](Binder& B, const RuleCtx&) { return rpt(B, true); };
        t["Cmp_LI"] = [](Binder& B, const RuleCtx&) { return cmp(B, true); };
        t["DistrLI_not"] = [](Binder& B, const RuleCtx&) { return distr_not(B, true); };
        t["DistrLI_and"] = [](Binder& B, const RuleCtx&) { return distr_and(B, true); };
        t["Expd_EILI"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto n = rigid_name(B, "n");
            auto y = B.tuple("y");
            require_nonempty("y", y);
            require_disjoint({{"x", vars_of(a)}, {"y", y}});
            auto eq = f_eq(n, t_vars(y));
            return f_iff(E(a, eq), L(a, eq));
        };
        t["Excd_EILI"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto f = function_symbol(B, "f");
            auto y = B.tuple("y"), z = B.tuple_or_empty("z");
            require_nonempty("y", y);
            require_disjoint({{"x", vars_of(a)}, {"y", y}, {"z", z}});
            auto eq = f_keq(f, cond(y, z));
            return f_imp(f_pos(z), f_iff(E(a, eq), L(a, eq)));
        };
        // Causal-predicate axioms (AXCP)
        t["DsepCInd1"] = [](Binder& B, const RuleCtx&) {
            auto [x, y, z] = xyz(B);
            return f_imp(f_and(dsep(x, y, z), f_pos(z)), f_keq(cond(y, merge_tuples(z, x)), cond(y, z)));
        };
        t["DsepCInd2"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto x = vars_of(a), y = B.tuple("y"), z = B.tuple_or_empty("z");
            require_nonempty("y", y);
            require_disjoint({{"x", x}, {"y", y}, {"z", z}});
            return f_imp(f_and(dsep(x, y, z), f_pos(z)), f_keq(cond_at(y, z, a), cond(y, z)));
        };
        t["DsepSm"] = [](Binder& B, const RuleCtx&) {
            auto [x, y, z] = xyz(B);
            return f_iff(dsep(x, y, z), dsep(y, x, z));
        };
        t["DsepDc"] = [](Binder& B, const RuleCtx&) {
            auto [x, y, z] = xyz(B);
            auto y2 = B.tuple("y2");
            require_nonempty("y2", y2);
            require_disjoint({{"x", x}, {"y", y}, {"y2", y2}, {"z", z}});
            return f_imp(dsep(x, merge_tuples(y, y2), z), f_and(dsep(x, y, z), dsep(x, y2, z)));
        };
        t["DsepWu"] = [](Binder& B, const RuleCtx&) {
            auto [x, y, z] = xyz(B);
            auto v = B.tuple("v");
            require_nonempty("v", v);
            require_disjoint({{"x", x}, {"y", y}, {"v", v}, {"z", z}});
            return f_imp(dsep(x, merge_tuples(y, v), z), dsep(x, y, merge_tuples(z, v)));
        };
        t["DsepCn"] = [](Binder& B, const RuleCtx&) {
            auto [x, y, z] = xyz(B);
            auto v = B.tuple("v");
            require_nonempty("v", v);
            require_disjoint({{"x", x}, {"y", y}, {"v", v}, {"z", z}});
            return f_imp(f_and(dsep(x, y, z), dsep(x, v, merge_tuples(z, y))), dsep(x, merge_tuples(y, v), z));
        };
        auto dsep_on = [](bool lazy, bool on_z, bool into) {
            return [=](Binder& B, const RuleCtx&) {
                auto a = B.assigns("a");
                VarTuple x = on_z ? B.tuple("x") : vars_of(a);
                VarTuple y = B.tuple("y");
                VarTuple z = on_z ? vars_of(a) : B.tuple_or_empty("z");
                require_nonempty("x", x);
                require_nonempty("y", y);
                require_disjoint({{"x", x}, {"y", y}, {"z", z}});
                auto d = dsep(x, y, z);
                auto m = lazy ? L(a, d) : E(a, d);
                return into ? f_imp(d, m) : f_imp(m, d);
            };
        };
        t["Dsep_EI1"] = [dsep_on](Binder& B, const RuleCtx& c) {
            auto f = dsep_on(false, true, false)(B, c);
            // Eager intervention on z can remove a conditioned collider, so z must have no parents.
            if (c.model) {
                Diagram d(concrete(c, "Dsep_EI1"));
                auto z = vars_of(B.assigns("a"));
                for (const auto& v : z.vars())
                    if (!d.parents_of(d.index_of(v)).empty())
                        fail("Dsep_EI1: '" + v + "' has parents in the diagram");
            }
            return f;
        };
        t["Dsep_EI2"] = dsep_on(false, false, true);
        t["Dsep_LI1"] = dsep_on(true, true, false);
        t["Dsep_LI2"] = dsep_on(true, false, true);
        t["Dsep_LI3"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto x = B.tuple("x"), y = B.tuple("y"), z = vars_of(a), z2 = B.tuple_or_empty("z2");
            require_nonempty("x", x);
            require_nonempty("y", y);
            require_disjoint({{"x", x}, {"y", y}, {"z", z}, {"z2", z2}});
            return f_imp(dsep(x, y, merge_tuples(z, z2)), L(a, dsep(x, y, z2)));
        };
        t["Nanc1"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto n = rigid_name(B, "n");
            auto x = vars_of(a), y = B.tuple("y");
            require_nonempty("y", y);
            require_disjoint({{"x", x}, {"y", y}});
            auto eq = f_eq(n, t_vars(y));
            return f_imp(pred2("nanc", x, y), f_iff(eq, E(a, eq)));
        };
        t["Nanc2"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto f = function_symbol(B, "f");
            auto x = vars_of(a), y = B.tuple("y"), z = B.tuple_or_empty("z");
            require_nonempty("y", y);
            require_disjoint({{"x", x}, {"y", y}, {"z", z}});
            auto eq = f_keq(f, cond(y, z));
            return f_imp(f_and(pred2("nanc", x, y), pred2("nanc", x, z)), f_iff(eq, E(a, eq)));
        };
        t["Nanc3"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto x = vars_of(a), y = B.tuple("y");
            require_disjoint({{"x", x}, {"y", y}});
            return f_iff(pred2("nanc", x, y), E(a, pred2("nanc", x, y)));
        };
        t["Nanc4"] = [](Binder& B, const RuleCtx&) {
            auto a = B.assigns("a");
            auto x = vars_of(a), y = B.tuple("y");
            require_nonempty("y", y);
            require_disjoint({{"x", x}, {"y", y}});
            return f_imp(pred2("nanc", x, y), E(a, dsep(x, y, VarTuple())));
        };
        t["Nanc5"] = [](Binder& B, const RuleCtx&) {
            auto [x, y, z] = xyz(B);
            return f_imp(f_and(pred2("nanc", x, z), dsep(x, y, z)), pred2("nanc", x, y));
        };
        t["AllNanc"] = [](Binder& B, const RuleCtx&) {
            auto x = B.tuple("x"), y = B.tuple("y"), z = B.tuple("z");
            require_disjoint({{"x", x}, {"z", z}});
            require_disjoint({{"y", y}, {"z", z}});
            return f_imp(f_cpred("allnanc", {x, y, z}), pred2("nanc", x, z));
        };
        t["PaToNanc"] = [](Binder& B, const RuleCtx&) {
            auto x = B.tuple("x"), y = B.tuple("y");
            require_disjoint({{"x", x}, {"y", y}});
            if (y.size() != 1) fail("PaToNanc: y must be a single variable");
            return f_imp(pred2("pa", x, y), pred2("nanc", y, x));
        };
        t["PaToDsep"] = [](Binder& B, const RuleCtx& c) {
            auto z = B.tuple("z");
            auto a = B.assigns("a");
            auto x = vars_of(a), y = B.tuple("y");
            require_nonempty("y", y);
            require_disjoint({{"x", x}, {"y", y}, {"z", z}});
            // A name shared with a variable outside x opens a path that z cannot block.
            if (c.model) {
                Diagram d(concrete(c, "PaToDsep"));
                for (const auto& v : x.vars())
                    for (auto p : d.parents_of(d.index_of(v))) {
                        if (p < d.endogenous().size()) continue;
                        for (auto ch : d.children_of(p))
                            if (!x.contains(d.endogenous()[ch]))
                                fail("PaToDsep: a name read by x is shared with '" + d.endogenous()[ch] + "'");
                    }
            }
            return f_imp(pred2("pa", z, x), L(a, dsep(x, y, z)));
        };
        t["Do1"] = [](Binder& B, const RuleCtx&) { return do1(B); };
        t["Do2"] = [](Binder& B, const RuleCtx&) { return do2(B); };
        t["Do3"] = [](Binder& B, const RuleCtx&) { return do3(B); };
        // Diagram axioms for a concrete generator (AXGCP)
        t["DG_Eq"] = [](Binder& B, const RuleCtx& c) {
            auto x = B.tuple("x");
            if (x.size() != 1) fail("DG_Eq: x must be a single variable");
            auto g = concrete(c, "DG_Eq");
            const auto& v = x.vars()[0];
            if (!g.defined(v)) fail("DG_Eq: '" + v + "' has no mechanism");
            return f_eq(t_vars(x), term_of(g.at(v)));
        };
        t["DsepDG"] = [](Binder& B, const RuleCtx& c) {
            auto [x, y, z] = xyz(B);
            return diagram_fact(c, "DsepDG", "dsep", {x, y, z});
        };
        t["NancDG"] = [](Binder& B, const RuleCtx& c) {
            auto x = B.tuple("x"), y = B.tuple("y");
            return diagram_fact(c, "NancDG", "nanc", {x, y});
        };
        t["PaDG"] = [](Binder& B, const RuleCtx& c) {
            auto x = B.tuple("x"), y = B.tuple("y");
            return diagram_fact(c, "PaDG", "pa", {x, y});
        };
        return t;
    }();
    return table;
}

const std::map<std::string, Layer>& layers() {
    static const std::map<std::string, Layer> table = [] {
        std::map<std::string, Layer> t;
        for (const char* r : {"PT", "MP", "Hyp", "Deduction", "DG_EI", "DG_LI"}) t[r] = Layer::AX;
        for (const auto& [name, s] : schemas()) t[name] = Layer::AX;
        for (const char* r : {"DsepCInd1", "DsepCInd2", "DsepSm", "DsepDc", "DsepWu", "DsepCn", "Dsep_EI1",
                              "Dsep_EI2", "Dsep_LI1", "Dsep_LI2", "Dsep_LI3", "Nanc1", "Nanc2", "Nanc3", "Nanc4",
                              "Nanc5", "AllNanc", "PaToNanc", "PaToDsep", "Do1", "Do2", "Do3"})
            t[r] = Layer::AXCP;
        for (const char* r : {"DG_Eq", "DsepDG", "NancDG", "PaDG"}) t[r] = Layer::AXGCP;
        return t;
    }();
    return table;
}

// ---------------------------------------------------------------------------
// Propositional reasoning: Tseitin encoding and DPLL over the atoms.

class Cnf {
public:
    int encode(const FormulaP& f) {
        switch (f->kind) {
        case Formula::Kind::Not:
            return -encode(f->a);
        case Formula::Kind::And: {
            auto it = gates_.find(f.get());
            if (it != gates_.end()) return it->second;
            int a = encode(f->a), b = encode(f->b);
            int v = fresh();
            clauses.push_back({-v, a});
            clauses.push_back({-v, b});
            clauses.push_back({v, -a, -b});
            gates_[f.get()] = v;
            return v;
        }
        case Formula::Kind::Top:
            if (!top_) {
                top_ = fresh();
                clauses.push_back({top_});
            }
            return top_;
        default: {
            auto key = to_string(f);
            auto it = atoms_.find(key);
            if (it != atoms_.end()) return it->second;
            int v = fresh();
            atoms_[key] = v;
            atom_vars.push_back(v);
            return v;
        }
        }
    }

    int vars = 0;
    std::vector<std::vector<int>> clauses;
    std::vector<int> atom_vars;

private:
    int fresh() { return ++vars; }
    std::map<std::string, int> atoms_;
    std::map<const Formula*, int> gates_;
    int top_ = 0;
};

bool propagate(const std::vector<std::vector<int>>& clauses, std::vector<signed char>& val) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& c : clauses) {
            int unassigned = 0, last = 0;
            bool sat = false;
            for (int l : c) {
                signed char v = val[static_cast<std::size_t>(std::abs(l))];
                if (v == 0) {
                    ++unassigned;
                    last = l;
                } else if ((v > 0) == (l > 0)) {
                    sat = true;
                    break;
                }
            }
            if (sat) continue;
            if (unassigned == 0) return false;
            if (unassigned == 1) {
                val[static_cast<std::size_t>(std::abs(last))] = last > 0 ? 1 : -1;
                changed = true;
            }
        }
    }
    return true;
}

bool satisfiable(const Cnf& cnf, std::vector<signed char> val) {
    if (!propagate(cnf.clauses, val)) return false;
    for (int v : cnf.atom_vars) {
        if (val[static_cast<std::size_t>(v)] != 0) continue;
        for (signed char b : {1, -1}) {
            auto next = val;
            next[static_cast<std::size_t>(v)] = b;
            if (satisfiable(cnf, next)) return true;
        }
        return false;
    }
    // Every atom is fixed; gates follow by propagation.
    for (const auto& c : cnf.clauses) {
        bool sat = false;
        for (int l : c) {
            signed char x = val[static_cast<std::size_t>(std::abs(l))];
            if (x != 0 && (x > 0) == (l > 0)) sat = true;
        }
        if (!sat) return false;
    }
    return true;
}

std::string path_of(const std::string& parent, std::size_t i) {
    return parent + ".premises[" + std::to_string(i) + "]";
}

std::optional<Rejection> check_node(const DerivationNode& n, const Judgment& j, const Model* m,
                                    const std::string& path) {
    auto r = check_step(n, j, m);
    if (r.premise_judgments.size() == n.premises.size())
        for (std::size_t i = 0; i < n.premises.size(); ++i)
            if (auto rej = check_node(n.premises[i], r.premise_judgments[i], m, path_of(path, i))) return rej;
    if (r.error) return Rejection{path, n.rule + ": " + *r.error};
    return std::nullopt;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

Layer parse_layer(const std::string& s) {
    if (s == "AX") return Layer::AX;
    if (s == "AXCP") return Layer::AXCP;
    if (s == "AXGCP") return Layer::AXGCP;
    fail("unknown layer '" + s + "'");
}

std::string to_string(Layer l) {
    switch (l) {
    case Layer::AX:
        return "AX";
    case Layer::AXCP:
        return "AXCP";
    case Layer::AXGCP:
        return "AXGCP";
    }
    return "?";
}

bool is_known_rule(const std::string& rule) { return layers().count(rule) > 0; }

Layer rule_layer(const std::string& rule) {
    auto it = layers().find(rule);
    if (it == layers().end()) fail("unknown rule '" + rule + "'");
    return it->second;
}

bool is_axiom(const std::string& rule) { return schemas().count(rule) > 0; }

bool needs_generator(const std::string& rule) {
    return rule == "DG_Eq" || rule == "DsepDG" || rule == "NancDG" || rule == "PaDG" || rule == "Dsep_EI1" ||
           rule == "PaToDsep";
}

FormulaP instantiate_axiom(const std::string& rule, const Bindings& b, const GenRef& g, const Model* model) {
    auto it = schemas().find(rule);
    if (it == schemas().end()) fail("'" + rule + "' is not an axiom schema");
    Binder B(b);
    auto f = it->second(B, RuleCtx{g, model});
    B.finish();
    return f;
}

FormulaP derived_schema(const std::string& rule, const Bindings& b) {
    if (rule != "Do1" && rule != "Do2" && rule != "Do3") fail("'" + rule + "' is not a derived schema");
    return instantiate_axiom(rule, b, GenRef{}, nullptr);
}

bool tautological_consequence(const std::vector<FormulaP>& premises, const FormulaP& goal) {
    Cnf cnf;
    for (const auto& p : premises) cnf.clauses.push_back({cnf.encode(p)});
    cnf.clauses.push_back({-cnf.encode(goal)});
    std::vector<signed char> val(static_cast<std::size_t>(cnf.vars) + 1, 0);
    return !satisfiable(cnf, val);
}

StepResult check_step(const DerivationNode& n, const Judgment& j, const Model* model) {
    StepResult r;
    auto premise = [&](const DerivationNode& p, std::vector<FormulaP> ctx, GenRef g) {
        return Judgment{std::move(ctx), std::move(g), j.layer, p.conclusion};
    };
    for (const auto& p : n.premises) r.premise_judgments.push_back(premise(p, j.context, j.gen));
    auto reject = [&](const std::string& msg) {
        r.error = msg;
        return r;
    };
    auto arity = [&](std::size_t k) {
        if (n.premises.size() == k) return true;
        r.premise_judgments.clear();
        r.error = "premise shape: expected " + std::to_string(k) + " premise(s), found " +
                  std::to_string(n.premises.size());
        return false;
    };
    if (!is_known_rule(n.rule)) {
        r.premise_judgments.clear();
        return reject("unknown rule");
    }
    if (rule_layer(n.rule) > j.layer) return reject("not available in layer " + to_string(j.layer));
    if (n.generator && !(*n.generator == j.gen))
        return reject("generator mismatch: node declares " + to_string(*n.generator) + " but the judgment is at " +
                      to_string(j.gen));
    try {
        if (is_axiom(n.rule)) {
            if (!arity(0)) return r;
            if (!model && needs_generator(n.rule)) return reject("side condition: the rule needs a concrete generator");
            auto inst = instantiate_axiom(n.rule, n.bind, j.gen, model);
            if (!same_formula(inst, n.conclusion))
                return reject("conclusion does not match the schema instance " + to_string(inst));
            return r;
        }
        Binder B(n.bind);
        if (n.rule == "Hyp") {
            B.finish();
            if (!arity(0)) return r;
            for (const auto& h : j.context)
                if (same_formula(h, n.conclusion)) return r;
            return reject("conclusion is not a hypothesis");
        }
        if (n.rule == "MP") {
            B.finish();
            if (!arity(2)) return r;
            if (!same_formula(n.premises[1].conclusion, f_imp(n.premises[0].conclusion, n.conclusion)))
                return reject("premise shape: second premise must be the first premise implying the conclusion");
            return r;
        }
        if (n.rule == "PT") {
            B.finish();
            std::vector<FormulaP> ps;
            for (const auto& p : n.premises) ps.push_back(p.conclusion);
            if (!tautological_consequence(ps, n.conclusion))
                return reject("conclusion is not a tautological consequence of the premises");
            return r;
        }
        if (n.rule == "Deduction") {
            B.finish();
            if (!arity(1)) return r;
            FormulaP lhs, rhs;
            if (!as_imp(n.conclusion, lhs, rhs)) return reject("conclusion must be an implication");
            auto ctx = j.context;
            ctx.push_back(lhs);
            r.premise_judgments[0] = premise(n.premises[0], ctx, j.gen);
            if (!same_formula(n.premises[0].conclusion, rhs))
                return reject("premise shape: premise must conclude the consequent");
            return r;
        }
        if (n.rule == "DG_EI" || n.rule == "DG_LI") {
            bool lazy = n.rule == "DG_LI";
            Intervention iv{lazy, B.assigns("a")};
            std::string dir = B.has("dir") ? B.text("dir") : "intro";
            B.finish();
            if (!arity(1)) return r;
            const auto& p = n.premises[0];
            if (dir == "intro") {
                r.premise_judgments[0] = premise(p, {}, j.gen.then(iv));
                if (n.conclusion->kind != Formula::Kind::Modal || !(n.conclusion->iv == iv))
                    return reject("conclusion must be " + to_string(iv) + " applied to the premise");
                if (!same_formula(n.conclusion->a, p.conclusion))
                    return reject("premise shape: premise must be the body of the conclusion");
                return r;
            }
            if (dir != "elim" || lazy) return reject("direction must be " + std::string(lazy ? "intro" : "intro or elim"));
            auto parent = j.gen.parent();
            if (!parent || !(j.gen.steps.back() == iv))
                return reject("generator " + to_string(j.gen) + " does not end with " + to_string(iv));
            r.premise_judgments[0] = premise(p, {}, *parent);
            if (!same_formula(p.conclusion, f_modal(iv, n.conclusion)))
                return reject("premise shape: premise must be " + to_string(iv) + " applied to the conclusion");
            return r;
        }
    } catch (const std::invalid_argument& e) {
        return reject(std::string("side condition: ") + e.what());
    } catch (const std::exception& e) {
        return reject(std::string("side condition: ") + e.what());
    }
    return reject("unknown rule");
}

GenRef Derivation::root_gen() const {
    if (root.generator) return *root.generator;
    return GenRef{model ? model->gen.id : std::string(), {}};
}

std::optional<Rejection> check_derivation(const Derivation& d) {
    Judgment j{d.hypotheses, d.root_gen(), d.layer, d.root.conclusion};
    return check_node(d.root, j, d.model.get(), "root");
}

DerivationNode node_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path + ": node must be an object");
    DerivationNode n;
    try {
        n.rule = j.at("rule").get<std::string>();
        if (j.contains("bind")) {
            for (const auto& [k, v] : j.at("bind").items()) n.bind[k] = v.get<std::string>();
        }
        n.conclusion = parse_formula(j.at("conclusion").get<std::string>());
        if (j.contains("generator")) n.generator = parse_genref(j.at("generator").get<std::string>());
    } catch (const ParseError& e) {
        fail(path + ": " + e.what());
    } catch (const json::exception& e) {
        fail(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        fail(path + ": " + e.what());
    }
    if (j.contains("premises")) {
        const auto& ps = j.at("premises");
        if (!ps.is_array()) fail(path + ": premises must be an array");
        for (std::size_t i = 0; i < ps.size(); ++i) n.premises.push_back(node_from_json(ps[i], path_of(path, i)));
    }
    return n;
}

json node_to_json(const DerivationNode& n) {
    json j;
    j["rule"] = n.rule;
    j["bind"] = json::object();
    for (const auto& [k, v] : n.bind) j["bind"][k] = v;
    j["conclusion"] = to_string(n.conclusion);
    if (n.generator) j["generator"] = to_string(*n.generator);
    j["premises"] = json::array();
    for (const auto& p : n.premises) j["premises"].push_back(node_to_json(p));
    return j;
}

bool same_node(const DerivationNode& a, const DerivationNode& b) {
    if (a.rule != b.rule || a.bind != b.bind || !same_formula(a.conclusion, b.conclusion)) return false;
    if (a.generator.has_value() != b.generator.has_value()) return false;
    if (a.generator && !(*a.generator == *b.generator)) return false;
    if (a.premises.size() != b.premises.size()) return false;
    for (std::size_t i = 0; i < a.premises.size(); ++i)
        if (!same_node(a.premises[i], b.premises[i])) return false;
    return true;
}

Derivation load_derivation(const json& doc, const std::string& base_dir) {
    if (!doc.is_object()) fail("derivation must be a JSON object");
    Derivation d;
    try {
        d.generator_file = doc.at("generator_file").get<std::string>();
        d.layer = parse_layer(doc.value("layer", std::string("AXGCP")));
    } catch (const json::exception& e) {
        fail(std::string("derivation: ") + e.what());
    }
    std::filesystem::path p(d.generator_file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    d.model = std::make_shared<const Model>(load_model(p.string()));
    if (doc.contains("hypotheses")) {
        const auto& hs = doc.at("hypotheses");
        for (std::size_t i = 0; i < hs.size(); ++i) {
            try {
                d.hypotheses.push_back(parse_formula(hs[i].get<std::string>()));
            } catch (const std::exception& e) {
                fail("hypotheses[" + std::to_string(i) + "]: " + e.what());
            }
        }
    }
    if (!doc.contains("root")) fail("derivation: missing root");
    d.root = node_from_json(doc.at("root"), "root");
    return d;
}

Derivation load_derivation_file(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        fail(path + ": " + e.what());
    }
    return load_derivation(doc, std::filesystem::path(path).parent_path().string());
}

json derivation_to_json(const Derivation& d) {
    json j;
    j["generator_file"] = d.generator_file;
    j["layer"] = to_string(d.layer);
    j["hypotheses"] = json::array();
    for (const auto& h : d.hypotheses) j["hypotheses"].push_back(to_string(h));
    j["root"] = node_to_json(d.root);
    return j;
}

SemanticCheck evaluate_on_model(const Derivation& d) {
    World w(d.model);
    auto g = d.root_gen();
    if (g.base != d.model->gen.id) fail("root generator '" + to_string(g) + "' is not derived from the model");
    for (const auto& iv : g.steps) w = w.intervened(iv);
    SemanticCheck r;
    r.hypotheses_hold = std::all_of(d.hypotheses.begin(), d.hypotheses.end(),
                                    [&](const FormulaP& h) { return w.satisfies(h); });
    r.conclusion_holds = w.satisfies(d.root.conclusion);
    return r;
}

}  // namespace stacl
