#pragma once

#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace stacl {

// Sorted, duplicate-free list of causal-variable identifiers.
class VarTuple {
public:
    VarTuple() = default;
    // Sorts; throws std::invalid_argument on a duplicate identifier.
    explicit VarTuple(std::vector<std::string> vars);
    static VarTuple single(const std::string& v) { return VarTuple({v}); }

    const std::vector<std::string>& vars() const { return vars_; }
    bool empty() const { return vars_.empty(); }
    std::size_t size() const { return vars_.size(); }
    bool contains(const std::string& v) const;
    bool subset_of(const VarTuple& other) const;
    bool disjoint(const VarTuple& other) const;

    VarTuple minus(const VarTuple& other) const;
    VarTuple unite(const VarTuple& other) const;  // set union, overlap allowed
    VarTuple intersect(const VarTuple& other) const;

    bool operator==(const VarTuple& o) const { return vars_ == o.vars_; }
    bool operator!=(const VarTuple& o) const { return vars_ != o.vars_; }
    bool operator<(const VarTuple& o) const { return vars_ < o.vars_; }

private:
    std::vector<std::string> vars_;
};

// x :: y.  Throws std::invalid_argument when the tuples overlap.
VarTuple merge_tuples(const VarTuple& a, const VarTuple& b);

// Constant symbol: a "c<digits>" identifier or a decimal literal.
struct Const {
    std::string id;
    bool is_literal() const;
    bool operator==(const Const& o) const { return id == o.id; }
    bool operator<(const Const& o) const { return id < o.id; }
};

struct Assign {
    std::string var;
    Const value;
    bool operator==(const Assign& o) const { return var == o.var && value == o.value; }
};

// One intervention step; assignments are kept sorted by variable.
struct Intervention {
    bool lazy = false;
    std::vector<Assign> assigns;

    VarTuple vars() const;
    std::vector<Const> values() const;  // aligned with vars()
    bool operator==(const Intervention& o) const { return lazy == o.lazy && assigns == o.assigns; }
};

// Builds a sorted assignment list; throws on a duplicate variable.
std::vector<Assign> make_assigns(std::vector<Assign> assigns);

// Generator reference: a base generator id followed by intervention steps,
// written e.g. "drug[x:=c1]E".
struct GenRef {
    std::string base;
    std::vector<Intervention> steps;

    GenRef then(const Intervention& iv) const;
    std::optional<GenRef> parent() const;
    bool operator==(const GenRef& o) const { return base == o.base && steps == o.steps; }
};

// y |_{z, x=c}
struct CondVar {
    VarTuple target;
    VarTuple given;
    VarTuple fixed;
    std::vector<Const> vals;  // aligned with fixed

    // Throws std::invalid_argument if the parts overlap or lengths differ.
    void check() const;
    bool operator==(const CondVar& o) const {
        return target == o.target && given == o.given && fixed == o.fixed && vals == o.vals;
    }
};

// A kernel reference: plain function symbol, canonical function symbol
// #f(g; cond(...)), or a conditional variable.
struct KernelRef {
    enum class Kind { Fsym, Canon, Cond };
    Kind kind = Kind::Fsym;
    std::string id;  // Fsym
    GenRef gen;      // Canon
    CondVar cv;      // Canon payload or Cond

    static KernelRef fsym(std::string id);
    static KernelRef canon(GenRef g, CondVar cv);
    static KernelRef cond(CondVar cv);
    bool is_function() const { return kind != Kind::Cond; }
};

struct Term;
using TermP = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Vars, Name, CanonName, Const, App, Margin, Tuple };
    Kind kind = Kind::Vars;
    VarTuple vars;           // Vars; CanonName payload; Margin keep
    std::string id;          // Name, Const
    GenRef gen;              // CanonName
    KernelRef head;          // App
    std::vector<TermP> args; // App arguments, Tuple items, Margin body (args[0])
};

TermP t_vars(VarTuple v);
TermP t_var(const std::string& v);
TermP t_name(std::string id);
TermP t_canon_name(GenRef g, VarTuple v);
TermP t_const(std::string id);
TermP t_app(KernelRef head, std::vector<TermP> args);
TermP t_margin(TermP body, VarTuple keep);
TermP t_tuple(std::vector<TermP> items);

struct Formula;
using FormulaP = std::shared_ptr<const Formula>;

// Positivity target: pos(<v>) or the conditional form pos(<v>; x=c)
// where the fixed variables are a subset of v.
struct PosTarget {
    VarTuple vars;
    VarTuple fixed;
    std::vector<Const> vals;
    bool operator<(const PosTarget& o) const;
    bool operator==(const PosTarget& o) const {
        return vars == o.vars && fixed == o.fixed && vals == o.vals;
    }
};

struct Formula {
    enum class Kind { Top, Pos, CPred, EqTerm, EqKernel, Not, And, Modal };
    Kind kind = Kind::Top;
    PosTarget pos;                // Pos
    std::string pred;             // CPred name
    std::vector<VarTuple> tuples; // CPred arguments
    TermP lt, rt;                 // EqTerm
    KernelRef lk, rk;             // EqKernel
    FormulaP a, b;                // Not (a), And (a, b), Modal (a)
    Intervention iv;              // Modal
};

FormulaP f_top();
FormulaP f_pos(VarTuple v);
FormulaP f_pos(PosTarget p);
FormulaP f_cpred(std::string name, std::vector<VarTuple> args);
FormulaP f_eq(TermP l, TermP r);
FormulaP f_keq(KernelRef l, KernelRef r);
FormulaP f_not(FormulaP a);
FormulaP f_and(FormulaP a, FormulaP b);
FormulaP f_imp(FormulaP a, FormulaP b);
FormulaP f_iff(FormulaP a, FormulaP b);
FormulaP f_or(FormulaP a, FormulaP b);
// Returns a unchanged when the intervention has no assignments.
FormulaP f_modal(Intervention iv, FormulaP a);
FormulaP f_eager(std::vector<Assign> assigns, FormulaP a);
FormulaP f_lazy(std::vector<Assign> assigns, FormulaP a);
// Left-nested conjunction; top for an empty list.
FormulaP f_conj(const std::vector<FormulaP>& parts);

// Recognizers for the derived connectives.
bool as_imp(const FormulaP& f, FormulaP& lhs, FormulaP& rhs);
bool as_iff(const FormulaP& f, FormulaP& lhs, FormulaP& rhs);

bool is_causal_pred(const std::string& name);
std::size_t causal_pred_arity(const std::string& name);

// Substitution of a variable by a term.  Inside a variable tuple the
// substituted component becomes a tuple item.
TermP substitute(const TermP& u, const std::string& x, const TermP& r);

// Variables occurring in terms/formulas.  Payloads of canonical symbols
// are not free occurrences.
VarTuple free_vars(const TermP& u);
VarTuple free_vars(const KernelRef& k);
VarTuple free_vars(const FormulaP& f);

// Structural equality.
bool same_term(const TermP& a, const TermP& b);
bool same_kernel(const KernelRef& a, const KernelRef& b);
bool same_formula(const FormulaP& a, const FormulaP& b);

// True when the term mentions no variable (so its value is world-independent).
bool is_rigid(const TermP& u);
bool is_rigid(const KernelRef& k);

// cdv(phi): conditioning variables of every conditional variable in phi.
// Empty conditioning tuples are left out.
std::set<PosTarget> cond_vars(const FormulaP& f);

// Statically known component labels of a term's distribution, used by
// margin.  Empty optional when the components carry no variable labels.
std::optional<std::vector<std::string>> term_labels(const TermP& u);

// Output labels of a labelled kernel (target and given, sorted).
VarTuple kernel_output_labels(const CondVar& cv);

}  // namespace stacl
