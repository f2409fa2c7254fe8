#include "stacl/parser.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace stacl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

const std::set<std::string>& keywords() {
    static const std::set<std::string> k = {"top", "pos", "pa", "npa", "anc", "nanc",
                                            "allnanc", "dsep", "margin", "cond", "tuple"};
    return k;
}

}  // namespace

bool is_keyword(const std::string& s) { return keywords().count(s) > 0; }

bool is_name_id(const std::string& s) { return s.size() >= 1 && s[0] == 'n' && !is_keyword(s); }

bool is_fsym_id(const std::string& s) { return s.size() >= 1 && s[0] == 'f' && !is_keyword(s); }

bool is_const_id(const std::string& s) {
    auto digits = [](const std::string& t, std::size_t from) {
        return t.size() > from && std::all_of(t.begin() + static_cast<long>(from), t.end(),
                                              [](unsigned char c) { return std::isdigit(c); });
    };
    return digits(s, 0) || (s[0] == 'c' && digits(s, 1));
}

namespace {

enum class Tok {
    Ident, Int, HashN, HashF, LAngle, RAngle, LParen, RParen, LBrack, RBrack,
    Comma, Semi, Assign, Set, Eq, Imp, Iff, And, Not, DColon, End
};

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

std::vector<Token> lex(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t{Tok::End, "", line, col};
        auto starts = [&](const char* lit) { return s.compare(i, std::char_traits<char>::length(lit), lit) == 0; };
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            t.kind = Tok::Ident;
            t.text = s.substr(i, j - i);
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            t.kind = Tok::Int;
            t.text = s.substr(i, j - i);
            advance(j - i);
        } else if (c == '#' && i + 1 < s.size() && (s[i + 1] == 'n' || s[i + 1] == 'f') &&
                   (i + 2 >= s.size() || !ident_char(s[i + 2]))) {
            t.kind = s[i + 1] == 'n' ? Tok::HashN : Tok::HashF;
            t.text = s.substr(i, 2);
            advance(2);
        } else if (starts("<->")) {
            t.kind = Tok::Iff, t.text = "<->", advance(3);
        } else if (starts("->")) {
            t.kind = Tok::Imp, t.text = "->", advance(2);
        } else if (starts(":=")) {
            t.kind = Tok::Assign, t.text = ":=", advance(2);
        } else if (starts("::")) {
            t.kind = Tok::DColon, t.text = "::", advance(2);
        } else if (starts("==")) {
            t.kind = Tok::Eq, t.text = "==", advance(2);
        } else {
            static const std::string single = "<>()[],;=&!";
            static const Tok kinds[] = {Tok::LAngle, Tok::RAngle, Tok::LParen, Tok::RParen, Tok::LBrack, Tok::RBrack,
                                        Tok::Comma, Tok::Semi, Tok::Set, Tok::And, Tok::Not};
            auto pos = single.find(c);
            if (pos == std::string::npos)
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
            t.kind = kinds[pos];
            t.text = std::string(1, c);
            advance(1);
        }
        out.push_back(std::move(t));
    }
    out.push_back(Token{Tok::End, "", line, col});
    return out;
}

// Either a term or a kernel reference, resolved once "==" is seen.
struct Operand {
    TermP term;
    std::optional<KernelRef> kernel;
};

class Parser {
public:
    explicit Parser(const std::string& text) : toks_(lex(text)) {}

    FormulaP formula() { return iff(); }

    Operand operand() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::LAngle:
            return {vt_term(), std::nullopt};
        case Tok::HashN: {
            next();
            expect(Tok::LParen, "'('");
            GenRef g = genref();
            expect(Tok::Semi, "';'");
            VarTuple v = vt();
            expect(Tok::RParen, "')'");
            return {t_canon_name(std::move(g), std::move(v)), std::nullopt};
        }
        case Tok::HashF: {
            next();
            expect(Tok::LParen, "'('");
            GenRef g = genref();
            expect(Tok::Semi, "';'");
            CondVar cv = condvar();
            expect(Tok::RParen, "')'");
            return applied(KernelRef::canon(std::move(g), std::move(cv)));
        }
        case Tok::Int:
            next();
            return {t_const(t.text), std::nullopt};
        case Tok::Ident:
            break;
        default:
            fail("expected a term or kernel");
        }
        Token id = next();
        if (id.text == "margin") {
            expect(Tok::LParen, "'('");
            TermP body = term();
            expect(Tok::Semi, "';'");
            VarTuple keep = vt();
            expect(Tok::RParen, "')'");
            return {t_margin(std::move(body), std::move(keep)), std::nullopt};
        }
        if (id.text == "tuple") {
            expect(Tok::LParen, "'('");
            return {t_tuple(term_list()), std::nullopt};
        }
        if (id.text == "cond") {
            CondVar cv = condvar_body();
            return applied(KernelRef::cond(std::move(cv)));
        }
        if (is_const_id(id.text)) return {t_const(id.text), std::nullopt};
        if (is_name_id(id.text)) return {t_name(id.text), std::nullopt};
        if (is_fsym_id(id.text)) return applied(KernelRef::fsym(id.text));
        fail_at(id, "identifier '" + id.text + "' is not a name, constant or function symbol");
    }

    TermP term() {
        const Token& start = peek();
        Operand o = operand();
        if (o.kernel) fail_at(start, "expected a term, found a kernel");
        return o.term;
    }

    KernelRef kernel() {
        const Token& start = peek();
        Operand o = operand();
        if (!o.kernel) fail_at(start, "expected a kernel");
        return *o.kernel;
    }

    VarTuple vt() {
        VarTuple acc = vt_single();
        while (peek().kind == Tok::DColon) {
            const Token& at = next();
            VarTuple more = vt_single();
            try {
                acc = merge_tuples(acc, more);
            } catch (const std::invalid_argument& e) {
                fail_at(at, e.what());
            }
        }
        return acc;
    }

    std::vector<Assign> assign_list(Tok sep) {
        std::vector<Assign> out;
        const Token& start = peek();
        if (peek().kind == Tok::RBrack || peek().kind == Tok::End) return out;
        do {
            std::string v = var();
            if (sep == Tok::Assign && peek().kind == Tok::Set)
                next();
            else
                expect(sep, sep == Tok::Assign ? "':='" : "'='");
            out.push_back(Assign{v, constant()});
        } while (accept(Tok::Comma));
        try {
            return make_assigns(std::move(out));
        } catch (const std::invalid_argument& e) {
            fail_at(start, e.what());
        }
    }

    GenRef genref() {
        GenRef g;
        const Token& id = expect(Tok::Ident, "generator id");
        g.base = id.text;
        while (peek().kind == Tok::LBrack) {
            next();
            Intervention iv;
            iv.assigns = assign_list(Tok::Assign);
            expect(Tok::RBrack, "']'");
            iv.lazy = mode();
            if (iv.assigns.empty()) fail("empty intervention in generator id");
            g.steps.push_back(std::move(iv));
        }
        return g;
    }

    bool at_end() const { return peek().kind == Tok::End; }
    void finish() {
        if (!at_end()) fail("unexpected '" + peek().text + "'");
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        next();
        return true;
    }
    const Token& expect(Tok k, const std::string& what) {
        if (peek().kind != k) fail("expected " + what);
        return next();
    }
    [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
    [[noreturn]] static void fail_at(const Token& t, const std::string& msg) {
        throw ParseError(msg, t.line, t.col);
    }

    bool mode() {
        const Token& m = expect(Tok::Ident, "'E' or 'L'");
        if (m.text == "E") return false;
        if (m.text == "L") return true;
        fail_at(m, "expected 'E' or 'L'");
    }

    std::string var() {
        const Token& t = expect(Tok::Ident, "variable");
        return t.text;
    }

    Const constant() {
        const Token& t = peek();
        if ((t.kind == Tok::Ident || t.kind == Tok::Int) && is_const_id(t.text)) {
            next();
            return Const{t.text};
        }
        fail("expected a constant");
    }

    VarTuple vt_single() {
        const Token& open = expect(Tok::LAngle, "'<'");
        std::vector<std::string> vars;
        if (peek().kind != Tok::RAngle) {
            vars.push_back(var());
            while (peek().kind == Tok::Comma || peek().kind == Tok::DColon) {
                next();
                vars.push_back(var());
            }
        }
        expect(Tok::RAngle, "'>'");
        try {
            return VarTuple(std::move(vars));
        } catch (const std::invalid_argument& e) {
            fail_at(open, e.what());
        }
    }

    TermP vt_term() { return t_vars(vt()); }

    std::vector<TermP> term_list() {
        std::vector<TermP> args;
        if (!accept(Tok::RParen)) {
            do args.push_back(term());
            while (accept(Tok::Comma));
            expect(Tok::RParen, "')'");
        }
        return args;
    }

    Operand applied(KernelRef k) {
        if (peek().kind != Tok::LParen) return {nullptr, std::move(k)};
        next();
        return {t_app(std::move(k), term_list()), std::nullopt};
    }

    CondVar condvar() {
        const Token& kw = expect(Tok::Ident, "'cond'");
        if (kw.text != "cond") fail_at(kw, "expected 'cond'");
        return condvar_body();
    }

    CondVar condvar_body() {
        const Token& open = expect(Tok::LParen, "'('");
        CondVar cv;
        cv.target = vt();
        expect(Tok::Semi, "';'");
        cv.given = vt();
        expect(Tok::Semi, "';'");
        std::vector<Assign> fixes;
        if (peek().kind != Tok::RParen) fixes = assign_list(Tok::Set);
        expect(Tok::RParen, "')'");
        std::vector<std::string> fv;
        for (const auto& a : fixes) {
            fv.push_back(a.var);
            cv.vals.push_back(a.value);
        }
        cv.fixed = VarTuple(std::move(fv));
        try {
            cv.check();
        } catch (const std::invalid_argument& e) {
            fail_at(open, e.what());
        }
        return cv;
    }

    FormulaP iff() {
        FormulaP lhs = imp();
        while (accept(Tok::Iff)) lhs = f_iff(lhs, imp());
        return lhs;
    }

    FormulaP imp() {
        FormulaP lhs = conj();
        if (accept(Tok::Imp)) return f_imp(lhs, imp());
        return lhs;
    }

    FormulaP conj() {
        FormulaP lhs = unary();
        while (accept(Tok::And)) lhs = f_and(lhs, unary());
        return lhs;
    }

    FormulaP unary() {
        if (accept(Tok::Not)) return f_not(unary());
        if (peek().kind == Tok::LBrack) {
            const Token& open = next();
            Intervention iv;
            iv.assigns = assign_list(Tok::Assign);
            if (iv.assigns.empty()) fail_at(open, "empty intervention");
            expect(Tok::RBrack, "']'");
            iv.lazy = mode();
            return f_modal(std::move(iv), unary());
        }
        return primary();
    }

    FormulaP primary() {
        const Token& t = peek();
        if (accept(Tok::LParen)) {
            FormulaP f = formula();
            expect(Tok::RParen, "')'");
            return f;
        }
        if (t.kind == Tok::Ident && t.text == "top") {
            next();
            return f_top();
        }
        if (t.kind == Tok::Ident && t.text == "pos" && peek(1).kind == Tok::LParen) {
            next();
            next();
            PosTarget p;
            p.vars = vt();
            if (accept(Tok::Semi)) {
                auto fixes = assign_list(Tok::Set);
                std::vector<std::string> fv;
                for (const auto& a : fixes) {
                    fv.push_back(a.var);
                    p.vals.push_back(a.value);
                }
                p.fixed = VarTuple(std::move(fv));
                if (!p.fixed.subset_of(p.vars)) fail_at(t, "fixed variables of pos must occur in its tuple");
            }
            expect(Tok::RParen, "')'");
            return f_pos(std::move(p));
        }
        if (t.kind == Tok::Ident && is_causal_pred(t.text) && peek(1).kind == Tok::LParen) {
            Token name = next();
            next();
            std::vector<VarTuple> args;
            args.push_back(vt());
            while (accept(Tok::Semi) || accept(Tok::Comma)) args.push_back(vt());
            expect(Tok::RParen, "')'");
            if (args.size() != causal_pred_arity(name.text))
                fail_at(name, "wrong number of arguments for '" + name.text + "'");
            return f_cpred(name.text, std::move(args));
        }
        Operand lhs = operand();
        expect(Tok::Eq, "'=='");
        const Token& rstart = peek();
        Operand rhs = operand();
        if (lhs.kernel.has_value() != rhs.kernel.has_value())
            fail_at(rstart, "equation mixes a term and a kernel");
        if (lhs.kernel) return f_keq(*lhs.kernel, *rhs.kernel);
        return f_eq(lhs.term, rhs.term);
    }
};

}  // namespace

FormulaP parse_formula(const std::string& text) {
    Parser p(text);
    FormulaP f = p.formula();
    p.finish();
    return f;
}

TermP parse_term(const std::string& text) {
    Parser p(text);
    TermP t = p.term();
    p.finish();
    return t;
}

KernelRef parse_kernel(const std::string& text) {
    Parser p(text);
    KernelRef k = p.kernel();
    p.finish();
    return k;
}

VarTuple parse_var_tuple(const std::string& text) {
    auto first = text.find_first_not_of(" \t");
    if (first != std::string::npos && text[first] == '<') {
        Parser p(text);
        VarTuple v = p.vt();
        p.finish();
        return v;
    }
    Parser p("<" + text + ">");
    VarTuple v = p.vt();
    p.finish();
    return v;
}

std::vector<Assign> parse_assigns(const std::string& text) {
    Parser p(text);
    auto a = p.assign_list(Tok::Assign);
    p.finish();
    return a;
}

GenRef parse_genref(const std::string& text) {
    Parser p(text);
    GenRef g = p.genref();
    p.finish();
    return g;
}

// Printing.

std::string to_string(const VarTuple& v) {
    std::string s = "<";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v.vars()[i];
    }
    return s + ">";
}

std::string to_string(const std::vector<Assign>& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ",";
        s += a[i].var + ":=" + a[i].value.id;
    }
    return s;
}

std::string to_string(const Intervention& iv) {
    return "[" + to_string(iv.assigns) + "]" + (iv.lazy ? "L" : "E");
}

std::string to_string(const GenRef& g) {
    std::string s = g.base;
    for (const auto& st : g.steps) s += to_string(st);
    return s;
}

namespace {

std::string fixes_string(const VarTuple& fixed, const std::vector<Const>& vals) {
    std::string s;
    for (std::size_t i = 0; i < fixed.size(); ++i) {
        if (i) s += ",";
        s += fixed.vars()[i] + "=" + vals[i].id;
    }
    return s;
}

}  // namespace

std::string to_string(const CondVar& cv) {
    std::string s = "cond(" + to_string(cv.target) + "; " + to_string(cv.given) + ";";
    if (!cv.fixed.empty()) s += " " + fixes_string(cv.fixed, cv.vals);
    return s + ")";
}

std::string to_string(const KernelRef& k) {
    switch (k.kind) {
    case KernelRef::Kind::Fsym:
        return k.id;
    case KernelRef::Kind::Canon:
        return "#f(" + to_string(k.gen) + "; " + to_string(k.cv) + ")";
    case KernelRef::Kind::Cond:
        return to_string(k.cv);
    }
    return "";
}

namespace {

std::string args_string(const std::vector<TermP>& args) {
    std::string s = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) s += ", ";
        s += to_string(args[i]);
    }
    return s + ")";
}

}  // namespace

std::string to_string(const TermP& u) {
    switch (u->kind) {
    case Term::Kind::Vars:
        return to_string(u->vars);
    case Term::Kind::Name:
    case Term::Kind::Const:
        return u->id;
    case Term::Kind::CanonName:
        return "#n(" + to_string(u->gen) + "; " + to_string(u->vars) + ")";
    case Term::Kind::App:
        return to_string(u->head) + args_string(u->args);
    case Term::Kind::Margin:
        return "margin(" + to_string(u->args[0]) + "; " + to_string(u->vars) + ")";
    case Term::Kind::Tuple:
        return "tuple" + args_string(u->args);
    }
    return "";
}

std::string to_string(const PosTarget& p) {
    std::string s = "pos(" + to_string(p.vars);
    if (!p.fixed.empty()) s += "; " + fixes_string(p.fixed, p.vals);
    return s + ")";
}

namespace {

// Precedence levels: 1 iff, 2 imp, 3 and, 4 unary, 5 atom.
std::string print(const FormulaP& f, int min_prec) {
    int prec = 5;
    std::string s;
    FormulaP l, r;
    if (as_iff(f, l, r)) {
        prec = 1;
        s = print(l, 2) + " <-> " + print(r, 2);
    } else if (as_imp(f, l, r)) {
        prec = 2;
        s = print(l, 3) + " -> " + print(r, 2);
    } else {
        switch (f->kind) {
        case Formula::Kind::Top:
            s = "top";
            break;
        case Formula::Kind::Pos:
            s = to_string(f->pos);
            break;
        case Formula::Kind::CPred:
            s = f->pred + "(";
            for (std::size_t i = 0; i < f->tuples.size(); ++i) {
                if (i) s += "; ";
                s += to_string(f->tuples[i]);
            }
            s += ")";
            break;
        case Formula::Kind::EqTerm:
            s = to_string(f->lt) + " == " + to_string(f->rt);
            break;
        case Formula::Kind::EqKernel:
            s = to_string(f->lk) + " == " + to_string(f->rk);
            break;
        case Formula::Kind::Not:
            prec = 4;
            s = "!" + print(f->a, 4);
            break;
        case Formula::Kind::And:
            prec = 3;
            s = print(f->a, 3) + " & " + print(f->b, 4);
            break;
        case Formula::Kind::Modal:
            prec = 4;
            s = to_string(f->iv) + " " + print(f->a, 4);
            break;
        }
    }
    return prec < min_prec ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const FormulaP& f) { return print(f, 0); }

}  // namespace stacl
