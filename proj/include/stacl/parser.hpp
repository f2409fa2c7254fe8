#pragma once

#include "stacl/syntax.hpp"

#include <stdexcept>
#include <string>

namespace stacl {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line, int column)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Lexical classes shared by formulas, generators and model files.
bool is_name_id(const std::string& s);
bool is_fsym_id(const std::string& s);
bool is_const_id(const std::string& s);
bool is_keyword(const std::string& s);

FormulaP parse_formula(const std::string& text);
TermP parse_term(const std::string& text);
KernelRef parse_kernel(const std::string& text);
VarTuple parse_var_tuple(const std::string& text);  // "<x,y>", "x,y", "" or "x"
std::vector<Assign> parse_assigns(const std::string& text);  // "x:=c1,y:=c0" (also "x=c1")
GenRef parse_genref(const std::string& text);

std::string to_string(const VarTuple& v);
std::string to_string(const std::vector<Assign>& a);
std::string to_string(const Intervention& iv);
std::string to_string(const GenRef& g);
std::string to_string(const CondVar& cv);
std::string to_string(const KernelRef& k);
std::string to_string(const TermP& u);
std::string to_string(const PosTarget& p);
std::string to_string(const FormulaP& f);

}  // namespace stacl
