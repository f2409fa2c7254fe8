#include "stacl/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace stacl {

namespace {

bool all_digits(const std::string& s, std::size_t from, std::size_t to) {
    if (from >= to) return false;
    for (std::size_t i = from; i < to; ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::size_t start = (!text.empty() && text[0] == '-') ? 1 : 0;
    auto slash = text.find('/');
    bool ok = slash == std::string::npos
                  ? all_digits(text, start, text.size())
                  : all_digits(text, start, slash) && all_digits(text, slash + 1, text.size());
    if (!ok) throw std::invalid_argument("malformed rational '" + text + "'");
    Rational r;
    if (slash == std::string::npos) {
        r = mpz_class(text);
    } else {
        mpz_class den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        r = Rational(mpz_class(text.substr(0, slash)), den);
    }
    r.canonicalize();
    return r;
}

std::string rational_string(const Rational& r) {
    Rational c(r);
    c.canonicalize();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace stacl
