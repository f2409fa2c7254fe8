#include "stacl/model.hpp"

#include "stacl/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stacl {

using nlohmann::json;

int Interp::const_value(const Const& c) const {
    int v;
    if (c.is_literal()) {
        if (c.id.size() > 9) throw std::invalid_argument("constant '" + c.id + "' out of range");
        v = std::stoi(c.id);
    } else {
        auto it = constants.find(c.id);
        if (it == constants.end()) throw std::invalid_argument("undefined constant '" + c.id + "'");
        v = it->second;
    }
    if (v < 0 || v >= domain) throw std::invalid_argument("constant '" + c.id + "' outside the domain");
    return v;
}

namespace {

std::vector<Rational> parse_row(const json& j, int domain, const std::string& what) {
    if (!j.is_array() || static_cast<int>(j.size()) != domain)
        throw std::invalid_argument(what + ": expected " + std::to_string(domain) + " probabilities");
    std::vector<Rational> row;
    Rational sum = 0;
    for (const auto& e : j) {
        if (!e.is_string()) throw std::invalid_argument(what + ": probabilities must be \"p/q\" strings");
        Rational r = parse_rational(e.get<std::string>());
        if (r < 0) throw std::invalid_argument(what + ": negative probability");
        sum += r;
        row.push_back(r);
    }
    if (sum != 1) throw std::invalid_argument(what + ": probabilities sum to " + rational_string(sum));
    return row;
}

std::vector<int> parse_key(const std::string& key, int arity, int domain, const std::string& what) {
    std::vector<int> vals;
    if (arity == 0) {
        if (!key.empty()) throw std::invalid_argument(what + ": nullary table key must be empty");
        return vals;
    }
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument(what + ": malformed table key '" + key + "'");
        int v = std::stoi(part);
        if (v >= domain) throw std::invalid_argument(what + ": key value outside the domain");
        vals.push_back(v);
    }
    if (static_cast<int>(vals.size()) != arity) throw std::invalid_argument(what + ": key arity mismatch");
    return vals;
}

std::size_t row_index(const std::vector<int>& vals, int domain) {
    std::size_t idx = 0, stride = 1;
    for (int v : vals) {
        idx += static_cast<std::size_t>(v) * stride;
        stride *= static_cast<std::size_t>(domain);
    }
    return idx;
}

std::string row_key(std::size_t idx, int arity, int domain) {
    std::string s;
    for (int i = 0; i < arity; ++i) {
        if (i) s += ",";
        s += std::to_string(idx % static_cast<std::size_t>(domain));
        idx /= static_cast<std::size_t>(domain);
    }
    return s;
}

}  // namespace

void check_model(const Model& m) {
    require_valid(m.gen);
    for (const auto& x : m.gen.defined_vars()) {
        const auto& t = m.gen.at(x);
        auto check_atom = [&](const CausalTerm& a) {
            if (a.kind == CausalTerm::Kind::Name && !m.interp.names.count(a.id))
                throw std::invalid_argument("mechanism of '" + x + "' uses undefined name '" + a.id + "'");
            if (a.kind == CausalTerm::Kind::Const) m.interp.const_value(a.id);
        };
        check_atom(t);
        for (const auto& a : t.args) check_atom(a);
        if (t.kind == CausalTerm::Kind::App) {
            auto it = m.interp.functions.find(t.id);
            if (it == m.interp.functions.end())
                throw std::invalid_argument("mechanism of '" + x + "' uses undefined function '" + t.id + "'");
            if (it->second.arity != static_cast<int>(t.args.size()))
                throw std::invalid_argument("mechanism of '" + x + "' applies '" + t.id + "' with wrong arity");
        }
    }
}

Model model_from_json(const json& doc) {
    if (!doc.is_object()) throw std::invalid_argument("model must be a JSON object");
    for (const char* key : {"id", "domain_size", "generator"})
        if (!doc.contains(key)) throw std::invalid_argument(std::string("model lacks '") + key + "'");
    Model m;
    m.gen.id = doc.at("id").get<std::string>();
    if (m.gen.id.empty() || !std::isalpha(static_cast<unsigned char>(m.gen.id[0])))
        throw std::invalid_argument("model id must start with a letter");
    int d = doc.at("domain_size").get<int>();
    if (d < 2) throw std::invalid_argument("domain_size must be at least 2");
    m.interp.domain = d;
    const json names = doc.value("names", json::object());
    for (const auto& [n, row] : names.items()) {
        if (!is_name_id(n)) throw std::invalid_argument("'" + n + "' is not a name identifier");
        m.interp.names[n] = parse_row(row, d, "name " + n);
    }
    const json constants = doc.value("constants", json::object());
    for (const auto& [c, v] : constants.items()) {
        if (!is_const_id(c) || Const{c}.is_literal())
            throw std::invalid_argument("'" + c + "' is not a constant identifier");
        int val = v.get<int>();
        if (val < 0 || val >= d) throw std::invalid_argument("constant '" + c + "' outside the domain");
        m.interp.constants[c] = val;
    }
    const json functions = doc.value("functions", json::object());
    for (const auto& [f, spec] : functions.items()) {
        if (!is_fsym_id(f)) throw std::invalid_argument("'" + f + "' is not a function identifier");
        FunctionTable tab;
        tab.arity = spec.at("arity").get<int>();
        if (tab.arity < 0 || tab.arity > 8) throw std::invalid_argument("function '" + f + "' has bad arity");
        std::size_t count = 1;
        for (int i = 0; i < tab.arity; ++i) count *= static_cast<std::size_t>(d);
        tab.rows.assign(count, {});
        std::vector<bool> seen(count, false);
        for (const auto& [key, row] : spec.at("table").items()) {
            auto vals = parse_key(key, tab.arity, d, "function " + f);
            auto idx = row_index(vals, d);
            if (seen[idx]) throw std::invalid_argument("function " + f + ": duplicate row '" + key + "'");
            seen[idx] = true;
            tab.rows[idx] = parse_row(row, d, "function " + f + " row " + key);
        }
        for (std::size_t i = 0; i < count; ++i)
            if (!seen[i])
                throw std::invalid_argument("function " + f + ": missing row '" + row_key(i, tab.arity, d) + "'");
        m.interp.functions[f] = std::move(tab);
    }
    for (const auto& [x, t] : doc.at("generator").items()) {
        if (t.is_null())
            m.gen.assign[x] = std::nullopt;
        else
            m.gen.assign[x] = parse_causal_term(t.get<std::string>());
    }
    check_model(m);
    return m;
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open model file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::invalid_argument("model file '" + path + "': " + e.what());
    }
    try {
        return model_from_json(doc);
    } catch (const json::exception& e) {
        throw std::invalid_argument("model file '" + path + "': " + e.what());
    }
}

json model_to_json(const Model& m) {
    json doc;
    doc["id"] = m.gen.id;
    doc["domain_size"] = m.interp.domain;
    auto row_json = [](const std::vector<Rational>& row) {
        json a = json::array();
        for (const auto& r : row) a.push_back(rational_string(r));
        return a;
    };
    doc["names"] = json::object();
    for (const auto& [n, row] : m.interp.names) doc["names"][n] = row_json(row);
    doc["constants"] = json::object();
    for (const auto& [c, v] : m.interp.constants) doc["constants"][c] = v;
    doc["functions"] = json::object();
    for (const auto& [f, tab] : m.interp.functions) {
        json t;
        t["arity"] = tab.arity;
        t["table"] = json::object();
        for (std::size_t i = 0; i < tab.rows.size(); ++i)
            t["table"][row_key(i, tab.arity, m.interp.domain)] = row_json(tab.rows[i]);
        doc["functions"][f] = t;
    }
    doc["generator"] = json::object();
    for (const auto& [x, t] : m.gen.assign) doc["generator"][x] = t ? json(to_string(*t)) : json(nullptr);
    return doc;
}

void save_model(const Model& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write model file '" + path + "'");
    out << model_to_json(m).dump(2) << "\n";
}

}  // namespace stacl
