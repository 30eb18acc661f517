#include "csplab/instance_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "csplab/errors.hpp"

namespace csplab {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

std::size_t parse_count(std::string_view tok, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size())
    throw ValidationError("bad " + std::string(what) + ": " + std::string(tok));
  return v;
}

std::size_t header_field(const std::string& tok, std::string_view key) {
  std::string prefix = std::string(key) + "=";
  if (tok.rfind(prefix, 0) != 0) throw ValidationError("expected " + prefix + " in header");
  return parse_count(std::string_view(tok).substr(prefix.size()), key);
}

std::vector<bool> parse_table(std::string_view bits) {
  std::vector<bool> t;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') throw ValidationError("truth table must be a 0/1 string");
    t.push_back(ch == '1');
  }
  return t;
}

}  // namespace

std::string to_text(const Instance& instance) {
  const auto& f = instance.family();
  std::ostringstream out;
  out << "maxcsp k=" << f.arity() << " sigma=" << f.alphabet() << " vars=" << instance.num_vars()
      << " constraints=" << instance.size() << "\n";
  for (PredId p = 0; p < f.size(); ++p) out << "pred " << f.name(p) << " " << f.bitstring(p) << "\n";
  for (const auto& c : instance.constraints()) {
    out << "c " << f.name(c.pred);
    for (VarId v : c.scope) out << " " << v;
    out << "\n";
  }
  return out.str();
}

Instance parse_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t k = 0, sigma = 0, vars = 0, m = 0;
  bool have_header = false;
  std::vector<std::vector<bool>> tables;
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::vector<VarId>>> raw;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    try {
      if (!have_header) {
        if (toks.size() != 5 || toks[0] != "maxcsp") throw ValidationError("missing maxcsp header");
        k = header_field(toks[1], "k");
        sigma = header_field(toks[2], "sigma");
        vars = header_field(toks[3], "vars");
        m = header_field(toks[4], "constraints");
        have_header = true;
      } else if (toks[0] == "pred") {
        if (!raw.empty()) throw ValidationError("predicates must precede constraints");
        if (toks.size() != 3) throw ValidationError("pred line needs a name and a bitstring");
        names.push_back(toks[1]);
        tables.push_back(parse_table(toks[2]));
      } else if (toks[0] == "c") {
        if (toks.size() != k + 2) throw ValidationError("constraint line has wrong arity");
        std::vector<VarId> scope;
        for (std::size_t j = 2; j < toks.size(); ++j)
          scope.push_back(static_cast<VarId>(parse_count(toks[j], "variable id")));
        raw.emplace_back(toks[1], std::move(scope));
      } else {
        throw ValidationError("unknown line kind '" + toks[0] + "'");
      }
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!have_header) throw ValidationError("missing maxcsp header");
  if (raw.size() != m) throw ValidationError("constraint count differs from header");
  auto family = std::make_shared<const PredicateFamily>(static_cast<int>(k), static_cast<int>(sigma),
                                                         std::move(tables), std::move(names));
  std::vector<Constraint> cs;
  for (auto& [name, scope] : raw) {
    auto p = family->find(name);
    if (!p) throw ValidationError("unknown predicate '" + name + "'");
    cs.push_back({std::move(scope), *p});
  }
  return Instance(family, vars, std::move(cs));
}

nlohmann::json to_json(const Instance& instance) {
  const auto& f = instance.family();
  nlohmann::json j;
  j["format"] = "maxcsp";
  j["k"] = f.arity();
  j["sigma"] = f.alphabet();
  j["vars"] = instance.num_vars();
  j["predicates"] = nlohmann::json::array();
  for (PredId p = 0; p < f.size(); ++p) j["predicates"].push_back({{"name", f.name(p)}, {"table", f.bitstring(p)}});
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : instance.constraints()) j["constraints"].push_back({{"pred", f.name(c.pred)}, {"scope", c.scope}});
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "maxcsp") throw ValidationError("JSON instance needs format=maxcsp");
    std::vector<std::vector<bool>> tables;
    std::vector<std::string> names;
    for (const auto& p : j.at("predicates")) {
      names.push_back(p.at("name").get<std::string>());
      tables.push_back(parse_table(p.at("table").get<std::string>()));
    }
    auto family = std::make_shared<const PredicateFamily>(j.at("k").get<int>(), j.at("sigma").get<int>(),
                                                           std::move(tables), std::move(names));
    std::vector<Constraint> cs;
    for (const auto& c : j.at("constraints")) {
      auto p = family->find(c.at("pred").get<std::string>());
      if (!p) throw ValidationError("unknown predicate in JSON constraint");
      cs.push_back({c.at("scope").get<std::vector<VarId>>(), *p});
    }
    return Instance(family, j.at("vars").get<std::size_t>(), std::move(cs));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed JSON instance: ") + e.what());
  }
}

Instance parse_instance(std::string_view text) {
  auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string_view::npos && text[pos] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    return instance_from_json(j);
  }
  return parse_text(text);
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

void save_instance(const std::filesystem::path& path, const Instance& instance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  if (path.extension() == ".json")
    out << to_json(instance).dump(2) << "\n";
  else
    out << to_text(instance);
}

}  // namespace csplab
