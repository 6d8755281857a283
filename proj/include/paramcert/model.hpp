#pragma once

#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "paramcert/expr_parser.hpp"

namespace paramcert {

/// A known input signal u(t), polynomial in time.
struct InputSignal {
  std::string name;
  Poly signal;  // over the registry {t}

  friend bool operator==(const InputSignal& a, const InputSignal& b) {
    return a.name == b.name && a.signal == b.signal;
  }
};

/// x(0) = value pinned by the model.
struct KnownValue {
  std::string state;
  Rat value;

  friend bool operator==(const KnownValue& a, const KnownValue& b) { return a.state == b.state && a.value == b.value; }
};

/// x' = f(x, u, mu), y = g(x, u, mu) with rational f and g.
struct Model {
  std::vector<std::string> states;
  std::vector<std::string> params;
  std::vector<InputSignal> inputs;
  RegistryPtr registry;  // states, then params, then inputs
  std::vector<RatFun> rhs;
  std::vector<std::string> output_names;
  std::vector<RatFun> outputs;
  std::vector<KnownValue> known;

  std::size_t state_var(std::size_t i) const { return i; }
  std::size_t param_var(std::size_t i) const { return states.size() + i; }
  std::size_t input_var(std::size_t i) const { return states.size() + params.size() + i; }

  std::optional<std::size_t> state_index(std::string_view name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == name) return i;
    return std::nullopt;
  }
  std::optional<std::size_t> param_index(std::string_view name) const {
    for (std::size_t i = 0; i < params.size(); ++i)
      if (params[i] == name) return i;
    return std::nullopt;
  }

  friend bool operator==(const Model& a, const Model& b) {
    return a.states == b.states && a.params == b.params && a.inputs == b.inputs && a.rhs == b.rhs &&
           a.output_names == b.output_names && a.outputs == b.outputs && a.known == b.known;
  }
};

/// Time-stamped output measurements, one row per model output.
struct Dataset {
  std::vector<Rat> times;
  std::vector<std::string> output_names;
  std::vector<std::vector<Rat>> observations;  // [output][sample]

  std::size_t samples() const { return times.size(); }
};

inline RegistryPtr time_registry() {
  static const RegistryPtr reg = make_registry({"t"});
  return reg;
}

namespace detail {

struct SourceLine {
  std::size_t number;
  std::size_t column;  // 0-based offset of `text` inside the physical line
  std::string text;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

inline SourceLine trimmed(std::size_t number, std::string_view raw, std::size_t offset = 0) {
  std::size_t b = 0;
  while (b < raw.size() && std::isspace(static_cast<unsigned char>(raw[b]))) ++b;
  std::size_t e = raw.size();
  while (e > b && std::isspace(static_cast<unsigned char>(raw[e - 1]))) --e;
  return {number, offset + b, std::string(raw.substr(b, e - b))};
}

// Splits "lhs = rhs" at the first '='; returns nullopt when absent.
inline std::optional<std::pair<SourceLine, SourceLine>> split_assignment(const SourceLine& line) {
  auto eq = line.text.find('=');
  if (eq == std::string::npos) return std::nullopt;
  std::string_view t(line.text);
  return std::make_pair(trimmed(line.number, t.substr(0, eq), line.column),
                        trimmed(line.number, t.substr(eq + 1), line.column + eq + 1));
}

}  // namespace detail

/// Parses the model DSL:
///
///     states: x
///     params: mu
///     inputs:
///       u = 1 + t
///     dynamics:
///       x' = -mu*x + u
///     outputs:
///       y = x^2 + x
///     known:
///       x(0) = 1
///
/// `#` starts a comment. Every state needs exactly one dynamics line.
inline Model parse_model(std::string_view text) {
  enum class Section { none, states, params, inputs, dynamics, outputs, known };
  std::vector<std::pair<Section, detail::SourceLine>> lines;
  Section current = Section::none;
  std::size_t number = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  static const std::regex header(R"(^\s*(states|params|inputs|dynamics|outputs|known)\s*:(.*)$)");
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::smatch m;
    std::size_t offset = 0;
    std::string body = raw;
    if (std::regex_match(raw, m, header)) {
      auto name = m[1].str();
      current = name == "states"     ? Section::states
                : name == "params"   ? Section::params
                : name == "inputs"   ? Section::inputs
                : name == "dynamics" ? Section::dynamics
                : name == "outputs"  ? Section::outputs
                                     : Section::known;
      offset = static_cast<std::size_t>(m.position(2));
      body = m[2].str();
    }
    auto line = detail::trimmed(number, body, offset);
    if (line.text.empty()) continue;
    if (current == Section::none) throw ParseError("content outside of any section", number, line.column + 1);
    lines.emplace_back(current, std::move(line));
  }

  Model model;
  std::set<std::string> names{"t"};
  auto declare = [&](std::vector<std::string>& into, const detail::SourceLine& line) {
    std::size_t i = 0;
    const auto& s = line.text;
    while (i < s.size()) {
      while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
      std::size_t b = i;
      while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ',') ++i;
      if (b == i) break;
      std::string name = s.substr(b, i - b);
      if (!detail::is_identifier(name)) throw ParseError("invalid name '" + name + "'", line.number, line.column + b + 1);
      if (!names.insert(name).second)
        throw SemanticError("line " + std::to_string(line.number) + ": duplicate or reserved name '" + name + "'");
      into.push_back(name);
    }
  };

  // Declarations first; sections may appear in any order.
  std::vector<std::pair<detail::SourceLine, detail::SourceLine>> input_defs, dyn_defs, out_defs, known_defs;
  for (const auto& [sec, line] : lines) {
    switch (sec) {
      case Section::states: declare(model.states, line); break;
      case Section::params: declare(model.params, line); break;
      case Section::none: break;
      default: {
        auto parts = detail::split_assignment(line);
        if (!parts) throw ParseError("expected '<name> = <expression>'", line.number, line.column + 1);
        if (sec == Section::inputs) input_defs.push_back(*parts);
        if (sec == Section::dynamics) dyn_defs.push_back(*parts);
        if (sec == Section::outputs) out_defs.push_back(*parts);
        if (sec == Section::known) known_defs.push_back(*parts);
      }
    }
  }
  if (model.states.empty()) throw SemanticError("model declares no states");

  std::vector<std::string> reg_names = model.states;
  reg_names.insert(reg_names.end(), model.params.begin(), model.params.end());
  for (const auto& [lhs, rhs] : input_defs) {
    if (!detail::is_identifier(lhs.text)) throw ParseError("invalid input name", lhs.number, lhs.column + 1);
    if (!names.insert(lhs.text).second)
      throw SemanticError("line " + std::to_string(lhs.number) + ": duplicate or reserved name '" + lhs.text + "'");
    RatFun sig = parse_ratfun(rhs.text, time_registry(), rhs.number, rhs.column);
    if (!sig.is_polynomial())
      throw UnsupportedExpression("line " + std::to_string(rhs.number) + ": input '" + lhs.text +
                                  "' must be a polynomial in t");
    model.inputs.push_back({lhs.text, sig.num()});
    reg_names.push_back(lhs.text);
  }
  model.registry = make_registry(reg_names);

  model.rhs.resize(model.states.size());
  std::vector<bool> have(model.states.size(), false);
  for (const auto& [lhs, rhs] : dyn_defs) {
    std::string name = lhs.text;
    if (name.empty() || name.back() != '\'')
      throw ParseError("dynamics line must start with <state>'", lhs.number, lhs.column + 1);
    name.pop_back();
    auto idx = model.state_index(name);
    if (!idx) throw SemanticError("line " + std::to_string(lhs.number) + ": '" + name + "' is not a declared state");
    if (have[*idx]) throw SemanticError("line " + std::to_string(lhs.number) + ": second equation for '" + name + "'");
    have[*idx] = true;
    model.rhs[*idx] = parse_ratfun(rhs.text, model.registry, rhs.number, rhs.column);
  }
  for (std::size_t i = 0; i < have.size(); ++i)
    if (!have[i]) throw SemanticError("state '" + model.states[i] + "' has no dynamics equation");

  for (const auto& [lhs, rhs] : out_defs) {
    if (!detail::is_identifier(lhs.text)) throw ParseError("invalid output name", lhs.number, lhs.column + 1);
    if (!names.insert(lhs.text).second)
      throw SemanticError("line " + std::to_string(lhs.number) + ": duplicate or reserved name '" + lhs.text + "'");
    model.output_names.push_back(lhs.text);
    model.outputs.push_back(parse_ratfun(rhs.text, model.registry, rhs.number, rhs.column));
  }
  if (model.outputs.empty()) throw SemanticError("model declares no outputs");

  static const std::regex pin(R"(^([A-Za-z_][A-Za-z0-9_]*)\s*\(\s*0\s*\)$)");
  for (const auto& [lhs, rhs] : known_defs) {
    std::smatch m;
    if (!std::regex_match(lhs.text, m, pin)) throw ParseError("expected '<state>(0)'", lhs.number, lhs.column + 1);
    auto idx = model.state_index(m[1].str());
    if (!idx) throw SemanticError("line " + std::to_string(lhs.number) + ": '" + m[1].str() + "' is not a state");
    for (const auto& k : model.known)
      if (k.state == m[1].str()) throw SemanticError("line " + std::to_string(lhs.number) + ": duplicate pin");
    Rat v;
    try {
      v = parse_rational(rhs.text);
    } catch (const std::invalid_argument&) {
      throw ParseError("pinned value must be a number", rhs.number, rhs.column + 1);
    }
    model.known.push_back({m[1].str(), v});
  }
  return model;
}

inline std::string print_model(const Model& m) {
  std::ostringstream os;
  auto list = [&](const char* head, const std::vector<std::string>& v) {
    os << head << ":";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : " ") << v[i];
    os << "\n";
  };
  list("states", m.states);
  if (!m.params.empty()) list("params", m.params);
  if (!m.inputs.empty()) {
    os << "inputs:\n";
    for (const auto& u : m.inputs) os << "  " << u.name << " = " << u.signal.to_string() << "\n";
  }
  os << "dynamics:\n";
  for (std::size_t i = 0; i < m.states.size(); ++i) os << "  " << m.states[i] << "' = " << m.rhs[i].to_string() << "\n";
  os << "outputs:\n";
  for (std::size_t i = 0; i < m.outputs.size(); ++i)
    os << "  " << m.output_names[i] << " = " << m.outputs[i].to_string() << "\n";
  if (!m.known.empty()) {
    os << "known:\n";
    for (const auto& k : m.known) os << "  " << k.state << "(0) = " << k.value.get_str() << "\n";
  }
  return os.str();
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream s(line);
  while (std::getline(s, cell, ',')) out.push_back(trimmed(0, cell).text);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

/// CSV with a header naming the time column (`t` or `time`) and every model output.
inline Dataset parse_dataset(std::string_view text, const Model& model) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t number = 0;
  std::vector<std::string> header;
  Dataset ds;
  std::optional<std::size_t> time_col;
  std::vector<std::size_t> out_cols;
  while (std::getline(in, raw)) {
    ++number;
    auto line = detail::trimmed(number, raw).text;
    if (line.empty() || line[0] == '#') continue;
    auto cells = detail::split_csv(line);
    if (header.empty()) {
      header = cells;
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == "t" || header[i] == "time") time_col = i;
      if (!time_col) throw DataError("dataset header has no time column 't'");
      for (const auto& name : model.output_names) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("dataset is missing output column '" + name + "'");
        out_cols.push_back(static_cast<std::size_t>(it - header.begin()));
      }
      ds.output_names = model.output_names;
      ds.observations.resize(model.outputs.size());
      continue;
    }
    if (cells.size() != header.size())
      throw DataError("line " + std::to_string(number) + ": expected " + std::to_string(header.size()) + " columns");
    auto read = [&](std::size_t col) {
      try {
        return parse_rational(cells[col]);
      } catch (const std::invalid_argument&) {
        throw DataError("line " + std::to_string(number) + ": unparsable number '" + cells[col] + "'");
      }
    };
    Rat t = read(*time_col);
    if (!ds.times.empty() && t <= ds.times.back())
      throw DataError("line " + std::to_string(number) + ": times must be strictly increasing");
    ds.times.push_back(t);
    for (std::size_t j = 0; j < out_cols.size(); ++j) ds.observations[j].push_back(read(out_cols[j]));
  }
  if (header.empty()) throw DataError("dataset is empty");
  if (ds.times.size() < 2) throw DataError("dataset needs at least 2 samples");
  return ds;
}

}  // namespace paramcert
