#pragma once

// JSON input formats and a deterministic writer. Readers raise
// MalformedInput naming the file, line and field at fault; library
// validation errors pass through with their own codes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "krorder/choice.hpp"
#include "krorder/core.hpp"
#include "krorder/measures.hpp"
#include "krorder/portfolio.hpp"
#include "krorder/separation.hpp"
#include "krorder/tolerances.hpp"
#include "krorder/uncertainty.hpp"

namespace krorder::io {

using json = nlohmann::json;

// ---------------------------------------------------------------- writing

namespace detail {

inline void write_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

inline void write(std::string& out, const json& j, int indent, int depth) {
  auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += json(it.key()).dump();
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat && indent >= 0 ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float:
      write_number(out, j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

}  // namespace detail

/// Serializes with every float at 17 significant digits, so output bytes
/// depend only on the values.
inline std::string dump(const json& j, int indent = 2) {
  std::string out;
  detail::write(out, j, indent, 0);
  return out;
}

// ---------------------------------------------------------------- reading

/// Parsed document plus the name used in diagnostics.
struct Document {
  json value;
  std::string name;
};

inline Document parse_text(const std::string& text, const std::string& name) {
  try {
    return {json::parse(text), name};
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::MalformedInput,
                name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MalformedInput, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Document load(const std::string& path) { return parse_text(read_file(path), path); }

/// A position inside a document, carried along for error messages.
class Field {
 public:
  Field(const Document& doc) : j_(&doc.value), file_(&doc.name) {}
  Field(const json& j, const std::string& file, std::string path)
      : j_(&j), file_(&file), path_(std::move(path)) {}

  const json& value() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::MalformedInput,
                *file_ + ": field '" + (path_.empty() ? "<root>" : path_) + "': " + what);
  }

  bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

  Field operator[](const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    if (!j_->contains(key)) fail("missing key '" + key + "'");
    return {j_->at(key), *file_, path_.empty() ? key : path_ + "." + key};
  }

  Field operator[](std::size_t i) const {
    return {j_->at(i), *file_, path_ + "[" + std::to_string(i) + "]"};
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    return j_->get<double>();
  }

  std::size_t index() const {
    if (!j_->is_number_integer() || j_->get<long long>() < 0) fail("expected a nonnegative integer");
    return j_->get<std::size_t>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }

  std::string string() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  std::vector<double> numbers() const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[i].number();
    return out;
  }

  std::vector<std::vector<double>> matrix() const {
    std::vector<std::vector<double>> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*this)[i].numbers();
    return out;
  }

 private:
  const json* j_;
  const std::string* file_;
  std::string path_;
};

inline MetricSpace parse_space(const Field& f) {
  const auto dist = f["dist"].matrix();
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist[i].size() != dist.size()) f["dist"][i].fail("row length differs from the number of rows");
  }
  const std::size_t base = f.has("base") ? f["base"].index() : 0;
  std::vector<std::string> labels;
  if (f.has("labels")) {
    const auto L = f["labels"];
    for (std::size_t i = 0; i < L.size(); ++i) {
      labels.push_back(L[i].value().is_number() ? L[i].value().dump() : L[i].string());
    }
  } else {
    for (std::size_t i = 0; i < dist.size(); ++i) labels.push_back(std::to_string(i));
  }
  return validate_metric(std::move(labels), Matrix::from_rows(dist), base);
}

inline FinitePoset parse_poset(const Field& f, const MetricSpace& space) {
  const auto L = f["leq"];
  std::vector<std::vector<bool>> leq(L.size());
  for (std::size_t i = 0; i < leq.size(); ++i) {
    for (std::size_t j = 0; j < L[i].size(); ++j) leq[i].push_back(L[i][j].boolean());
  }
  return {space, std::move(leq)};
}

// An embedded "space" must match the one given on the command line.
inline void check_embedded_space(const Field& f, const MetricSpace& space) {
  if (!f.has("space") || !f["space"].value().is_object()) return;
  if (!parse_space(f["space"]).same_as(space)) f["space"].fail("differs from the space argument");
}

inline ProbMeasure parse_prob(const Field& f, const MetricSpace& space) {
  if (f.has("kind") && f["kind"].string() != "probability") f["kind"].fail("expected \"probability\"");
  check_embedded_space(f, space);
  auto w = f["w"].numbers();
  if (w.size() != space.size()) f["w"].fail("length " + std::to_string(w.size()) + ", space has " +
                                            std::to_string(space.size()) + " points");
  return {space, std::move(w)};
}

inline SignedMeasure parse_signed(const Field& f, const MetricSpace& space) {
  check_embedded_space(f, space);
  auto w = f["w"].numbers();
  if (w.size() != space.size()) f["w"].fail("length differs from the space");
  return {space, std::move(w)};
}

inline ProbMeasure parse_weights(const Field& f, const MetricSpace& space) {
  auto w = f.numbers();
  if (w.size() != space.size()) f.fail("length differs from the space");
  return {space, std::move(w)};
}

inline std::vector<LipschitzFunction> parse_functions(const Field& f, const MetricSpace& space) {
  std::vector<LipschitzFunction> out;
  for (std::size_t k = 0; k < f.size(); ++k) {
    auto v = f[k].numbers();
    if (v.size() != space.size()) f[k].fail("length differs from the space");
    out.emplace_back(space, std::move(v));
  }
  return out;
}

inline UtilityFamily parse_family(const Field& f, const MetricSpace& space) {
  return {space, parse_functions(f["members"], space)};
}

inline std::vector<MeasurePair> parse_pairs(const Field& f, const MetricSpace& space) {
  std::vector<MeasurePair> out;
  const auto P = f["pairs"];
  for (std::size_t k = 0; k < P.size(); ++k) {
    out.emplace_back(parse_weights(P[k]["p"], space), parse_weights(P[k]["q"], space));
  }
  return out;
}

/// Generator pairs {"p", "q"} declare p >= q; raw "generators" are
/// zero-mass weight vectors.
inline PreferenceCone parse_cone(const Field& f, const MetricSpace& space) {
  PreferenceCone C(space);
  if (f.has("pairs")) {
    for (const auto& [p, q] : parse_pairs(f, space)) C.add_pair(p, q);
  }
  if (f.has("generators")) {
    const auto G = f["generators"];
    for (std::size_t k = 0; k < G.size(); ++k) {
      auto w = G[k].numbers();
      if (w.size() != space.size()) G[k].fail("length differs from the space");
      C.add_generator(SignedMeasure(space, std::move(w)));
    }
  }
  return C;
}

inline std::vector<ProbMeasure> parse_lotteries(const Field& f, const MetricSpace& space) {
  std::vector<ProbMeasure> out;
  const auto L = f["lotteries"];
  for (std::size_t k = 0; k < L.size(); ++k) out.push_back(parse_weights(L[k], space));
  return out;
}

inline FunctionalForm parse_form(const Field& f) {
  const auto s = f.string();
  if (s == "linear") return FunctionalForm::Linear;
  if (s == "min-of-linear") return FunctionalForm::MinOfLinear;
  if (s == "max-of-linear") return FunctionalForm::MaxOfLinear;
  f.fail("unknown form '" + s + "' (linear, min-of-linear, max-of-linear)");
}

inline FunctionalOracle parse_oracle(const Field& f, const MetricSpace& space) {
  std::vector<Functional> fs;
  const auto F = f["functionals"];
  for (std::size_t k = 0; k < F.size(); ++k) {
    fs.push_back({parse_form(F[k]["form"]), parse_functions(F[k]["utilities"], space)});
  }
  std::optional<double> bound;
  if (f.has("lipschitz_bound")) bound = f["lipschitz_bound"].number();
  return {space, std::move(fs), bound};
}

inline StateUtilityFamily parse_state_family(const Field& f, const MetricSpace& space) {
  const auto M = f["members"];
  if (M.size() == 0) M.fail("state family has no members");
  std::vector<StateUtility> members;
  std::size_t states = 0;
  for (std::size_t m = 0; m < M.size(); ++m) {
    auto tuple = parse_functions(M[m], space);
    if (m == 0) states = tuple.size();
    members.push_back(std::move(tuple));
  }
  if (f.has("states") && f["states"].size() != states) f["states"].fail("count differs from the members");
  return {space, states, members};
}

inline Act parse_act(const Field& f, const MetricSpace& space) {
  std::vector<std::string> names;
  if (f.has("states")) {
    for (std::size_t w = 0; w < f["states"].size(); ++w) names.push_back(f["states"][w].string());
  }
  std::vector<ProbMeasure> ms;
  const auto M = f["measures"];
  for (std::size_t w = 0; w < M.size(); ++w) ms.push_back(parse_weights(M[w], space));
  return {std::move(names), std::move(ms)};
}

inline Scenario parse_scenario(const Field& f) { return {f["returns"].matrix(), f["probs"].numbers()}; }

inline PiecewiseLinearUtility parse_utility(const Field& f) {
  std::vector<double> b = f.has("breakpoints") ? f["breakpoints"].numbers() : std::vector<double>{};
  return {std::move(b), f["slopes"].numbers(), f.has("value_at_zero") ? f["value_at_zero"].number() : 0.0};
}

// ------------------------------------------------------------ tolerances

using ToleranceField = std::pair<const char*, double Tolerances::*>;

inline const std::vector<ToleranceField>& tolerance_fields() {
  static const std::vector<ToleranceField> fields = {
      {"feasibility", &Tolerances::feasibility},
      {"pivot", &Tolerances::pivot},
      {"gap", &Tolerances::gap},
      {"mass", &Tolerances::mass},
      {"triangle", &Tolerances::triangle},
      {"compare", &Tolerances::compare},
      {"witness", &Tolerances::witness},
      {"boundary", &Tolerances::boundary},
      {"band", &Tolerances::band},
      {"lipschitz", &Tolerances::lipschitz},
      {"prior", &Tolerances::prior},
      {"cdf", &Tolerances::cdf},
      {"portfolio_active", &Tolerances::portfolio_active},
      {"portfolio_certificate", &Tolerances::portfolio_certificate},
  };
  return fields;
}

inline json to_json(const Tolerances& t) {
  json j = json::object();
  for (const auto& [name, member] : tolerance_fields()) j[name] = t.*member;
  return j;
}

/// Overrides the named fields of `base`; unknown keys are rejected.
inline Tolerances parse_tolerances(const Field& f, Tolerances base) {
  if (!f.value().is_object()) f.fail("expected an object");
  for (auto it = f.value().begin(); it != f.value().end(); ++it) {
    const Field v = f[it.key()];
    const auto& fields = tolerance_fields();
    const auto hit = std::find_if(fields.begin(), fields.end(),
                                  [&](const ToleranceField& e) { return it.key() == e.first; });
    if (hit == fields.end()) v.fail("unknown tolerance");
    const double x = v.number();
    if (!(x > 0.0) || !std::isfinite(x)) v.fail("tolerance must be positive");
    base.*(hit->second) = x;
  }
  return base;
}

// --------------------------------------------------------------- writers

inline json to_json(const std::vector<double>& v) { return json(v); }

inline json values(const LipschitzFunction& u) { return json(u.values()); }

inline json values(const UtilityFamily& family) {
  json a = json::array();
  for (const auto& u : family.members()) a.push_back(u.values());
  return a;
}

inline json to_json(const Matrix& m) { return json(m.to_rows()); }

}  // namespace krorder::io
