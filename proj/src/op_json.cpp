#include "hjbrec/op_json.hpp"

#include "hjbrec/errors.hpp"

namespace hjbrec {

namespace {

template <OpKind Kind>
constexpr const char* orders_key() {
  return Kind == OpKind::Differential ? "dords" : "shifts";
}

template <OpKind Kind>
nlohmann::json encode(const Operator<Kind>& op) {
  nlohmann::json j;
  j["vars"] = op.vars();
  if (!op.params().empty()) j["params"] = op.params();
  auto terms = nlohmann::json::array();
  for (const auto& [orders, coeff] : op.terms()) {
    for (const auto& [pows, c] : coeff.terms()) {
      terms.push_back({{"coef", c.str()}, {"pows", pows}, {orders_key<Kind>(), orders}});
    }
  }
  j["terms"] = std::move(terms);
  return j;
}

std::vector<int> int_vector(const nlohmann::json& j, const char* what, std::size_t expected) {
  if (!j.is_array() || j.size() != expected) {
    throw ParseError(std::string("'") + what + "' must be an array of length " +
                         std::to_string(expected),
                     0);
  }
  std::vector<int> v;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw ParseError(std::string("non-integer in '") + what + "'", 0);
    v.push_back(x.get<int>());
  }
  return v;
}

template <OpKind Kind>
Operator<Kind> decode(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vars") || !j.contains("terms")) {
    throw ParseError("operator JSON needs 'vars' and 'terms'", 0);
  }
  auto vars = j.at("vars").get<std::vector<std::string>>();
  std::vector<std::string> params;
  if (j.contains("params")) params = j.at("params").get<std::vector<std::string>>();
  Operator<Kind> op(vars, params);
  std::size_t index = 0;
  for (const auto& t : j.at("terms")) {
    if (!t.contains("coef") || !t.at("coef").is_string()) {
      throw ParseError("term " + std::to_string(index) + ": 'coef' must be a rational string", index);
    }
    const Rational c = Rational::parse(t.at("coef").get<std::string>());
    const auto pows = int_vector(t.at("pows"), "pows", vars.size() + params.size());
    const auto ords = int_vector(t.at(orders_key<Kind>()), orders_key<Kind>(), vars.size());
    for (int p : pows) {
      if (p < 0) throw ParseError("negative exponent in 'pows'", index);
    }
    op.add_monomial(pows, ords, c);
    ++index;
  }
  return op;
}

}  // namespace

nlohmann::json to_json(const DiffOp& op) { return encode(op); }
nlohmann::json to_json(const ShiftOp& op) { return encode(op); }

DiffOp diff_op_from_json(const nlohmann::json& j) { return decode<OpKind::Differential>(j); }
ShiftOp shift_op_from_json(const nlohmann::json& j) { return decode<OpKind::Shift>(j); }

}  // namespace hjbrec
