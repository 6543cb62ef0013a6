#ifndef LRP_IR_HPP
#define LRP_IR_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "lrp/ast.hpp"
#include "lrp/transform.hpp"

namespace lrp {

struct IrError : std::runtime_error {
  explicit IrError(const std::string& msg) : std::runtime_error(msg) {}
  std::string render() const {
    return std::string("error[IR]: ") + what();
  }
};

inline constexpr int kIrVersion = 1;

namespace ir {

using json = nlohmann::json;

// --- encoding ---------------------------------------------------------------

inline json encode_type(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Int: return json{{"k", "int"}};
    case Type::Kind::Unit: return json{{"k", "unit"}};
    case Type::Kind::Arrow:
      return json{{"k", "arrow"},
                  {"dom", encode_type(t->dom)},
                  {"cod", encode_type(t->cod)}};
    case Type::Kind::Propertied:
      throw IrError("propertied types never reach the IR: " + pretty(t));
  }
  throw IrError("corrupt type");
}

inline json encode_expr(const ExprPtr& e) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::IntLit:
      return json{{"k", "int"}, {"value", e->int_val}};
    case K::UnitLit:
      return json{{"k", "unit"}};
    case K::Var:
      return json{{"k", "var"}, {"name", e->name}};
    case K::App:
      return json{{"k", "app"},
                  {"fn", encode_expr(e->a)},
                  {"arg", encode_expr(e->b)}};
    case K::Plus:
      return json{{"k", "plus"},
                  {"lhs", encode_expr(e->a)},
                  {"rhs", encode_expr(e->b)}};
    case K::Minus:
      return json{{"k", "minus"},
                  {"lhs", encode_expr(e->a)},
                  {"rhs", encode_expr(e->b)}};
    case K::Let:
      return json{{"k", "let"},
                  {"name", e->name},
                  {"bound", encode_expr(e->a)},
                  {"body", encode_expr(e->b)}};
    case K::MonoRef:
      return json{{"k", "mono"}, {"name", e->name}, {"index", e->index}};
    case K::DropAfter:
      return json{{"k", "drop"}, {"name", e->name}, {"body", encode_expr(e->a)}};
    case K::RetrieveAfter:
      return json{{"k", "retrieve"},
                  {"name", e->name},
                  {"saved", encode_expr(e->b)},
                  {"body", encode_expr(e->a)}};
    default:
      throw IrError("construct never reaches the IR: " + pretty(e));
  }
}

/// Serializes a transformation result. Only fully property-erased programs
/// are encodable; a propertied program type is rejected up front.
inline json encode_document(const TransformResult& tr) {
  json monos = json::array();
  for (const auto& m : tr.delta.monos)
    monos.push_back(json{{"name", m.name},
                         {"index", m.index},
                         {"param", m.param},
                         {"body", encode_expr(m.body)},
                         {"result_type", encode_type(m.result_type)}});
  return json{{"version", kIrVersion},
              {"expr", encode_expr(tr.expr)},
              {"monos", std::move(monos)},
              {"program_type", encode_type(tr.type)}};
}

// --- decoding ---------------------------------------------------------------

namespace detail {
inline const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end())
    throw IrError(std::string("missing field '") + name + "'");
  return *it;
}
inline std::string str_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_string())
    throw IrError(std::string("field '") + name + "' must be a string");
  return f.get<std::string>();
}
inline std::int64_t int_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_number_integer())
    throw IrError(std::string("field '") + name + "' must be an integer");
  return f.get<std::int64_t>();
}
}  // namespace detail

inline TypePtr decode_type(const json& j) {
  if (!j.is_object()) throw IrError("type node must be an object");
  std::string k = detail::str_field(j, "k");
  if (k == "int") return Type::make_int();
  if (k == "unit") return Type::make_unit();
  if (k == "arrow")
    return Type::arrow(decode_type(detail::field(j, "dom")),
                       decode_type(detail::field(j, "cod")));
  throw IrError("unknown type tag '" + k + "'");
}

inline ExprPtr decode_expr(const json& j) {
  if (!j.is_object()) throw IrError("expression node must be an object");
  std::string k = detail::str_field(j, "k");
  if (k == "int") return int_lit(detail::int_field(j, "value"));
  if (k == "unit") return unit_lit();
  if (k == "var") return var(detail::str_field(j, "name"));
  if (k == "app")
    return app(decode_expr(detail::field(j, "fn")),
               decode_expr(detail::field(j, "arg")));
  if (k == "plus")
    return plus(decode_expr(detail::field(j, "lhs")),
                decode_expr(detail::field(j, "rhs")));
  if (k == "minus")
    return minus(decode_expr(detail::field(j, "lhs")),
                 decode_expr(detail::field(j, "rhs")));
  if (k == "let")
    return let(detail::str_field(j, "name"),
               decode_expr(detail::field(j, "bound")),
               decode_expr(detail::field(j, "body")));
  if (k == "mono")
    return mono_ref(detail::str_field(j, "name"), detail::int_field(j, "index"));
  if (k == "drop")
    return drop_after(detail::str_field(j, "name"),
                      decode_expr(detail::field(j, "body")));
  if (k == "retrieve")
    return retrieve_after(detail::str_field(j, "name"),
                          decode_expr(detail::field(j, "saved")),
                          decode_expr(detail::field(j, "body")));
  throw IrError("unknown expression tag '" + k + "'");
}

inline TransformResult decode_document(const json& j) {
  if (!j.is_object()) throw IrError("document must be an object");
  if (detail::int_field(j, "version") != kIrVersion)
    throw IrError("unsupported document version");
  TransformResult tr;
  tr.expr = decode_expr(detail::field(j, "expr"));
  tr.type = decode_type(detail::field(j, "program_type"));
  const json& monos = detail::field(j, "monos");
  if (!monos.is_array()) throw IrError("field 'monos' must be an array");
  for (const json& m : monos) {
    MonoFunc mono;
    mono.name = detail::str_field(m, "name");
    mono.index = detail::int_field(m, "index");
    mono.param = detail::str_field(m, "param");
    mono.body = decode_expr(detail::field(m, "body"));
    mono.result_type = decode_type(detail::field(m, "result_type"));
    tr.delta.monos.push_back(std::move(mono));
  }
  return tr;
}

inline std::string to_text(const TransformResult& tr) {
  return encode_document(tr).dump(2) + "\n";
}

inline TransformResult from_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw IrError("malformed JSON");
  return decode_document(j);
}

}  // namespace ir
}  // namespace lrp

#endif  // LRP_IR_HPP
