#include <catch2/catch_amalgamated.hpp>

#include "lrp/ir.hpp"
#include "lrp/parser.hpp"
#include "lrp/transform.hpp"
#include "lrp/typecheck.hpp"

using namespace lrp;

namespace {

TransformResult pipeline(const std::string& src) {
  ExprPtr e = parse_program(src);
  check_program(e);
  return transform_program(e);
}

}  // namespace

TEST_CASE("documents round-trip") {
  std::vector<std::string> sources = {
      "5",
      "let y = 5 in func f x : int with x + y in f 1",
      "func f x : int with if-has x c : int bind-as c in c + 1 "
      "else extract(x) in let y = set(5, c, 5) in f y",
      "func g y : int with y + 1 in func f h : int -> int with 9 in f g",
  };
  for (const auto& src : sources) {
    TransformResult tr = pipeline(src);
    TransformResult back = ir::from_text(ir::to_text(tr));
    INFO(src);
    REQUIRE(expr_equal(back.expr, tr.expr));
    REQUIRE(type_equal(back.type, tr.type));
    REQUIRE(back.delta.monos.size() == tr.delta.monos.size());
    for (std::size_t i = 0; i < tr.delta.monos.size(); ++i) {
      REQUIRE(back.delta.monos[i].name == tr.delta.monos[i].name);
      REQUIRE(back.delta.monos[i].index == tr.delta.monos[i].index);
      REQUIRE(back.delta.monos[i].param == tr.delta.monos[i].param);
      REQUIRE(expr_equal(back.delta.monos[i].body, tr.delta.monos[i].body));
      REQUIRE(type_equal(back.delta.monos[i].result_type,
                         tr.delta.monos[i].result_type));
    }
  }
}

TEST_CASE("serialization is byte-stable") {
  const std::string src =
      "let y = 5 in func f x : int with x + y in f 1";
  REQUIRE(ir::to_text(pipeline(src)) == ir::to_text(pipeline(src)));
}

TEST_CASE("a trivial program has an empty mono table") {
  ir::json doc = ir::encode_document(pipeline("5"));
  REQUIRE(doc["version"] == 1);
  REQUIRE(doc["monos"].empty());
  REQUIRE(doc["expr"]["k"] == "int");
  REQUIRE(doc["expr"]["value"] == 5);
  REQUIRE(doc["program_type"]["k"] == "int");
}

TEST_CASE("compile-time constructs never reach the IR") {
  TransformResult tr = pipeline("set(5, c, 5)");  // propertied program type
  REQUIRE_THROWS_AS(ir::encode_document(tr), IrError);
  TypePtr i = Type::make_int();
  REQUIRE_THROWS_AS(
      ir::encode_type(Type::propertied(i, {Property{"p", int_lit(1), i}})),
      IrError);
  REQUIRE_THROWS_AS(ir::encode_expr(propertied_val(int_lit(1))), IrError);
  REQUIRE_THROWS_AS(ir::encode_expr(set_prop(int_lit(1), "p", int_lit(2))),
                    IrError);
}

TEST_CASE("load errors") {
  REQUIRE_THROWS_AS(ir::from_text("not json"), IrError);
  REQUIRE_THROWS_AS(ir::from_text("[1, 2]"), IrError);
  REQUIRE_THROWS_AS(
      ir::from_text(R"({"version": 2, "expr": {"k": "int", "value": 1},)"
                    R"( "monos": [], "program_type": {"k": "int"}})"),
      IrError);
  REQUIRE_THROWS_AS(
      ir::from_text(R"({"version": 1, "expr": {"k": "whatever"},)"
                    R"( "monos": [], "program_type": {"k": "int"}})"),
      IrError);
  REQUIRE_THROWS_AS(
      ir::from_text(R"({"version": 1, "expr": {"k": "int", "value": 1},)"
                    R"( "program_type": {"k": "int"}})"),
      IrError);
}

TEST_CASE("runtime internals are encodable") {
  ExprPtr e = retrieve_after("x", int_lit(9),
                             drop_after("y", app(mono_ref("f", 2), var("x"))));
  ExprPtr back = ir::decode_expr(ir::encode_expr(e));
  REQUIRE(expr_equal(back, e));
}
