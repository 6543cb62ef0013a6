#include <catch2/catch_amalgamated.hpp>

#include "lrp/parser.hpp"
#include "lrp/transform.hpp"
#include "lrp/typecheck.hpp"

using namespace lrp;

namespace {

TransformResult transform_src(const std::string& src) {
  ExprPtr e = parse_program(src);
  check_program(e);
  return transform_program(e);
}

bool contains_propertied(const ExprPtr& e) {
  if (!e) return false;
  if (e->kind == Expr::Kind::PropertiedVal) return true;
  return contains_propertied(e->a) || contains_propertied(e->b) ||
         contains_propertied(e->c);
}

}  // namespace

TEST_CASE("values transform into themselves") {
  TransformResult tr = transform_src("5");
  REQUIRE(pretty(tr.expr) == "5");
  REQUIRE(type_equal(tr.type, Type::make_int()));
  REQUIRE(tr.delta.raw.empty());
  REQUIRE(tr.delta.monos.empty());

  REQUIRE(pretty(transform_src("()").expr) == "()");
  REQUIRE(pretty(transform_src("1 + 2").expr) == "1 + 2");  // no folding
}

TEST_CASE("golden: first worked example") {
  TransformResult tr =
      transform_src("let y = 5 in func f x : int with x + y in f 1");
  REQUIRE(pretty(tr.expr) == "let y = 5 in f[1] 1");
  REQUIRE(type_equal(tr.type, Type::make_int()));

  REQUIRE(tr.delta.raw.size() == 1);
  const RawFunc& r = tr.delta.raw[0];
  REQUIRE(r.name == "f");
  REQUIRE(r.param == "x");
  REQUIRE(pretty(r.body) == "x + y");
  REQUIRE(type_equal(r.result_type, Type::make_int()));

  REQUIRE(tr.delta.monos.size() == 1);
  const MonoFunc& m = tr.delta.monos[0];
  REQUIRE(m.name == "f");
  REQUIRE(m.index == 1);
  REQUIRE(pretty(m.body) == "x + y");
  REQUIRE(type_equal(m.result_type, Type::make_int()));
}

TEST_CASE("golden: second worked example") {
  TransformResult tr = transform_src(
      "func f x : int with if-has x c : int bind-as c in c + 1 "
      "else extract(x) in let y = set(5, c, 5) in f y");
  REQUIRE(pretty(tr.expr) == "let y = 5 in f[1] y");
  REQUIRE(type_equal(tr.type, Type::make_int()));
  REQUIRE(tr.delta.monos.size() == 1);
  REQUIRE(tr.delta.monos[0].index == 1);
  REQUIRE(pretty(tr.delta.monos[0].body) == "let c = 5 in c + 1");
  REQUIRE(type_equal(tr.delta.monos[0].result_type, Type::make_int()));
}

TEST_CASE("set produces propertied values and types") {
  SECTION("fresh property") {
    TransformResult tr = transform_src("set(1, p, 2)");
    REQUIRE(tr.expr->kind == Expr::Kind::PropertiedVal);
    REQUIRE(pretty(tr.type) == "[int]⟨p↪2[int]⟩");
  }
  SECTION("append keeps order, update replaces in place") {
    TransformResult tr = transform_src("set(set(set(1, p, 2), q, 3), p, 4)");
    REQUIRE(pretty(tr.type) == "[int]⟨p↪4[int], q↪3[int]⟩");
  }
  SECTION("property expressions are transformed at the set site") {
    TransformResult tr = transform_src(
        "func g y : int with y + 1 in let w = set(1, p, g 2) in extract(w)");
    // the residual let keeps the underlying value; extract(w) resolves to w
    REQUIRE(pretty(tr.expr) == "let w = 1 in w");
    // the stored property carries the compiled application
    REQUIRE(tr.delta.monos.size() == 1);
  }
}

TEST_CASE("get splices the stored expression at the consumption site") {
  TransformResult tr = transform_src("get(set(1, p, 2 + 3), p)");
  REQUIRE(pretty(tr.expr) == "2 + 3");
  REQUIRE(type_equal(tr.type, Type::make_int()));
}

TEST_CASE("splicing re-transforms stored applications") {
  TransformResult tr = transform_src(
      "func g y : int with y + 1 in get(set(1, p, g 5), p)");
  REQUIRE(pretty(tr.expr) == "g[1] 5");
  REQUIRE(tr.delta.monos.size() == 1);
}

TEST_CASE("extract and erase") {
  REQUIRE(pretty(transform_src("extract(set(1 + 1, p, 9))").expr) == "1 + 1");
  TransformResult tr = transform_src("extract(erase(set(1, p, 2), p))");
  REQUIRE(pretty(tr.expr) == "1");
  REQUIRE(type_equal(tr.type, Type::make_int()));
}

TEST_CASE("arithmetic unwraps propertied operands") {
  TransformResult tr = transform_src("set(1, p, 9) + set(2, q, 8)");
  REQUIRE(pretty(tr.expr) == "1 + 2");
  TransformResult tr2 = transform_src("let y = set(7, p, 1) in y - 2");
  REQUIRE(pretty(tr2.expr) == "let y = 7 in y - 2");
}

TEST_CASE("if-has compiles to a single branch") {
  SECTION("plain scrutinee takes the else branch as a propertied value") {
    TransformResult tr = transform_src(
        "let x = 1 in if-has x p : int bind-as b in b else extract(x)");
    REQUIRE(pretty(tr.expr) == "let x = 1 in x");
  }
  SECTION("missing property takes the else branch") {
    TransformResult tr = transform_src(
        "let y = set(1, q, 2) in if-has y p : int bind-as b in b else 0");
    REQUIRE(pretty(tr.expr) == "let y = 1 in 0");
  }
  SECTION("property present at a different type takes the else branch") {
    TransformResult tr = transform_src(
        "let y = set(1, p, ()) in if-has y p : int bind-as b in b else 7");
    REQUIRE(pretty(tr.expr) == "let y = 1 in 7");
  }
  SECTION("property present at the declared type binds through a let") {
    TransformResult tr = transform_src(
        "let y = set(1, p, 2 + 3) in "
        "if-has y p : int bind-as b in b + extract(y) else 0");
    REQUIRE(pretty(tr.expr) == "let y = 1 in let b = 2 + 3 in b + y");
  }
  SECTION("a function-valued property is consumed at compile time") {
    TransformResult tr = transform_src(
        "func g y : int with y + 1 in let w = set(1, p, g) in "
        "if-has w p : int -> int bind-as h in h 5 else 0");
    REQUIRE(pretty(tr.expr) == "let w = 1 in g[1] 5");
    REQUIRE(tr.delta.monos.size() == 1);
    REQUIRE(pretty(tr.delta.monos[0].body) == "y + 1");
  }
}

TEST_CASE("let forms") {
  SECTION("plain bindings stay") {
    REQUIRE(pretty(transform_src("let x = 1 + 2 in x + 3").expr) ==
            "let x = 1 + 2 in x + 3");
  }
  SECTION("propertied bindings keep the underlying value") {
    TransformResult tr =
        transform_src("let y = set(5, c, 5) in extract(y) + get(y, c)");
    REQUIRE(pretty(tr.expr) == "let y = 5 in y + 5");
  }
  SECTION("function bindings are erased") {
    TransformResult tr = transform_src(
        "func f x : int with x + 1 in let g = f in g 3");
    REQUIRE(pretty(tr.expr) == "f[1] 3");
  }
}

TEST_CASE("monomorphization reuse and distinction") {
  SECTION("equal keys reuse one specialization") {
    TransformResult tr =
        transform_src("func f x : int with x + 1 in f 1 + f 2");
    REQUIRE(tr.delta.monos.size() == 1);
    REQUIRE(pretty(tr.expr) == "f[1] 1 + f[1] 2");
  }
  SECTION("distinct property payloads make distinct specializations") {
    TransformResult tr = transform_src(
        "func f x : int with x + 1 in f set(1, p, 1) + f set(1, p, 2)");
    REQUIRE(tr.delta.monos.size() == 2);
    REQUIRE(pretty(tr.expr) == "f[1] 1 + f[2] 1");
  }
  SECTION("a parameter's property is visible inside the specialized body") {
    TransformResult tr = transform_src(
        "func f x : int with if-has x p : int bind-as b in b else 0 in "
        "f set(7, p, 3) + f 7");
    REQUIRE(tr.delta.monos.size() == 2);
    REQUIRE(pretty(tr.delta.monos[0].body) == "let b = 3 in b");
    REQUIRE(pretty(tr.delta.monos[1].body) == "0");
  }
  SECTION("function arguments specialize by identity") {
    TransformResult tr = transform_src(
        "func g y : int with y + 1 in func h z : int with z - 1 in "
        "func f w : int -> int with 9 in f g + f h + f g");
    // one mono per distinct passed function, plus none for g/h themselves
    std::size_t f_monos = 0;
    for (const auto& m : tr.delta.monos)
      if (m.name == "f") ++f_monos;
    REQUIRE(f_monos == 2);
  }
}

TEST_CASE("transformation is deterministic") {
  const std::string src =
      "func f x : int with if-has x c : int bind-as c in c + 1 "
      "else extract(x) in let y = set(5, c, 5) in f y";
  TransformResult a = transform_src(src);
  TransformResult b = transform_src(src);
  REQUIRE(serialize(a.expr) == serialize(b.expr));
  REQUIRE(serialize(a.type) == serialize(b.type));
  REQUIRE(a.delta.monos.size() == b.delta.monos.size());
  for (std::size_t i = 0; i < a.delta.monos.size(); ++i)
    REQUIRE(serialize(a.delta.monos[i].body) ==
            serialize(b.delta.monos[i].body));
}

TEST_CASE("property erasure") {
  std::vector<std::string> sources = {
      "let y = 5 in func f x : int with x + y in f 1",
      "func f x : int with if-has x c : int bind-as c in c + 1 "
      "else extract(x) in let y = set(5, c, 5) in f y",
      "let y = set(1, p, 2) in get(y, p) + extract(y)",
      "func g y : int with y + 1 in get(set(1, p, g 5), p)",
  };
  for (const auto& src : sources) {
    TransformResult tr = transform_src(src);
    INFO(src);
    REQUIRE_FALSE(tr.type->is_propertied());
    REQUIRE_FALSE(contains_propertied(tr.expr));
    for (const auto& m : tr.delta.monos) {
      REQUIRE_FALSE(contains_propertied(m.body));
      REQUIRE_FALSE(m.param_type->is_propertied());
      REQUIRE_FALSE(m.result_type->is_propertied());
    }
  }
}

TEST_CASE("a top-level propertied program transforms but keeps its type") {
  TransformResult tr = transform_src("set(5, c, 5)");
  REQUIRE(tr.type->is_propertied());
  REQUIRE(pretty(tr.type) == "[int]⟨c↪5[int]⟩");
  REQUIRE(tr.expr->kind == Expr::Kind::PropertiedVal);
}

TEST_CASE("splice scope violations are reported") {
  // a stored property expression whose variable is unknown at the splice site
  Transformer t;
  TypePtr i = Type::make_int();
  TypePtr ty = Type::propertied(i, {Property{"p", var("z"), i}});
  TransformEnv env = TransformEnv{}.extended(
      "x", Binding::rewrite(propertied_val(int_lit(1)), ty));
  try {
    t.transform(env, get_prop(var("x"), "p"));
    FAIL("expected T-SPLICE-SCOPE");
  } catch (const TransformError& e) {
    REQUIRE(e.code == TransformCode::SpliceScope);
  }
}

TEST_CASE("rule firing counters are exposed") {
  Transformer t;
  ExprPtr e = parse_program("let y = set(1, p, 2) in get(y, p)");
  check_program(e);
  t.transform(TransformEnv{}, e);
  REQUIRE(t.rule_counts["R-Set-1"] == 1);
  REQUIRE(t.rule_counts["R-Get"] == 1);
  REQUIRE(t.rule_counts["R-Let-Prop-1"] == 1);
  REQUIRE(t.rule_counts["R-V-Int"] >= 2);
}

TEST_CASE("transformed output re-checks at the same type") {
  std::vector<std::string> sources = {
      "let y = 5 in func f x : int with x + y in f 1",
      "func f x : int with if-has x c : int bind-as c in c + 1 "
      "else extract(x) in let y = set(5, c, 5) in f y",
      "func f x : int with x + 1 in f 1 + f 2",
  };
  for (const auto& src : sources) {
    TransformResult tr = transform_src(src);
    INFO(src);
    TypePtr again =
        infer(TypingEnv{}, tr.expr, TypingMode::Runtime, &tr.delta);
    REQUIRE(type_equal(again, tr.type));
  }
}
