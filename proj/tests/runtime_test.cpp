#include <catch2/catch_amalgamated.hpp>

#include <climits>
#include <cstdint>

#include "lrp/parser.hpp"
#include "lrp/runtime.hpp"
#include "lrp/transform.hpp"
#include "lrp/typecheck.hpp"

using namespace lrp;

namespace {

TransformResult pipeline(const std::string& src) {
  ExprPtr e = parse_program(src);
  check_program(e);
  return transform_program(e);
}

Value run_src(const std::string& src, RunOptions opts = {}) {
  TransformResult tr = pipeline(src);
  RuntimeCtx phi = ready(tr.delta, tr.type);
  return run(phi, tr.expr, opts);
}

}  // namespace

TEST_CASE("ready gate") {
  SECTION("accepts non-propertied programs and erases types") {
    TransformResult tr =
        pipeline("let y = 5 in func f x : int with x + y in f 1");
    RuntimeCtx phi = ready(tr.delta, tr.type);
    REQUIRE(phi.monos.size() == 1);
    const auto* fn = phi.find("f", 1);
    REQUIRE(fn != nullptr);
    REQUIRE(fn->first == "x");
    REQUIRE(pretty(fn->second) == "x + y");
  }
  SECTION("rejects a propertied program type") {
    TransformResult tr = pipeline("set(5, c, 5)");
    try {
      ready(tr.delta, tr.type);
      FAIL("expected R-UNREADY");
    } catch (const RunError& e) {
      REQUIRE(e.code == RunCode::Unready);
    }
  }
}

TEST_CASE("value judgment") {
  REQUIRE(is_value(int_lit(6)));
  REQUIRE(is_value(unit_lit()));
  REQUIRE(is_value(mono_ref("f", 1)));
  REQUIRE_FALSE(is_value(var("x")));
  REQUIRE_FALSE(is_value(plus(int_lit(1), int_lit(2))));
}

TEST_CASE("single transitions") {
  RuntimeCtx phi;
  phi.monos[{"f", 1}] = {"x", plus(var("x"), var("y"))};

  SECTION("variables read the most recent binding") {
    Store s;
    s.bind("x", Value::make_int(1));
    s.bind("x", Value::make_int(2));
    StepResult r = step(phi, s, var("x"));
    REQUIRE(r.rule == "Var");
    REQUIRE(r.expr->int_val == 2);
  }
  SECTION("application of a fresh parameter drops after") {
    Store s;
    s.bind("y", Value::make_int(5));
    StepResult r = step(phi, s, app(mono_ref("f", 1), int_lit(1)));
    REQUIRE(r.rule == "App-1");
    REQUIRE(pretty(r.expr) == "drop x after x + y");
    REQUIRE(s.lookup("x")->n == 1);
  }
  SECTION("application over an existing binding retrieves after") {
    Store s;
    s.bind("x", Value::make_int(9));
    StepResult r = step(phi, s, app(mono_ref("f", 1), int_lit(1)));
    REQUIRE(r.rule == "App-2");
    REQUIRE(pretty(r.expr) == "retrieve x = 9 after x + y");
    REQUIRE(s.lookup("x")->n == 1);
  }
  SECTION("function arguments are dead") {
    Store s;
    StepResult r = step(phi, s, app(mono_ref("f", 1), mono_ref("g", 2)));
    REQUIRE(r.rule == "App-With-Func");
    REQUIRE(pretty(r.expr) == "x + y");
    REQUIRE(s.empty());
  }
  SECTION("arithmetic") {
    Store s;
    StepResult r = step(phi, s, plus(int_lit(1), int_lit(5)));
    REQUIRE(r.rule == "Plus");
    REQUIRE(r.expr->int_val == 6);
    r = step(phi, s, minus(int_lit(1), int_lit(5)));
    REQUIRE(r.rule == "Minus");
    REQUIRE(r.expr->int_val == -4);
  }
  SECTION("congruence positions evaluate left to right") {
    Store s;
    s.bind("a", Value::make_int(1));
    StepResult r = step(phi, s, plus(var("a"), var("b")));
    REQUIRE(r.rule == "Var");
    REQUIRE(pretty(r.expr) == "1 + b");
  }
  SECTION("retrieve restores the previous value") {
    Store s;
    s.bind("x", Value::make_int(1));
    StepResult r = step(phi, s, retrieve_after("x", int_lit(9), int_lit(2)));
    REQUIRE(r.rule == "Retrieve-After-2");
    REQUIRE(r.expr->int_val == 2);
    REQUIRE(s.lookup("x")->n == 9);
  }
  SECTION("drop removes the binding") {
    Store s;
    s.bind("y", Value::make_int(5));
    s.bind("x", Value::make_int(1));
    StepResult r = step(phi, s, drop_after("x", int_lit(6)));
    REQUIRE(r.rule == "Drop-After-2");
    REQUIRE(r.expr->int_val == 6);
    REQUIRE(s.lookup("x") == nullptr);
    REQUIRE(s.lookup("y")->n == 5);
  }
  SECTION("overflow is detected") {
    Store s;
    REQUIRE_THROWS_AS(step(phi, s, plus(int_lit(INT64_MAX), int_lit(1))),
                      RunError);
    REQUIRE_THROWS_AS(step(phi, s, minus(int_lit(INT64_MIN), int_lit(1))),
                      RunError);
  }
}

TEST_CASE("worked example replays step by step") {
  TransformResult tr =
      pipeline("let y = 5 in func f x : int with x + y in f 1");
  RuntimeCtx phi = ready(tr.delta, tr.type);
  Store s;

  ExprPtr e = tr.expr;
  StepResult r = step(phi, s, e);
  REQUIRE(r.rule == "Let-1");
  REQUIRE(pretty(r.expr) == "drop y after f[1] 1");

  r = step(phi, s, r.expr);
  REQUIRE(r.rule == "App-1");
  REQUIRE(pretty(r.expr) == "drop y after drop x after x + y");
  REQUIRE(s.lookup("y")->n == 5);
  REQUIRE(s.lookup("x")->n == 1);

  r = step(phi, s, r.expr);
  REQUIRE(r.rule == "Var");
  REQUIRE(pretty(r.expr) == "drop y after drop x after 1 + y");

  r = step(phi, s, r.expr);
  REQUIRE(r.rule == "Var");
  REQUIRE(pretty(r.expr) == "drop y after drop x after 1 + 5");

  r = step(phi, s, r.expr);
  REQUIRE(r.rule == "Plus");
  REQUIRE(pretty(r.expr) == "drop y after drop x after 6");

  r = step(phi, s, r.expr);
  REQUIRE(r.rule == "Drop-After-2");
  REQUIRE(pretty(r.expr) == "drop y after 6");
  REQUIRE(s.lookup("x") == nullptr);

  r = step(phi, s, r.expr);
  REQUIRE(r.rule == "Drop-After-2");
  REQUIRE(pretty(r.expr) == "6");
  REQUIRE(s.empty());
}

TEST_CASE("complete runs") {
  REQUIRE(run_src("let y = 5 in func f x : int with x + y in f 1") ==
          Value::make_int(6));
  REQUIRE(run_src("func f x : int with if-has x c : int bind-as c in c + 1 "
                  "else extract(x) in let y = set(5, c, 5) in f y") ==
          Value::make_int(6));
  REQUIRE(run_src("()") == Value::make_unit());
  REQUIRE(run_src("1 - 2 + 3") == Value::make_int(2));
  SECTION("shadowed bindings are restored") {
    REQUIRE(run_src("func f x : int with x + 0 in let x = 1 in f 2 + x") ==
            Value::make_int(3));
  }
  SECTION("function arguments evaluate through specialization") {
    REQUIRE(run_src("func g y : int with y + 1 in "
                    "func f h : int -> int with 9 in f g") ==
            Value::make_int(9));
  }
}

TEST_CASE("run enforces the step budget") {
  RunOptions opts;
  opts.max_steps = 2;
  try {
    run_src("let y = 5 in func f x : int with x + y in f 1", opts);
    FAIL("expected R-MAX-STEPS");
  } catch (const RunError& e) {
    REQUIRE(e.code == RunCode::MaxSteps);
  }
}

TEST_CASE("trace callback reports rules and stores") {
  RunOptions opts;
  std::vector<std::string> rules;
  opts.on_step = [&](const Store&, const ExprPtr&, const std::string& rule,
                     const Store&, const ExprPtr&) { rules.push_back(rule); };
  REQUIRE(run_src("let y = 5 in func f x : int with x + y in f 1", opts) ==
          Value::make_int(6));
  REQUIRE(rules == std::vector<std::string>{"Let-1", "App-1", "Var", "Var",
                                            "Plus", "Drop-After-2",
                                            "Drop-After-2"});
}

TEST_CASE("stuck configurations are reported") {
  RuntimeCtx phi;
  Store s;
  REQUIRE_THROWS_AS(step(phi, s, var("nope")), RunError);
  REQUIRE_THROWS_AS(step(phi, s, app(int_lit(1), int_lit(2))), RunError);
  REQUIRE_THROWS_AS(step(phi, s, app(mono_ref("f", 1), int_lit(2))), RunError);
  REQUIRE_THROWS_AS(step(phi, s, set_prop(int_lit(1), "p", int_lit(2))),
                    RunError);
}
