#ifndef LRP_TESTKIT_HPP
#define LRP_TESTKIT_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "lrp/ast.hpp"
#include "lrp/runtime.hpp"
#include "lrp/transform.hpp"
#include "lrp/typecheck.hpp"

namespace lrp {

struct GenConfig {
  std::uint64_t seed = 0;
  int max_depth = 5;
  int max_funcs = 3;
  int max_props = 2;
  std::int64_t int_min = -16;
  std::int64_t int_max = 16;
};

namespace testkit {

namespace detail {

/// A variable visible to the generator. `flex` marks function parameters,
/// which the checker types under two views at once; such variables are only
/// usable where both views agree (arithmetic operands, argument positions,
/// if-has scrutinees, set targets).
struct GBind {
  std::string name;
  TypePtr type;
  bool flex = false;
};
using GEnv = std::vector<GBind>;

inline const GBind* genv_lookup(const GEnv& env, const std::string& name) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i].name == name) return &env[i];
  return nullptr;
}

class Gen {
 public:
  explicit Gen(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  ExprPtr program() {
    funcs_made_ = 0;
    names_ = 0;
    TypePtr target = pct(80) ? Type::make_int() : Type::make_unit();
    return gen(GEnv{}, target, cfg_.max_depth);
  }

 private:
  GenConfig cfg_;
  std::mt19937_64 rng_;
  int funcs_made_ = 0;
  int names_ = 0;

  // --- randomness helpers ---------------------------------------------------

  std::size_t rnd(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  bool pct(int p) { return rnd(100) < static_cast<std::size_t>(p); }
  std::string fresh(const char* stem) {
    return std::string(stem) + std::to_string(++names_);
  }
  std::string prop_name() {
    static const char* pool[] = {"p", "q", "r", "s"};
    int n = cfg_.max_props < 1 ? 1 : (cfg_.max_props > 4 ? 4 : cfg_.max_props);
    return pool[rnd(static_cast<std::size_t>(n))];
  }
  ExprPtr int_literal() {
    // no unary minus in the grammar, so literals are non-negative; negative
    // values still arise at runtime through subtraction
    std::int64_t hi = cfg_.int_max < 0 ? 0 : cfg_.int_max;
    return int_lit(static_cast<std::int64_t>(rnd(static_cast<std::size_t>(hi) + 1)));
  }
  ExprPtr literal(const TypePtr& t) {
    return t->is_unit() ? unit_lit() : int_literal();
  }

  // --- environment queries --------------------------------------------------

  using Pred = bool (*)(const GBind&);

  std::optional<GBind> pick_var(const GEnv& env, auto&& pred) {
    std::vector<GBind> hits;
    for (const auto& b : env)
      if (genv_lookup(env, b.name) == &b && pred(b)) hits.push_back(b);
    if (hits.empty()) return std::nullopt;
    return hits[rnd(hits.size())];
  }

  TypingEnv plain_view(const GEnv& env) {
    TypingEnv out;
    for (const auto& b : env) out = out.extended(b.name, b.type);
    return out;
  }

  // --- expression generation ------------------------------------------------

  /// Closed well-typed expression of the given non-propertied, non-arrow type.
  ExprPtr gen(const GEnv& env, const TypePtr& t, int d) {
    if (d <= 0) return leaf(env, t);
    switch (rnd(12)) {
      case 0: return leaf(env, t);
      case 1: return leaf(env, t);
      case 2:
        if (t->is_int()) return gen_arith(env, d);
        return leaf(env, t);
      case 3: return gen_let(env, t, d);
      case 4: return gen_func(env, t, d);
      case 5: return gen_app(env, t, d);
      case 6: return gen_app(env, t, d);
      case 7: return gen_if_has(env, t, d);
      case 8: return gen_extract(env, t, d);
      case 9: return gen_get(env, t, d);
      case 10:
        if (t->is_int()) return gen_app_twice(env, d);
        return gen_app(env, t, d);
      default: return gen_let(env, t, d);
    }
  }

  ExprPtr leaf(const GEnv& env, const TypePtr& t) {
    if (pct(50)) {
      auto v = pick_var(env, [&](const GBind& b) {
        return !b.flex && type_equal(b.type, t);
      });
      if (v) return var(v->name);
    }
    return literal(t);
  }

  /// One side of + or -: anything int-like, including flex parameters and
  /// propertied-int variables.
  ExprPtr operand(const GEnv& env, int d) {
    if (pct(45)) {
      auto v = pick_var(env, [](const GBind& b) {
        if (b.type->is_int()) return true;
        return b.type->is_propertied() && b.type->base->is_int();
      });
      if (v) return var(v->name);
    }
    return gen(env, Type::make_int(), d - 1);
  }

  ExprPtr gen_arith(const GEnv& env, int d) {
    ExprPtr l = operand(env, d);
    ExprPtr r = operand(env, d);
    return pct(60) ? plus(l, r) : minus(l, r);
  }

  /// Expression allowed inside a property payload: no flex parameters (the
  /// two typing views of a parameter disagree there) and kept shallow so that
  /// splicing at consumption sites stays in scope.
  ExprPtr gen_prop_expr(const GEnv& env, const TypePtr& p, int d) {
    if (d > 0 && p->is_int() && pct(20))
      return pct(50) ? plus(int_literal(), int_literal())
                     : minus(int_literal(), int_literal());
    if (d > 0 && pct(20)) {
      // an application inside a property exercises splice-time compilation
      auto f = pick_var(env, [&](const GBind& b) {
        return !b.flex && b.type->is_arrow() && !b.type->dom->is_arrow() &&
               type_equal(b.type->cod, p);
      });
      if (f) return app(var(f->name), literal(f->type->dom));
    }
    if (pct(25)) {
      auto v = pick_var(env, [&](const GBind& b) {
        return !b.flex && type_equal(b.type, p);
      });
      if (v) return var(v->name);
    }
    return literal(p);
  }

  TypePtr prop_payload_type() {
    return pct(75) ? Type::make_int() : Type::make_unit();
  }

  /// A set chain over a base expression, yielding a propertied value.
  ExprPtr gen_set_chain(const GEnv& env, const TypePtr& base, int d) {
    ExprPtr m;
    auto v = pick_var(env, [&](const GBind& b) {
      return type_equal(b.type, base) ||
             (b.type->is_propertied() && type_equal(b.type->base, base));
    });
    if (v && pct(40))
      m = var(v->name);
    else
      m = gen(env, base, d > 1 ? 1 : d);
    int sets = 1 + static_cast<int>(rnd(2));
    for (int i = 0; i < sets; ++i) {
      TypePtr pt = prop_payload_type();
      m = set_prop(m, prop_name(), gen_prop_expr(env, pt, d - 1));
    }
    if (pct(15)) {
      // erase one of the properties we may have added; validated downstream
      m = erase_prop(m, prop_name());
    }
    return m;
  }

  ExprPtr gen_let(const GEnv& env, const TypePtr& t, int d) {
    std::string name =
        pct(15) && !env.empty() ? env[rnd(env.size())].name : fresh("v");
    ExprPtr bound;
    TypePtr bound_ty;
    switch (rnd(4)) {
      case 0: {  // propertied binding
        TypePtr base = pct(75) ? Type::make_int() : Type::make_unit();
        bound = gen_set_chain(env, base, d - 1);
        break;
      }
      case 1: {  // function binding
        auto f = pick_var(env, [](const GBind& b) {
          return !b.flex && b.type->is_arrow();
        });
        if (f) {
          bound = var(f->name);
          break;
        }
        [[fallthrough]];
      }
      default:
        bound = gen(env, pct(75) ? Type::make_int() : Type::make_unit(), d - 1);
    }
    try {
      bound_ty = infer(plain_view(env), bound);
    } catch (const TypeError&) {
      bound = literal(Type::make_int());
      bound_ty = Type::make_int();
    }
    GEnv env2 = env;
    env2.push_back({name, bound_ty, false});
    return let(name, bound, gen(env2, t, d - 1));
  }

  ExprPtr gen_func(const GEnv& env, const TypePtr& t, int d) {
    if (funcs_made_ >= cfg_.max_funcs) return gen_app(env, t, d);
    ++funcs_made_;
    std::string fname = fresh("f");
    std::string param = fresh("x");
    TypePtr t1;
    switch (rnd(10)) {
      case 0: t1 = Type::make_unit(); break;
      case 1:
      case 2: t1 = Type::arrow(Type::make_int(), Type::make_int()); break;
      default: t1 = Type::make_int(); break;
    }
    TypePtr t2 = pct(75) ? Type::make_int() : Type::make_unit();
    GEnv body_env = env;
    body_env.push_back({param, t1, true});
    ExprPtr body = gen(body_env, t2, d - 1);
    GEnv cont_env = env;
    cont_env.push_back({fname, Type::arrow(t1, t2), false});
    return func(fname, param, t1, body, gen(cont_env, t, d - 1));
  }

  ExprPtr gen_arg(const GEnv& env, const TypePtr& dom, int d) {
    if (dom->is_arrow()) {
      auto g = pick_var(env, [&](const GBind& b) {
        if (b.flex) return false;
        if (type_equal(b.type, dom)) return true;
        return b.type->is_propertied() && type_equal(b.type->base, dom);
      });
      if (g) return var(g->name);
      return var("?");  // no function to pass; caller falls back
    }
    switch (rnd(4)) {
      case 0: {  // propertied variable argument
        auto v = pick_var(env, [&](const GBind& b) {
          return b.type->is_propertied() && type_equal(b.type->base, dom);
        });
        if (v) return var(v->name);
        [[fallthrough]];
      }
      case 1:  // inline propertied argument
        if (d > 1) return gen_set_chain(env, dom, d - 1);
        [[fallthrough]];
      case 2: {  // flex parameter forwarded as an argument
        auto v = pick_var(env, [&](const GBind& b) {
          if (type_equal(b.type, dom)) return true;
          return b.type->is_propertied() && type_equal(b.type->base, dom);
        });
        if (v) return var(v->name);
        [[fallthrough]];
      }
      default:
        return gen(env, dom, d - 1);
    }
  }

  ExprPtr gen_app(const GEnv& env, const TypePtr& t, int d) {
    auto f = pick_var(env, [&](const GBind& b) {
      return !b.flex && b.type->is_arrow();
    });
    if (!f || !type_equal(f->type->cod, t)) {
      if (funcs_made_ < cfg_.max_funcs && d > 1) return gen_func(env, t, d);
      return leaf(env, t);
    }
    ExprPtr arg = gen_arg(env, f->type->dom, d);
    if (arg->kind == Expr::Kind::Var && arg->name == "?") return leaf(env, t);
    return app(var(f->name), arg);
  }

  /// Two applications of the same function in one expression, exercising
  /// monomorphization reuse.
  ExprPtr gen_app_twice(const GEnv& env, int d) {
    auto f = pick_var(env, [](const GBind& b) {
      return !b.flex && b.type->is_arrow() && b.type->cod->is_int() &&
             !b.type->dom->is_arrow();
    });
    if (!f) return gen_app(env, Type::make_int(), d);
    ExprPtr a1 = gen(env, f->type->dom, d > 1 ? 1 : 0);
    ExprPtr a2 = gen(env, f->type->dom, d > 1 ? 1 : 0);
    return plus(app(var(f->name), a1), app(var(f->name), a2));
  }

  ExprPtr gen_if_has(const GEnv& env, const TypePtr& t, int d) {
    if (env.empty()) return gen_let(env, t, d);
    std::vector<GBind> scrutable;
    for (const auto& b : env)
      if (genv_lookup(env, b.name) == &b) scrutable.push_back(b);
    const GBind& x = scrutable[rnd(scrutable.size())];
    std::string p = prop_name();
    TypePtr tp;
    const Property* present =
        x.type->is_propertied() ? x.type->find_prop(p) : nullptr;
    if (present && pct(70))
      tp = present->type;  // taken then-branch
    else
      tp = prop_payload_type();
    std::string bind = fresh("b");

    // branch views of the scrutinee, mirroring the typing rule
    GEnv then_env = env, else_env = env;
    TypePtr then_ty, else_ty;
    if (!x.type->is_propertied()) {
      then_ty = Type::propertied(x.type, {Property{p, var(bind), tp}});
      else_ty = Type::propertied(x.type, {});
    } else {
      TypePtr stripped =
          x.type->find_prop(p) ? without_prop(x.type, p) : x.type;
      then_ty = with_prop(stripped, Property{p, var(bind), tp});
      else_ty = stripped;
    }
    auto rebind = [](GEnv& e, const std::string& n, TypePtr ty) {
      e.push_back({n, std::move(ty), false});
    };
    rebind(then_env, x.name, then_ty);
    then_env.push_back({bind, tp, false});
    rebind(else_env, x.name, else_ty);

    return if_has(x.name, p, tp, bind, gen(then_env, t, d - 1),
                  gen(else_env, t, d - 1));
  }

  ExprPtr gen_extract(const GEnv& env, const TypePtr& t, int d) {
    auto v = pick_var(env, [&](const GBind& b) {
      return !b.flex && b.type->is_propertied() && type_equal(b.type->base, t);
    });
    if (v) return extract(var(v->name));
    if (d > 1) return extract(gen_set_chain(env, t, d - 1));
    return leaf(env, t);
  }

  ExprPtr gen_get(const GEnv& env, const TypePtr& t, int d) {
    auto v = pick_var(env, [&](const GBind& b) {
      if (b.flex || !b.type->is_propertied()) return false;
      for (const auto& pr : b.type->props)
        if (type_equal(pr.type, t)) return true;
      return false;
    });
    if (v) {
      std::vector<std::string> names;
      for (const auto& pr : v->type->props)
        if (type_equal(pr.type, t)) names.push_back(pr.name);
      return get_prop(var(v->name), names[rnd(names.size())]);
    }
    if (d > 1) {
      std::string p = prop_name();
      ExprPtr base = gen(env, pct(75) ? Type::make_int() : Type::make_unit(),
                         d > 2 ? 1 : 0);
      return get_prop(set_prop(base, p, gen_prop_expr(env, t, d - 1)), p);
    }
    return leaf(env, t);
  }
};

}  // namespace detail

/// A closed, well-typed surface program; pure in the configuration.
/// Candidates failing the full check/transform/ready pipeline are retried
/// with derived seeds; after bounded retries a literal is returned.
inline ExprPtr gen_well_typed(const GenConfig& cfg) {
  GenConfig attempt = cfg;
  for (int tries = 0; tries < 32; ++tries) {
    detail::Gen g(attempt);
    ExprPtr e = g.program();
    try {
      check_program(e);
      TransformResult tr = transform_program(e);
      ready(tr.delta, tr.type);
      return e;
    } catch (const TypeError&) {
    } catch (const TransformError&) {
    } catch (const RunError&) {
    }
    attempt.seed = attempt.seed * 6364136223846793005ULL + 1442695040888963407ULL;
  }
  return int_lit(0);
}

// --- shrinking --------------------------------------------------------------

namespace detail {
inline void collect_subexprs(const ExprPtr& e, std::vector<ExprPtr>& out) {
  for (const ExprPtr& c : {e->a, e->b, e->c})
    if (c) {
      out.push_back(c);
      collect_subexprs(c, out);
    }
}
}  // namespace detail

/// Well-typedness-preserving shrink candidates, largest first: closed
/// subexpressions that still check, then bare literals.
inline std::vector<ExprPtr> shrink(const ExprPtr& e) {
  std::vector<ExprPtr> candidates, out;
  detail::collect_subexprs(e, candidates);
  candidates.push_back(int_lit(0));
  candidates.push_back(unit_lit());
  for (const ExprPtr& c : candidates) {
    if (!c->is_surface() || expr_equal(c, e)) continue;
    if (!free_vars(c).empty()) continue;
    try {
      check_program(c);
    } catch (const TypeError&) {
      continue;
    }
    bool dup = false;
    for (const ExprPtr& o : out)
      if (expr_equal(o, c)) dup = true;
    if (!dup) out.push_back(c);
  }
  return out;
}

// --- oracle -----------------------------------------------------------------

namespace detail {

inline std::int64_t oadd(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw RunError(RunCode::Overflow, std::to_string(a) + " + " +
                                          std::to_string(b) + " overflows");
  return out;
}
inline std::int64_t osub(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_sub_overflow(a, b, &out))
    throw RunError(RunCode::Overflow, std::to_string(a) + " - " +
                                          std::to_string(b) + " overflows");
  return out;
}

using OEnv = std::vector<std::pair<std::string, Value>>;

inline const Value* oenv_lookup(const OEnv& env, const std::string& n) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i].first == n) return &env[i].second;
  return nullptr;
}

inline Value oeval(const FuncCtx& delta, const OEnv& env, const ExprPtr& e) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::IntLit: return Value::make_int(e->int_val);
    case K::UnitLit: return Value::make_unit();
    case K::MonoRef: return Value::make_func(e->name, e->index);
    case K::Var: {
      if (const Value* v = oenv_lookup(env, e->name)) return *v;
      // a bare function name in argument position carries no value; it only
      // identifies the (dead) passed function
      if (delta.find_raw(e->name)) return Value::make_func(e->name, 0);
      throw RunError(RunCode::Stuck,
                     "oracle: unbound variable '" + e->name + "'");
    }
    case K::Plus:
    case K::Minus: {
      Value l = oeval(delta, env, e->a);
      Value r = oeval(delta, env, e->b);
      if (l.kind != Value::Kind::Int || r.kind != Value::Kind::Int)
        throw RunError(RunCode::Stuck, "oracle: arithmetic on non-integers");
      return Value::make_int(e->kind == K::Plus ? oadd(l.n, r.n)
                                                : osub(l.n, r.n));
    }
    case K::Let: {
      Value v = oeval(delta, env, e->a);
      OEnv env2 = env;
      env2.emplace_back(e->name, std::move(v));
      return oeval(delta, env2, e->b);
    }
    case K::App: {
      Value f = oeval(delta, env, e->a);
      if (f.kind != Value::Kind::Func)
        throw RunError(RunCode::Stuck, "oracle: applying a non-function");
      const MonoFunc* m = delta.find_mono(f.fname, f.findex);
      if (!m)
        throw RunError(RunCode::Stuck,
                       "oracle: unknown function " + to_string(f));
      Value a = oeval(delta, env, e->b);
      if (a.kind == Value::Kind::Func)
        return oeval(delta, env, m->body);  // dead argument, no binding
      OEnv env2 = env;
      env2.emplace_back(m->param, std::move(a));
      return oeval(delta, env2, m->body);
    }
    default:
      throw RunError(RunCode::Stuck,
                     "oracle: construct outside the runtime language: " +
                         pretty(e));
  }
}

}  // namespace detail

/// Independent big-step evaluation of a transformed program. Functions are
/// evaluated by entering the monomorphized body under the call-site
/// environment extended with the parameter; shares no code with the
/// small-step machine.
inline Value oracle_eval(const TransformResult& tr) {
  return detail::oeval(tr.delta, detail::OEnv{}, tr.expr);
}

}  // namespace testkit
}  // namespace lrp

#endif  // LRP_TESTKIT_HPP
