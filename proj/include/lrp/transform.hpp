#ifndef LRP_TRANSFORM_HPP
#define LRP_TRANSFORM_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrp/ast.hpp"
#include "lrp/typecheck.hpp"

namespace lrp {

enum class TransformCode { NoProp, UnknownFunc, SpliceScope, Internal };

inline const char* transform_code_name(TransformCode c) {
  switch (c) {
    case TransformCode::NoProp: return "T-NO-PROP";
    case TransformCode::UnknownFunc: return "T-UNKNOWN-FUNC";
    case TransformCode::SpliceScope: return "T-SPLICE-SCOPE";
    case TransformCode::Internal: return "T-INTERNAL";
  }
  return "T-INTERNAL";
}

struct TransformError : std::runtime_error {
  TransformCode code;
  TransformError(TransformCode c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}
  std::string render() const {
    return std::string("error[") + transform_code_name(code) + "]: " + what();
  }
};

/// Compile-time binding of a variable: either an ordinary (runtime) variable
/// of a known type, or a recorded replacement that stands in for the variable
/// wherever it is mentioned.
struct Binding {
  enum class Kind { Plain, Rewrite };
  Kind kind = Kind::Plain;
  ExprPtr replacement;               // Rewrite only
  TypePtr type;
  std::optional<std::size_t> raw_id; // set when the binding denotes a raw
                                     // function table entry

  static Binding plain(TypePtr t, std::optional<std::size_t> raw = {}) {
    Binding b;
    b.kind = Kind::Plain;
    b.type = std::move(t);
    b.raw_id = raw;
    return b;
  }
  static Binding rewrite(ExprPtr r, TypePtr t,
                         std::optional<std::size_t> raw = {}) {
    Binding b;
    b.kind = Kind::Rewrite;
    b.replacement = std::move(r);
    b.type = std::move(t);
    b.raw_id = raw;
    return b;
  }
};

class TransformEnv {
 public:
  TransformEnv() = default;

  const Binding* lookup(const std::string& name) const {
    for (std::size_t i = entries_.size(); i-- > 0;)
      if (entries_[i].first == name) return &entries_[i].second;
    return nullptr;
  }

  TransformEnv extended(std::string name, Binding b) const {
    TransformEnv out = *this;
    out.entries_.emplace_back(std::move(name), std::move(b));
    return out;
  }

  bool contains(const std::string& name) const { return lookup(name); }

  TypingEnv plain_projection() const {
    TypingEnv env;
    for (const auto& [name, b] : entries_) env = env.extended(name, b.type);
    return env;
  }

 private:
  std::vector<std::pair<std::string, Binding>> entries_;
};

struct TransformResult {
  FuncCtx delta;
  ExprPtr expr;
  TypePtr type;
};

namespace detail {
inline ExprPtr unwrap_propertied(const ExprPtr& e) {
  return e->kind == Expr::Kind::PropertiedVal ? e->a : e;
}
}  // namespace detail

/// Compile-time transformation: evaluates every property construct and
/// monomorphizes functions into the functional context.
class Transformer {
 public:
  FuncCtx delta;

  /// Rule-firing counters (test hook).
  std::map<std::string, int> rule_counts;

  struct Result {
    ExprPtr expr;
    TypePtr type;
    std::optional<std::size_t> raw_id;  // set when expr denotes a raw function
  };

  Result transform(const TransformEnv& env, const ExprPtr& e) {
    using K = Expr::Kind;
    switch (e->kind) {
      case K::IntLit:
        fire("R-V-Int");
        return {e, Type::make_int(), {}};
      case K::UnitLit:
        fire("R-V-Unit");
        return {e, Type::make_unit(), {}};

      case K::Var: {
        const Binding* b = env.lookup(e->name);
        if (!b) {
          // Only reachable when splicing a stored property expression whose
          // variables are not in scope at the consumption site.
          throw TransformError(TransformCode::SpliceScope,
                               "variable '" + e->name +
                                   "' is not bound at the splice site");
        }
        fire("R-S-Var");
        if (b->kind == Binding::Kind::Rewrite)
          return {b->replacement, b->type, b->raw_id};
        return {e, b->type, b->raw_id};
      }

      case K::MonoRef: {
        const MonoFunc* m = delta.find_mono(e->name, e->index);
        if (!m)
          throw TransformError(TransformCode::UnknownFunc,
                               "unknown monomorphization " + pretty(e));
        fire("R-V-Func");
        return {e, Type::arrow(m->param_type, m->result_type), {}};
      }

      case K::Func: {
        fire("R-Func");
        TypePtr t2 = infer(env.plain_projection().extended(e->prop, e->type),
                           e->a);
        std::size_t raw_id = delta.raw.size();
        delta.raw.push_back(RawFunc{e->name, e->prop, e->type, e->a, t2});
        TypePtr fty = Type::arrow(e->type, t2);
        return transform(env.extended(e->name, Binding::plain(fty, raw_id)),
                         e->b);
      }

      case K::Set: {
        Result rm = transform(env, e->a);
        Result re = transform(env, e->b);
        if (re.type->is_propertied())
          throw TransformError(TransformCode::Internal,
                               "property expression has a propertied type");
        Property p{e->prop, re.expr, re.type};
        if (!rm.type->is_propertied()) {
          fire("R-Set-1");
          return {propertied_val(rm.expr),
                  Type::propertied(rm.type, {std::move(p)}), {}};
        }
        if (rm.expr->kind != Expr::Kind::PropertiedVal)
          throw TransformError(TransformCode::Internal,
                               "propertied value expected for set target");
        if (rm.type->find_prop(e->prop)) {
          fire("R-Set-3");
          return {rm.expr, replace_prop(rm.type, p), {}};
        }
        fire("R-Set-2");
        return {rm.expr, with_prop(rm.type, std::move(p)), {}};
      }

      case K::Get: {
        Result rm = transform(env, e->a);
        if (!rm.type->is_propertied())
          throw TransformError(TransformCode::NoProp,
                               "get target is not propertied");
        const Property* p = rm.type->find_prop(e->prop);
        if (!p)
          throw TransformError(
              TransformCode::NoProp,
              "no property '" + e->prop + "' on " + pretty(rm.type));
        fire("R-Get");
        return splice(env, p->expr);
      }

      case K::Extract: {
        Result rm = transform(env, e->a);
        if (!rm.type->is_propertied())
          throw TransformError(TransformCode::Internal,
                               "extract target is not propertied");
        if (rm.expr->kind != Expr::Kind::PropertiedVal)
          throw TransformError(TransformCode::Internal,
                               "propertied value expected for extract target");
        fire("R-Ext");
        Result out{rm.expr->a, rm.type->base, {}};
        out.raw_id = resolve_func_id(env, out.expr);
        return out;
      }

      case K::Erase: {
        Result rm = transform(env, e->a);
        if (!rm.type->is_propertied() || !rm.type->find_prop(e->prop))
          throw TransformError(
              TransformCode::NoProp,
              "no property '" + e->prop + "' to erase on " + pretty(rm.type));
        fire("R-Erase");
        return {rm.expr, without_prop(rm.type, e->prop), {}};
      }

      case K::Plus:
      case K::Minus: {
        Result r1 = transform(env, e->a);
        Result r2 = transform(env, e->b);
        bool p1 = r1.expr->kind == Expr::Kind::PropertiedVal;
        bool p2 = r2.expr->kind == Expr::Kind::PropertiedVal;
        const char* base = e->kind == K::Plus ? "R-P-Plus" : "R-P-Minus";
        fire(p1 && p2 ? std::string(base) + "-1"
             : p1     ? std::string(base) + "-2"
             : p2     ? std::string(base) + "-3"
                      : std::string(base));
        ExprPtr l = detail::unwrap_propertied(r1.expr);
        ExprPtr r = detail::unwrap_propertied(r2.expr);
        ExprPtr out = e->kind == K::Plus ? plus(l, r, e->line, e->col)
                                         : minus(l, r, e->line, e->col);
        return {out, Type::make_int(), {}};
      }

      case K::Let:
        return transform_let(env, e);
      case K::IfHas:
        return transform_if_has(env, e);
      case K::App:
        return transform_app(env, e);

      case K::PropertiedVal:
      case K::DropAfter:
      case K::RetrieveAfter:
        break;
    }
    throw TransformError(TransformCode::Internal,
                         "untransformable construct: " + pretty(e));
  }

 private:
  void fire(const std::string& rule) { ++rule_counts[rule]; }

  /// A previously transformed property expression is re-transformed at its
  /// consumption site (this resolves applications of already-monomorphized
  /// functions and validates that every free variable is in scope here).
  Result splice(const TransformEnv& env, const ExprPtr& stored) {
    for (const auto& v : free_vars(stored))
      if (!env.contains(v))
        throw TransformError(TransformCode::SpliceScope,
                             "spliced property expression mentions '" + v +
                                 "', unbound at the splice site");
    return transform(env, stored);
  }

  /// Resolves an expression denoting a function to its raw table entry.
  std::optional<std::size_t> resolve_func_id(const TransformEnv& env,
                                             const ExprPtr& e) {
    if (e->kind != Expr::Kind::Var) return std::nullopt;
    if (const Binding* b = env.lookup(e->name)) return b->raw_id;
    return delta.find_raw(e->name);
  }

  Result transform_let(const TransformEnv& env, const ExprPtr& e) {
    Result rn = transform(env, e->a);
    if (rn.type->is_propertied()) {
      if (rn.expr->kind != Expr::Kind::PropertiedVal)
        throw TransformError(TransformCode::Internal,
                             "propertied value expected in let binding");
      if (rn.type->base->is_arrow()) {
        fire("R-Let-Prop-2");
        auto inner_raw = resolve_func_id(env, rn.expr->a);
        auto env2 = env.extended(
            e->name, Binding::rewrite(rn.expr, rn.type, inner_raw));
        return transform(env2, e->b);
      }
      fire("R-Let-Prop-1");
      auto env2 = env.extended(
          e->name,
          Binding::rewrite(propertied_val(var(e->name)), rn.type));
      Result rm = transform(env2, e->b);
      return {let(e->name, rn.expr->a, rm.expr, e->line, e->col), rm.type, {}};
    }
    if (rn.type->is_arrow()) {
      fire("R-Let-Func");
      auto env2 = env.extended(
          e->name, Binding::rewrite(rn.expr, rn.type, rn.raw_id));
      return transform(env2, e->b);
    }
    fire("R-P-Let");
    Result rm =
        transform(env.extended(e->name, Binding::plain(rn.type)), e->b);
    return {let(e->name, rn.expr, rm.expr, e->line, e->col), rm.type, {}};
  }

  Result transform_if_has(const TransformEnv& env, const ExprPtr& e) {
    const Binding* b = env.lookup(e->name);
    if (!b)
      throw TransformError(TransformCode::Internal,
                           "if-has scrutinee '" + e->name + "' unbound");
    ExprPtr scrut_expr = b->kind == Binding::Kind::Rewrite
                             ? b->replacement
                             : var(e->name);
    const TypePtr& t = b->type;

    if (!t->is_propertied()) {
      // the scrutinee enters the else branch carrying an empty property set
      fire("R-If-Has-1");
      auto env2 = env.extended(
          e->name, Binding::rewrite(propertied_val(scrut_expr),
                                    Type::propertied(t, {})));
      return transform(env2, e->b);
    }
    const Property* p = t->find_prop(e->prop);
    if (!p) {
      fire("R-If-Has-2");
      return transform(env, e->b);
    }
    if (!type_equal(p->type, e->type)) {
      fire("R-If-Has-3");
      return transform(env, e->b);
    }

    Result spliced = splice(env, p->expr);
    bool direct = spliced.type->is_arrow();
    if (!direct) {
      // Predict the branch result to pick between the binding forms: a
      // function- or propertied-typed branch consumes the property value at
      // compile time; anything else receives it through a runtime let.
      // The prediction environment mirrors the branch typing rule: the
      // scrutinee is rebound with the property witnessed by the bound name.
      TypePtr stripped = without_prop(t, e->prop);
      TypePtr then_scrut =
          with_prop(stripped, Property{e->prop, var(e->bind), e->type});
      TypePtr predicted = infer(env.plain_projection()
                                    .extended(e->bind, e->type)
                                    .extended(e->name, then_scrut),
                                e->a);
      direct = predicted->is_arrow() || predicted->is_propertied();
    }
    if (direct) {
      fire("R-If-Has-5");
      auto env2 = env.extended(
          e->bind,
          Binding::rewrite(spliced.expr, spliced.type, spliced.raw_id));
      return transform(env2, e->a);
    }
    fire("R-If-Has-4");
    auto env2 = env.extended(e->bind, Binding::plain(spliced.type));
    Result rm = transform(env2, e->a);
    return {let(e->bind, spliced.expr, rm.expr, e->line, e->col), rm.type, {}};
  }

  Result transform_app(const TransformEnv& env, const ExprPtr& e) {
    Result rf = transform(env, e->a);

    if (rf.expr->kind == Expr::Kind::MonoRef) {
      fire("R-App-Compiled");
      const MonoFunc* m = delta.find_mono(rf.expr->name, rf.expr->index);
      if (!m)
        throw TransformError(TransformCode::UnknownFunc,
                             "unknown monomorphization " + pretty(rf.expr));
      Result ra = transform(env, e->b);
      return {app(rf.expr, detail::unwrap_propertied(ra.expr), e->line, e->col),
              m->result_type, {}};
    }

    auto raw_id = rf.raw_id ? rf.raw_id : resolve_func_id(env, rf.expr);
    if (!raw_id)
      throw TransformError(
          TransformCode::UnknownFunc,
          "applied expression does not name a function: " + pretty(rf.expr));
    const RawFunc raw = delta.raw[*raw_id];

    Result ra = transform(env, e->b);

    enum class ArgShape { Plain, Prop, Fn, PropFn } shape;
    ExprPtr underlying;
    if (ra.type->is_propertied()) {
      if (ra.expr->kind != Expr::Kind::PropertiedVal)
        throw TransformError(TransformCode::Internal,
                             "propertied value expected in argument position");
      underlying = ra.expr->a;
      shape = ra.type->base->is_arrow() ? ArgShape::PropFn : ArgShape::Prop;
    } else if (ra.type->is_arrow()) {
      underlying = ra.expr;
      shape = ArgShape::Fn;
    } else {
      shape = ArgShape::Plain;
    }

    // Monomorphization key: what the specialized body is a function of —
    // the callee entry plus the argument's compile-time shape.
    std::string key = std::to_string(*raw_id) + '#';
    switch (shape) {
      case ArgShape::Plain:
        key += "v:" + serialize(ra.type);
        break;
      case ArgShape::Prop:
        key += "pt:" + serialize(ra.type);
        break;
      case ArgShape::Fn:
        key += "fn:" + serialize(underlying);
        break;
      case ArgShape::PropFn:
        key += "pf:" + serialize(underlying) + '|' + serialize(ra.type);
        break;
    }

    ExprPtr emitted_arg =
        shape == ArgShape::Plain ? ra.expr : underlying;

    for (const auto& [k, mi] : delta.cache)
      if (k == key) {
        const MonoFunc& m = delta.monos[mi];
        fire(shape == ArgShape::Plain ? "R-App-Ready"
             : shape == ArgShape::Prop ? "R-App-Ready-Prop-1"
             : shape == ArgShape::Fn   ? "R-App-Ready-Func"
                                       : "R-App-Ready-Prop-2");
        return {app(mono_ref(m.name, m.index), emitted_arg, e->line, e->col),
                m.result_type, {}};
      }

    std::int64_t k = fresh_index(delta, raw.name);
    // reserve the index before the body is transformed, so nested
    // monomorphizations of a same-named function cannot collide with it
    std::size_t mono_pos = delta.monos.size();
    delta.monos.push_back(
        MonoFunc{raw.name, k, raw.param, raw.param_type, nullptr,
                 raw.result_type});

    TransformEnv body_env;
    switch (shape) {
      case ArgShape::Plain:
        fire("R-App-Compile");
        body_env = env.extended(raw.param, Binding::plain(raw.param_type));
        break;
      case ArgShape::Prop:
        fire("R-App-Compile-Prop-1");
        body_env = env.extended(
            raw.param,
            Binding::rewrite(propertied_val(var(raw.param)), ra.type));
        break;
      case ArgShape::Fn:
        fire("R-App-Compile-Func");
        body_env = env.extended(
            raw.param,
            Binding::rewrite(underlying, ra.type,
                             resolve_func_id(env, underlying)));
        break;
      case ArgShape::PropFn:
        fire("R-App-Compile-Prop-2");
        body_env = env.extended(
            raw.param,
            Binding::rewrite(propertied_val(underlying), ra.type,
                             resolve_func_id(env, underlying)));
        break;
    }
    Result rb = transform(body_env, raw.body);
    {
      MonoFunc& m = delta.monos[mono_pos];
      m.body = rb.expr;
    }
    delta.cache.emplace_back(key, mono_pos);
    return {app(mono_ref(raw.name, k), emitted_arg, e->line, e->col),
            raw.result_type, {}};
  }
};

/// Transforms a whole (type-checked) program under empty contexts.
inline TransformResult transform_program(const ExprPtr& e) {
  Transformer t;
  auto r = t.transform(TransformEnv{}, e);
  return TransformResult{std::move(t.delta), r.expr, r.type};
}

/// Lookup used by the application rules: has an equal key been registered?
inline std::optional<std::pair<std::string, std::int64_t>> mono_lookup(
    const FuncCtx& delta, const std::string& key) {
  for (const auto& [k, mi] : delta.cache)
    if (k == key) return std::make_pair(delta.monos[mi].name,
                                        delta.monos[mi].index);
  return std::nullopt;
}

}  // namespace lrp

#endif  // LRP_TRANSFORM_HPP
