#ifndef LRP_TYPECHECK_HPP
#define LRP_TYPECHECK_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrp/ast.hpp"

namespace lrp {

enum class TypeCode {
  UndefVar,       // E-UNDEF-VAR
  Mismatch,       // E-MISMATCH
  NotFunc,        // E-NOT-FUNC
  NotPropertied,  // E-NOT-PROPERTIED
  NoProp,         // E-NO-PROP
  DupProp,        // E-DUP-PROP
  RetPropertied,  // E-RET-PROPERTIED
  RetFunc,        // E-RET-FUNC
  IfHasScrutinee, // E-IFHAS-SCRUTINEE
};

inline const char* type_code_name(TypeCode c) {
  switch (c) {
    case TypeCode::UndefVar: return "E-UNDEF-VAR";
    case TypeCode::Mismatch: return "E-MISMATCH";
    case TypeCode::NotFunc: return "E-NOT-FUNC";
    case TypeCode::NotPropertied: return "E-NOT-PROPERTIED";
    case TypeCode::NoProp: return "E-NO-PROP";
    case TypeCode::DupProp: return "E-DUP-PROP";
    case TypeCode::RetPropertied: return "E-RET-PROPERTIED";
    case TypeCode::RetFunc: return "E-RET-FUNC";
    case TypeCode::IfHasScrutinee: return "E-IFHAS-SCRUTINEE";
  }
  return "E-INTERNAL";
}

struct TypeError : std::runtime_error {
  TypeCode code;
  int line, col;
  TypeError(TypeCode c, const std::string& msg, int line_, int col_)
      : std::runtime_error(msg), code(c), line(line_), col(col_) {}

  /// `error[CODE]: message at line:col`
  std::string render() const {
    return std::string("error[") + type_code_name(code) + "]: " + what() +
           " at " + std::to_string(line) + ":" + std::to_string(col);
  }
};

/// Ordered variable-to-type environment with shadowing insert.
/// Lookup returns the most recent binding; extension copies, so scoped
/// checks never disturb outer environments.
class TypingEnv {
 public:
  TypingEnv() = default;

  std::optional<TypePtr> lookup(const std::string& name) const {
    for (std::size_t i = entries_.size(); i-- > 0;)
      if (entries_[i].first == name) return entries_[i].second;
    return std::nullopt;
  }

  TypingEnv extended(std::string name, TypePtr type) const {
    TypingEnv out = *this;
    out.entries_.emplace_back(std::move(name), std::move(type));
    return out;
  }

  const std::vector<std::pair<std::string, TypePtr>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, TypePtr>> entries_;
};

/// Typing mode. Runtime mode additionally types the internal constructs
/// produced by the transformer and evaluated by the runtime; monomorphized
/// references are typed from the supplied function context.
enum class TypingMode { Surface, Runtime };

TypePtr infer(const TypingEnv& env, const ExprPtr& e,
              TypingMode mode = TypingMode::Surface,
              const FuncCtx* delta = nullptr);

/// Well-formedness of a type: for a propertied type, names must be distinct
/// and each property expression must type at its declared property type.
inline void wf_type(const TypingEnv& env, const TypePtr& t,
                    TypingMode mode = TypingMode::Surface,
                    const FuncCtx* delta = nullptr) {
  switch (t->kind) {
    case Type::Kind::Int:
    case Type::Kind::Unit:
      return;
    case Type::Kind::Arrow:
      wf_type(env, t->dom, mode, delta);
      wf_type(env, t->cod, mode, delta);
      return;
    case Type::Kind::Propertied: {
      wf_type(env, t->base, mode, delta);
      for (std::size_t i = 0; i < t->props.size(); ++i) {
        for (std::size_t j = i + 1; j < t->props.size(); ++j)
          if (t->props[i].name == t->props[j].name)
            throw TypeError(TypeCode::DupProp,
                            "duplicate property '" + t->props[i].name + "'", 0,
                            0);
        const auto& p = t->props[i];
        wf_type(env, p.type, mode, delta);
        TypePtr got = infer(env, p.expr, mode, delta);
        if (!type_equal(got, p.type))
          throw TypeError(TypeCode::Mismatch,
                          "property '" + p.name + "' expression has type " +
                              pretty(got) + ", declared " + pretty(p.type),
                          p.expr->line, p.expr->col);
      }
      return;
    }
  }
}

namespace detail {

inline bool int_like(const TypePtr& t) {
  if (t->is_int()) return true;
  return t->is_propertied() && t->base->is_int();
}

inline TypePtr check_arith_side(const TypingEnv& env, const ExprPtr& e,
                                TypingMode mode, const FuncCtx* delta) {
  TypePtr t = infer(env, e, mode, delta);
  if (!int_like(t))
    throw TypeError(TypeCode::Mismatch,
                    "arithmetic operand has type " + pretty(t), e->line,
                    e->col);
  return t;
}

}  // namespace detail

inline TypePtr infer(const TypingEnv& env, const ExprPtr& e, TypingMode mode,
                     const FuncCtx* delta) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::IntLit:
      return Type::make_int();
    case K::UnitLit:
      return Type::make_unit();

    case K::Var: {
      if (auto t = env.lookup(e->name)) return *t;
      if (mode == TypingMode::Runtime && delta) {
        // a free function name refers to its table entry
        if (auto i = delta->find_raw(e->name)) {
          const auto& r = delta->raw[*i];
          return Type::arrow(r.param_type, r.result_type);
        }
      }
      throw TypeError(TypeCode::UndefVar, "unbound variable '" + e->name + "'",
                      e->line, e->col);
    }

    case K::Func: {
      const TypePtr& t1 = e->type;
      wf_type(env, t1, mode, delta);
      // body must agree under both views of the parameter
      TypePtr t2_plain =
          infer(env.extended(e->prop, t1), e->a, mode, delta);
      TypePtr t2_prop = infer(
          env.extended(e->prop, Type::propertied(t1, {})), e->a, mode, delta);
      if (!type_equal(t2_plain, t2_prop))
        throw TypeError(
            TypeCode::Mismatch,
            "function body types differently depending on whether the "
            "parameter carries properties: " +
                pretty(t2_plain) + " vs " + pretty(t2_prop),
            e->a->line, e->a->col);
      if (t2_plain->is_propertied())
        throw TypeError(TypeCode::RetPropertied,
                        "function result type is propertied", e->line, e->col);
      if (t2_plain->is_arrow())
        throw TypeError(TypeCode::RetFunc,
                        "function result type is a function type", e->line,
                        e->col);
      return infer(env.extended(e->name, Type::arrow(t1, t2_plain)), e->b,
                   mode, delta);
    }

    case K::App: {
      TypePtr tf = infer(env, e->a, mode, delta);
      if (!tf->is_arrow())
        throw TypeError(TypeCode::NotFunc,
                        "applied expression has type " + pretty(tf), e->line,
                        e->col);
      TypePtr ta = infer(env, e->b, mode, delta);
      if (type_equal(ta, tf->dom)) return tf->cod;
      if (ta->is_propertied() && type_equal(ta->base, tf->dom))
        return tf->cod;  // polymorphism over properties
      throw TypeError(TypeCode::Mismatch,
                      "argument has type " + pretty(ta) + ", expected " +
                          pretty(tf->dom),
                      e->b->line, e->b->col);
    }

    case K::Let: {
      TypePtr t1 = infer(env, e->a, mode, delta);
      TypePtr t2 = infer(env.extended(e->name, t1), e->b, mode, delta);
      if (t2->is_propertied())
        throw TypeError(TypeCode::RetPropertied, "let body type is propertied",
                        e->line, e->col);
      if (t2->is_arrow())
        throw TypeError(TypeCode::RetFunc, "let body type is a function type",
                        e->line, e->col);
      return t2;
    }

    case K::Plus:
    case K::Minus:
      detail::check_arith_side(env, e->a, mode, delta);
      detail::check_arith_side(env, e->b, mode, delta);
      return Type::make_int();

    case K::Set: {
      TypePtr tm = infer(env, e->a, mode, delta);
      TypePtr tp = infer(env, e->b, mode, delta);
      if (tp->is_propertied())
        throw TypeError(TypeCode::Mismatch,
                        "property expression has a propertied type", e->b->line,
                        e->b->col);
      Property p{e->prop, e->b, tp};
      if (!tm->is_propertied())
        return Type::propertied(tm, {std::move(p)});
      if (tm->find_prop(e->prop)) return replace_prop(tm, p);
      return with_prop(tm, std::move(p));
    }

    case K::Get: {
      TypePtr tm = infer(env, e->a, mode, delta);
      if (!tm->is_propertied())
        throw TypeError(TypeCode::NotPropertied,
                        "get target has type " + pretty(tm), e->line, e->col);
      const Property* p = tm->find_prop(e->prop);
      if (!p)
        throw TypeError(TypeCode::NoProp,
                        "no property '" + e->prop + "' on " + pretty(tm),
                        e->line, e->col);
      return p->type;
    }

    case K::Erase: {
      TypePtr tm = infer(env, e->a, mode, delta);
      if (!tm->is_propertied())
        throw TypeError(TypeCode::NotPropertied,
                        "erase target has type " + pretty(tm), e->line, e->col);
      if (!tm->find_prop(e->prop))
        throw TypeError(TypeCode::NoProp,
                        "no property '" + e->prop + "' on " + pretty(tm),
                        e->line, e->col);
      return without_prop(tm, e->prop);
    }

    case K::Extract: {
      TypePtr tm = infer(env, e->a, mode, delta);
      if (!tm->is_propertied())
        throw TypeError(TypeCode::NotPropertied,
                        "extract target has type " + pretty(tm), e->line,
                        e->col);
      return tm->base;
    }

    case K::IfHas: {
      auto scrut_ty = env.lookup(e->name);
      if (!scrut_ty)
        throw TypeError(TypeCode::IfHasScrutinee,
                        "if-has scrutinee '" + e->name + "' is unbound",
                        e->line, e->col);
      if (env.lookup(e->bind))
        throw TypeError(TypeCode::Mismatch,
                        "bind-as identifier '" + e->bind +
                            "' shadows an existing binding",
                        e->line, e->col);
      wf_type(env, e->type, mode, delta);
      const TypePtr& tx = e->type;
      TypePtr t = *scrut_ty;
      TypePtr then_scrut, else_scrut;
      if (!t->is_propertied()) {
        else_scrut = Type::propertied(t, {});
        then_scrut =
            Type::propertied(t, {Property{e->prop, var(e->bind), tx}});
      } else {
        TypePtr stripped =
            t->find_prop(e->prop) ? without_prop(t, e->prop) : t;
        else_scrut = stripped;
        then_scrut = with_prop(stripped, Property{e->prop, var(e->bind), tx});
      }
      TypePtr t_then = infer(
          env.extended(e->bind, tx).extended(e->name, then_scrut), e->a, mode,
          delta);
      TypePtr t_else =
          infer(env.extended(e->name, else_scrut), e->b, mode, delta);
      if (!type_equal(t_then, t_else))
        throw TypeError(TypeCode::Mismatch,
                        "if-has branches disagree: " + pretty(t_then) +
                            " vs " + pretty(t_else),
                        e->line, e->col);
      return t_then;
    }

    case K::MonoRef: {
      if (mode != TypingMode::Runtime || !delta) break;
      const MonoFunc* m = delta->find_mono(e->name, e->index);
      if (!m)
        throw TypeError(TypeCode::UndefVar,
                        "unknown monomorphization " + e->name + "[" +
                            std::to_string(e->index) + "]",
                        e->line, e->col);
      return Type::arrow(m->param_type, m->result_type);
    }

    case K::DropAfter:
      if (mode != TypingMode::Runtime) break;
      return infer(env, e->a, mode, delta);

    case K::RetrieveAfter: {
      if (mode != TypingMode::Runtime) break;
      infer(env, e->b, mode, delta);  // saved value must itself be typable
      return infer(env, e->a, mode, delta);
    }

    case K::PropertiedVal:
      break;  // never typable: compile-time only
  }
  throw TypeError(TypeCode::Mismatch,
                  "internal construct in source position", e->line, e->col);
}

/// Whole-program check under the empty environment.
inline TypePtr check_program(const ExprPtr& e) {
  return infer(TypingEnv{}, e);
}

}  // namespace lrp

#endif  // LRP_TYPECHECK_HPP
