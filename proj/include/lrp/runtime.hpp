#ifndef LRP_RUNTIME_HPP
#define LRP_RUNTIME_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lrp/ast.hpp"

namespace lrp {

enum class RunCode { Stuck, Overflow, MaxSteps, Unready };

inline const char* run_code_name(RunCode c) {
  switch (c) {
    case RunCode::Stuck: return "R-STUCK";
    case RunCode::Overflow: return "R-OVERFLOW";
    case RunCode::MaxSteps: return "R-MAX-STEPS";
    case RunCode::Unready: return "R-UNREADY";
  }
  return "R-STUCK";
}

struct RunError : std::runtime_error {
  RunCode code;
  RunError(RunCode c, const std::string& msg)
      : std::runtime_error(msg), code(c) {}
  std::string render() const {
    return std::string("error[") + run_code_name(code) + "]: " + what();
  }
};

/// Runtime value: integer, unit, or a reference into the function context.
struct Value {
  enum class Kind { Int, Unit, Func };
  Kind kind;
  std::int64_t n = 0;        // Int
  std::string fname;         // Func
  std::int64_t findex = 0;   // Func

  static Value make_int(std::int64_t v) { return {Kind::Int, v, "", 0}; }
  static Value make_unit() { return {Kind::Unit, 0, "", 0}; }
  static Value make_func(std::string f, std::int64_t k) {
    return {Kind::Func, 0, std::move(f), k};
  }

  bool operator==(const Value& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::Int: return n == o.n;
      case Kind::Unit: return true;
      case Kind::Func: return fname == o.fname && findex == o.findex;
    }
    return false;
  }
};

inline std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return std::to_string(v.n);
    case Value::Kind::Unit: return "()";
    case Value::Kind::Func:
      return v.fname + "[" + std::to_string(v.findex) + "]";
  }
  return "";
}

inline ExprPtr value_to_expr(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Int: return int_lit(v.n);
    case Value::Kind::Unit: return unit_lit();
    case Value::Kind::Func: return mono_ref(v.fname, v.findex);
  }
  throw RunError(RunCode::Stuck, "corrupt value");
}

/// Ordered variable store; the most recent binding of a name wins.
class Store {
 public:
  const Value* lookup(const std::string& name) const {
    for (std::size_t i = entries_.size(); i-- > 0;)
      if (entries_[i].first == name) return &entries_[i].second;
    return nullptr;
  }

  void bind(std::string name, Value v) {
    entries_.emplace_back(std::move(name), std::move(v));
  }

  /// Removes the most recent binding of `name`.
  void drop(const std::string& name) {
    for (std::size_t i = entries_.size(); i-- > 0;)
      if (entries_[i].first == name) {
        entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(i));
        return;
      }
    throw RunError(RunCode::Stuck, "drop of unbound variable '" + name + "'");
  }

  /// Overwrites the most recent binding of `name` in place.
  void rebind(const std::string& name, Value v) {
    for (std::size_t i = entries_.size(); i-- > 0;)
      if (entries_[i].first == name) {
        entries_[i].second = std::move(v);
        return;
      }
    throw RunError(RunCode::Stuck,
                   "retrieve of unbound variable '" + name + "'");
  }

  bool empty() const { return entries_.empty(); }

  const std::vector<std::pair<std::string, Value>>& entries() const {
    return entries_;
  }

  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (i) out += ", ";
      out += entries_[i].first + " ↪ " + to_string(entries_[i].second);
    }
    return out;
  }

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

/// Type-erased function context: name and index identify a parameter/body pair.
struct RuntimeCtx {
  std::map<std::pair<std::string, std::int64_t>, std::pair<std::string, ExprPtr>>
      monos;

  const std::pair<std::string, ExprPtr>* find(const std::string& f,
                                              std::int64_t n) const {
    auto it = monos.find({f, n});
    return it == monos.end() ? nullptr : &it->second;
  }
};

/// Admits a transformed program to execution: the result type must not be
/// propertied, and the function context is taken from the monomorphizations
/// with type information erased.
inline RuntimeCtx ready(const FuncCtx& delta, const TypePtr& program_type) {
  if (program_type->is_propertied())
    throw RunError(RunCode::Unready,
                   "program result type is propertied: " +
                       pretty(program_type));
  RuntimeCtx phi;
  for (const auto& m : delta.monos)
    phi.monos[{m.name, m.index}] = {m.param, m.body};
  return phi;
}

inline bool is_value(const ExprPtr& e) {
  return e->kind == Expr::Kind::IntLit || e->kind == Expr::Kind::UnitLit ||
         e->kind == Expr::Kind::MonoRef;
}

inline Value expr_to_value(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::IntLit: return Value::make_int(e->int_val);
    case Expr::Kind::UnitLit: return Value::make_unit();
    case Expr::Kind::MonoRef: return Value::make_func(e->name, e->index);
    default:
      throw RunError(RunCode::Stuck, "not a value: " + pretty(e));
  }
}

struct StepResult {
  ExprPtr expr;
  std::string rule;  // name of the axiom that fired innermost
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw RunError(RunCode::Overflow, std::to_string(a) + " + " +
                                          std::to_string(b) + " overflows");
  return out;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_sub_overflow(a, b, &out))
    throw RunError(RunCode::Overflow, std::to_string(a) + " - " +
                                          std::to_string(b) + " overflows");
  return out;
}

}  // namespace detail

/// One transition of the small-step semantics. Deterministic: congruence
/// positions are tried left to right, so there is always a unique redex.
inline StepResult step(const RuntimeCtx& phi, Store& sigma, const ExprPtr& e) {
  using K = Expr::Kind;
  switch (e->kind) {
    case K::Var: {
      const Value* v = sigma.lookup(e->name);
      if (!v)
        throw RunError(RunCode::Stuck,
                       "unbound variable '" + e->name + "' at runtime");
      return {value_to_expr(*v), "Var"};
    }

    case K::App: {
      if (!is_value(e->a)) {
        StepResult r = step(phi, sigma, e->a);
        return {app(r.expr, e->b, e->line, e->col), std::move(r.rule)};
      }
      if (e->a->kind != K::MonoRef)
        throw RunError(RunCode::Stuck,
                       "application of a non-function: " + pretty(e->a));
      const auto* fn = phi.find(e->a->name, e->a->index);
      if (!fn)
        throw RunError(RunCode::Stuck,
                       "function " + pretty(e->a) + " is not in the context");
      // a function-name argument is dead: the body never mentions it
      bool fn_arg = e->b->kind == K::MonoRef ||
                    (e->b->kind == K::Var && !sigma.lookup(e->b->name));
      if (fn_arg) return {fn->second, "App-With-Func"};
      if (!is_value(e->b)) {
        StepResult r = step(phi, sigma, e->b);
        return {app(e->a, r.expr, e->line, e->col), std::move(r.rule)};
      }
      Value v = expr_to_value(e->b);
      const std::string& param = fn->first;
      if (const Value* prev = sigma.lookup(param)) {
        Value saved = *prev;
        sigma.rebind(param, std::move(v));
        return {retrieve_after(param, value_to_expr(saved), fn->second),
                "App-2"};
      }
      sigma.bind(param, std::move(v));
      return {drop_after(param, fn->second), "App-1"};
    }

    case K::Plus:
    case K::Minus: {
      bool is_plus = e->kind == K::Plus;
      if (!is_value(e->a)) {
        StepResult r = step(phi, sigma, e->a);
        ExprPtr out = is_plus ? plus(r.expr, e->b, e->line, e->col)
                              : minus(r.expr, e->b, e->line, e->col);
        return {out, std::move(r.rule)};
      }
      if (!is_value(e->b)) {
        StepResult r = step(phi, sigma, e->b);
        ExprPtr out = is_plus ? plus(e->a, r.expr, e->line, e->col)
                              : minus(e->a, r.expr, e->line, e->col);
        return {out, std::move(r.rule)};
      }
      if (e->a->kind != K::IntLit || e->b->kind != K::IntLit)
        throw RunError(RunCode::Stuck,
                       "arithmetic on non-integers: " + pretty(e));
      std::int64_t n = is_plus
                           ? detail::checked_add(e->a->int_val, e->b->int_val)
                           : detail::checked_sub(e->a->int_val, e->b->int_val);
      return {int_lit(n), is_plus ? "Plus" : "Minus"};
    }

    case K::Let: {
      if (!is_value(e->a)) {
        StepResult r = step(phi, sigma, e->a);
        return {let(e->name, r.expr, e->b, e->line, e->col),
                std::move(r.rule)};
      }
      Value v = expr_to_value(e->a);
      if (const Value* prev = sigma.lookup(e->name)) {
        Value saved = *prev;
        sigma.rebind(e->name, std::move(v));
        return {retrieve_after(e->name, value_to_expr(saved), e->b), "Let-2"};
      }
      sigma.bind(e->name, std::move(v));
      return {drop_after(e->name, e->b), "Let-1"};
    }

    case K::DropAfter: {
      if (!is_value(e->a)) {
        StepResult r = step(phi, sigma, e->a);
        return {drop_after(e->name, r.expr), std::move(r.rule)};
      }
      sigma.drop(e->name);
      return {e->a, "Drop-After-2"};
    }

    case K::RetrieveAfter: {
      if (!is_value(e->a)) {
        StepResult r = step(phi, sigma, e->a);
        return {retrieve_after(e->name, e->b, r.expr), std::move(r.rule)};
      }
      sigma.rebind(e->name, expr_to_value(e->b));
      return {e->a, "Retrieve-After-2"};
    }

    case K::IntLit:
    case K::UnitLit:
    case K::MonoRef:
      throw RunError(RunCode::Stuck, "step applied to a value: " + pretty(e));

    default:
      throw RunError(RunCode::Stuck,
                     "compile-time construct reached the runtime: " +
                         pretty(e));
  }
}

inline constexpr std::size_t kDefaultMaxSteps = 1'000'000;

struct RunOptions {
  std::size_t max_steps = kDefaultMaxSteps;
  /// Called before each step with the current configuration and after it
  /// with the rule that fired; used for --trace.
  std::function<void(const Store&, const ExprPtr&, const std::string& rule,
                     const Store&, const ExprPtr&)>
      on_step;
};

/// Runs a ready program to a value. The store is threaded through every step
/// and must drain completely by the end.
inline Value run(const RuntimeCtx& phi, ExprPtr e, const RunOptions& opts = {}) {
  Store sigma;
  std::size_t steps = 0;
  while (!is_value(e)) {
    if (steps++ >= opts.max_steps)
      throw RunError(RunCode::MaxSteps,
                     "no value after " + std::to_string(opts.max_steps) +
                         " steps");
    Store before = sigma;
    StepResult r = step(phi, sigma, e);
    if (opts.on_step) opts.on_step(before, e, r.rule, sigma, r.expr);
    e = std::move(r.expr);
  }
  if (!sigma.empty())
    throw RunError(RunCode::Stuck,
                   "store is not empty at the end: " + sigma.render());
  if (e->kind == Expr::Kind::MonoRef && !phi.find(e->name, e->index))
    throw RunError(RunCode::Stuck,
                   "result " + pretty(e) + " is not in the context");
  return expr_to_value(e);
}

}  // namespace lrp

#endif  // LRP_RUNTIME_HPP
