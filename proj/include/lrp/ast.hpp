#ifndef LRP_AST_HPP
#define LRP_AST_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lrp {

struct Type;
struct Expr;
using TypePtr = std::shared_ptr<const Type>;
using ExprPtr = std::shared_ptr<const Expr>;

/// One named attribute `name ↪ expr[type]` carried by a propertied type.
/// The expression is stored in transformed form once the transformer has
/// produced it; the attribute type is never itself propertied.
struct Property {
  std::string name;
  ExprPtr expr;
  TypePtr type;
};

struct Type {
  enum class Kind { Int, Unit, Arrow, Propertied };

  Kind kind;
  TypePtr dom, cod;              // Arrow
  TypePtr base;                  // Propertied: never itself Propertied
  std::vector<Property> props;   // Propertied: ordered, names distinct

  static TypePtr make_int();
  static TypePtr make_unit();
  static TypePtr arrow(TypePtr d, TypePtr c);
  static TypePtr propertied(TypePtr base, std::vector<Property> props);

  bool is_int() const { return kind == Kind::Int; }
  bool is_unit() const { return kind == Kind::Unit; }
  bool is_arrow() const { return kind == Kind::Arrow; }
  bool is_propertied() const { return kind == Kind::Propertied; }

  const Property* find_prop(const std::string& name) const {
    if (kind != Kind::Propertied) return nullptr;
    for (const auto& p : props)
      if (p.name == name) return &p;
    return nullptr;
  }
};

struct Expr {
  enum class Kind {
    // surface
    IntLit, UnitLit, Var, Func, Let, IfHas, Set, Get, Erase, Extract,
    App, Plus, Minus,
    // internal (never produced by the parser)
    PropertiedVal, MonoRef, DropAfter, RetrieveAfter,
  };

  Kind kind;
  std::int64_t int_val = 0;   // IntLit
  std::int64_t index = 0;     // MonoRef
  std::string name;           // Var / Func fname / Let name / IfHas scrutinee /
                              // MonoRef fname / DropAfter / RetrieveAfter name
  std::string prop;           // Set/Get/Erase property name, IfHas property name,
                              // Func param name
  std::string bind;           // IfHas bind-as name
  TypePtr type;               // Func param type, IfHas property type
  ExprPtr a, b, c;            // children; see factories for roles
  int line = 0, col = 0;

  bool is_surface() const {
    return kind != Kind::PropertiedVal && kind != Kind::MonoRef &&
           kind != Kind::DropAfter && kind != Kind::RetrieveAfter;
  }
};

namespace detail {
inline ExprPtr mk(Expr e) { return std::make_shared<const Expr>(std::move(e)); }
}  // namespace detail

inline ExprPtr int_lit(std::int64_t v, int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::IntLit;
  e.int_val = v;
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr unit_lit(int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::UnitLit;
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr var(std::string name, int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Var;
  e.name = std::move(name);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

/// func fname param : param_type with body in cont
inline ExprPtr func(std::string fname, std::string param, TypePtr param_type,
                    ExprPtr body, ExprPtr cont, int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Func;
  e.name = std::move(fname);
  e.prop = std::move(param);
  e.type = std::move(param_type);
  e.a = std::move(body);
  e.b = std::move(cont);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr let(std::string name, ExprPtr bound, ExprPtr body, int line = 0,
                   int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Let;
  e.name = std::move(name);
  e.a = std::move(bound);
  e.b = std::move(body);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

/// if-has scrutinee prop : prop_type bind-as bind in then_b else else_b
inline ExprPtr if_has(std::string scrutinee, std::string prop, TypePtr prop_type,
                      std::string bind, ExprPtr then_b, ExprPtr else_b,
                      int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::IfHas;
  e.name = std::move(scrutinee);
  e.prop = std::move(prop);
  e.type = std::move(prop_type);
  e.bind = std::move(bind);
  e.a = std::move(then_b);
  e.b = std::move(else_b);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr set_prop(ExprPtr target, std::string prop, ExprPtr prop_expr,
                        int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Set;
  e.prop = std::move(prop);
  e.a = std::move(target);
  e.b = std::move(prop_expr);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr get_prop(ExprPtr target, std::string prop, int line = 0,
                        int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Get;
  e.prop = std::move(prop);
  e.a = std::move(target);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr erase_prop(ExprPtr target, std::string prop, int line = 0,
                          int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Erase;
  e.prop = std::move(prop);
  e.a = std::move(target);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr extract(ExprPtr target, int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Extract;
  e.a = std::move(target);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr app(ExprPtr fn, ExprPtr arg, int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::App;
  e.a = std::move(fn);
  e.b = std::move(arg);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr plus(ExprPtr l, ExprPtr r, int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Plus;
  e.a = std::move(l);
  e.b = std::move(r);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

inline ExprPtr minus(ExprPtr l, ExprPtr r, int line = 0, int col = 0) {
  Expr e;
  e.kind = Expr::Kind::Minus;
  e.a = std::move(l);
  e.b = std::move(r);
  e.line = line;
  e.col = col;
  return detail::mk(std::move(e));
}

/// propertied[underlying] — compile-time value of a propertied type.
inline ExprPtr propertied_val(ExprPtr underlying) {
  Expr e;
  e.kind = Expr::Kind::PropertiedVal;
  e.a = std::move(underlying);
  return detail::mk(std::move(e));
}

/// fname[index] — reference to a monomorphized function.
inline ExprPtr mono_ref(std::string fname, std::int64_t index) {
  Expr e;
  e.kind = Expr::Kind::MonoRef;
  e.name = std::move(fname);
  e.index = index;
  return detail::mk(std::move(e));
}

inline ExprPtr drop_after(std::string name, ExprPtr body) {
  Expr e;
  e.kind = Expr::Kind::DropAfter;
  e.name = std::move(name);
  e.a = std::move(body);
  return detail::mk(std::move(e));
}

/// retrieve name = saved after body; `saved` is always a value expression.
inline ExprPtr retrieve_after(std::string name, ExprPtr saved, ExprPtr body) {
  Expr e;
  e.kind = Expr::Kind::RetrieveAfter;
  e.name = std::move(name);
  e.b = std::move(saved);
  e.a = std::move(body);
  return detail::mk(std::move(e));
}

// --- equality ---------------------------------------------------------------

bool type_equal(const TypePtr& a, const TypePtr& b);
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  if (a->int_val != b->int_val || a->index != b->index) return false;
  if (a->name != b->name || a->prop != b->prop || a->bind != b->bind)
    return false;
  if (static_cast<bool>(a->type) != static_cast<bool>(b->type)) return false;
  if (a->type && !type_equal(a->type, b->type)) return false;
  return expr_equal(a->a, b->a) && expr_equal(a->b, b->b) &&
         expr_equal(a->c, b->c);
}

inline bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Int:
    case Type::Kind::Unit:
      return true;
    case Type::Kind::Arrow:
      return type_equal(a->dom, b->dom) && type_equal(a->cod, b->cod);
    case Type::Kind::Propertied: {
      if (!type_equal(a->base, b->base)) return false;
      if (a->props.size() != b->props.size()) return false;
      // order-significant, compared pointwise
      for (std::size_t i = 0; i < a->props.size(); ++i) {
        if (a->props[i].name != b->props[i].name) return false;
        if (!expr_equal(a->props[i].expr, b->props[i].expr)) return false;
        if (!type_equal(a->props[i].type, b->props[i].type)) return false;
      }
      return true;
    }
  }
  return false;
}

inline TypePtr Type::make_int() {
  static const TypePtr t = [] {
    auto p = std::make_shared<Type>();
    p->kind = Kind::Int;
    return p;
  }();
  return t;
}

inline TypePtr Type::make_unit() {
  static const TypePtr t = [] {
    auto p = std::make_shared<Type>();
    p->kind = Kind::Unit;
    return p;
  }();
  return t;
}

inline TypePtr Type::arrow(TypePtr d, TypePtr c) {
  auto p = std::make_shared<Type>();
  p->kind = Kind::Arrow;
  p->dom = std::move(d);
  p->cod = std::move(c);
  return p;
}

inline TypePtr Type::propertied(TypePtr base, std::vector<Property> props) {
  if (!base) throw std::invalid_argument("propertied type needs a base");
  if (base->is_propertied())
    throw std::invalid_argument("propertied type cannot stack on a propertied base");
  for (std::size_t i = 0; i < props.size(); ++i)
    for (std::size_t j = i + 1; j < props.size(); ++j)
      if (props[i].name == props[j].name)
        throw std::invalid_argument("duplicate property name: " + props[i].name);
  auto p = std::make_shared<Type>();
  p->kind = Kind::Propertied;
  p->base = std::move(base);
  p->props = std::move(props);
  return p;
}

/// Copy of a propertied type with one property appended.
inline TypePtr with_prop(const TypePtr& t, Property p) {
  auto props = t->props;
  props.push_back(std::move(p));
  return Type::propertied(t->base, std::move(props));
}

/// Copy of a propertied type with the named property replaced in place.
inline TypePtr replace_prop(const TypePtr& t, const Property& p) {
  auto props = t->props;
  for (auto& q : props)
    if (q.name == p.name) {
      q = p;
      return Type::propertied(t->base, std::move(props));
    }
  throw std::invalid_argument("replace_prop: no property " + p.name);
}

/// Copy of a propertied type with the named property removed, order preserved.
inline TypePtr without_prop(const TypePtr& t, const std::string& name) {
  std::vector<Property> props;
  bool found = false;
  for (const auto& q : t->props) {
    if (q.name == name) {
      found = true;
      continue;
    }
    props.push_back(q);
  }
  if (!found) throw std::invalid_argument("without_prop: no property " + name);
  return Type::propertied(t->base, std::move(props));
}

// --- free variables ---------------------------------------------------------

namespace detail {
inline void free_vars_into(const ExprPtr& e, std::set<std::string>& bound,
                           std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case Expr::Kind::IntLit:
    case Expr::Kind::UnitLit:
    case Expr::Kind::MonoRef:
      return;
    case Expr::Kind::Var:
      if (!bound.count(e->name)) out.insert(e->name);
      return;
    case Expr::Kind::Func: {
      // param bound in body, fname bound in cont
      bool had_param = bound.count(e->prop) > 0;
      bound.insert(e->prop);
      free_vars_into(e->a, bound, out);
      if (!had_param) bound.erase(e->prop);
      bool had_fn = bound.count(e->name) > 0;
      bound.insert(e->name);
      free_vars_into(e->b, bound, out);
      if (!had_fn) bound.erase(e->name);
      return;
    }
    case Expr::Kind::Let: {
      free_vars_into(e->a, bound, out);
      bool had = bound.count(e->name) > 0;
      bound.insert(e->name);
      free_vars_into(e->b, bound, out);
      if (!had) bound.erase(e->name);
      return;
    }
    case Expr::Kind::IfHas: {
      if (!bound.count(e->name)) out.insert(e->name);
      for (const auto& p : e->type ? e->type->props : std::vector<Property>{})
        (void)p;  // property types carry no binders
      bool had = bound.count(e->bind) > 0;
      bound.insert(e->bind);
      free_vars_into(e->a, bound, out);  // bind-as scopes over then-branch
      if (!had) bound.erase(e->bind);
      free_vars_into(e->b, bound, out);
      return;
    }
    case Expr::Kind::DropAfter:
    case Expr::Kind::RetrieveAfter: {
      free_vars_into(e->b, bound, out);  // retrieve's saved value
      bool had = bound.count(e->name) > 0;
      bound.insert(e->name);
      free_vars_into(e->a, bound, out);
      if (!had) bound.erase(e->name);
      return;
    }
    default:
      free_vars_into(e->a, bound, out);
      free_vars_into(e->b, bound, out);
      free_vars_into(e->c, bound, out);
      return;
  }
}
}  // namespace detail

inline std::set<std::string> free_vars(const ExprPtr& e) {
  std::set<std::string> bound, out;
  detail::free_vars_into(e, bound, out);
  return out;
}

// --- pretty printing --------------------------------------------------------

std::string pretty(const ExprPtr& e);
std::string pretty(const TypePtr& t);

namespace detail {

// precedence levels of the concrete grammar
constexpr int kLvlExpr = 0;   // func / let / if-has forms (and runtime scopes)
constexpr int kLvlArith = 1;  // + and -
constexpr int kLvlApp = 2;    // application
constexpr int kLvlAtom = 3;

inline void pretty_type_into(const TypePtr& t, std::string& out, bool arrow_lhs);

inline void pretty_into(const ExprPtr& e, std::string& out, int min_lvl) {
  auto wrap = [&](int lvl, auto&& body) {
    bool paren = lvl < min_lvl;
    if (paren) out += '(';
    body();
    if (paren) out += ')';
  };
  switch (e->kind) {
    case Expr::Kind::IntLit:
      out += std::to_string(e->int_val);
      return;
    case Expr::Kind::UnitLit:
      out += "()";
      return;
    case Expr::Kind::Var:
      out += e->name;
      return;
    case Expr::Kind::MonoRef:
      out += e->name;
      out += '[';
      out += std::to_string(e->index);
      out += ']';
      return;
    case Expr::Kind::PropertiedVal:
      out += "propertied[";
      pretty_into(e->a, out, kLvlExpr);
      out += ']';
      return;
    case Expr::Kind::Set:
      out += "set(";
      pretty_into(e->a, out, kLvlExpr);
      out += ", ";
      out += e->prop;
      out += ", ";
      pretty_into(e->b, out, kLvlExpr);
      out += ')';
      return;
    case Expr::Kind::Get:
      out += "get(";
      pretty_into(e->a, out, kLvlExpr);
      out += ", ";
      out += e->prop;
      out += ')';
      return;
    case Expr::Kind::Erase:
      out += "erase(";
      pretty_into(e->a, out, kLvlExpr);
      out += ", ";
      out += e->prop;
      out += ')';
      return;
    case Expr::Kind::Extract:
      out += "extract(";
      pretty_into(e->a, out, kLvlExpr);
      out += ')';
      return;
    case Expr::Kind::Plus:
    case Expr::Kind::Minus:
      wrap(kLvlArith, [&] {
        pretty_into(e->a, out, kLvlArith);
        out += e->kind == Expr::Kind::Plus ? " + " : " - ";
        pretty_into(e->b, out, kLvlApp);
      });
      return;
    case Expr::Kind::App:
      wrap(kLvlApp, [&] {
        pretty_into(e->a, out, kLvlApp);
        out += ' ';
        pretty_into(e->b, out, kLvlAtom);
      });
      return;
    case Expr::Kind::Func:
      wrap(kLvlExpr, [&] {
        out += "func ";
        out += e->name;
        out += ' ';
        out += e->prop;
        out += " : ";
        pretty_type_into(e->type, out, false);
        out += " with ";
        pretty_into(e->a, out, kLvlExpr);
        out += " in ";
        pretty_into(e->b, out, kLvlExpr);
      });
      return;
    case Expr::Kind::Let:
      wrap(kLvlExpr, [&] {
        out += "let ";
        out += e->name;
        out += " = ";
        pretty_into(e->a, out, kLvlExpr);
        out += " in ";
        pretty_into(e->b, out, kLvlExpr);
      });
      return;
    case Expr::Kind::IfHas:
      wrap(kLvlExpr, [&] {
        out += "if-has ";
        out += e->name;
        out += ' ';
        out += e->prop;
        out += " : ";
        pretty_type_into(e->type, out, false);
        out += " bind-as ";
        out += e->bind;
        out += " in ";
        pretty_into(e->a, out, kLvlExpr);
        out += " else ";
        pretty_into(e->b, out, kLvlExpr);
      });
      return;
    case Expr::Kind::DropAfter:
      wrap(kLvlExpr, [&] {
        out += "drop ";
        out += e->name;
        out += " after ";
        pretty_into(e->a, out, kLvlExpr);
      });
      return;
    case Expr::Kind::RetrieveAfter:
      wrap(kLvlExpr, [&] {
        out += "retrieve ";
        out += e->name;
        out += " = ";
        pretty_into(e->b, out, kLvlExpr);
        out += " after ";
        pretty_into(e->a, out, kLvlExpr);
      });
      return;
  }
}

inline void pretty_type_into(const TypePtr& t, std::string& out, bool arrow_lhs) {
  switch (t->kind) {
    case Type::Kind::Int:
      out += "int";
      return;
    case Type::Kind::Unit:
      out += "unit";
      return;
    case Type::Kind::Arrow:
      if (arrow_lhs) out += '(';
      pretty_type_into(t->dom, out, true);
      out += " -> ";
      pretty_type_into(t->cod, out, false);
      if (arrow_lhs) out += ')';
      return;
    case Type::Kind::Propertied:
      out += '[';
      pretty_type_into(t->base, out, false);
      out += "]⟨";
      for (std::size_t i = 0; i < t->props.size(); ++i) {
        if (i) out += ", ";
        out += t->props[i].name;
        out += "↪";
        pretty_into(t->props[i].expr, out, kLvlExpr);
        out += '[';
        pretty_type_into(t->props[i].type, out, false);
        out += ']';
      }
      out += "⟩";
      return;
  }
}

}  // namespace detail

inline std::string pretty(const ExprPtr& e) {
  std::string out;
  detail::pretty_into(e, out, detail::kLvlExpr);
  return out;
}

inline std::string pretty(const TypePtr& t) {
  std::string out;
  detail::pretty_type_into(t, out, false);
  return out;
}

// --- canonical serialization (keys, determinism checks) ---------------------

namespace detail {
inline void ser_type_into(const TypePtr& t, std::string& out);

inline void ser_expr_into(const ExprPtr& e, std::string& out) {
  if (!e) {
    out += '_';
    return;
  }
  out += '(';
  out += std::to_string(static_cast<int>(e->kind));
  out += ' ';
  out += std::to_string(e->int_val);
  out += ' ';
  out += std::to_string(e->index);
  out += ' ';
  out += e->name;
  out += '|';
  out += e->prop;
  out += '|';
  out += e->bind;
  out += '|';
  if (e->type) ser_type_into(e->type, out);
  ser_expr_into(e->a, out);
  ser_expr_into(e->b, out);
  ser_expr_into(e->c, out);
  out += ')';
}

inline void ser_type_into(const TypePtr& t, std::string& out) {
  out += '[';
  out += std::to_string(static_cast<int>(t->kind));
  if (t->kind == Type::Kind::Arrow) {
    ser_type_into(t->dom, out);
    ser_type_into(t->cod, out);
  } else if (t->kind == Type::Kind::Propertied) {
    ser_type_into(t->base, out);
    for (const auto& p : t->props) {
      out += p.name;
      out += ':';
      ser_expr_into(p.expr, out);
      ser_type_into(p.type, out);
    }
  }
  out += ']';
}
}  // namespace detail

inline std::string serialize(const ExprPtr& e) {
  std::string out;
  detail::ser_expr_into(e, out);
  return out;
}

inline std::string serialize(const TypePtr& t) {
  std::string out;
  detail::ser_type_into(t, out);
  return out;
}

// --- functional context -----------------------------------------------------

/// Raw (not yet transformed) function entry.
struct RawFunc {
  std::string name;
  std::string param;
  TypePtr param_type;
  ExprPtr body;
  TypePtr result_type;
};

/// Monomorphized entry: a specialized, fully transformed copy of a raw entry.
struct MonoFunc {
  std::string name;
  std::int64_t index;
  std::string param;
  TypePtr param_type;   // the raw declared type, never propertied
  ExprPtr body;
  TypePtr result_type;
};

/// Compile-time function table: raw definitions plus their monomorphizations.
/// Raw names may repeat (shadowing); lookup by name returns the latest entry.
struct FuncCtx {
  std::vector<RawFunc> raw;
  std::vector<MonoFunc> monos;
  // monomorphization cache: canonical key -> index into `monos`
  std::vector<std::pair<std::string, std::size_t>> cache;

  std::optional<std::size_t> find_raw(const std::string& name) const {
    for (std::size_t i = raw.size(); i-- > 0;)
      if (raw[i].name == name) return i;
    return std::nullopt;
  }

  const MonoFunc* find_mono(const std::string& name, std::int64_t index) const {
    for (const auto& m : monos)
      if (m.name == name && m.index == index) return &m;
    return nullptr;
  }
};

/// Smallest natural >= 1 not yet used as a monomorphization index for `f`.
inline std::int64_t fresh_index(const FuncCtx& delta, const std::string& f) {
  std::int64_t k = 1;
  for (;;) {
    bool used = false;
    for (const auto& m : delta.monos)
      if (m.name == f && m.index == k) {
        used = true;
        break;
      }
    if (!used) return k;
    ++k;
  }
}

}  // namespace lrp

#endif  // LRP_AST_HPP
