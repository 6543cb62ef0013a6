#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "lrp/ast.hpp"
#include "lrp/ir.hpp"
#include "lrp/parser.hpp"
#include "lrp/runtime.hpp"
#include "lrp/transform.hpp"
#include "lrp/typecheck.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kLangError = 1;
constexpr int kIoError = 2;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

int io_error(const std::string& path) {
  std::cerr << "error: cannot read '" << path << "'\n";
  return kIoError;
}

void print_parse_error(const lrp::ParseError& e) {
  std::cerr << "error[E-PARSE]: " << e.what() << " at " << e.line << ":"
            << e.col << "\n";
}

/// Δ entry lines in the notation `f :: x : T1 . body : T2` (raw) and
/// `f[k] ▷ x : T1 . body : T2` (monomorphized).
void print_delta(const lrp::FuncCtx& delta) {
  for (const auto& r : delta.raw)
    std::cout << r.name << " :: " << r.param << " : "
              << lrp::pretty(r.param_type) << " . " << lrp::pretty(r.body)
              << " : " << lrp::pretty(r.result_type) << "\n";
  for (const auto& m : delta.monos)
    std::cout << m.name << "[" << m.index << "] ▷ " << m.param << " : "
              << lrp::pretty(m.param_type) << " . " << lrp::pretty(m.body)
              << " : " << lrp::pretty(m.result_type) << "\n";
}

int cmd_check(const std::string& path) {
  std::string src;
  if (!read_file(path, src)) return io_error(path);
  try {
    lrp::ExprPtr e = lrp::parse_program(src);
    lrp::TypePtr t = lrp::check_program(e);
    std::cout << "OK: " << lrp::pretty(t) << "\n";
    return kOk;
  } catch (const lrp::ParseError& err) {
    print_parse_error(err);
  } catch (const lrp::TypeError& err) {
    std::cerr << err.render() << "\n";
  }
  return kLangError;
}

int cmd_transform(const std::string& path, const std::string& emit) {
  std::string src;
  if (!read_file(path, src)) return io_error(path);
  try {
    lrp::ExprPtr e = lrp::parse_program(src);
    lrp::check_program(e);
    lrp::TransformResult tr = lrp::transform_program(e);
    if (emit == "json") {
      std::cout << lrp::ir::to_text(tr);
    } else {
      std::cout << lrp::pretty(tr.expr) << "\n";
      print_delta(tr.delta);
    }
    return kOk;
  } catch (const lrp::ParseError& err) {
    print_parse_error(err);
  } catch (const lrp::TypeError& err) {
    std::cerr << err.render() << "\n";
  } catch (const lrp::TransformError& err) {
    std::cerr << err.render() << "\n";
  } catch (const lrp::IrError& err) {
    std::cerr << err.render() << "\n";
  }
  return kLangError;
}

int cmd_run(const std::string& path, bool trace, std::size_t max_steps,
            bool from_ir) {
  std::string src;
  if (!read_file(path, src)) return io_error(path);
  try {
    lrp::TransformResult tr;
    if (from_ir) {
      tr = lrp::ir::from_text(src);
    } else {
      lrp::ExprPtr e = lrp::parse_program(src);
      lrp::check_program(e);
      tr = lrp::transform_program(e);
    }
    lrp::RuntimeCtx phi = lrp::ready(tr.delta, tr.type);
    lrp::RunOptions opts;
    opts.max_steps = max_steps;
    if (trace)
      opts.on_step = [](const lrp::Store& before, const lrp::ExprPtr& e,
                        const std::string& rule, const lrp::Store& after,
                        const lrp::ExprPtr& e2) {
        std::cerr << "⟨" << before.render() << "⟩ ; " << lrp::pretty(e)
                  << "  --" << rule << "-->  ⟨" << after.render() << "⟩ ; "
                  << lrp::pretty(e2) << "\n";
      };
    lrp::Value v = lrp::run(phi, tr.expr, opts);
    std::cout << lrp::to_string(v) << "\n";
    return kOk;
  } catch (const lrp::ParseError& err) {
    print_parse_error(err);
  } catch (const lrp::TypeError& err) {
    std::cerr << err.render() << "\n";
  } catch (const lrp::TransformError& err) {
    std::cerr << err.render() << "\n";
  } catch (const lrp::IrError& err) {
    std::cerr << err.render() << "\n";
  } catch (const lrp::RunError& err) {
    std::cerr << err.render() << "\n";
  }
  return kLangError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lrp — checker, transformer, and runtime for propertied-types "
               "programs"};
  app.require_subcommand(1);

  std::string path;
  std::string emit = "text";
  bool trace = false;
  bool from_ir = false;
  std::size_t max_steps = lrp::kDefaultMaxSteps;

  CLI::App* check = app.add_subcommand("check", "Type-check a program");
  check->add_option("file", path, "program file")->required();

  CLI::App* transform =
      app.add_subcommand("transform", "Run the compile-time transformation");
  transform->add_option("file", path, "program file")->required();
  transform->add_option("--emit", emit, "output format")
      ->check(CLI::IsMember({"text", "json"}));

  CLI::App* run = app.add_subcommand("run", "Evaluate a program");
  run->add_option("file", path, "program file")->required();
  run->add_flag("--trace", trace, "stream step trace to standard error");
  run->add_option("--max-steps", max_steps, "step budget");
  run->add_flag("--from-ir", from_ir, "treat the file as an IR document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIoError;
  }

  if (check->parsed()) return cmd_check(path);
  if (transform->parsed()) return cmd_transform(path, emit);
  return cmd_run(path, trace, max_steps, from_ir);
}
