#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rearr/approx.hpp"
#include "rearr/constructs.hpp"
#include "rearr/errors.hpp"
#include "rearr/expr.hpp"
#include "rearr/functional.hpp"
#include "rearr/harness.hpp"
#include "rearr/io.hpp"
#include "rearr/pl_literal.hpp"
#include "rearr/weightlab.hpp"

namespace rearr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdict = 1;
inline constexpr int kExitUsage = 2;

inline constexpr const char* kGrammarHelp = R"(Input formats
  functions   pl:x0:y0,x1:y1,...   x strictly increasing, x0 = -1, xlast = 1
  weights     expression in x, v   or  grid:@file.csv
              (header row: label then x-nodes -1+2i/k, k even; each row: v then values)
  integrands  expression in v, p   or  power:ALPHA  or  quadratic:GAMMA

Expression grammar
  expr  := term (('+'|'-') term)*
  term  := unary (('*'|'/') unary)*
  unary := '-' unary | power
  power := atom ('^' unary)?          right-associative; -2^2 = -(2^2)
  atom  := number | x | v | p | func '(' expr (',' expr)* ')' | '(' expr ')'
  func  := abs exp log sqrt cos sin (one argument) | min max (two or more)

Exit codes: 0 success, 1 verdict failure, 2 usage or input error.
)";

namespace detail {

inline bool usage_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownIdentifier:
    case ErrorCode::ArityError:
    case ErrorCode::UnboundVariable:
    case ErrorCode::NegativeInput:
    case ErrorCode::NegativeWeight:
      return true;
    default:
      return false;
  }
}

inline Json header(const std::string& command) { return Json{{"schema", kSchemaVersion}, {"command", command}}; }

inline void write_plot(const std::string& path, const PiecewiseLinear& u, const PiecewiseLinear& r,
                       RearrangeMode mode) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write plot file " + path);
  f << "x,u," << (mode == RearrangeMode::Monotone ? "u_star" : "u_bar") << '\n';
  for (double x : merged_breakpoints(u, r)) {
    f << format_double(x) << ',' << format_double(u(x)) << ',' << format_double(r(x)) << '\n';
  }
}

inline std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    out.push_back(rearr::detail::parse_number(std::string_view(text).substr(pos, comma - pos), pos));
    pos = comma + 1;
  }
  return out;
}

}  // namespace detail

/// Runs the command line `args` (args[0] is the program name). Reports go
/// to `out` (or the --output file), diagnostics to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rearrangements of piecewise linear functions and weighted functionals", "rearr"};
  app.require_subcommand(1);
  app.footer(kGrammarHelp);

  std::string format = "json";
  std::string output;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json | csv | human")->check(CLI::IsMember({"json", "csv", "human"}));
    sub->add_option("--output", output, "write the report to this file instead of stdout");
  };

  // rearrange
  std::string u_text, mode_text = "monotone", plot;
  auto* rearrange_cmd = app.add_subcommand("rearrange", "monotone or symmetric rearrangement of a pl: function");
  rearrange_cmd->add_option("--u", u_text, "function as pl: literal")->required();
  rearrange_cmd->add_option("--mode", mode_text, "monotone | symmetric")->check(CLI::IsMember({"monotone", "symmetric"}));
  rearrange_cmd->add_option("--emit-plot", plot, "CSV file with x, u and the rearrangement");
  add_common(rearrange_cmd);

  // evaluate
  std::string weight_text = "1", F_text = "p^2";
  double tol = kDefaultQuadTol;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "value of the weighted functional");
  evaluate_cmd->add_option("--u", u_text, "function as pl: literal")->required();
  evaluate_cmd->add_option("--weight", weight_text, "weight a(x, v)");
  evaluate_cmd->add_option("--F", F_text, "integrand F(v, p)");
  evaluate_cmd->add_option("--tol", tol, "quadrature tolerance");
  add_common(evaluate_cmd);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "compare I(a, u) with the rearranged side");
  verify_cmd->add_option("--u", u_text, "function as pl: literal")->required();
  verify_cmd->add_option("--weight", weight_text, "weight a(x, v)");
  verify_cmd->add_option("--F", F_text, "integrand F(v, p)");
  verify_cmd->add_option("--mode", mode_text, "monotone | symmetric")->check(CLI::IsMember({"monotone", "symmetric"}));
  verify_cmd->add_option("--tol", tol, "quadrature tolerance");
  verify_cmd->add_option("--emit-plot", plot, "CSV file with x, u and the rearrangement");
  add_common(verify_cmd);

  // check-weight
  std::string condition = "admissible";
  std::optional<double> vmin, vmax, zeros_at;
  int x_nodes = kDefaultCheckXNodes, v_samples = kDefaultCheckVSamples;
  std::optional<int> interpolate_k;
  auto* check_cmd = app.add_subcommand("check-weight", "evenness and the monotone / symmetric conditions");
  check_cmd->add_option("--weight", weight_text, "weight a(x, v)")->required();
  check_cmd->add_option("--condition", condition, "admissible | symmetric | both")
      ->check(CLI::IsMember({"admissible", "symmetric", "both"}));
  check_cmd->add_option("--vmin", vmin, "lower end of the value range");
  check_cmd->add_option("--vmax", vmax, "upper end of the value range");
  check_cmd->add_option("--x-nodes", x_nodes, "x-nodes of the sampled check (odd)");
  check_cmd->add_option("--v-samples", v_samples, "v-samples of the sampled check");
  check_cmd->add_option("--interpolate", interpolate_k, "check the interpolant on k + 1 uniform nodes (k even)");
  check_cmd->add_option("--zeros-at", zeros_at, "classify the zero set of a(., v) at this level");
  add_common(check_cmd);

  // counterexample
  std::string kind;
  double s = 0.4, t = 0.6, eps = 0.1, delta = 0.1, vbar = 0.0, xbar = -0.5;
  std::optional<double> alpha, A;
  auto* cex_cmd = app.add_subcommand("counterexample", "build a violating instance and measure its gap");
  cex_cmd->add_option("kind", kind, "asymmetry | nonconcavity | symmetric")
      ->required()
      ->check(CLI::IsMember({"asymmetry", "nonconcavity", "symmetric"}));
  cex_cmd->add_option("--weight", weight_text, "weight a(x, v)")->required();
  cex_cmd->add_option("--s", s, "left ramp position");
  cex_cmd->add_option("--t", t, "right ramp position");
  cex_cmd->add_option("--eps", eps, "ramp width");
  cex_cmd->add_option("--delta", delta, "violation margin");
  cex_cmd->add_option("--vbar", vbar, "base level");
  cex_cmd->add_option("--xbar", xbar, "ramp end (asymmetry)");
  cex_cmd->add_option("--alpha", alpha, "exponent of F = p^alpha (nonconcavity)");
  cex_cmd->add_option("--A", A, "weight bound; computed from a grid maximum when absent");
  cex_cmd->add_option("--tol", tol, "quadrature tolerance");
  add_common(cex_cmd);

  // approx
  std::string u_expr, ladder_text = "4,8,16,32,64";
  int nodes = 10001;
  auto* approx_cmd = app.add_subcommand("approx", "Lipschitz approximation ladder");
  auto* u_opt = approx_cmd->add_option("--u", u_text, "function as pl: literal");
  auto* ue_opt = approx_cmd->add_option("--u-expr", u_expr, "expression in x sampled on uniform nodes of [-1, 1]");
  u_opt->excludes(ue_opt);
  approx_cmd->add_option("--nodes", nodes, "sample count for --u-expr");
  approx_cmd->add_option("--weight", weight_text, "weight a(x, v)");
  approx_cmd->add_option("--F", F_text, "integrand F(v, p)");
  approx_cmd->add_option("--ladder", ladder_text, "comma separated thresholds h");
  approx_cmd->add_option("--tol", tol, "quadrature tolerance");
  add_common(approx_cmd);

  // sweep
  SweepConfig cfg;
  std::string family_text = "admissible";
  auto* sweep_cmd = app.add_subcommand("sweep", "seeded random verification sweep");
  sweep_cmd->add_option("--seed", cfg.seed, "64-bit seed");
  sweep_cmd->add_option("--count", cfg.count, "number of instances");
  sweep_cmd->add_option("--mode", mode_text, "monotone | symmetric")->check(CLI::IsMember({"monotone", "symmetric"}));
  sweep_cmd->add_option("--family", family_text, "admissible | convex | constant | violating")
      ->check(CLI::IsMember({"admissible", "convex", "constant", "violating"}));
  sweep_cmd->add_option("--min-breakpoints", cfg.min_breakpoints, "fewest breakpoints of u");
  sweep_cmd->add_option("--max-breakpoints", cfg.max_breakpoints, "most breakpoints of u");
  sweep_cmd->add_option("--tol", cfg.tol, "allowed negative gap beyond the quadrature error");
  sweep_cmd->add_option("--quad-tol", cfg.quad_tol, "quadrature tolerance");
  sweep_cmd->add_option("--threads", cfg.threads, "worker count (default: RR_THREADS or all cores)");
  add_common(sweep_cmd);

  // parse
  std::string expr_text;
  std::optional<double> bx, bv, bp;
  auto* parse_cmd = app.add_subcommand("parse", "parse, print and optionally evaluate an expression");
  parse_cmd->add_option("expr", expr_text, "expression")->required();
  parse_cmd->add_option("--x", bx, "value of x");
  parse_cmd->add_option("--v", bv, "value of v");
  parse_cmd->add_option("--p", bp, "value of p");
  add_common(parse_cmd);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << kGrammarHelp;
    return kExitUsage;
  }

  try {
    const OutputFormat fmt = parse_format(format);
    Json report;
    int code = kExitOk;

    if (rearrange_cmd->parsed()) {
      const PiecewiseLinear u = parse_pl(u_text);
      const RearrangeMode mode = parse_mode(mode_text);
      const PiecewiseLinear r = rearrange(u, mode);
      report = detail::header("rearrange");
      report["mode"] = mode_text;
      report["input"] = format_pl(u);
      report["result"] = format_pl(r);
      report["metrics_input"] = to_json(pl_metrics(u));
      report["metrics_result"] = to_json(pl_metrics(r));
      if (!plot.empty()) detail::write_plot(plot, u, r, mode);
    } else if (evaluate_cmd->parsed()) {
      const PiecewiseLinear u = parse_pl(u_text);
      const Weight a = parse_weight(weight_text, Interval{u.min_value(), u.max_value()});
      const Integrand F = parse_integrand(F_text);
      report = detail::header("evaluate");
      report["weight"] = a.description();
      report["F"] = F.description();
      report["I"] = to_json(evaluate_functional(F, a, u, tol));
    } else if (verify_cmd->parsed()) {
      const PiecewiseLinear u = parse_pl(u_text);
      const RearrangeMode mode = parse_mode(mode_text);
      const Weight a = parse_weight(weight_text, Interval{u.min_value(), u.max_value()});
      const Integrand F = parse_integrand(F_text);
      VerifyOptions opts;
      opts.tol = tol;
      const VerifyReport rep = verify_rearrangement(F, a, u, mode, opts);
      report = detail::header("verify");
      report["weight"] = a.description();
      report["F"] = F.description();
      report["input"] = format_pl(u);
      report["report"] = to_json(rep);
      if (rep.guaranteed && !rep.holds) code = kExitVerdict;
      if (!plot.empty()) detail::write_plot(plot, u, rep.rearranged, mode);
    } else if (check_cmd->parsed()) {
      std::optional<Interval> vr;
      if (vmin || vmax) vr = Interval{vmin.value_or(0.0), vmax.value_or(vmin.value_or(0.0) + 1.0)};
      Weight a = parse_weight(weight_text, vr);
      if (interpolate_k) a = interpolate_weight(a, *interpolate_k);
      CheckResolution res;
      res.x_nodes = x_nodes;
      res.v_samples = v_samples;
      report = detail::header("check-weight");
      report["weight"] = a.description();
      bool ok = true;
      if (condition == "admissible" || condition == "both") {
        const ConditionReport c = check_admissible(a, res);
        report["admissible"] = to_json(c);
        ok = ok && c.admissible();
      }
      if (condition == "symmetric" || condition == "both") {
        const ConditionReport c = check_symmetric_condition(a, res);
        report["symmetric"] = to_json(c);
        ok = ok && c.cond_sym;
      }
      if (zeros_at) report["zero_set"] = to_json(zero_set_analysis(a, *zeros_at, 1e-12));
      report["passes"] = ok;
      if (!ok) code = kExitVerdict;
    } else if (cex_cmd->parsed()) {
      const Weight a = parse_weight(weight_text, Interval{vbar, vbar + eps});
      CounterexampleSpec spec{s, t, eps, delta, vbar, A, CounterexampleKind::Nonconcavity};
      Counterexample c;
      RearrangeMode mode = RearrangeMode::Monotone;
      report = detail::header("counterexample");
      report["kind"] = kind;
      report["weight"] = a.description();
      if (kind == "asymmetry") {
        c = build_asymmetry_counterexample(a, xbar, vbar, eps);
      } else if (kind == "nonconcavity") {
        const double a_bound = A.value_or(weight_bound(a, {vbar, vbar + eps}));
        const double amax = counterexample_alpha(a_bound, delta);
        c = build_nonconcavity_counterexample(a, spec, alpha.value_or(0.5 * (1.0 + amax)));
        report["alpha"] = alpha.value_or(0.5 * (1.0 + amax));
        report["alpha_max"] = c.alpha_max;
      } else {
        spec.kind = CounterexampleKind::Nonconvexity;
        c = build_symmetric_counterexample(a, spec);
        mode = RearrangeMode::Symmetric;
        report["gamma"] = c.gamma;
      }
      report["A"] = c.A;
      VerifyOptions opts;
      opts.tol = tol;
      opts.check_conditions = false;
      const VerifyReport rep = verify_rearrangement(c.F, a, c.u, mode, opts);
      report["F"] = c.F.description();
      report["u"] = format_pl(c.u);
      report["closed_form_rearranged"] = format_pl(c.rearranged);
      report["report"] = to_json(rep);
      const bool confirmed = rep.gap < 0.0 && rep.gap < -10.0 * rep.quad_err;
      report["confirmed"] = confirmed;
      if (!confirmed) code = kExitVerdict;
    } else if (approx_cmd->parsed()) {
      PiecewiseLinear u = PiecewiseLinear::constant(0.0);
      if (!u_expr.empty()) {
        const Expr e = parse_expr(u_expr);
        if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "need at least two nodes");
        u = PiecewiseLinear::sample([&](double x) { return e.eval(Bindings{x, std::nullopt, std::nullopt}); },
                                    static_cast<std::size_t>(nodes - 1));
      } else if (!u_text.empty()) {
        u = parse_pl(u_text);
      } else {
        throw Error(ErrorCode::InvalidArgument, "approx needs --u or --u-expr");
      }
      const Weight a = parse_weight(weight_text, Interval{u.min_value(), u.max_value()});
      const Integrand F = parse_integrand(F_text);
      report = detail::header("approx");
      report["weight"] = a.description();
      report["F"] = F.description();
      report["convergence"] = to_json(convergence_report(F, a, u, detail::parse_list(ladder_text), tol));
    } else if (sweep_cmd->parsed()) {
      cfg.mode = parse_mode(mode_text);
      cfg.family = parse_family(family_text);
      const SweepReport rep = sweep(cfg);
      report = to_json(rep);
      report["command"] = "sweep";
      if (!rep.ok()) code = kExitVerdict;
    } else if (parse_cmd->parsed()) {
      const Expr e = parse_expr(expr_text);
      report = detail::header("parse");
      report["input"] = expr_text;
      report["tree"] = e.print();
      if (bx || bv || bp) report["value"] = e.eval(Bindings{bx, bv, bp});
    }

    if (output.empty()) {
      write_report(report, fmt, out);
    } else {
      std::ofstream f(output);
      if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + output);
      write_report(report, fmt, f);
    }
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (detail::usage_code(e.code())) {
      err << '\n' << kGrammarHelp;
      return kExitUsage;
    }
    return kExitVerdict;
  }
}

}  // namespace rearr::cli
