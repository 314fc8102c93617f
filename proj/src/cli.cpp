#include "grafcet/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <future>
#include <sstream>

#include "grafcet/analysis.hpp"
#include "grafcet/report.hpp"
#include "grafcet/syntax.hpp"

namespace grafcet {

namespace {

struct Options {
  std::string file;
  std::string format = "text";
  std::vector<std::string> partials;
  bool allow_unsound = false;
  unsigned widen_delay = 3;
  bool no_narrow = false;
  std::size_t max_visits = 10000;
  unsigned jobs = 1;
};

PartialReport analyze_one(const Grafcet& g, const PartialGrafcet& p, const AnalysisOptions& opt) {
  PartialReport pr{p.name, std::nullopt, {}};
  try {
    pr.result = interpret(g, p, opt);
  } catch (const IterationLimitError& e) {
    pr.error = e.what();
  }
  return pr;
}

int pipeline(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  std::ifstream in(o.file, std::ios::binary);
  if (!in) {
    err << o.file << ": cannot open file\n";
    return kExitModelError;
  }
  std::stringstream buf;
  buf << in.rdbuf();

  auto parsed = parse_file(buf.str(), o.file);
  if (!parsed.ok()) {
    for (const auto& e : parsed.errors) err << format(e) << "\n";
    return kExitModelError;
  }
  const Grafcet& g = *parsed.model;
  if (auto errors = validate(g); !errors.empty()) {
    for (const auto& e : errors)
      err << o.file << ": model error: " << to_string(e.rule) << " " << e.element << ": " << e.message << "\n";
    return kExitModelError;
  }

  Report r;
  r.command = command;
  r.file = o.file;
  r.summary = summarize(g);
  r.warnings = model_warnings(g);
  r.gate = gate(g);
  for (const auto& name : o.partials)
    if (!g.find_partial(name)) {
      err << o.file << ": unknown partial " << name << "\n";
      return kExitModelError;
    }
  for (const auto& p : g.partials)
    if (o.partials.empty() || std::count(o.partials.begin(), o.partials.end(), p.name))
      r.selected.push_back(p.name);

  if (command == "analyze") {
    std::vector<const PartialGrafcet*> todo;
    for (const auto& name : r.selected) {
      if (r.gate.partial_ok(name) || o.allow_unsound) todo.push_back(g.find_partial(name));
      else r.partials.push_back({name, std::nullopt, {}});
    }
    auto options_for = [&](const PartialGrafcet& p) {
      AnalysisOptions opt;
      opt.widen_delay = o.widen_delay;
      opt.narrow = !o.no_narrow;
      opt.max_visits = o.max_visits;
      opt.unsound = !r.gate.partial_ok(p.name);
      return opt;
    };
    std::vector<PartialReport> done(todo.size());
    const std::size_t jobs = std::max(1u, o.jobs);
    for (std::size_t base = 0; base < todo.size(); base += jobs) {
      std::vector<std::future<PartialReport>> batch;
      for (std::size_t i = base; i < std::min(todo.size(), base + jobs); ++i) {
        const auto* p = todo[i];
        if (jobs == 1) done[i] = analyze_one(g, *p, options_for(*p));
        else batch.push_back(std::async(std::launch::async, analyze_one, std::cref(g), std::cref(*p), options_for(*p)));
      }
      for (std::size_t k = 0; k < batch.size(); ++k) done[base + k] = batch[k].get();
    }
    for (auto& pr : done) r.partials.push_back(std::move(pr));
    // Keep declaration order regardless of which partials were skipped.
    std::stable_sort(r.partials.begin(), r.partials.end(), [&](const auto& a, const auto& b) {
      return std::find(r.selected.begin(), r.selected.end(), a.name) <
             std::find(r.selected.begin(), r.selected.end(), b.name);
    });
  }

  r.total_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out << emit_report(r, o.format == "json" ? ReportFormat::Json : ReportFormat::Text);
  for (const auto& p : r.partials)
    if (!p.error.empty()) err << o.file << ": " << p.error << "\n";

  if (r.hit_limit()) return kExitLimit;
  if (r.gate_failed() && !(command == "analyze" && o.allow_unsound)) return kExitGateFailed;
  if (r.has_diagnostics()) return kExitDiagnostics;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Static analyzer for GRAFCET specifications", "grafcet"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("FILE", o.file, "Specification file")->required();
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("--partial", o.partials, "Restrict to the named partial (repeatable)");
  };
  auto* check = app.add_subcommand("check", "Parse, validate and run the concurrency gate");
  add_common(check);
  auto* analyze = app.add_subcommand("analyze", "Run the full interval analysis");
  add_common(analyze);
  analyze->add_flag("--allow-unsound", o.allow_unsound, "Analyze partials that fail the concurrency gate");
  analyze->add_option("--widen-delay", o.widen_delay, "Growing joins at a loop head before widening");
  analyze->add_flag("--no-narrow", o.no_narrow, "Skip the narrowing pass");
  analyze->add_option("--max-visits", o.max_visits, "Node visits before giving up")->check(CLI::PositiveNumber);
  analyze->add_option("--jobs", o.jobs, "Partials analyzed in parallel")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "grafcet: " << e.what() << "\n" << app.help();
    return kExitModelError;
  }
  return pipeline(check->parsed() ? "check" : "analyze", o, out, err);
}

}  // namespace grafcet
