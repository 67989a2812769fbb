// mvu: typecheck, run, fuzz and serve model-view-update programs.
//
// Exit codes: 0 success, 1 a diagnostic (parse or type error, bad usage,
// rejected event), 2 a metatheory violation found while running.

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mvu/bridge.hpp"
#include "mvu/harness.hpp"
#include "mvu/printer.hpp"

using namespace mvu;

namespace {

Bridge* serving = nullptr;

void on_signal(int) {
  if (serving) serving->stop();
}

int report_static_error(const std::exception& e) {
  if (auto* t = dynamic_cast<const TypeError*>(&e)) {
    std::cerr << "type error [" << t->rule << "] at " << t->span.line << ":" << t->span.col << ": " << t->message
              << "\n";
    return 1;
  }
  if (dynamic_cast<const ParseError*>(&e)) {
    std::cerr << "parse error at " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: " << e.what() << "\n";
  return 1;
}

int check(const std::string& file) {
  LinkedProgram p = load_linked(file);
  const CheckedProgram& c = p.checked;
  for (std::size_t i = 0; i < c.definition_types.size(); ++i)
    std::cout << c.program.definitions[i].name << " : " << to_string(c.definition_types[i]) << "\n";
  if (c.run)
    std::cout << "main : " << to_string(c.main_type) << "\nmode " << to_string(c.run->mode)
              << ", model " << to_string(c.run->model) << ", message " << to_string(c.run->message) << "\n";
  return 0;
}

void print_report(const Runner& r) {
  const RunReport& rep = r.report();
  const Configuration& c = r.configuration();
  std::cout << "steps " << rep.steps << "\n";
  std::cout << "model " << model_text(c) << "\n";
  std::cout << "page " << print_term(erase(c.page)) << "\n";
  const Classification& cl = rep.quiescences.back();
  if (cl.ok) std::cout << "status " << to_string(cl.kind) << "\n";
  else std::cout << "status unclassified: " << cl.failure << "\n";
  for (const auto& t : cl.threads) std::cout << "  " << t.thread << ": " << t.status << "\n";
  if (rep.out_of_steps) std::cout << "step budget exhausted\n";
  if (rep.checks) std::cout << "checked " << rep.checks << " configurations\n";
  for (const auto& f : rep.failures) std::cout << "FAILED " << f << "\n";
}

int run(const std::string& file, const std::string& trace_file, RunOptions options, bool log) {
  LinkedProgram p = load_linked(file);
  std::vector<TraceEvent> trace;
  if (!trace_file.empty()) trace = load_trace(trace_file);
  if (log) options.log = &std::cout;
  Runner r(start(p), options);
  r.settle();
  for (const auto& e : trace) {
    try {
      r.inject(e);
    } catch (const InjectionError& err) {
      std::cerr << "rejected event: " << err.what() << "\n";
      return 1;
    }
    if (e.settle) r.settle();
  }
  if (!trace.empty() && !trace.back().settle) r.settle();
  print_report(r);
  if (!r.report().failures.empty()) return 2;
  return r.report().out_of_steps ? 1 : 0;
}

int fuzz_cmd(const std::string& file, long traces, long injections, std::uint64_t seed, long max_steps,
             const std::string& out_file) {
  LinkedProgram p = load_linked(file);
  FuzzReport rep = fuzz(p, traces, injections, seed, max_steps);
  std::cout << rep.traces << " traces, " << rep.injections << " injections, " << rep.steps << " steps, "
            << rep.checks << " configurations checked, " << rep.failures.size() << " failures\n";
  for (const auto& f : rep.failures) std::cout << "FAILED " << f << "\n";
  if (!rep.failures.empty() && !out_file.empty()) {
    std::ofstream out(out_file);
    out << "# seed " << rep.failing_seed << "\n";
    for (const auto& e : rep.failing_trace) out << trace_event_to_json(e).dump() << "\n";
    std::cout << "failing trace written to " << out_file << "\n";
  }
  return rep.failures.empty() ? 0 : 2;
}

int serve(const std::string& file, const std::string& listen, RunOptions options) {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw std::invalid_argument("--listen expects host:port");
  std::string host = listen.substr(0, colon);
  int port = std::stoi(listen.substr(colon + 1));
  LinkedProgram p = load_linked(file);
  Bridge bridge(p, options);
  serving = &bridge;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::thread announce([&] {
    bridge.wait_until_serving();
    std::cout << "serving " << file << " on http://" << host << ":" << bridge.port() << std::endl;
  });
  bridge.serve(host, port);
  announce.join();
  serving = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Typecheck, run, fuzz and serve model-view-update programs"};
  app.require_subcommand(1);

  bool log = false;
  std::string file, trace_file, listen = "127.0.0.1:8080", out_file;
  RunOptions options;
  long traces = 100, injections = 50;
  std::uint64_t seed = 0;

  auto* check_cmd = app.add_subcommand("check", "Typecheck a program and print its types");
  check_cmd->add_option("file", file, "Program source")->required();

  auto* run_cmd = app.add_subcommand("run", "Run a program, optionally replaying a JSONL event trace");
  run_cmd->add_option("file", file, "Program source")->required();
  run_cmd->add_option("--trace", trace_file, "JSONL event trace");
  run_cmd->add_flag("--check-every-step", options.check_every_step, "Typecheck every intermediate configuration");
  run_cmd->add_option("--max-steps", options.max_steps, "Step budget between injections");
  run_cmd->add_flag("--log", log, "Print each reduction's rule and configuration digest");

  auto* fuzz_sub = app.add_subcommand("fuzz", "Run random traces, typechecking every step");
  fuzz_sub->add_option("file", file, "Program source")->required();
  fuzz_sub->add_option("--traces", traces, "Number of traces");
  fuzz_sub->add_option("--injections", injections, "Events per trace");
  fuzz_sub->add_option("--seed", seed, "Seed of the first trace");
  fuzz_sub->add_option("--max-steps", options.max_steps, "Step budget between injections");
  fuzz_sub->add_option("--out", out_file, "Where to write the first failing trace");

  auto* serve_cmd = app.add_subcommand("serve", "Serve a running program over HTTP");
  serve_cmd->add_option("file", file, "Program source")->required();
  serve_cmd->add_option("--listen", listen, "host:port");
  serve_cmd->add_flag("--check-every-step", options.check_every_step, "Typecheck every intermediate configuration");
  serve_cmd->add_option("--max-steps", options.max_steps, "Step budget per event");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*check_cmd) return check(file);
    if (*run_cmd) return run(file, trace_file, options, log);
    if (*fuzz_sub) return fuzz_cmd(file, traces, injections, seed, options.max_steps, out_file);
    if (*serve_cmd) return serve(file, listen, options);
  } catch (const std::exception& e) {
    return report_static_error(e);
  }
  return 1;
}
