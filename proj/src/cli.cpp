#include "synmpst/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "synmpst/global_lts.hpp"
#include "synmpst/mlts.hpp"
#include "synmpst/parser.hpp"
#include "synmpst/runtime.hpp"
#include "synmpst/typechecker.hpp"

namespace synmpst {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_error = 2;

// Reported to the user and mapped to exit code 2.
struct ToolError
{
  std::string message;
};

struct Options
{
  std::vector<std::string> inputs;
  std::size_t state_cap = default_state_cap;
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
  std::size_t max_depth = 200;
  std::string format = "text";
  std::string mlts;
  std::string session;
  std::string global;
  bool allow_unverified = false;
  bool strict_var = false;
  bool derivations = false;
};

std::size_t default_cap_from_env()
{
  if (const char * env = std::getenv("SYNMPST_STATE_CAP")) {
    char * end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return default_state_cap;
}

std::string read_file(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ToolError{"cannot read " + path};
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path companion_mlts(const std::string & path)
{
  fs::path p(path);
  return p.parent_path() / (p.stem().string() + ".mlts.json");
}

Mlts load_mlts(const std::string & path, std::ostream & err)
{
  auto parsed = parse_mlts(read_file(path), path);
  if (!parsed.ok()) {
    for (const auto & d : parsed.diagnostics) err << to_string(d) << "\n";
    throw ToolError{"invalid MLTS " + path};
  }
  return *parsed.mlts;
}

// A parsed protocol file together with the specification its sessions are
// checked against.
struct Workspace
{
  std::string path;
  ProtocolFile file;
  std::optional<Mlts> external;  // from --mlts or a companion file
  std::string external_path;
  std::map<std::string, Mlts> lts_cache;
  std::size_t state_cap = default_state_cap;

  const Mlts & spec_for(const SessionDecl & s)
  {
    if (external) return *external;
    auto it = lts_cache.find(s.global);
    if (it != lts_cache.end()) return it->second;
    const auto * g = file.find_global(s.global);
    return lts_cache.emplace(s.global, as_mlts(build_lts(g->type, state_cap)))
        .first->second;
  }
};

Workspace load(const std::string & path, const Options & opts, std::ostream & err)
{
  Workspace ws;
  ws.path = path;
  ws.state_cap = opts.state_cap;
  std::string mlts_path = opts.mlts;
  if (mlts_path.empty() && fs::exists(companion_mlts(path)))
    mlts_path = companion_mlts(path).string();
  ParseOptions popts;
  popts.require_session_globals = mlts_path.empty();
  auto parsed = parse_file(read_file(path), path, popts);
  if (!parsed.ok()) {
    for (const auto & d : parsed.diagnostics) err << to_string(d) << "\n";
    throw ToolError{"cannot load " + path};
  }
  ws.file = std::move(*parsed.file);
  if (!mlts_path.empty()) {
    ws.external = load_mlts(mlts_path, err);
    ws.external_path = mlts_path;
  }
  return ws;
}

std::vector<const SessionDecl *> selected_sessions(const Workspace & ws, const Options & opts)
{
  std::vector<const SessionDecl *> out;
  for (const auto & s : ws.file.sessions)
    if (opts.session.empty() || s.name == opts.session) out.push_back(&s);
  if (!opts.session.empty() && out.empty())
    throw ToolError{"no session named " + opts.session + " in " + ws.path};
  return out;
}

const SessionDecl & single_session(const Workspace & ws, const Options & opts)
{
  auto sessions = selected_sessions(ws, opts);
  if (sessions.empty()) throw ToolError{ws.path + " declares no session"};
  return *sessions.front();
}

struct SessionVerdict
{
  bool spec_ok = true;  // WB, or explicitly allowed not to be
  std::vector<WbViolation> violations;
  SessionCheck check;
};

SessionVerdict check_one(Workspace & ws, const SessionDecl & s, const Options & opts)
{
  SessionVerdict v;
  const Mlts & m = ws.spec_for(s);
  if (ws.external) {
    v.violations = check_well_behaved(m);
    v.spec_ok = v.violations.empty() || opts.allow_unverified;
  }
  if (!v.spec_ok) return v;
  CheckOptions copts;
  copts.strict_var = opts.strict_var;
  v.check = type_session(m, ws.file.build_session(s), {}, copts);
  return v;
}

class Workbench
{
 public:
  Workbench(const Options & opts, std::ostream & out, std::ostream & err)
      : opts_(opts), out_(out), err_(err)
  {
  }

  int check()
  {
    bool all_ok = true;
    json files = json::array();
    for (const auto & path : opts_.inputs) {
      Workspace ws = load(path, opts_, err_);
      json jsessions = json::array();
      auto sessions = selected_sessions(ws, opts_);
      if (sessions.empty() && opts_.format == "text")
        out_ << path << ": no sessions to check\n";
      for (const auto * s : sessions) {
        auto v = check_one(ws, *s, opts_);
        const Mlts & m = ws.spec_for(*s);
        bool ok = v.spec_ok && v.check.ok();
        all_ok = all_ok && ok;
        if (opts_.format == "json") {
          json js;
          js["session"] = s->name;
          js["global"] = ws.external ? ws.external_path : s->global;
          js["wellTyped"] = ok;
          json roles = json::array();
          for (const auto & [role, d] : v.check.derivations) roles.push_back(role.name);
          js["roles"] = roles;
          js["wbViolations"] = json::parse(violations_to_json(m, v.violations));
          js["diagnostics"] = json::parse(errors_to_json(m, v.check.errors));
          jsessions.push_back(js);
          continue;
        }
        out_ << path << ": session " << s->name << " of "
             << (ws.external ? ws.external_path : s->global) << ": ";
        if (!v.spec_ok) {
          out_ << "specification is not well-behaved (use --allow-unverified to "
                  "check anyway)\n";
          for (const auto & w : v.violations)
            out_ << "  " << violation_to_string(m, w) << "\n";
          continue;
        }
        if (ok)
          out_ << v.check.derivations.size() << " roles well-typed\n";
        else
          out_ << "ill-typed\n";
        for (const auto & e : v.check.errors) out_ << "  " << error_to_string(m, e) << "\n";
        if (opts_.derivations)
          for (const auto & [role, d] : v.check.derivations)
            out_ << "derivation for " << role.name << ":\n" << render_derivation(m, *d);
      }
      if (opts_.format == "json")
        files.push_back(json{{"file", path}, {"sessions", jsessions}});
    }
    if (opts_.format == "json") out_ << files.dump(2) << "\n";
    return all_ok ? exit_ok : exit_fail;
  }

  int lts()
  {
    Workspace ws = load(opts_.inputs.at(0), opts_, err_);
    const GlobalDecl * g = nullptr;
    if (!opts_.global.empty())
      g = ws.file.find_global(opts_.global);
    else if (!ws.file.globals.empty())
      g = &ws.file.globals.front();
    if (!g)
      throw ToolError{opts_.global.empty() ? ws.path + " declares no global type"
                                           : "no global named " + opts_.global};
    GlobalLts lts = build_lts(g->type, opts_.state_cap);
    if (opts_.format == "dot")
      out_ << lts_to_dot(lts);
    else if (opts_.format == "json")
      out_ << lts_to_json(lts);
    else {
      out_ << g->name << ": " << lts.store.size() << " states, "
           << lts.graph.transitions().size() << " transitions\n";
      for (std::size_t i = 0; i < lts.store.size(); ++i)
        out_ << "  s" << i << " = " << to_string(lts.store[i]) << "\n";
      for (const auto & t : lts.graph.transitions())
        out_ << "  s" << t.from.value << " --" << to_string(t.action) << "--> s"
             << t.to.value << "\n";
    }
    return exit_ok;
  }

  int wb()
  {
    bool all_ok = true;
    json results = json::array();
    for (const auto & path : opts_.inputs) {
      std::vector<std::pair<std::string, Mlts>> targets;
      if (fs::path(path).extension() == ".json") {
        targets.emplace_back(path, load_mlts(path, err_));
      }
      else {
        Workspace ws = load(path, opts_, err_);
        for (const auto & g : ws.file.globals)
          targets.emplace_back(g.name, as_mlts(build_lts(g.type, opts_.state_cap)));
        if (ws.external) targets.emplace_back(ws.external_path, *ws.external);
      }
      for (const auto & [name, m] : targets) {
        auto violations = check_well_behaved(m);
        all_ok = all_ok && violations.empty();
        if (opts_.format == "json") {
          results.push_back(json{{"name", name},
                                 {"states", m.graph.num_states()},
                                 {"transitions", m.graph.transitions().size()},
                                 {"wellBehaved", violations.empty()},
                                 {"violations", json::parse(violations_to_json(m, violations))}});
          continue;
        }
        out_ << name << ": " << m.graph.num_states() << " states, "
             << m.graph.transitions().size() << " transitions, well-behaved: "
             << (violations.empty() ? "yes" : "no") << "\n";
        for (const auto & v : violations) out_ << "  " << violation_to_string(m, v) << "\n";
      }
    }
    if (opts_.format == "json") out_ << results.dump(2) << "\n";
    return all_ok ? exit_ok : exit_fail;
  }

  int simulate()
  {
    Workspace ws = load(opts_.inputs.at(0), opts_, err_);
    const SessionDecl & s = single_session(ws, opts_);
    Trace trace = run(ws.file.build_session(s), opts_.seed, opts_.max_steps);
    const Mlts & m = ws.spec_for(s);
    auto bad = check_trace(m, trace);
    if (opts_.format == "json") {
      out_ << trace_to_jsonl(trace);
    }
    else {
      out_ << trace_to_text(trace);
      if (is_final(trace.terminal))
        out_ << "terminated after " << trace.actions.size() << " steps\n";
      else if (session_step(trace.terminal).empty())
        out_ << "stuck after " << trace.actions.size() << " steps\n"
             << session_to_string(trace.terminal);
      else
        out_ << "stopped after " << trace.actions.size() << " steps\n";
    }
    if (bad) {
      err_ << "step " << *bad << " (" << to_string(trace.actions[*bad])
           << ") is not allowed by the specification\n";
      return exit_fail;
    }
    return exit_ok;
  }

  int explore_cmd()
  {
    Workspace ws = load(opts_.inputs.at(0), opts_, err_);
    bool all_ok = true;
    json results = json::array();
    for (const auto * s : selected_sessions(ws, opts_)) {
      const Mlts & m = ws.spec_for(*s);
      auto r = explore(m, ws.file.build_session(*s), opts_.max_depth);
      all_ok = all_ok && r.sound();
      if (opts_.format == "json") {
        json breaks = json::array();
        for (const auto & b : r.preservation_breaks)
          breaks.push_back({{"action", to_string(b.action)}, {"state", m.name(b.state)}});
        results.push_back(json{{"session", s->name},
                               {"configsVisited", r.configs_visited},
                               {"maxDepthReached", r.max_depth_reached},
                               {"truncated", r.truncated},
                               {"stuckNonFinal", r.stuck_non_final.size()},
                               {"tauCycles", r.tau_cycles.size()},
                               {"preservationBreaks", breaks},
                               {"sound", r.sound()}});
        continue;
      }
      out_ << "session " << s->name << ": " << r.configs_visited << " configurations, depth "
           << r.max_depth_reached << (r.truncated ? " (bounded)" : " (complete)") << "\n"
           << "  stuck: " << r.stuck_non_final.size()
           << ", tau cycles: " << r.tau_cycles.size()
           << ", preservation breaks: " << r.preservation_breaks.size() << "\n";
      for (const auto & st : r.stuck_non_final)
        out_ << "  stuck at " << m.name(st.state) << ":\n" << session_to_string(st.session);
      for (const auto & b : r.preservation_breaks)
        out_ << "  " << to_string(b.action) << " not allowed at " << m.name(b.state) << "\n";
      out_ << "  verdict: " << (r.sound() ? "sound" : "unsound")
           << (r.truncated ? " up to depth " + std::to_string(opts_.max_depth) : "") << "\n";
    }
    if (opts_.format == "json") out_ << results.dump(2) << "\n";
    return all_ok ? exit_ok : exit_fail;
  }

  int bench()
  {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    std::vector<fs::path> files;
    const std::string dir = opts_.inputs.at(0);
    if (!fs::is_directory(dir)) throw ToolError{dir + " is not a directory"};
    for (const auto & entry : fs::directory_iterator(dir))
      if (entry.is_regular_file() && entry.path().extension() == ".smpst")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    bool all_ok = true;
    json rows = json::array();
    if (opts_.format == "text")
      out_ << std::left << std::setw(28) << "file" << std::setw(16) << "session"
           << std::setw(8) << "states" << std::setw(7) << "wb" << std::setw(7) << "check"
           << std::setw(9) << "explore" << "ms\n";
    for (const auto & path : files) {
      Options file_opts = opts_;
      file_opts.mlts.clear();
      Workspace ws = load(path.string(), file_opts, err_);
      for (const auto & s : ws.file.sessions) {
        const auto t0 = clock::now();
        const Mlts & m = ws.spec_for(s);
        bool wb_ok = check_well_behaved(m).empty();
        auto typed = type_session(m, ws.file.build_session(s));
        auto r = explore(m, ws.file.build_session(s), opts_.max_depth);
        const double ms =
            std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        bool ok = wb_ok && typed.ok() && r.sound();
        all_ok = all_ok && ok;
        if (opts_.format == "json") {
          rows.push_back(json{{"file", path.filename().string()},
                              {"session", s.name},
                              {"states", m.graph.num_states()},
                              {"wellBehaved", wb_ok},
                              {"wellTyped", typed.ok()},
                              {"exploreSound", r.sound()},
                              {"pass", ok}});
          continue;
        }
        std::ostringstream time;
        time << std::fixed << std::setprecision(1) << ms;
        out_ << std::left << std::setw(28) << path.filename().string() << std::setw(16)
             << s.name << std::setw(8) << m.graph.num_states() << std::setw(7)
             << (wb_ok ? "pass" : "FAIL") << std::setw(7) << (typed.ok() ? "pass" : "FAIL")
             << std::setw(9) << (r.sound() ? "pass" : "FAIL") << time.str() << "\n";
        for (const auto & e : typed.errors) out_ << "  " << error_to_string(m, e) << "\n";
      }
    }
    if (opts_.format == "json") {
      out_ << rows.dump(2) << "\n";
    }
    else {
      const double total =
          std::chrono::duration<double, std::milli>(clock::now() - start).count();
      out_ << (all_ok ? "all rows pass" : "some rows FAIL") << " (" << std::fixed
           << std::setprecision(1) << total << " ms)\n";
    }
    return all_ok ? exit_ok : exit_fail;
  }

 private:
  const Options & opts_;
  std::ostream & out_;
  std::ostream & err_;
};

}  // namespace

int run_cli(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Type checking and execution of multiparty protocols against their "
               "global specification"};
  app.require_subcommand(1);
  Options opts;
  opts.state_cap = default_cap_from_env();

  auto add_common = [&](CLI::App * cmd) {
    cmd->add_option("--state-cap", opts.state_cap,
                    "maximum number of LTS states (env SYNMPST_STATE_CAP)")
        ->check(CLI::PositiveNumber);
  };
  auto add_format = [&](CLI::App * cmd, std::vector<std::string> formats) {
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember(formats));
  };

  auto * check = app.add_subcommand("check", "type-check the sessions of protocol files");
  check->add_option("files", opts.inputs, "protocol files")->required()->check(CLI::ExistingFile);
  check->add_option("--mlts", opts.mlts, "check against an MLTS in JSON instead of the "
                                         "declared global type")
      ->check(CLI::ExistingFile);
  check->add_flag("--allow-unverified", opts.allow_unverified,
                  "check against an MLTS even if it is not well-behaved");
  check->add_option("--session", opts.session, "only check this session");
  check->add_flag("--strict-var", opts.strict_var,
                  "require recursion to return to exactly the state of its binder");
  check->add_flag("--derivations", opts.derivations, "print typing derivations");
  add_common(check);
  add_format(check, {"text", "json"});

  auto * lts = app.add_subcommand("lts", "print the LTS of a global type");
  lts->add_option("file", opts.inputs, "protocol file")->required()->expected(1)
      ->check(CLI::ExistingFile);
  lts->add_option("--global", opts.global, "global type to print (default: first)");
  add_common(lts);
  add_format(lts, {"text", "json", "dot"});

  auto * wb = app.add_subcommand("wb", "check that LTSs are well-behaved");
  wb->add_option("files", opts.inputs, "protocol files or MLTS JSON files")
      ->required()->check(CLI::ExistingFile);
  add_common(wb);
  add_format(wb, {"text", "json"});

  auto * sim = app.add_subcommand("simulate", "run a session with a seeded scheduler");
  sim->add_option("file", opts.inputs, "protocol file")->required()->expected(1)
      ->check(CLI::ExistingFile);
  sim->add_option("--session", opts.session, "session to run (default: first)");
  sim->add_option("--seed", opts.seed, "scheduler seed");
  sim->add_option("--max-steps", opts.max_steps, "step bound");
  sim->add_option("--mlts", opts.mlts, "MLTS to validate the trace against")
      ->check(CLI::ExistingFile);
  add_common(sim);
  add_format(sim, {"text", "json"});

  auto * exp = app.add_subcommand("explore", "exhaustively execute sessions");
  exp->add_option("file", opts.inputs, "protocol file")->required()->expected(1)
      ->check(CLI::ExistingFile);
  exp->add_option("--session", opts.session, "only explore this session");
  exp->add_option("--max-depth", opts.max_depth, "depth bound");
  exp->add_option("--mlts", opts.mlts, "MLTS to pair the session with")
      ->check(CLI::ExistingFile);
  add_common(exp);
  add_format(exp, {"text", "json"});

  auto * bench = app.add_subcommand("bench", "check, verify and explore every protocol "
                                             "file in a directory");
  bench->add_option("dir", opts.inputs, "corpus directory")->required()->expected(1);
  bench->add_option("--max-depth", opts.max_depth, "depth bound for exploration");
  add_common(bench);
  add_format(bench, {"text", "json"});

  try {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError & e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_error;
  }

  Workbench wbench(opts, out, err);
  try {
    if (*check) return wbench.check();
    if (*lts) return wbench.lts();
    if (*wb) return wbench.wb();
    if (*sim) return wbench.simulate();
    if (*exp) return wbench.explore_cmd();
    if (*bench) return wbench.bench();
  }
  catch (const ToolError & e) {
    err << "error: " << e.message << "\n";
    return exit_error;
  }
  catch (const StateCapExceeded & e) {
    err << "error: " << e.what() << " (raise it with --state-cap)\n";
    return exit_error;
  }
  return exit_error;
}

}  // namespace synmpst
