#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "alm/bat.hpp"
#include "alm/lpcore.hpp"
#include "alm/modular.hpp"
#include "alm/semantics.hpp"
#include "alm/syntax.hpp"
#include "alm/tasks.hpp"

using namespace alm;
using json = nlohmann::ordered_json;

namespace {

struct Config {
  std::vector<std::string> files;
  std::vector<std::string> lib;
  int horizon = -1;
  long long budget_nodes = 0;
  double budget_seconds = 0;
  std::string action_sets = "singleton";
  std::string cr_min = "card";
  bool json_lines = false;
  int jobs = 1;
  std::string history, goal, query;
  int at = -1;
  bool close_initial = false;
  bool most_specific = false;
  long long natural_bound = kDefaultNaturalBound;
};

Budget make_budget(const Config& c) {
  Budget b;
  b.max_nodes = c.budget_nodes;
  b.max_seconds = c.budget_seconds;
  return b;
}

LoadOptions load_options(const Config& c) {
  LoadOptions o;
  o.lib_dirs = c.lib;
  o.natural_bound = c.natural_bound;
  return o;
}

std::string header(const PreModel& m, size_t i, size_t n) {
  if (n <= 1 && m.label.empty()) return "";
  std::string s = "% model " + std::to_string(i + 1);
  if (!m.label.empty()) s += ": " + m.label;
  return s + "\n";
}

// Runs `work` for each pre-model on up to `jobs` threads and prints results in order.
void for_models(const std::vector<PreModel>& models, const Config& c,
                const std::function<std::string(const PreModel&, size_t, Budget&)>& work) {
  std::vector<std::string> out(models.size());
  std::vector<std::exception_ptr> err(models.size());
  auto run = [&](size_t i) {
    try {
      Budget b = make_budget(c);
      out[i] = work(models[i], i, b);
    } catch (...) {
      err[i] = std::current_exception();
    }
  };
  size_t jobs = std::max(1, c.jobs);
  if (jobs == 1 || models.size() <= 1) {
    for (size_t i = 0; i < models.size(); ++i) run(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (size_t t = 0; t < std::min(jobs, models.size()); ++t)
      pool.emplace_back([&] {
        for (size_t i; (i = next++) < models.size();) run(i);
      });
    for (auto& t : pool) t.join();
  }
  for (size_t i = 0; i < models.size(); ++i) {
    if (err[i]) std::rethrow_exception(err[i]);
    std::cout << out[i];
  }
}

struct Loaded {
  System sys;
  PreModelSet pms;
};

Loaded load(const Config& c) {
  Loaded l;
  l.sys = load_system_file(c.files.at(0), load_options(c));
  Budget b = make_budget(c);
  l.pms = enumerate_premodels(l.sys.bat, l.sys.structure, b);
  for (const auto& w : l.sys.bat.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& p : l.pms.pruned) std::cerr << "note: " << p << "\n";
  if (l.pms.models.empty()) std::cerr << "note: the system description has no pre-model\n";
  return l;
}

json lines_json(const std::vector<std::string>& v) { return json(v); }

std::vector<std::string> action_names(const PreModel& m, const std::vector<int>& acts) {
  std::vector<std::string> out;
  for (int a : acts) out.push_back(m.syms->str(a));
  return out;
}

void note_missing(std::ostringstream& os, const std::vector<std::string>& missing, bool json_lines) {
  if (missing.empty() || json_lines) return;
  os << "% initial situation incomplete: " << missing.size() << " basic fluent value(s) unobserved at step 0 (";
  for (size_t i = 0; i < missing.size() && i < 3; ++i) os << (i ? ", " : "") << missing[i];
  os << (missing.size() > 3 ? ", ...)" : ")") << "\n";
}

// ---------------------------------------------------------------- commands

int cmd_check(const Config& c) {
  for (const auto& f : c.files) {
    SourceFile src = parse_path(f);
    if (!src.is_system()) {
      Theory t = resolve_imports(src.theory(), library_search_path(c.lib));
      BasicActionTheory bat = assemble_bat(flatten(t), c.natural_bound);
      for (const auto& w : bat.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << f << ": ok (theory " << t.name << ", " << bat.statements.size() << " statements)\n";
      continue;
    }
    Config one = c;
    one.files = {f};
    Loaded l = load(one);
    Budget b = make_budget(c);
    if (b.max_nodes == 0) b.max_nodes = 200000;
    WellFoundedReport wf = check_well_founded(l.sys.bat, l.pms.models, b);
    std::cout << f << ": ok (" << l.pms.models.size() << " pre-model(s); " << well_founded_name(wf.verdict) << ": "
              << wf.detail << ")\n";
  }
  return 0;
}

Theory flat_theory(const Config& c) {
  SourceFile src = parse_path(c.files.at(0));
  std::vector<std::string> path = library_search_path(c.lib);
  auto dir = std::filesystem::path(c.files[0]).parent_path();
  path.push_back(dir.empty() ? "." : dir.string());
  Theory t = resolve_imports(src.is_system() ? src.system().theory : src.theory(), path);
  Module m = flatten(t);
  m.name = "flat_" + (t.name.empty() ? std::string("theory") : t.name);
  Theory out;
  out.name = m.name;
  out.items.push_back(m);
  return out;
}

int cmd_flatten(const Config& c) {
  std::cout << print(flat_theory(c));
  return 0;
}

int cmd_bat(const Config& c) {
  Theory t = flat_theory(c);
  BasicActionTheory bat = assemble_bat(std::get<Module>(t.items[0]), c.natural_bound);
  std::cout << print(bat);
  return 0;
}

int cmd_hierarchy(const Config& c) {
  Loaded l = load(c);
  for (size_t i = 0; i < l.pms.models.size(); ++i) {
    const PreModel& m = l.pms.models[i];
    if (c.json_lines) {
      json j;
      j["model"] = i + 1;
      j["placement"] = m.label;
      j["facts"] = m.hierarchy_dump();
      j["statics"] = m.statics_dump();
      std::cout << j.dump() << "\n";
      continue;
    }
    std::cout << header(m, i, l.pms.models.size());
    for (const auto& s : m.hierarchy_dump()) std::cout << s << "\n";
    for (const auto& s : m.statics_dump()) std::cout << s << ".\n";
  }
  return 0;
}

int cmd_states(const Config& c) {
  Loaded l = load(c);
  size_t n = l.pms.models.size();
  for_models(l.pms.models, c, [&](const PreModel& m, size_t i, Budget& b) {
    std::ostringstream os;
    StateSearch s = enumerate_states(l.sys.bat, m, b);
    if (!c.json_lines) os << header(m, i, n);
    for (size_t k = 0; k < s.states.size(); ++k) {
      if (c.json_lines) {
        json j;
        j["model"] = i + 1;
        j["state"] = k + 1;
        j["literals"] = state_lines(m, s.states[k]);
        os << j.dump() << "\n";
        continue;
      }
      os << "sigma_" << k + 1 << ":\n";
      for (const auto& line : state_lines(m, s.states[k])) os << "  " << line << "\n";
    }
    if (!c.json_lines) {
      os << "% " << s.states.size() << " state(s)";
      if (s.ambiguous) os << "; " << s.ambiguous << " interpretation(s) with several answer sets";
      os << "\n";
    }
    return os.str();
  });
  return 0;
}

int cmd_transitions(const Config& c) {
  Loaded l = load(c);
  size_t n = l.pms.models.size();
  ActionSets mode = c.action_sets == "powerset" ? ActionSets::Powerset : ActionSets::Singletons;
  for_models(l.pms.models, c, [&](const PreModel& m, size_t i, Budget& b) {
    std::ostringstream os;
    TransitionDiagram d = build_model(l.sys.bat, m, mode, b);
    if (c.json_lines) {
      for (size_t k = 0; k < d.states.size(); ++k) {
        json j;
        j["model"] = i + 1;
        j["state"] = k + 1;
        j["literals"] = state_lines(m, d.states[k]);
        os << j.dump() << "\n";
      }
      for (const auto& t : d.transitions) {
        json j;
        j["model"] = i + 1;
        j["from"] = t.from + 1;
        j["actions"] = action_names(m, t.actions);
        j["to"] = t.to + 1;
        os << j.dump() << "\n";
      }
      return os.str();
    }
    os << header(m, i, n);
    if (!d.is_model()) os << "% not a model: no states\n";
    for (const auto& line : diagram_lines(d)) os << line << "\n";
    return os.str();
  });
  return 0;
}

int cmd_project(const Config& c) {
  if (c.history.empty()) throw CLI::ValidationError("--history", "required");
  Loaded l = load(c);
  History h = load_history(c.history);
  if (c.horizon >= 0) {
    if (c.horizon < h.horizon) throw CLI::ValidationError("--horizon", "shorter than the history");
    h.horizon = c.horizon;
  }
  size_t n = l.pms.models.size();
  TaskOptions opt{c.close_initial};
  for_models(l.pms.models, c, [&](const PreModel& m, size_t i, Budget& b) {
    std::ostringstream os;
    ProjectionResult r = temporal_project(l.sys.bat, m, h, b, opt);
    if (!c.json_lines) os << header(m, i, n);
    note_missing(os, r.missing, c.json_lines);
    for (size_t k = 0; k < r.trajectories.size(); ++k) {
      const Trajectory& t = r.trajectories[k];
      if (c.json_lines) {
        json j;
        j["model"] = i + 1;
        j["trajectory"] = k + 1;
        json steps = json::array();
        for (size_t s = 0; s < t.states.size(); ++s) {
          json st;
          st["state"] = state_lines(m, t.states[s]);
          if (s < t.actions.size()) st["actions"] = action_names(m, t.actions[s]);
          steps.push_back(st);
        }
        j["steps"] = steps;
        j["verified"] = r.verified;
        os << j.dump() << "\n";
        continue;
      }
      os << "% trajectory " << k + 1 << "\n";
      for (const auto& line : trajectory_lines(m, t)) os << line << "\n";
    }
    if (r.trajectories.empty() && !c.json_lines) os << "% no model: the history is inconsistent\n";
    if (!c.query.empty()) {
      GroundLiteral g = resolve_literal(parse_literal(c.query, "--query"), m);
      int at = c.at >= 0 ? c.at : h.horizon;
      bool yes = !r.trajectories.empty() && entails_at(r.trajectories, m, g, at);
      if (c.json_lines) {
        json j;
        j["model"] = i + 1;
        j["query"] = literal_text(m, g);
        j["step"] = at;
        j["entailed"] = yes;
        os << j.dump() << "\n";
      } else {
        os << "% " << literal_text(m, g) << " at step " << at << ": " << (yes ? "entailed" : "not entailed") << "\n";
      }
    }
    return os.str();
  });
  return 0;
}

PlanOptions plan_options(const Config& c) {
  PlanOptions po;
  po.horizon = c.horizon < 0 ? 0 : c.horizon;
  po.minimality = c.cr_min == "set" ? CrMinimality::Subset : CrMinimality::Cardinality;
  po.action_sets = c.action_sets == "powerset" ? ActionSets::Powerset : ActionSets::Singletons;
  po.most_specific = c.most_specific;
  po.task.close_initial_booleans = c.close_initial;
  return po;
}

int cmd_plan(const Config& c) {
  if (c.goal.empty()) throw CLI::ValidationError("--goal", "required");
  if (c.horizon < 0) throw CLI::ValidationError("--horizon", "required");
  Loaded l = load(c);
  History h = c.history.empty() ? History{} : load_history(c.history);
  std::vector<Literal> goal = load_goal(c.goal);
  PlanOptions po = plan_options(c);
  size_t n = l.pms.models.size();
  for_models(l.pms.models, c, [&](const PreModel& m, size_t i, Budget& b) {
    std::ostringstream os;
    PlanResult r = plan(l.sys.bat, m, h, goal, po, b);
    if (!c.json_lines) os << header(m, i, n);
    note_missing(os, r.missing, c.json_lines);
    for (size_t k = 0; k < r.plans.size(); ++k) {
      if (c.json_lines) {
        json j;
        j["model"] = i + 1;
        j["plan"] = k + 1;
        json steps = json::array();
        for (const auto& s : r.plans[k]) steps.push_back(action_names(m, s));
        j["steps"] = steps;
        j["valid"] = (bool)r.valid[k];
        os << j.dump() << "\n";
        continue;
      }
      os << "% plan " << k + 1 << (r.valid[k] ? "" : " (re-execution did not reach the goal)") << "\n";
      for (const auto& line : plan_lines(m, r.plans[k])) os << line << "\n";
    }
    if (!r.note.empty()) {
      if (c.json_lines) {
        json j;
        j["model"] = i + 1;
        j["note"] = r.note;
        os << j.dump() << "\n";
      } else {
        os << "% " << r.note << "\n";
      }
    }
    return os.str();
  });
  return 0;
}

int cmd_emit_asp(const Config& c) {
  Loaded l = load(c);
  size_t n = l.pms.models.size();
  for_models(l.pms.models, c, [&](const PreModel& m, size_t i, Budget&) {
    std::ostringstream os;
    os << header(m, i, n);
    std::unique_ptr<ProgramBuilder> pb;
    if (!c.goal.empty()) {
      History h = c.history.empty() ? History{} : load_history(c.history);
      std::vector<GroundLiteral> g;
      for (const auto& lit : load_goal(c.goal)) g.push_back(resolve_literal(lit, m));
      pb = build_planning_program(l.sys.bat, m, h, g, plan_options(c));
    } else if (!c.history.empty()) {
      History h = load_history(c.history);
      int hz = std::max(h.horizon, c.horizon);
      pb = build_projection_program(l.sys.bat, m, h, hz, TaskOptions{c.close_initial});
      pb->finish();
    } else {
      pb = build_P_M(l.sys.bat, m, c.horizon < 0 ? 1 : c.horizon, GroundMode::Faithful);
      pb->finish();
    }
    os << export_text(pb->prog);
    return os.str();
  });
  return 0;
}

int exit_code(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::Input: return 2;
    case Diagnostic::Kind::Semantic: return 3;
    case Diagnostic::Kind::Budget: return 4;
  }
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compiler and reasoner for the modular action language ALM"};
  app.require_subcommand(1);
  Config c;

  auto common = [&](CLI::App* s, bool many_files = false) {
    if (many_files) s->add_option("files", c.files, "ALM source files")->required();
    else s->add_option("file", c.files, "ALM source file")->required()->expected(1);
    s->add_option("--lib", c.lib, "library directory (repeatable)");
    s->add_option("--budget-nodes", c.budget_nodes, "search node limit (0: none)")->check(CLI::NonNegativeNumber);
    s->add_option("--budget-seconds", c.budget_seconds, "time limit in seconds (0: none)")->check(CLI::NonNegativeNumber);
    s->add_option("--natural-bound", c.natural_bound, "largest natural number")->check(CLI::NonNegativeNumber);
    s->add_flag("--json-lines", c.json_lines, "one JSON record per line");
    s->add_option("--jobs", c.jobs, "worker threads over pre-models")->check(CLI::PositiveNumber);
  };
  auto task_opts = [&](CLI::App* s) {
    s->add_option("--history", c.history, "history file");
    s->add_option("--horizon", c.horizon, "number of steps")->check(CLI::NonNegativeNumber);
    s->add_flag("--close-initial", c.close_initial, "unobserved boolean fluents are false at step 0");
  };
  auto sets_opt = [&](CLI::App* s) {
    s->add_option("--action-sets", c.action_sets, "singleton or powerset")
        ->check(CLI::IsMember({"singleton", "powerset"}));
  };

  auto* check = app.add_subcommand("check", "parse, check coherence and validate");
  common(check, true);
  auto* flat = app.add_subcommand("flatten", "print the flattened theory");
  common(flat);
  auto* hier = app.add_subcommand("hierarchy", "print sort links, placements and statics of each pre-model");
  common(hier);
  auto* batc = app.add_subcommand("bat", "print the basic action theory");
  common(batc);
  auto* states = app.add_subcommand("states", "enumerate the states of each model");
  common(states);
  auto* trans = app.add_subcommand("transitions", "print each transition diagram");
  common(trans);
  sets_opt(trans);
  auto* proj = app.add_subcommand("project", "temporal projection of a history");
  common(proj);
  task_opts(proj);
  proj->add_option("--query", c.query, "literal to test, e.g. loc_in(monkey)=initial_box");
  proj->add_option("--at", c.at, "step of the query (default: last)");
  auto* pl = app.add_subcommand("plan", "minimal plans for a goal");
  common(pl);
  task_opts(pl);
  sets_opt(pl);
  pl->add_option("--goal", c.goal, "goal file");
  pl->add_option("--cr-min", c.cr_min, "card or set")->check(CLI::IsMember({"card", "set"}));
  pl->add_flag("--most-specific", c.most_specific, "keep only plans with the most specific actions");
  auto* asp = app.add_subcommand("emit-asp", "export the ground program");
  common(asp);
  task_opts(asp);
  sets_opt(asp);
  asp->add_option("--goal", c.goal, "goal file (exports the planning program)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  if (const char* env = std::getenv("ALM_JOBS"); env && c.jobs == 1) c.jobs = std::max(1, std::atoi(env));

  try {
    if (check->parsed()) return cmd_check(c);
    if (flat->parsed()) return cmd_flatten(c);
    if (hier->parsed()) return cmd_hierarchy(c);
    if (batc->parsed()) return cmd_bat(c);
    if (states->parsed()) return cmd_states(c);
    if (trans->parsed()) return cmd_transitions(c);
    if (proj->parsed()) return cmd_project(c);
    if (pl->parsed()) return cmd_plan(c);
    if (asp->parsed()) return cmd_emit_asp(c);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Diagnostic& d) {
    std::cerr << "error: " << d.what() << "\n";
    return exit_code(d.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
