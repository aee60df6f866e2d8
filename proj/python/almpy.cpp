#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "alm/modular.hpp"
#include "alm/semantics.hpp"
#include "alm/tasks.hpp"

namespace py = pybind11;
using namespace alm;

namespace {

const char* kind_text(Diagnostic::Kind k) {
  switch (k) {
    case Diagnostic::Kind::Input: return "input";
    case Diagnostic::Kind::Semantic: return "semantic";
    case Diagnostic::Kind::Budget: return "budget";
  }
  return "semantic";
}

Budget make_budget(long long nodes, double seconds) {
  Budget b;
  b.max_nodes = nodes;
  b.max_seconds = seconds;
  return b;
}

// A loaded system description with its pre-models.
class PySystem {
 public:
  PySystem(const std::string& path, const std::vector<std::string>& lib, long long nodes, double seconds)
      : sys_(std::make_unique<System>(load_system_file(path, LoadOptions{lib}))) {
    Budget b = make_budget(nodes, seconds);
    pms_ = enumerate_premodels(sys_->bat, sys_->structure, b);
  }

  std::string name() const { return sys_->name; }
  size_t model_count() const { return pms_.models.size(); }
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& m : pms_.models) out.push_back(m.label);
    return out;
  }
  std::vector<std::string> warnings() const { return sys_->bat.warnings; }

  std::vector<std::vector<std::string>> states(size_t model, long long nodes, double seconds) const {
    const PreModel& m = at(model);
    Budget b = make_budget(nodes, seconds);
    std::vector<std::vector<std::string>> out;
    for (const auto& s : enumerate_states(sys_->bat, m, b).states) out.push_back(state_lines(m, s));
    return out;
  }

  py::list transitions(size_t model, bool powerset, long long nodes, double seconds) const {
    const PreModel& m = at(model);
    Budget b = make_budget(nodes, seconds);
    TransitionDiagram d = build_model(sys_->bat, m, powerset ? ActionSets::Powerset : ActionSets::Singletons, b);
    py::list out;
    for (const auto& t : d.transitions) out.append(py::make_tuple(t.from, names(m, t.actions), t.to));
    return out;
  }

  std::string well_founded(long long nodes) const {
    Budget b = make_budget(nodes, 0);
    return well_founded_name(check_well_founded(sys_->bat, pms_.models, b).verdict);
  }

  py::list project(const std::string& history, size_t model, bool close_initial) const {
    const PreModel& m = at(model);
    History h = parse_history(history, "<history>");
    Budget b;
    ProjectionResult r = temporal_project(sys_->bat, m, h, b, TaskOptions{close_initial});
    py::list out;
    for (const auto& t : r.trajectories) {
      py::list states, actions;
      for (const auto& s : t.states) states.append(state_lines(m, s));
      for (const auto& a : t.actions) actions.append(names(m, a));
      py::dict d;
      d["states"] = states;
      d["actions"] = actions;
      out.append(d);
    }
    return out;
  }

  bool entails(const std::string& history, const std::string& literal, int step, size_t model) const {
    const PreModel& m = at(model);
    History h = parse_history(history, "<history>");
    Budget b;
    ProjectionResult r = temporal_project(sys_->bat, m, h, b);
    return !r.trajectories.empty() && entails_at(r.trajectories, m, resolve_literal(parse_literal(literal), m), step);
  }

  std::vector<std::vector<std::vector<std::string>>> plan(const std::string& goal, int horizon,
                                                          const std::string& history, size_t model,
                                                          bool close_initial, bool most_specific) const {
    const PreModel& m = at(model);
    History h = history.empty() ? History{} : parse_history(history, "<history>");
    PlanOptions po;
    po.horizon = horizon;
    po.most_specific = most_specific;
    po.task.close_initial_booleans = close_initial;
    Budget b;
    PlanResult r = alm::plan(sys_->bat, m, h, parse_goal(goal, "<goal>"), po, b);
    std::vector<std::vector<std::vector<std::string>>> out;
    for (const auto& p : r.plans) {
      std::vector<std::vector<std::string>> steps;
      for (const auto& s : p) steps.push_back(names(m, s));
      out.push_back(steps);
    }
    return out;
  }

 private:
  const PreModel& at(size_t i) const {
    if (i >= pms_.models.size()) throw py::index_error("no pre-model " + std::to_string(i));
    return pms_.models[i];
  }
  static std::vector<std::string> names(const PreModel& m, const std::vector<int>& ids) {
    std::vector<std::string> out;
    for (int a : ids) out.push_back(m.syms->str(a));
    return out;
  }

  std::unique_ptr<System> sys_;
  PreModelSet pms_;
};

std::string flatten_file(const std::string& path, const std::vector<std::string>& lib) {
  SourceFile f = parse_path(path);
  Theory t = resolve_imports(f.is_system() ? f.system().theory : f.theory(), library_search_path(lib));
  Theory out;
  out.name = "flat_" + t.name;
  Module m = flatten(t);
  m.name = out.name;
  out.items.push_back(m);
  return print(out);
}

}  // namespace

PYBIND11_MODULE(almpy, mod) {
  mod.doc() = "Compiler and reasoner for the modular action language ALM";

  static py::exception<Diagnostic> error(mod, "AlmError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Diagnostic& d) {
      py::object e = py::reinterpret_borrow<py::object>(error.ptr())(py::str(d.what()));
      e.attr("kind") = kind_text(d.kind());
      e.attr("line") = d.span().line;
      e.attr("col") = d.span().col;
      e.attr("message") = d.message();
      PyErr_SetObject(error.ptr(), e.ptr());
    }
  });

  mod.def("check_text", [](const std::string& text) { parse_file(text, "<text>"); },
          "Parses source text; raises AlmError on the first problem.", py::arg("text"));
  mod.def("format_text", [](const std::string& text) { return print(parse_file(text, "<text>")); },
          "Parses and pretty-prints source text.", py::arg("text"));
  mod.def("flatten", &flatten_file, "Flattened theory of a file as source text.", py::arg("path"),
          py::arg("lib") = std::vector<std::string>{});

  py::class_<PySystem>(mod, "System")
      .def(py::init<const std::string&, const std::vector<std::string>&, long long, double>(), py::arg("path"),
           py::arg("lib") = std::vector<std::string>{}, py::arg("budget_nodes") = 0, py::arg("budget_seconds") = 0.0)
      .def_property_readonly("name", &PySystem::name)
      .def_property_readonly("model_count", &PySystem::model_count)
      .def_property_readonly("labels", &PySystem::labels)
      .def_property_readonly("warnings", &PySystem::warnings)
      .def("states", &PySystem::states, py::arg("model") = 0, py::arg("budget_nodes") = 0,
           py::arg("budget_seconds") = 0.0)
      .def("transitions", &PySystem::transitions, py::arg("model") = 0, py::arg("powerset") = false,
           py::arg("budget_nodes") = 0, py::arg("budget_seconds") = 0.0)
      .def("well_founded", &PySystem::well_founded, py::arg("budget_nodes") = 200000)
      .def("project", &PySystem::project, py::arg("history"), py::arg("model") = 0, py::arg("close_initial") = false)
      .def("entails", &PySystem::entails, py::arg("history"), py::arg("literal"), py::arg("step"),
           py::arg("model") = 0)
      .def("plan", &PySystem::plan, py::arg("goal"), py::arg("horizon"), py::arg("history") = "",
           py::arg("model") = 0, py::arg("close_initial") = false, py::arg("most_specific") = false);
}
