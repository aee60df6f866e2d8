#pragma once

#include <string>
#include <vector>

#include "alm/lpcore.hpp"
#include "alm/model.hpp"
#include "alm/semantics.hpp"

namespace alm {

struct Observation {
  Term fluent;  // f(t...)
  Term value;
  int step = 0;
  Span span;
};

struct Happening {
  Term action;
  int step = 0;  // -1: every step
  bool negated = false;
  Span span;
};

struct History {
  int horizon = 0;
  std::vector<Observation> observed;
  std::vector<Happening> happened;
};

// Facts `observed(f(t), v, i).`, `happened(a, i).` and `-happened(a, i).`; `%` starts a comment.
History parse_history(const std::string& src, const std::string& origin);
History load_history(const std::string& path);

// One literal per line: `f(t)`, `-f(t)`, `f(t) = v` or `f(t) != v`.
std::vector<Literal> parse_goal(const std::string& src, const std::string& origin);
std::vector<Literal> load_goal(const std::string& path);

// A fluent literal resolved over a pre-model; `neq` means f(t) != value.
struct GroundLiteral {
  FluentLit lit;
  bool neq = false;
};

GroundLiteral resolve_literal(const Literal& l, const PreModel& m);
bool holds(const GroundLiteral& g, const PreModel& m, const State& s);
std::string literal_text(const PreModel& m, const GroundLiteral& g);

struct Trajectory {
  std::vector<State> states;                // sigma_0 .. sigma_n
  std::vector<std::vector<int>> actions;    // a_0 .. a_{n-1}
  bool operator==(const Trajectory&) const = default;
};

// Basic fluent tuples without an observation at step 0, as text.
std::vector<std::string> missing_initial(const BasicActionTheory& bat, const PreModel& m, const History& h);

struct TaskOptions {
  // Unobserved boolean basic fluents default to false at step 0.
  bool close_initial_booleans = false;
};

// P_M with the history's module added; the step sort ranges over 0..n.
std::unique_ptr<ProgramBuilder> build_projection_program(const BasicActionTheory& bat, const PreModel& m,
                                                         const History& h, int horizon, const TaskOptions& opt,
                                                         size_t* history_rules = nullptr);

struct ProjectionResult {
  std::vector<Trajectory> trajectories;
  std::vector<std::string> missing;  // empty when the initial situation is complete
  bool verified = false;             // transitions re-checked against the diagram
};

ProjectionResult temporal_project(const BasicActionTheory& bat, const PreModel& m, const History& h,
                                  Budget& budget, const TaskOptions& opt = {});

// Does the literal hold at `step` in every trajectory?
bool entails_at(const std::vector<Trajectory>& models, const PreModel& m, const GroundLiteral& l, int step);

using Plan = std::vector<std::vector<int>>;  // action set per step

struct PlanOptions {
  int horizon = 0;
  CrMinimality minimality = CrMinimality::Cardinality;
  ActionSets action_sets = ActionSets::Singletons;
  bool most_specific = false;
  TaskOptions task;
};

struct PlanResult {
  std::vector<Plan> plans;
  std::vector<std::string> missing;
  std::vector<char> valid;  // per plan: re-executed from the history, reaches the goal
  std::string note;
};

// Pi_pl: the projection program with goal rules and the planning module.
std::unique_ptr<ProgramBuilder> build_planning_program(const BasicActionTheory& bat, const PreModel& m,
                                                       const History& h, const std::vector<GroundLiteral>& goal,
                                                       const PlanOptions& opt);

PlanResult plan(const BasicActionTheory& bat, const PreModel& m, const History& h, const std::vector<Literal>& goal,
                const PlanOptions& opt, Budget& budget);

// Drops plans that differ from another plan only by using less specific actions.
std::vector<Plan> most_specific_plans(const std::vector<Plan>& plans, const PreModel& m);

std::vector<std::string> plan_lines(const PreModel& m, const Plan& p);
std::vector<std::string> trajectory_lines(const PreModel& m, const Trajectory& t);

}  // namespace alm
