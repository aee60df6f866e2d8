#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alm/bat.hpp"
#include "alm/lpcore.hpp"
#include "alm/model.hpp"
#include "alm/modular.hpp"

namespace alm {

// Reduced grounding evaluates every static against the pre-model. Faithful
// grounding keeps statics as atoms with facts and closed-world rules, so the
// program is the one written out literally.
enum class GroundMode { Reduced, Faithful };

struct ProgramStats {
  size_t axiom_rules = 0;  // ground instances of axioms
  size_t cwa_rules = 0;
  size_t facts = 0;
  size_t inertia_rules = 0;
};

// A fluent literal f(args)=value. Strong negation is the value false.
struct FluentLit {
  std::string fn;
  std::vector<int> args;
  int value = -1;
  auto operator<=>(const FluentLit&) const = default;
};

// The fluent part of an interpretation, sorted.
using State = std::vector<FluentLit>;

std::string lit_text(const PreModel& m, const FluentLit& l);
std::vector<std::string> state_lines(const PreModel& m, const State& s);

// Does f get a step argument in P_M?
bool timed(const Function& f);

std::unique_ptr<ProgramBuilder> build_S_M(const BasicActionTheory& bat, const PreModel& m, GroundMode mode,
                                          ProgramStats* stats = nullptr);
std::unique_ptr<ProgramBuilder> build_P_M(const BasicActionTheory& bat, const PreModel& m, int horizon,
                                          GroundMode mode, ProgramStats* stats = nullptr);

// Fluent atoms of an answer set at `step` (-1: untimed atoms of S_M).
State project_state(const ProgramBuilder& pb, const AnswerSet& a, int step);

struct StateSearch {
  std::vector<State> states;
  size_t ambiguous = 0;  // basic parts whose program has several answer sets
};

StateSearch enumerate_states(const BasicActionTheory& bat, const PreModel& m, Budget& budget,
                            GroundMode mode = GroundMode::Reduced);

struct Transition {
  int from = -1;
  std::vector<int> actions;  // sorted symbol ids
  int to = -1;
};

enum class ActionSets { Singletons, Powerset };

struct TransitionDiagram {
  const PreModel* model = nullptr;
  std::vector<State> states;  // stable numbering: sorted
  std::vector<Transition> transitions;
  bool is_model() const { return !states.empty(); }
};

// Computes transitions from states over one pre-model with P_M of horizon 1.
class TransitionSystem {
 public:
  TransitionSystem(const BasicActionTheory& bat, const PreModel& m);
  const std::vector<State>& states(Budget& budget);
  // Distinct successor states of s0 under the action set.
  std::vector<State> successors(const State& s0, const std::vector<int>& actions, Budget& budget);
  // Is s the unique answer set of S_M extended with its basic part?
  bool is_state(const State& s, Budget& budget);
  std::vector<int> actions() const;  // M(actions)
  const PreModel& model() const { return m_; }

 private:
  const BasicActionTheory& bat_;
  const PreModel& m_;
  std::unique_ptr<ProgramBuilder> pm_;
  std::vector<int> step0_;                   // basic atoms at step 0
  std::map<std::string, int> step0_index_;   // lit text -> atom
  std::map<int, int> occurs0_;               // action -> occurs(a,0)=true
  std::unique_ptr<ProgramBuilder> sm_;       // S_M with free basic choices
  std::map<std::string, int> sm_index_;
  std::map<State, bool> checked_;
  std::optional<std::vector<State>> states_;
  std::map<State, int> state_ids_;
};

TransitionDiagram build_model(const BasicActionTheory& bat, const PreModel& m, ActionSets mode, Budget& budget);

std::string transition_text(const TransitionDiagram& d, const Transition& t);
// Lines `sigma_i: lit` and `sigma_i --{a}--> sigma_j`.
std::vector<std::string> diagram_lines(const TransitionDiagram& d);

// Truth of statements in a diagram, by ground instances over the universe.
bool satisfies(const TransitionDiagram& d, const BasicActionTheory& bat, const NRule& r,
               std::string* counterexample = nullptr);
bool entails(const std::vector<TransitionDiagram>& models, const BasicActionTheory& bat, const NRule& r);

enum class WellFounded { Yes, No, Unknown };
const char* well_founded_name(WellFounded w);

struct WellFoundedReport {
  WellFounded verdict = WellFounded::Unknown;
  bool stratified = false;  // syntactic sufficient condition
  std::string detail;
};

// Syntactic tier: no cycle through a negated defined function.
bool definitions_stratified(const BasicActionTheory& bat, std::string* cycle = nullptr);
WellFoundedReport check_well_founded(const BasicActionTheory& bat, const std::vector<PreModel>& models,
                                     Budget& budget);

}  // namespace alm
