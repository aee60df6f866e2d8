#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace alm {

// A ground normal program. Atoms are opaque names; functional consistency is
// expressed by at-most-one groups. CR rules are represented by free atoms
// (`appl`) that may be assumed without support, with their number minimized.
struct GroundRule {
  int head = -1;  // -1: constraint
  std::vector<int> pos, neg;
};

struct GroundProgram {
  std::vector<std::string> names;
  std::vector<GroundRule> rules;
  std::vector<std::vector<int>> groups;  // at most one member true
  std::vector<char> free;                // may be true without support
  std::vector<int> cr;                   // applicability atoms of CR rules
  std::vector<std::string> cr_text;      // the CR rule each one stands for
  std::vector<int> priority;             // branching order hint (lower first)

  int atom(const std::string& name);
  int find(const std::string& name) const;
  size_t size() const { return names.size(); }
  void add_rule(int head, std::vector<int> pos, std::vector<int> neg = {});
  void add_fact(int a) { add_rule(a, {}); }
  void add_constraint(std::vector<int> pos, std::vector<int> neg = {}) { add_rule(-1, std::move(pos), std::move(neg)); }
  void add_group(std::vector<int> members);
  int add_cr(int head, std::vector<int> pos, std::vector<int> neg, const std::string& text);

 private:
  std::unordered_map<std::string, int> index_;
};

using AnswerSet = std::vector<int>;  // sorted true atoms

struct Budget {
  long long max_nodes = 0;      // 0: unlimited
  double max_seconds = 0;       // 0: unlimited
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  long long nodes = 0;
  void tick();  // throws Diagnostic(Budget)
};

struct SolveOptions {
  std::vector<int> assume_true, assume_false;
  int cr_bound = -1;  // at most this many cr atoms true (-1: no bound)
  size_t limit = 0;   // stop after this many answer sets (0: all)
};

// Enumerates answer sets; the callback may return false to stop.
void solve(const GroundProgram& p, const SolveOptions& opt, Budget& budget,
           const std::function<bool(const AnswerSet&)>& on_model);
std::vector<AnswerSet> solve_all(const GroundProgram& p, const SolveOptions& opt, Budget& budget);

enum class CrMinimality { Cardinality, Subset };

struct CrResult {
  AnswerSet answer;
  std::vector<int> applied;  // cr atoms used
};

// Minimal sets of CR rules restoring consistency, with their answer sets.
std::vector<CrResult> solve_cr(const GroundProgram& p, CrMinimality mode, Budget& budget,
                               const SolveOptions& base = {});

// Independent checks used by tests.
bool is_answer_set(const GroundProgram& p, const AnswerSet& s);
std::vector<AnswerSet> brute_force_answer_sets(const GroundProgram& p);

// ASP-Core-2 style text; `val/2` reifies functional atoms named `f(t)=v`.
std::string export_text(const GroundProgram& p);

std::string format_answer_set(const GroundProgram& p, const AnswerSet& s);

}  // namespace alm
