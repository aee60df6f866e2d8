#include "alm/lpcore.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "alm/syntax.hpp"

namespace alm {

int GroundProgram::atom(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  int id = (int)names.size();
  names.push_back(name);
  free.push_back(0);
  priority.push_back(0);
  index_.emplace(name, id);
  return id;
}

int GroundProgram::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

void GroundProgram::add_rule(int head, std::vector<int> pos, std::vector<int> neg) {
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
  std::sort(neg.begin(), neg.end());
  neg.erase(std::unique(neg.begin(), neg.end()), neg.end());
  rules.push_back(GroundRule{head, std::move(pos), std::move(neg)});
}

void GroundProgram::add_group(std::vector<int> members) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (members.size() > 1) groups.push_back(std::move(members));
}

int GroundProgram::add_cr(int head, std::vector<int> pos, std::vector<int> neg, const std::string& text) {
  int a = atom("appl(" + std::to_string(cr.size() + 1) + ")");
  free[a] = 1;
  cr.push_back(a);
  cr_text.push_back(text);
  pos.push_back(a);
  add_rule(head, std::move(pos), std::move(neg));
  return a;
}

void Budget::tick() {
  ++nodes;
  if (max_nodes > 0 && nodes > max_nodes)
    throw Diagnostic(Diagnostic::Kind::Budget, Span{}, "node budget of " + std::to_string(max_nodes) + " exhausted");
  if (max_seconds > 0 && (nodes & 255) == 0) {
    double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (el > max_seconds)
      throw Diagnostic(Diagnostic::Kind::Budget, Span{}, "time budget of " + std::to_string(max_seconds) + "s exhausted");
  }
}

namespace {

enum : char { U = 0, T = 1, F = 2 };

class Solver {
 public:
  Solver(const GroundProgram& p, const SolveOptions& opt, Budget& b,
         const std::function<bool(const AnswerSet&)>& cb)
      : p_(p), opt_(opt), budget_(b), cb_(cb) {
    size_t n = p.size();
    val_.assign(n, U);
    pos_occ_.resize(n);
    neg_occ_.resize(n);
    head_rules_.resize(n);
    group_of_.resize(n);
    is_cr_.assign(n, 0);
    nsat_.assign(p.rules.size(), 0);
    nfal_.assign(p.rules.size(), 0);
    nsupp_.assign(n, 0);
    for (size_t r = 0; r < p.rules.size(); ++r) {
      const GroundRule& g = p.rules[r];
      for (int a : g.pos) pos_occ_[a].push_back((int)r);
      for (int a : g.neg) neg_occ_[a].push_back((int)r);
      if (g.head >= 0) {
        head_rules_[g.head].push_back((int)r);
        ++nsupp_[g.head];
      }
    }
    for (size_t g = 0; g < p.groups.size(); ++g)
      for (int a : p.groups[g]) group_of_[a].push_back((int)g);
    for (int a : p.cr) is_cr_[a] = 1;
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      if (p.priority[a] != p.priority[b]) return p.priority[a] < p.priority[b];
      return p.free[a] > p.free[b];
    });
    in_r_.assign(n, 0);
    cnt_.assign(p.rules.size(), 0);
  }

  void run() {
    for (size_t r = 0; r < p_.rules.size(); ++r) rq_.push_back((int)r);
    for (size_t a = 0; a < p_.size(); ++a) aq_.push_back((int)a);
    for (int a : opt_.assume_true) assign(a, T);
    for (int a : opt_.assume_false) assign(a, F);
    search();
  }

 private:
  const GroundProgram& p_;
  const SolveOptions& opt_;
  Budget& budget_;
  const std::function<bool(const AnswerSet&)>& cb_;

  std::vector<char> val_;
  std::vector<std::vector<int>> pos_occ_, neg_occ_, head_rules_, group_of_;
  std::vector<char> is_cr_;
  std::vector<int> nsat_, nfal_, nsupp_;
  std::vector<int> trail_;
  std::vector<int> rq_, aq_;
  std::vector<int> order_;
  std::vector<char> in_r_;
  std::vector<int> cnt_;
  int cr_true_ = 0;
  bool conflict_ = false;
  bool stop_ = false;

  void support_lost(int r) {
    int h = p_.rules[r].head;
    if (h >= 0 && --nsupp_[h] <= 1) aq_.push_back(h);
  }

  void assign(int a, char v) {
    if (val_[a] != U) {
      if (val_[a] != v) conflict_ = true;
      return;
    }
    val_[a] = v;
    trail_.push_back(a);
    if (v == T) {
      for (int r : pos_occ_[a]) {
        ++nsat_[r];
        rq_.push_back(r);
      }
      for (int r : neg_occ_[a])
        if (++nfal_[r] == 1) support_lost(r);
      for (int g : group_of_[a])
        for (int b : p_.groups[g])
          if (b != a) {
            if (val_[b] == T) conflict_ = true;
            else if (val_[b] == U) assign(b, F);
          }
      if (is_cr_[a] && opt_.cr_bound >= 0) {
        ++cr_true_;
        if (cr_true_ > opt_.cr_bound) conflict_ = true;
        else if (cr_true_ == opt_.cr_bound)
          for (int c : p_.cr)
            if (val_[c] == U) assign(c, F);
      }
      aq_.push_back(a);
    } else {
      for (int r : pos_occ_[a])
        if (++nfal_[r] == 1) support_lost(r);
      for (int r : neg_occ_[a]) {
        ++nsat_[r];
        rq_.push_back(r);
      }
      for (int r : head_rules_[a]) rq_.push_back(r);
    }
  }

  void undo(size_t mark) {
    while (trail_.size() > mark) {
      int a = trail_.back();
      trail_.pop_back();
      char v = val_[a];
      val_[a] = U;
      if (v == T) {
        for (int r : pos_occ_[a]) --nsat_[r];
        for (int r : neg_occ_[a])
          if (nfal_[r]-- == 1 && p_.rules[r].head >= 0) ++nsupp_[p_.rules[r].head];
        if (is_cr_[a] && opt_.cr_bound >= 0) --cr_true_;
      } else {
        for (int r : pos_occ_[a])
          if (nfal_[r]-- == 1 && p_.rules[r].head >= 0) ++nsupp_[p_.rules[r].head];
        for (int r : neg_occ_[a]) --nsat_[r];
      }
    }
    rq_.clear();
    aq_.clear();
    conflict_ = false;
  }

  void check_rule(int r) {
    if (nfal_[r] > 0) return;
    const GroundRule& g = p_.rules[r];
    int size = (int)(g.pos.size() + g.neg.size());
    if (nsat_[r] == size) {
      if (g.head < 0) conflict_ = true;
      else assign(g.head, T);
      return;
    }
    if (nsat_[r] == size - 1 && (g.head < 0 || val_[g.head] == F)) {
      for (int a : g.pos)
        if (val_[a] == U) {
          assign(a, F);
          return;
        }
      for (int a : g.neg)
        if (val_[a] == U) {
          assign(a, T);
          return;
        }
    }
  }

  void check_atom(int a) {
    if (p_.free[a]) return;
    if (nsupp_[a] == 0) {
      if (val_[a] == U) assign(a, F);
      else if (val_[a] == T) conflict_ = true;
      return;
    }
    if (val_[a] == T && nsupp_[a] == 1) {
      for (int r : head_rules_[a])
        if (nfal_[r] == 0) {
          for (int b : p_.rules[r].pos) assign(b, T);
          for (int b : p_.rules[r].neg) assign(b, F);
          return;
        }
    }
  }

  bool unit() {
    while (!conflict_ && (!rq_.empty() || !aq_.empty())) {
      if (!rq_.empty()) {
        int r = rq_.back();
        rq_.pop_back();
        check_rule(r);
      } else {
        int a = aq_.back();
        aq_.pop_back();
        check_atom(a);
      }
    }
    return !conflict_;
  }

  // Atoms without any possible non-circular support become false.
  bool unfounded() {
    size_t n = p_.size();
    std::fill(in_r_.begin(), in_r_.end(), 0);
    std::vector<int> stack;
    auto add = [&](int a) {
      if (!in_r_[a]) {
        in_r_[a] = 1;
        stack.push_back(a);
      }
    };
    for (size_t r = 0; r < p_.rules.size(); ++r) {
      cnt_[r] = (int)p_.rules[r].pos.size();
      if (cnt_[r] == 0 && nfal_[r] == 0 && p_.rules[r].head >= 0) add(p_.rules[r].head);
    }
    for (size_t a = 0; a < n; ++a)
      if (p_.free[a] && val_[a] != F) add((int)a);
    while (!stack.empty()) {
      int a = stack.back();
      stack.pop_back();
      for (int r : pos_occ_[a])
        if (--cnt_[r] == 0 && nfal_[r] == 0 && p_.rules[r].head >= 0) add(p_.rules[r].head);
    }
    bool changed = false;
    for (size_t a = 0; a < n; ++a) {
      if (in_r_[a]) continue;
      if (val_[a] == T) return conflict_ = true, false;
      if (val_[a] == U) {
        assign((int)a, F);
        changed = true;
      }
    }
    (void)changed;
    return !conflict_;
  }

  bool propagate() {
    for (;;) {
      if (!unit()) return false;
      size_t before = trail_.size();
      if (!unfounded()) return false;
      if (trail_.size() == before && rq_.empty() && aq_.empty()) return true;
    }
  }

  void search() {
    if (stop_) return;
    budget_.tick();
    if (!propagate()) return;
    int pick = -1;
    for (int a : order_)
      if (val_[a] == U) {
        pick = a;
        break;
      }
    if (pick < 0) {
      AnswerSet s;
      for (size_t a = 0; a < val_.size(); ++a)
        if (val_[a] == T) s.push_back((int)a);
      if (!cb_(s)) stop_ = true;
      return;
    }
    char first = is_cr_[pick] ? F : T;
    for (char v : {first, (char)(first == T ? F : T)}) {
      size_t mark = trail_.size();
      assign(pick, v);
      search();
      undo(mark);
      if (stop_) return;
    }
  }
};

}  // namespace

void solve(const GroundProgram& p, const SolveOptions& opt, Budget& budget,
           const std::function<bool(const AnswerSet&)>& on_model) {
  size_t count = 0;
  std::function<bool(const AnswerSet&)> cb = [&](const AnswerSet& s) {
    ++count;
    if (!on_model(s)) return false;
    return opt.limit == 0 || count < opt.limit;
  };
  Solver s(p, opt, budget, cb);
  s.run();
}

std::vector<AnswerSet> solve_all(const GroundProgram& p, const SolveOptions& opt, Budget& budget) {
  std::vector<AnswerSet> out;
  solve(p, opt, budget, [&](const AnswerSet& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

std::vector<CrResult> solve_cr(const GroundProgram& p, CrMinimality mode, Budget& budget, const SolveOptions& base) {
  std::vector<CrResult> out;
  std::vector<std::vector<int>> minimal;
  auto applied_of = [&](const AnswerSet& s) {
    std::vector<int> a;
    for (int c : p.cr)
      if (std::binary_search(s.begin(), s.end(), c)) a.push_back(c);
    return a;
  };
  for (int k = 0; k <= (int)p.cr.size(); ++k) {
    SolveOptions opt = base;
    opt.cr_bound = k;
    opt.limit = 0;
    bool found = false;
    solve(p, opt, budget, [&](const AnswerSet& s) {
      std::vector<int> a = applied_of(s);
      if ((int)a.size() != k) return true;  // seen at a smaller bound
      if (mode == CrMinimality::Subset) {
        for (const auto& m : minimal)
          if (std::includes(a.begin(), a.end(), m.begin(), m.end()) && m != a) return true;
      }
      out.push_back(CrResult{s, a});
      found = true;
      return true;
    });
    if (found) {
      if (mode == CrMinimality::Cardinality) return out;
      for (size_t i = minimal.size(); i < out.size(); ++i) minimal.push_back(out[i].applied);
    }
  }
  return out;
}

bool is_answer_set(const GroundProgram& p, const AnswerSet& s) {
  std::vector<char> in(p.size(), 0);
  for (int a : s) in[a] = 1;
  for (const auto& g : p.groups) {
    int c = 0;
    for (int a : g) c += in[a];
    if (c > 1) return false;
  }
  std::vector<char> lm(p.size(), 0);
  for (size_t a = 0; a < p.size(); ++a)
    if (p.free[a] && in[a]) lm[a] = 1;
  std::vector<const GroundRule*> red;
  for (const auto& r : p.rules) {
    bool blocked = false;
    for (int b : r.neg) blocked |= in[b] != 0;
    if (blocked) continue;
    if (r.head < 0) {
      bool body = true;
      for (int b : r.pos) body &= in[b] != 0;
      if (body) return false;
      continue;
    }
    red.push_back(&r);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const GroundRule* r : red) {
      if (lm[r->head]) continue;
      bool body = true;
      for (int b : r->pos) body &= lm[b] != 0;
      if (body) {
        lm[r->head] = 1;
        changed = true;
      }
    }
  }
  return lm == in;
}

std::vector<AnswerSet> brute_force_answer_sets(const GroundProgram& p) {
  std::vector<AnswerSet> out;
  size_t n = p.size();
  if (n > 20) throw std::invalid_argument("brute force limited to 20 atoms");
  for (unsigned long m = 0; m < (1ul << n); ++m) {
    AnswerSet s;
    for (size_t a = 0; a < n; ++a)
      if (m & (1ul << a)) s.push_back((int)a);
    if (is_answer_set(p, s)) out.push_back(s);
  }
  return out;
}

namespace {

std::string reify(const std::string& name) {
  auto eq = name.find('=');
  if (eq == std::string::npos) return name;
  return "val(" + name.substr(0, eq) + "," + name.substr(eq + 1) + ")";
}

}  // namespace

std::string export_text(const GroundProgram& p) {
  std::ostringstream os;
  os << "% atoms: " << p.size() << ", rules: " << p.rules.size() << ", groups: " << p.groups.size() << "\n";
  std::vector<int> cr_index(p.size(), -1);
  for (size_t i = 0; i < p.cr.size(); ++i) cr_index[p.cr[i]] = (int)i;
  for (size_t a = 0; a < p.size(); ++a)
    if (p.free[a] && cr_index[a] < 0) os << "{ " << reify(p.names[a]) << " }.\n";
  for (size_t i = 0; i < p.cr.size(); ++i) {
    os << "% cr-rule r" << i + 1 << ": " << p.cr_text[i] << "\n";
    os << "{ " << p.names[p.cr[i]] << " }.\n";
    os << "#minimize{ 1," << p.names[p.cr[i]] << " : " << p.names[p.cr[i]] << " }.\n";
  }
  for (const auto& r : p.rules) {
    if (r.head >= 0) os << reify(p.names[r.head]);
    std::vector<std::string> body;
    for (int b : r.pos) body.push_back(reify(p.names[b]));
    for (int b : r.neg) body.push_back("not " + reify(p.names[b]));
    if (!body.empty() || r.head < 0) {
      os << (r.head >= 0 ? " :- " : ":- ");
      for (size_t i = 0; i < body.size(); ++i) os << (i ? ", " : "") << body[i];
    }
    os << ".\n";
  }
  for (const auto& g : p.groups)
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = i + 1; j < g.size(); ++j) os << ":- " << reify(p.names[g[i]]) << ", " << reify(p.names[g[j]]) << ".\n";
  return os.str();
}

std::string format_answer_set(const GroundProgram& p, const AnswerSet& s) {
  std::vector<std::string> v;
  for (int a : s) v.push_back(p.names[a]);
  std::sort(v.begin(), v.end());
  std::string out;
  for (const auto& x : v) out += x + "\n";
  return out;
}

}  // namespace alm
