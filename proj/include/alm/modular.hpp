#pragma once

#include <map>
#include <string>
#include <vector>

#include "alm/bat.hpp"
#include "alm/lpcore.hpp"
#include "alm/model.hpp"
#include "alm/syntax.hpp"

namespace alm {

// Directories searched for `L.alm`: explicit ones first, then ALM_LIBRARY_PATH.
std::vector<std::string> library_search_path(const std::vector<std::string>& explicit_dirs);

// Inlines every import; the result contains only modules.
Theory resolve_imports(const Theory& t, const std::vector<std::string>& search_path);

// Throws on the first violation of semantic coherence.
void check_coherence(const Theory& t);

// Collapses a coherent theory into one module named after the theory.
Module flatten(const Theory& t);

struct ExpandedObject {
  Term name;
  std::vector<std::string> sorts;  // as declared
  std::vector<AttrDef> attrs;      // ground
  Span span;
};

struct StructureSpec {
  std::vector<ExpandedObject> objects;  // sorted by name
  std::map<std::string, Term> constants;
  std::vector<StaticDef> statics;
};

StructureSpec expand_instance_schemas(const Structure& s, const ActionSignature& sig);

struct PreModelSet {
  std::vector<PreModel> models;
  std::vector<std::string> pruned;  // one note per rejected placement
};

PreModelSet enumerate_premodels(const BasicActionTheory& bat, const Structure& s, Budget& budget);

// A loaded system description.
struct System {
  std::string name;
  Theory theory;  // imports resolved
  BasicActionTheory bat;
  Structure structure;
};

struct LoadOptions {
  std::vector<std::string> lib_dirs;
  long long natural_bound = kDefaultNaturalBound;
};

System load_system(const SourceFile& f, const LoadOptions& opt);
System load_system_file(const std::string& path, const LoadOptions& opt);

}  // namespace alm
