// Machine-checkable certificates for participation impossibility proofs:
// trees of profiles connected by add/remove-voter edges with claim-set
// annotations, contradiction leaves, and concretely verified symmetry
// reductions. Includes the translation of validated MUS cores into
// certificates and DOT renderings.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noshow/cnf.hpp"
#include "noshow/core.hpp"
#include "noshow/solver.hpp"

namespace noshow {

struct ProofEdge {
  int from = 0;
  int to = 0;
  bool add = true;  // add vs remove voters
  int count = 1;
  Ranking ranking;
  AltSet s_from;  // claim handled by this edge
  AltSet s_to;    // claim asserted at the target
};

struct ProofLeaf {
  int node = 0;
  Alt winner = 0;  // declared contradiction winner
};

// Alternatives with id >= 4 are padding: every ranking must place them below
// the original four, which the checker verifies before relying on it.
struct ProofDocument {
  RuleClass rule_class = RuleClass::Condorcet;
  int m = 4;
  std::map<int, Profile> nodes;
  int root = 0;
  std::vector<AltSet> root_cases;
  std::optional<Permutation> sym;  // must fix the root profile
  std::vector<ProofEdge> edges;
  std::vector<ProofLeaf> leaves;
};

ProofDocument parse_certificate_text(const std::string& text);
ProofDocument load_certificate(const std::string& path);
std::string serialize_certificate(const ProofDocument& doc);

// winner set the rule class forces at a profile (condorcet: only when a
// Condorcet winner exists; maximin and kemeny: always)
struct ForcedSet {
  bool forced = false;
  AltSet set;
};
ForcedSet rule_winner_set(RuleClass rule_class, const Profile& profile);

struct CheckItem {
  std::string kind;     // "structure", "edge", "leaf", "root", "symmetry", ...
  std::string subject;  // e.g. "edge 3->4"
  bool ok = true;
  std::string detail;
};

struct CheckReport {
  bool valid = false;
  std::vector<CheckItem> items;
  std::string to_text() const;
};

// Claim-set soundness of one edge: the closure of S_from under the edge's
// ranking, restricted to the original alternatives, must lie inside S_to.
// Structural failures (profile arithmetic) are reported distinctly.
CheckItem check_edge(const ProofDocument& doc, const ProofEdge& edge);
// Contradiction validity of one leaf under the given incoming claim.
CheckItem check_leaf(const ProofDocument& doc, const ProofLeaf& leaf, AltSet incoming_claim);

CheckReport check_document(const ProofDocument& doc);

// Pads every node and edge to m alternatives; verdicts must be preserved.
ProofDocument lift_to_m(const ProofDocument& doc, int m);

std::string dot_of_document(const ProofDocument& doc);

// Translation of a validated core into a certificate. The draft DOT is
// always produced; the document is present iff the claim-propagation game
// over the core's own nodes and edges refutes every root case.
struct MusTranslation {
  bool solved = false;
  ProofDocument document;
  std::string dot_draft;
  std::string note;
};
MusTranslation mus_to_document(const MusCore& core, const std::vector<VarMapRow>& varmap,
                               RuleClass rule_class);

}  // namespace noshow
