// Lookup-table voting rules decoded from SAT models: the serialized text
// format, brute-force verifiers for every axiom against the enumeration, and
// the summary statistics reported alongside the rule.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "noshow/cnf.hpp"
#include "noshow/core.hpp"
#include "noshow/enumeration.hpp"
#include "noshow/solver.hpp"

namespace noshow {

struct RuleTable {
  ValueMode mode = ValueMode::Single;
  int n_max = 0;
  std::vector<uint8_t> choices;  // alternative bitmask per node, index-aligned

  AltSet at(uint32_t node) const { return AltSet{choices[node]}; }
  Alt single_at(uint32_t node) const;  // requires a singleton entry
};

// model must already have passed check_model against the emitting instance
RuleTable decode_model(const Model& model, const TournamentIndex& index, ValueMode mode);

// characteristic assignment of a table over the shared variable map
Model table_to_model(const RuleTable& table, const TournamentIndex& index);

// Fig-4-style row: "<alts>,#<n>,(<g1>,<g2>,<g3>,<g4>,<g5>,<g6>)"
std::string format_entry(const MarginVector& t, int n, AltSet choice);
struct ParsedEntry {
  AltSet choice;
  int n = 0;
  MarginVector margins;
};
ParsedEntry parse_entry(const std::string& line);

void write_table(const RuleTable& table, const TournamentIndex& index, const std::string& path);
RuleTable read_table(const std::string& path, const TournamentIndex& index);

struct Violation {
  std::string kind;
  uint32_t node = 0;
  std::string detail;
};

struct VerifyReport {
  uint64_t checked = 0;
  uint64_t violation_count = 0;
  std::vector<Violation> violations;  // capped at kMaxListed
  static constexpr size_t kMaxListed = 1000;

  bool clean() const { return violation_count == 0; }
  void add(std::string kind, uint32_t node, std::string detail);
  std::string to_text() const;  // "<kind> <node_index> <detail>" lines
};

// single-valued participation along every indexed edge
VerifyReport verify_participation(const RuleTable& table, const TournamentIndex& index);
// per-node membership checks against the voting kernel
VerifyReport verify_condorcet(const RuleTable& table, const TournamentIndex& index);
VerifyReport verify_topcycle(const RuleTable& table, const TournamentIndex& index);
VerifyReport verify_pareto(const RuleTable& table, const TournamentIndex& index);
// set-valued best/worst comparisons; single-valued tables are read as
// singleton sets
VerifyReport verify_optimistic(const RuleTable& table, const TournamentIndex& index);
VerifyReport verify_pessimistic(const RuleTable& table, const TournamentIndex& index);

struct RuleStats {
  uint64_t nodes = 0;
  double condorcet_fraction = 0.0;
  double maximin_fraction = 0.0;
  double kemeny_fraction = 0.0;
  double maximin_lex_agreement = 0.0;
  std::string to_text() const;
};
RuleStats compute_stats(const RuleTable& table, const TournamentIndex& index);

// the maximin rule with lexicographic tie-breaking as a table, for comparisons
RuleTable maximin_lex_table(const TournamentIndex& index);

}  // namespace noshow
