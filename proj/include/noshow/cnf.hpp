// DIMACS/GCNF emission of the participation axioms over tournament space or
// a restricted profile space, with exact precounted headers, byte-stable
// output, and a variable-map sidecar.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noshow/core.hpp"
#include "noshow/enumeration.hpp"

namespace noshow {

enum class Space { Tournament, Profile };
enum class RuleClass { Condorcet, Maximin, Kemeny };
enum class ValueMode { Single, SetValued };

struct EncodingConfig {
  Space space = Space::Tournament;
  int n_max = 1;
  RuleClass rule_class = RuleClass::Condorcet;
  bool top_cycle_filter = false;
  bool pareto_filter = false;
  ValueMode value_mode = ValueMode::Single;
  // participation directions; in single mode the optimistic clause family is
  // full participation and the removal family is redundant
  bool optimistic = true;
  bool pessimistic = false;
  // profile space
  std::optional<Profile> base;
  std::vector<Ranking> allowed;

  void validate() const;  // throws on inconsistent configuration
};

// Restricted profile space per the incremental search: nodes are all
// extensions of the base profile by voters drawn from the allowed orders, up
// to n_max voters in total. Indexed by added-voter count, then
// lexicographically by the count vector over the allowed orders.
class ProfileSpaceIndex {
 public:
  ProfileSpaceIndex(Profile base, std::vector<Ranking> allowed, int n_max);

  uint32_t size() const { return static_cast<uint32_t>(margins_.size()); }
  int n_max() const { return n_max_; }
  const Profile& base() const { return base_; }
  const std::vector<Ranking>& allowed() const { return allowed_; }

  int voters_at(uint32_t index) const;
  const MarginVector& margins_at(uint32_t index) const { return margins_[index]; }
  Profile profile_at(uint32_t index) const;
  // successor adding one voter of allowed()[order]; node must not be frontier
  uint32_t successor(uint32_t index, int order) const;
  std::optional<uint32_t> find(const Profile& p) const;

 private:
  Profile base_;
  std::vector<Ranking> allowed_;
  int n_max_ = 0;
  std::vector<std::vector<uint8_t>> counts_;
  std::vector<MarginVector> margins_;
  std::vector<uint32_t> layer_offsets_;
  std::map<std::vector<uint8_t>, uint32_t> lookup_;
};

// variable id of "alternative alt chosen at node index"
inline int var_id(uint32_t node_index, Alt alt) { return static_cast<int>(4 * node_index) + alt + 1; }

struct EncodeResult {
  uint64_t variables = 0;
  uint64_t clauses = 0;
  uint64_t groups = 0;
  uint64_t condorcet_nodes = 0;
  uint64_t boundary_skips = 0;  // participation clauses skipped at the frontier
};

struct EncodeOutputs {
  std::string cnf_path;     // empty = skip
  std::string gcnf_path;    // empty = skip
  std::string varmap_path;  // empty = skip
};

// Streams the full encoding for tournament space (index required) or profile
// space (index built from the config). Output is deterministic byte-for-byte.
EncodeResult encode(const EncodingConfig& config, const TournamentIndex* index,
                    const EncodeOutputs& outputs);

// Clause families for a single node, exposed for tests and audits. Literals
// use the shared variable map; clauses are in emission order.
std::vector<int> nonempty_clause(uint32_t node);
std::vector<std::vector<int>> mutex_clauses(uint32_t node);
// the four condorcet units when a winner exists, otherwise the restriction
// units implied by the configured rule class and structural filters
std::vector<std::vector<int>> node_unit_clauses(uint32_t node, const MarginVector& t,
                                                const EncodingConfig& config, int n_min);
std::vector<std::vector<int>> participation_clauses(uint32_t from, uint32_t to,
                                                    const Ranking& r, bool optimistic);

// Variable-map row: node metadata plus the alternative a variable denotes.
struct VarMapRow {
  int var = 0;
  uint32_t node = 0;
  int voters = 0;
  MarginVector margins;       // tournament space
  std::string profile_text;   // profile space
  Alt alt = 0;
};
std::vector<VarMapRow> read_varmap(const std::string& path);

}  // namespace noshow
