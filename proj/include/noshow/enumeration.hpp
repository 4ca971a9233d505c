// Breadth-first discovery of all weighted tournaments inducible by up to
// n voters, with a deterministic dense indexing (discovery layer, then
// lexicographic on the six margin components) and an independent
// profile-enumeration oracle for small n.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noshow/core.hpp"

namespace noshow {

// Margin vectors packed into 48 bits, one biased byte per component with
// component (a,b) in the most significant position so that unsigned key
// order equals lexicographic order on the components.
uint64_t pack_margins(const MarginVector& t);
MarginVector unpack_margins(uint64_t key, int parity);

struct LayerStats {
  int voters = 0;
  uint64_t new_vectors = 0;
  uint64_t cumulative = 0;
};

class TournamentIndex {
 public:
  // BFS from the all-zero tournament, or from a seed profile whose voters
  // count toward n_max. Layers run base+1..n_max (seeded: base..n_max, the
  // seed's own tournament included).
  static TournamentIndex enumerate(int n_max, const std::optional<Profile>& seed = std::nullopt);

  int n_max() const { return n_max_; }
  int base_voters() const { return base_voters_; }
  uint32_t size() const { return static_cast<uint32_t>(keys_.size()); }
  int first_layer() const { return first_layer_; }

  MarginVector vector_at(uint32_t index) const;
  uint64_t key_at(uint32_t index) const { return keys_[index]; }
  int min_voters(uint32_t index) const;
  // dense index of a packed vector, or nullopt if not inducible within n_max
  std::optional<uint32_t> find(uint64_t key) const;
  std::optional<uint32_t> find(const MarginVector& t) const;

  // index range [first, last) of the vectors first discovered at k voters
  std::pair<uint32_t, uint32_t> layer_range(int k) const;
  std::vector<LayerStats> stats() const;

  // One successor per ranking, in lexicographic ranking order.
  static std::array<MarginVector, 24> successors(const MarginVector& t);

  void dump(const std::string& path) const;        // "<index> <min_voters> <g..>"
  void dump_stats(const std::string& path) const;  // "<k> <new> <cumulative>"

 private:
  int n_max_ = 0;
  int base_voters_ = 0;
  int first_layer_ = 1;
  std::vector<uint64_t> keys_;            // layer-major, sorted within layer
  std::vector<uint32_t> layer_offsets_;   // offsets per layer, ends with size
  // open-addressing key -> index table (linear probing, power-of-two size)
  std::vector<uint64_t> slot_keys_;
  std::vector<uint32_t> slot_values_;
  uint64_t slot_mask_ = 0;

  void build_lookup();
};

// Exhaustive multiset-of-profiles oracle: margins of every profile with
// 1..n_max voters. Quadratic-ish and only intended as a correctness check.
std::vector<uint64_t> oracle_enumerate(int n_max);  // sorted packed keys

}  // namespace noshow
