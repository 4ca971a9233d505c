// Voting-theory kernel: rankings, profiles, majority margins, and the
// winner computations every other component treats as ground truth.
//
// All types are immutable values; every operation is a pure function and
// uses exact integer arithmetic throughout.
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace noshow {

// Thrown for precondition violations and malformed inputs.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

using Alt = int;  // alternative id, 0-based; display label is 'a' + id

inline constexpr int kMaxAlternatives = 12;

char alt_label(Alt a);
Alt alt_from_label(char c);

// Non-empty-by-convention subset of alternatives as a bitmask. Emptiness is
// representable so set algebra stays total; operations that require
// non-emptiness check it themselves.
struct AltSet {
  uint32_t bits = 0;

  static AltSet single(Alt a) { return AltSet{1u << a}; }
  static AltSet all(int m) { return AltSet{(1u << m) - 1u}; }
  static AltSet parse(const std::string& text);

  bool contains(Alt a) const { return (bits >> a) & 1u; }
  bool empty() const { return bits == 0; }
  int size() const;
  bool subset_of(AltSet other) const { return (bits & ~other.bits) == 0; }
  AltSet unite(AltSet o) const { return AltSet{bits | o.bits}; }
  AltSet intersect(AltSet o) const { return AltSet{bits & o.bits}; }
  AltSet minus(AltSet o) const { return AltSet{bits & ~o.bits}; }
  std::vector<Alt> members() const;
  std::string to_string() const;  // concatenated labels, e.g. "bd"

  friend bool operator==(AltSet, AltSet) = default;
};

// Strict total order over m alternatives, best first.
class Ranking {
 public:
  Ranking() = default;
  // order[0] is the most preferred alternative; must be a permutation.
  explicit Ranking(std::vector<Alt> order);
  static Ranking parse(const std::string& text);  // e.g. "abdc"

  int m() const { return m_; }
  Alt at(int position) const { return order_[position]; }
  Alt top() const { return order_[0]; }
  Alt bottom() const { return order_[m_ - 1]; }
  int position_of(Alt a) const { return pos_[a]; }
  // true iff x is strictly preferred to y
  bool prefers(Alt x, Alt y) const { return pos_[x] < pos_[y]; }
  Ranking reversed() const;
  std::string to_string() const;

  friend bool operator==(const Ranking& a, const Ranking& b) {
    return a.m_ == b.m_ &&
           std::equal(a.order_.begin(), a.order_.begin() + a.m_, b.order_.begin());
  }
  friend std::strong_ordering operator<=>(const Ranking& a, const Ranking& b);

 private:
  int m_ = 0;
  std::array<uint8_t, kMaxAlternatives> order_{};
  std::array<uint8_t, kMaxAlternatives> pos_{};
};

// All m! rankings in lexicographic order of their text form.
std::vector<Ranking> all_rankings(int m);

// Anonymous multiset of rankings; the empty profile is representable but is
// rejected by every winner operation.
class Profile {
 public:
  Profile() = default;
  explicit Profile(int m) : m_(m) {}
  static Profile parse(const std::string& text, int m = 0);  // "abdc:2,bdca:3"

  int m() const { return m_; }
  int n() const { return n_; }
  bool empty() const { return n_ == 0; }
  const std::map<Ranking, int>& counts() const { return counts_; }
  int count_of(const Ranking& r) const;

  Profile add_voters(const Ranking& r, int k) const;
  Profile remove_voters(const Ranking& r, int k) const;
  std::string to_string() const;  // rankings in lexicographic order

  friend bool operator==(const Profile& a, const Profile& b) {
    return a.m_ == b.m_ && a.counts_ == b.counts_;
  }

 private:
  int m_ = 0;
  int n_ = 0;
  std::map<Ranking, int> counts_;
};

// Majority margins for m = 4 in the fixed component order
// (g(a,b), g(a,c), g(a,d), g(b,c), g(b,d), g(c,d)).
struct MarginVector {
  std::array<int, 6> g{};
  int parity = 0;  // n mod 2 of any inducing profile

  int margin(Alt x, Alt y) const;  // antisymmetric lookup, any pair
  std::string to_string() const;   // "(3,-3,1,1,5,-1)"

  friend bool operator==(const MarginVector&, const MarginVector&) = default;
  friend std::strong_ordering operator<=>(const MarginVector& a, const MarginVector& b);
};

// Majority margins for arbitrary m (used by the proof checker, where padded
// profiles exceed four alternatives).
struct MarginMatrix {
  int m = 0;
  int n = 0;  // voter count of the inducing profile
  std::array<std::array<int, kMaxAlternatives>, kMaxAlternatives> g{};

  int margin(Alt x, Alt y) const { return g[x][y]; }
};

// pair index of (x, y), x < y, in MarginVector component order
int pair_index(Alt x, Alt y);

MarginVector margins_of_profile4(const Profile& p);  // requires m = 4, n >= 1
MarginMatrix margins_of_profile(const Profile& p);   // any m, n >= 1
MarginMatrix matrix_of_vector(const MarginVector& t, int n);
MarginVector vector_of_matrix(const MarginMatrix& mm);

// Tournament arithmetic: the margins of any inducing profile plus one voter.
MarginVector apply_ranking(const MarginVector& t, const Ranking& r);

// Winner operations. The MarginVector forms are the m = 4 fast path; the
// MarginMatrix forms serve any m.
std::optional<Alt> condorcet_winner(const MarginVector& t);
std::optional<Alt> condorcet_loser(const MarginVector& t);
AltSet maximin_winners(const MarginVector& t);
Alt maximin_lex(const MarginVector& t);
AltSet kemeny_winners(const MarginVector& t);
AltSet top_cycle(const MarginVector& t);
AltSet pareto_excluded(const MarginVector& t, int n_min);

std::optional<Alt> condorcet_winner(const MarginMatrix& mm);
std::optional<Alt> condorcet_loser(const MarginMatrix& mm);
AltSet maximin_winners(const MarginMatrix& mm);
AltSet kemeny_winners(const MarginMatrix& mm);  // m <= 7 (brute force over m!)
AltSet top_cycle(const MarginMatrix& mm);
AltSet pareto_excluded(const MarginMatrix& mm);  // unanimity at margin n

// Relabelling of alternatives. perm[x] is the image of x.
using Permutation = std::vector<Alt>;
Ranking relabel(const Ranking& r, const Permutation& perm);
Profile relabel(const Profile& p, const Permutation& perm);
MarginVector relabel(const MarginVector& t, const Permutation& perm);
AltSet relabel(AltSet s, const Permutation& perm);

// Extends every ranking by k new alternatives at the bottom, in fixed order.
// Margins among the original alternatives are unchanged and each new
// alternative is unanimously dominated.
Profile pad_with_bad(const Profile& p, int k);
Ranking pad_with_bad(const Ranking& r, int k, int old_m);

// Alternatives weakly above (resp. below) some member of s in r.
AltSet upper_closure(AltSet s, const Ranking& r);
AltSet lower_closure(AltSet s, const Ranking& r);

// Precomputed tables for the 24 rankings over {a,b,c,d}: the encoder and
// enumerator hot paths index these instead of recomputing.
struct FourTables {
  std::array<Ranking, 24> rankings;            // lexicographic
  std::array<std::array<int8_t, 6>, 24> delta; // margin shift per ranking
  std::array<std::array<uint8_t, 4>, 24> up;   // upper-closure mask of {x}
  std::array<std::array<uint8_t, 4>, 24> down; // lower-closure mask of {x}
  std::array<uint8_t, 24> reverse_index;       // index of the reversed ranking
  int index_of(const Ranking& r) const;
};
const FourTables& four_tables();

}  // namespace noshow
