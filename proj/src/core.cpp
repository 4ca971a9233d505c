#include "noshow/core.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace noshow {

char alt_label(Alt a) {
  if (a < 0 || a >= kMaxAlternatives) throw Error("alternative id out of range");
  return static_cast<char>('a' + a);
}

Alt alt_from_label(char c) {
  if (c < 'a' || c >= 'a' + kMaxAlternatives) throw Error(std::string("bad alternative label '") + c + "'");
  return c - 'a';
}

AltSet AltSet::parse(const std::string& text) {
  AltSet s;
  for (char c : text) s.bits |= 1u << alt_from_label(c);
  return s;
}

int AltSet::size() const {
  int k = 0;
  for (uint32_t b = bits; b; b &= b - 1) ++k;
  return k;
}

std::vector<Alt> AltSet::members() const {
  std::vector<Alt> out;
  for (Alt a = 0; a < kMaxAlternatives; ++a)
    if (contains(a)) out.push_back(a);
  return out;
}

std::string AltSet::to_string() const {
  std::string out;
  for (Alt a : members()) out.push_back(alt_label(a));
  return out;
}

Ranking::Ranking(std::vector<Alt> order) {
  m_ = static_cast<int>(order.size());
  if (m_ < 1 || m_ > kMaxAlternatives) throw Error("ranking has unsupported size");
  std::array<bool, kMaxAlternatives> seen{};
  for (int i = 0; i < m_; ++i) {
    Alt a = order[i];
    if (a < 0 || a >= m_ || seen[a]) throw Error("ranking is not a permutation");
    seen[a] = true;
    order_[i] = static_cast<uint8_t>(a);
    pos_[a] = static_cast<uint8_t>(i);
  }
}

Ranking Ranking::parse(const std::string& text) {
  std::vector<Alt> order;
  order.reserve(text.size());
  for (char c : text) order.push_back(alt_from_label(c));
  return Ranking(order);
}

Ranking Ranking::reversed() const {
  std::vector<Alt> order(m_);
  for (int i = 0; i < m_; ++i) order[i] = order_[m_ - 1 - i];
  return Ranking(order);
}

std::string Ranking::to_string() const {
  std::string out;
  for (int i = 0; i < m_; ++i) out.push_back(alt_label(order_[i]));
  return out;
}

std::strong_ordering operator<=>(const Ranking& a, const Ranking& b) {
  if (auto c = a.m_ <=> b.m_; c != 0) return c;
  for (int i = 0; i < a.m_; ++i)
    if (auto c = a.order_[i] <=> b.order_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::vector<Ranking> all_rankings(int m) {
  if (m < 1 || m > kMaxAlternatives) throw Error("unsupported alternative count");
  std::vector<Alt> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Ranking> out;
  do {
    out.emplace_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

Profile Profile::parse(const std::string& text, int m) {
  Profile p;
  p.m_ = m;
  size_t i = 0;
  while (i < text.size()) {
    size_t colon = text.find(':', i);
    if (colon == std::string::npos) throw Error("profile entry missing ':' near position " + std::to_string(i));
    Ranking r = Ranking::parse(text.substr(i, colon - i));
    size_t comma = text.find(',', colon);
    std::string count_text = text.substr(colon + 1, (comma == std::string::npos ? text.size() : comma) - colon - 1);
    int count = 0;
    try {
      count = std::stoi(count_text);
    } catch (const std::exception&) {
      throw Error("bad voter count '" + count_text + "'");
    }
    if (count <= 0) throw Error("voter counts must be positive");
    if (p.m_ == 0) p.m_ = r.m();
    if (r.m() != p.m_) throw Error("mixed alternative counts in profile");
    if (p.counts_.count(r)) throw Error("duplicate ranking " + r.to_string() + " in profile");
    p.counts_[r] = count;
    p.n_ += count;
    if (comma == std::string::npos) break;
    i = comma + 1;
  }
  if (p.counts_.empty()) throw Error("empty profile text");
  return p;
}

int Profile::count_of(const Ranking& r) const {
  auto it = counts_.find(r);
  return it == counts_.end() ? 0 : it->second;
}

Profile Profile::add_voters(const Ranking& r, int k) const {
  if (k <= 0) throw Error("voter count must be positive");
  if (m_ != 0 && r.m() != m_) throw Error("ranking size does not match profile");
  Profile out = *this;
  if (out.m_ == 0) out.m_ = r.m();
  out.counts_[r] += k;
  out.n_ += k;
  return out;
}

Profile Profile::remove_voters(const Ranking& r, int k) const {
  if (k <= 0) throw Error("voter count must be positive");
  auto it = counts_.find(r);
  if (it == counts_.end() || it->second < k) throw Error("voter not in profile");
  Profile out = *this;
  if (it->second == k)
    out.counts_.erase(r);
  else
    out.counts_[r] -= k;
  out.n_ -= k;
  return out;
}

std::string Profile::to_string() const {
  std::string out;
  for (const auto& [r, c] : counts_) {
    if (!out.empty()) out.push_back(',');
    out += r.to_string();
    out.push_back(':');
    out += std::to_string(c);
  }
  return out;
}

int pair_index(Alt x, Alt y) {
  static constexpr int idx[4][4] = {
      {-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
  if (x < 0 || y < 0 || x > 3 || y > 3 || x == y) throw Error("bad pair");
  return idx[x][y];
}

int MarginVector::margin(Alt x, Alt y) const {
  int i = pair_index(x, y);
  return x < y ? g[i] : -g[i];
}

std::string MarginVector::to_string() const {
  std::string out = "(";
  for (int i = 0; i < 6; ++i) {
    if (i) out.push_back(',');
    out += std::to_string(g[i]);
  }
  out.push_back(')');
  return out;
}

std::strong_ordering operator<=>(const MarginVector& a, const MarginVector& b) {
  for (int i = 0; i < 6; ++i)
    if (auto c = a.g[i] <=> b.g[i]; c != 0) return c;
  return a.parity <=> b.parity;
}

MarginMatrix margins_of_profile(const Profile& p) {
  if (p.empty()) throw Error("empty electorate");
  MarginMatrix mm;
  mm.m = p.m();
  mm.n = p.n();
  for (const auto& [r, c] : p.counts()) {
    for (Alt x = 0; x < mm.m; ++x)
      for (Alt y = x + 1; y < mm.m; ++y) {
        int d = r.prefers(x, y) ? c : -c;
        mm.g[x][y] += d;
        mm.g[y][x] -= d;
      }
  }
  return mm;
}

MarginVector margins_of_profile4(const Profile& p) {
  if (p.m() != 4) throw Error("margin vectors are defined for m = 4");
  return vector_of_matrix(margins_of_profile(p));
}

MarginMatrix matrix_of_vector(const MarginVector& t, int n) {
  MarginMatrix mm;
  mm.m = 4;
  mm.n = n;
  for (Alt x = 0; x < 4; ++x)
    for (Alt y = 0; y < 4; ++y)
      if (x != y) mm.g[x][y] = t.margin(x, y);
  return mm;
}

MarginVector vector_of_matrix(const MarginMatrix& mm) {
  if (mm.m != 4) throw Error("margin vectors are defined for m = 4");
  MarginVector t;
  for (Alt x = 0; x < 4; ++x)
    for (Alt y = x + 1; y < 4; ++y) t.g[pair_index(x, y)] = mm.g[x][y];
  t.parity = ((mm.n % 2) + 2) % 2;
  return t;
}

MarginVector apply_ranking(const MarginVector& t, const Ranking& r) {
  if (r.m() != 4) throw Error("margin vectors are defined for m = 4");
  MarginVector out = t;
  for (Alt x = 0; x < 4; ++x)
    for (Alt y = x + 1; y < 4; ++y) out.g[pair_index(x, y)] += r.prefers(x, y) ? 1 : -1;
  out.parity = 1 - t.parity;
  return out;
}

namespace {

template <typename Margin>
std::optional<Alt> extreme_alternative(int m, Margin margin, int sign) {
  for (Alt x = 0; x < m; ++x) {
    bool all = true;
    for (Alt y = 0; y < m && all; ++y)
      if (y != x && sign * margin(x, y) <= 0) all = false;
    if (all) return x;
  }
  return std::nullopt;
}

template <typename Margin>
AltSet maximin_impl(int m, Margin margin) {
  int best = INT32_MIN;
  AltSet winners;
  for (Alt x = 0; x < m; ++x) {
    int worst = INT32_MAX;
    for (Alt y = 0; y < m; ++y)
      if (y != x) worst = std::min(worst, margin(x, y));
    if (worst > best) {
      best = worst;
      winners = AltSet::single(x);
    } else if (worst == best) {
      winners = winners.unite(AltSet::single(x));
    }
  }
  return winners;
}

// Kemeny score of a ranking is the sum of margins over its ordered pairs; an
// affine transform of the agreement count, so the argmax sets coincide.
template <typename Margin>
AltSet kemeny_impl(int m, Margin margin) {
  std::vector<Alt> order(m);
  std::iota(order.begin(), order.end(), 0);
  int best = INT32_MIN;
  AltSet tops;
  do {
    int score = 0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) score += margin(order[i], order[j]);
    if (score > best) {
      best = score;
      tops = AltSet::single(order[0]);
    } else if (score == best) {
      tops = tops.unite(AltSet::single(order[0]));
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return tops;
}

// Source component of the "does not lose" relation: x is in the top cycle iff
// it reaches every other alternative through edges with margin >= 0.
template <typename Margin>
AltSet top_cycle_impl(int m, Margin margin) {
  std::array<uint32_t, kMaxAlternatives> reach{};
  for (Alt x = 0; x < m; ++x) {
    reach[x] = 1u << x;
    for (Alt y = 0; y < m; ++y)
      if (y != x && margin(x, y) >= 0) reach[x] |= 1u << y;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (Alt x = 0; x < m; ++x) {
      uint32_t r = reach[x];
      for (Alt y = 0; y < m; ++y)
        if ((r >> y) & 1u) r |= reach[y];
      if (r != reach[x]) {
        reach[x] = r;
        changed = true;
      }
    }
  }
  uint32_t everyone = (1u << m) - 1;
  AltSet out;
  for (Alt x = 0; x < m; ++x)
    if (reach[x] == everyone) out = out.unite(AltSet::single(x));
  return out;
}

template <typename Margin>
AltSet pareto_impl(int m, Margin margin, int n) {
  AltSet out;
  for (Alt x = 0; x < m; ++x)
    for (Alt y = 0; y < m; ++y)
      if (y != x && margin(y, x) == n) {
        out = out.unite(AltSet::single(x));
        break;
      }
  return out;
}

}  // namespace

std::optional<Alt> condorcet_winner(const MarginVector& t) {
  return extreme_alternative(4, [&](Alt x, Alt y) { return t.margin(x, y); }, 1);
}
std::optional<Alt> condorcet_loser(const MarginVector& t) {
  return extreme_alternative(4, [&](Alt x, Alt y) { return t.margin(x, y); }, -1);
}
AltSet maximin_winners(const MarginVector& t) {
  return maximin_impl(4, [&](Alt x, Alt y) { return t.margin(x, y); });
}
Alt maximin_lex(const MarginVector& t) {
  return maximin_winners(t).members().front();
}
AltSet kemeny_winners(const MarginVector& t) {
  return kemeny_impl(4, [&](Alt x, Alt y) { return t.margin(x, y); });
}
AltSet top_cycle(const MarginVector& t) {
  return top_cycle_impl(4, [&](Alt x, Alt y) { return t.margin(x, y); });
}
AltSet pareto_excluded(const MarginVector& t, int n_min) {
  return pareto_impl(4, [&](Alt x, Alt y) { return t.margin(x, y); }, n_min);
}

std::optional<Alt> condorcet_winner(const MarginMatrix& mm) {
  return extreme_alternative(mm.m, [&](Alt x, Alt y) { return mm.g[x][y]; }, 1);
}
std::optional<Alt> condorcet_loser(const MarginMatrix& mm) {
  return extreme_alternative(mm.m, [&](Alt x, Alt y) { return mm.g[x][y]; }, -1);
}
AltSet maximin_winners(const MarginMatrix& mm) {
  return maximin_impl(mm.m, [&](Alt x, Alt y) { return mm.g[x][y]; });
}
AltSet kemeny_winners(const MarginMatrix& mm) {
  if (mm.m > 7) throw Error("kemeny winners limited to m <= 7");
  return kemeny_impl(mm.m, [&](Alt x, Alt y) { return mm.g[x][y]; });
}
AltSet top_cycle(const MarginMatrix& mm) {
  return top_cycle_impl(mm.m, [&](Alt x, Alt y) { return mm.g[x][y]; });
}
AltSet pareto_excluded(const MarginMatrix& mm) {
  return pareto_impl(mm.m, [&](Alt x, Alt y) { return mm.g[x][y]; }, mm.n);
}

namespace {
void check_permutation(const Permutation& perm, int m) {
  if (static_cast<int>(perm.size()) < m) throw Error("permutation too short");
  std::array<bool, kMaxAlternatives> seen{};
  for (int i = 0; i < m; ++i) {
    if (perm[i] < 0 || perm[i] >= m || seen[perm[i]]) throw Error("not a permutation of the alternatives");
    seen[perm[i]] = true;
  }
}
}  // namespace

Ranking relabel(const Ranking& r, const Permutation& perm) {
  check_permutation(perm, r.m());
  std::vector<Alt> order(r.m());
  for (int i = 0; i < r.m(); ++i) order[i] = perm[r.at(i)];
  return Ranking(order);
}

Profile relabel(const Profile& p, const Permutation& perm) {
  Profile out(p.m());
  for (const auto& [r, c] : p.counts()) out = out.add_voters(relabel(r, perm), c);
  return out;
}

MarginVector relabel(const MarginVector& t, const Permutation& perm) {
  check_permutation(perm, 4);
  Permutation inv(4);
  for (Alt x = 0; x < 4; ++x) inv[perm[x]] = x;
  MarginVector out;
  out.parity = t.parity;
  for (Alt x = 0; x < 4; ++x)
    for (Alt y = x + 1; y < 4; ++y) out.g[pair_index(x, y)] = t.margin(inv[x], inv[y]);
  return out;
}

AltSet relabel(AltSet s, const Permutation& perm) {
  AltSet out;
  for (Alt a : s.members()) {
    if (a >= static_cast<int>(perm.size())) throw Error("permutation too short");
    out = out.unite(AltSet::single(perm[a]));
  }
  return out;
}

Profile pad_with_bad(const Profile& p, int k) {
  if (k <= 0) throw Error("padding count must be positive");
  Profile out(p.m() + k);
  for (const auto& [r, c] : p.counts()) out = out.add_voters(pad_with_bad(r, k, p.m()), c);
  return out;
}

Ranking pad_with_bad(const Ranking& r, int k, int old_m) {
  if (r.m() != old_m) throw Error("ranking size does not match");
  std::vector<Alt> order;
  order.reserve(old_m + k);
  for (int i = 0; i < old_m; ++i) order.push_back(r.at(i));
  for (int i = 0; i < k; ++i) order.push_back(old_m + i);
  return Ranking(order);
}

AltSet upper_closure(AltSet s, const Ranking& r) {
  if (s.empty()) throw Error("closure of empty set");
  int deepest = -1;
  for (Alt a : s.members()) deepest = std::max(deepest, r.position_of(a));
  AltSet out;
  for (int i = 0; i <= deepest; ++i) out = out.unite(AltSet::single(r.at(i)));
  return out;
}

AltSet lower_closure(AltSet s, const Ranking& r) {
  if (s.empty()) throw Error("closure of empty set");
  int highest = r.m();
  for (Alt a : s.members()) highest = std::min(highest, r.position_of(a));
  AltSet out;
  for (int i = highest; i < r.m(); ++i) out = out.unite(AltSet::single(r.at(i)));
  return out;
}

int FourTables::index_of(const Ranking& r) const {
  for (int i = 0; i < 24; ++i)
    if (rankings[i] == r) return i;
  throw Error("not a four-alternative ranking");
}

const FourTables& four_tables() {
  static const FourTables tables = [] {
    FourTables t;
    auto rs = all_rankings(4);
    for (int i = 0; i < 24; ++i) {
      const Ranking& r = rs[i];
      t.rankings[i] = r;
      for (Alt x = 0; x < 4; ++x)
        for (Alt y = x + 1; y < 4; ++y)
          t.delta[i][pair_index(x, y)] = r.prefers(x, y) ? 1 : -1;
      for (Alt x = 0; x < 4; ++x) {
        t.up[i][x] = static_cast<uint8_t>(upper_closure(AltSet::single(x), r).bits);
        t.down[i][x] = static_cast<uint8_t>(lower_closure(AltSet::single(x), r).bits);
      }
    }
    for (int i = 0; i < 24; ++i) {
      Ranking rev = rs[i].reversed();
      for (int j = 0; j < 24; ++j)
        if (rs[j] == rev) t.reverse_index[i] = static_cast<uint8_t>(j);
    }
    return t;
  }();
  return tables;
}

}  // namespace noshow
