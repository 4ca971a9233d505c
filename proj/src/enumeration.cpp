#include "noshow/enumeration.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>

namespace noshow {

namespace {
constexpr int kBias = 128;

// 5% load headroom over the next power of two
uint64_t table_capacity(size_t n) {
  uint64_t cap = 64;
  while (cap < 2 * n + 16) cap <<= 1;
  return cap;
}

uint64_t mix(uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}
}  // namespace

uint64_t pack_margins(const MarginVector& t) {
  uint64_t key = 0;
  for (int i = 0; i < 6; ++i) {
    int v = t.g[i] + kBias;
    if (v < 1 || v > 255) throw Error("margin out of packable range");
    key = (key << 8) | static_cast<uint64_t>(v);
  }
  return key;
}

MarginVector unpack_margins(uint64_t key, int parity) {
  MarginVector t;
  for (int i = 5; i >= 0; --i) {
    t.g[i] = static_cast<int>(key & 0xff) - kBias;
    key >>= 8;
  }
  t.parity = parity;
  return t;
}

TournamentIndex TournamentIndex::enumerate(int n_max, const std::optional<Profile>& seed) {
  if (n_max < 1) throw Error("n_max must be at least 1");
  if (n_max > 100) throw Error("n_max out of supported range");

  TournamentIndex index;
  index.n_max_ = n_max;

  const auto& tables = four_tables();
  std::vector<uint64_t> frontier;
  uint64_t start_key;
  if (seed) {
    MarginVector t0 = margins_of_profile4(*seed);
    index.base_voters_ = seed->n();
    index.first_layer_ = seed->n();
    if (seed->n() > n_max) throw Error("seed profile already exceeds n_max");
    start_key = pack_margins(t0);
  } else {
    index.base_voters_ = 0;
    index.first_layer_ = 1;
    start_key = pack_margins(MarginVector{});
  }

  // seen set doubles as the final lookup table; sized generously up front is
  // not possible (unknown), so grow by rehash
  std::vector<uint64_t> seen_keys(1 << 16, 0);
  std::vector<uint8_t> seen_used(1 << 16, 0);
  uint64_t mask = seen_keys.size() - 1;
  size_t seen_count = 0;

  auto rehash = [&](size_t need) {
    uint64_t cap = table_capacity(need);
    if (cap <= seen_keys.size()) return;
    std::vector<uint64_t> nk(cap, 0);
    std::vector<uint8_t> nu(cap, 0);
    uint64_t nmask = cap - 1;
    for (size_t i = 0; i < seen_keys.size(); ++i) {
      if (!seen_used[i]) continue;
      uint64_t h = mix(seen_keys[i]) & nmask;
      while (nu[h]) h = (h + 1) & nmask;
      nk[h] = seen_keys[i];
      nu[h] = 1;
    }
    seen_keys.swap(nk);
    seen_used.swap(nu);
    mask = nmask;
  };

  auto insert_if_new = [&](uint64_t key) -> bool {
    uint64_t h = mix(key) & mask;
    while (seen_used[h]) {
      if (seen_keys[h] == key) return false;
      h = (h + 1) & mask;
    }
    seen_keys[h] = key;
    seen_used[h] = 1;
    ++seen_count;
    return true;
  };

  index.layer_offsets_.push_back(0);
  if (seed) {
    insert_if_new(start_key);
    index.keys_.push_back(start_key);
    index.layer_offsets_.push_back(1);
    frontier.push_back(start_key);
  } else {
    // the all-zero tournament is the seed of the search but is no electorate
    insert_if_new(start_key);
    frontier.push_back(start_key);
  }

  std::vector<uint64_t> next;
  for (int k = index.first_layer_ + (seed ? 1 : 0); k <= n_max; ++k) {
    next.clear();
    rehash(seen_count + frontier.size() * 24);
    for (uint64_t key : frontier) {
      MarginVector t = unpack_margins(key, 0);
      for (int ri = 0; ri < 24; ++ri) {
        uint64_t succ = 0;
        for (int i = 0; i < 6; ++i) {
          int v = t.g[i] + tables.delta[ri][i] + kBias;
          succ = (succ << 8) | static_cast<uint64_t>(v);
        }
        if (insert_if_new(succ)) next.push_back(succ);
      }
    }
    std::sort(next.begin(), next.end());
    index.keys_.insert(index.keys_.end(), next.begin(), next.end());
    index.layer_offsets_.push_back(static_cast<uint32_t>(index.keys_.size()));
    frontier.swap(next);
  }

  // release the BFS working set before building the final lookup table
  seen_keys = {};
  seen_used = {};
  index.build_lookup();
  return index;
}

void TournamentIndex::build_lookup() {
  uint64_t cap = table_capacity(keys_.size());
  slot_keys_.assign(cap, 0);
  slot_values_.assign(cap, 0);
  slot_mask_ = cap - 1;
  for (uint32_t i = 0; i < keys_.size(); ++i) {
    uint64_t h = mix(keys_[i]) & slot_mask_;
    while (slot_keys_[h] != 0) h = (h + 1) & slot_mask_;
    slot_keys_[h] = keys_[i];
    slot_values_[h] = i;
  }
}

std::optional<uint32_t> TournamentIndex::find(uint64_t key) const {
  uint64_t h = mix(key) & slot_mask_;
  while (slot_keys_[h] != 0) {
    if (slot_keys_[h] == key) return slot_values_[h];
    h = (h + 1) & slot_mask_;
  }
  return std::nullopt;
}

std::optional<uint32_t> TournamentIndex::find(const MarginVector& t) const {
  return find(pack_margins(t));
}

MarginVector TournamentIndex::vector_at(uint32_t index) const {
  if (index >= keys_.size()) throw Error("tournament index out of range");
  return unpack_margins(keys_[index], min_voters(index) % 2);
}

int TournamentIndex::min_voters(uint32_t index) const {
  if (index >= keys_.size()) throw Error("tournament index out of range");
  auto it = std::upper_bound(layer_offsets_.begin(), layer_offsets_.end(), index);
  int layer_pos = static_cast<int>(it - layer_offsets_.begin()) - 1;
  return first_layer_ + layer_pos;
}

std::pair<uint32_t, uint32_t> TournamentIndex::layer_range(int k) const {
  int pos = k - first_layer_;
  if (pos < 0 || pos + 1 >= static_cast<int>(layer_offsets_.size()))
    throw Error("layer out of range");
  return {layer_offsets_[pos], layer_offsets_[pos + 1]};
}

std::vector<LayerStats> TournamentIndex::stats() const {
  std::vector<LayerStats> out;
  uint64_t cum = 0;
  for (int k = first_layer_; k <= n_max_; ++k) {
    auto [lo, hi] = layer_range(k);
    cum += hi - lo;
    out.push_back({k, hi - lo, cum});
  }
  return out;
}

std::array<MarginVector, 24> TournamentIndex::successors(const MarginVector& t) {
  const auto& tables = four_tables();
  std::array<MarginVector, 24> out;
  for (int ri = 0; ri < 24; ++ri) {
    for (int i = 0; i < 6; ++i) out[ri].g[i] = t.g[i] + tables.delta[ri][i];
    out[ri].parity = 1 - t.parity;
  }
  return out;
}

void TournamentIndex::dump(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot open " + path + " for writing");
  std::string buf;
  buf.reserve(1 << 22);
  for (uint32_t i = 0; i < keys_.size(); ++i) {
    MarginVector t = unpack_margins(keys_[i], 0);
    buf += std::to_string(i);
    buf += ' ';
    buf += std::to_string(min_voters(i));
    for (int c = 0; c < 6; ++c) {
      buf += ' ';
      buf += std::to_string(t.g[c]);
    }
    buf += '\n';
    if (buf.size() > (1 << 22) - 128) {
      std::fwrite(buf.data(), 1, buf.size(), f);
      buf.clear();
    }
  }
  std::fwrite(buf.data(), 1, buf.size(), f);
  std::fclose(f);
}

void TournamentIndex::dump_stats(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot open " + path + " for writing");
  for (const LayerStats& s : stats())
    std::fprintf(f, "%d %llu %llu\n", s.voters, static_cast<unsigned long long>(s.new_vectors),
                 static_cast<unsigned long long>(s.cumulative));
  std::fclose(f);
}

namespace {
void oracle_rec(const FourTables& tables, int next_ranking, int remaining,
                MarginVector t, std::vector<uint64_t>& out) {
  out.push_back(pack_margins(t));
  if (remaining == 0) return;
  for (int ri = next_ranking; ri < 24; ++ri) {
    MarginVector s = t;
    for (int i = 0; i < 6; ++i) s.g[i] += tables.delta[ri][i];
    oracle_rec(tables, ri, remaining - 1, s, out);
  }
}
}  // namespace

std::vector<uint64_t> oracle_enumerate(int n_max) {
  if (n_max < 1) throw Error("n_max must be at least 1");
  if (n_max > 5) throw Error("oracle limit exceeded");
  const auto& tables = four_tables();
  std::vector<uint64_t> out;
  for (int ri = 0; ri < 24; ++ri) {
    MarginVector t;
    for (int i = 0; i < 6; ++i) t.g[i] = tables.delta[ri][i];
    oracle_rec(tables, ri, n_max - 1, t, out);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace noshow
