#include "noshow/cnf.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace noshow {

void EncodingConfig::validate() const {
  if (n_max < 1) throw Error("config: n_max must be at least 1");
  if (value_mode == ValueMode::Single) {
    if (!optimistic && pessimistic)
      throw Error("config: pessimistic-only participation is not a single-valued mode");
    if (!optimistic) throw Error("config: single mode requires the participation family");
  } else {
    if (!optimistic && !pessimistic)
      throw Error("config: set-valued mode requires at least one participation direction");
  }
  if (space == Space::Profile) {
    if (!base || base->empty()) throw Error("config: profile space requires a non-empty base profile");
    if (base->m() != 4) throw Error("config: profile space requires m = 4");
    if (allowed.empty()) throw Error("config: profile space requires a non-empty order list");
    for (const Ranking& r : allowed)
      if (r.m() != 4) throw Error("config: allowed orders must rank 4 alternatives");
    if (base->n() > n_max) throw Error("config: base profile already exceeds n_max");
  }
}

ProfileSpaceIndex::ProfileSpaceIndex(Profile base, std::vector<Ranking> allowed, int n_max)
    : base_(std::move(base)), allowed_(std::move(allowed)), n_max_(n_max) {
  std::sort(allowed_.begin(), allowed_.end());
  allowed_.erase(std::unique(allowed_.begin(), allowed_.end()), allowed_.end());
  const int slots = static_cast<int>(allowed_.size());
  const int budget = n_max_ - base_.n();
  if (budget < 0) throw Error("base profile already exceeds n_max");

  const auto& tables = four_tables();
  std::vector<int> order_table(slots);
  for (int j = 0; j < slots; ++j) order_table[j] = tables.index_of(allowed_[j]);

  MarginVector base_margins = margins_of_profile4(base_);
  std::vector<uint8_t> counts(slots, 0);
  layer_offsets_.push_back(0);
  // layer k: all count vectors summing to k, in ascending lexicographic order
  for (int k = 0; k <= budget; ++k) {
    std::vector<std::pair<std::vector<uint8_t>, MarginVector>> layer;
    std::vector<uint8_t> c(slots, 0);
    auto rec = [&](auto&& self, int slot, int remaining, MarginVector t) -> void {
      if (slot == slots - 1) {
        c[slot] = static_cast<uint8_t>(remaining);
        for (int i = 0; i < 6; ++i) t.g[i] += remaining * tables.delta[order_table[slot]][i];
        layer.emplace_back(c, t);
        return;
      }
      for (int take = 0; take <= remaining; ++take) {
        c[slot] = static_cast<uint8_t>(take);
        MarginVector s = t;
        for (int i = 0; i < 6; ++i) s.g[i] += take * tables.delta[order_table[slot]][i];
        self(self, slot + 1, remaining - take, s);
      }
    };
    rec(rec, 0, k, base_margins);
    std::sort(layer.begin(), layer.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [cv, t] : layer) {
      t.parity = (base_.n() + k) % 2;
      lookup_[cv] = static_cast<uint32_t>(counts_.size());
      counts_.push_back(cv);
      margins_.push_back(t);
    }
    layer_offsets_.push_back(static_cast<uint32_t>(counts_.size()));
  }
}

int ProfileSpaceIndex::voters_at(uint32_t index) const {
  if (index >= size()) throw Error("profile node out of range");
  int added = 0;
  for (uint8_t c : counts_[index]) added += c;
  return base_.n() + added;
}

Profile ProfileSpaceIndex::profile_at(uint32_t index) const {
  if (index >= size()) throw Error("profile node out of range");
  Profile p = base_;
  for (size_t j = 0; j < allowed_.size(); ++j)
    if (counts_[index][j] > 0) p = p.add_voters(allowed_[j], counts_[index][j]);
  return p;
}

uint32_t ProfileSpaceIndex::successor(uint32_t index, int order) const {
  if (index >= size()) throw Error("profile node out of range");
  std::vector<uint8_t> c = counts_[index];
  c[order] += 1;
  auto it = lookup_.find(c);
  if (it == lookup_.end()) throw Error("successor outside profile space");
  return it->second;
}

std::optional<uint32_t> ProfileSpaceIndex::find(const Profile& p) const {
  if (p.n() < base_.n()) return std::nullopt;
  std::vector<uint8_t> c(allowed_.size(), 0);
  Profile rest = p;
  for (const auto& [r, count] : base_.counts()) {
    if (rest.count_of(r) < count) return std::nullopt;
    rest = rest.remove_voters(r, count);
  }
  for (const auto& [r, count] : rest.counts()) {
    auto it = std::lower_bound(allowed_.begin(), allowed_.end(), r);
    if (it == allowed_.end() || !(*it == r)) return std::nullopt;
    c[it - allowed_.begin()] = static_cast<uint8_t>(count);
  }
  auto it = lookup_.find(c);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> nonempty_clause(uint32_t node) {
  return {var_id(node, 0), var_id(node, 1), var_id(node, 2), var_id(node, 3)};
}

std::vector<std::vector<int>> mutex_clauses(uint32_t node) {
  std::vector<std::vector<int>> out;
  for (Alt x = 0; x < 4; ++x)
    for (Alt y = x + 1; y < 4; ++y) out.push_back({-var_id(node, x), -var_id(node, y)});
  return out;
}

std::vector<std::vector<int>> node_unit_clauses(uint32_t node, const MarginVector& t,
                                                const EncodingConfig& config, int n_min) {
  std::vector<std::vector<int>> out;
  if (auto w = condorcet_winner(t)) {
    for (Alt x = 0; x < 4; ++x) out.push_back({x == *w ? var_id(node, x) : -var_id(node, x)});
    return out;
  }
  uint32_t excluded = 0;
  if (config.rule_class == RuleClass::Maximin) excluded |= ~maximin_winners(t).bits;
  if (config.rule_class == RuleClass::Kemeny) excluded |= ~kemeny_winners(t).bits;
  if (config.top_cycle_filter) excluded |= ~top_cycle(t).bits;
  if (config.pareto_filter) excluded |= pareto_excluded(t, n_min).bits;
  excluded &= 0xf;
  for (Alt x = 0; x < 4; ++x)
    if ((excluded >> x) & 1u) out.push_back({-var_id(node, x)});
  return out;
}

std::vector<std::vector<int>> participation_clauses(uint32_t from, uint32_t to,
                                                    const Ranking& r, bool optimistic) {
  const auto& tables = four_tables();
  int ri = tables.index_of(r);
  std::vector<std::vector<int>> out;
  for (Alt x = 0; x < 4; ++x) {
    std::vector<int> clause;
    if (optimistic) {
      clause.push_back(-var_id(from, x));
      for (Alt y = 0; y < 4; ++y)
        if ((tables.up[ri][x] >> y) & 1u) clause.push_back(var_id(to, y));
    } else {
      clause.push_back(-var_id(to, x));
      for (Alt y = 0; y < 4; ++y)
        if ((tables.down[ri][x] >> y) & 1u) clause.push_back(var_id(from, y));
    }
    out.push_back(std::move(clause));
  }
  return out;
}

namespace {

// buffered writer with locale-free integer formatting
class TextWriter {
 public:
  explicit TextWriter(const std::string& path) {
    if (path.empty()) return;
    file_ = std::fopen(path.c_str(), "wb");
    if (!file_) throw Error("cannot open " + path + " for writing");
    buf_.reserve(kFlushAt + 256);
  }
  ~TextWriter() {
    if (file_) {
      flush();
      std::fclose(file_);
    }
  }
  TextWriter(const TextWriter&) = delete;
  TextWriter& operator=(const TextWriter&) = delete;

  bool active() const { return file_ != nullptr; }
  void put_int(int64_t v) {
    char tmp[24];
    auto [p, ec] = std::to_chars(tmp, tmp + sizeof tmp, v);
    buf_.append(tmp, p - tmp);
    maybe_flush();
  }
  void put(char c) {
    buf_.push_back(c);
    maybe_flush();
  }
  void put(const char* s) {
    buf_.append(s);
    maybe_flush();
  }
  void put(const std::string& s) {
    buf_.append(s);
    maybe_flush();
  }
  void flush() {
    if (!buf_.empty()) {
      if (std::fwrite(buf_.data(), 1, buf_.size(), file_) != buf_.size())
        throw Error("write failure");
      buf_.clear();
    }
  }

 private:
  static constexpr size_t kFlushAt = 1 << 22;
  void maybe_flush() {
    if (buf_.size() >= kFlushAt) flush();
  }
  std::FILE* file_ = nullptr;
  std::string buf_;
};

// Uniform view over the two node spaces used by the clause stream.
struct NodeSpace {
  const TournamentIndex* tindex = nullptr;
  const ProfileSpaceIndex* pindex = nullptr;

  uint32_t size() const { return tindex ? tindex->size() : pindex->size(); }
  int voters(uint32_t i) const { return tindex ? tindex->min_voters(i) : pindex->voters_at(i); }
  MarginVector margins(uint32_t i) const {
    return tindex ? tindex->vector_at(i) : pindex->margins_at(i);
  }
  int edge_count() const {
    return tindex ? 24 : static_cast<int>(pindex->allowed().size());
  }
  const Ranking& edge_ranking(int e) const {
    return tindex ? four_tables().rankings[e] : pindex->allowed()[e];
  }
  // successor node of edge e, or nullopt if it leaves the index
  std::optional<uint32_t> edge_target(uint32_t i, int e) const {
    if (tindex) {
      MarginVector t = tindex->vector_at(i);
      const auto& tables = four_tables();
      for (int c = 0; c < 6; ++c) t.g[c] += tables.delta[e][c];
      return tindex->find(pack_margins(t));
    }
    return pindex->successor(i, e);
  }
};

struct NodeClauses {
  uint64_t count = 0;
  uint64_t condorcet = 0;
  uint64_t skips = 0;
};

// clause tally for one node, mirroring the emission pass exactly
NodeClauses count_node(const NodeSpace& space, const EncodingConfig& config, uint32_t i) {
  NodeClauses c;
  c.count = 1;  // non-empty
  if (config.value_mode == ValueMode::Single) c.count += 6;
  MarginVector t = space.margins(i);
  auto units = node_unit_clauses(i, t, config, space.voters(i));
  c.count += units.size();
  // condorcet nodes are the only source of positive units
  for (const auto& u : units)
    if (u[0] > 0) c.condorcet = 1;
  if (space.voters(i) < config.n_max) {
    int directions = (config.optimistic ? 1 : 0) + (config.pessimistic ? 1 : 0);
    for (int e = 0; e < space.edge_count(); ++e) {
      if (space.edge_target(i, e))
        c.count += 4ull * directions;
      else
        c.skips += 4ull * directions;
    }
  }
  return c;
}

void write_clause(TextWriter& cnf, TextWriter& gcnf, uint64_t group, const std::vector<int>& lits) {
  if (cnf.active()) {
    for (size_t k = 0; k < lits.size(); ++k) {
      cnf.put_int(lits[k]);
      cnf.put(' ');
    }
    cnf.put("0\n");
  }
  if (gcnf.active()) {
    gcnf.put('{');
    gcnf.put_int(static_cast<int64_t>(group));
    gcnf.put("} ");
    for (size_t k = 0; k < lits.size(); ++k) {
      gcnf.put_int(lits[k]);
      gcnf.put(' ');
    }
    gcnf.put("0\n");
  }
}

}  // namespace

EncodeResult encode(const EncodingConfig& config, const TournamentIndex* index,
                    const EncodeOutputs& outputs) {
  config.validate();

  std::optional<ProfileSpaceIndex> pindex;
  NodeSpace space;
  if (config.space == Space::Tournament) {
    if (!index) throw Error("tournament-space encoding requires an index");
    if (index->n_max() != config.n_max) throw Error("index was built for a different n_max");
    space.tindex = index;
  } else {
    pindex.emplace(*config.base, config.allowed, config.n_max);
    space.pindex = &*pindex;
  }

  EncodeResult result;
  result.variables = 4ull * space.size();
  result.groups = space.size();

  // pass 1: exact counts for the headers
  for (uint32_t i = 0; i < space.size(); ++i) {
    NodeClauses c = count_node(space, config, i);
    result.clauses += c.count;
    result.condorcet_nodes += c.condorcet;
    result.boundary_skips += c.skips;
  }

  TextWriter cnf(outputs.cnf_path);
  TextWriter gcnf(outputs.gcnf_path);
  TextWriter varmap(outputs.varmap_path);

  if (cnf.active()) {
    cnf.put("p cnf ");
    cnf.put_int(static_cast<int64_t>(result.variables));
    cnf.put(' ');
    cnf.put_int(static_cast<int64_t>(result.clauses));
    cnf.put('\n');
  }
  if (gcnf.active()) {
    gcnf.put("p gcnf ");
    gcnf.put_int(static_cast<int64_t>(result.variables));
    gcnf.put(' ');
    gcnf.put_int(static_cast<int64_t>(result.clauses));
    gcnf.put(' ');
    gcnf.put_int(static_cast<int64_t>(result.groups));
    gcnf.put('\n');
  }

  // pass 2: stream clauses in node order; groups are node-contiguous
  uint64_t emitted = 0;
  for (uint32_t i = 0; i < space.size(); ++i) {
    uint64_t group = i + 1;
    MarginVector t = space.margins(i);
    int voters = space.voters(i);

    if (varmap.active()) {
      for (Alt x = 0; x < 4; ++x) {
        varmap.put_int(var_id(i, x));
        varmap.put(' ');
        varmap.put_int(i);
        varmap.put(' ');
        varmap.put_int(voters);
        if (space.tindex) {
          for (int c = 0; c < 6; ++c) {
            varmap.put(' ');
            varmap.put_int(t.g[c]);
          }
        } else {
          varmap.put(' ');
          varmap.put(space.pindex->profile_at(i).to_string());
        }
        varmap.put(' ');
        varmap.put(alt_label(x));
        varmap.put('\n');
      }
    }

    write_clause(cnf, gcnf, group, nonempty_clause(i));
    ++emitted;
    if (config.value_mode == ValueMode::Single) {
      for (const auto& cl : mutex_clauses(i)) {
        write_clause(cnf, gcnf, group, cl);
        ++emitted;
      }
    }
    for (const auto& cl : node_unit_clauses(i, t, config, voters)) {
      write_clause(cnf, gcnf, group, cl);
      ++emitted;
    }
    if (voters < config.n_max) {
      for (int e = 0; e < space.edge_count(); ++e) {
        auto target = space.edge_target(i, e);
        if (!target) continue;  // frontier boundary, tallied in pass 1
        const Ranking& r = space.edge_ranking(e);
        if (config.optimistic || config.value_mode == ValueMode::Single) {
          for (const auto& cl : participation_clauses(i, *target, r, true)) {
            write_clause(cnf, gcnf, group, cl);
            ++emitted;
          }
        }
        if (config.value_mode == ValueMode::SetValued && config.pessimistic) {
          for (const auto& cl : participation_clauses(i, *target, r, false)) {
            write_clause(cnf, gcnf, group, cl);
            ++emitted;
          }
        }
      }
    }
  }

  if (emitted != result.clauses)
    throw Error("internal clause-count mismatch: header " + std::to_string(result.clauses) +
                " vs emitted " + std::to_string(emitted));
  return result;
}

std::vector<VarMapRow> read_varmap(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open varmap " + path);
  std::vector<VarMapRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    VarMapRow row;
    std::string tail, alt_text;
    if (!(ss >> row.var >> row.node >> row.voters >> tail)) throw Error("malformed varmap line: " + line);
    if (!tail.empty() && (tail[0] == '-' || (tail[0] >= '0' && tail[0] <= '9'))) {
      row.margins.g[0] = std::stoi(tail);
      for (int c = 1; c < 6; ++c)
        if (!(ss >> row.margins.g[c])) throw Error("malformed varmap line: " + line);
      row.margins.parity = ((row.voters % 2) + 2) % 2;
    } else {
      row.profile_text = tail;
    }
    if (!(ss >> alt_text) || alt_text.size() != 1) throw Error("malformed varmap line: " + line);
    row.alt = alt_from_label(alt_text[0]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace noshow
