#include "noshow/rules.hpp"

#include <cstdio>
#include <fstream>

namespace noshow {

Alt RuleTable::single_at(uint32_t node) const {
  AltSet s = at(node);
  if (s.size() != 1) throw Error("table entry is not a singleton at node " + std::to_string(node));
  return s.members().front();
}

RuleTable decode_model(const Model& model, const TournamentIndex& index, ValueMode mode) {
  if (model.size() < 4ull * index.size() + 1) throw Error("model does not cover the index");
  RuleTable table;
  table.mode = mode;
  table.n_max = index.n_max();
  table.choices.resize(index.size());
  for (uint32_t i = 0; i < index.size(); ++i) {
    uint8_t mask = 0;
    for (Alt x = 0; x < 4; ++x)
      if (model[var_id(i, x)]) mask |= 1u << x;
    int bits = AltSet{mask}.size();
    if (mode == ValueMode::Single ? bits != 1 : bits == 0)
      throw Error("mode violation at node " + std::to_string(i));
    table.choices[i] = mask;
  }
  return table;
}

Model table_to_model(const RuleTable& table, const TournamentIndex& index) {
  if (table.choices.size() != index.size()) throw Error("table does not cover the index");
  Model model(4ull * index.size() + 1, 0);
  for (uint32_t i = 0; i < index.size(); ++i)
    for (Alt x = 0; x < 4; ++x)
      if ((table.choices[i] >> x) & 1u) model[var_id(i, x)] = 1;
  return model;
}

std::string format_entry(const MarginVector& t, int n, AltSet choice) {
  if (choice.empty()) throw Error("entry with empty choice set");
  return choice.to_string() + ",#" + std::to_string(n) + "," + t.to_string();
}

ParsedEntry parse_entry(const std::string& line) {
  ParsedEntry entry;
  size_t i = 0;
  auto fail = [&](const std::string& what) {
    throw Error("parse error at position " + std::to_string(i) + ": " + what);
  };
  while (i < line.size() && line[i] != ',') {
    entry.choice.bits |= 1u << alt_from_label(line[i]);
    ++i;
  }
  if (entry.choice.empty()) fail("missing alternative");
  if (i >= line.size() || line[i] != ',') fail("expected ','");
  ++i;
  if (i >= line.size() || line[i] != '#') fail("expected '#'");
  ++i;
  size_t start = i;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == start) fail("expected voter count");
  entry.n = std::stoi(line.substr(start, i - start));
  if (i >= line.size() || line[i] != ',') fail("expected ','");
  ++i;
  if (i >= line.size() || line[i] != '(') fail("expected '('");
  ++i;
  for (int c = 0; c < 6; ++c) {
    start = i;
    if (i < line.size() && line[i] == '-') ++i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i == start) fail("expected margin");
    entry.margins.g[c] = std::stoi(line.substr(start, i - start));
    char expect = c < 5 ? ',' : ')';
    if (i >= line.size() || line[i] != expect) fail(std::string("expected '") + expect + "'");
    ++i;
  }
  if (i != line.size()) fail("trailing characters");
  entry.margins.parity = ((entry.n % 2) + 2) % 2;
  return entry;
}

void write_table(const RuleTable& table, const TournamentIndex& index, const std::string& path) {
  if (table.choices.size() != index.size()) throw Error("table does not cover the index");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error("cannot open " + path + " for writing");
  std::string buf;
  buf.reserve(1 << 22);
  for (uint32_t i = 0; i < index.size(); ++i) {
    buf += format_entry(index.vector_at(i), index.min_voters(i), table.at(i));
    buf += '\n';
    if (buf.size() > (1 << 22) - 64) {
      std::fwrite(buf.data(), 1, buf.size(), f);
      buf.clear();
    }
  }
  std::fwrite(buf.data(), 1, buf.size(), f);
  std::fclose(f);
}

RuleTable read_table(const std::string& path, const TournamentIndex& index) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open table " + path);
  RuleTable table;
  table.n_max = index.n_max();
  table.choices.assign(index.size(), 0);
  std::string line;
  uint64_t line_no = 0;
  bool all_single = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ParsedEntry entry;
    try {
      entry = parse_entry(line);
    } catch (const Error& e) {
      throw Error("line " + std::to_string(line_no) + ": " + e.what());
    }
    auto node = index.find(entry.margins);
    if (!node) throw Error("line " + std::to_string(line_no) + ": tournament not in the index");
    if (table.choices[*node] != 0)
      throw Error("line " + std::to_string(line_no) + ": duplicate tournament");
    table.choices[*node] = static_cast<uint8_t>(entry.choice.bits);
    if (entry.choice.size() != 1) all_single = false;
  }
  for (uint32_t i = 0; i < index.size(); ++i)
    if (table.choices[i] == 0)
      throw Error("table is missing node " + std::to_string(i) + " of the index");
  table.mode = all_single ? ValueMode::Single : ValueMode::SetValued;
  return table;
}

void VerifyReport::add(std::string kind, uint32_t node, std::string detail) {
  ++violation_count;
  if (violations.size() < kMaxListed)
    violations.push_back({std::move(kind), node, std::move(detail)});
}

std::string VerifyReport::to_text() const {
  std::string out;
  for (const Violation& v : violations)
    out += v.kind + " " + std::to_string(v.node) + " " + v.detail + "\n";
  if (violation_count > violations.size())
    out += "... and " + std::to_string(violation_count - violations.size()) + " more\n";
  return out;
}

namespace {

// shared edge walk: calls fn(from, to, ranking_index) for every indexed edge
template <typename Fn>
uint64_t for_each_edge(const TournamentIndex& index, Fn&& fn) {
  const auto& tables = four_tables();
  uint64_t edges = 0;
  for (uint32_t i = 0; i < index.size(); ++i) {
    if (index.min_voters(i) >= index.n_max()) continue;
    MarginVector t = index.vector_at(i);
    for (int ri = 0; ri < 24; ++ri) {
      MarginVector s = t;
      for (int c = 0; c < 6; ++c) s.g[c] += tables.delta[ri][c];
      auto target = index.find(pack_margins(s));
      if (!target) throw Error("incomplete index: successor missing");
      fn(i, *target, ri);
      ++edges;
    }
  }
  return edges;
}

int best_position(uint8_t mask, const Ranking& r) {
  for (int pos = 0; pos < 4; ++pos)
    if ((mask >> r.at(pos)) & 1u) return pos;
  throw Error("empty choice set");
}

int worst_position(uint8_t mask, const Ranking& r) {
  for (int pos = 3; pos >= 0; --pos)
    if ((mask >> r.at(pos)) & 1u) return pos;
  throw Error("empty choice set");
}

}  // namespace

VerifyReport verify_participation(const RuleTable& table, const TournamentIndex& index) {
  if (table.mode != ValueMode::Single) throw Error("participation check requires a single-valued table");
  if (table.choices.size() != index.size()) throw Error("table does not cover the index");
  const auto& tables = four_tables();
  VerifyReport report;
  report.checked = for_each_edge(index, [&](uint32_t from, uint32_t to, int ri) {
    Alt before = table.single_at(from);
    Alt after = table.single_at(to);
    const Ranking& r = tables.rankings[ri];
    if (r.position_of(after) > r.position_of(before))
      report.add("participation", from,
                 r.to_string() + " turns " + std::string(1, alt_label(before)) + " into " +
                     std::string(1, alt_label(after)) + " at node " + std::to_string(to));
  });
  return report;
}

namespace {

template <typename MemberCheck>
VerifyReport node_membership_check(const RuleTable& table, const TournamentIndex& index,
                                   const char* kind, MemberCheck&& allowed_set) {
  if (table.choices.size() != index.size()) throw Error("table does not cover the index");
  VerifyReport report;
  for (uint32_t i = 0; i < index.size(); ++i) {
    AltSet allowed = allowed_set(i);
    AltSet chosen = table.at(i);
    if (!chosen.subset_of(allowed))
      report.add(kind, i, "chose " + chosen.to_string() + ", allowed " + allowed.to_string());
    ++report.checked;
  }
  return report;
}

}  // namespace

VerifyReport verify_condorcet(const RuleTable& table, const TournamentIndex& index) {
  return node_membership_check(table, index, "condorcet", [&](uint32_t i) {
    auto w = condorcet_winner(index.vector_at(i));
    return w ? AltSet::single(*w) : AltSet::all(4);
  });
}

VerifyReport verify_topcycle(const RuleTable& table, const TournamentIndex& index) {
  return node_membership_check(table, index, "topcycle",
                               [&](uint32_t i) { return top_cycle(index.vector_at(i)); });
}

VerifyReport verify_pareto(const RuleTable& table, const TournamentIndex& index) {
  return node_membership_check(table, index, "pareto", [&](uint32_t i) {
    return AltSet::all(4).minus(pareto_excluded(index.vector_at(i), index.min_voters(i)));
  });
}

VerifyReport verify_optimistic(const RuleTable& table, const TournamentIndex& index) {
  if (table.choices.size() != index.size()) throw Error("table does not cover the index");
  const auto& tables = four_tables();
  VerifyReport report;
  report.checked = for_each_edge(index, [&](uint32_t from, uint32_t to, int ri) {
    const Ranking& r = tables.rankings[ri];
    if (best_position(table.choices[to], r) > best_position(table.choices[from], r))
      report.add("optimistic", from,
                 "best under " + r.to_string() + " worsens at node " + std::to_string(to));
  });
  return report;
}

VerifyReport verify_pessimistic(const RuleTable& table, const TournamentIndex& index) {
  if (table.choices.size() != index.size()) throw Error("table does not cover the index");
  const auto& tables = four_tables();
  VerifyReport report;
  report.checked = for_each_edge(index, [&](uint32_t from, uint32_t to, int ri) {
    const Ranking& r = tables.rankings[ri];
    if (worst_position(table.choices[to], r) > worst_position(table.choices[from], r))
      report.add("pessimistic", from,
                 "worst under " + r.to_string() + " worsens at node " + std::to_string(to));
  });
  return report;
}

std::string RuleStats::to_text() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "nodes %llu\ncondorcet_fraction %.6f\nmaximin_fraction %.6f\n"
                "kemeny_fraction %.6f\nmaximin_lex_agreement %.6f\n",
                static_cast<unsigned long long>(nodes), condorcet_fraction, maximin_fraction,
                kemeny_fraction, maximin_lex_agreement);
  return buf;
}

RuleStats compute_stats(const RuleTable& table, const TournamentIndex& index) {
  if (table.mode != ValueMode::Single) throw Error("statistics require a single-valued table");
  if (table.choices.size() != index.size()) throw Error("table does not cover the index");
  RuleStats stats;
  stats.nodes = index.size();
  uint64_t condorcet = 0, maximin = 0, kemeny = 0, lex = 0;
  for (uint32_t i = 0; i < index.size(); ++i) {
    MarginVector t = index.vector_at(i);
    Alt chosen = table.single_at(i);
    if (condorcet_winner(t)) ++condorcet;
    AltSet mm = maximin_winners(t);
    if (mm.contains(chosen)) ++maximin;
    if (kemeny_winners(t).contains(chosen)) ++kemeny;
    if (mm.members().front() == chosen) ++lex;
  }
  stats.condorcet_fraction = static_cast<double>(condorcet) / stats.nodes;
  stats.maximin_fraction = static_cast<double>(maximin) / stats.nodes;
  stats.kemeny_fraction = static_cast<double>(kemeny) / stats.nodes;
  stats.maximin_lex_agreement = static_cast<double>(lex) / stats.nodes;
  return stats;
}

RuleTable maximin_lex_table(const TournamentIndex& index) {
  RuleTable table;
  table.mode = ValueMode::Single;
  table.n_max = index.n_max();
  table.choices.resize(index.size());
  for (uint32_t i = 0; i < index.size(); ++i)
    table.choices[i] = static_cast<uint8_t>(1u << maximin_lex(index.vector_at(i)));
  return table;
}

}  // namespace noshow
