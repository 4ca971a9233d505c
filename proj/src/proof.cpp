#include "noshow/proof.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace noshow {

namespace {
constexpr int kGood = 4;  // ids >= kGood are padding alternatives

AltSet good_set() { return AltSet::all(kGood); }
}  // namespace

ProofDocument parse_certificate_text(const std::string& text) {
  ProofDocument doc;
  bool have_rule = false, have_root = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fail = [&](const std::string& what) {
      throw Error("certificate line " + std::to_string(line_no) + ": " + what);
    };
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string word;
    ss >> word;
    if (word == "rule") {
      std::string cls;
      ss >> cls;
      if (cls == "condorcet")
        doc.rule_class = RuleClass::Condorcet;
      else if (cls == "maximin")
        doc.rule_class = RuleClass::Maximin;
      else if (cls == "kemeny")
        doc.rule_class = RuleClass::Kemeny;
      else
        fail("unknown rule class '" + cls + "'");
      have_rule = true;
    } else if (word == "node") {
      int id;
      std::string profile_text;
      if (!(ss >> id >> profile_text)) fail("malformed node line");
      if (doc.nodes.count(id)) fail("duplicate node id");
      doc.nodes[id] = Profile::parse(profile_text);
    } else if (word == "root") {
      if (have_root) fail("duplicate root line");
      std::string tok;
      if (!(ss >> doc.root >> tok) || tok != "cases") fail("malformed root line");
      while (ss >> tok) {
        if (tok == "sym") {
          std::string perm_text;
          if (!(ss >> perm_text)) fail("missing permutation");
          Permutation perm(perm_text.size());
          for (size_t i = 0; i < perm_text.size(); ++i) perm[i] = alt_from_label(perm_text[i]);
          doc.sym = perm;
          break;
        }
        doc.root_cases.push_back(AltSet::parse(tok));
      }
      if (doc.root_cases.empty()) fail("root needs at least one case set");
      have_root = true;
    } else if (word == "edge") {
      ProofEdge e;
      std::string op, ranking_text, from_set, arrow, to_set;
      if (!(ss >> e.from >> e.to >> op >> e.count >> ranking_text >> from_set >> arrow >> to_set))
        fail("malformed edge line");
      if (op == "+")
        e.add = true;
      else if (op == "-")
        e.add = false;
      else
        fail("edge op must be + or -");
      if (arrow != "->") fail("expected '->'");
      if (e.count < 1) fail("edge count must be positive");
      e.ranking = Ranking::parse(ranking_text);
      e.s_from = AltSet::parse(from_set);
      e.s_to = AltSet::parse(to_set);
      doc.edges.push_back(std::move(e));
    } else if (word == "leaf") {
      ProofLeaf lf;
      std::string tok, winner;
      if (!(ss >> lf.node >> tok >> winner) || tok != "winner" || winner.size() != 1)
        fail("malformed leaf line");
      lf.winner = alt_from_label(winner[0]);
      doc.leaves.push_back(lf);
    } else {
      fail("unknown directive '" + word + "'");
    }
  }
  if (!have_rule) throw Error("certificate lacks a rule line");
  if (!have_root) throw Error("certificate lacks a root line");
  if (doc.nodes.empty()) throw Error("certificate has no nodes");
  doc.m = doc.nodes.begin()->second.m();
  return doc;
}

ProofDocument load_certificate(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open certificate " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_certificate_text(buf.str());
}

std::string serialize_certificate(const ProofDocument& doc) {
  std::string out = "rule ";
  switch (doc.rule_class) {
    case RuleClass::Condorcet: out += "condorcet"; break;
    case RuleClass::Maximin: out += "maximin"; break;
    case RuleClass::Kemeny: out += "kemeny"; break;
  }
  out += '\n';
  for (const auto& [id, profile] : doc.nodes)
    out += "node " + std::to_string(id) + " " + profile.to_string() + "\n";
  out += "root " + std::to_string(doc.root) + " cases";
  for (AltSet s : doc.root_cases) out += " " + s.to_string();
  if (doc.sym) {
    out += " sym ";
    for (int i = 0; i < doc.m; ++i) out += alt_label((*doc.sym)[i]);
  }
  out += '\n';
  for (const ProofEdge& e : doc.edges)
    out += "edge " + std::to_string(e.from) + " " + std::to_string(e.to) + " " +
           (e.add ? "+" : "-") + " " + std::to_string(e.count) + " " + e.ranking.to_string() +
           " " + e.s_from.to_string() + " -> " + e.s_to.to_string() + "\n";
  for (const ProofLeaf& lf : doc.leaves)
    out += "leaf " + std::to_string(lf.node) + " winner " + std::string(1, alt_label(lf.winner)) +
           "\n";
  return out;
}

ForcedSet rule_winner_set(RuleClass rule_class, const Profile& profile) {
  MarginMatrix mm = margins_of_profile(profile);
  switch (rule_class) {
    case RuleClass::Condorcet: {
      auto w = condorcet_winner(mm);
      if (!w) return {false, AltSet{}};
      return {true, AltSet::single(*w)};
    }
    case RuleClass::Maximin:
      return {true, maximin_winners(mm)};
    case RuleClass::Kemeny:
      return {true, kemeny_winners(mm)};
  }
  throw Error("unreachable");
}

namespace {

std::string edge_name(const ProofEdge& e) {
  return "edge " + std::to_string(e.from) + "->" + std::to_string(e.to);
}

// closure of the claim under the edge, restricted to original alternatives
AltSet edge_closure(const ProofEdge& e, AltSet claim) {
  AltSet closed = e.add ? upper_closure(claim, e.ranking) : lower_closure(claim, e.ranking);
  return closed.intersect(good_set());
}

std::string margins_text(const Profile& p) {
  MarginMatrix mm = margins_of_profile(p);
  std::string out = "margins";
  for (Alt x = 0; x < mm.m; ++x)
    for (Alt y = x + 1; y < mm.m; ++y)
      out += " g(" + std::string(1, alt_label(x)) + "," + std::string(1, alt_label(y)) +
             ")=" + std::to_string(mm.g[x][y]);
  return out;
}

}  // namespace

CheckItem check_edge(const ProofDocument& doc, const ProofEdge& edge) {
  CheckItem item{"edge", edge_name(edge), true, ""};
  auto from_it = doc.nodes.find(edge.from);
  auto to_it = doc.nodes.find(edge.to);
  if (from_it == doc.nodes.end() || to_it == doc.nodes.end()) {
    item.ok = false;
    item.kind = "structure";
    item.detail = "edge references a missing node";
    return item;
  }
  Profile expected;
  try {
    expected = edge.add ? from_it->second.add_voters(edge.ranking, edge.count)
                        : from_it->second.remove_voters(edge.ranking, edge.count);
  } catch (const Error& e) {
    item.ok = false;
    item.kind = "structure";
    item.detail = std::string("profile arithmetic failed: ") + e.what();
    return item;
  }
  if (!(expected == to_it->second)) {
    item.ok = false;
    item.kind = "structure";
    item.detail = "target profile does not equal the from-profile " +
                  std::string(edge.add ? "plus " : "minus ") + std::to_string(edge.count) + "*" +
                  edge.ranking.to_string();
    return item;
  }
  if (edge.s_from.empty() || !edge.s_from.subset_of(good_set())) {
    item.ok = false;
    item.detail = "claim set must be a non-empty subset of the original alternatives";
    return item;
  }
  AltSet closed = edge_closure(edge, edge.s_from);
  if (!closed.subset_of(edge.s_to)) {
    item.ok = false;
    item.detail = "closure " + closed.to_string() + " of " + edge.s_from.to_string() +
                  " under " + (edge.add ? std::string("+") : std::string("-")) +
                  edge.ranking.to_string() + " exceeds declared " + edge.s_to.to_string();
  }
  return item;
}

CheckItem check_leaf(const ProofDocument& doc, const ProofLeaf& leaf, AltSet incoming_claim) {
  CheckItem item{"leaf", "leaf " + std::to_string(leaf.node), true, ""};
  auto it = doc.nodes.find(leaf.node);
  if (it == doc.nodes.end()) {
    item.ok = false;
    item.kind = "structure";
    item.detail = "leaf references a missing node";
    return item;
  }
  ForcedSet w = rule_winner_set(doc.rule_class, it->second);
  if (!w.forced || w.set.empty()) {
    item.ok = false;
    item.detail = "no forced winner set at the leaf; " + margins_text(it->second);
    return item;
  }
  if (!w.set.contains(leaf.winner)) {
    item.ok = false;
    item.detail = "declared winner " + std::string(1, alt_label(leaf.winner)) +
                  " is not in the computed winner set " + w.set.to_string() + "; " +
                  margins_text(it->second);
    return item;
  }
  if (!incoming_claim.intersect(w.set).empty()) {
    item.ok = false;
    item.detail = "winner set " + w.set.to_string() + " meets the incoming claim " +
                  incoming_claim.to_string() + ", no contradiction";
  }
  return item;
}

std::string CheckReport::to_text() const {
  std::string out;
  for (const CheckItem& item : items) {
    out += item.ok ? "ok   " : "FAIL ";
    out += item.kind + " " + item.subject;
    if (!item.detail.empty()) out += ": " + item.detail;
    out += '\n';
  }
  out += valid ? "VALID\n" : "INVALID\n";
  return out;
}

CheckReport check_document(const ProofDocument& doc) {
  CheckReport report;
  auto add = [&](CheckItem item) { report.items.push_back(std::move(item)); };
  auto structural_fail = [&](const std::string& subject, const std::string& detail) {
    add({"structure", subject, false, detail});
  };

  if (!doc.nodes.count(doc.root)) {
    structural_fail("root", "root node missing");
    report.valid = false;
    return report;
  }

  // padding discipline: alternatives beyond the original four must sit at the
  // bottom of every ranking in every profile and on every edge
  if (doc.m > kGood) {
    auto padded_ok = [&](const Ranking& r) {
      for (int pos = 0; pos < r.m(); ++pos)
        if (pos >= kGood && r.at(pos) < kGood) return false;
      for (int pos = kGood; pos + 1 < r.m(); ++pos)
        if (r.at(pos) >= r.at(pos + 1)) return false;  // fixed padding order
      return true;
    };
    for (const auto& [id, profile] : doc.nodes)
      for (const auto& [r, c] : profile.counts())
        if (!padded_ok(r))
          structural_fail("node " + std::to_string(id),
                          "padding alternatives not at the bottom of " + r.to_string());
    for (const ProofEdge& e : doc.edges)
      if (!padded_ok(e.ranking))
        structural_fail(edge_name(e), "padding alternatives not at the bottom of the edge ranking");
  }

  // tree shape
  std::map<int, std::vector<const ProofEdge*>> outgoing;
  std::map<int, const ProofEdge*> incoming;
  for (const ProofEdge& e : doc.edges) {
    if (!doc.nodes.count(e.from) || !doc.nodes.count(e.to)) {
      structural_fail(edge_name(e), "edge references a missing node");
      continue;
    }
    outgoing[e.from].push_back(&e);
    if (e.to == doc.root) {
      structural_fail(edge_name(e), "root cannot have an incoming edge");
      continue;
    }
    if (incoming.count(e.to))
      structural_fail(edge_name(e), "node " + std::to_string(e.to) + " has two incoming edges");
    else
      incoming[e.to] = &e;
  }
  for (const auto& [id, profile] : doc.nodes) {
    if (profile.empty()) structural_fail("node " + std::to_string(id), "empty electorate");
    if (profile.m() != doc.m)
      structural_fail("node " + std::to_string(id), "alternative count differs from the document");
    if (id != doc.root && !incoming.count(id))
      structural_fail("node " + std::to_string(id), "unreachable node (no incoming edge)");
  }

  std::map<int, const ProofLeaf*> leaf_at;
  for (const ProofLeaf& lf : doc.leaves) {
    if (!doc.nodes.count(lf.node)) {
      structural_fail("leaf " + std::to_string(lf.node), "leaf references a missing node");
      continue;
    }
    if (leaf_at.count(lf.node))
      structural_fail("leaf " + std::to_string(lf.node), "duplicate leaf declaration");
    leaf_at[lf.node] = &lf;
    if (outgoing.count(lf.node))
      structural_fail("leaf " + std::to_string(lf.node), "declared leaf has outgoing edges");
  }

  // symmetry: the permutation must fix the root profile
  if (doc.sym) {
    const Permutation& perm = *doc.sym;
    bool perm_ok = static_cast<int>(perm.size()) == doc.m;
    if (perm_ok) {
      try {
        Profile image = relabel(doc.nodes.at(doc.root), perm);
        if (!(image == doc.nodes.at(doc.root))) {
          add({"symmetry", "root", false, "permutation does not fix the root profile"});
          perm_ok = false;
        }
      } catch (const Error& e) {
        add({"symmetry", "root", false, e.what()});
        perm_ok = false;
      }
    } else {
      add({"symmetry", "root", false, "permutation length differs from the document"});
    }
    if (perm_ok) add({"symmetry", "root", true, "root profile is fixed by the permutation"});
  }

  // root coverage: explicit cases plus their orbit under the symmetry
  {
    AltSet covered;
    for (AltSet c : doc.root_cases) covered = covered.unite(c.intersect(good_set()));
    if (doc.sym) {
      AltSet orbit = covered;
      for (int step = 0; step < kGood; ++step) {
        AltSet next;
        for (Alt a : orbit.members()) next = next.unite(AltSet::single((*doc.sym)[a]));
        orbit = orbit.unite(next.intersect(good_set()));
      }
      covered = orbit;
    }
    bool ok = covered == good_set();
    add({"root", "cases", ok,
         ok ? "cases cover all alternatives" : "cases cover only " + covered.to_string()});
  }

  // per-edge soundness and arithmetic
  for (const ProofEdge& e : doc.edges) add(check_edge(doc, e));

  // claim flow: every node's incoming claim must be locally contradicted or
  // covered by outgoing case edges; declared leaves must contradict fully
  auto flow_check = [&](int node_id, AltSet claim) {
    const Profile& profile = doc.nodes.at(node_id);
    ForcedSet w = rule_winner_set(doc.rule_class, profile);
    AltSet remaining = w.forced ? claim.intersect(w.set) : claim;
    std::string subject = "node " + std::to_string(node_id);
    if (auto it = leaf_at.find(node_id); it != leaf_at.end()) {
      add(check_leaf(doc, *it->second, claim));
      return;
    }
    if (remaining.empty()) {
      add({"flow", subject, true,
           "claim " + claim.to_string() + " locally contradicted by winner set " +
               w.set.to_string()});
      return;
    }
    AltSet handled;
    auto out_it = outgoing.find(node_id);
    if (out_it != outgoing.end())
      for (const ProofEdge* e : out_it->second) handled = handled.unite(e->s_from);
    bool ok = remaining.subset_of(handled);
    add({"flow", subject, ok,
         ok ? "claim " + claim.to_string() + " covered by outgoing cases"
            : "claim part " + remaining.minus(handled).to_string() +
                  " is neither contradicted nor covered by outgoing edges"});
  };

  for (AltSet c : doc.root_cases) flow_check(doc.root, c.intersect(good_set()));
  for (const auto& [node_id, edge] : incoming) flow_check(node_id, edge->s_to);

  report.valid = std::all_of(report.items.begin(), report.items.end(),
                             [](const CheckItem& i) { return i.ok; });
  return report;
}

ProofDocument lift_to_m(const ProofDocument& doc, int m) {
  if (m < doc.m) throw Error("cannot shrink a document");
  if (m == doc.m) return doc;
  int k = m - doc.m;
  ProofDocument out = doc;
  out.m = m;
  for (auto& [id, profile] : out.nodes) profile = pad_with_bad(profile, k);
  for (ProofEdge& e : out.edges) e.ranking = pad_with_bad(e.ranking, k, doc.m);
  if (out.sym) {
    for (int i = doc.m; i < m; ++i) out.sym->push_back(i);
  }
  return out;
}

std::string dot_of_document(const ProofDocument& doc) {
  std::string out = "digraph proof {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (const auto& [id, profile] : doc.nodes) {
    std::string label = std::to_string(id) + "\\n" + profile.to_string();
    std::string shape;
    for (const ProofLeaf& lf : doc.leaves)
      if (lf.node == id) {
        label = std::string(1, alt_label(lf.winner));
        shape = ", shape=circle";
      }
    if (id == doc.root) shape += ", style=bold";
    out += "  n" + std::to_string(id) + " [label=\"" + label + "\"" + shape + "];\n";
  }
  for (const ProofEdge& e : doc.edges) {
    std::string label = (e.add ? "+" : "-") + (e.count > 1 ? std::to_string(e.count) + "*" : "") +
                        e.ranking.to_string() + "  " + e.s_from.to_string() + "->" +
                        e.s_to.to_string();
    out += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" + label +
           "\"];\n";
  }
  out += "}\n";
  return out;
}

// ---------------------------------------------------------------------------
// MUS core -> certificate

namespace {

struct GameNode {
  Profile profile;        // profile space, or realized later in tournament space
  MarginVector margins;
  int voters = 0;
  bool has_profile = false;
  bool marked = false;    // condorcet units of this node appear in the core
};

struct Implication {
  uint32_t from_node = 0;
  Alt from_alt = 0;
  uint32_t to_node = 0;
  AltSet to_set;
  bool add = true;   // direction of the voter move from from_node to to_node
  Ranking ranking;
};

// ranking with the given pairwise margin difference, if consistent
std::optional<Ranking> ranking_of_delta(const MarginVector& from, const MarginVector& to) {
  const auto& tables = four_tables();
  std::array<int, 6> d{};
  for (int i = 0; i < 6; ++i) {
    d[i] = to.g[i] - from.g[i];
    if (d[i] != 1 && d[i] != -1) return std::nullopt;
  }
  for (int ri = 0; ri < 24; ++ri) {
    bool match = true;
    for (int i = 0; i < 6 && match; ++i)
      if (tables.delta[ri][i] != d[i]) match = false;
    if (match) return tables.rankings[ri];
  }
  return std::nullopt;
}

}  // namespace

MusTranslation mus_to_document(const MusCore& core, const std::vector<VarMapRow>& varmap,
                               RuleClass rule_class) {
  MusTranslation result;

  std::map<int, std::pair<uint32_t, Alt>> var_info;
  std::map<uint32_t, GameNode> nodes;
  bool profile_space = false;
  for (const VarMapRow& row : varmap) {
    var_info[row.var] = {row.node, row.alt};
    GameNode& node = nodes[row.node];
    node.voters = row.voters;
    if (!row.profile_text.empty()) {
      node.profile = Profile::parse(row.profile_text);
      node.has_profile = true;
      node.margins = margins_of_profile4(node.profile);
      profile_space = true;
    } else {
      node.margins = row.margins;
    }
  }

  // classify core clauses
  std::vector<Implication> implications;
  std::set<uint32_t> touched;
  int unrecognized = 0;
  for (const auto& clause : core.clauses) {
    std::vector<std::pair<uint32_t, Alt>> neg, pos;
    bool known = true;
    for (int lit : clause) {
      auto it = var_info.find(lit > 0 ? lit : -lit);
      if (it == var_info.end()) {
        known = false;
        break;
      }
      (lit > 0 ? pos : neg).push_back(it->second);
    }
    if (!known) throw Error("core references variables absent from the varmap");
    for (auto& [n, a] : neg) touched.insert(n);
    for (auto& [n, a] : pos) touched.insert(n);

    if (clause.size() == 1) {
      // condorcet unit (positive or negative): marks its node
      nodes[neg.empty() ? pos[0].first : neg[0].first].marked = true;
      continue;
    }
    if (neg.empty()) continue;  // non-empty clause; no propagation role
    if (pos.empty()) continue;  // mutex clause
    if (neg.size() != 1) continue;
    uint32_t u = neg[0].first;
    Alt x = neg[0].second;
    uint32_t w = pos[0].first;
    AltSet y_set;
    bool one_target = true;
    for (auto& [n, a] : pos) {
      if (n != w) one_target = false;
      y_set = y_set.unite(AltSet::single(a));
    }
    if (!one_target || w == u) {
      ++unrecognized;
      continue;
    }

    const GameNode& un = nodes[u];
    const GameNode& wn = nodes[w];
    Implication imp;
    imp.from_node = u;
    imp.from_alt = x;
    imp.to_node = w;
    imp.to_set = y_set;
    if (auto r = ranking_of_delta(un.margins, wn.margins);
        r && upper_closure(AltSet::single(x), *r) == y_set &&
        (!profile_space || wn.profile == un.profile.add_voters(*r, 1))) {
      imp.add = true;
      imp.ranking = *r;
      implications.push_back(std::move(imp));
    } else if (auto s = ranking_of_delta(wn.margins, un.margins);
               s && lower_closure(AltSet::single(x), *s) == y_set &&
               (!profile_space || un.profile == wn.profile.add_voters(*s, 1))) {
      imp.add = false;
      imp.ranking = *s;
      implications.push_back(std::move(imp));
    } else {
      ++unrecognized;
    }
  }

  // draft rendering of the raw core structure
  {
    std::string dot = "digraph core {\n  rankdir=TB;\n  node [shape=box, fontname=\"monospace\"];\n";
    for (uint32_t n : touched) {
      const GameNode& node = nodes[n];
      std::string label = std::to_string(n) + "\\n" +
                          (node.has_profile ? node.profile.to_string() : node.margins.to_string());
      if (node.marked) {
        auto w = condorcet_winner(node.margins);
        label += "\\ncondorcet";
        if (w) label += std::string(" ") + alt_label(*w);
      }
      dot += "  n" + std::to_string(n) + " [label=\"" + label + "\"" +
             (node.marked ? ", peripheries=2" : "") + "];\n";
    }
    std::set<std::string> edge_lines;
    for (const Implication& imp : implications)
      edge_lines.insert("  n" + std::to_string(imp.from_node) + " -> n" +
                        std::to_string(imp.to_node) + " [label=\"" +
                        (imp.add ? "+" : "-") + imp.ranking.to_string() + "\"];\n");
    for (const std::string& e : edge_lines) dot += e;
    dot += "}\n";
    result.dot_draft = dot;
  }

  // forced winner set at a game node, used only where the core marks it
  auto node_winners = [&](uint32_t n) -> ForcedSet {
    const GameNode& node = nodes[n];
    if (!node.marked) return {false, AltSet{}};
    if (rule_class == RuleClass::Condorcet) {
      auto w = condorcet_winner(node.margins);
      if (!w) return {false, AltSet{}};
      return {true, AltSet::single(*w)};
    }
    if (rule_class == RuleClass::Maximin) return {true, maximin_winners(node.margins)};
    return {true, kemeny_winners(node.margins)};
  };

  // claim-propagation game: refute (node, alt) pairs in minimal rounds
  std::map<std::pair<uint32_t, Alt>, int> refuted_round;
  std::map<std::pair<uint32_t, Alt>, const Implication*> witness;
  for (uint32_t n : touched) {
    ForcedSet w = node_winners(n);
    if (!w.forced) continue;
    for (Alt x = 0; x < 4; ++x)
      if (!w.set.contains(x)) refuted_round[{n, x}] = 0;
  }
  std::sort(implications.begin(), implications.end(), [](const Implication& a, const Implication& b) {
    return std::tie(a.from_node, a.from_alt, a.to_node) < std::tie(b.from_node, b.from_alt, b.to_node);
  });
  for (bool changed = true; changed;) {
    changed = false;
    for (const Implication& imp : implications) {
      auto key = std::make_pair(imp.from_node, imp.from_alt);
      if (refuted_round.count(key)) continue;
      int depth = 0;
      bool all = true;
      for (Alt y : imp.to_set.members()) {
        auto it = refuted_round.find({imp.to_node, y});
        if (it == refuted_round.end()) {
          all = false;
          break;
        }
        depth = std::max(depth, it->second);
      }
      if (all) {
        refuted_round[key] = depth + 1;
        witness[key] = &imp;
        changed = true;
      }
    }
  }

  // pick a root whose every case is refuted
  std::optional<uint32_t> root;
  int best_depth = INT32_MAX;
  for (uint32_t n : touched) {
    int depth = 0;
    bool all = true;
    for (Alt x = 0; x < 4 && all; ++x) {
      auto it = refuted_round.find({n, x});
      if (it == refuted_round.end())
        all = false;
      else
        depth = std::max(depth, it->second);
    }
    if (all && (depth < best_depth || (depth == best_depth && root && n < *root))) {
      best_depth = depth;
      root = n;
    }
  }
  if (!root) {
    result.note = "claim propagation over the core does not refute all cases at any node" +
                  (unrecognized ? " (" + std::to_string(unrecognized) + " unrecognized clauses)"
                                : std::string());
    return result;
  }
  if (!profile_space) {
    // realize tournament-space nodes as profiles via a predecessor chain
    for (const Implication& imp : implications)
      if (!imp.add) {
        result.note = "tournament-space cores with removal clauses are not realized as profiles";
        return result;
      }
    int layer = nodes[*root].voters;
    TournamentIndex small = TournamentIndex::enumerate(layer);
    const auto& tables = four_tables();
    // walk back to the single-voter layer, collecting one ranking per step
    MarginVector cur = nodes[*root].margins;
    Profile realized(4);
    for (int k = layer; k >= 1; --k) {
      bool found = false;
      for (int ri = 0; ri < 24 && !found; ++ri) {
        MarginVector prev = cur;
        for (int c = 0; c < 6; ++c) prev.g[c] -= tables.delta[ri][c];
        if (k == 1) {
          bool zero = true;
          for (int c = 0; c < 6; ++c)
            if (prev.g[c] != 0) zero = false;
          if (zero) {
            realized = realized.add_voters(tables.rankings[ri], 1);
            found = true;
          }
        } else if (auto idx = small.find(pack_margins(prev)); idx && small.min_voters(*idx) == k - 1) {
          realized = realized.add_voters(tables.rankings[ri], 1);
          cur = prev;
          found = true;
        }
      }
      if (!found) {
        result.note = "could not realize the root tournament as a profile";
        return result;
      }
    }
    nodes[*root].profile = realized;
    nodes[*root].has_profile = true;
  }

  // extract the certificate tree, duplicating shared subtrees
  ProofDocument doc;
  doc.rule_class = rule_class;
  doc.m = 4;
  int next_id = 0;
  auto make_node = [&](const Profile& p) {
    int id = next_id++;
    doc.nodes[id] = p;
    return id;
  };

  auto emit = [&](auto&& self, uint32_t game_node, const Profile& profile, int out_id,
                  AltSet claim) -> void {
    ForcedSet w = node_winners(game_node);
    AltSet remaining = w.forced ? claim.intersect(w.set) : claim;
    if (remaining.empty() && w.forced) {
      doc.leaves.push_back({out_id, w.set.members().front()});
      return;
    }
    for (Alt x : remaining.members()) {
      auto wit = witness.find({game_node, x});
      if (wit == witness.end()) throw Error("internal: refuted case lacks a witness");
      const Implication* imp = wit->second;
      Profile child_profile = imp->add ? profile.add_voters(imp->ranking, 1)
                                       : profile.remove_voters(imp->ranking, 1);
      int child_id = make_node(child_profile);
      ProofEdge e;
      e.from = out_id;
      e.to = child_id;
      e.add = imp->add;
      e.count = 1;
      e.ranking = imp->ranking;
      e.s_from = AltSet::single(x);
      e.s_to = imp->to_set;
      doc.edges.push_back(e);
      self(self, imp->to_node, child_profile, child_id, imp->to_set);
    }
  };

  const Profile& root_profile = nodes[*root].profile;
  doc.root = make_node(root_profile);
  for (Alt x = 0; x < 4; ++x) doc.root_cases.push_back(AltSet::single(x));
  for (Alt x = 0; x < 4; ++x) {
    ForcedSet w = node_winners(*root);
    AltSet claim = AltSet::single(x);
    AltSet remaining = w.forced ? claim.intersect(w.set) : claim;
    if (remaining.empty()) continue;  // root case dies locally
    auto wit = witness.find({*root, x});
    if (wit == witness.end()) throw Error("internal: refuted case lacks a witness");
    const Implication* imp = wit->second;
    Profile child_profile = imp->add ? root_profile.add_voters(imp->ranking, 1)
                                     : root_profile.remove_voters(imp->ranking, 1);
    int child_id = make_node(child_profile);
    ProofEdge e;
    e.from = doc.root;
    e.to = child_id;
    e.add = imp->add;
    e.count = 1;
    e.ranking = imp->ranking;
    e.s_from = AltSet::single(x);
    e.s_to = imp->to_set;
    doc.edges.push_back(e);
    emit(emit, imp->to_node, child_profile, child_id, imp->to_set);
  }

  result.solved = true;
  result.document = std::move(doc);
  return result;
}

}  // namespace noshow
