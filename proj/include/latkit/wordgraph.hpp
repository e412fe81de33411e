// Copyright 2026 The latkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Word-graph representation, text format loader, epsilon-transition
// elimination and complete-path enumeration.
//
// A word-graph is an acyclic lattice of word hypotheses: nodes are points in
// time, edges carry a word and an acoustic score (a negative log probability,
// so scores along a path add up), and final nodes carry a score for ending
// the utterance there.

#ifndef LATKIT_WORDGRAPH_HPP
#define LATKIT_WORDGRAPH_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "latkit/detail/text.hpp"
#include "latkit/error.hpp"

namespace latkit {

/// Reserved word marking a transition that hypothesizes silence.
inline constexpr std::string_view kEpsilonWord = "<eps>";

struct Edge {
  int from = -1;
  int to = -1;
  std::string word;
  double acoustic = 0.0;  // negative log probability, >= 0

  bool is_epsilon() const { return word == kEpsilonWord; }
};

/// Immutable after construction; safe to share across readers.
struct WordGraph {
  struct Node {
    std::string label;
    long long time = 0;
  };

  std::vector<Node> nodes;
  int start = -1;
  std::vector<Edge> edges;
  std::map<int, double> finals;  // node index -> final score
  // For normalized graphs: new node index -> label in the source graph.
  std::vector<std::string> provenance;

  int node_count() const { return static_cast<int>(nodes.size()); }

  bool is_final(int n) const { return finals.count(n) != 0; }

  double final_score(int n) const {
    auto it = finals.find(n);
    return it == finals.end() ? 0.0 : it->second;
  }

  bool epsilon_free() const {
    for (const Edge& e : edges)
      if (e.is_epsilon()) return false;
    return true;
  }

  /// Outgoing edge ids per node, in edge-list order.
  std::vector<std::vector<int>> out_edges() const {
    std::vector<std::vector<int>> out(nodes.size());
    for (int i = 0; i < static_cast<int>(edges.size()); ++i)
      out[edges[i].from].push_back(i);
    return out;
  }

  /// Node indices reachable from the start node.
  std::vector<bool> reachable_from_start() const {
    std::vector<bool> seen(nodes.size(), false);
    if (start < 0) return seen;
    auto out = out_edges();
    std::vector<int> stack{start};
    seen[start] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e : out[u])
        if (!seen[edges[e].to]) {
          seen[edges[e].to] = true;
          stack.push_back(edges[e].to);
        }
    }
    return seen;
  }
};

/// Structural equality ignoring provenance (used by normalization tests).
inline bool same_structure(const WordGraph& a, const WordGraph& b) {
  if (a.start != b.start || a.finals != b.finals) return false;
  if (a.nodes.size() != b.nodes.size() || a.edges.size() != b.edges.size()) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i)
    if (a.nodes[i].time != b.nodes[i].time) return false;
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const Edge &x = a.edges[i], &y = b.edges[i];
    if (x.from != y.from || x.to != y.to || x.word != y.word || x.acoustic != y.acoustic)
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// File format (UTF-8, line based, '#' starts a comment):
//   NODE <id> <time-index>
//   START <id>
//   EDGE <from> <to> <word|<eps>> <score>
//   FINAL <id> <score>
// ---------------------------------------------------------------------------

inline WordGraph load_wordgraph(std::string_view text) {
  WordGraph g;
  std::map<std::string, int, std::less<>> index;
  bool saw_start = false, saw_final = false;

  struct PendingEdge {
    std::string from, to, word;
    double acoustic;
    int line;
  };
  struct PendingFinal {
    std::string node;
    double score;
    int line;
  };
  std::vector<PendingEdge> pedges;
  std::vector<PendingFinal> pfinals;
  std::string start_label;
  int start_line = 0;

  auto lines = detail::split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    int ln = static_cast<int>(li) + 1;
    std::string_view line = lines[li];
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    std::string_view kw = toks[0];
    if (kw == "NODE") {
      if (toks.size() != 3) throw ParseError("NODE expects <id> <time-index>", ln);
      std::string id(toks[1]);
      if (index.count(id)) throw ParseError("node '" + id + "' declared twice", ln);
      long long t = detail::parse_int(toks[2], ln, "time index");
      index[id] = g.node_count();
      g.nodes.push_back({id, t});
    } else if (kw == "START") {
      if (toks.size() != 2) throw ParseError("START expects <id>", ln);
      if (saw_start) throw ParseError("duplicate START declaration", ln);
      saw_start = true;
      start_label = std::string(toks[1]);
      start_line = ln;
    } else if (kw == "EDGE") {
      if (toks.size() != 5) throw ParseError("EDGE expects <from> <to> <word> <score>", ln);
      double a = detail::parse_score(toks[4], ln, "edge score");
      pedges.push_back({std::string(toks[1]), std::string(toks[2]), std::string(toks[3]), a, ln});
    } else if (kw == "FINAL") {
      if (toks.size() != 3) throw ParseError("FINAL expects <id> <score>", ln);
      double s = detail::parse_score(toks[2], ln, "final score");
      saw_final = true;
      pfinals.push_back({std::string(toks[1]), s, ln});
    } else {
      throw ParseError("unknown directive '" + std::string(kw) + "'", ln);
    }
  }

  if (!saw_start) throw ParseError("missing START declaration");
  if (!saw_final) throw ParseError("missing FINAL declaration");

  auto lookup = [&](const std::string& id, int ln) {
    auto it = index.find(id);
    if (it == index.end())
      throw ParseError("reference to undeclared node '" + id + "'", ln);
    return it->second;
  };

  g.start = lookup(start_label, start_line);
  for (const auto& pe : pedges) {
    Edge e;
    e.from = lookup(pe.from, pe.line);
    e.to = lookup(pe.to, pe.line);
    e.word = pe.word;
    e.acoustic = pe.acoustic;
    if (e.word.empty()) throw ParseError("empty word token", pe.line);
    if (g.nodes[e.from].time >= g.nodes[e.to].time)
      throw ParseError("edge must go from a lower time index to a strictly higher one", pe.line);
    g.edges.push_back(std::move(e));
  }
  for (const auto& pf : pfinals) {
    int n = lookup(pf.node, pf.line);
    if (g.finals.count(n)) throw ParseError("node '" + pf.node + "' declared FINAL twice", pf.line);
    g.finals[n] = pf.score;
  }
  return g;
}

inline std::string print_wordgraph(const WordGraph& g) {
  std::string out;
  for (int n = 0; n < g.node_count(); ++n) {
    out += "NODE " + g.nodes[n].label + " " + std::to_string(g.nodes[n].time) + "\n";
  }
  out += "START " + g.nodes[g.start].label + "\n";
  for (const Edge& e : g.edges) {
    out += "EDGE " + g.nodes[e.from].label + " " + g.nodes[e.to].label + " " + e.word + " " +
           detail::real_str(e.acoustic) + "\n";
  }
  for (const auto& [n, s] : g.finals) {
    out += "FINAL " + g.nodes[n].label + " " + detail::real_str(s) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Epsilon elimination.
//
// Epsilon scores fold FORWARD: an epsilon path u =eps=> v followed by a word
// edge v -> x becomes a direct edge u -> x carrying the path's epsilon mass;
// an epsilon path ending at a final node folds into a final score at the
// path's first node. Extra completion scores at one node are preserved as
// dedicated final-only split nodes, so the multiset of (word sequence, total
// score) complete paths is unchanged. The one unrepresentable case is several
// empty-utterance completions at the start node: an epsilon-free graph can
// hold only one, so those collapse to the minimum.
// ---------------------------------------------------------------------------

inline WordGraph eliminate_epsilons(const WordGraph& g) {
  constexpr std::size_t kEpsilonPathGuard = 1u << 20;

  // All epsilon paths (>= 1 edge) from each node: (endpoint, folded score).
  std::vector<std::vector<std::pair<int, double>>> eps_paths(g.nodes.size());
  {
    std::vector<std::vector<int>> eps_out(g.nodes.size());
    for (int i = 0; i < static_cast<int>(g.edges.size()); ++i)
      if (g.edges[i].is_epsilon()) eps_out[g.edges[i].from].push_back(i);
    std::size_t total = 0;
    for (int u = 0; u < g.node_count(); ++u) {
      // DFS; the graph is acyclic so this terminates.
      std::vector<std::pair<int, double>> stack{{u, 0.0}};
      while (!stack.empty()) {
        auto [v, c] = stack.back();
        stack.pop_back();
        for (int e : eps_out[v]) {
          double c2 = c + g.edges[e].acoustic;
          eps_paths[u].push_back({g.edges[e].to, c2});
          if (++total > kEpsilonPathGuard)
            throw OverflowError("epsilon path explosion during elimination");
          stack.push_back({g.edges[e].to, c2});
        }
      }
      std::sort(eps_paths[u].begin(), eps_paths[u].end());
    }
  }

  struct TmpNode {
    long long time;
    std::string source_label;
    int order;  // original index; splits keep their parents' order
  };
  std::vector<TmpNode> tnodes;
  tnodes.reserve(g.nodes.size());
  for (int n = 0; n < g.node_count(); ++n)
    tnodes.push_back({g.nodes[n].time, g.nodes[n].label, n});

  std::vector<Edge> tedges;
  for (const Edge& e : g.edges)
    if (!e.is_epsilon()) tedges.push_back(e);
  for (int u = 0; u < g.node_count(); ++u) {
    for (auto [v, c] : eps_paths[u]) {
      for (const Edge& e : g.edges) {
        if (e.from != v || e.is_epsilon()) continue;
        tedges.push_back({u, e.to, e.word, c + e.acoustic});
      }
    }
  }

  // Completion scores contributed by epsilon tails.
  std::map<int, double> tfinals = g.finals;
  std::size_t base_edge_count = tedges.size();
  for (int u = 0; u < g.node_count(); ++u) {
    std::vector<double> completions;
    for (auto [v, c] : eps_paths[u]) {
      auto it = g.finals.find(v);
      if (it != g.finals.end()) completions.push_back(c + it->second);
    }
    std::sort(completions.begin(), completions.end());
    for (double kappa : completions) {
      auto it = tfinals.find(u);
      if (it == tfinals.end()) {
        tfinals[u] = kappa;
      } else if (u == g.start) {
        // Several empty-utterance completions cannot coexist; keep the best.
        it->second = std::min(it->second, kappa);
      } else {
        int split = static_cast<int>(tnodes.size());
        tnodes.push_back({g.nodes[u].time, g.nodes[u].label, tnodes[u].order});
        for (std::size_t i = 0; i < base_edge_count; ++i)
          if (tedges[i].to == u)
            tedges.push_back({tedges[i].from, split, tedges[i].word, tedges[i].acoustic});
        tfinals[split] = kappa;
      }
    }
  }

  // Prune everything unreachable from the start, renumber by (time, order).
  std::vector<bool> reach(tnodes.size(), false);
  {
    std::vector<std::vector<int>> out(tnodes.size());
    for (int i = 0; i < static_cast<int>(tedges.size()); ++i)
      out[tedges[i].from].push_back(i);
    std::vector<int> stack{g.start};
    reach[g.start] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e : out[u])
        if (!reach[tedges[e].to]) {
          reach[tedges[e].to] = true;
          stack.push_back(tedges[e].to);
        }
    }
  }

  std::vector<int> keep;
  for (int n = 0; n < static_cast<int>(tnodes.size()); ++n)
    if (reach[n]) keep.push_back(n);
  std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) {
    if (tnodes[a].time != tnodes[b].time) return tnodes[a].time < tnodes[b].time;
    if (tnodes[a].order != tnodes[b].order) return tnodes[a].order < tnodes[b].order;
    return a < b;
  });
  std::vector<int> renum(tnodes.size(), -1);
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) renum[keep[i]] = i;

  WordGraph r;
  r.nodes.reserve(keep.size());
  r.provenance.reserve(keep.size());
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) {
    r.nodes.push_back({std::to_string(i), tnodes[keep[i]].time});
    r.provenance.push_back(tnodes[keep[i]].source_label);
  }
  r.start = renum[g.start];
  for (const Edge& e : tedges)
    if (renum[e.from] >= 0 && renum[e.to] >= 0)
      r.edges.push_back({renum[e.from], renum[e.to], e.word, e.acoustic});
  std::sort(r.edges.begin(), r.edges.end(), [](const Edge& a, const Edge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.to != b.to) return a.to < b.to;
    if (a.word != b.word) return a.word < b.word;
    return a.acoustic < b.acoustic;
  });
  for (auto [n, s] : tfinals)
    if (renum[n] >= 0) r.finals[renum[n]] = s;
  return r;
}

// ---------------------------------------------------------------------------
// Complete-path enumeration (oracle support).
// ---------------------------------------------------------------------------

struct PathListing {
  std::vector<std::string> words;
  double score = 0.0;  // edge scores plus final score
};

enum class PathLimitPolicy {
  fail,      // error out when the path count exceeds the limit
  truncate,  // keep the `limit` best paths
};

/// All start->final paths of an epsilon-free graph with their total scores,
/// ascending by score (ties by word sequence).
inline std::vector<PathListing> enumerate_complete_paths(
    const WordGraph& g, std::size_t limit, PathLimitPolicy policy = PathLimitPolicy::fail) {
  if (limit == 0) throw Error("enumerate_complete_paths: limit must be positive");
  if (!g.epsilon_free())
    throw Error("enumerate_complete_paths: graph must be epsilon-free");

  auto out = g.out_edges();

  // Path count first, saturating, so the fail policy never enumerates.
  constexpr unsigned long long kSat = 1ull << 62;
  std::vector<unsigned long long> count(g.nodes.size(), 0);
  {
    std::vector<int> order(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return g.nodes[a].time > g.nodes[b].time;
    });
    for (int u : order) {
      unsigned long long c = g.is_final(u) ? 1 : 0;
      for (int e : out[u]) {
        c += count[g.edges[e].to];
        if (c > kSat) c = kSat;
      }
      count[u] = c;
    }
  }
  if (policy == PathLimitPolicy::fail && count[g.start] > limit)
    throw OverflowError("complete path count " +
                        (count[g.start] >= kSat ? std::string(">= 2^62")
                                                : std::to_string(count[g.start])) +
                        " exceeds limit " + std::to_string(limit));

  auto before = [](const PathListing& a, const PathListing& b) {
    if (a.score != b.score) return a.score < b.score;
    return a.words < b.words;
  };

  // Kept sorted-on-demand; under the truncate policy only the `limit` best
  // paths are retained (heap keyed by the worst retained path).
  std::vector<PathListing> result;
  auto emit = [&](PathListing p) {
    if (policy == PathLimitPolicy::truncate && result.size() == limit) {
      if (!before(p, result.front())) return;
      std::pop_heap(result.begin(), result.end(), before);
      result.back() = std::move(p);
      std::push_heap(result.begin(), result.end(), before);
    } else {
      result.push_back(std::move(p));
      if (policy == PathLimitPolicy::truncate && result.size() == limit)
        std::make_heap(result.begin(), result.end(), before);
    }
  };

  std::vector<std::string> words;
  // Iterative DFS to keep deep lattices off the call stack.
  struct Frame {
    int node;
    std::size_t next;
    double score;
  };
  std::vector<Frame> stack{{g.start, 0, 0.0}};
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next == 0 && g.is_final(f.node))
      emit({words, f.score + g.final_score(f.node)});
    if (f.next < out[f.node].size()) {
      int e = out[f.node][f.next++];
      words.push_back(g.edges[e].word);
      stack.push_back({g.edges[e].to, 0, f.score + g.edges[e].acoustic});
    } else {
      stack.pop_back();
      if (!words.empty()) words.pop_back();  // the root frame has no entering word
    }
  }

  std::sort(result.begin(), result.end(), before);
  if (result.size() > limit) result.resize(limit);
  return result;
}

}  // namespace latkit

#endif  // LATKIT_WORDGRAPH_HPP
