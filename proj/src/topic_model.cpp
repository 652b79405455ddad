#include "timeline/topic_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

namespace timeline {

BipartiteGraph build_graph(const std::vector<BagOfWords>& bags, std::size_t vocabulary_size) {
  BipartiteGraph g;
  g.documents = bags.size();
  g.words = vocabulary_size;
  g.adjacency.assign(g.nodes(), {});
  g.degree.assign(g.nodes(), 0);
  for (std::size_t d = 0; d < bags.size(); ++d) {
    for (const auto& [word, count] : bags[d].counts) {
      if (word >= vocabulary_size) throw std::out_of_range("word id outside the vocabulary");
      if (count <= 0) continue;
      const std::size_t w = g.word_node(word);
      g.adjacency[d].emplace_back(w, count);
      g.adjacency[w].emplace_back(d, count);
      g.degree[d] += count;
      g.degree[w] += count;
      g.edges += count;
    }
  }
  for (auto& nb : g.adjacency) std::sort(nb.begin(), nb.end());
  return g;
}

std::size_t BlockState::blocks(std::size_t level) const {
  const auto& p = partitions.at(level);
  return p.empty() ? 0 : static_cast<std::size_t>(*std::max_element(p.begin(), p.end()) + 1);
}

namespace {

// ln Gamma on integers, cached.
double lgamma_int(long n) {
  static thread_local std::vector<double> table;
  constexpr long kCap = 1L << 22;
  if (n < 1) return 0.0;  // only reached for empty multisets, whose terms cancel
  if (n >= kCap) return std::lgamma(static_cast<double>(n));
  if (static_cast<std::size_t>(n) >= table.size()) {
    std::size_t old = table.size();
    table.resize(std::min<std::size_t>(kCap, std::max<std::size_t>(2 * static_cast<std::size_t>(n), 1024)));
    for (std::size_t i = old; i < table.size(); ++i) table[i] = std::lgamma(static_cast<double>(i));
  }
  return table[static_cast<std::size_t>(n)];
}

double lfact(long n) { return lgamma_int(n + 1); }

double lbinom(long n, long k) {
  if (k < 0 || k > n) return 0.0;
  return lfact(n) - lfact(k) - lfact(n - k);
}

// ln of the number of multisets of size m drawn from n kinds: ln C(n + m - 1, m).
double lmultiset(long n, long m) {
  if (m == 0) return 0.0;
  return lgamma_int(n + m) - lgamma_int(n) - lfact(m);
}

using Row = std::unordered_map<int, long>;

struct Level {
  std::vector<int> block_of;  // item -> block
  std::vector<long> size;     // alive items per block
  std::vector<long> degree;   // edge endpoints per block
  std::vector<Row> adj;       // block -> neighbour block -> edge count
  std::vector<int> side;      // 0 documents, 1 words, -1 unused
  std::array<long, 2> alive{0, 0};

  std::size_t blocks() const { return size.size(); }
};

// Nested block state with incrementally maintained block statistics.
class NestedState {
public:
  NestedState(const BipartiteGraph& g, const std::vector<std::vector<int>>& partitions) : g_(&g) {
    side_nodes_ = {static_cast<long>(g.documents), static_cast<long>(g.words)};
    constant_ = 0.0;
    for (std::size_t i = 0; i < g.nodes(); ++i) {
      constant_ -= lfact(g.degree[i]);
      if (g.is_document(i))
        for (const auto& [w, m] : g.adjacency[i]) constant_ += lfact(m);
    }
    rebuild(partitions);
  }

  std::size_t levels() const { return levels_.size(); }
  const Level& level(std::size_t l) const { return levels_[l]; }

  std::vector<std::vector<int>> partitions() const {
    std::vector<std::vector<int>> out;
    for (const auto& lv : levels_) out.push_back(lv.block_of);
    return out;
  }

  void rebuild(const std::vector<std::vector<int>>& partitions) {
    if (partitions.empty()) throw InconsistentState("block state has no levels");
    levels_.assign(partitions.size(), Level{});
    for (std::size_t l = 0; l < partitions.size(); ++l) {
      Level& lv = levels_[l];
      lv.block_of = partitions[l];
      const std::size_t items = item_count(l);
      if (lv.block_of.size() != items)
        throw InconsistentState("level " + std::to_string(l) + " partitions " + std::to_string(lv.block_of.size()) +
                                " items, expected " + std::to_string(items));
      int max_block = -1;
      for (int b : lv.block_of) {
        if (b < 0) throw InconsistentState("negative block id at level " + std::to_string(l));
        max_block = std::max(max_block, b);
      }
      const std::size_t nb = static_cast<std::size_t>(max_block + 1);
      lv.size.assign(nb, 0);
      lv.degree.assign(nb, 0);
      lv.adj.assign(nb, Row{});
      lv.side.assign(nb, -1);
      for (std::size_t v = 0; v < items; ++v) {
        if (!item_alive(l, v)) continue;
        const int b = lv.block_of[v];
        const int s = item_side(l, v);
        if (lv.side[b] == -1)
          lv.side[b] = s;
        else if (lv.side[b] != s)
          throw InconsistentState("block " + std::to_string(b) + " at level " + std::to_string(l) +
                                  " mixes documents and words");
        ++lv.size[b];
        lv.degree[b] += item_degree(l, v);
        if (s == 0) {
          for_each_item_neighbour(l, v, [&](int u, long m) {
            const int t = lv.block_of[u];
            lv.adj[b][t] += m;
            lv.adj[t][b] += m;
          });
        }
      }
      lv.alive = {0, 0};
      for (std::size_t b = 0; b < nb; ++b)
        if (lv.size[b] > 0) ++lv.alive[lv.side[b]];
    }
  }

  // Relabels blocks densely at every level in order of first appearance and drops dead ones.
  void compact() {
    std::vector<std::vector<int>> parts;
    std::vector<int> carried;  // old id -> new id of the level below
    for (std::size_t l = 0; l < levels_.size(); ++l) {
      const Level& lv = levels_[l];
      std::vector<int> items_new;
      if (l == 0) {
        items_new = lv.block_of;
      } else {
        items_new.assign(levels_[l - 1].blocks() ? *std::max_element(carried.begin(), carried.end()) + 1 : 0, -1);
        for (std::size_t old = 0; old < carried.size(); ++old)
          if (carried[old] >= 0) items_new[carried[old]] = lv.block_of[old];
      }
      std::vector<int> relabel(lv.blocks(), -1);
      int next = 0;
      for (int& b : items_new) {
        if (relabel[b] < 0) relabel[b] = next++;
        b = relabel[b];
      }
      parts.push_back(std::move(items_new));
      carried = std::move(relabel);
      for (std::size_t b = 0; b < carried.size(); ++b)
        if (levels_[l].size[b] == 0) carried[b] = -1;
    }
    rebuild(parts);
  }

  double total() const {
    double sum = constant_;
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      const Level& lv = levels_[k];
      for (std::size_t x = 0; x < lv.blocks(); ++x) {
        if (lv.size[x] == 0) continue;
        sum += block_terms(k, static_cast<int>(x));
        if (lv.side[x] == 0) {
          std::vector<std::pair<int, long>> row(lv.adj[x].begin(), lv.adj[x].end());
          std::sort(row.begin(), row.end());
          for (const auto& [t, m] : row) sum += pair_term(k, static_cast<int>(x), t, m);
        }
      }
      for (int side = 0; side < 2; ++side) sum += partition_prior(k, side);
    }
    const long top = levels_.back().alive[0] + levels_.back().alive[1];
    sum += lmultiset(top * (top + 1) / 2, g_->edges) + std::log(static_cast<double>(top));
    return sum;
  }

  // Moves `item` at level l into block `target`, returning the change in description length.
  double move(std::size_t l, int item, int target) {
    Level& lv = levels_[l];
    const int from = lv.block_of[item];
    if (from == target) return 0.0;
    const long k = item_degree(l, static_cast<std::size_t>(item));

    gather_neighbours(l, item);
    // ancestors that differ, starting at level l
    affected_.clear();
    affected_.push_back({l, from, target});
    for (std::size_t up = l + 1; up < levels_.size(); ++up) {
      int a = levels_[up].block_of[affected_.back().x];
      int b = levels_[up].block_of[affected_.back().y];
      if (a == b) break;
      affected_.push_back({up, a, b});
    }

    double before = -lfact(lv.size[from]) - lfact(lv.size[target]);
    for (const auto& a : affected_) before += row_terms(a.level, a.x) + row_terms(a.level, a.y);

    lv.block_of[item] = target;
    --lv.size[from];
    ++lv.size[target];
    std::vector<std::pair<int, long>>& nb = scratch_;
    for (const auto& a : affected_) {
      Level& up = levels_[a.level];
      if (a.level > l) {
        for (auto& [t, m] : nb) t = up.block_of[t];
      }
      up.degree[a.x] -= k;
      up.degree[a.y] += k;
      for (const auto& [t, m] : nb) {
        add_edge(up, a.x, t, -m);
        add_edge(up, a.y, t, m);
      }
    }

    double after = -lfact(lv.size[from]) - lfact(lv.size[target]);
    for (const auto& a : affected_) after += row_terms(a.level, a.x) + row_terms(a.level, a.y);
    return after - before;
  }

  // Change in description length if block r at level l were merged into s.
  // Both must share a parent at level l + 1.
  double merge_delta(std::size_t l, int r, int s) const {
    const Level& lv = levels_[l];
    const Level& up = levels_[l + 1];
    const int side = lv.side[r];
    const int parent = up.block_of[r];

    double before = row_terms(l, r) + row_terms(l, s);
    const long n = lv.size[r] + lv.size[s];
    double after = 0.0;
    merged_.clear();
    for (const auto& [t, m] : lv.adj[r]) merged_[t] += m;
    for (const auto& [t, m] : lv.adj[s]) merged_[t] += m;
    if (l == 0) {
      const long e = lv.degree[r] + lv.degree[s];
      after += lfact(e) + lmultiset(n, e);
      for (const auto& [t, m] : merged_) after -= lfact(m);
    } else {
      for (const auto& [t, m] : merged_) after += lmultiset(n * lv.size[t], m);
    }

    const long items = l == 0 ? side_nodes_[side] : levels_[l - 1].alive[side];
    const long blocks = lv.alive[side];
    before += -lfact(lv.size[r]) - lfact(lv.size[s]) + lbinom(items - 1, blocks - 1);
    after += -lfact(n) + lbinom(items - 1, blocks - 2);

    // the parent level sees one item fewer
    const long up_items = blocks;
    const long up_blocks = up.alive[side];
    const long np = up.size[parent];
    before += lfact(up_items) - lfact(np) + lbinom(up_items - 1, up_blocks - 1) + std::log(static_cast<double>(up_items));
    after += lfact(up_items - 1) - lfact(np - 1) + lbinom(up_items - 2, up_blocks - 1) +
             std::log(static_cast<double>(up_items - 1));
    if (l + 1 < levels_.size()) {
      for (const auto& [t, m] : up.adj[parent]) {
        before += lmultiset(np * up.size[t], m);
        after += lmultiset((np - 1) * up.size[t], m);
      }
    }
    return after - before;
  }

  void merge(std::size_t l, int r, int s) {
    Level& lv = levels_[l];
    Level& up = levels_[l + 1];
    for (int& b : lv.block_of)
      if (b == r) b = s;
    lv.size[s] += lv.size[r];
    lv.size[r] = 0;
    lv.degree[s] += lv.degree[r];
    lv.degree[r] = 0;
    for (const auto& [t, m] : lv.adj[r]) {
      lv.adj[s][t] += m;
      lv.adj[t][s] += m;
      lv.adj[t].erase(r);
    }
    lv.adj[r].clear();
    --lv.alive[lv.side[r]];
    --up.size[up.block_of[r]];
  }

  // Inserts an identity level directly below the top.
  void insert_identity_below_top() {
    auto parts = partitions();
    std::vector<int> identity(levels_[parts.size() - 2].blocks());
    std::iota(identity.begin(), identity.end(), 0);
    // block ids are unchanged by the identity level, so the top array still applies
    parts.insert(parts.end() - 1, identity);
    compact_from(parts);
  }

  void remove_level(std::size_t l) {
    auto parts = partitions();
    if (l + 1 < parts.size()) {
      // compose so the level above maps directly onto level l - 1's blocks
      std::vector<int> composed(parts[l].size());
      for (std::size_t i = 0; i < composed.size(); ++i) composed[i] = parts[l + 1][parts[l][i]];
      parts[l + 1] = std::move(composed);
    }
    parts.erase(parts.begin() + static_cast<long>(l));
    compact_from(parts);
  }

  void compact_from(const std::vector<std::vector<int>>& parts) {
    rebuild(parts);
    compact();
  }

  long item_degree(std::size_t l, std::size_t v) const {
    return l == 0 ? g_->degree[v] : levels_[l - 1].degree[v];
  }
  bool item_alive(std::size_t l, std::size_t v) const { return l == 0 || levels_[l - 1].size[v] > 0; }
  int item_side(std::size_t l, std::size_t v) const {
    return l == 0 ? (g_->is_document(v) ? 0 : 1) : levels_[l - 1].side[v];
  }
  std::size_t item_count(std::size_t l) const { return l == 0 ? g_->nodes() : levels_[l - 1].blocks(); }

  template <class F>
  void for_each_item_neighbour(std::size_t l, std::size_t v, F&& f) const {
    if (l == 0) {
      for (const auto& [u, m] : g_->adjacency[v]) f(static_cast<int>(u), m);
    } else {
      for (const auto& [u, m] : levels_[l - 1].adj[v]) f(u, m);
    }
  }

private:
  struct Affected {
    std::size_t level;
    int x;
    int y;
  };

  double block_terms(std::size_t k, int x) const {
    if (k != 0) return 0.0;
    const Level& lv = levels_[0];
    return lfact(lv.degree[x]) + lmultiset(lv.size[x], lv.degree[x]);
  }

  double pair_term(std::size_t k, int x, int t, long m) const {
    if (k == 0) return -lfact(m);
    const Level& lv = levels_[k];
    return lmultiset(lv.size[x] * lv.size[t], m);
  }

  double row_terms(std::size_t k, int x) const {
    double s = block_terms(k, x);
    for (const auto& [t, m] : levels_[k].adj[x]) s += pair_term(k, x, t, m);
    return s;
  }

  double partition_prior(std::size_t k, int side) const {
    const long items = k == 0 ? side_nodes_[side] : levels_[k - 1].alive[side];
    const Level& lv = levels_[k];
    const long blocks = lv.alive[side];
    if (items == 0) return 0.0;
    double s = lfact(items) + lbinom(items - 1, blocks - 1) + std::log(static_cast<double>(items));
    for (std::size_t x = 0; x < lv.blocks(); ++x)
      if (lv.size[x] > 0 && lv.side[x] == side) s -= lfact(lv.size[x]);
    return s;
  }

  static void add_edge(Level& lv, int x, int t, long m) {
    long& a = lv.adj[x][t];
    a += m;
    if (a == 0) lv.adj[x].erase(t);
    long& b = lv.adj[t][x];
    b += m;
    if (b == 0) lv.adj[t].erase(x);
  }

  void gather_neighbours(std::size_t l, int item) {
    agg_.clear();
    const Level& lv = levels_[l];
    for_each_item_neighbour(l, static_cast<std::size_t>(item), [&](int u, long m) { agg_[lv.block_of[u]] += m; });
    scratch_.assign(agg_.begin(), agg_.end());
  }

  const BipartiteGraph* g_;
  std::array<long, 2> side_nodes_{0, 0};
  double constant_ = 0.0;
  std::vector<Level> levels_;
  std::vector<Affected> affected_;
  std::vector<std::pair<int, long>> scratch_;
  std::unordered_map<int, long> agg_;
  mutable std::unordered_map<int, long> merged_;
};

void check_top(const NestedState& st) {
  const Level& top = st.level(st.levels() - 1);
  if (top.alive[0] != 1 || top.alive[1] != 1)
    throw InconsistentState("top level must hold exactly one document block and one word block");
}

std::vector<std::vector<BlockEdge>> collect_edges(const NestedState& st) {
  std::vector<std::vector<BlockEdge>> out;
  for (std::size_t l = 0; l < st.levels(); ++l) {
    const Level& lv = st.level(l);
    std::vector<BlockEdge> edges;
    for (std::size_t r = 0; r < lv.blocks(); ++r)
      for (const auto& [s, m] : lv.adj[r])
        if (static_cast<int>(r) < s) edges.push_back({static_cast<int>(r), s, m});
    std::sort(edges.begin(), edges.end(), [](const BlockEdge& a, const BlockEdge& b) {
      return a.r != b.r ? a.r < b.r : a.s < b.s;
    });
    out.push_back(std::move(edges));
  }
  return out;
}

void check_dense(const std::vector<std::vector<int>>& partitions) {
  for (std::size_t l = 0; l < partitions.size(); ++l) {
    const auto& p = partitions[l];
    if (p.empty()) throw InconsistentState("empty partition at level " + std::to_string(l));
    const int nb = *std::max_element(p.begin(), p.end()) + 1;
    std::vector<char> used(static_cast<std::size_t>(std::max(nb, 0)), 0);
    for (int b : p) {
      if (b < 0) throw InconsistentState("negative block id at level " + std::to_string(l));
      used[b] = 1;
    }
    if (std::find(used.begin(), used.end(), 0) != used.end())
      throw InconsistentState("block ids are not dense at level " + std::to_string(l));
  }
}

class Sampler {
public:
  Sampler(const BipartiteGraph& g, const InferenceOptions& opt) : g_(g), opt_(opt), rng_(opt.seed) {}

  InferenceResult run() {
    NestedState st(g_, initial_partitions());
    agglomerate_level(st, 0);
    if (st.level(0).alive[0] == 1 && st.level(0).alive[1] == 1) {
      st.remove_level(1);
    } else {
      build_hierarchy(st);
    }

    InferenceResult result;
    double current = st.total();
    double best = current;
    auto best_parts = st.partitions();
    result.best_trace.push_back(best);

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int sweep = 0; sweep < opt_.sweeps; ++sweep) {
      for (std::size_t l = 0; l + 1 < st.levels(); ++l) {
        const Level& lv = st.level(l);
        std::array<std::vector<int>, 2> blocks_by_side;
        for (std::size_t b = 0; b < lv.blocks(); ++b)
          if (lv.size[b] > 0) blocks_by_side[lv.side[b]].push_back(static_cast<int>(b));

        const std::size_t items = st.item_count(l);
        for (std::size_t v = 0; v < items; ++v) {
          if (!st.item_alive(l, v)) continue;
          const int side = st.item_side(l, v);
          const auto& candidates = blocks_by_side[side];
          const int from = lv.block_of[v];
          if (candidates.size() < 2 || lv.size[from] < 2) continue;
          std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 2);
          std::size_t idx = pick(rng_);
          int target = candidates[idx];
          // uniform over the other B - 1 blocks
          if (target == from) target = candidates.back();

          const double delta = st.move(l, static_cast<int>(v), target);
          const bool accept = delta <= 0.0 || unif(rng_) < std::exp(-opt_.beta * delta);
          if (!accept) {
            st.move(l, static_cast<int>(v), from);
            continue;
          }
          current += delta;
          if (current < best - 1e-10) {
            best = current;
            best_parts = st.partitions();
          }
        }
      }
      current = st.total();
      result.best_trace.push_back(best);
    }

    st.rebuild(best_parts);
    st.compact();
    check_top(st);
    result.state.partitions = st.partitions();
    result.state.block_edges = collect_edges(st);
    result.state.description_length = st.total();
    return result;
  }

private:
  std::vector<std::vector<int>> initial_partitions() const {
    std::vector<int> level0(g_.nodes());
    std::iota(level0.begin(), level0.end(), 0);
    std::vector<int> top(g_.nodes());
    for (std::size_t i = 0; i < g_.nodes(); ++i) top[i] = g_.is_document(i) ? 0 : 1;
    return {level0, top};
  }

  // Agglomerates level l down to one block per parent and side. Each round
  // applies the lowest-delta merges (a quarter of the live blocks, plus every
  // merge that lowers the description length), then refines with greedy node
  // moves. The best state seen along the way is kept. Returns the number of
  // blocks removed.
  std::size_t agglomerate_level(NestedState& st, std::size_t l) {
    auto alive = [&] { return st.level(l).alive[0] + st.level(l).alive[1]; };
    const long start = alive();
    double best_total = st.total();
    auto best_parts = st.partitions();

    struct Proposal {
      double delta;
      int a;
      int b;
    };
    std::vector<Proposal> proposals;
    for (;;) {
      proposals.clear();
      const std::size_t nb = st.level(l).blocks();
      for (std::size_t r = 0; r < nb; ++r) {
        if (st.level(l).size[r] == 0) continue;
        double best_delta = std::numeric_limits<double>::infinity();
        int best = -1;
        for (int s : merge_candidates(st, l, static_cast<int>(r))) {
          const double d = st.merge_delta(l, static_cast<int>(r), s);
          if (d < best_delta - 1e-12) {
            best_delta = d;
            best = s;
          }
        }
        if (best >= 0) proposals.push_back({best_delta, std::min(static_cast<int>(r), best), std::max(static_cast<int>(r), best)});
      }
      if (proposals.empty()) break;
      std::sort(proposals.begin(), proposals.end(), [](const Proposal& x, const Proposal& y) {
        if (x.delta != y.delta) return x.delta < y.delta;
        return std::pair(x.a, x.b) < std::pair(y.a, y.b);
      });

      // Each side shrinks by about a quarter per round; once both sides are
      // small, only the single best merge is forced.
      const Level& lv = st.level(l);
      std::array<long, 2> quota{lv.alive[0] / 4, lv.alive[1] / 4};
      const bool single = quota[0] == 0 && quota[1] == 0;
      std::array<long, 2> applied{0, 0};
      std::vector<char> touched(nb, 0);
      for (const auto& p : proposals) {
        const int side = st.level(l).side[p.a];
        if (p.delta > 0.0 && (single ? applied[0] + applied[1] >= 1 : applied[side] >= quota[side])) continue;
        if (touched[p.a] || touched[p.b]) continue;
        st.merge(l, p.b, p.a);  // the lower id survives
        touched[p.a] = touched[p.b] = 1;
        ++applied[side];
      }
      st.compact();
      refine(st, l);

      const double t = st.total();
      if (t < best_total - 1e-10) {
        best_total = t;
        best_parts = st.partitions();
      }
    }
    st.rebuild(best_parts);
    st.compact();
    return static_cast<std::size_t>(start - alive());
  }

  // Zero-temperature node moves at level l: each item tries a few blocks
  // reached through its neighbours and keeps the first improvement. Blocks are
  // never emptied. Stops after merge_passes sweeps or a sweep without moves.
  void refine(NestedState& st, std::size_t l) {
    constexpr int kTries = 4;
    std::vector<std::pair<int, long>> nbrs, second;
    auto pick = [&](const std::vector<std::pair<int, long>>& row) {
      long total = 0;
      for (const auto& e : row) total += e.second;
      std::uniform_int_distribution<long> dist(0, total - 1);
      long x = dist(rng_);
      for (const auto& [u, m] : row) {
        if (x < m) return u;
        x -= m;
      }
      return row.back().first;
    };
    for (int pass = 0; pass < opt_.merge_passes; ++pass) {
      std::size_t moved = 0;
      const std::size_t items = st.item_count(l);
      for (std::size_t v = 0; v < items; ++v) {
        if (!st.item_alive(l, v)) continue;
        const int from = st.level(l).block_of[v];
        if (st.level(l).size[from] < 2) continue;
        nbrs.clear();
        st.for_each_item_neighbour(l, v, [&](int u, long m) { nbrs.emplace_back(u, m); });
        if (nbrs.empty()) continue;
        for (int i = 0; i < kTries; ++i) {
          const int u = pick(nbrs);
          second.clear();
          st.for_each_item_neighbour(l, static_cast<std::size_t>(u), [&](int x, long m) { second.emplace_back(x, m); });
          const int target = st.level(l).block_of[pick(second)];
          if (target == from) continue;
          const double delta = st.move(l, static_cast<int>(v), target);
          if (delta < -1e-10) {
            ++moved;
            break;
          }
          st.move(l, static_cast<int>(v), from);
        }
      }
      if (moved == 0) break;
    }
  }

  // Same-side blocks under the same parent, ascending. Large levels are sampled
  // through neighbours of neighbours plus a few uniform draws.
  std::vector<int> merge_candidates(const NestedState& st, std::size_t l, int r) {
    constexpr std::size_t kExhaustive = 128;
    constexpr int kSampled = 24;
    const Level& lv = st.level(l);
    const Level& up = st.level(l + 1);
    const int side = lv.side[r];
    const int parent = up.block_of[r];
    auto eligible = [&](int s) {
      return s != r && lv.size[s] > 0 && lv.side[s] == side && up.block_of[s] == parent;
    };

    std::vector<int> all;
    if (lv.alive[side] <= static_cast<long>(kExhaustive)) {
      for (std::size_t s = 0; s < lv.blocks(); ++s)
        if (eligible(static_cast<int>(s))) all.push_back(static_cast<int>(s));
      return all;
    }

    std::vector<int> out;
    auto weighted_pick = [&](const Row& row) -> int {
      long total = 0;
      for (const auto& kv : row) total += kv.second;
      if (total == 0) return -1;
      std::vector<std::pair<int, long>> sorted(row.begin(), row.end());
      std::sort(sorted.begin(), sorted.end());
      std::uniform_int_distribution<long> dist(0, total - 1);
      long x = dist(rng_);
      for (const auto& [t, m] : sorted) {
        if (x < m) return t;
        x -= m;
      }
      return sorted.back().first;
    };
    for (int i = 0; i < kSampled; ++i) {
      int t = weighted_pick(lv.adj[r]);
      if (t < 0) break;
      int s = weighted_pick(lv.adj[t]);
      if (s >= 0 && eligible(s)) out.push_back(s);
    }
    std::uniform_int_distribution<std::size_t> uni(0, lv.blocks() - 1);
    for (int i = 0; i < kSampled / 3; ++i) {
      int s = static_cast<int>(uni(rng_));
      if (eligible(s)) out.push_back(s);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  void build_hierarchy(NestedState& st) {
    while (true) {
      const std::size_t below_top = st.levels() - 2;
      st.insert_identity_below_top();
      const std::size_t fresh = below_top + 1;
      const std::size_t merges = agglomerate_level(st, fresh);
      if (merges == 0) {
        st.remove_level(fresh);
        return;
      }
      const Level& lv = st.level(fresh);
      if (lv.alive[0] == 1 && lv.alive[1] == 1) {
        st.remove_level(fresh);
        return;
      }
    }
  }

  const BipartiteGraph& g_;
  InferenceOptions opt_;
  std::mt19937_64 rng_;
};

}  // namespace

BlockState make_block_state(const BipartiteGraph& graph, std::vector<std::vector<int>> partitions) {
  check_dense(partitions);
  NestedState st(graph, partitions);
  check_top(st);
  BlockState out;
  out.partitions = std::move(partitions);
  out.block_edges = collect_edges(st);
  out.description_length = st.total();
  return out;
}

double description_length(const BipartiteGraph& graph, const BlockState& state) {
  check_dense(state.partitions);
  NestedState st(graph, state.partitions);
  check_top(st);
  return st.total();
}

InferenceResult infer(const BipartiteGraph& graph, const InferenceOptions& options) {
  if (graph.edges <= 0) throw EmptyGraph("graph has no edges");
  if (options.sweeps < 0) throw std::invalid_argument("sweeps must be non-negative");
  Sampler sampler(graph, options);
  return sampler.run();
}

std::pair<std::size_t, std::size_t> side_block_counts(const BlockState& state, std::size_t level, std::size_t documents) {
  if (level >= state.levels()) throw std::out_of_range("level " + std::to_string(level) + " does not exist");
  std::vector<int> doc_blocks, word_blocks;
  const std::size_t nodes = state.partitions[0].size();
  for (std::size_t i = 0; i < nodes; ++i) {
    int b = state.partitions[0][i];
    for (std::size_t l = 1; l <= level; ++l) b = state.partitions[l][b];
    (i < documents ? doc_blocks : word_blocks).push_back(b);
  }
  auto distinct = [](std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  };
  return {distinct(doc_blocks), distinct(word_blocks)};
}

std::size_t select_level(const BlockState& state, std::size_t documents) {
  constexpr std::size_t lo = 2, hi = 50;
  std::size_t best_level = 0;
  std::size_t best_gap = SIZE_MAX;
  for (std::size_t l = 0; l < state.levels(); ++l) {
    const std::size_t k = side_block_counts(state, l, documents).second;
    if (k >= lo && k <= hi) return l;
    const std::size_t gap = k < lo ? lo - k : k - hi;
    if (gap < best_gap) {
      best_gap = gap;
      best_level = l;
    }
  }
  return best_level;
}

TopicModel extract_topics(const BipartiteGraph& graph, const BlockState& state, std::size_t level) {
  if (level >= state.levels()) throw std::out_of_range("level " + std::to_string(level) + " does not exist");
  if (state.partitions[0].size() != graph.nodes()) throw InconsistentState("state does not match graph");

  std::vector<int> word_block(graph.words);
  std::vector<int> order;
  for (std::size_t w = 0; w < graph.words; ++w) {
    int b = state.partitions[0][graph.word_node(w)];
    for (std::size_t l = 1; l <= level; ++l) b = state.partitions[l][b];
    word_block[w] = b;
    order.push_back(b);
  }
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  TopicModel tm;
  tm.level = level;
  tm.topics = order.size();
  tm.word_topic.resize(graph.words);
  for (std::size_t w = 0; w < graph.words; ++w)
    tm.word_topic[w] = static_cast<int>(std::lower_bound(order.begin(), order.end(), word_block[w]) - order.begin());

  tm.word_given_topic.assign(tm.topics, std::vector<double>(graph.words, 0.0));
  std::vector<long> topic_mass(tm.topics, 0);
  for (std::size_t w = 0; w < graph.words; ++w) topic_mass[tm.word_topic[w]] += graph.degree[graph.word_node(w)];
  for (std::size_t w = 0; w < graph.words; ++w) {
    const int k = tm.word_topic[w];
    if (topic_mass[k] > 0)
      tm.word_given_topic[k][w] = static_cast<double>(graph.degree[graph.word_node(w)]) / static_cast<double>(topic_mass[k]);
  }

  tm.topic_given_document.assign(graph.documents, std::vector<double>(tm.topics, 0.0));
  for (std::size_t d = 0; d < graph.documents; ++d) {
    std::vector<long> counts(tm.topics, 0);
    for (const auto& [w, m] : graph.adjacency[d]) counts[tm.word_topic[w - graph.documents]] += m;
    const double len = static_cast<double>(graph.degree[d]);
    for (std::size_t k = 0; k < tm.topics; ++k) tm.topic_given_document[d][k] = len > 0 ? counts[k] / len : 0.0;
  }
  return tm;
}

}  // namespace timeline
