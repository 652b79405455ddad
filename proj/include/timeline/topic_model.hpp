#pragma once

#include "timeline/text_prep.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace timeline {

/// Document-word multigraph. Nodes 0..D-1 are documents, D..D+V-1 are words;
/// an edge's multiplicity is the word's count in the document.
struct BipartiteGraph {
  std::size_t documents = 0;
  std::size_t words = 0;
  std::vector<std::vector<std::pair<std::size_t, long>>> adjacency;  // sorted by neighbour
  std::vector<long> degree;
  long edges = 0;

  std::size_t nodes() const { return documents + words; }
  bool is_document(std::size_t node) const { return node < documents; }
  std::size_t word_node(std::size_t word_id) const { return documents + word_id; }
};

/// Documents follow the order of `bags`; word ids index the vocabulary.
BipartiteGraph build_graph(const std::vector<BagOfWords>& bags, std::size_t vocabulary_size);

struct BlockEdge {
  int r = 0;
  int s = 0;
  long count = 0;

  bool operator==(const BlockEdge&) const = default;
};

/// Nested partition. partitions[0] maps graph nodes to level-0 blocks and
/// partitions[l] maps level-(l-1) blocks to level-l blocks. Block ids are dense
/// at every level and the top level has exactly one document block and one
/// word block.
struct BlockState {
  std::vector<std::vector<int>> partitions;
  std::vector<std::vector<BlockEdge>> block_edges;  // per level, r < s
  double description_length = 0.0;                  // nats

  std::size_t levels() const { return partitions.size(); }
  std::size_t blocks(std::size_t level) const;

  bool operator==(const BlockState&) const = default;
};

/// Thrown when a block state does not describe the given graph.
class InconsistentState : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

class EmptyGraph : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Microcanonical description length of the nested degree-corrected SBM:
/// multigraph entropy given block edge counts and degrees, a uniform prior on
/// the degree sequence within each level-0 block, and at each level the edge
/// count prior (edges spread over child block pairs) and the partition prior.
/// Partition priors are taken per node type.
double description_length(const BipartiteGraph& graph, const BlockState& state);

/// Fills block_edges and description_length from the graph.
BlockState make_block_state(const BipartiteGraph& graph, std::vector<std::vector<int>> partitions);

struct InferenceOptions {
  std::uint64_t seed = 0;
  int sweeps = 1000;
  int merge_passes = 10;
  double beta = 1.0;
};

struct InferenceResult {
  BlockState state;
  std::vector<double> best_trace;  // best description length after initialisation and after each sweep
};

/// Agglomerative initialisation then Metropolis-Hastings node-move sweeps at
/// every level. Returns the best state visited. Throws EmptyGraph when E = 0.
InferenceResult infer(const BipartiteGraph& graph, const InferenceOptions& options);

struct TopicModel {
  std::size_t level = 0;
  std::size_t topics = 0;
  std::vector<int> word_topic;                            // word id -> topic
  std::vector<std::vector<double>> word_given_topic;      // topics x V
  std::vector<std::vector<double>> topic_given_document;  // D x topics
};

/// Finest level whose word-side block count lies in [2, 50]. When no level
/// qualifies, the level whose count is nearest the range (finest on ties).
std::size_t select_level(const BlockState& state, std::size_t documents);

/// Word blocks at `level` become topics, numbered in block-id order.
TopicModel extract_topics(const BipartiteGraph& graph, const BlockState& state, std::size_t level);

/// Number of document-side and word-side blocks at `level`.
std::pair<std::size_t, std::size_t> side_block_counts(const BlockState& state, std::size_t level, std::size_t documents);

}  // namespace timeline
