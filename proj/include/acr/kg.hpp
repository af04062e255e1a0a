#pragma once

// Knowledge graph assembled from per-chunk extraction records: merged entity
// nodes, extracted relation edges, and similarity-augmented edges.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "acr/backends.hpp"
#include "acr/corpus.hpp"

namespace acr {

enum class EdgeKind { Extracted, Augmented };

struct EntityNode {
    int id = -1;  // dense, assigned at build time
    std::string name;  // canonical: case-folded, trimmed, whitespace-collapsed
    std::string type;
    std::vector<std::string> descriptions;
    std::set<std::string> chunk_ids;
    EmbeddingVector embedding;  // size 0 until embedded
};

struct RelationEdge {
    int source = -1;
    int target = -1;
    std::string description;
    double strength = 1.0;
    EdgeKind kind = EdgeKind::Extracted;
    std::string chunk_id;  // empty for augmented edges
};

struct KnowledgeGraph {
    std::vector<EntityNode> nodes;
    std::vector<RelationEdge> edges;
    // Undirected view, one sorted unique neighbor list per node; kept in
    // sync with edges by build_adjacency.
    std::vector<std::vector<int>> adjacency;
    Eigen::Index embedding_dim = 0;
    double similarity_tau = 0.0;  // recorded once augmentation ran

    int find_node(const std::string& canonical_name) const;
    bool has_edge(int a, int b, EdgeKind kind) const;
};

std::string normalize_entity_name(const std::string& raw);

struct GraphBuildStats {
    int dropped_relations = 0;    // endpoint never extracted
    int duplicate_relations = 0;  // same-kind parallel edge collapsed
};

// Merges entities with equal canonical names (descriptions concatenated,
// chunk ids unioned) and resolves relations against them. Relations with an
// unresolvable endpoint are dropped and counted.
KnowledgeGraph build_graph(const std::vector<ExtractionRecord>& records,
                           GraphBuildStats* stats = nullptr);

void build_adjacency(KnowledgeGraph& kg);

// Embeds every node's canonical name. Idempotent; hard error on dimension
// drift against an already-embedded graph.
void embed_nodes(KnowledgeGraph& kg, Embedder& embedder);

// Adds one undirected augmented edge (canonical source<target, description
// "Rel_aug") for every unordered node pair with cosine strictly above tau.
// Applying twice equals applying once. Returns the number of edges added.
int augment_similarity_edges(KnowledgeGraph& kg, Embedder& embedder, double tau);

enum class MatchProvenance { AnswerExact, QuestionExact, EmbeddingFallback };

struct MatchResult {
    std::set<int> node_ids;
    std::map<int, MatchProvenance> provenance;
    bool empty() const { return node_ids.empty(); }
};

// Seeds for subgraph extraction: canonical-name matches of surface forms
// from the answer (primary) and question (secondary); when nothing matches
// exactly, an embedding fallback admits nodes with cosine >= fallback_tau to
// any surface form. An empty result is reportable, not fatal.
MatchResult match_entities(const QAPair& qa, const KnowledgeGraph& kg, Embedder* embedder,
                           double fallback_tau = 0.9);

// Entity payload for the query augmenter, ordered by node id.
std::vector<AugmentEntity> entity_payload(const KnowledgeGraph& kg, const std::vector<int>& ids);

// Two record files plus a manifest carrying node/edge counts, embedding
// dimension and the tau used.
void save_graph(const std::string& dir, const KnowledgeGraph& kg);
KnowledgeGraph load_graph(const std::string& dir);

}  // namespace acr
