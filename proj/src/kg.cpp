#include "acr/kg.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "acr/errors.hpp"
#include "acr/jsonl.hpp"
#include "acr/tokenizer.hpp"

namespace acr {

using nlohmann::json;

std::string normalize_entity_name(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool in_space = true;  // swallow leading whitespace
    for (char c : raw) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

int KnowledgeGraph::find_node(const std::string& canonical_name) const {
    for (const auto& n : nodes)
        if (n.name == canonical_name) return n.id;
    return -1;
}

bool KnowledgeGraph::has_edge(int a, int b, EdgeKind kind) const {
    for (const auto& e : edges) {
        if (e.kind != kind) continue;
        if ((e.source == a && e.target == b) || (e.source == b && e.target == a)) return true;
    }
    return false;
}

KnowledgeGraph build_graph(const std::vector<ExtractionRecord>& records, GraphBuildStats* stats) {
    KnowledgeGraph kg;
    GraphBuildStats local;

    std::map<std::string, int> index;
    for (const auto& rec : records) {
        for (const auto& ent : rec.entities) {
            const std::string canon = normalize_entity_name(ent.name);
            if (canon.empty()) continue;
            auto it = index.find(canon);
            if (it == index.end()) {
                EntityNode node;
                node.id = static_cast<int>(kg.nodes.size());
                node.name = canon;
                node.type = ent.type;
                if (!ent.description.empty()) node.descriptions.push_back(ent.description);
                if (!rec.chunk_id.empty()) node.chunk_ids.insert(rec.chunk_id);
                index.emplace(canon, node.id);
                kg.nodes.push_back(std::move(node));
            } else {
                EntityNode& node = kg.nodes[static_cast<std::size_t>(it->second)];
                if (!ent.description.empty() &&
                    std::find(node.descriptions.begin(), node.descriptions.end(),
                              ent.description) == node.descriptions.end()) {
                    node.descriptions.push_back(ent.description);
                }
                if (!rec.chunk_id.empty()) node.chunk_ids.insert(rec.chunk_id);
            }
        }
    }

    std::set<std::pair<int, int>> extracted_pairs;
    for (const auto& rec : records) {
        for (const auto& rel : rec.relations) {
            auto src = index.find(normalize_entity_name(rel.source));
            auto tgt = index.find(normalize_entity_name(rel.target));
            if (src == index.end() || tgt == index.end() || src->second == tgt->second) {
                ++local.dropped_relations;
                continue;
            }
            const auto key = std::minmax(src->second, tgt->second);
            if (!extracted_pairs.insert(key).second) {
                ++local.duplicate_relations;
                continue;
            }
            RelationEdge edge;
            edge.source = src->second;
            edge.target = tgt->second;
            edge.description = rel.description;
            edge.strength = rel.strength;
            edge.kind = EdgeKind::Extracted;
            edge.chunk_id = rec.chunk_id;
            kg.edges.push_back(std::move(edge));
        }
    }

    build_adjacency(kg);
    if (stats) *stats = local;
    return kg;
}

void build_adjacency(KnowledgeGraph& kg) {
    kg.adjacency.assign(kg.nodes.size(), {});
    for (const auto& e : kg.edges) {
        kg.adjacency[static_cast<std::size_t>(e.source)].push_back(e.target);
        kg.adjacency[static_cast<std::size_t>(e.target)].push_back(e.source);
    }
    for (auto& neigh : kg.adjacency) {
        std::sort(neigh.begin(), neigh.end());
        neigh.erase(std::unique(neigh.begin(), neigh.end()), neigh.end());
    }
}

void embed_nodes(KnowledgeGraph& kg, Embedder& embedder) {
    std::vector<std::string> names;
    std::vector<std::size_t> targets;
    for (std::size_t i = 0; i < kg.nodes.size(); ++i) {
        if (kg.nodes[i].embedding.size() == 0) {
            names.push_back(kg.nodes[i].name);
            targets.push_back(i);
        }
    }
    if (kg.embedding_dim != 0 && kg.embedding_dim != embedder.dimension()) {
        throw ConfigError("embedding dimension drift: graph has " +
                          std::to_string(kg.embedding_dim) + ", embedder yields " +
                          std::to_string(embedder.dimension()));
    }
    if (names.empty()) {
        kg.embedding_dim = embedder.dimension();
        return;
    }
    auto vecs = embedder.embed(names);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        kg.nodes[targets[i]].embedding = vecs[i];
    }
    kg.embedding_dim = embedder.dimension();
}

int augment_similarity_edges(KnowledgeGraph& kg, Embedder& embedder, double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ConfigError("similarity threshold must lie in (0,1), got " + std::to_string(tau));
    }
    embed_nodes(kg, embedder);

    std::set<std::pair<int, int>> augmented;
    for (const auto& e : kg.edges) {
        if (e.kind == EdgeKind::Augmented) augmented.insert(std::minmax(e.source, e.target));
    }

    // Full pairwise sweep, as suits desk-scale graphs. For large graphs this
    // is the place to block the computation.
    int added = 0;
    const int n = static_cast<int>(kg.nodes.size());
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (augmented.count({i, j})) continue;
            const double cos = kg.nodes[static_cast<std::size_t>(i)].embedding.dot(
                kg.nodes[static_cast<std::size_t>(j)].embedding);
            if (cos > tau) {
                RelationEdge edge;
                edge.source = i;
                edge.target = j;
                edge.description = "Rel_aug";
                edge.strength = 1.0;
                edge.kind = EdgeKind::Augmented;
                kg.edges.push_back(std::move(edge));
                augmented.insert({i, j});
                ++added;
            }
        }
    }
    kg.similarity_tau = tau;
    build_adjacency(kg);
    return added;
}

namespace {

// All capitalized spans of the text (consecutive capitalized tokens merged).
std::vector<std::string> capitalized_spans(const std::string& text) {
    Tokenizer tok;
    const auto tokens = tok.tokenize(text);
    std::vector<std::string> spans;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (!tokens[i].empty() && std::isupper(static_cast<unsigned char>(tokens[i][0]))) {
            std::string span = tokens[i];
            std::size_t j = i + 1;
            while (j < tokens.size() && !tokens[j].empty() &&
                   std::isupper(static_cast<unsigned char>(tokens[j][0]))) {
                span += " " + tokens[j];
                ++j;
            }
            spans.push_back(span);
            i = j;
        } else {
            ++i;
        }
    }
    return spans;
}

}  // namespace

MatchResult match_entities(const QAPair& qa, const KnowledgeGraph& kg, Embedder* embedder,
                           double fallback_tau) {
    MatchResult result;
    if (kg.nodes.empty()) return result;

    std::map<std::string, int> index;
    for (const auto& n : kg.nodes) index.emplace(n.name, n.id);

    auto try_exact = [&](const std::vector<std::string>& forms, MatchProvenance prov) {
        for (const auto& form : forms) {
            auto it = index.find(normalize_entity_name(form));
            if (it != index.end() && result.node_ids.insert(it->second).second) {
                result.provenance.emplace(it->second, prov);
            }
        }
    };

    std::vector<std::string> answer_forms = capitalized_spans(qa.answer);
    answer_forms.push_back(qa.answer);
    std::vector<std::string> question_forms = capitalized_spans(qa.question);

    try_exact(answer_forms, MatchProvenance::AnswerExact);
    try_exact(question_forms, MatchProvenance::QuestionExact);

    if (result.node_ids.empty() && embedder != nullptr) {
        std::vector<std::string> all_forms = answer_forms;
        all_forms.insert(all_forms.end(), question_forms.begin(), question_forms.end());
        const auto vecs = embedder->embed(all_forms);
        for (const auto& v : vecs) {
            for (const auto& node : kg.nodes) {
                if (node.embedding.size() == 0) continue;
                if (v.dot(node.embedding) >= fallback_tau &&
                    result.node_ids.insert(node.id).second) {
                    result.provenance.emplace(node.id, MatchProvenance::EmbeddingFallback);
                }
            }
        }
    }
    return result;
}

std::vector<AugmentEntity> entity_payload(const KnowledgeGraph& kg, const std::vector<int>& ids) {
    std::vector<AugmentEntity> out;
    out.reserve(ids.size());
    for (int id : ids) {
        const auto& node = kg.nodes.at(static_cast<std::size_t>(id));
        out.push_back({node.name, node.type, node.descriptions});
    }
    return out;
}

void save_graph(const std::string& dir, const KnowledgeGraph& kg) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    std::string nodes_out;
    for (const auto& n : kg.nodes) {
        json rec{{"id", n.id},
                 {"name", n.name},
                 {"type", n.type},
                 {"descriptions", n.descriptions},
                 {"chunk_ids", std::vector<std::string>(n.chunk_ids.begin(), n.chunk_ids.end())}};
        std::vector<double> emb(n.embedding.data(), n.embedding.data() + n.embedding.size());
        rec["embedding"] = emb;
        nodes_out += rec.dump();
        nodes_out.push_back('\n');
    }
    atomic_write((fs::path(dir) / "nodes.jsonl").string(), nodes_out);

    std::string edges_out;
    for (const auto& e : kg.edges) {
        json rec{{"source", e.source},
                 {"target", e.target},
                 {"description", e.description},
                 {"strength", e.strength},
                 {"kind", e.kind == EdgeKind::Extracted ? "extracted" : "augmented"},
                 {"chunk_id", e.chunk_id}};
        edges_out += rec.dump();
        edges_out.push_back('\n');
    }
    atomic_write((fs::path(dir) / "edges.jsonl").string(), edges_out);

    json manifest{{"node_count", kg.nodes.size()},
                  {"edge_count", kg.edges.size()},
                  {"embedding_dim", kg.embedding_dim},
                  {"similarity_tau", kg.similarity_tau}};
    atomic_write((fs::path(dir) / "graph_manifest.json").string(), manifest.dump(2) + "\n");
}

KnowledgeGraph load_graph(const std::string& dir) {
    namespace fs = std::filesystem;
    KnowledgeGraph kg;

    for_each_jsonl((fs::path(dir) / "nodes.jsonl").string(), [&](const json& rec, long line) {
        EntityNode n;
        n.id = require_field<int>(rec, "id", line);
        n.name = require_field<std::string>(rec, "name", line);
        n.type = require_field<std::string>(rec, "type", line);
        n.descriptions = require_field<std::vector<std::string>>(rec, "descriptions", line);
        auto cids = require_field<std::vector<std::string>>(rec, "chunk_ids", line);
        n.chunk_ids.insert(cids.begin(), cids.end());
        auto emb = require_field<std::vector<double>>(rec, "embedding", line);
        n.embedding = Eigen::Map<const Eigen::VectorXd>(emb.data(),
                                                        static_cast<Eigen::Index>(emb.size()));
        kg.nodes.push_back(std::move(n));
    });

    for_each_jsonl((fs::path(dir) / "edges.jsonl").string(), [&](const json& rec, long line) {
        RelationEdge e;
        e.source = require_field<int>(rec, "source", line);
        e.target = require_field<int>(rec, "target", line);
        e.description = require_field<std::string>(rec, "description", line);
        e.strength = require_field<double>(rec, "strength", line);
        e.kind = require_field<std::string>(rec, "kind", line) == "augmented" ? EdgeKind::Augmented
                                                                              : EdgeKind::Extracted;
        e.chunk_id = require_field<std::string>(rec, "chunk_id", line);
        kg.edges.push_back(std::move(e));
    });

    std::ifstream mf(fs::path(dir) / "graph_manifest.json");
    if (mf) {
        json manifest = json::parse(mf, nullptr, false);
        if (!manifest.is_discarded()) {
            kg.embedding_dim = manifest.value("embedding_dim", Eigen::Index(0));
            kg.similarity_tau = manifest.value("similarity_tau", 0.0);
        }
    }

    build_adjacency(kg);
    return kg;
}

}  // namespace acr
