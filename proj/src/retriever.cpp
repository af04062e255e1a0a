#include "acr/retriever.hpp"

#include <algorithm>

#include "acr/binio.hpp"
#include "acr/errors.hpp"
#include "acr/jsonl.hpp"

namespace acr {

namespace {
constexpr char kMagic[] = "ACRINDEX";
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::optional<Eigen::VectorXd> EmbeddingIndex::vector_for(const std::string& chunk_id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), chunk_id);
    if (it == ids.end() || *it != chunk_id) return std::nullopt;
    const Eigen::Index row = static_cast<Eigen::Index>(it - ids.begin());
    return rows.row(row).cast<double>().transpose();
}

EmbeddingIndex build_index(const std::vector<Chunk>& chunks, Embedder& embedder) {
    if (chunks.empty()) throw ConfigError("cannot build an index over zero chunks");

    std::vector<const Chunk*> order;
    order.reserve(chunks.size());
    for (const auto& c : chunks) order.push_back(&c);
    std::sort(order.begin(), order.end(),
              [](const Chunk* a, const Chunk* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->id == order[i - 1]->id) {
            throw ConfigError("duplicate chunk id in index build: " + order[i]->id);
        }
    }

    std::vector<std::string> texts;
    texts.reserve(order.size());
    for (const Chunk* c : order) texts.push_back(c->text);
    const auto vecs = embedder.embed(texts);

    EmbeddingIndex index;
    index.embedder_id = embedder.id();
    index.ids.reserve(order.size());
    index.rows.resize(static_cast<Eigen::Index>(order.size()), embedder.dimension());
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (vecs[i].size() != embedder.dimension()) {
            throw ConfigError("embedding dimension mismatch while indexing " + order[i]->id);
        }
        index.ids.push_back(order[i]->id);
        index.rows.row(static_cast<Eigen::Index>(i)) = vecs[i].cast<float>().transpose();
    }
    return index;
}

std::vector<Retrieved> retrieve(const EmbeddingIndex& index, const Eigen::VectorXd& query_vec,
                                int k, const AdapterModel* adapter) {
    if (k < 1) throw ConfigError("retrieval depth k must be >= 1");
    if (query_vec.size() != index.dim()) {
        throw ConfigError("query embedding dimension " + std::to_string(query_vec.size()) +
                          " does not match index dimension " + std::to_string(index.dim()));
    }
    if (adapter && adapter->dim() != index.dim()) {
        throw ConfigError("adapter dimension " + std::to_string(adapter->dim()) +
                          " does not match index dimension " + std::to_string(index.dim()));
    }

    const Eigen::VectorXd q = adapter ? adapter->transform(query_vec) : query_vec;
    std::vector<Retrieved> scored;
    scored.reserve(static_cast<std::size_t>(index.count()));
    for (Eigen::Index i = 0; i < index.count(); ++i) {
        Eigen::VectorXd row = index.rows.row(i).cast<double>().transpose();
        if (adapter) row = adapter->transform(row);
        scored.push_back({index.ids[static_cast<std::size_t>(i)], cosine(q, row)});
    }
    std::sort(scored.begin(), scored.end(), [](const Retrieved& a, const Retrieved& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.chunk_id < b.chunk_id;
    });
    if (static_cast<std::size_t>(k) < scored.size()) scored.resize(static_cast<std::size_t>(k));
    return scored;
}

std::vector<Retrieved> retrieve_text(const EmbeddingIndex& index, const std::string& query,
                                     Embedder& embedder, int k, const AdapterModel* adapter) {
    return retrieve(index, embedder.embed_one(query), k, adapter);
}

void save_index(const std::string& path, const EmbeddingIndex& index) {
    std::string out;
    out.append(kMagic, 8);
    binio::put_u32(out, kVersion);
    binio::put_u32(out, static_cast<std::uint32_t>(index.dim()));
    binio::put_u64(out, static_cast<std::uint64_t>(index.count()));
    binio::put_str(out, index.embedder_id);
    for (const auto& id : index.ids) binio::put_str(out, id);
    for (Eigen::Index r = 0; r < index.count(); ++r)
        for (Eigen::Index c = 0; c < index.dim(); ++c) binio::put_f32(out, index.rows(r, c));
    atomic_write(path, out);
}

EmbeddingIndex load_index(const std::string& path) {
    const std::string bytes = binio::read_file(path);
    binio::Reader r(bytes, "embedding index");
    r.expect_magic(kMagic, 8);
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw ParseError("unsupported index version " + std::to_string(version));
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(r.u32());
    const Eigen::Index count = static_cast<Eigen::Index>(r.u64());

    EmbeddingIndex index;
    index.embedder_id = r.str();
    index.ids.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index i = 0; i < count; ++i) index.ids.push_back(r.str());
    index.rows.resize(count, dim);
    for (Eigen::Index row = 0; row < count; ++row)
        for (Eigen::Index col = 0; col < dim; ++col) index.rows(row, col) = r.f32();
    if (!r.exhausted()) throw ParseError("embedding index has trailing bytes");
    return index;
}

}  // namespace acr
