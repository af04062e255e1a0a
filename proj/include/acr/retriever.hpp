#pragma once

// Exact cosine top-k retrieval over unit base embeddings, optionally through
// an adapter. Exhaustive search: per-document chunk sets are small enough
// that correctness and determinism beat approximate structures.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acr/adapter.hpp"
#include "acr/backends.hpp"
#include "acr/corpus.hpp"

namespace acr {

struct EmbeddingIndex {
    std::vector<std::string> ids;  // ascending
    // One unit row per chunk; f32 storage matches the on-disk format so the
    // in-memory index equals its own save/load round trip.
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows;
    std::string embedder_id;

    Eigen::Index count() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }

    // Base vector for a chunk id (as double), or nullopt if absent.
    std::optional<Eigen::VectorXd> vector_for(const std::string& chunk_id) const;
};

struct Retrieved {
    std::string chunk_id;
    double similarity;
};

// Embeds all chunk texts (order stable by chunk id) into one index.
// Duplicate ids or a dimension mismatch are build errors.
EmbeddingIndex build_index(const std::vector<Chunk>& chunks, Embedder& embedder);

// Top-k by (adapted) cosine, descending, ties by chunk id ascending.
// k > count returns everything.
std::vector<Retrieved> retrieve(const EmbeddingIndex& index, const Eigen::VectorXd& query_vec,
                                int k, const AdapterModel* adapter = nullptr);

std::vector<Retrieved> retrieve_text(const EmbeddingIndex& index, const std::string& query,
                                     Embedder& embedder, int k,
                                     const AdapterModel* adapter = nullptr);

// File format: magic, version, d, count, embedder id, length-prefixed id
// table, row-major f32 matrix. Byte-exact round trip.
void save_index(const std::string& path, const EmbeddingIndex& index);
EmbeddingIndex load_index(const std::string& path);

}  // namespace acr
