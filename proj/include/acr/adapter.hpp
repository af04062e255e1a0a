#pragma once

// Trainable linear adapter over frozen base embeddings. The adapted
// similarity is the cosine of W*q and W*t; with W = identity it reproduces
// the base retriever's similarity exactly.

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace acr {

// Cosine of two raw (not necessarily unit) vectors; 0 when either is
// degenerate.
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct AdapterModel {
    Eigen::MatrixXd weight;     // d x d
    double temperature = 0.05;  // contrastive tau_c
    std::uint64_t seed = 0;
    std::uint64_t parent_hash = 0;  // checkpoint chain; 0 for the identity root

    static AdapterModel identity(Eigen::Index d, double tau_c = 0.05);

    Eigen::Index dim() const { return weight.rows(); }

    Eigen::VectorXd transform(const Eigen::VectorXd& v) const { return weight * v; }

    // cos(W q, W t); returns 0 with a degenerate projection.
    double similarity(const Eigen::VectorXd& q, const Eigen::VectorXd& t) const {
        return cosine(transform(q), transform(t));
    }

    // Checkpoint format: magic, version, d, row-major 32-bit LE floats,
    // tau_c, seed, parent hash. Round-trips byte-exactly; to_bytes defines
    // the quantization used for hashing and chaining.
    std::string to_bytes() const;
    static AdapterModel from_bytes(const std::string& bytes);

    void save(const std::string& path) const;
    static AdapterModel load(const std::string& path);

    std::uint64_t content_hash() const;

    // The adapter as it would exist after a save/load round trip (weights
    // quantized to f32). Checkpoint chaining always hashes this form.
    AdapterModel canonical() const { return from_bytes(to_bytes()); }
};

}  // namespace acr
