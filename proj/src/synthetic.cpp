#include "acr/synthetic.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <filesystem>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "acr/alignment.hpp"
#include "acr/errors.hpp"
#include "acr/evalx.hpp"
#include "acr/hashing.hpp"
#include "acr/jsonl.hpp"
#include "acr/kg.hpp"
#include "acr/mocks.hpp"
#include "acr/ppr.hpp"
#include "acr/retriever.hpp"

namespace acr {

using nlohmann::json;

namespace {

// Question keywords come from one small shared pool so paraphrase queries
// collide with distractor chunks across documents; the markers appear only
// in distractor chunks, giving the adapter a global feature to learn.
const std::vector<std::string> kKeywordPool = {"ledger", "harbor",   "signal", "orchard",
                                               "lantern", "compass", "meridian", "tide"};
const std::vector<std::string> kMarkers = {"dross", "murk", "haze"};

const std::vector<std::string> kSyllables = {"ba", "ce", "di", "fo", "gu", "ha", "ki",
                                             "lo", "mu", "ne", "pa", "qo", "ri", "su",
                                             "ta", "ve", "wi", "xo", "yu", "zem"};

class WordMill {
public:
    explicit WordMill(std::uint64_t seed) : rng_(splitmix64(seed)) {}

    std::string word(int syllables) {
        while (true) {
            std::string w;
            for (int i = 0; i < syllables; ++i) w += kSyllables[rng_() % kSyllables.size()];
            if (used_.insert(w).second) return w;
        }
    }

    // Entity families share a prefix so their character n-grams overlap; the
    // adapter can then treat each family as one learnable direction.
    std::string entity(const std::string& family) {
        std::string suffix = word(2);
        suffix[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(suffix[0])));
        return family + suffix;
    }

    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

private:
    std::mt19937_64 rng_;
    std::set<std::string> used_;
};

struct DocPlan {
    std::string answer, keeper, guild;
    std::vector<std::string> far, leaf;
    std::vector<std::string> topics;
    std::vector<std::string> keywords;  // 3 of the global pool
};

// Pads a token list with unique filler words up to `len` tokens.
void pad_tokens(std::vector<std::string>& tokens, std::size_t len, WordMill& mill) {
    if (tokens.size() > len) {
        throw ConfigError("synthetic segment overflows its token budget: " +
                          std::to_string(tokens.size()) + " > " + std::to_string(len));
    }
    while (tokens.size() < len) tokens.push_back(mill.word(3));
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
    if (spec.chunk_window <= spec.chunk_overlap) {
        throw ConfigError("synthetic chunk window must exceed overlap");
    }
    SyntheticCorpus corpus;
    corpus.spec = spec;
    WordMill mill(spec.seed);
    Tokenizer tok;
    const std::size_t stride = spec.chunk_window - spec.chunk_overlap;

    for (int d = 0; d < spec.n_docs; ++d) {
        DocPlan plan;
        plan.answer = mill.entity("Zyq");
        plan.keeper = mill.entity("Vex");
        plan.guild = mill.entity("Gild");
        for (int i = 0; i < 4; ++i) plan.far.push_back(mill.entity("Fero"));
        for (int i = 0; i < 4; ++i) plan.leaf.push_back(mill.entity("Rim"));
        for (int i = 0; i < 4; ++i) plan.topics.push_back(mill.word(2));
        std::set<std::size_t> picked;
        while (picked.size() < 3) picked.insert(mill.pick(kKeywordPool.size()));
        for (std::size_t k : picked) plan.keywords.push_back(kKeywordPool[k]);

        const auto& t = plan.topics;
        const auto& q = plan.keywords;
        std::vector<std::string> doc_tokens;

        for (int seg = 0; seg < spec.segments_per_doc; ++seg) {
            std::vector<std::string> tokens;
            auto add = [&](std::initializer_list<std::string> words) {
                tokens.insert(tokens.end(), words.begin(), words.end());
            };
            if (seg == 0) {
                // Planted answer-sufficient chunk: keywords, guild, keeper
                // and the answer entity itself.
                add({t[0], q[0], t[1], q[1], "."});
                add({plan.keeper, "serves", plan.guild, "."});
                add({plan.keeper, "guards", "the", "relic", plan.answer, "."});
                add({plan.answer, "empowers", plan.guild, "."});
                add({q[2], t[2], t[3], "."});
            } else if (seg <= spec.distractors_per_qa) {
                // Near-duplicate distractor: same keyword shell, no answer,
                // marker words instead.
                add({t[0], q[0], t[1], q[1], "."});
                add({plan.guild, "convenes", "the", "relic", "council", "."});
                add({kMarkers[0], kMarkers[1], kMarkers[2], "linger", "."});
                add({q[2], t[2], t[3], "."});
                add({kMarkers[0], kMarkers[1], kMarkers[2], "remain", "."});
            } else {
                // Filler: topic words plus far entities, no keywords.
                const std::size_t f = static_cast<std::size_t>(seg - spec.distractors_per_qa - 1) %
                                      plan.far.size();
                add({t[0], t[1], "."});
                add({plan.far[f], "supports", plan.guild, "."});
                add({plan.far[f], "admires", plan.leaf[f], "."});
                add({t[2], t[3], "."});
            }
            pad_tokens(tokens, stride, mill);
            doc_tokens.insert(doc_tokens.end(), tokens.begin(), tokens.end());
        }

        Document doc;
        std::ostringstream id;
        id << "doc" << std::setw(3) << std::setfill('0') << d;
        doc.id = id.str();
        doc.title = "Chronicle of " + plan.guild;
        doc.text = tok.detokenize(doc_tokens);
        corpus.documents.push_back(doc);

        QAPair qa;
        qa.id = "qa-" + doc.id;
        qa.doc_id = doc.id;
        qa.question =
            "Which relic of " + plan.guild + " concerns " + q[0] + " " + q[1] + " " + q[2] + " ?";
        qa.answer = plan.answer;
        corpus.qa_pairs.push_back(qa);

        corpus.paraphrases[qa.id] = {
            "Name the relic that " + plan.guild + " holds concerning " + q[1] + " " + q[0] + " " +
                q[2] + " .",
            "Tell me the relic " + plan.guild + " keeps amid " + q[2] + " " + q[0] + " " + q[1] +
                " .",
            "State the relic " + plan.guild + " shelters regarding " + q[0] + " " + q[2] + " " +
                q[1] + " .",
        };
        if (static_cast<int>(corpus.paraphrases[qa.id].size()) > spec.paraphrases_per_qa) {
            corpus.paraphrases[qa.id].resize(static_cast<std::size_t>(spec.paraphrases_per_qa));
        }

        auto chunks = chunk_document(doc, spec.chunk_window, spec.chunk_overlap, tok);
        for (const auto& c : chunks) {
            if (c.text.find(plan.answer) != std::string::npos) {
                corpus.planted[qa.id] = c.id;
            } else if (c.index >= 1 &&
                       c.index <= static_cast<std::size_t>(spec.distractors_per_qa)) {
                corpus.distractors[qa.id].push_back(c.id);
            }
        }
        corpus.chunks.insert(corpus.chunks.end(), chunks.begin(), chunks.end());
        if (!corpus.planted.count(qa.id)) {
            throw ConfigError("synthetic corpus failed to plant an answer chunk for " + qa.id);
        }
    }
    return corpus;
}

namespace {

struct MiningPools {
    // qa_id -> merged negatives per size class
    std::map<std::string, std::vector<std::string>> large;
    std::map<std::string, std::vector<std::string>> small;
};

MiningPools mine_pools(const SyntheticRunConfig& cfg, const SyntheticCorpus& corpus,
                       const std::map<std::string, EmbeddingIndex>& doc_indexes,
                       const std::map<std::string, AugmentedPool>& pools,
                       const std::map<std::string, std::vector<std::string>>& positives,
                       Embedder& embedder, const AdapterModel& adapter, SizeClass cls) {
    MiningPools out;
    for (const auto& qa : corpus.qa_pairs) {
        const auto& pool = pools.at(qa.id);
        const auto& queries = (cls == SizeClass::Large) ? pool.large : pool.small;
        std::vector<std::vector<std::string>> lists;
        for (const auto& aq : queries) {
            lists.push_back(mine_hard_negatives(doc_indexes.at(qa.doc_id), embedder, aq.text,
                                                positives.at(qa.id), cfg.retrieval_depth,
                                                &adapter));
        }
        auto merged = merge_negative_lists(lists, static_cast<std::size_t>(cfg.negative_cap));
        auto& target = (cls == SizeClass::Large) ? out.large : out.small;
        target[qa.id] = std::move(merged);
    }
    return out;
}

double mean_recall(const SyntheticCorpus& corpus, const EmbeddingIndex& index, Embedder& embedder,
                   const AdapterModel* adapter, int depth, double* mrr_out) {
    double recall_sum = 0.0;
    double mrr_sum = 0.0;
    int n = 0;
    for (const auto& qa : corpus.qa_pairs) {
        const std::set<std::string> relevant{corpus.planted.at(qa.id)};
        for (const auto& para : corpus.paraphrases.at(qa.id)) {
            const auto results = retrieve_text(index, para, embedder, index.ids.size() > 0
                                                   ? static_cast<int>(index.ids.size())
                                                   : 1,
                                               adapter);
            std::vector<std::string> ids;
            ids.reserve(results.size());
            for (const auto& r : results) ids.push_back(r.chunk_id);
            recall_sum += recall_at_k(ids, relevant, depth);
            mrr_sum += mrr(ids, relevant);
            ++n;
        }
    }
    if (mrr_out) *mrr_out = n ? mrr_sum / n : 0.0;
    return n ? recall_sum / n : 0.0;
}

std::string run_config_hash(const SyntheticRunConfig& cfg) {
    json j{{"seed", cfg.corpus.seed},
           {"n_docs", cfg.corpus.n_docs},
           {"segments", cfg.corpus.segments_per_doc},
           {"kg_tau", cfg.kg_tau},
           {"alpha", cfg.ppr_alpha},
           {"epsilon", cfg.ppr_epsilon},
           {"k_large", cfg.k_large},
           {"k_small", cfg.k_small},
           {"positives", cfg.positives},
           {"queries", cfg.queries_per_subgraph},
           {"depth", cfg.retrieval_depth},
           {"cap", cfg.negative_cap},
           {"epochs", cfg.trainer.epochs},
           {"batch", cfg.trainer.batch_size},
           {"accum", cfg.trainer.grad_accumulation},
           {"lr", cfg.trainer.learning_rate},
           {"tau_c", cfg.trainer.temperature}};
    return hash_hex(fnv1a64(j.dump()));
}

}  // namespace

SyntheticMetrics run_synthetic_e2e(const SyntheticRunConfig& cfg, const std::string& out_dir,
                                   SyntheticArtifacts* artifacts) {
    namespace fs = std::filesystem;
    const auto t0 = std::chrono::steady_clock::now();

    SyntheticArtifacts local;
    SyntheticArtifacts& art = artifacts ? *artifacts : local;
    art.corpus = make_synthetic_corpus(cfg.corpus);
    const SyntheticCorpus& corpus = art.corpus;

    MockEntityExtractor extractor;
    MockHashEmbedder embedder(64, cfg.corpus.seed);
    ContainsAnswerScorer scorer;
    MockQueryAugmenter augmenter(cfg.corpus.seed);
    PromptLibrary prompts = PromptLibrary::defaults();

    // Knowledge graph from per-chunk extractions.
    std::vector<ExtractionRecord> records;
    records.reserve(corpus.chunks.size());
    for (const auto& chunk : corpus.chunks) records.push_back(extractor.extract(chunk));
    KnowledgeGraph kg = build_graph(records);
    augment_similarity_edges(kg, embedder, cfg.kg_tau);
    const TransitionMatrix transition = build_transition(kg);

    // Subgraphs and augmented query pools per QA pair.
    const PprParams params_large{cfg.ppr_alpha, cfg.ppr_epsilon, cfg.k_large};
    const PprParams params_small{cfg.ppr_alpha, cfg.ppr_epsilon, cfg.k_small};
    std::map<std::string, AugmentedPool> pools;
    for (const auto& qa : corpus.qa_pairs) {
        const QaSubgraphs subs =
            subgraph_for_qa(kg, transition, qa, &embedder, params_large, params_small);
        pools.emplace(qa.id, build_augmented_pool(qa, kg, subs.large, subs.small,
                                                  cfg.queries_per_subgraph, augmenter));
    }

    // Alignment scoring and the positive sets.
    std::map<std::string, std::vector<Chunk>> chunks_by_doc;
    for (const auto& c : corpus.chunks) chunks_by_doc[c.doc_id].push_back(c);
    const AlignmentWeights weights;  // published defaults
    std::map<std::string, std::vector<std::string>> positives;
    for (const auto& qa : corpus.qa_pairs) {
        const auto scored =
            score_chunks(qa, chunks_by_doc.at(qa.doc_id), scorer, embedder, weights, prompts);
        positives[qa.id] = select_positives(scored.scores, cfg.positives);
    }

    // Indexes: per-document for mining, global for training and eval.
    std::map<std::string, EmbeddingIndex> doc_indexes;
    for (const auto& [doc_id, chunks] : chunks_by_doc) {
        doc_indexes.emplace(doc_id, build_index(chunks, embedder));
    }
    art.index = build_index(corpus.chunks, embedder);

    const std::string cfg_hash = run_config_hash(cfg);
    const std::string backend_ids = extractor.id() + "," + scorer.id() + "," + embedder.id() +
                                    "," + augmenter.id();
    art.baseline = AdapterModel::identity(embedder.dimension(), cfg.trainer.temperature);

    StageAssemblyInput input;
    input.qa_pairs = corpus.qa_pairs;
    input.positives = positives;

    StageManifest manifest;
    manifest.config_hash = cfg_hash;
    manifest.backend_ids = backend_ids;
    manifest.seed = cfg.trainer.seed;
    manifest.adapter_hash = hash_hex(art.baseline.content_hash());
    art.stage1 = assemble_stage(1, input, manifest);

    art.reports.resize(3);
    AdapterModel adapter =
        train_stage(art.baseline, art.stage1, art.index, embedder, cfg.trainer, &art.reports[0]);

    // Stage 2: negatives mined with the post-stage-1 adapter over the large
    // query pools.
    MiningPools pools_l = mine_pools(cfg, corpus, doc_indexes, pools, positives, embedder, adapter,
                                     SizeClass::Large);
    input.negatives = pools_l.large;
    manifest.adapter_hash = hash_hex(adapter.content_hash());
    art.stage2 = assemble_stage(2, input, manifest);
    adapter = train_stage(adapter, art.stage2, art.index, embedder, cfg.trainer, &art.reports[1]);

    // Stage 3: harder negatives from the small pools, post-stage-2 adapter.
    MiningPools pools_s = mine_pools(cfg, corpus, doc_indexes, pools, positives, embedder, adapter,
                                     SizeClass::Small);
    input.negatives = pools_s.small;
    manifest.adapter_hash = hash_hex(adapter.content_hash());
    art.stage3 = assemble_stage(3, input, manifest);
    adapter = train_stage(adapter, art.stage3, art.index, embedder, cfg.trainer, &art.reports[2]);
    art.final_adapter = adapter;

    SyntheticMetrics metrics;
    metrics.baseline_recall =
        mean_recall(corpus, art.index, embedder, nullptr, cfg.eval_depth, &metrics.baseline_mrr);
    metrics.final_recall =
        mean_recall(corpus, art.index, embedder, &adapter, cfg.eval_depth, &metrics.final_mrr);
    metrics.improvement = metrics.final_recall - metrics.baseline_recall;
    metrics.heldout_queries =
        static_cast<int>(corpus.qa_pairs.size()) * cfg.corpus.paraphrases_per_qa;
    metrics.adapter_hash = hash_hex(adapter.content_hash());
    metrics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        save_documents((fs::path(out_dir) / "documents.jsonl").string(), corpus.documents);
        save_qa_pairs((fs::path(out_dir) / "qa.jsonl").string(), corpus.qa_pairs);
        save_chunks((fs::path(out_dir) / "chunks.jsonl").string(), corpus.chunks);
        save_graph((fs::path(out_dir) / "graph").string(), kg);
        save_index((fs::path(out_dir) / "index.bin").string(), art.index);
        save_stage_dataset((fs::path(out_dir) / "stage1.jsonl").string(), art.stage1);
        save_stage_dataset((fs::path(out_dir) / "stage2.jsonl").string(), art.stage2);
        save_stage_dataset((fs::path(out_dir) / "stage3.jsonl").string(), art.stage3);
        art.baseline.save((fs::path(out_dir) / "adapter_baseline.bin").string());
        art.final_adapter.save((fs::path(out_dir) / "adapter_final.bin").string());
        // Wall time deliberately left out: the metrics file must be
        // byte-identical across equal-seed runs.
        json mj{{"baseline_recall", metrics.baseline_recall},
                {"final_recall", metrics.final_recall},
                {"improvement", metrics.improvement},
                {"baseline_mrr", metrics.baseline_mrr},
                {"final_mrr", metrics.final_mrr},
                {"heldout_queries", metrics.heldout_queries},
                {"eval_depth", cfg.eval_depth},
                {"adapter_hash", metrics.adapter_hash},
                {"config_hash", cfg_hash},
                {"seed", cfg.corpus.seed}};
        atomic_write((fs::path(out_dir) / "metrics.json").string(), mj.dump(2) + "\n");
    }
    return metrics;
}

}  // namespace acr
