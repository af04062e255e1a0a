#include "acr/adapter.hpp"

#include "acr/binio.hpp"
#include "acr/errors.hpp"
#include "acr/hashing.hpp"
#include "acr/jsonl.hpp"

namespace acr {

namespace {
constexpr char kMagic[] = "ACRADAPT";
constexpr std::uint32_t kVersion = 1;
}  // namespace

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= 0.0 || nb <= 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

AdapterModel AdapterModel::identity(Eigen::Index d, double tau_c) {
    AdapterModel m;
    m.weight = Eigen::MatrixXd::Identity(d, d);
    m.temperature = tau_c;
    return m;
}

std::string AdapterModel::to_bytes() const {
    const Eigen::Index d = dim();
    std::string out;
    out.reserve(static_cast<std::size_t>(8 + 4 + 4 + d * d * 4 + 8 + 8 + 8));
    out.append(kMagic, 8);
    binio::put_u32(out, kVersion);
    binio::put_u32(out, static_cast<std::uint32_t>(d));
    for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index c = 0; c < d; ++c)
            binio::put_f32(out, static_cast<float>(weight(r, c)));
    binio::put_f64(out, temperature);
    binio::put_u64(out, seed);
    binio::put_u64(out, parent_hash);
    return out;
}

AdapterModel AdapterModel::from_bytes(const std::string& bytes) {
    binio::Reader r(bytes, "adapter checkpoint");
    r.expect_magic(kMagic, 8);
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw ParseError("unsupported adapter checkpoint version " + std::to_string(version));
    }
    const Eigen::Index d = static_cast<Eigen::Index>(r.u32());
    AdapterModel m;
    m.weight.resize(d, d);
    for (Eigen::Index row = 0; row < d; ++row)
        for (Eigen::Index col = 0; col < d; ++col) m.weight(row, col) = static_cast<double>(r.f32());
    m.temperature = r.f64();
    m.seed = r.u64();
    m.parent_hash = r.u64();
    if (!r.exhausted()) throw ParseError("adapter checkpoint has trailing bytes");
    if (!(m.temperature > 0.0)) throw ParseError("adapter checkpoint has non-positive temperature");
    return m;
}

void AdapterModel::save(const std::string& path) const { atomic_write(path, to_bytes()); }

AdapterModel AdapterModel::load(const std::string& path) {
    return from_bytes(binio::read_file(path));
}

std::uint64_t AdapterModel::content_hash() const { return fnv1a64(to_bytes()); }

}  // namespace acr
