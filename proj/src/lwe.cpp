#include "chuarc/lwe.hpp"

#include "chuarc/error.hpp"
#include "chuarc/parallel.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace chuarc::lwe {

void LweParams::validate() const {
    if (q < 2) throw ConfigError("lwe.q", "modulus must be at least 2");
    if (n != 1) throw ConfigError("lwe.n", "only the scalar secret (n = 1) is supported");
    if (m < 1) throw ConfigError("lwe.m", "must be at least 1");
    if (n_samples < 1 || n_samples > m) throw ConfigError("lwe.n_samples", "must lie in [1, m]");
    if (s < 0 || s >= q) throw ConfigError("lwe.s", "secret must lie in [0, q-1]");
    if (const auto* g = std::get_if<RoundedGaussian>(&error)) {
        if (!(g->alpha > 0.0)) throw ConfigError("lwe.error.alpha", "must be positive");
    } else {
        const auto& u = std::get<UniformInt>(error);
        if (u.lo > u.hi) throw ConfigError("lwe.error.lo", "must not exceed hi");
    }
}

std::int64_t mod_q(std::int64_t x, std::int64_t q) {
    const std::int64_t r = x % q;
    return r < 0 ? r + q : r;
}

double gaussian_sigma(double alpha) {
    if (!(alpha > 0.0)) throw ConfigError("lwe.error.alpha", "must be positive");
    return alpha / std::sqrt(2.0 * std::numbers::pi);
}

double gaussian_density(double x, double sigma, double mu) {
    const double z = (x - mu) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

std::int64_t error_sample(const ErrorMode& mode, Rng& rng) {
    if (const auto* g = std::get_if<RoundedGaussian>(&mode)) {
        std::normal_distribution<double> d(0.0, gaussian_sigma(g->alpha));
        return static_cast<std::int64_t>(std::llround(d(rng)));
    }
    const auto& u = std::get<UniformInt>(mode);
    std::uniform_int_distribution<std::int64_t> d(u.lo, u.hi);
    return d(rng);
}

PublicKey keygen(const LweParams& params, Rng& rng) {
    params.validate();
    PublicKey pk;
    pk.a.resize(params.m);
    pk.b.resize(params.m);
    std::uniform_int_distribution<std::int64_t> uni(0, params.q - 1);
    for (std::size_t i = 0; i < params.m; ++i) {
        pk.a[i] = uni(rng);
        pk.b[i] = mod_q(pk.a[i] * params.s + error_sample(params.error, rng), params.q);
    }
    return pk;
}

Ciphertext encrypt_samples(std::span<const std::int64_t> a_samples, std::span<const std::int64_t> b_samples,
                           int phi, std::int64_t q) {
    if (a_samples.size() != b_samples.size()) throw DimensionError("encrypt: sample lists differ in length");
    if (phi != 0 && phi != 1) throw InputDomainError("encrypt: phi must be 0 or 1");
    const std::int64_t sum_a = std::accumulate(a_samples.begin(), a_samples.end(), std::int64_t{0});
    const std::int64_t sum_b = std::accumulate(b_samples.begin(), b_samples.end(), std::int64_t{0});
    Ciphertext c;
    c.u = mod_q(sum_a, q);
    // floor((sum_b + q*phi/2) mod q) evaluated at twice the scale to stay in
    // integers: the real remainder is mod_q(2*sum_b + q*phi, 2q) / 2.
    c.v = mod_q(2 * sum_b + q * phi, 2 * q) / 2;
    return c;
}

std::vector<std::size_t> sample_indices(std::size_t m, std::size_t n_samples, Rng& rng) {
    if (n_samples > m) throw ConfigError("lwe.n_samples", "must not exceed m");
    std::vector<std::size_t> pool(m);
    std::iota(pool.begin(), pool.end(), std::size_t{1});
    for (std::size_t i = 0; i < n_samples; ++i) {
        std::uniform_int_distribution<std::size_t> d(i, m - 1);
        std::swap(pool[i], pool[d(rng)]);
    }
    pool.resize(n_samples);
    return pool;
}

namespace {

void gather(const PublicKey& pk, std::span<const std::size_t> k, std::vector<std::int64_t>& a,
            std::vector<std::int64_t>& b) {
    a.clear();
    b.clear();
    for (std::size_t idx : k) {
        a.push_back(pk.a.at(idx - 1));
        b.push_back(pk.b.at(idx - 1));
    }
}

}  // namespace

Ciphertext encrypt_bit(const PublicKey& pk, int phi, const LweParams& params, Rng& rng) {
    params.validate();
    if (pk.a.size() != params.m || pk.b.size() != params.m) throw DimensionError("encrypt: key length differs from m");
    const auto k = sample_indices(params.m, params.n_samples, rng);
    std::vector<std::int64_t> a;
    std::vector<std::int64_t> b;
    gather(pk, k, a, b);
    Ciphertext c = encrypt_samples(a, b, phi, params.q);
    c.k = k;
    return c;
}

Decryption decrypt_bit(std::int64_t u, std::int64_t v, std::int64_t s, std::int64_t q) {
    Decryption d;
    d.raw = mod_q(v - u * s, q);
    d.bit = 2 * d.raw > q ? 1 : 0;
    return d;
}

std::vector<double> build_input_buffer(const LweTestCase& c) {
    std::vector<double> buf;
    buf.reserve(c.a_samples.size() + c.b_samples.size() + 2);
    for (auto a : c.a_samples) buf.push_back(static_cast<double>(a));
    for (auto b : c.b_samples) buf.push_back(static_cast<double>(b));
    buf.push_back(static_cast<double>(c.phi));
    buf.push_back(0.0);
    return buf;
}

std::size_t input_size(std::size_t n_samples, std::size_t n) { return n_samples * n + n_samples + 1; }

std::uint64_t sample_subset_count(std::size_t m, std::size_t n_samples) {
    if (n_samples > m) return 0;
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= n_samples; ++i) c = c * (m - n_samples + i) / i;
    return c;
}

LweDataset generate_testcases(const LweParams& params, std::size_t n_cases, std::uint64_t seed) {
    params.validate();
    if (n_cases < 1) throw ConfigError("lwe.n_cases", "must be at least 1");

    LweDataset ds;
    ds.params = params;
    ds.seed = seed;
    Rng key_rng(derive_seed(seed, 0));
    ds.key = keygen(params, key_rng);

    const std::size_t budget = 10 * n_cases;
    std::vector<std::int64_t> a;
    std::vector<std::int64_t> b;
    while (ds.cases.size() < n_cases) {
        if (ds.candidates_tried == budget) {
            const double rate = static_cast<double>(ds.candidates_kept) / static_cast<double>(budget);
            throw GenerationError(rate, "lwe: attempt budget of " + std::to_string(budget) +
                                            " candidates exhausted (retention rate " + std::to_string(rate) + ")");
        }
        Rng rng(derive_seed(seed, 1, ds.candidates_tried));
        ++ds.candidates_tried;
        const auto k = sample_indices(params.m, params.n_samples, rng);
        gather(ds.key, k, a, b);

        LweTestCase pair[2];
        bool ok = true;
        for (int phi = 0; phi < 2; ++phi) {
            const Ciphertext c = encrypt_samples(a, b, phi, params.q);
            const Decryption d = decrypt_bit(c, params.s, params.q);
            ok = ok && d.bit == phi;
            pair[phi] = {phi, a, b, c.u, c.v, d.raw};
        }
        if (!ok) continue;
        ++ds.candidates_kept;
        for (auto& tc : pair)
            if (ds.cases.size() < n_cases) ds.cases.push_back(std::move(tc));
    }
    return ds;
}

std::vector<Ciphertext> multibit_encrypt(std::span<const int> bits, const PublicKey& pk, const LweParams& params,
                                         Rng& rng) {
    if (bits.empty()) throw InputDomainError("multibit_encrypt: empty message");
    std::vector<Ciphertext> out;
    out.reserve(bits.size());
    for (int bit : bits) out.push_back(encrypt_bit(pk, bit, params, rng));
    return out;
}

std::vector<int> multibit_decrypt(std::span<const Ciphertext> cts, std::int64_t s, std::int64_t q) {
    std::vector<int> bits;
    bits.reserve(cts.size());
    for (const auto& c : cts) bits.push_back(decrypt_bit(c, s, q).bit);
    return bits;
}

}  // namespace chuarc::lwe
