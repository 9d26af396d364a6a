// Scalar (n = 1) Regev-style Learning-with-Errors cryptosystem and the
// filtered test-case generator that supplies reservoir teachers.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace chuarc::lwe {

using Rng = std::mt19937_64;

/// round(N(0, sigma)) with sigma = alpha / sqrt(2*pi).
struct RoundedGaussian {
    double alpha = 1.0;
};

/// Uniform integer in [lo, hi].
struct UniformInt {
    std::int64_t lo = 0;
    std::int64_t hi = 3;
};

using ErrorMode = std::variant<RoundedGaussian, UniformInt>;

struct LweParams {
    std::int64_t q = 7;
    std::size_t n = 1;
    std::size_t m = 20;
    ErrorMode error = UniformInt{0, 3};
    std::size_t n_samples = 5;
    std::int64_t s = 2;

    void validate() const;
};

struct PublicKey {
    std::vector<std::int64_t> a;
    std::vector<std::int64_t> b;
};

struct Ciphertext {
    std::int64_t u = 0;
    std::int64_t v = 0;
    std::vector<std::size_t> k;  // 1-based public-key indices
};

struct Decryption {
    std::int64_t raw = 0;
    int bit = 0;
};

struct LweTestCase {
    int phi = 0;
    std::vector<std::int64_t> a_samples;
    std::vector<std::int64_t> b_samples;
    std::int64_t u = 0;
    std::int64_t v = 0;
    std::int64_t decrypt_value = 0;
};

struct LweDataset {
    LweParams params;
    PublicKey key;
    std::uint64_t seed = 0;
    std::vector<LweTestCase> cases;
    std::size_t candidates_tried = 0;
    std::size_t candidates_kept = 0;
};

/// Non-negative representative of x mod q.
std::int64_t mod_q(std::int64_t x, std::int64_t q);

double gaussian_sigma(double alpha);

/// Normal density with mean mu and standard deviation sigma.
double gaussian_density(double x, double sigma, double mu = 0.0);

std::int64_t error_sample(const ErrorMode& mode, Rng& rng);

/// a_i uniform in [0, q-1], b_i = (a_i*s + e_i) mod q.
PublicKey keygen(const LweParams& params, Rng& rng);

/// u = sum(a) mod q, v = floor((sum(b) + (q/2)*phi) mod q).
Ciphertext encrypt_samples(std::span<const std::int64_t> a_samples, std::span<const std::int64_t> b_samples,
                           int phi, std::int64_t q);

/// n_samples distinct 1-based indices in [1, m], in draw order.
std::vector<std::size_t> sample_indices(std::size_t m, std::size_t n_samples, Rng& rng);

Ciphertext encrypt_bit(const PublicKey& pk, int phi, const LweParams& params, Rng& rng);

/// raw = (v - u*s) mod q; bit is 1 when raw > q/2.
Decryption decrypt_bit(std::int64_t u, std::int64_t v, std::int64_t s, std::int64_t q);

inline Decryption decrypt_bit(const Ciphertext& c, std::int64_t s, std::int64_t q) {
    return decrypt_bit(c.u, c.v, s, q);
}

/// [A_samples, B_samples, phi, D] with the dummy D = 0.
std::vector<double> build_input_buffer(const LweTestCase& c);

/// Values needed per encrypted bit before the dummy:
/// n_samples*n + n_samples + 1.
std::size_t input_size(std::size_t n_samples, std::size_t n);

/// Number of distinct sample subsets, C(m, n_samples).
std::uint64_t sample_subset_count(std::size_t m, std::size_t n_samples);

/// One key per dataset. Each candidate draws one sample subset and encrypts
/// both bits with it; the candidate is kept only if both decrypt correctly
/// and then contributes a phi = 0 and a phi = 1 case. Stops at n_cases or
/// after 10*n_cases candidates (GenerationError).
LweDataset generate_testcases(const LweParams& params, std::size_t n_cases, std::uint64_t seed);

std::vector<Ciphertext> multibit_encrypt(std::span<const int> bits, const PublicKey& pk, const LweParams& params,
                                         Rng& rng);
std::vector<int> multibit_decrypt(std::span<const Ciphertext> cts, std::int64_t s, std::int64_t q);

}  // namespace chuarc::lwe
