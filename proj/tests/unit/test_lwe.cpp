#include "chuarc/error.hpp"
#include "chuarc/lwe.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <set>

using namespace chuarc;
using namespace chuarc::lwe;
using Catch::Matchers::WithinAbs;

TEST_CASE("worked encryptions and decryptions") {
    const std::vector<std::int64_t> a29 = {0, 4, 20, 21, 11};
    const std::vector<std::int64_t> b29 = {1, 15, 17, 0, 5};
    const Ciphertext c = encrypt_samples(a29, b29, 1, 29);
    CHECK(c.u == 27);
    CHECK(c.v == 23);
    const Decryption d = decrypt_bit(27, 23, 11, 29);
    CHECK(d.raw == 16);
    CHECK(d.bit == 1);
    CHECK(decrypt_bit(11, 9, 11, 29).bit == 0);

    const std::vector<std::int64_t> a7 = {4, 2, 6, 0, 6};
    const std::vector<std::int64_t> b7 = {2, 5, 5, 0, 6};
    const Ciphertext c0 = encrypt_samples(a7, b7, 0, 7);
    const Ciphertext c1 = encrypt_samples(a7, b7, 1, 7);
    CHECK((c0.u == 4 && c0.v == 4));
    CHECK((c1.u == 4 && c1.v == 0));
    CHECK(decrypt_bit(c0, 2, 7).raw == 3);
    CHECK(decrypt_bit(c0, 2, 7).bit == 0);
    CHECK(decrypt_bit(c1, 2, 7).raw == 6);
    CHECK(decrypt_bit(c1, 2, 7).bit == 1);

    const std::vector<std::int64_t> zeros(5, 0);
    const Ciphertext z = encrypt_samples(zeros, zeros, 0, 7);
    CHECK((z.u == 0 && z.v == 0));
    for (std::int64_t v = 0; v < 4; ++v) CHECK(decrypt_bit(0, v, 2, 7).bit == 0);
}

TEST_CASE("phi only moves v") {
    const std::vector<std::int64_t> a = {3, 1, 6};
    const std::vector<std::int64_t> b = {2, 2, 5};
    for (std::int64_t q : {5, 7, 29, 30}) {
        const Ciphertext c0 = encrypt_samples(a, b, 0, q);
        const Ciphertext c1 = encrypt_samples(a, b, 1, q);
        CHECK(c0.u == c1.u);
        CHECK(c0.v == mod_q(9, q));
        CHECK(c1.v == static_cast<std::int64_t>(std::floor(std::fmod(9.0 + q / 2.0, double(q)))));
    }
}

TEST_CASE("round trip against the error-sum enumeration") {
    // q=7, n_samples=5, errors in [0,3]: the error sum spans 0..15. With a = 0
    // the decryption sees the error sum directly.
    for (std::int64_t e = 0; e <= 15; ++e) {
        std::vector<std::int64_t> b(5, 0);
        b[0] = e;  // sums are all that matter
        const std::vector<std::int64_t> a(5, 0);
        const bool one_ok = std::floor(std::fmod(double(e) + 3.5, 7.0)) > 3.5;
        const bool zero_ok = (e % 7) <= 3;
        CHECK((decrypt_bit(encrypt_samples(a, b, 1, 7), 2, 7).bit == 1) == one_ok);
        CHECK((decrypt_bit(encrypt_samples(a, b, 0, 7), 2, 7).bit == 0) == zero_ok);
    }
}

TEST_CASE("error distributions") {
    CHECK(std::round(gaussian_sigma(1.0) * 1e6) / 1e6 == 0.398942);
    CHECK(std::round(gaussian_density(0.0, 1.0) * 1e6) / 1e6 == 0.398942);
    CHECK_THROWS_AS(gaussian_sigma(0.0), ConfigError);

    Rng rng(1);
    std::map<std::int64_t, int> counts;
    for (int i = 0; i < 10000; ++i) ++counts[error_sample(UniformInt{0, 3}, rng)];
    CHECK(counts.size() == 4);
    for (const auto& [v, n] : counts) {
        CHECK(v >= 0);
        CHECK(v <= 3);
        CHECK(std::abs(n / 10000.0 - 0.25) < 0.03);
    }
    double sum2 = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double e = double(error_sample(RoundedGaussian{8.0}, rng));
        CHECK(e == std::round(e));
        sum2 += e * e;
    }
    // rounding adds about 1/12 to the variance
    CHECK_THAT(std::sqrt(sum2 / 20000.0), WithinAbs(std::sqrt(std::pow(gaussian_sigma(8.0), 2) + 1.0 / 12.0), 0.05));
}

TEST_CASE("key generation") {
    CHECK(mod_q(4 * 3 + 2, 5) == 4);
    CHECK(mod_q(-3, 7) == 4);

    LweParams p;
    p.q = 5;
    p.s = 3;
    p.error = UniformInt{2, 2};
    Rng rng(3);
    const PublicKey k = keygen(p, rng);
    REQUIRE(k.a.size() == 20);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(k.a[i] >= 0);
        CHECK(k.a[i] < 5);
        CHECK(k.b[i] == mod_q(k.a[i] * 3 + 2, 5));
    }
    p.s = 0;
    p.error = UniformInt{0, 0};
    const PublicKey zk = keygen(p, rng);
    for (auto b : zk.b) CHECK(b == 0);

    p.n_samples = 21;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("sample indices are distinct and 1-based") {
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const auto k = sample_indices(20, 5, rng);
        const std::set<std::size_t> uniq(k.begin(), k.end());
        CHECK(uniq.size() == 5);
        CHECK(*uniq.begin() >= 1);
        CHECK(*uniq.rbegin() <= 20);
    }
    CHECK(sample_subset_count(20, 5) == 15504);
}

TEST_CASE("input buffer layout") {
    LweTestCase c;
    c.phi = 0;
    c.a_samples = {4, 2, 6, 0, 6};
    c.b_samples = {2, 5, 5, 0, 6};
    CHECK(build_input_buffer(c) == std::vector<double>{4, 2, 6, 0, 6, 2, 5, 5, 0, 6, 0, 0});
    CHECK(input_size(5, 1) + 1 == 12);
    CHECK(input_size(10, 5) == 61);
}

TEST_CASE("generated test cases") {
    LweParams p;
    const LweDataset ds = generate_testcases(p, 500, 42);
    REQUIRE(ds.cases.size() == 500);
    for (std::size_t i = 0; i < ds.cases.size(); ++i) {
        const auto& c = ds.cases[i];
        CHECK(c.phi == static_cast<int>(i % 2));
        const Ciphertext re = encrypt_samples(c.a_samples, c.b_samples, c.phi, p.q);
        CHECK(re.u == c.u);
        CHECK(re.v == c.v);
        const Decryption d = decrypt_bit(c.u, c.v, p.s, p.q);
        CHECK(d.bit == c.phi);
        CHECK(d.raw == c.decrypt_value);
        CHECK((c.u >= 0 && c.u < 7 && c.v >= 0 && c.v < 7));
    }
    CHECK(ds.candidates_kept == 250);
    CHECK(ds.candidates_tried >= 250);

    const LweDataset again = generate_testcases(p, 500, 42);
    CHECK(again.key.a == ds.key.a);
    for (std::size_t i = 0; i < ds.cases.size(); ++i) CHECK(again.cases[i].a_samples == ds.cases[i].a_samples);

    p.error = UniformInt{0, 0};  // phi = 1 never survives the flooring
    try {
        generate_testcases(p, 10, 1);
        FAIL("expected GenerationError");
    } catch (const GenerationError& e) {
        CHECK(e.retention_rate() == 0.0);
    }
}

TEST_CASE("multi-bit messages") {
    LweParams p;
    Rng rng(9);
    const PublicKey pk = keygen(p, rng);
    const std::vector<int> bits = {0, 0, 1, 0};
    const auto cts = multibit_encrypt(bits, pk, p, rng);
    CHECK(cts.size() == 4);

    int same = 0;
    for (int t = 0; t < 100; ++t) {
        const std::vector<int> two = {1, 1};
        const auto c = multibit_encrypt(two, pk, p, rng);
        same += (c[0].u == c[1].u && c[0].v == c[1].v && c[0].k == c[1].k) ? 1 : 0;
    }
    CHECK(same < 5);

    // zero error, engineered sums: the round trip holds exactly when the
    // retention predicate holds (bit 0 always, bit 1 never for odd q).
    LweParams z = p;
    z.error = UniformInt{0, 0};
    const PublicKey zk = keygen(z, rng);
    const auto zc = multibit_encrypt(bits, zk, z, rng);
    const auto back = multibit_decrypt(zc, z.s, z.q);
    CHECK(back == std::vector<int>{0, 0, 0, 0});
    CHECK_THROWS_AS(multibit_encrypt(std::vector<int>{}, pk, p, rng), InputDomainError);
}
