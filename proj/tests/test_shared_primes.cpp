#include <catch2/catch_amalgamated.hpp>

#include "uascan/cert/shared_primes.hpp"

#include "support/primes.hpp"

using namespace uascan::cert;
using testprimes::build_corpus;
using testprimes::pairwise_oracle;

TEST_CASE("two moduli sharing one known prime") {
    // p = 10007 shared; q1 = 10009, q2 = 10037 unique.
    mpz_class p = 10007, q1 = 10009, q2 = 10037;
    std::vector<std::pair<std::string, mpz_class>> moduli = {
        {"a", p * q1},
        {"b", p * q2},
    };
    auto findings = find_shared_primes(moduli);
    REQUIRE(findings.size() == 1);
    REQUIRE(findings[0].fingerprint_a == "a");
    REQUIRE(findings[0].fingerprint_b == "b");
    REQUIRE(findings[0].shared_factor == p);
}

TEST_CASE("pairwise-coprime moduli yield nothing") {
    std::vector<std::pair<std::string, mpz_class>> moduli = {
        {"a", mpz_class(10007) * 10009},
        {"b", mpz_class(10037) * 10039},
        {"c", mpz_class(10061) * 10067},
    };
    REQUIRE(find_shared_primes(moduli).empty());
}

TEST_CASE("fewer than two moduli yield nothing") {
    REQUIRE(find_shared_primes({}).empty());
    REQUIRE(find_shared_primes({{"a", mpz_class(10007) * 10009}}).empty());
}

TEST_CASE("identical moduli are excluded (that is reuse, not shared primes)") {
    mpz_class n = mpz_class(10007) * 10009;
    std::vector<std::pair<std::string, mpz_class>> moduli = {{"a", n}, {"b", n}};
    REQUIRE(find_shared_primes(moduli).empty());
}

TEST_CASE("one prime across three moduli gives all three pairs") {
    mpz_class p = 10007;
    std::vector<std::pair<std::string, mpz_class>> moduli = {
        {"x", p * 10009},
        {"y", p * 10037},
        {"z", p * 10039},
    };
    auto findings = find_shared_primes(moduli);
    REQUIRE(findings.size() == 3);
    for (const auto& f : findings) REQUIRE(f.shared_factor == p);
    REQUIRE(findings == pairwise_oracle(moduli));
}

TEST_CASE("64 random toy moduli with 3 planted shared primes") {
    for (uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
        auto corpus = build_corpus(seed, 64, 3);
        auto findings = find_shared_primes(corpus);
        REQUIRE(findings.size() == 3);
        REQUIRE(findings == pairwise_oracle(corpus));
    }
}

TEST_CASE("batch result equals the oracle across corpus shapes") {
    for (uint64_t seed = 100; seed < 120; ++seed) {
        size_t count = 16 + static_cast<size_t>(seed % 7) * 13;  // odd sizes too
        size_t planted = seed % 5;
        auto corpus = build_corpus(seed, count, planted);
        auto findings = find_shared_primes(corpus);
        REQUIRE(findings.size() == planted);
        REQUIRE(findings == pairwise_oracle(corpus));
    }
}

TEST_CASE("input order does not affect output") {
    auto corpus = build_corpus(42, 48, 4);
    auto expected = find_shared_primes(corpus);
    std::reverse(corpus.begin(), corpus.end());
    REQUIRE(find_shared_primes(corpus) == expected);
}

TEST_CASE("shared factor divides both moduli") {
    auto corpus = build_corpus(7, 80, 5);
    for (const auto& f : find_shared_primes(corpus)) {
        REQUIRE(f.shared_factor > 1);
        mpz_class na, nb;
        for (const auto& [fp, n] : corpus) {
            if (fp == f.fingerprint_a) na = n;
            if (fp == f.fingerprint_b) nb = n;
        }
        REQUIRE(na != nb);
        REQUIRE(na % f.shared_factor == 0);
        REQUIRE(nb % f.shared_factor == 0);
    }
}
