#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace uascan::cert {

/// Two distinct RSA moduli sharing a nontrivial factor — both private keys
/// are recoverable by anyone holding the public corpus.
struct SharedPrimeFinding {
    std::string fingerprint_a;  // lexicographically smaller fingerprint
    std::string fingerprint_b;
    mpz_class shared_factor;    // > 1, divides both moduli

    bool operator==(const SharedPrimeFinding&) const = default;
};

/// Scans a corpus of RSA moduli for shared prime factors.
///
/// Batch pass: a product tree gives P = ∏ Nᵢ, a remainder tree brings
/// P mod Nᵢ² back down, and gcd((P mod Nᵢ²)/Nᵢ, Nᵢ) flags every modulus
/// sharing a factor with any other. Pair attribution then runs pairwise
/// gcd over the flagged subset only, which is tiny in practice. Identical
/// moduli are key reuse, not shared primes, and are excluded. Output is
/// one finding per unordered pair, ordered by (fingerprint_a, fingerprint_b).
inline std::vector<SharedPrimeFinding> find_shared_primes(
    const std::vector<std::pair<std::string, mpz_class>>& moduli) {
    std::vector<SharedPrimeFinding> out;
    const size_t n = moduli.size();
    if (n < 2) return out;

    // Product tree: level 0 holds the moduli, each level halves the count.
    std::vector<std::vector<mpz_class>> tree;
    tree.emplace_back();
    tree.front().reserve(n);
    for (const auto& [fp, m] : moduli) tree.front().push_back(m);
    while (tree.back().size() > 1) {
        const auto& prev = tree.back();
        std::vector<mpz_class> next((prev.size() + 1) / 2);
        for (size_t i = 0; i + 1 < prev.size(); i += 2) next[i / 2] = prev[i] * prev[i + 1];
        if (prev.size() % 2) next.back() = prev.back();  // odd node carries up
        tree.push_back(std::move(next));
    }

    // Remainder tree: child i of level L reduces the parent remainder
    // (index i/2, matching the carry-up pairing) modulo its own square.
    std::vector<mpz_class> rem{tree.back().front()};
    for (size_t level = tree.size() - 1; level-- > 0;) {
        const auto& nodes = tree[level];
        std::vector<mpz_class> next(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
            mpz_class sq = nodes[i] * nodes[i];
            next[i] = rem[i / 2] % sq;
        }
        rem = std::move(next);
    }

    std::vector<size_t> flagged;
    for (size_t i = 0; i < n; ++i) {
        mpz_class z = rem[i] / tree.front()[i];
        mpz_class g = gcd(z, tree.front()[i]);
        if (g > 1) flagged.push_back(i);
    }

    for (size_t a = 0; a < flagged.size(); ++a) {
        for (size_t b = a + 1; b < flagged.size(); ++b) {
            const auto& [fp_i, n_i] = moduli[flagged[a]];
            const auto& [fp_j, n_j] = moduli[flagged[b]];
            if (n_i == n_j) continue;
            mpz_class g = gcd(n_i, n_j);
            if (g <= 1) continue;
            SharedPrimeFinding f;
            if (fp_i <= fp_j) {
                f.fingerprint_a = fp_i;
                f.fingerprint_b = fp_j;
            } else {
                f.fingerprint_a = fp_j;
                f.fingerprint_b = fp_i;
            }
            f.shared_factor = std::move(g);
            out.push_back(std::move(f));
        }
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
        return std::tie(x.fingerprint_a, x.fingerprint_b) <
               std::tie(y.fingerprint_a, y.fingerprint_b);
    });
    return out;
}

}  // namespace uascan::cert
