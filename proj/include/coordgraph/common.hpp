#ifndef COORDGRAPH_COMMON_HPP
#define COORDGRAPH_COMMON_HPP

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace coordgraph {

/// FNV-1a over bytes; used for config hashes embedded in artifacts.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

/// Seed derivation: mixes a base seed with a purpose tag so that independent
/// consumers (accounts, tasks, commands) get decorrelated streams while the
/// whole pipeline stays a pure function of one seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose) {
    return splitmix64(base ^ fnv1a64(purpose));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    return splitmix64(base ^ splitmix64(salt));
}

/// Deterministic RNG. The engine is the standard mt19937_64 (portable bit
/// stream); all variate transforms are done here because the std::*
/// distributions are implementation-defined and would break byte-identical
/// artifacts across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    /// Uniform in [0,1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double exponential(double scale) { return -scale * std::log1p(-uniform01()); }

    /// Lognormal with median = scale (mu = log(scale)).
    double lognormal(double scale, double sigma) {
        return std::exp(std::log(scale) + sigma * normal());
    }

    /// Knuth for small lambda, normal approximation above.
    std::uint64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda < 30.0) {
            const double limit = std::exp(-lambda);
            double p = 1.0;
            std::uint64_t k = 0;
            do {
                ++k;
                p *= uniform01();
            } while (p > limit);
            return k - 1;
        }
        const double x = lambda + std::sqrt(lambda) * normal();
        return x <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(x));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Process-wide thread budget. 0 means "auto" (hardware concurrency).
/// Set from --threads or the COORDGRAPH_THREADS fallback.
inline int& thread_budget() {
    static int budget = 0;
    return budget;
}

inline int resolve_threads() {
    int t = thread_budget();
    if (t <= 0) {
        if (const char* env = std::getenv("COORDGRAPH_THREADS")) t = std::atoi(env);
    }
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    return t > 0 ? t : 1;
}

/// Chunked parallel loop. Chunk boundaries depend only on `total` and
/// `chunk_size`, never on the thread count, so any reduction done per chunk
/// and merged in chunk order yields results independent of parallelism.
template <typename Fn>
void parallel_chunks(std::size_t total, std::size_t chunk_size, Fn&& fn) {
    if (total == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (total + chunk_size - 1) / chunk_size;
    const int threads = std::min<int>(resolve_threads(), static_cast<int>(n_chunks));
    if (threads <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c)
            fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= n_chunks || failed.load()) return;
                try {
                    fn(c, c * chunk_size, std::min(total, (c + 1) * chunk_size));
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

inline std::string to_lower(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace coordgraph

#endif
