#include "nsv/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace nsv {

namespace {
int g_threads = 1;
constexpr std::size_t kChunk = 16384;  // particles per work unit
}  // namespace

int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("NSV_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (...) {
            // Ignore unparsable values; fall through to the default.
        }
    }
    return 1;
}

void set_thread_count(int n) { g_threads = n > 0 ? n : 1; }
int thread_count() { return g_threads; }

void parallel_for_particles(std::size_t count, const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    const int workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(g_threads), chunks));
    if (workers <= 1) {
        if (count > 0) fn(0, count);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            const std::size_t begin = c * kChunk;
            const std::size_t end = std::min(count, begin + kChunk);
            fn(begin, end);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int t = 1; t < workers; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

}  // namespace nsv
