#pragma once
// Worker-count policy: FRACLAB_THREADS caps everything.
#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace fraclab {

// requested <= 0 means "use the hardware"; the env cap always wins.
inline int thread_count(int requested = 0) {
    int n = requested;
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
    }
    if (const char* env = std::getenv("FRACLAB_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap >= 1) n = std::min(n, cap);
        } catch (...) {
            // unparseable -> ignore the cap
        }
    }
    return std::max(1, n);
}

} // namespace fraclab
