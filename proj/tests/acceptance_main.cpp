// Acceptance gate: runs every criterion at its stated tolerance and prints
// one verdict line per criterion. Exit 0 only if the whole battery passes.
#include "fraclab/acceptance.hpp"

#include <cstdio>
#include <exception>

int main() {
    try {
        const auto manifest = fraclab::acceptance::run_acceptance("");
        fraclab::config::validate_manifest(manifest, true);
        bool all = true;
        for (const auto& c : manifest.criteria) {
            std::printf("[%s] %2d %s: %s\n", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), c.detail.c_str());
            all = all && c.pass;
        }
        std::printf("%s (%d criteria, %.1f s)\n", all ? "ACCEPTED" : "REJECTED",
                    static_cast<int>(manifest.criteria.size()), manifest.wall_seconds);
        return all ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance run aborted: %s\n", e.what());
        return 1;
    }
}
