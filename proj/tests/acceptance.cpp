// Runs every acceptance criterion and prints one line per criterion.
// Usage: acceptance [id ...]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "chiral/suite.hpp"

using namespace chiral;

int main(int argc, char** argv)
{
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    SuiteOptions opt;
    int failed = 0;
    for (const auto& c : acceptance_criteria()) {
        if (!only.empty() && !only.count(c.id)) continue;
        auto t0 = std::chrono::steady_clock::now();
        Report r;
        std::string error;
        try {
            r = c.run(opt);
        } catch (const std::exception& e) {
            r.pass = false;
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_budget = secs < c.budget_s;
        bool ok = r.pass && in_budget;
        if (!ok) ++failed;
        std::printf("%s criterion %2d  %-24s %7.2f s (budget %3.0f s)  %ld cases", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), secs, c.budget_s,
                    r.cases);
        if (!in_budget) std::printf("  over budget");
        if (!error.empty()) std::printf("  error: %s", error.c_str());
        std::printf("\n");
        for (auto& [k, v] : r.info)
            if (k == "resolved form") std::printf("      %s: %s\n", k.c_str(), v.c_str());
        for (auto& s : r.residuals) std::printf("      residual: %s\n", s.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
