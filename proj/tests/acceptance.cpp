// Acceptance suite: one PASS/FAIL line per criterion, cell details indented
// beneath it. Exit status is 0 iff every criterion passes.
//
//   acceptance            run criteria 1..9
//   acceptance 2 4        run a subset

#include <cstdio>
#include <cstdlib>
#include <string>

#include "bhit/verify.hpp"

int main(int argc, char** argv) {
    std::setvbuf(stdout, nullptr, _IOLBF, 0);
    bhit::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
    if (opt.only.empty()) {
        for (int i = 1; i <= bhit::kCriterionCount; ++i) opt.only.push_back(i);
    }
    bool all = true;
    for (int id : opt.only) {
        const auto r = bhit::run_criterion(id, opt);
        all = all && r.pass;
        std::printf("%s criterion %d: %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
        for (const auto& c : r.cells) {
            std::printf("    %-4s %-42s %-36s gap=%.3e budget=%.3e %s\n", c.pass ? "ok" : "BAD", c.cell.c_str(),
                        c.method.c_str(), c.sup_gap, c.budget, c.note.c_str());
        }
    }
    std::printf("%s\n", all ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return all ? 0 : 1;
}
