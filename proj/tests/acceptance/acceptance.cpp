#include "coxred/verify.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
    coxred::verify::VerifyOptions options;
    if (const char* t = std::getenv("COXRED_THREADS")) options.threads = static_cast<unsigned>(std::stoul(t));
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));

    int failed = 0;
    for (int id = 1; id <= coxred::verify::kCriteria; ++id) {
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        const auto r = coxred::verify::run_criterion(id, options);
        std::cout << coxred::verify::format_line(r) << std::endl;
        if (!r.pass) ++failed;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << "\n";
    return failed ? 1 : 0;
}
