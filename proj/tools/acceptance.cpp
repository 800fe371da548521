#include <CLI11.hpp>

#include <iostream>
#include <set>

#include "app/acceptance.hpp"
#include "polylab/core.hpp"

using namespace polylab::app;

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria: one PASS/FAIL line each"};
    std::vector<int> only;
    int threads = polylab::default_threads();
    app.add_option("--only", only, "criterion ids to run (default all)")->delimiter(',')->check(CLI::Range(1, kCriteria));
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    std::set<int> ids(only.begin(), only.end());
    if (ids.empty())
        for (int i = 1; i <= kCriteria; ++i) ids.insert(i);
    int failed = 0;
    for (int id : ids) {
        const auto r = run_criterion(id, threads);
        std::cout << format_line(r) << std::endl;
        failed += !r.pass;
    }
    std::cout << ids.size() - std::size_t(failed) << "/" << ids.size() << " criteria pass" << std::endl;
    return failed ? 1 : 0;
}
