#pragma once

#include <string>
#include <vector>

namespace polylab::app {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

constexpr int kCriteria = 14;

// analytic criteria, no Monte Carlo
const std::vector<int>& fast_suite();

CriterionResult run_criterion(int id, int threads);
std::string format_line(const CriterionResult& r);

}  // namespace polylab::app
