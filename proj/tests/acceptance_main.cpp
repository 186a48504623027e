// Acceptance suite: runs each gate criterion once and prints one PASS/FAIL
// line with the measured quantities and the elapsed time. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "balaw/verify.hpp"

namespace {

struct Gate {
    std::string label;
    double budget_seconds;
    std::function<balaw::CheckResult()> run;
};

}  // namespace

int main() {
    balaw::VerifyOptions opt;
    opt.seed = 2026;
    opt.threads = 4;

    std::vector<Gate> gates{
        {"1 node-matrix reproduction (rel err <= 1e-12)", 1.0,
         [] { return balaw::criterion_node_matrix_forms(); }},
        {"2 ladder coefficients (100 random, err <= 1e-10)", 1.0,
         [&] { return balaw::criterion_ladder_coefficients(opt.seed); }},
        {"3 norm-bound certification (max/min <= 10)", 10.0,
         [] { return balaw::criterion_norm_bounds(); }},
        {"4 sub-level exponents (|alpha - 1/d| <= 0.05)", 30.0,
         [&] { return balaw::criterion_alpha_exponents(opt.threads); }},
        {"5 bootstrap fixed points (1e-12 / closed form 1e-14)", 1.0,
         [] { return balaw::criterion_bootstrap(); }},
        {"6 oscillation calibration (|gamma_hat - gamma| <= 0.05)", 30.0,
         [] { return balaw::criterion_oscillation_calibration(); }},
        {"7 transport estimate (10 boxes, factor 1 + 10dx/r)", 60.0,
         [&] { return balaw::criterion_transport_estimates(opt.seed); }},
        {"8 solver convergence (orders >= 0.8 / 0.7, drift <= 1e-12)", 300.0,
         [&] { return balaw::criterion_solver_convergence(opt.threads); }},
        {"9 regularity floor (gamma_hat >= limit - 0.1, >= 20 centers)", 300.0,
         [&] { return balaw::criterion_regularity_floor(opt.threads, opt.seed); }},
    };

    int failures = 0;
    for (const auto& gate : gates) {
        auto t0 = std::chrono::steady_clock::now();
        balaw::CheckResult result;
        try {
            result = gate.run();
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_budget = elapsed <= gate.budget_seconds;
        bool ok = result.pass && in_budget;
        std::printf("%s  %s  [%s]  %.2f s (budget %.0f s)\n", ok ? "PASS" : "FAIL",
                    gate.label.c_str(), result.detail.c_str(), elapsed,
                    gate.budget_seconds);
        if (!ok) ++failures;
    }
    if (failures == 0) {
        std::printf("acceptance: all %zu criteria passed\n", gates.size());
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
