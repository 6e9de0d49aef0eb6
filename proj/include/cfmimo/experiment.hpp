#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "cfmimo/types.hpp"

namespace cfmimo {

enum class Method { mc, lognormal, udr, mmimo_closed, exact_small };

std::string to_string(Method m);
std::optional<Method> method_from_string(const std::string& name);

enum class SweepAxis { none, K, M, threshold };

struct ExperimentSpec {
    SystemConfig base;
    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<double> sweep_values;  ///< interpretation depends on the axis
    std::set<Method> methods;
    int mc_deployments = 20;
    int mc_iters = 2000;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    std::vector<double> thresholds_db;
    int n_threads = 1;
    /// Also dump per-deployment geometry/beta, estimation statistics and
    /// moment sub-expectations as CSV (plot/debug aid).
    bool debug_dumps = false;
};

/// Throws on method/mode mismatches (udr/exact_small/mmimo_closed need
/// orthogonal pilots, mmimo_closed needs a collocated layout), empty methods,
/// empty sweep values, bad counts.
void validate(const ExperimentSpec& spec);

/// System-level curves of one sweep point, plus per-user data where needed.
struct PointResult {
    double sweep_value = 0.0;
    SystemConfig cfg;
    std::vector<double> thresholds_db;
    std::map<Method, std::vector<double>> op;  ///< system OP per method
    std::map<Method, std::vector<std::vector<double>>> op_user;  ///< [user][threshold]
    double rate_sim = 0, rate_lognormal = 0, rate_lb = 0, rate_ub = 0, rate_uatf = 0;
    std::vector<double> rate_sim_user;
    /// max |analytic - simulated| over thresholds with simulated OP in
    /// [0.05, 0.95]; only filled when mc ran
    std::map<Method, double> band_max_dev;
    std::vector<std::string> notes;
};

/// Runs all requested methods at one configuration over the common
/// deployment stream (identical seeds for simulation and analytics).
PointResult run_point(const SystemConfig& cfg, const ExperimentSpec& spec, double sweep_value);

/// Full sweep: per-point CSVs (schema threshold_db, op_simulated,
/// op_lognormal, op_udr, rate_simulated, rate_lognormal, rate_lb, rate_ub,
/// rate_uatf [, op_exact_small, op_mmimo_closed]), a summary CSV, and a
/// deviation report. Returns 0 on success, 2 if any sweep point failed.
int run_experiment(const ExperimentSpec& spec, std::ostream& log);

// ---- verification battery ----

enum class VerifyLevel { fast, full };

struct VerifyOptions {
    /// Multiplies the named closed-form sub-expectation before the oracle
    /// comparison; lets tests confirm the battery actually bites.
    std::string tamper_target;
    double tamper_factor = 1.0;
    /// When non-empty, only checks whose name contains this substring run.
    std::string filter;
    int n_threads = 1;
};

struct VerifyCheck {
    std::string name;
    double tolerance = 0.0;
    double achieved = 0.0;
    bool passed = false;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

/// Cross-method consistency battery; prints a tolerance-vs-achieved table.
VerifyReport verify_suite(VerifyLevel level, std::ostream& os, const VerifyOptions& opt = {});

}  // namespace cfmimo
