#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bhit/hitting.hpp"
#include "bhit/oracle.hpp"

namespace bhit {

/// One row of a concordance report.
struct CellReport {
    std::string cell;
    std::string method;
    double sup_gap = 0.0;
    double budget = 0.0;
    bool pass = false;
    /// Free-form diagnostics (fitted constants, flags); not part of the CSV.
    std::string note;
};

struct CriterionReport {
    int id = 0;
    std::string title;
    bool pass = false;
    std::vector<CellReport> cells;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    /// Criteria to run; empty runs 1..9.
    std::vector<int> only;
    std::int64_t mc_paths = 100000;
    std::uint64_t seed = 20240601;
    int threads = 0;
};

inline constexpr int kCriterionCount = 9;

/// Allowance added to the DKW band for the time discretization of the
/// bridge-corrected simulator at the default step factor.
inline constexpr double kMcDiscretizationBudget = 1e-3;

CriterionReport run_criterion(int id, const AcceptanceOptions& opt = {});
std::vector<CriterionReport> run_acceptance(const AcceptanceOptions& opt = {});

/// The 30-point log grid on [0.01, 100] d^2, d the distance the process must
/// cover (|a - b|, or a for the origin target).
std::vector<double> default_time_grid(const HittingQuery& q, int count = 30);

struct VerifyCellOptions {
    InversionSpec inversion{};
    /// 0 skips the Monte Carlo oracle.
    std::int64_t mc_paths = 0;
    std::uint64_t seed = 20240601;
    int threads = 0;
    /// Empty uses default_time_grid.
    std::vector<double> times;
    QuadratureSpec quadrature{};
};

/// Exact curve against the inversion oracle, and against Monte Carlo (plus the
/// inversion/MC concordance) when mc_paths > 0.
std::vector<CellReport> verify_cell(const HittingQuery& q, const VerifyCellOptions& opt = {});

}  // namespace bhit
