#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "randgeo/geometry.hpp"
#include "randgeo/grid.hpp"

namespace randgeo::cli {

enum class Command { Eval, Verify, ScanPd };
enum class Method { Closed, Direct, Both };
enum class Quantity { Metric, Tensor, Both };
enum class OutputFormat { Csv, Json };

/// Exit statuses.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSuiteFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

/// Identity-suite sample size used by `verify`.
inline constexpr std::size_t kIdentityPoints = 100;

struct RunConfig {
  Command command = Command::Eval;
  Family family = Family::Heat;
  /// Source descriptor as given; empty when none was supplied.
  std::string source;
  std::optional<GridSpec> grid;
  Method method = Method::Closed;
  FormulaMode mode = FormulaMode::Printed;
  Quantity quantity = Quantity::Both;
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  std::uint64_t seed = 42;
  /// Empty means standard output.
  std::string out;
  OutputFormat format = OutputFormat::Csv;
};

std::string_view to_string(Command c);
std::string_view to_string(Method m);
std::string_view to_string(Quantity q);
std::string_view to_string(OutputFormat f);

/// Fixed CSV header of `eval`.
inline constexpr std::string_view kEvalHeader =
    "family,p1,p2,method,g11,g12,g22,t111,t112,t122,t222,err_estimate,pd_flag,status";

/// Fixed CSV header of `scan-pd`.
inline constexpr std::string_view kScanHeader =
    "family,p1,p2,g11,g12,g22,lambda1,lambda2,err_estimate,pd_flag,status";

/// Fixed CSV header of `verify`.
inline constexpr std::string_view kVerifyHeader =
    "suite,id,n_points,max_abs,max_rel,argmax_p1,argmax_p2,threshold,n_exceeding,n_failed,"
    "expected_pass,verdict";

/// Default consistency grid for `verify --source` without `--grid`.
GridSpec default_verify_grid(Family family);

/// Runs a parsed configuration, writing the report to `out` (or to config.out) and
/// diagnostics to `err`. Returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line entry point: parse (flags > config file > defaults), validate, run.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace randgeo::cli
