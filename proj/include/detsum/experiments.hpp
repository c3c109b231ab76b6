// Named experiments: each binds constructions to checks and returns one Report.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detsum/field.hpp"
#include "detsum/report.hpp"

namespace detsum {

struct Params {
  std::vector<std::string> q;            // field orders; empty selects the experiment default
  std::optional<std::string> i, j;       // field elements in FieldCtx::parse syntax
  std::optional<unsigned> k;             // restricts k-sweeps to one value
  std::vector<std::size_t> sizes;        // |E|[, |F|]; empty selects the default sweep
  std::uint64_t seed = 1;
  std::optional<unsigned> trials;        // seeded configurations per q
  unsigned threads = 1;                  // never affects the report
  std::optional<double> assert_ratio;    // turns empirical constants into hard checks
};

/// Experiment names accepted by run, including "run-all".
const std::vector<std::string>& experiment_names();

/// Throws std::invalid_argument on an unknown experiment or bad parameters and
/// SizingError when an enumeration exceeds the pair cap.
Report run(const std::string& name, const Params& params);

/// Gauss sum magnitudes and closed values, G_a = eta(a) G_1, and the Kloosterman
/// bound over every parameter pair.
Report character_sum_report(const FieldCtx& f);

/// How an empirical-ratio claim turns a row into an implied constant.
enum class RatioKind { none, upper, lower, threshold };
RatioKind ratio_kind(const std::string& claim);

/// Flags every ratio claim whose implied constant at some q exceeds 4x its value
/// at the smallest q; with a limit, also asserts every constant is at most it.
void apply_ratio_policy(Report& r, std::optional<double> limit);

}  // namespace detsum
