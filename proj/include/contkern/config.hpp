#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "contkern/problem.hpp"

namespace contkern {

/// A problem file after parsing. Exactly one of `continuum` and
/// `large_scale` is set, depending on the "form" field.
struct ProblemConfig {
  std::string name;
  std::optional<ContinuumParams> continuum;
  std::optional<LargeScaleParams> large_scale;
  /// q was given as {"exact": name}: boundary moments should come from
  /// quadrature rather than from a Taylor series of q.
  bool q_exact = false;
  /// q was given as {"data": [...], "fit_degree": M}.
  std::optional<int> q_fit_degree;
  /// Ensemble size used when a continuum problem is sampled.
  int n = 10;
  SamplePlacement placement = SamplePlacement::Right;

  /// Continuum parameters, lifting a large-scale problem when necessary.
  ContinuumParams to_continuum() const;
  /// Large-scale parameters, sampling a continuum problem at `n` when
  /// necessary. q must be known pointwise (not an exact named function
  /// that is ill-defined at the samples: all supported ones are fine).
  LargeScaleParams to_large_scale() const;
};

/// Named q functions accepted by {"exact": ...}.
ParamFunction named_q(const std::string& name);

/// Parses a problem description. Errors carry the JSON path of the
/// offending field, or the line and column of a syntax error.
ProblemConfig parse_problem(const std::string& text, const std::string& origin = "<string>");
ProblemConfig load_problem(const std::filesystem::path& path);

}  // namespace contkern
