#pragma once

#include <cstdint>
#include <string>

#include "gfbsde/coefficients.hpp"
#include "gfbsde/field.hpp"
#include "gfbsde/g_function.hpp"

namespace gfbsde {

/**
 * Run configuration, loaded from a sectioned key-value text file with
 * sections [g], [coefficients], [grid], [run]. Expression values are
 * quoted strings in the coefficient grammar. The schema is strict: all
 * four sections must be present, every key is optional with a documented
 * default, and unknown sections or keys are rejected (with a
 * nearest-match suggestion for likely misspellings).
 */
struct RunConfig {
  GParams g;
  CoefficientBundle coefficients;
  Grid1D grid;

  std::uint64_t seed = 42;
  int n_paths = 2000;
  int n_steps = 200;
  double x0 = 0.0;

  /// Parse, schema-validate and pre-parse all expressions. Throws
  /// ConfigError / ParseError with the file location in the message.
  static RunConfig load(const std::string& path);

  /// Same, from in-memory text (tests).
  static RunConfig load_text(const std::string& text, const std::string& origin = "<memory>");
};

}  // namespace gfbsde
