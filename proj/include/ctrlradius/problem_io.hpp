#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ctrlradius/radius.hpp"

namespace ctrlradius {

using Json = nlohmann::ordered_json;

/// Malformed or inconsistent problem/report file; the message names the field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ProblemKind { Descriptor, HigherOrder };

struct Problem {
  ProblemKind kind = ProblemKind::Descriptor;
  std::optional<DescriptorSystem> descriptor;
  PerturbationMask mask;  ///< descriptor problems only
  std::optional<HigherOrderSystem> higher_order;
  std::optional<CoefficientMask> coefficient_mask;  ///< higher-order problems only
  StlnConfig solver;
  Json source;  ///< document the problem was parsed from

  /// The descriptor system the solver works on (canonical form for higher-order input).
  DescriptorSystem working_system() const;
};

Json read_json_file(const std::string& path);

/// Parses a problem document. Throws InputError naming the offending field.
Problem parse_problem(const Json& doc);

/// Applies the "solver" block of a document onto cfg.
void apply_solver_block(const Json& solver, StlnConfig& cfg);

/// Solver settings as written into reports.
Json solver_json(const StlnConfig& cfg);

Json matrix_json(const Matrix& m);

/// A standalone problem document for the given system.
Json problem_json(const DescriptorSystem& sys);
Json problem_json(const HigherOrderSystem& sys);

Json report_json(const Problem& problem, const RadiusResult& result, const StlnConfig& cfg);

/// Names declared in the "parameters" block.
std::vector<std::string> parameter_names(const Json& doc);

/// Copy of the document with the named parameter set to `value`. Bound
/// parameters take a number; case parameters take a case label.
Json apply_parameter(const Json& doc, const std::string& name, const std::string& value);

/// Decimal text with 15 significant digits, independent of locale.
std::string format_number(double v);

}  // namespace ctrlradius
