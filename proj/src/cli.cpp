#include "ctrlradius/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

namespace ctrlradius {

namespace {

std::string yes_no(bool b) { return b ? "yes" : "no"; }
std::string mark(bool ok) { return ok ? "✓" : "✗"; }

std::string format_complex(Complex s) {
  std::string out = format_number(s.real());
  if (s.imag() != 0.0) out += (s.imag() < 0 ? " - " : " + ") + format_number(std::abs(s.imag())) + "i";
  return out;
}

void print_summary(const RadiusResult& r, std::ostream& out) {
  out << "radius (frobenius): " << format_number(r.radius_frobenius) << "\n"
      << "radius (spectral):  " << format_number(r.radius_spectral) << "\n"
      << "iterations: " << r.iterations << ", converged: " << yes_no(r.converged)
      << ", uncontrollability verified: " << yes_no(r.uncontrollability_verified);
  if (r.partition_col_used) out << ", partition column: " << *r.partition_col_used;
  out << "\n";
  if (r.already_uncontrollable) out << "input system is already uncontrollable\n";
  if (!r.message.empty()) out << "note: " << r.message << "\n";
}

Problem load_problem(const std::string& path) { return parse_problem(read_json_file(path)); }

}  // namespace

void SolverFlags::apply(StlnConfig& cfg) const {
  if (omega) cfg.omega = *omega;
  if (epsilon) cfg.epsilon = *epsilon;
  if (max_iter) cfg.max_iter = *max_iter;
  if (partition_col) {
    if (*partition_col == "last") {
      cfg.partition_col.reset();
    } else {
      Index j = 0;
      const char* first = partition_col->data();
      const char* last = first + partition_col->size();
      const auto [ptr, ec] = std::from_chars(first, last, j);
      if (ec != std::errc() || ptr != last || j < 0) {
        throw InputError("--partition-col: expected a column index or \"last\", found '" + *partition_col + "'");
      }
      cfg.partition_col = j;
    }
    // An explicit column on the command line means a single run on it.
    cfg.multistart = false;
  }
  if (multistart) cfg.multistart = true;
  try {
    cfg.validate();
  } catch (const NumericError& e) {
    throw InputError(e.what());
  }
}

RadiusResult solve_problem(const Problem& problem, const StlnConfig& cfg) {
  if (problem.kind == ProblemKind::HigherOrder) {
    return compute_radius_higher_order(*problem.higher_order, problem.coefficient_mask, cfg);
  }
  return compute_radius_descriptor(*problem.descriptor, problem.mask, cfg);
}

int cmd_radius(const std::string& path, const SolverFlags& flags, const std::optional<std::string>& out_path,
               std::ostream& out, std::ostream& err) {
  try {
    const Problem problem = load_problem(path);
    StlnConfig cfg = problem.solver;
    flags.apply(cfg);
    const RadiusResult result = solve_problem(problem, cfg);
    const std::string text = report_json(problem, result, cfg).dump(2) + "\n";
    if (out_path) {
      std::ofstream f(*out_path);
      if (!f) throw InputError("cannot write " + *out_path);
      f << text;
      print_summary(result, out);
    } else {
      out << text;
    }
    if (!result.converged) {
      err << "STLN did not converge: " << result.message << "\n";
      return kExitNotConverged;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  try {
    const Json doc = read_json_file(path);
    double tol = kDefaultRankTol;
    Json target = doc;
    if (doc.is_object() && doc.contains("perturbed_system")) {
      target = doc.at("perturbed_system");
      if (doc.contains("verification_rel_tol") && doc.at("verification_rel_tol").is_number()) {
        tol = doc.at("verification_rel_tol").get<double>();
      }
      out << "checking perturbed system from report (rank tolerance " << format_number(tol) << ")\n";
    }
    const Problem problem = parse_problem(target);
    const DescriptorSystem sys = problem.working_system();

    const bool toeplitz = is_c_controllable_toeplitz(sys, tol);
    std::optional<ControllabilityReport> pencil;
    try {
      pencil = is_c_controllable_pencil(sys, tol);
    } catch (const SingularPencilError&) {
      out << "inconclusive: singular pencil (pencil ?, toeplitz " << mark(toeplitz) << ")\n";
      return kExitInconclusive;
    }

    out << (toeplitz ? "controllable" : "uncontrollable") << " (pencil " << mark(pencil->controllable)
        << ", toeplitz " << mark(toeplitz) << ")\n";
    if (pencil->failing_mode == FailingMode::Spectral) {
      out << "pencil test: rank [sE - A, B] < n at s = " << format_complex(pencil->failing_eigenvalue) << "\n";
    } else if (pencil->failing_mode == FailingMode::Infinity) {
      out << "pencil test: rank [E, B] < n\n";
    }
    if (pencil->controllable == toeplitz) {
      out << "criteria agree\n";
    } else {
      out << "criteria disagree; exit status follows the toeplitz criterion\n";
    }
    return toeplitz ? kExitOk : kExitUncontrollable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int cmd_sweep(const std::string& path, const std::string& param, const std::vector<std::string>& values,
              const SolverFlags& flags, std::ostream& out, std::ostream& err) {
  try {
    const Json doc = read_json_file(path);
    if (values.empty()) throw InputError("--values: at least one value required");
    std::vector<Problem> problems;
    std::vector<StlnConfig> configs;
    for (const std::string& v : values) {
      problems.push_back(parse_problem(apply_parameter(doc, param, v)));
      StlnConfig cfg = problems.back().solver;
      flags.apply(cfg);
      configs.push_back(cfg);
    }

    std::size_t width = param.size();
    for (const auto& v : values) width = std::max(width, v.size());
    const int w0 = static_cast<int>(width) + 2;
    out << std::left << std::setw(w0) << param << std::setw(23) << "radius_frobenius" << std::setw(23)
        << "radius_spectral" << std::setw(12) << "iterations"
        << "converged\n";
    bool all_converged = true;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const RadiusResult r = solve_problem(problems[i], configs[i]);
      all_converged = all_converged && r.converged;
      out << std::left << std::setw(w0) << values[i] << std::setw(23) << format_number(r.radius_frobenius)
          << std::setw(23) << format_number(r.radius_spectral) << std::setw(12) << r.iterations << yes_no(r.converged)
          << "\n";
    }
    return all_converged ? kExitOk : kExitNotConverged;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured real radius of controllability for descriptor and higher-order systems"};
  app.require_subcommand(1);

  std::string file;
  SolverFlags flags;
  std::optional<std::string> out_path;
  std::string param;
  std::vector<std::string> values;

  auto add_solver_flags = [&](CLI::App* sub) {
    sub->add_option("--omega", flags.omega, "STLN weight");
    sub->add_option("--epsilon", flags.epsilon, "convergence tolerance on the increments");
    sub->add_option("--max-iter", flags.max_iter, "iteration limit");
    sub->add_option("--partition-col", flags.partition_col, "partition column index or 'last'");
    sub->add_flag("--multistart", flags.multistart, "try every partition column, keep the smallest radius");
  };

  CLI::App* radius = app.add_subcommand("radius", "compute the structured radius and write a report");
  radius->add_option("file", file, "problem file")->required();
  add_solver_flags(radius);
  radius->add_option("--out", out_path, "write the report here and print a summary");

  CLI::App* check = app.add_subcommand("check", "controllability verdict from both criteria");
  check->add_option("file", file, "problem or report file")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "radius for each value of a named parameter");
  sweep->add_option("file", file, "problem file")->required();
  sweep->add_option("--param", param, "parameter name")->required();
  sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
  add_solver_flags(sweep);

  std::vector<const char*> argv{"ctrlradius"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (radius->parsed()) return cmd_radius(file, flags, out_path, out, err);
  if (check->parsed()) return cmd_check(file, out, err);
  return cmd_sweep(file, param, values, flags, out, err);
}

}  // namespace ctrlradius
