#include "ctrlradius/problem_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ctrlradius {

namespace {

std::string dims(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

const Json& require(const Json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) throw InputError(path + key + ": missing required field");
  return doc.at(key);
}

Index read_count(const Json& doc, const std::string& key, const std::string& path, Index min_value) {
  const Json& v = require(doc, key, path);
  if (!v.is_number_integer()) throw InputError(path + key + ": expected an integer");
  const auto x = v.get<long long>();
  if (x < min_value) throw InputError(path + key + ": must be >= " + std::to_string(min_value));
  return static_cast<Index>(x);
}

double read_number(const Json& v, const std::string& what) {
  if (!v.is_number()) throw InputError(what + ": expected a number");
  return v.get<double>();
}

Matrix read_matrix(const Json& v, Index rows, Index cols, const std::string& what) {
  Matrix out(rows, cols);
  if (!v.is_array()) throw InputError(what + ": expected a nested array of shape " + dims(rows, cols));
  // A flat list is accepted for column vectors.
  if (cols == 1 && !v.empty() && !v.front().is_array()) {
    if (static_cast<Index>(v.size()) != rows) {
      throw InputError(what + ": expected " + dims(rows, cols) + ", found " + std::to_string(v.size()) + " entries");
    }
    for (Index i = 0; i < rows; ++i) out(i, 0) = read_number(v[static_cast<std::size_t>(i)], what);
    return out;
  }
  if (static_cast<Index>(v.size()) != rows) {
    throw InputError(what + ": expected " + dims(rows, cols) + ", found " + std::to_string(v.size()) + " rows");
  }
  for (Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InputError(what + ": expected " + dims(rows, cols) + ", row " + std::to_string(i) + " has " +
                       (row.is_array() ? std::to_string(row.size()) + " entries" : std::string("no array")));
    }
    for (Index j = 0; j < cols; ++j) {
      out(i, j) = read_number(row[static_cast<std::size_t>(j)], what + "[" + std::to_string(i) + "][" +
                                                                     std::to_string(j) + "]");
    }
  }
  if (!out.allFinite()) throw InputError(what + ": non-finite entry");
  return out;
}

bool read_flag(const Json& v, const std::string& what) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) return v.get<int>() == 1;
  throw InputError(what + ": expected true/false");
}

BoolMatrix read_mask(const Json& v, Index rows, Index cols, const std::string& what) {
  if (v.is_boolean()) return BoolMatrix::Constant(rows, cols, v.get<bool>());
  if (!v.is_array() || static_cast<Index>(v.size()) != rows) {
    throw InputError(what + ": expected true/false or a nested boolean array of shape " + dims(rows, cols) +
                     (v.is_array() ? ", found " + std::to_string(v.size()) + " rows" : std::string()));
  }
  BoolMatrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw InputError(what + ": expected " + dims(rows, cols) + ", row " + std::to_string(i) + " is malformed");
    }
    for (Index j = 0; j < cols; ++j) out(i, j) = read_flag(row[static_cast<std::size_t>(j)], what);
  }
  return out;
}

Json mask_json(const BoolMatrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(static_cast<bool>(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

void parse_descriptor(const Json& doc, Problem& p) {
  const Index n = read_count(doc, "n", "", 1);
  const Index m = read_count(doc, "m", "", 1);
  Matrix e = read_matrix(require(doc, "E", ""), n, n, "E");
  Matrix a = read_matrix(require(doc, "A", ""), n, n, "A");
  Matrix b = read_matrix(require(doc, "B", ""), n, m, "B");
  p.descriptor.emplace(std::move(e), std::move(a), std::move(b));
  p.mask = PerturbationMask::all_free(n, m);
  if (doc.contains("mask")) {
    const Json& mk = doc.at("mask");
    if (!mk.is_object()) throw InputError("mask: expected an object with optional E, A, B");
    for (const auto& [key, _] : mk.items()) {
      if (key != "E" && key != "A" && key != "B") throw InputError("mask." + key + ": unknown field");
    }
    if (mk.contains("E")) p.mask.E = read_mask(mk.at("E"), n, n, "mask.E");
    if (mk.contains("A")) p.mask.A = read_mask(mk.at("A"), n, n, "mask.A");
    if (mk.contains("B")) p.mask.B = read_mask(mk.at("B"), n, m, "mask.B");
  }
}

void parse_higher_order(const Json& doc, Problem& p) {
  const Index d = read_count(doc, "d", "", 1);
  const Index big_n = read_count(doc, "N", "", 1);
  const Index big_m = read_count(doc, "M", "", 1);
  const Json& pj = require(doc, "P", "");
  if (!pj.is_array() || static_cast<Index>(pj.size()) != d + 1) {
    throw InputError("P: expected a list of " + std::to_string(d + 1) + " matrices (P_" + std::to_string(d) +
                     " first), found " + (pj.is_array() ? std::to_string(pj.size()) : std::string("no list")));
  }
  std::vector<Matrix> coeffs;
  for (Index k = 0; k <= d; ++k) {
    coeffs.push_back(read_matrix(pj[static_cast<std::size_t>(k)], big_n, big_n, "P_" + std::to_string(d - k)));
  }
  Matrix b = read_matrix(require(doc, "b", ""), big_n, big_m, "b");
  try {
    p.higher_order.emplace(std::move(coeffs), std::move(b));
  } catch (const ModelError& e) {
    throw InputError(e.what());
  }
  if (doc.contains("mask")) {
    const Json& mk = doc.at("mask");
    if (!mk.is_object()) throw InputError("mask: expected an object with optional P, b");
    CoefficientMask cm;
    if (mk.contains("P")) {
      const Json& pm = mk.at("P");
      if (!pm.is_array() || static_cast<Index>(pm.size()) != d + 1) {
        throw InputError("mask.P: expected a list of " + std::to_string(d + 1) + " entries");
      }
      for (Index k = 0; k <= d; ++k) {
        const Json& entry = pm[static_cast<std::size_t>(k)];
        if (entry.is_null()) {
          cm.P.emplace_back();
        } else {
          cm.P.emplace_back(read_mask(entry, big_n, big_n, "mask.P_" + std::to_string(d - k)));
        }
      }
    }
    if (mk.contains("b")) cm.b = read_mask(mk.at("b"), big_n, big_m, "mask.b");
    p.coefficient_mask = std::move(cm);
  }
}

}  // namespace

DescriptorSystem Problem::working_system() const {
  if (kind == ProblemKind::Descriptor) return *descriptor;
  return canonical_form(*higher_order).system;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void apply_solver_block(const Json& solver, StlnConfig& cfg) {
  if (!solver.is_object()) throw InputError("solver: expected an object");
  for (const auto& [key, v] : solver.items()) {
    const std::string what = "solver." + key;
    if (key == "omega") {
      cfg.omega = read_number(v, what);
    } else if (key == "epsilon") {
      cfg.epsilon = read_number(v, what);
    } else if (key == "max_iter") {
      if (!v.is_number_integer()) throw InputError(what + ": expected an integer");
      cfg.max_iter = v.get<int>();
    } else if (key == "damping_after") {
      if (!v.is_number_integer()) throw InputError(what + ": expected an integer");
      cfg.damping_after = v.get<int>();
    } else if (key == "partition_col") {
      if (v.is_string() && v.get<std::string>() == "last") {
        cfg.partition_col.reset();
      } else if (v.is_number_integer()) {
        cfg.partition_col = v.get<Index>();
      } else {
        throw InputError(what + ": expected a column index or \"last\"");
      }
    } else if (key == "multistart") {
      if (v.is_boolean()) {
        cfg.multistart = v.get<bool>();
        cfg.multistart_columns.clear();
      } else if (v.is_array()) {
        cfg.multistart = true;
        cfg.multistart_columns.clear();
        for (const Json& c : v) {
          if (!c.is_number_integer()) throw InputError(what + ": expected integer column indices");
          cfg.multistart_columns.push_back(c.get<Index>());
        }
      } else {
        throw InputError(what + ": expected true/false or a list of columns");
      }
    } else {
      throw InputError(what + ": unknown field");
    }
  }
  try {
    cfg.validate();
  } catch (const NumericError& e) {
    throw InputError(std::string("solver: ") + e.what());
  }
}

Problem parse_problem(const Json& doc) {
  if (!doc.is_object()) throw InputError("problem file must hold a JSON object");
  const Json& kind = require(doc, "kind", "");
  if (!kind.is_string()) throw InputError("kind: expected \"descriptor\" or \"higher_order\"");
  Problem p;
  p.source = doc;
  try {
    if (kind == "descriptor") {
      p.kind = ProblemKind::Descriptor;
      parse_descriptor(doc, p);
    } else if (kind == "higher_order") {
      p.kind = ProblemKind::HigherOrder;
      parse_higher_order(doc, p);
    } else {
      throw InputError("kind: expected \"descriptor\" or \"higher_order\", found \"" + kind.get<std::string>() + "\"");
    }
  } catch (const ModelError& e) {
    throw InputError(e.what());
  }
  if (doc.contains("solver")) apply_solver_block(doc.at("solver"), p.solver);
  return p;
}

Json solver_json(const StlnConfig& cfg) {
  Json j;
  j["omega"] = cfg.omega;
  j["epsilon"] = cfg.epsilon;
  j["max_iter"] = cfg.max_iter;
  if (cfg.partition_col) {
    j["partition_col"] = *cfg.partition_col;
  } else {
    j["partition_col"] = "last";
  }
  if (cfg.multistart && !cfg.multistart_columns.empty()) {
    j["multistart"] = cfg.multistart_columns;
  } else {
    j["multistart"] = cfg.multistart;
  }
  j["damping_after"] = cfg.damping_after;
  return j;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json problem_json(const DescriptorSystem& sys) {
  Json j;
  j["kind"] = "descriptor";
  j["n"] = sys.n();
  j["m"] = sys.m();
  j["E"] = matrix_json(sys.E());
  j["A"] = matrix_json(sys.A());
  j["B"] = matrix_json(sys.B());
  return j;
}

Json problem_json(const HigherOrderSystem& sys) {
  Json j;
  j["kind"] = "higher_order";
  j["d"] = sys.degree();
  j["N"] = sys.state_dim();
  j["M"] = sys.input_dim();
  Json p = Json::array();
  for (const Matrix& c : sys.coefficients_leading_first()) p.push_back(matrix_json(c));
  j["P"] = std::move(p);
  j["b"] = matrix_json(sys.b());
  return j;
}

Json report_json(const Problem& problem, const RadiusResult& result, const StlnConfig& cfg) {
  Json j;
  j["radius_frobenius"] = result.radius_frobenius;
  j["radius_spectral"] = result.radius_spectral;
  j["converged"] = result.converged;
  j["uncontrollability_verified"] = result.uncontrollability_verified;
  j["already_uncontrollable"] = result.already_uncontrollable;
  j["iterations"] = result.iterations;
  if (result.partition_col_used) {
    j["partition_col_used"] = *result.partition_col_used;
  } else {
    j["partition_col_used"] = nullptr;
  }
  j["message"] = result.message;
  j["perturbations"] = {{"E", matrix_json(result.dE)}, {"A", matrix_json(result.dA)}, {"B", matrix_json(result.dB)}};
  if (problem.kind == ProblemKind::HigherOrder && result.perturbed_higher_order) {
    j["perturbed_system"] = problem_json(*result.perturbed_higher_order);
  } else {
    j["perturbed_system"] = problem_json(result.perturbed_system);
  }
  j["solver"] = solver_json(cfg);
  j["verification_rel_tol"] = verification_tolerance(cfg);
  if (problem.kind == ProblemKind::Descriptor) {
    j["mask"] = {{"E", mask_json(problem.mask.E)}, {"A", mask_json(problem.mask.A)}, {"B", mask_json(problem.mask.B)}};
  }
  return j;
}

std::vector<std::string> parameter_names(const Json& doc) {
  std::vector<std::string> names;
  if (doc.is_object() && doc.contains("parameters") && doc.at("parameters").is_object()) {
    for (const auto& [key, _] : doc.at("parameters").items()) names.push_back(key);
  }
  return names;
}

Json apply_parameter(const Json& doc, const std::string& name, const std::string& value) {
  const auto names = parameter_names(doc);
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string listing;
    for (const auto& n : names) listing += (listing.empty() ? "" : ", ") + n;
    throw InputError("unknown parameter '" + name + "'; available: " + (listing.empty() ? "(none)" : listing));
  }
  const Json& spec = doc.at("parameters").at(name);
  const std::string what = "parameters." + name;
  Json out = doc;

  if (spec.contains("cases")) {
    const Json& cases = spec.at("cases");
    if (!cases.is_object()) throw InputError(what + ".cases: expected an object");
    if (!cases.contains(value)) {
      std::string listing;
      for (const auto& [key, _] : cases.items()) listing += (listing.empty() ? "" : ", ") + key;
      throw InputError(what + ": no case '" + value + "'; available: " + listing);
    }
    const Json& overrides = cases.at(value);
    if (!overrides.is_object()) throw InputError(what + ".cases." + value + ": expected an object");
    for (const auto& [key, v] : overrides.items()) out[key] = v;
    return out;
  }

  if (!spec.contains("bind") || !spec.at("bind").is_array()) {
    throw InputError(what + ": expected \"bind\" (list) or \"cases\" (object)");
  }
  double x = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) throw InputError(what + ": value '" + value + "' is not a number");

  const bool higher = doc.value("kind", "") == "higher_order";
  for (const Json& b : spec.at("bind")) {
    const Json& mj = require(b, "matrix", what + ".bind.");
    if (!mj.is_string()) throw InputError(what + ".bind.matrix: expected a name");
    const std::string matrix = mj.get<std::string>();
    const Index row = read_count(b, "row", what + ".bind.", 0);
    const Index col = read_count(b, "col", what + ".bind.", 0);
    const double scale = b.contains("scale") ? read_number(b.at("scale"), what + ".bind.scale") : 1.0;

    Json* target = nullptr;
    if (higher && matrix.size() > 1 && matrix[0] == 'P') {
      int power = -1;
      const auto pr = std::from_chars(matrix.data() + 1, matrix.data() + matrix.size(), power);
      const int d = doc.at("d").get<int>();
      if (pr.ec != std::errc() || pr.ptr != matrix.data() + matrix.size() || power < 0 || power > d) throw InputError(what + ".bind.matrix: no coefficient " + matrix);
      target = &out.at("P").at(static_cast<std::size_t>(d - power));
    } else if (out.contains(matrix) && out.at(matrix).is_array()) {
      target = &out.at(matrix);
    } else {
      throw InputError(what + ".bind.matrix: unknown matrix '" + matrix + "'");
    }
    Json& rows = *target;
    if (static_cast<Index>(rows.size()) <= row) throw InputError(what + ".bind.row: out of range");
    Json& r = rows.at(static_cast<std::size_t>(row));
    if (r.is_array()) {
      if (static_cast<Index>(r.size()) <= col) throw InputError(what + ".bind.col: out of range");
      r.at(static_cast<std::size_t>(col)) = scale * x;
    } else {
      if (col != 0) throw InputError(what + ".bind.col: out of range");
      r = scale * x;
    }
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 15);
  return std::string(buf, res.ptr);
}

}  // namespace ctrlradius
