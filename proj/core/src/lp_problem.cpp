#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "teachcert/errors.hpp"
#include "teachcert/lp.hpp"

namespace teachcert::lp {

namespace {

std::vector<std::pair<int, Rational>> merge_terms(std::vector<std::pair<int, Rational>> coeffs) {
  std::map<int, Rational> merged;
  for (auto& [c, v] : coeffs) merged[c] += v;
  std::vector<std::pair<int, Rational>> out;
  for (auto& [c, v] : merged)
    if (v != 0) out.emplace_back(c, v);
  return out;
}

std::string format_coeff(const Rational& q, bool decimal) {
  if (!decimal) return teachcert::to_string(q);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", q.get_d());
  return buf;
}

const char* sense_token(RowSense s) {
  switch (s) {
    case RowSense::Eq: return "=";
    case RowSense::Le: return "<=";
    case RowSense::Ge: return ">=";
  }
  return "=";
}

void write_terms(std::ostringstream& os, const Problem& p,
                 const std::vector<std::pair<int, Rational>>& terms, bool decimal) {
  if (terms.empty()) {
    os << " 0";
    return;
  }
  for (const auto& [c, v] : terms) {
    os << (v < 0 ? " - " : " + ") << format_coeff(abs(v), decimal) << ' ' << p.columns()[c].name;
  }
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "feasible";
    case Status::Infeasible: return "infeasible";
    case Status::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

int Problem::add_column(std::string name, bool nonneg) {
  columns_.push_back({std::move(name), nonneg});
  return static_cast<int>(columns_.size()) - 1;
}

int Problem::add_row(std::string name, std::vector<std::pair<int, Rational>> coeffs, RowSense sense,
                     Rational rhs) {
  rows_.push_back({std::move(name), merge_terms(std::move(coeffs)), sense, std::move(rhs)});
  return static_cast<int>(rows_.size()) - 1;
}

void Problem::set_objective(std::vector<std::pair<int, Rational>> coeffs) {
  objective_ = merge_terms(std::move(coeffs));
}

std::size_t Problem::nonzeros() const {
  std::size_t nnz = 0;
  for (const auto& r : rows_) nnz += r.coeffs.size();
  return nnz;
}

void Problem::validate() const {
  const int n = static_cast<int>(columns_.size());
  for (const auto& r : rows_)
    for (const auto& [c, v] : r.coeffs)
      if (c < 0 || c >= n) throw InvariantViolation("row '" + r.name + "' references an unknown column");
  for (const auto& [c, v] : objective_)
    if (c < 0 || c >= n) throw InvariantViolation("objective references an unknown column");
}

Problem Problem::tightened(const Rational& delta) const {
  Problem out = *this;
  for (auto& r : out.rows_) {
    if (r.sense == RowSense::Ge) r.rhs += delta;
    else if (r.sense == RowSense::Le) r.rhs -= delta;
  }
  return out;
}

std::string Problem::to_text(bool decimal) const {
  std::ostringstream os;
  os << "\\ teachcert linear program: " << columns_.size() << " columns, " << rows_.size()
     << " rows\n";
  os << "Minimize\n obj:";
  write_terms(os, *this, objective_, decimal);
  os << "\nSubject To\n";
  for (const auto& r : rows_) {
    os << ' ' << r.name << ':';
    write_terms(os, *this, r.coeffs, decimal);
    os << ' ' << sense_token(r.sense) << ' ' << format_coeff(r.rhs, decimal) << '\n';
  }
  os << "Bounds\n";
  for (const auto& c : columns_) os << ' ' << c.name << (c.nonneg ? " >= 0" : " free") << '\n';
  os << "End\n";
  return os.str();
}

Problem Problem::from_text(const std::string& text) {
  enum class Section { None, Objective, Constraints, Bounds, End } section = Section::None;
  struct PendingRow {
    std::string name;
    std::vector<std::pair<std::string, Rational>> terms;
    RowSense sense = RowSense::Eq;
    Rational rhs;
  };
  std::vector<PendingRow> pending;
  std::vector<std::pair<std::string, Rational>> objective;
  std::vector<std::pair<std::string, bool>> bounds;

  auto parse_terms = [](std::istringstream& in, std::vector<std::pair<std::string, Rational>>& terms,
                        std::string& stop) {
    std::string tok;
    Rational sign = 1;
    std::optional<Rational> coeff;
    while (in >> tok) {
      if (tok == "+") { sign = 1; continue; }
      if (tok == "-") { sign = -1; continue; }
      if (tok == "=" || tok == "<=" || tok == ">=" || tok == "=<" || tok == "=>") {
        stop = tok;
        return;
      }
      const bool numeric = std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.';
      if (numeric) {
        coeff = parse_rational(tok);
      } else {
        terms.emplace_back(tok, sign * coeff.value_or(Rational(1)));
        sign = 1;
        coeff.reset();
      }
    }
  };

  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '\\') continue;
    std::string trimmed = line.substr(first);
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) trimmed.pop_back();
    std::string lower = trimmed;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower == "minimize" || lower == "minimise" || lower == "min") { section = Section::Objective; continue; }
    if (lower == "subject to" || lower == "st" || lower == "s.t.") { section = Section::Constraints; continue; }
    if (lower == "bounds") { section = Section::Bounds; continue; }
    if (lower == "end") { section = Section::End; continue; }

    if (section == Section::Objective || section == Section::Constraints) {
      std::string name;
      std::string body = trimmed;
      if (auto colon = trimmed.find(':'); colon != std::string::npos) {
        name = trimmed.substr(0, colon);
        body = trimmed.substr(colon + 1);
      }
      std::istringstream in(body);
      std::vector<std::pair<std::string, Rational>> terms;
      std::string stop;
      parse_terms(in, terms, stop);
      if (section == Section::Objective) {
        objective = std::move(terms);
        continue;
      }
      if (stop.empty()) throw SchemaError("LP row '" + name + "' has no sense");
      std::string rhs_tok;
      if (!(in >> rhs_tok)) throw SchemaError("LP row '" + name + "' has no right-hand side");
      Rational rhs_sign = 1;
      if (rhs_tok == "-" || rhs_tok == "+") {
        rhs_sign = rhs_tok == "-" ? -1 : 1;
        in >> rhs_tok;
      }
      PendingRow r{name.empty() ? "r" + std::to_string(pending.size()) : name, std::move(terms),
                   RowSense::Eq, rhs_sign * parse_rational(rhs_tok)};
      if (stop == "<=" || stop == "=<") r.sense = RowSense::Le;
      else if (stop == ">=" || stop == "=>") r.sense = RowSense::Ge;
      pending.push_back(std::move(r));
    } else if (section == Section::Bounds) {
      std::istringstream in(trimmed);
      std::string name, a, b;
      in >> name >> a;
      std::string al = a;
      std::transform(al.begin(), al.end(), al.begin(), ::tolower);
      if (al == "free") bounds.emplace_back(name, false);
      else if (a == ">=" && (in >> b) && parse_rational(b) == 0) bounds.emplace_back(name, true);
      else throw SchemaError("unsupported bound line '" + trimmed + "'");
    }
  }

  Problem p;
  std::map<std::string, int> index;
  for (const auto& [name, nonneg] : bounds) {
    if (index.count(name)) throw SchemaError("duplicate bound for '" + name + "'");
    index[name] = p.add_column(name, nonneg);
  }
  auto column = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    return index[name] = p.add_column(name, true);
  };
  std::vector<std::pair<int, Rational>> obj;
  for (const auto& [name, v] : objective) obj.emplace_back(column(name), v);
  for (auto& r : pending) {
    std::vector<std::pair<int, Rational>> coeffs;
    for (const auto& [name, v] : r.terms) coeffs.emplace_back(column(name), v);
    p.add_row(r.name, std::move(coeffs), r.sense, r.rhs);
  }
  p.set_objective(std::move(obj));
  return p;
}

std::string solution_json(const Problem& p, const Solution& sol) {
  nlohmann::json out;
  out["status"] = to_string(sol.status);
  out["mode"] = sol.mode == Mode::Exact ? "exact" : "float";
  nlohmann::json assignment = nlohmann::json::object();
  for (std::size_t j = 0; j < p.num_columns(); ++j) {
    if (!sol.exact_values.empty()) assignment[p.columns()[j].name] = teachcert::to_string(sol.exact_values[j]);
    else if (!sol.values.empty()) assignment[p.columns()[j].name] = sol.values[j];
  }
  out["assignment"] = assignment;
  out["residuals"] = {{"max_equality", sol.max_equality_residual},
                      {"max_inequality", sol.max_inequality_violation}};
  out["iterations"] = sol.iterations;
  return out.dump(2);
}

namespace detail {

StandardForm standardize(const Problem& p) {
  p.validate();
  StandardForm sf;
  sf.m = p.num_rows();
  std::vector<int> first_std(p.num_columns());
  for (std::size_t j = 0; j < p.num_columns(); ++j) {
    first_std[j] = static_cast<int>(sf.cols.size());
    sf.cols.emplace_back();
    sf.source_column.push_back(static_cast<int>(j));
    sf.source_sign.push_back(+1);
    if (!p.columns()[j].nonneg) {
      sf.cols.emplace_back();
      sf.source_column.push_back(static_cast<int>(j));
      sf.source_sign.push_back(-1);
    }
  }
  sf.b.resize(sf.m);
  sf.row_sign.resize(sf.m);
  sf.initial_basis.assign(sf.m, -1);
  for (std::size_t i = 0; i < sf.m; ++i) {
    const auto& r = p.rows()[i];
    const int sign = r.rhs < 0 ? -1 : 1;
    sf.row_sign[i] = sign;
    sf.b[i] = r.rhs * sign;
    for (const auto& [c, v] : r.coeffs) {
      const int s0 = first_std[c];
      sf.cols[s0].emplace_back(static_cast<int>(i), v * sign);
      if (!p.columns()[c].nonneg) sf.cols[s0 + 1].emplace_back(static_cast<int>(i), -v * sign);
    }
  }
  const std::size_t structural = sf.cols.size();
  for (std::size_t i = 0; i < sf.m; ++i) {
    const auto& r = p.rows()[i];
    if (r.sense == RowSense::Eq) continue;
    const int coeff = (r.sense == RowSense::Le ? 1 : -1) * sf.row_sign[i];
    const int idx = static_cast<int>(sf.cols.size());
    sf.cols.push_back({{static_cast<int>(i), Rational(coeff)}});
    sf.source_column.push_back(-1);
    sf.source_sign.push_back(0);
    if (coeff == 1) sf.initial_basis[i] = idx;
  }
  sf.artificial.assign(sf.cols.size(), false);
  for (std::size_t i = 0; i < sf.m; ++i) {
    if (sf.initial_basis[i] >= 0) continue;
    const int idx = static_cast<int>(sf.cols.size());
    sf.cols.push_back({{static_cast<int>(i), Rational(1)}});
    sf.source_column.push_back(-1);
    sf.source_sign.push_back(0);
    sf.artificial.push_back(true);
    sf.initial_basis[i] = idx;
  }
  sf.n = sf.cols.size();
  sf.cost.assign(sf.n, Rational(0));
  std::map<int, Rational> obj(p.objective().begin(), p.objective().end());
  for (std::size_t k = 0; k < structural; ++k) {
    auto it = obj.find(sf.source_column[k]);
    if (it != obj.end()) sf.cost[k] = it->second * sf.source_sign[k];
  }
  return sf;
}

RationalVector to_original(const StandardForm& sf, const RationalVector& x) {
  int ncols = 0;
  for (int s : sf.source_column) ncols = std::max(ncols, s + 1);
  RationalVector out(static_cast<std::size_t>(ncols), Rational(0));
  for (std::size_t k = 0; k < sf.n; ++k)
    if (sf.source_column[k] >= 0 && x[k] != 0) out[sf.source_column[k]] += x[k] * sf.source_sign[k];
  return out;
}

std::vector<double> to_original(const StandardForm& sf, const std::vector<double>& x) {
  int ncols = 0;
  for (int s : sf.source_column) ncols = std::max(ncols, s + 1);
  std::vector<double> out(static_cast<std::size_t>(ncols), 0.0);
  for (std::size_t k = 0; k < sf.n; ++k)
    if (sf.source_column[k] >= 0) out[sf.source_column[k]] += x[k] * sf.source_sign[k];
  return out;
}

void fill_residuals(const Problem& p, Solution& sol) {
  sol.max_equality_residual = 0;
  sol.max_inequality_violation = 0;
  if (sol.values.size() != p.num_columns()) return;
  for (const auto& r : p.rows()) {
    double act = 0;
    for (const auto& [c, v] : r.coeffs) act += v.get_d() * sol.values[c];
    const double rhs = r.rhs.get_d();
    switch (r.sense) {
      case RowSense::Eq:
        sol.max_equality_residual = std::max(sol.max_equality_residual, std::abs(act - rhs));
        break;
      case RowSense::Le:
        sol.max_inequality_violation = std::max(sol.max_inequality_violation, act - rhs);
        break;
      case RowSense::Ge:
        sol.max_inequality_violation = std::max(sol.max_inequality_violation, rhs - act);
        break;
    }
  }
  for (std::size_t j = 0; j < p.num_columns(); ++j)
    if (p.columns()[j].nonneg)
      sol.max_inequality_violation = std::max(sol.max_inequality_violation, -sol.values[j]);
}

}  // namespace detail

Solution solve(const Problem& p, Mode mode, const Options& options) {
  const auto sf = detail::standardize(p);
  return mode == Mode::Exact ? detail::solve_exact(p, sf, options) : detail::solve_float(p, sf, options);
}

}  // namespace teachcert::lp
