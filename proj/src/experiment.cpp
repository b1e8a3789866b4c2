#include "halfic/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>
#include <variant>

#include <json.hpp>

#include "halfic/factor.hpp"
#include "halfic/symbolic.hpp"

namespace halfic {

using nlohmann::json;

const char* to_string(Solver solver) {
  switch (solver) {
    case Solver::cg: return "cg";
    case Solver::gmres: return "gmres";
    case Solver::lu_ir: return "lu-ir";
    case Solver::plain_krylov: return "plain-krylov";
  }
  return "?";
}

Solver solver_from_name(std::string_view name) {
  if (name == "cg") return Solver::cg;
  if (name == "gmres") return Solver::gmres;
  if (name == "lu-ir") return Solver::lu_ir;
  if (name == "plain-krylov") return Solver::plain_krylov;
  throw ConfigError("unknown solver '" + std::string(name) + "'");
}

const char* to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OutputFormat output_format_from_name(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + std::string(name) + "'");
}

int RunConfig::effective_inner_maxit() const {
  return inner_maxit.value_or(solver == Solver::plain_krylov ? 2000 : 1000);
}

int RunConfig::effective_outer_itmax() const {
  return outer_itmax.value_or(solver == Solver::plain_krylov ? 1 : 20);
}

void RunConfig::validate() const {
  if (matrix_path.empty()) throw ConfigError("matrix: path is empty");
  if (level < 0) throw ConfigError("level: must be >= 0");
  try {
    FpFormat::from_name(format);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("format: ") + e.what());
  }
  if (!(delta > 0.0)) throw ConfigError("delta: must be > 0");
  if (!(delta_krylov > 0.0)) throw ConfigError("delta_krylov: must be > 0");
  if (effective_inner_maxit() < 1) throw ConfigError("inner_maxit: must be >= 1");
  if (effective_outer_itmax() < 1) throw ConfigError("outer_itmax: must be >= 1");
  if (tau && !(*tau > 0.0)) throw ConfigError("tau: must be > 0");
  if (!(shift_init > 0.0)) throw ConfigError("shift_init: must be > 0");
  if (max_restarts < 0) throw ConfigError("max_restarts: must be >= 0");
}

RunConfig parse_run_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("manifest: each line must be a JSON object");

  RunConfig c;
  for (const auto& [key, v] : j.items()) {
    auto need = [&](bool ok, const char* type) {
      if (!ok) throw ConfigError(key + ": expected " + type);
    };
    if (key == "matrix") {
      need(v.is_string(), "a string");
      c.matrix_path = v.get<std::string>();
    } else if (key == "level") {
      need(v.is_number_integer(), "an integer");
      c.level = v.get<int>();
    } else if (key == "format") {
      need(v.is_string(), "a string");
      c.format = v.get<std::string>();
    } else if (key == "solver") {
      need(v.is_string(), "a string");
      c.solver = solver_from_name(v.get<std::string>());
    } else if (key == "delta") {
      need(v.is_number(), "a number");
      c.delta = v.get<double>();
    } else if (key == "delta_krylov") {
      need(v.is_number(), "a number");
      c.delta_krylov = v.get<double>();
    } else if (key == "inner_maxit") {
      need(v.is_number_integer(), "an integer");
      c.inner_maxit = v.get<int>();
    } else if (key == "outer_itmax") {
      need(v.is_number_integer(), "an integer");
      c.outer_itmax = v.get<int>();
    } else if (key == "tau") {
      need(v.is_number() || v.is_null(), "a number");
      if (!v.is_null()) c.tau = v.get<double>();
    } else if (key == "shift_init") {
      need(v.is_number(), "a number");
      c.shift_init = v.get<double>();
    } else if (key == "max_restarts") {
      need(v.is_number_integer(), "an integer");
      c.max_restarts = v.get<int>();
    } else if (key == "output") {
      need(v.is_string(), "a string");
      c.output = output_format_from_name(v.get<std::string>());
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

std::string identifier_from_path(const std::string& path) {
  const std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  const std::string parent = p.parent_path().filename().string();
  return parent.empty() ? stem : parent + "/" + stem;
}

std::pair<std::vector<double>, std::vector<double>> build_rhs(const SparseSpd& a) {
  std::vector<double> x(a.n, 1.0);
  std::vector<double> b = matvec_f64(a, x);
  return {std::move(b), std::move(x)};
}

namespace {

const char* report_status(const SolveReport& rep) {
  if (rep.converged) return "converged";
  if (rep.diverged) return "diverged";
  if (rep.inner_breakdown && !rep.per_outer.empty())
    return to_string(rep.per_outer.back().status);
  return "not_converged";
}

}  // namespace

RunRecord run_on_matrix(const SparseSpd& a, const std::string& identifier,
                        const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.identifier = identifier;
  rec.format = config.format;
  rec.level = config.level;
  rec.solver = to_string(config.solver);
  try {
    config.validate();
    const FpFormat f = FpFormat::from_name(config.format);
    rec.n = a.n;
    rec.nnz_A = static_cast<long long>(a.nnz());
    rec.normA = inf_norm_matrix(a);
    const auto [b, x_true] = build_rhs(a);
    rec.normb = inf_norm_vector(b);

    const auto [a_hat, scale] = l2_scale(a);
    std::vector<double> b_hat(b);
    for (int i = 0; i < a.n; ++i) b_hat[i] /= scale.s[i];

    const SparseSpd a_low = squeeze(a_hat, f).first;
    const FillPattern pattern = ic_pattern(a_low, config.level);
    ShiftedIcOptions opts;
    opts.tau = config.tau;
    opts.initial_shift = config.shift_init;
    opts.max_restarts = config.max_restarts;
    const IcFactor fac = shifted_ic_squeezed(a_low, pattern, f, opts);
    rec.nnz_L = static_cast<long long>(fac.pattern.nnz());
    rec.alpha = fac.alpha;
    rec.nmod = fac.stats.nmod;
    rec.nscal = fac.stats.nscal;
    rec.nofl = fac.stats.nofl;
    rec.restarts = fac.stats.restarts;

    SolveReport rep;
    if (config.solver == Solver::lu_ir) {
      IrOptions o;
      o.delta = config.delta;
      o.itmax = config.effective_outer_itmax();
      rep = ic_lu_ir(a_hat, b_hat, fac, o);
    } else {
      KrylovIrOptions o;
      o.method = config.solver == Solver::cg ? KrylovMethod::cg : KrylovMethod::gmres;
      o.delta = config.delta;
      o.delta_krylov = config.delta_krylov;
      o.inner_maxit = config.effective_inner_maxit();
      o.itmax = config.effective_outer_itmax();
      rep = ic_krylov_ir(a_hat, b_hat, fac, o);
    }
    rec.resinit = rep.resinit;
    rec.resfinal = rep.resfinal;
    rec.iouter = rep.iouter;
    rec.totits = rep.totits;
    rec.maxbasis = rep.maxbasis;
    rec.fallbacks = rep.low_precision_fallbacks;
    rec.status = report_status(rep);

    std::vector<double> x(rep.solution);
    for (int i = 0; i < a.n; ++i) x[i] /= scale.s[i];
    rec.resfinal_unscaled = backward_error(a, x, b);
  } catch (const std::exception& e) {
    rec.status = "error";
    rec.error = e.what();
  }
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

RunRecord run_experiment(const RunConfig& config) {
  SparseSpd a;
  try {
    a = read_matrix_market_file(config.matrix_path);
  } catch (const std::exception& e) {
    RunRecord rec;
    rec.identifier = identifier_from_path(config.matrix_path);
    rec.format = config.format;
    rec.level = config.level;
    rec.solver = to_string(config.solver);
    rec.status = "error";
    rec.error = e.what();
    return rec;
  }
  return run_on_matrix(a, identifier_from_path(config.matrix_path), config);
}

std::vector<RunRecord> run_suite(std::span<const RunConfig> configs, int jobs) {
  std::vector<RunRecord> records(configs.size());
  const std::size_t workers =
      std::min<std::size_t>(std::max(jobs, 1), std::max<std::size_t>(configs.size(), 1));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++)
      records[i] = run_experiment(configs[i]);
  };
  if (workers <= 1) {
    work();
    return records;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  pool.clear();
  return records;
}

std::vector<RunRecord> run_manifest(std::istream& manifest, int jobs) {
  std::vector<RunConfig> configs;
  std::vector<std::optional<RunRecord>> failed;
  std::string line;
  int line_no = 0;
  while (std::getline(manifest, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      configs.push_back(parse_run_config(line));
      failed.emplace_back();
    } catch (const std::exception& e) {
      RunRecord rec;
      rec.identifier = "manifest:" + std::to_string(line_no);
      rec.status = "error";
      rec.error = e.what();
      configs.emplace_back();
      failed.emplace_back(std::move(rec));
    }
  }

  std::vector<RunConfig> runnable;
  for (std::size_t i = 0; i < configs.size(); ++i)
    if (!failed[i]) runnable.push_back(configs[i]);
  std::vector<RunRecord> ran = run_suite(runnable, jobs);

  std::vector<RunRecord> out;
  out.reserve(configs.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < configs.size(); ++i)
    out.push_back(failed[i] ? std::move(*failed[i]) : std::move(ran[k++]));
  return out;
}

// ---- serialization ----

namespace {

using Field = std::variant<std::string RunRecord::*, int RunRecord::*, long long RunRecord::*,
                           double RunRecord::*>;

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"identifier", &RunRecord::identifier},
      {"format", &RunRecord::format},
      {"level", &RunRecord::level},
      {"solver", &RunRecord::solver},
      {"n", &RunRecord::n},
      {"nnz_A", &RunRecord::nnz_A},
      {"normA", &RunRecord::normA},
      {"normb", &RunRecord::normb},
      {"nnz_L", &RunRecord::nnz_L},
      {"alpha", &RunRecord::alpha},
      {"nmod", &RunRecord::nmod},
      {"nscal", &RunRecord::nscal},
      {"nofl", &RunRecord::nofl},
      {"restarts", &RunRecord::restarts},
      {"resinit", &RunRecord::resinit},
      {"resfinal", &RunRecord::resfinal},
      {"resfinal_unscaled", &RunRecord::resfinal_unscaled},
      {"iouter", &RunRecord::iouter},
      {"totits", &RunRecord::totits},
      {"maxbasis", &RunRecord::maxbasis},
      {"fallbacks", &RunRecord::fallbacks},
      {"status", &RunRecord::status},
      {"error", &RunRecord::error},
      {"wall_seconds", &RunRecord::wall_seconds},
  };
  return f;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Splits one CSV record, which may span lines inside quotes.
bool read_csv_record(std::istream& in, std::vector<std::string>& cells) {
  cells.clear();
  std::string cell;
  bool quoted = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          cell += '"';
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cell));
      cell.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cell += c;
    }
  }
  if (!any) return false;
  cells.push_back(std::move(cell));
  return true;
}

template <typename T>
T parse_number(const std::string& text, const std::string& column) {
  std::istringstream s(text);
  T v{};
  if constexpr (std::is_same_v<T, double>) {
    // istream rejects "inf"/"nan"; strtod does not.
    char* end = nullptr;
    v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
      throw std::runtime_error("read_csv: bad number '" + text + "' in " + column);
    return v;
  }
  if (!(s >> v) || !(s >> std::ws).eof())
    throw std::runtime_error("read_csv: bad integer '" + text + "' in " + column);
  return v;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> c;
    for (const auto& [name, field] : fields()) c.push_back(name);
    return c;
  }();
  return cols;
}

void write_csv(std::ostream& out, std::span<const RunRecord> records) {
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const RunRecord& r : records) {
    bool first = true;
    for (const auto& [name, field] : fields()) {
      if (!first) out << ',';
      first = false;
      std::visit(
          [&](auto member) {
            using T = std::decay_t<decltype(r.*member)>;
            if constexpr (std::is_same_v<T, std::string>)
              out << csv_quote(r.*member);
            else if constexpr (std::is_same_v<T, double>)
              out << format_double(r.*member);
            else
              out << r.*member;
          },
          field);
    }
    out << '\n';
  }
}

std::vector<RunRecord> read_csv(std::istream& in) {
  std::vector<std::string> cells;
  if (!read_csv_record(in, cells)) return {};
  if (cells != csv_columns()) throw std::runtime_error("read_csv: unexpected header");
  std::vector<RunRecord> records;
  while (read_csv_record(in, cells)) {
    if (cells.size() == 1 && cells[0].empty()) continue;
    if (cells.size() != fields().size())
      throw std::runtime_error("read_csv: row " + std::to_string(records.size() + 1) +
                               " has " + std::to_string(cells.size()) + " cells");
    RunRecord r;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& [name, field] = fields()[i];
      std::visit(
          [&](auto member) {
            using T = std::decay_t<decltype(r.*member)>;
            if constexpr (std::is_same_v<T, std::string>)
              r.*member = cells[i];
            else
              r.*member = parse_number<T>(cells[i], name);
          },
          field);
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_json(std::ostream& out, std::span<const RunRecord> records) {
  json arr = json::array();
  for (const RunRecord& r : records) {
    json o = json::object();
    for (const auto& [name, field] : fields())
      std::visit([&](auto member) { o[name] = r.*member; }, field);
    arr.push_back(std::move(o));
  }
  out << arr.dump(2) << '\n';
}

std::vector<RunRecord> read_json(std::istream& in) {
  const json arr = json::parse(in);
  if (!arr.is_array()) throw std::runtime_error("read_json: expected an array");
  std::vector<RunRecord> records;
  for (const json& o : arr) {
    RunRecord r;
    for (const auto& [name, field] : fields()) {
      if (!o.contains(name)) throw std::runtime_error("read_json: missing field " + name);
      std::visit(
          [&](auto member) {
            using T = std::decay_t<decltype(r.*member)>;
            r.*member = o.at(name).get<T>();
          },
          field);
    }
    records.push_back(std::move(r));
  }
  return records;
}

void write_summary(std::ostream& out, std::span<const RunRecord> records) {
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %-5s %3s %-12s %8s %9s %5s %5s %9s %9s %6s %6s  %s\n",
                "identifier", "fmt", "l", "solver", "nnz(L)", "alpha", "nmod", "nofl",
                "resinit", "resfinal", "iouter", "totits", "status");
  out << line;
  for (const RunRecord& r : records) {
    std::snprintf(line, sizeof line,
                  "%-24s %-5s %3d %-12s %8lld %9.2e %5d %5d %9.2e %9.2e %6d %6d  %s\n",
                  r.identifier.c_str(), r.format.c_str(), r.level, r.solver.c_str(), r.nnz_L,
                  r.alpha, r.nmod, r.nofl, r.resinit, r.resfinal, r.iouter, r.totits,
                  r.status.c_str());
    out << line;
    if (!r.error.empty()) out << "    error: " << r.error << '\n';
  }
}

}  // namespace halfic
