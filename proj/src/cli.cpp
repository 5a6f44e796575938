#include "randgeo/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "randgeo/errors.hpp"
#include "randgeo/io.hpp"
#include "randgeo/sources.hpp"
#include "randgeo/verify.hpp"

namespace randgeo::cli {

using nlohmann::ordered_json;

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Eval: return "eval";
    case Command::Verify: return "verify";
    case Command::ScanPd: return "scan-pd";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Closed: return "closed";
    case Method::Direct: return "direct";
    case Method::Both: return "both";
  }
  return "?";
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::Metric: return "metric";
    case Quantity::Tensor: return "tensor";
    case Quantity::Both: return "both";
  }
  return "?";
}

std::string_view to_string(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json";
}

GridSpec default_verify_grid(Family family) {
  if (family == Family::Heat) return GridSpec{{-1.0, 1.0, 5}, {0.2, 1.0, 5}};
  return GridSpec{{0.5, 2.0, 3}, {-1.0, 1.0, 3}};
}

namespace {

// A row value that may be absent (not requested, or the point failed).
using Cell = std::optional<double>;

std::string csv_cell(const Cell& v) { return v ? io::format_g17(*v) : std::string(); }

ordered_json json_cell(const Cell& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

QuadratureConfig tolerances_of(const RunConfig& config) {
  QuadratureConfig tol;
  tol.abs_tol = config.abs_tol;
  tol.rel_tol = config.rel_tol;
  return tol;
}

ordered_json config_echo(const RunConfig& config) {
  ordered_json j;
  j["command"] = to_string(config.command);
  j["family"] = to_string(config.family);
  j["source"] = config.source.empty() ? ordered_json(nullptr) : ordered_json(config.source);
  j["grid"] = config.grid ? ordered_json(describe(*config.grid)) : ordered_json(nullptr);
  j["method"] = to_string(config.method);
  j["mode"] = to_string(config.mode);
  j["quantity"] = to_string(config.quantity);
  j["abs_tol"] = config.abs_tol;
  j["rel_tol"] = config.rel_tol;
  j["seed"] = config.seed;
  j["format"] = to_string(config.format);
  return j;
}

// Bad input surfaces as invalid_argument; everything else met while evaluating is numerical.
bool is_numerical(const std::exception& ex) {
  return dynamic_cast<const std::invalid_argument*>(&ex) == nullptr;
}

std::string_view failure_status(const std::exception& ex) {
  if (dynamic_cast<const QuadratureError*>(&ex)) return "quadrature-failure";
  if (dynamic_cast<const DomainError*>(&ex)) return "domain-failure";
  return "evaluation-failure";
}

struct EvalRow {
  ParamPoint theta;
  Method method = Method::Closed;
  std::array<Cell, 7> values{};  // kAllComponents order
  Cell err_estimate;
  std::optional<bool> pd;
  std::string status = "ok";
};

EvalRow make_row(const ParamPoint& theta, Method method) {
  EvalRow row;
  row.theta = theta;
  row.method = method;
  return row;
}

void fill(EvalRow& row, const FisherMatrix& g, const StructureTensor& t, Quantity q) {
  for (std::size_t k = 0; k < kAllComponents.size(); ++k) {
    const Component c = kAllComponents[k];
    const bool wanted = is_metric(c) ? q != Quantity::Tensor : q != Quantity::Metric;
    if (wanted) row.values[k] = component_of(g, t, c);
  }
  if (q != Quantity::Tensor) row.pd = pd_check(g).is_pd;
}

EvalRow eval_closed(const SourceSpec& source, const ParamPoint& theta, const RunConfig& config) {
  EvalRow row = make_row(theta, Method::Closed);
  const QuadratureConfig cfg = default_config(theta.family, source, theta, tolerances_of(config));
  const DerivBundle bundle = field_derivs(source, theta, cfg);
  const LogDerivBundle logs = log_derivs(bundle);
  FisherMatrix g;
  StructureTensor t;
  if (config.quantity != Quantity::Tensor) g = fisher_closed(logs, theta, config.mode);
  if (config.quantity != Quantity::Metric) t = structure_closed(logs, theta, config.mode);
  fill(row, g, t, config.quantity);
  row.err_estimate = bundle.err;
  return row;
}

EvalRow eval_direct(const SourceSpec& source, const ParamPoint& theta, const RunConfig& config) {
  EvalRow row = make_row(theta, Method::Direct);
  const QuadratureConfig cfg = default_config(theta.family, source, theta, tolerances_of(config));
  const DirectMoments m = direct_moments(source, theta, cfg);
  fill(row, m.g, m.t, config.quantity);
  double err = 0.0;
  if (config.quantity != Quantity::Tensor) {
    for (double e : m.metric_err) err = std::max(err, e);
  }
  if (config.quantity != Quantity::Metric) {
    for (double e : m.tensor_err) err = std::max(err, e);
  }
  row.err_estimate = err;
  return row;
}

// Evaluates one method at one point; numerical failures become a marked row.
EvalRow eval_row(const SourceSpec& source, const ParamPoint& theta, Method method,
                 const RunConfig& config, std::ostream& err, bool& failed) {
  try {
    return method == Method::Closed ? eval_closed(source, theta, config)
                                    : eval_direct(source, theta, config);
  } catch (const std::exception& ex) {
    if (!is_numerical(ex)) throw;
    err << "randgeo: " << to_string(method) << " failed at (" << io::format_g17(theta.p1) << ", "
        << io::format_g17(theta.p2) << "): " << ex.what() << "\n";
    failed = true;
    EvalRow row = make_row(theta, method);
    row.status = failure_status(ex);
    return row;
  }
}

void write_eval(const RunConfig& config, const std::vector<EvalRow>& rows, std::ostream& os) {
  if (config.format == OutputFormat::Csv) {
    os << kEvalHeader << "\n";
    for (const EvalRow& r : rows) {
      os << to_string(r.theta.family) << ',' << io::format_g17(r.theta.p1) << ','
         << io::format_g17(r.theta.p2) << ',' << to_string(r.method);
      for (const Cell& v : r.values) os << ',' << csv_cell(v);
      os << ',' << csv_cell(r.err_estimate) << ',' << (r.pd ? (*r.pd ? "1" : "0") : "") << ','
         << r.status << "\n";
    }
    return;
  }
  ordered_json doc;
  doc["config"] = config_echo(config);
  doc["reports"] = ordered_json::array();
  std::size_t failed = 0;
  for (const EvalRow& r : rows) {
    ordered_json j;
    j["family"] = to_string(r.theta.family);
    j["p1"] = r.theta.p1;
    j["p2"] = r.theta.p2;
    j["method"] = to_string(r.method);
    for (std::size_t k = 0; k < kAllComponents.size(); ++k) {
      j[std::string(to_string(kAllComponents[k]))] = json_cell(r.values[k]);
    }
    j["err_estimate"] = json_cell(r.err_estimate);
    j["pd_flag"] = r.pd ? ordered_json(*r.pd) : ordered_json(nullptr);
    j["status"] = r.status;
    if (r.status != "ok") ++failed;
    doc["reports"].push_back(std::move(j));
  }
  doc["summary"] = {{"rows", rows.size()}, {"failed_rows", failed}};
  os << doc.dump(2) << "\n";
}

int cmd_eval(const RunConfig& config, const SourceSpec& source, std::ostream& os,
             std::ostream& err) {
  bool failed = false;
  std::vector<EvalRow> rows;
  for (const ParamPoint& theta : config.grid->points(config.family)) {
    if (config.method != Method::Direct) {
      rows.push_back(eval_row(source, theta, Method::Closed, config, err, failed));
    }
    if (config.method != Method::Closed) {
      rows.push_back(eval_row(source, theta, Method::Direct, config, err, failed));
    }
  }
  write_eval(config, rows, os);
  return failed ? kExitNumerical : kExitOk;
}

struct ScanRow {
  ParamPoint theta;
  FisherMatrix g;
  PdResult pd;
  double err = 0.0;
  std::string status = "ok";
};

int cmd_scan_pd(const RunConfig& config, const SourceSpec& source, std::ostream& os,
                std::ostream& err, std::ostream& summary_stream) {
  bool failed = false;
  std::vector<ScanRow> rows;
  std::size_t non_pd = 0;
  for (const ParamPoint& theta : config.grid->points(config.family)) {
    ScanRow row;
    row.theta = theta;
    try {
      const QuadratureConfig cfg =
          default_config(theta.family, source, theta, tolerances_of(config));
      const FisherDirect fd = fisher_direct(source, theta, cfg);
      row.g = fd.g;
      row.err = fd.err;
      row.pd = pd_check(fd.g);
      if (!row.pd.is_pd) ++non_pd;
    } catch (const std::exception& ex) {
      if (!is_numerical(ex)) throw;
      err << "randgeo: scan failed at (" << io::format_g17(theta.p1) << ", "
          << io::format_g17(theta.p2) << "): " << ex.what() << "\n";
      failed = true;
      row.status = failure_status(ex);
    }
    rows.push_back(row);
  }
  std::size_t n_failed = 0;
  for (const ScanRow& r : rows) n_failed += r.status != "ok";

  if (config.format == OutputFormat::Csv) {
    os << kScanHeader << "\n";
    for (const ScanRow& r : rows) {
      const bool ok = r.status == "ok";
      auto num = [&](double v) { return ok ? io::format_g17(v) : std::string(); };
      os << to_string(r.theta.family) << ',' << io::format_g17(r.theta.p1) << ','
         << io::format_g17(r.theta.p2) << ',' << num(r.g.g11) << ',' << num(r.g.g12) << ','
         << num(r.g.g22) << ',' << num(r.pd.lambda1) << ',' << num(r.pd.lambda2) << ','
         << num(r.err) << ',' << (ok ? (r.pd.is_pd ? "1" : "0") : "") << ',' << r.status
         << "\n";
    }
    summary_stream << "non_pd_points=" << non_pd << " of " << rows.size()
                   << " failed_points=" << n_failed << "\n";
  } else {
    ordered_json doc;
    doc["config"] = config_echo(config);
    doc["reports"] = ordered_json::array();
    for (const ScanRow& r : rows) {
      const bool ok = r.status == "ok";
      auto num = [&](double v) { return ok ? json_number(v) : ordered_json(nullptr); };
      ordered_json j;
      j["family"] = to_string(r.theta.family);
      j["p1"] = r.theta.p1;
      j["p2"] = r.theta.p2;
      j["g11"] = num(r.g.g11);
      j["g12"] = num(r.g.g12);
      j["g22"] = num(r.g.g22);
      j["lambda1"] = num(r.pd.lambda1);
      j["lambda2"] = num(r.pd.lambda2);
      j["err_estimate"] = num(r.err);
      j["pd_flag"] = ok ? ordered_json(r.pd.is_pd) : ordered_json(nullptr);
      j["status"] = r.status;
      doc["reports"].push_back(std::move(j));
    }
    doc["summary"] = {
        {"points", rows.size()}, {"non_pd_points", non_pd}, {"failed_points", n_failed}};
    os << doc.dump(2) << "\n";
  }
  return failed ? kExitNumerical : kExitOk;
}

int cmd_verify(const RunConfig& config, const SourceSpec* source, std::ostream& os) {
  struct Tagged {
    std::string_view suite;
    ResidualReport report;
  };
  std::vector<Tagged> all;
  for (auto& r : run_identity_suite(config.family, config.mode, kIdentityPoints, config.seed)) {
    all.push_back({"identity", std::move(r)});
  }
  if (source != nullptr) {
    for (auto& r : run_consistency_suite(*source, config.family, *config.grid,
                                         tolerances_of(config), config.mode)) {
      all.push_back({"consistency", std::move(r)});
    }
  }

  std::size_t pass = 0, fail = 0, known = 0;
  for (const Tagged& t : all) {
    switch (t.report.verdict) {
      case Verdict::Pass: ++pass; break;
      case Verdict::Fail: ++fail; break;
      case Verdict::KnownDiscrepancy: ++known; break;
    }
  }

  if (config.format == OutputFormat::Csv) {
    os << kVerifyHeader << "\n";
    for (const Tagged& t : all) {
      const ResidualReport& r = t.report;
      os << t.suite << ",\"" << r.id << "\"," << r.n_points << ',' << io::format_g17(r.max_abs)
         << ',' << io::format_g17(r.max_rel) << ',' << io::format_g17(r.argmax.p1) << ','
         << io::format_g17(r.argmax.p2) << ',' << io::format_g17(r.threshold) << ','
         << r.n_exceeding << ',' << r.n_failed << ',' << (r.expected_pass ? 1 : 0) << ','
         << to_string(r.verdict) << "\n";
    }
  } else {
    ordered_json doc;
    doc["config"] = config_echo(config);
    doc["reports"] = ordered_json::array();
    for (const Tagged& t : all) {
      const ResidualReport& r = t.report;
      ordered_json j;
      j["suite"] = t.suite;
      j["id"] = r.id;
      j["n_points"] = r.n_points;
      j["max_abs"] = json_number(r.max_abs);
      j["max_rel"] = json_number(r.max_rel);
      j["argmax"] = {{"p1", r.argmax.p1}, {"p2", r.argmax.p2}};
      j["threshold"] = r.threshold;
      j["n_exceeding"] = r.n_exceeding;
      j["n_failed"] = r.n_failed;
      j["expected_pass"] = r.expected_pass;
      j["verdict"] = to_string(r.verdict);
      doc["reports"].push_back(std::move(j));
    }
    doc["summary"] = {{"reports", all.size()},
                      {"pass", pass},
                      {"fail", fail},
                      {"known_discrepancy", known},
                      {"all_expected_pass", fail == 0}};
    os << doc.dump(2) << "\n";
  }
  return fail == 0 ? kExitOk : kExitSuiteFailed;
}

template <class Enum>
Enum parse_choice(std::string_view key, std::string_view text,
                  std::initializer_list<std::pair<std::string_view, Enum>> choices) {
  for (const auto& [name, value] : choices) {
    if (text == name) return value;
  }
  std::string msg = std::string(key) + ": unknown value '" + std::string(text) + "' (expected";
  for (const auto& [name, value] : choices) msg += " " + std::string(name);
  throw ConfigError(msg + ")");
}

double parse_positive(std::string_view key, std::string_view text) {
  double v = 0.0;
  try {
    v = io::parse_double(text);
  } catch (const std::invalid_argument&) {
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(text) + "'");
  }
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be positive");
  return v;
}

// Flat key=value lines; blank lines and lines starting with '#' or ';' are skipped.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view text = io::trim(line);
    if (text.empty() || text.front() == '#' || text.front() == ';') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key(io::trim(text.substr(0, eq)));
    std::string value(io::trim(text.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    std::replace(key.begin(), key.end(), '-', '_');
    entries.emplace_back(std::move(key), std::move(value));
  }
  return entries;
}

}  // namespace

int run(const RunConfig& requested, std::ostream& out, std::ostream& err) {
  RunConfig config = requested;
  if (config.command == Command::Verify && !config.source.empty() && !config.grid) {
    config.grid = default_verify_grid(config.family);
  }
  std::optional<SourceSpec> source;
  try {
    if (!config.source.empty()) source = parse_source(config.source);
    if (config.command != Command::Verify) {
      if (!source) throw ConfigError("--source is required for " + std::string(to_string(config.command)));
      if (!config.grid) throw ConfigError("--grid is required for " + std::string(to_string(config.command)));
    }
    if (config.grid) validate(*config.grid, config.family);
    randgeo::validate(tolerances_of(config));
  } catch (const std::invalid_argument& ex) {
    err << "randgeo: " << ex.what() << "\n";
    return kExitConfig;
  }

  std::ofstream file;
  if (!config.out.empty()) {
    file.open(config.out, std::ios::binary | std::ios::trunc);
    if (!file) {
      err << "randgeo: cannot open output file '" << config.out << "'\n";
      return kExitConfig;
    }
  }
  std::ostream& os = config.out.empty() ? out : file;
  // The scan summary line rides alongside CSV data, so it goes wherever the data is not.
  std::ostream& summary = config.out.empty() ? err : out;

  try {
    switch (config.command) {
      case Command::Eval: return cmd_eval(config, *source, os, err);
      case Command::ScanPd: return cmd_scan_pd(config, *source, os, err, summary);
      case Command::Verify: return cmd_verify(config, source ? &*source : nullptr, os);
    }
  } catch (const std::invalid_argument& ex) {
    err << "randgeo: " << ex.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& ex) {
    err << "randgeo: " << ex.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fisher metric and structure tensor of randomized heat and Poisson kernel families",
               "randgeo"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string family = "heat", source, grid, method = "closed", mode = "printed",
              quantity = "both", abs_tol = "1e-10", rel_tol = "1e-9", seed = "42", out_path,
              format = "csv";
  app.add_option("--family", family, "heat | laplace");
  app.add_option("--source", source, "Source descriptor, e.g. gaussian:mu=0,sigma=1");
  app.add_option("--grid", grid, "p1=lo:hi:count,p2=lo:hi:count");
  app.add_option("--method", method, "closed | direct | both");
  app.add_option("--mode", mode, "printed | corrected");
  app.add_option("--quantity", quantity, "metric | tensor | both");
  app.add_option("--abs-tol,--abs_tol", abs_tol, "Absolute quadrature tolerance");
  app.add_option("--rel-tol,--rel_tol", rel_tol, "Relative quadrature tolerance");
  app.add_option("--seed", seed, "Seed of the identity-suite sampler");
  app.add_option("--out", out_path, "Output path (default: standard output)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--config", config_path, "Flat key=value file; command-line flags take precedence");

  // Config-file keys mirror RunConfig field names.
  const std::vector<std::pair<std::string_view, std::string*>> keyed{
      {"family", &family}, {"source", &source},     {"grid", &grid},     {"method", &method},
      {"mode", &mode},     {"quantity", &quantity}, {"abs_tol", &abs_tol}, {"rel_tol", &rel_tol},
      {"seed", &seed},     {"out", &out_path},      {"format", &format}};

  auto* eval = app.add_subcommand("eval", "Metric and tensor over a grid");
  auto* verify = app.add_subcommand("verify", "Identity and consistency suites");
  auto* scan = app.add_subcommand("scan-pd", "Positive-definiteness scan of the direct metric");
  for (auto* sub : {eval, verify, scan}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    std::ostringstream o, e;
    const int code = app.exit(ex, o, e);
    out << o.str();
    err << e.str();
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) {
      for (const auto& [key, value] : read_config_file(config_path)) {
        const auto it = std::find_if(keyed.begin(), keyed.end(),
                                     [&](const auto& kv) { return kv.first == key; });
        if (it == keyed.end()) throw ConfigError(config_path + ": unknown key '" + key + "'");
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        if (app.count(flag) == 0) *it->second = value;
      }
    }
    config.command = eval->parsed() ? Command::Eval
                     : verify->parsed() ? Command::Verify
                                        : Command::ScanPd;
    config.family =
        parse_choice<Family>("family", family, {{"heat", Family::Heat}, {"laplace", Family::Laplace}});
    config.source = source;
    if (!grid.empty()) config.grid = parse_grid(grid);
    config.method = parse_choice<Method>(
        "method", method,
        {{"closed", Method::Closed}, {"direct", Method::Direct}, {"both", Method::Both}});
    config.mode = parse_choice<FormulaMode>(
        "mode", mode, {{"printed", FormulaMode::Printed}, {"corrected", FormulaMode::Corrected}});
    config.quantity = parse_choice<Quantity>(
        "quantity", quantity,
        {{"metric", Quantity::Metric}, {"tensor", Quantity::Tensor}, {"both", Quantity::Both}});
    config.abs_tol = parse_positive("abs_tol", abs_tol);
    config.rel_tol = parse_positive("rel_tol", rel_tol);
    long long s = 0;
    try {
      s = io::parse_integer(seed);
    } catch (const std::invalid_argument&) {
      throw ConfigError("seed: not an integer: '" + seed + "'");
    }
    if (s < 0) throw ConfigError("seed must be non-negative");
    config.seed = static_cast<std::uint64_t>(s);
    config.out = out_path;
    config.format = parse_choice<OutputFormat>(
        "format", format, {{"csv", OutputFormat::Csv}, {"json", OutputFormat::Json}});
  } catch (const std::invalid_argument& ex) {
    err << "randgeo: " << ex.what() << "\n";
    return kExitConfig;
  }
  return run(config, out, err);
}

}  // namespace randgeo::cli
