#include "kantolab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "kantolab/analysis.hpp"
#include "kantolab/corpus.hpp"
#include "kantolab/errors.hpp"
#include "kantolab/format.hpp"
#include "kantolab/kernels.hpp"
#include "kantolab/operators.hpp"
#include "kantolab/orlicz.hpp"

namespace kantolab {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "phi",   "kernel", "fn",     "ns",     "n",          "deltas",     "hs",     "lambda", "lambda_grid",
      "kind",  "mode",   "which",  "t",      "p",          "cutoffs",    "log_cutoffs", "nu", "mu",
      "tol",   "max_spread", "output", "dump", "points", "threads", "seed"};
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "function") key = "fn";
  if (key == "o") key = "output";
  return key;
}

void set_key(std::map<std::string, std::string>& raw, const std::string& key_in, const std::string& value) {
  const std::string key = normalize_key(key_in);
  if (!known_keys().count(key)) throw UsageError("unknown key '" + key_in + "'");
  raw[key] = value;
}

void read_config_file(const std::string& path, std::map<std::string, std::string>& raw) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    set_key(raw, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

int to_int(double v, const std::string& what) {
  if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError(what + ": expected an integer");
  return static_cast<int>(v);
}

std::filesystem::path csv_path(const RunConfig& cfg) {
  if (!cfg.output_path.empty()) return cfg.output_path;
  if (const char* dir = std::getenv("KANTOLAB_OUTPUT_DIR"); dir && *dir)
    return std::filesystem::path(dir) / (cfg.command + ".csv");
  return {};
}

// Writes the CSV (when a destination is configured) and the summary file next to it.
class Artifacts {
 public:
  explicit Artifacts(const RunConfig& cfg) : cfg_(cfg), path_(csv_path(cfg)) {}

  std::ostringstream& csv() { return csv_; }
  std::ostringstream& summary() { return summary_; }

  void flush(std::ostream& out, bool echo_summary) {
    std::ostringstream head;
    head << "# kantolab " << cfg_.command << "\n";
    for (const auto& [k, v] : cfg_.raw) head << "# " << k << " = " << v << "\n";
    const std::string text = head.str() + summary_.str();
    if (echo_summary) out << text;
    if (path_.empty()) return;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    write(path_, csv_.str());
    auto sp = path_;
    sp.replace_extension(".summary.txt");
    write(sp, text);
  }

 private:
  static void write(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  }

  const RunConfig& cfg_;
  std::filesystem::path path_;
  std::ostringstream csv_;
  std::ostringstream summary_;
};

void need(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

std::vector<double> default_deltas() { return parse_real_list("0.125:0.001953125:/2"); }

int cmd_moments(const RunConfig& cfg, std::ostream& out) {
  const auto kernel = make_kernel(cfg.kernel);
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  MomentValue m;
  std::string what = "M_nu";
  if (cfg.mu) {
    m = hybrid_moment(kernel, parse_phi(cfg.phi), cfg.nu, *cfg.mu);
    what = "M^phi_{nu,mu}";
  } else {
    m = moment(kernel, cfg.nu);
  }
  csv.header({"kernel", "quantity", "nu", "mu", "value", "truncation", "argmax"});
  csv.row({kernel.id(), what, format_double(cfg.nu), cfg.mu ? format_double(*cfg.mu) : "", format_double(m.value),
           std::to_string(m.truncation), format_double(m.argmax)});
  art.summary() << what << " = " << format_double(m.value) << "\n";
  if (!cfg.dump_path.empty()) {
    std::vector<double> xs;
    const double r = kernel.compact() ? kernel.upsilon() + 0.5 : 10.0;
    for (int i = 0; i < cfg.points; ++i) xs.push_back(-r + 2.0 * r * i / std::max(1, cfg.points - 1));
    std::ofstream d(cfg.dump_path, std::ios::binary);
    dump_kernel(kernel, xs, d);
  }
  out << format_double(m.value) << "\n";
  art.flush(out, false);
  return kExitPass;
}

int cmd_norm(const RunConfig& cfg, std::ostream& out) {
  need(!cfg.function.empty(), "norm needs --fn");
  const auto phi = parse_phi(cfg.phi);
  const auto f = parse_corpus(cfg.function);
  const double lambda = cfg.lambda.value_or(1.0);
  const double nrm = luxemburg_norm(phi, f);
  const auto mod = modular(phi, f, lambda);
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  csv.header({"fn", "phi", "quantity", "lambda", "value"});
  csv.row({f.name(), phi.id(), "luxemburg", "", format_double(nrm)});
  csv.row({f.name(), phi.id(), "modular", format_double(lambda), mod.infinite ? "inf" : format_double(mod.value)});
  art.summary() << "luxemburg = " << format_double(nrm) << "\n"
                << "modular(lambda=" << format_double(lambda) << ") = " << (mod.infinite ? "inf" : format_double(mod.value))
                << "\n";
  art.flush(out, true);
  return kExitPass;
}

int cmd_curve(const RunConfig& cfg, std::ostream& out, bool fit) {
  need(!cfg.function.empty(), cfg.command + " needs --fn");
  need(!cfg.ns.empty(), cfg.command + " needs --ns");
  const auto phi = parse_phi(cfg.phi);
  const auto kernel = make_kernel(cfg.kernel);
  const auto f = parse_corpus(cfg.function);
  const auto c = error_curve(f, phi, kernel, cfg.ns, cfg.lambda.value_or(1.0), cfg.threads);
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  csv.header({"n", "error_kind", "value", "lambda"});
  for (std::size_t i = 0; i < c.ns.size(); ++i) {
    const auto& m = c.modular_errors[i];
    csv.row({std::to_string(c.ns[i]), "luxemburg", format_double(c.lux_errors[i]), ""});
    csv.row({std::to_string(c.ns[i]), "modular", m.infinite ? "inf" : format_double(m.value), format_double(c.lambda)});
  }
  auto& s = art.summary();
  s << "n,luxemburg,modular\n";
  for (std::size_t i = 0; i < c.ns.size(); ++i)
    s << c.ns[i] << "," << format_double(c.lux_errors[i]) << ","
      << (c.modular_errors[i].infinite ? "inf" : format_double(c.modular_errors[i].value)) << "\n";
  if (fit) {
    const auto r = rate_fit(c);
    s << "slope = " << format_double(r.slope) << "\nintercept = " << format_double(r.intercept)
      << "\nr2 = " << format_double(r.r2) << "\nused = " << r.used << "\n";
  }
  if (!cfg.dump_path.empty()) {
    const KantorovichOperator op(kernel, f, cfg.ns.back());
    std::vector<double> xs;
    for (int i = 0; i < cfg.points; ++i) xs.push_back(f.a() + f.period() * i / std::max(1, cfg.points - 1));
    std::ofstream d(cfg.dump_path, std::ios::binary);
    dump_operator(op, f, xs, d);
  }
  art.flush(out, true);
  return kExitPass;
}

int cmd_bounds(const RunConfig& cfg, std::ostream& out) {
  need(!cfg.kind.empty(), "bounds needs --kind");
  need(!cfg.function.empty(), "bounds needs --fn");
  BoundRequest req;
  req.kind = cfg.kind;
  req.f = parse_corpus(cfg.function);
  req.phi = parse_phi(cfg.phi);
  req.kernel = make_kernel(cfg.kernel);
  req.ns = cfg.ns;
  req.hs = cfg.hs;
  req.lambda = cfg.lambda;
  req.tol = cfg.tol;
  req.max_spread = cfg.max_spread;
  req.threads = cfg.threads;
  if (req.kind != "steklov_direct" && req.kind != "minkowski" && req.kind != "weak_minkowski")
    need(!req.ns.empty(), "bounds --kind " + req.kind + " needs --n or --ns");
  const auto reports = verify_bound(req);
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  csv.header({"kind", "form", "lhs", "rhs", "ratio", "pass", "tol", "params"});
  for (const auto& r : reports)
    csv.row({r.kind, r.form, format_double(r.lhs), format_double(r.rhs), format_double(r.ratio),
             r.pass ? "true" : "false", format_double(r.tol), r.params});
  const bool ok = all_pass(reports);
  art.summary() << reports.size() << " rows, " << (ok ? "all pass" : "FAILURES") << "\n";
  for (const auto& r : reports)
    if (!r.pass) art.summary() << "fail: " << r.form << " ratio=" << format_double(r.ratio) << " " << r.params << "\n";
  art.flush(out, true);
  return ok ? kExitPass : kExitBoundFailure;
}

int cmd_lipschitz(const RunConfig& cfg, std::ostream& out) {
  need(!cfg.function.empty(), "lipschitz needs --fn");
  need(cfg.mode == "strong" || cfg.mode == "weak", "--mode must be strong or weak");
  const auto phi = parse_phi(cfg.phi);
  const auto f = parse_corpus(cfg.function);
  const auto deltas = cfg.deltas.empty() ? default_deltas() : cfg.deltas;
  std::vector<double> grid = cfg.lambda_grid;
  if (grid.empty() && cfg.lambda) grid = {*cfg.lambda};
  const auto fit = lipschitz_fit(f, phi, cfg.mode == "weak", deltas, grid);
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  csv.header({"delta", "modulus", "mode", "lambda"});
  for (std::size_t i = 0; i < fit.deltas.size(); ++i)
    csv.row({format_double(fit.deltas[i]), format_double(fit.moduli[i]), cfg.mode,
             cfg.mode == "weak" ? format_double(fit.lambda) : ""});
  art.summary() << "nu_hat = " << format_double(fit.nu_hat) << "\nr2 = " << format_double(fit.r2)
                << (fit.degenerate ? "\ndegenerate = true" : "") << "\n";
  art.flush(out, true);
  return kExitPass;
}

int cmd_inverse(const RunConfig& cfg, std::ostream& out) {
  need(!cfg.function.empty(), "inverse needs --fn");
  const auto phi = parse_phi(cfg.phi);
  const auto kernel = make_kernel(cfg.kernel);
  const auto f = parse_corpus(cfg.function);
  const auto ns = cfg.ns.empty() ? parse_int_list("8:512:x2") : cfg.ns;
  const auto deltas = cfg.deltas.empty() ? default_deltas() : cfg.deltas;
  const auto rep = inverse_consistency(f, phi, kernel, ns, deltas, cfg.threads);
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  csv.header({"quantity", "value"});
  csv.row({"error_slope", format_double(rep.error_fit.slope)});
  csv.row({"error_r2", format_double(rep.error_fit.r2)});
  csv.row({"nu_hat", format_double(rep.modulus_fit.nu_hat)});
  csv.row({"modulus_r2", format_double(rep.modulus_fit.r2)});
  csv.row({"gap", format_double(rep.gap)});
  csv.row({"pass", rep.pass ? "true" : "false"});
  csv.row({"boundary", rep.boundary ? "true" : "false"});
  csv.row({"degenerate", rep.degenerate ? "true" : "false"});
  art.summary() << "error slope = " << format_double(rep.error_fit.slope) << "\nnu_hat = "
                << format_double(rep.modulus_fit.nu_hat) << "\ngap = " << format_double(rep.gap)
                << "\npass = " << (rep.pass ? "true" : "false") << "\n";
  if (!rep.note.empty()) art.summary() << "note: " << rep.note << "\n";
  art.flush(out, true);
  return rep.pass ? kExitPass : kExitBoundFailure;
}

int cmd_examples(const RunConfig& cfg, std::ostream& out) {
  need(cfg.which == "inclusion" || cfg.which == "sobolev", "--which must be inclusion or sobolev");
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  bool ok = true;
  std::vector<Cutoff> cutoffs;
  for (double l : cfg.log_cutoffs) cutoffs.push_back(Cutoff::from_log(l));
  if (cfg.which == "inclusion") {
    if (cutoffs.empty())
      for (double l : {1e2, 1e3, 1e4}) cutoffs.push_back(Cutoff::from_log(l));
    const auto ts = cfg.ts.empty() ? std::vector<double>{0.1, 0.25, 0.4} : cfg.ts;
    csv.header({"t", "quantity", "log_inv_eps", "quadrature", "closed_form", "abs_diff"});
    for (double t : ts) {
      const auto r = inclusion_example(t, cutoffs);
      const double d1 = std::abs(r.t1_quadrature - r.t1_closed), d2 = std::abs(r.t2_quadrature - r.t2_closed);
      ok = ok && d1 < 1e-6 && d2 < 1e-6;
      csv.row({format_double(t), "T1", "", format_double(r.t1_quadrature), format_double(r.t1_closed), format_double(d1)});
      csv.row({format_double(t), "T2", "", format_double(r.t2_quadrature), format_double(r.t2_closed), format_double(d2)});
      for (std::size_t i = 0; i < cutoffs.size(); ++i) {
        csv.row({format_double(t), "lambda2", format_double(cutoffs[i].log_inv), format_double(r.lambda2_trend[i]),
                 format_double(r.lambda2_closed[i]), format_double(std::abs(r.lambda2_trend[i] - r.lambda2_closed[i]))});
        if (i > 0) ok = ok && r.lambda2_trend[i] > r.lambda2_trend[i - 1];
      }
      art.summary() << "t = " << format_double(t) << ": |T1 diff| = " << format_double(d1)
                    << ", |T2 diff| = " << format_double(d2) << ", lambda=2 last = "
                    << format_double(r.lambda2_trend.empty() ? 0.0 : r.lambda2_trend.back()) << "\n";
    }
  } else {
    if (cutoffs.empty())
      for (double l : {5.0, 11.0, 21.0, 101.0}) cutoffs.push_back(Cutoff::from_log(std::exp(l)));
    const auto r = sobolev_counterexample(cfg.p, cutoffs);
    csv.header({"log_inv_eps", "modular", "lp_power", "lp_closed"});
    for (std::size_t i = 0; i < cutoffs.size(); ++i)
      csv.row({format_double(cutoffs[i].log_inv), format_double(r.modular[i]), format_double(r.lp_power[i]),
               format_double(r.lp_closed[i])});
    ok = r.modular_stable && r.lp_unbounded;
    art.summary() << "last modular change = " << format_double(r.last_change) << "\nmodular stable = "
                  << (r.modular_stable ? "true" : "false") << "\nlp unbounded = " << (r.lp_unbounded ? "true" : "false")
                  << "\n";
  }
  art.flush(out, true);
  return ok ? kExitPass : kExitBoundFailure;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const auto phi = parse_phi(cfg.phi);
  const auto kernel = make_kernel(cfg.kernel);
  const auto cond = probe_conditions(phi, std::nullopt, cfg.seed);
  std::vector<double> grid;
  for (int i = 0; i < 1000; ++i) grid.push_back(i / 999.0);
  Artifacts art(cfg);
  CsvWriter csv(art.csv());
  csv.header({"subject", "quantity", "value", "label"});
  auto verdict = [&](const std::string& q, const ConditionVerdict& v) {
    csv.row({phi.id(), q, v.holds ? "true" : "false", cond.label});
    csv.row({phi.id(), q + "_observed", format_double(v.observed), cond.label});
  };
  csv.row({phi.id(), "axioms", cond.axioms ? "true" : "false", cond.label});
  csv.row({phi.id(), "convex", cond.convex ? "true" : "false", cond.label});
  verdict("delta2", cond.delta2);
  verdict("delta_prime", cond.delta_prime);
  verdict("n_function", cond.n_function);
  verdict("beta_monotone", cond.beta_monotone);
  csv.row({phi.id(), "beta", format_double(cond.beta), cond.label});
  csv.row({kernel.id(), "phi_at_2", format_double(kernel.phi_at_2), ""});
  csv.row({kernel.id(), "support", kernel.compact() ? "compact" : "decay", ""});
  if (kernel.compact()) csv.row({kernel.id(), "upsilon", format_double(kernel.upsilon()), ""});
  csv.row({kernel.id(), "partition_defect", format_double(partition_defect(kernel, grid)), ""});
  csv.row({kernel.id(), "M0", format_double(moment(kernel, 0.0).value), ""});
  std::string m1;
  try {
    m1 = format_double(moment(kernel, 1.0).value);
  } catch (const PotentiallyInfinite&) {
    m1 = "inf";
  }
  csv.row({kernel.id(), "M1", m1, ""});
  art.summary() << "phi " << phi.id() << ": delta2=" << cond.delta2.holds << " delta'=" << cond.delta_prime.holds
                << " N=" << cond.n_function.holds << " beta-monotone=" << cond.beta_monotone.holds << " (probe)\n"
                << "kernel " << kernel.id() << ": phi(2)=" << format_double(kernel.phi_at_2) << " M1=" << m1 << "\n";
  art.flush(out, true);
  return kExitPass;
}

}  // namespace

std::vector<std::string> commands() {
  return {"moments", "norm", "approx", "rates", "bounds", "lipschitz", "inverse", "examples", "report"};
}

double parse_real(const std::string& text_in) {
  const std::string text = trim(text_in);
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || text.empty()) throw UsageError("malformed number '" + text_in + "'");
  return v;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(trim(p));
    if (parts.size() != 3 || parts[2].empty()) throw UsageError("range must be start:stop:xK, /K or +K");
    const double start = parse_real(parts[0]), stop = parse_real(parts[1]);
    const char op = parts[2][0];
    const double step = parse_real(parts[2].substr(1));
    const double slack = 1e-9 * std::max(std::abs(start), std::abs(stop));
    if (op == 'x' && step > 1.0 && start > 0.0) {
      for (double v = start; v <= stop + slack; v *= step) out.push_back(v);
    } else if (op == '/' && step > 1.0 && start > 0.0) {
      for (double v = start; v >= stop - slack; v /= step) out.push_back(v);
    } else if (op == '+' && step > 0.0) {
      for (int i = 0; start + i * step <= stop + slack; ++i) out.push_back(start + i * step);
    } else {
      throw UsageError("bad range step '" + parts[2] + "'");
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_real(p));
  }
  if (out.empty()) throw UsageError("empty list '" + text + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  // geometric ranges like 8:100:x1.5 round to the nearest integer; explicit values must be integers
  const bool range = text.find(':') != std::string::npos;
  for (double v : parse_real_list(text)) out.push_back(to_int(range ? std::round(v) : v, text));
  return out;
}

RunConfig parse_config(std::span<const std::string> args) {
  RunConfig cfg;
  if (args.empty()) throw UsageError("missing command; one of moments, norm, approx, rates, bounds, lipschitz, inverse, examples, report");
  cfg.command = args[0];
  const auto cmds = commands();
  if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end())
    throw UsageError("unknown command '" + cfg.command + "'");

  std::map<std::string, std::string> flags;
  std::string config_file;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0) throw UsageError("unexpected argument '" + a + "'");
    std::string key = a.substr(2), value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key.erase(eq);
    } else {
      if (i + 1 >= args.size()) throw UsageError("flag '" + a + "' needs a value");
      value = args[++i];
    }
    if (key == "config") {
      config_file = value;
      continue;
    }
    set_key(flags, key, value);
  }
  if (!config_file.empty()) read_config_file(config_file, cfg.raw);
  for (const auto& [k, v] : flags) cfg.raw[k] = v;
  if (cfg.raw.count("n") && cfg.raw.count("ns")) throw UsageError("give either n or ns, not both");

  for (const auto& [k, v] : cfg.raw) {
    if (k == "phi") cfg.phi = v;
    else if (k == "kernel") cfg.kernel = v;
    else if (k == "fn") cfg.function = v;
    else if (k == "ns" || k == "n") cfg.ns = parse_int_list(v);
    else if (k == "deltas") cfg.deltas = parse_real_list(v);
    else if (k == "hs") cfg.hs = parse_real_list(v);
    else if (k == "lambda") cfg.lambda = parse_real(v);
    else if (k == "lambda_grid") cfg.lambda_grid = parse_real_list(v);
    else if (k == "kind") cfg.kind = v;
    else if (k == "mode") cfg.mode = v;
    else if (k == "which") cfg.which = v;
    else if (k == "t") cfg.ts = parse_real_list(v);
    else if (k == "p") cfg.p = parse_real(v);
    else if (k == "cutoffs") {
      for (double e : parse_real_list(v)) {
        if (!(e > 0.0 && e < 1.0)) throw UsageError("cutoffs must lie in (0, 1)");
        cfg.log_cutoffs.push_back(-std::log(e));
      }
    } else if (k == "log_cutoffs") {
      for (double l : parse_real_list(v)) cfg.log_cutoffs.push_back(l);
    } else if (k == "nu") cfg.nu = parse_real(v);
    else if (k == "mu") cfg.mu = parse_real(v);
    else if (k == "tol") cfg.tol = parse_real(v);
    else if (k == "max_spread") cfg.max_spread = parse_real(v);
    else if (k == "output") cfg.output_path = v;
    else if (k == "dump") cfg.dump_path = v;
    else if (k == "points") cfg.points = to_int(parse_real(v), "points");
    else if (k == "threads") cfg.threads = to_int(parse_real(v), "threads");
    else if (k == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(parse_real(v), "seed"));
  }
  if (cfg.raw.count("cutoffs") && cfg.raw.count("log_cutoffs")) throw UsageError("give either cutoffs or log_cutoffs");
  for (std::size_t i = 1; i < cfg.ns.size(); ++i)
    if (cfg.ns[i] <= cfg.ns[i - 1]) throw UsageError("ns must be strictly increasing");
  for (int n : cfg.ns)
    if (n < 1) throw UsageError("ns must be positive");
  if (cfg.threads < 1) throw UsageError("threads must be >= 1");
  if (cfg.points < 2) throw UsageError("points must be >= 2");
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const std::string& c = cfg.command;
  if (c == "moments") return cmd_moments(cfg, out);
  if (c == "norm") return cmd_norm(cfg, out);
  if (c == "approx") return cmd_curve(cfg, out, false);
  if (c == "rates") return cmd_curve(cfg, out, true);
  if (c == "bounds") return cmd_bounds(cfg, out);
  if (c == "lipschitz") return cmd_lipschitz(cfg, out);
  if (c == "inverse") return cmd_inverse(cfg, out);
  if (c == "examples") return cmd_examples(cfg, out);
  if (c == "report") return cmd_report(cfg, out);
  throw UsageError("unknown command '" + c + "'");
}

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  try {
    return run(parse_config(args), out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const HypothesisNotMet& e) {
    err << "hypothesis not met: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NotInOrliczSpace& e) {
    err << "hypothesis not met: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NotInWeakClass& e) {
    err << "hypothesis not met: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace kantolab
