// Acceptance runner: one PASS/FAIL line per criterion.
//   acceptance          run all
//   acceptance 4 7      run the listed criteria
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kantolab/analysis.hpp"
#include "kantolab/cli.hpp"
#include "kantolab/corpus.hpp"
#include "kantolab/errors.hpp"
#include "kantolab/format.hpp"
#include "kantolab/kernels.hpp"
#include "kantolab/operators.hpp"
#include "kantolab/orlicz.hpp"

using namespace kantolab;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(3);
  s << x;
  return s.str();
}

std::vector<double> unit_grid(int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(i / static_cast<double>(n - 1));
  return g;
}

std::vector<int> ns_4_512() { return parse_int_list("4:512:x2"); }

// Independent ramp density: sigma_r(x) = clamp((x + 3/2)/3, 0, 1).
double ramp_density(double x) {
  auto s = [](double t) { return std::clamp((t + 1.5) / 3.0, 0.0, 1.0); };
  return 0.5 * (s(x + 1.0) - s(x - 1.0));
}

void c1(Outcome& o) {
  const auto grid = unit_grid(1000);
  const double ramp = partition_defect(make_kernel("ramp"), grid);
  const double logistic = partition_defect(make_kernel("logistic"), grid);
  o.detail << "ramp defect " << fmt(ramp) << ", logistic defect " << fmt(logistic);
  o.check(ramp < 1e-12, "ramp defect >= 1e-12");
  o.check(logistic < 1e-8, "logistic defect >= 1e-8");
}

void c2(Outcome& o) {
  double worst = 0.0;
  for (const auto& name : kernel_catalog()) worst = std::max(worst, std::abs(moment(make_kernel(name), 0.0).value - 1.0));
  o.check(worst < 1e-8, "M0 != 1");

  double brute = 0.0;
  const int U = 100000;
  for (int i = 0; i <= U; ++i) {
    const double u = i / static_cast<double>(U);
    double s = 0.0;
    for (int k = -4; k <= 4; ++k) s += ramp_density(u - k) * std::abs(u - k);
    brute = std::max(brute, s);
  }
  const auto ramp = make_kernel("ramp");
  const double m1 = moment(ramp, 1.0).value;
  o.check(std::abs(m1 - brute) < 1e-6, "M1(ramp) vs brute force");

  const auto identity = make_phi("power", {{"p", 1.0}});
  double hyb = 0.0;
  for (const auto& name : kernel_catalog()) {
    const auto k = make_kernel(name);
    hyb = std::max(hyb, std::abs(hybrid_moment(k, identity, 0.0, 1.0).value - moment(k, 1.0).value));
  }
  o.check(hyb < 1e-10, "hybrid M^u_{0,1} != M1");
  o.detail << "max |M0-1| " << fmt(worst) << ", M1(ramp) " << m1 << " vs brute " << brute << ", max |M^u_{0,1}-M1| "
           << fmt(hyb);
}

void c3(Outcome& o) {
  const auto one = make_corpus("const");
  double worst = 0.0;
  for (const auto& name : kernel_catalog()) {
    const auto k = make_kernel(name);
    for (int n : {5, 20, 100}) {
      const KantorovichOperator op(k, one, n);
      for (double x : unit_grid(100)) worst = std::max(worst, std::abs(op(x) - 1.0));
    }
  }
  o.detail << "max |K_n 1 - 1| " << fmt(worst);
  o.check(worst <= 1e-12, "constant not reproduced");
}

BoundRequest request(const std::string& kind, const std::string& f, const std::string& phi, const std::string& kernel,
                     std::vector<int> ns) {
  BoundRequest r;
  r.kind = kind;
  r.f = parse_corpus(f);
  r.phi = parse_phi(phi);
  r.kernel = make_kernel(kernel);
  r.ns = std::move(ns);
  return r;
}

void c4(Outcome& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = verify_bound(request("compact_direct", "sin", "power:p=2", "ramp", ns_4_512()));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (const auto& r : rows) worst = std::max(worst, r.ratio);
  o.detail << rows.size() << " n values, max lhs/rhs " << fmt(worst) << ", " << fmt(secs) << " s";
  o.check(all_pass(rows), "bound violated");
  o.check(secs < 60.0, "runtime >= 60 s");
}

void c5(Outcome& o) {
  const auto c = error_curve(parse_corpus("sin"), parse_phi("power:p=2"), make_kernel("ramp"), ns_4_512());
  const auto fit = rate_fit(c);
  o.detail << "slope " << fmt(fit.slope) << ", r2 " << fit.r2;
  o.check(fit.slope >= -1.1 && fit.slope <= -0.9, "slope outside [-1.1, -0.9]");
  o.check(fit.r2 >= 0.98, "r2 < 0.98");
}

void c6(Outcome& o) {
  const auto deltas = parse_real_list("0.125:0.001953125:/2");
  const auto rep = inverse_consistency(parse_corpus("abs_pow:nu=0.5"), parse_phi("power:p=2"), make_kernel("logistic"),
                                       parse_int_list("8:512:x2"), deltas);
  o.detail << "error slope " << fmt(rep.error_fit.slope) << ", omega slope " << fmt(rep.modulus_fit.nu_hat) << ", gap "
           << fmt(rep.gap);
  o.check(rep.error_fit.slope >= -0.6 && rep.error_fit.slope <= -0.4, "error slope outside [-0.6, -0.4]");
  o.check(rep.modulus_fit.nu_hat >= 0.4 && rep.modulus_fit.nu_hat <= 0.6, "omega slope outside [0.4, 0.6]");
  o.check(rep.gap <= 0.15, "exponents differ by more than 0.15");
}

void c7(Outcome& o) {
  int cases = 0;
  double worst = 0.0;
  for (const auto& f : corpus_catalog())
    for (const auto& k : kernel_catalog())
      for (const std::string phi : {"power:p=2", "zygmund:beta=2,gamma=1"}) {
        auto req = request("operator_norm", f, phi, k, {8, 64});
        const auto rows = verify_bound(req);
        for (const auto& r : rows) {
          worst = std::max(worst, r.ratio);
          if (!r.pass) o.check(false, r.form + " " + r.params);
        }
        ++cases;
      }
  o.detail << cases << " (f, kernel, phi) cases, max ratio " << fmt(worst);
}

void c8(Outcome& o) {
  const auto rows = verify_bound(request("bernstein", "step", "power:p=2", "logistic", parse_int_list("8:256:x2")));
  const auto& spread = rows.back();
  o.detail << "max/min of ||K_n' f|| / (n ||f||) = " << fmt(spread.lhs / (spread.rhs / 4.0));
  o.check(spread.pass, "max/min > 4");
}

void c9(Outcome& o) {
  double worst = 0.0;
  for (const std::string f : {"sin", "step", "abs_pow:nu=0.5"}) {
    auto req = request("steklov_direct", f, "power:p=2", "ramp", {});
    req.hs = {0.2, 0.1, 0.05};
    for (const auto& r : verify_bound(req)) {
      worst = std::max(worst, r.ratio);
      if (!r.pass) o.check(false, r.form + " " + r.params);
    }
  }
  o.detail << "max lhs/rhs over (i) and (ii) " << fmt(worst);
}

void c10(Outcome& o) {
  std::vector<Cutoff> cut;
  for (double l : {1e2, 1e3, 1e4}) cut.push_back(Cutoff::from_log(l));
  double diff = 0.0;
  for (double t : {0.1, 0.25, 0.4}) {
    const auto r = inclusion_example(t, cut);
    diff = std::max({diff, std::abs(r.t1_quadrature - r.t1_closed), std::abs(r.t2_quadrature - r.t2_closed)});
  }
  o.check(diff < 1e-6, "T1/T2 mismatch");
  std::vector<double> q;
  for (double t : {0.4, 0.2, 0.1, 0.05}) q.push_back(inclusion_example(t, {}).t2_quadrature / std::sqrt(t));
  const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
  o.check(*hi / *lo <= 3.0, "T2/sqrt(t) spread > 3");
  const auto r = inclusion_example(0.25, cut);
  bool increasing = true;
  for (std::size_t i = 1; i < r.lambda2_trend.size(); ++i) increasing = increasing && r.lambda2_trend[i] > r.lambda2_trend[i - 1];
  o.check(increasing, "lambda=2 trend not increasing");
  o.check(r.lambda2_trend.back() > 1e3, "lambda=2 integral <= 1e3");
  const auto fit = lipschitz_fit(parse_corpus("shifted_log"), parse_phi("exp"), true,
                                 parse_real_list("0.0625:0.000244140625:/2"), std::vector<double>{1.0});
  o.check(fit.nu_hat >= 0.4 && fit.nu_hat <= 0.6, "weak fit outside [0.4, 0.6]");
  o.detail << "max |quad-closed| " << fmt(diff) << ", T2/sqrt(t) max/min " << fmt(*hi / *lo)
           << ", lambda=2 integral at ln(1/eps)=1e4: " << fmt(r.lambda2_trend.back()) << ", weak nu_hat "
           << fmt(fit.nu_hat);
}

void c11(Outcome& o) {
  std::vector<Cutoff> cut;
  for (double l : {5.0, 11.0, 21.0, 101.0}) cut.push_back(Cutoff::from_log(std::exp(l)));
  const auto r = sobolev_counterexample(2.0, cut);
  o.detail << "modular " << r.modular.back() << " (last change " << fmt(r.last_change) << "), ||u'||_2^2 "
           << fmt(r.lp_power.back()) << " at eps = exp(-e^101)";
  o.check(r.modular_stable, "modular still moving");
  o.check(r.lp_unbounded, "L2 part <= 1e2");
}

void c12(Outcome& o) {
  std::vector<PhiFunction> phis{make_phi("power", {{"p", 1.0}}), make_phi("power", {{"p", 2.0}}),
                                make_phi("power", {{"p", 3.0}}), make_phi("zygmund", {{"beta", 2.0}, {"gamma", 1.0}}),
                                make_phi("llogl"), make_phi("plog_quotient")};
  std::vector<IntervalFunction> fs;
  for (const auto& name : corpus_catalog()) fs.push_back(make_corpus(name));
  double lo = 1.0, hi = 0.0;
  for (const auto& phi : phis)
    for (const auto& f : fs) {
      const double u = luxemburg_norm(phi, f);
      const double m = modular(phi, f, 1.0 / u).value;
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  o.check(lo >= 1.0 - 1e-4 && hi <= 1.0, "I[f/u*] outside [1 - 1e-4, 1]");

  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> pick_f(0, fs.size() - 1), pick_phi(0, phis.size() - 1);
  std::uniform_real_distribution<double> pick_c(-3.0, 3.0);
  double hom = 0.0, tri = -1e300;
  for (int i = 0; i < 50; ++i) {
    const auto& phi = phis[pick_phi(rng)];
    const auto& f = fs[pick_f(rng)];
    const auto& g = fs[pick_f(rng)];
    const double c = pick_c(rng);
    hom = std::max(hom, std::abs(luxemburg_norm(phi, f.scaled(c)) - std::abs(c) * luxemburg_norm(phi, f)));
    tri = std::max(tri, luxemburg_norm(phi, f + g) - luxemburg_norm(phi, f) - luxemburg_norm(phi, g));
  }
  o.check(hom <= 1e-8, "homogeneity");
  o.check(tri <= 1e-8, "triangle inequality");
  const double two = luxemburg_norm(make_phi("exp"), make_corpus("const", {{"c", 2.0}}));
  o.check(std::abs(two - 2.0 / std::log(2.0)) < 1e-8, "||2||_exp");
  o.detail << "I[f/u*] in [" << lo << ", " << hi << "], homogeneity " << fmt(hom) << ", triangle excess " << fmt(tri)
           << ", ||2||_exp - 2/ln2 = " << fmt(two - 2.0 / std::log(2.0));
}

std::string run_cli(const std::vector<std::string>& args, const std::filesystem::path& out) {
  auto a = args;
  a.push_back("--output");
  a.push_back(out.string());
  std::ostringstream sink, err;
  cli_main(a, sink, err);
  std::ifstream in(out, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void c13(Outcome& o) {
  const auto dir = std::filesystem::temp_directory_path() / "kantolab_acceptance_13";
  std::filesystem::create_directories(dir);
  const std::vector<std::vector<std::string>> runs{
      {"rates", "--phi", "power:p=2", "--kernel", "ramp", "--fn", "sin", "--ns", "4:128:x2", "--threads", "2"},
      {"bounds", "--kind", "bernstein", "--phi", "power:p=2", "--kernel", "logistic", "--fn", "step", "--ns", "8:64:x2"},
      {"examples", "--which", "inclusion", "--t", "0.25"},
      {"report", "--phi", "zygmund:beta=2,gamma=1", "--kernel", "sigma_theta", "--seed", "7"},
      {"lipschitz", "--fn", "shifted_log", "--phi", "exp", "--mode", "weak"}};
  int same = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto a = run_cli(runs[i], dir / ("a" + std::to_string(i) + ".csv"));
    const auto b = run_cli(runs[i], dir / ("b" + std::to_string(i) + ".csv"));
    if (!a.empty() && a == b) ++same;
    else o.check(false, runs[i][0]);
  }
  o.detail << same << "/" << runs.size() << " commands byte-identical across repeated runs";
  std::filesystem::remove_all(dir);
}

struct Criterion {
  int id;
  const char* title;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "partition of unity", c1},        {2, "moments", c2},
      {3, "constant reproduction", c3},     {4, "explicit direct bound", c4},
      {5, "direct rate", c5},               {6, "characterization at nu=1/2", c6},
      {7, "operator norm", c7},             {8, "Bernstein boundedness", c8},
      {9, "Steklov", c9},                   {10, "shifted-log example", c10},
      {11, "Sobolev-Orlicz counterexample", c11}, {12, "Luxemburg engine", c12},
      {13, "determinism", c13}};
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::stoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    Outcome o;
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    std::cout << "criterion " << c.id << " (" << c.title << "): " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail.str() << std::endl;
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
