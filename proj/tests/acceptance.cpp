// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fracherm/corpus.hpp"
#include "fracherm/frac.hpp"
#include "fracherm/hermite.hpp"
#include "fracherm/kernel_bounds.hpp"
#include "fracherm/smoothness.hpp"

using namespace fracherm;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit;  // seconds
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ScalarField field1(double (*f)(double), const char* label) {
  return ScalarField(1, [f](const Point& p) { return f(p[0]); }, label);
}

Outcome eigenfunction_law() {
  const QuadratureSpec spec;
  double worst = 0.0;
  int failed = 0;
  for (double m : {0.0, -1.0, 2.0}) {
    const auto op = OperatorSpec::hermite(1, m);
    for (int k : {0, 1, 3, 7}) {
      ScalarField h(1, [k](const Point& p) { return hermite_function_1d(k, p[0]); }, "h");
      const double lam = 2.0 * k + 1.0 + m;
      for (double sigma : {0.25, 0.5, 0.75}) {
        for (double x : {0.0, 0.7, -1.3}) {
          const double hx = hermite_function_1d(k, x);
          const auto o = bochner_fractional(op, sigma, h, Point{x}, spec);
          const double want = std::pow(lam, sigma) * hx;
          if (!o.converged()) {
            ++failed;
            continue;
          }
          // Relative error; absolute where the exact value vanishes (lambda = 0 or
          // an odd h_k at 0), scaled by |h_k(x0)| or 1.
          double scale = std::fabs(want);
          if (scale == 0.0) scale = std::fabs(hx) > 0.0 ? std::fabs(hx) : 1.0;
          worst = std::max(worst, std::fabs(o.value - want) / scale);
        }
      }
    }
  }
  return {failed == 0 && worst <= 1e-6, fmt("108 cases, worst relative error %.2e, non-converged %.0f", worst, failed)};
}

Outcome shifted_laplacian_constant() {
  const QuadratureSpec spec;
  ScalarField one(1, [](const Point&) { return 1.0; }, "one");
  double worst = 0.0;
  bool ok = true;
  for (double R : {0.5, 2.0, 5.0}) {
    for (double sigma : {0.25, 0.5, 0.75}) {
      const auto o = bochner_fractional(OperatorSpec::shifted_laplacian(1, R), sigma, one, Point{0.0}, spec);
      ok = ok && o.converged();
      worst = std::max(worst, std::fabs(o.value - std::pow(R, sigma)));
    }
  }
  return {ok && worst <= 1e-8, fmt("worst |value - R^sigma| %.2e (tol 1e-8)", worst)};
}

Outcome vanishing_integral() {
  const QuadratureSpec spec;
  double worst = 0.0;
  for (double sigma : {0.25, 0.5, 0.75}) {
    for (double t : {0.5, 1.0, 2.0}) worst = std::max(worst, identity_I_check(sigma, t, spec));
  }
  return {worst <= 1e-9, fmt("max |I| t^{2 sigma} %.2e (tol 1e-9)", worst)};
}

Outcome three_definitions() {
  const QuadratureSpec spec;
  const auto op = OperatorSpec::hermite(1, 0.0);
  const ScalarField fs[] = {field1([](double x) { return std::exp(-x * x); }, "exp(-x^2)"),
                            field1([](double x) { return x * x * std::exp(-0.5 * x * x); }, "x^2 exp(-x^2/2)")};
  FracRequest req;
  req.extension = true;
  req.spectral = true;
  double bs = 0.0;
  double es = 0.0;
  bool ok = true;
  for (const auto& f : fs) {
    for (double sigma : {0.3, 0.5}) {
      for (double x : {0.0, 0.5}) {
        const auto r = fractional_power(op, sigma, f, Point{x}, spec, req);
        if (!r.bochner.converged() || !r.spectral || !r.extension) {
          ok = false;
          continue;
        }
        bs = std::max(bs, std::fabs(r.bochner.value - r.spectral->value));
        es = std::max(es, std::fabs(r.extension->value - r.spectral->value));
      }
    }
  }
  return {ok && bs <= 1e-5 && es <= 1e-4,
          fmt("max |bochner - spectral| %.2e (tol 1e-5), max |extension - spectral| %.2e (tol 1e-4)", bs, es)};
}

Outcome ou_transference() {
  const QuadratureSpec spec;
  ScalarField one(1, [](const Point&) { return 1.0; }, "one");
  const ScalarField fs[] = {field1([](double x) { return x * x; }, "x^2"),
                            field1([](double x) { return std::cos(x); }, "cos")};
  double ident = 0.0;
  double constant = 0.0;
  bool ok = true;
  for (double sigma : {0.25, 0.5, 0.75}) {
    for (double x : {0.0, 0.8, -1.5}) {
      const Point x0{x};
      for (const auto& f : fs) {
        const auto r = ou_fractional(sigma, f, x0, spec);
        const auto b = bochner_fractional(OperatorSpec::hermite(1, -1.0), sigma, ou_transfer(f), x0, spec);
        ok = ok && r.bochner.converged() && b.converged();
        ident = std::max(ident, std::fabs(r.bochner.value - std::exp(0.5 * x * x) * b.value));
      }
      const auto c = ou_fractional(sigma, one, x0, spec);
      ok = ok && c.bochner.converged();
      constant = std::max(constant, std::fabs(c.bochner.value));
    }
  }
  return {ok && ident <= 1e-10 && constant <= 1e-8,
          fmt("transference gap %.2e (tol 1e-10), max |O^sigma 1| %.2e (tol 1e-8)", ident, constant)};
}

Outcome elementary_inequality() {
  const double worst = elementary_inequality_check(10000);
  return {worst <= 1.0 + 1e-12, fmt("worst ratio %.17g over 1e4 samples (tol 1 + 1e-12)", worst)};
}

Outcome kernel_comparability() {
  const QuadratureSpec spec;
  std::string detail;
  bool ok = true;
  for (double m : {0.0, -1.0}) {
    const auto op = OperatorSpec::hermite(1, m);
    double lo[2];
    double hi[2];
    for (int level = 0; level < 2; ++level) {
      const double step = 0.25 / (1 << level);
      lo[level] = INFINITY;
      hi[level] = 0.0;
      for (int i = 0; -6.0 + i * step <= 6.0 + 1e-12; ++i) {
        const Point y{-6.0 + i * step};
        const double r = poisson_kernel(op, 0.5, 1.0, Point{0.0}, y, spec) / weight_phi(op, 0.5, y);
        lo[level] = std::min(lo[level], r);
        hi[level] = std::max(hi[level], r);
      }
    }
    const double move = std::max(std::fabs(lo[1] / lo[0] - 1.0), std::fabs(hi[1] / hi[0] - 1.0));
    ok = ok && lo[1] > 0.0 && std::isfinite(hi[1]) && move < 0.10;
    detail += fmt("m=%g: [%.4g, ", m, lo[1]) + fmt("%.4g] moved %.3f; ", hi[1], move);
  }
  return {ok, detail + "(tol 0.10)"};
}

Outcome bound_suites() {
  const QuadratureSpec spec;
  int failures = 0;
  double worst_const = 0.0;
  std::string failed;
  for (int d : {1, 2}) {
    for (double sigma : {0.25, 0.75}) {
      const auto h = OperatorSpec::hermite(d, 0.0);
      const auto sl = OperatorSpec::shifted_laplacian(d, 1.0);
      const KernelBoundReport reports[] = {verify_size_bound(h, sigma, spec), verify_smoothness_bound(h, sigma, spec),
                                           verify_gaussian_tail(h, sigma, spec), verify_size_bound(sl, sigma, spec),
                                           verify_gaussian_tail(sl, sigma, spec)};
      for (const auto& r : reports) {
        if (!r.pass || !std::isfinite(r.sup_ratio)) {
          ++failures;
          failed += fmt(" d=%g sigma=%g", d, sigma);
        }
      }
      const double c = shifted_laplacian_size_constant(d, sigma);
      worst_const = std::max(worst_const, std::fabs(reports[3].sup_ratio / c - 1.0));
    }
  }
  return {failures == 0 && worst_const <= 0.05,
          fmt("20 reports, %.0f failed; shifted-Laplacian size constant off by %.2e (tol 0.05)", failures,
              worst_const) +
              failed};
}

Outcome corpus_reproduction() {
  const QuadratureSpec spec;
  std::string detail;
  bool ok = true;

  // (a) |x - x0|^alpha phi, alpha = 1, d = 1.
  CorpusParams pa{1, 1.0, 0.5, Point{0.3}};
  const auto f = make_corpus_field("abs_alpha_cutoff", pa);
  SmoothnessSpec s;
  s.alpha = 1.0;
  s.x0 = Point{0.3};
  const auto dm = dini_membership(f, s, spec);
  const auto pv = frac_laplacian_pv(f, 0.5, Point{0.3}, spec);
  const auto partial = frac_laplacian_partial(f, 0.5, Point{0.3}, 1e-6, spec);
  const bool a = dm.in_D_alpha == Tri::False && pv.status == Status::Diverged && partial.value < -1e3;
  detail += std::string("(a) ") + (a ? "ok" : "FAIL") + " in_D=" + to_string(dm.in_D_alpha) +
            " pv=" + to_string(pv.status) + fmt(" partial@1e-6=%.4g (need < -1e3); ", partial.value);
  ok = ok && a;

  // (b) sign variant.
  double worst_b = 0.0;
  for (double alpha : {0.5, 1.0, 1.5}) {
    CorpusParams pb{1, alpha, 0.5, Point{0.3}};
    const auto o = frac_laplacian_pv(make_corpus_field("sign_abs_alpha_cutoff", pb), 0.5 * alpha, Point{0.3}, spec);
    worst_b = o.converged() ? std::max(worst_b, std::fabs(o.value)) : INFINITY;
  }
  const bool b = worst_b <= 1e-6;
  detail += std::string("(b) ") + (b ? "ok" : "FAIL") + fmt(" max |value| %.2e; ", worst_b);
  ok = ok && b;

  // (c) gx, d = 3, alpha = 1.5.
  CorpusParams pc{3, 1.5, 0.5, Point{0.0, 0.0, 0.0}};
  SmoothnessSpec sc;
  sc.alpha = 1.5;
  sc.x0 = Point{0.0, 0.0, 0.0};
  const auto gc = dini_membership(make_corpus_field("gx", pc), sc, spec);
  const bool c = gc.in_D_alpha == Tri::True && gc.in_D_alpha_strict == Tri::False;
  detail += std::string("(c) ") + (c ? "ok" : "FAIL") + " in_D=" + to_string(gc.in_D_alpha) +
            " strict=" + to_string(gc.in_D_alpha_strict) + "; ";
  ok = ok && c;

  // (d) redundancy law and tags on the d = 1 members.
  int members = 0;
  int broken = 0;
  for (const auto& e : example_corpus()) {
    if (e.params.d != 1) continue;
    ++members;
    SmoothnessSpec se;
    se.alpha = e.alpha;
    se.x0 = e.x0;
    const auto r = dini_membership(e.field(), se, spec);
    bool good = r.redundancy_note && r.in_D_alpha_strict == r.in_D_alpha && r.in_D_alpha != Tri::Inconclusive;
    if (e.expected.in_D_alpha) good = good && r.in_D_alpha == (*e.expected.in_D_alpha ? Tri::True : Tri::False);
    if (!good) ++broken;
  }
  const bool dd = broken == 0;
  detail += std::string("(d) ") + (dd ? "ok" : "FAIL") + fmt(" %.0f d=1 members, %.0f violations", members, broken);
  ok = ok && dd;
  return {ok, detail};
}

Outcome admissibility_coherence() {
  const QuadratureSpec spec;
  int contradictions = 0;
  int tag_mismatches = 0;
  int members = 0;
  std::string where;
  for (const auto& e : example_corpus()) {
    ++members;
    const auto f = e.field();
    const auto op = OperatorSpec::hermite(e.params.d, 0.0);
    const double sigma = 0.5 * e.alpha;
    const auto ad = admissibility_check(op, sigma, f, e.x0, spec);
    const auto b = bochner_fractional(op, sigma, f, e.x0, spec);
    bool bad = false;
    if (ad.verdict == Verdict::NotAdmissible && b.status != Status::Diverged) bad = true;
    if (ad.verdict == Verdict::Admissible && b.status == Status::Diverged) bad = true;
    if (ad.verdict == Verdict::Admissible && e.expected.smooth && !b.converged()) bad = true;
    if (ad.verdict == Verdict::Inconclusive) bad = true;
    if (bad) {
      ++contradictions;
      where += " " + e.id;
    }
    if (e.expected.admissible && (ad.verdict == Verdict::Admissible) != *e.expected.admissible) {
      ++tag_mismatches;
      where += " tag:" + e.id;
    }
  }
  return {contradictions == 0 && tag_mismatches == 0,
          fmt("%.0f members, %.0f contradictions, %.0f tag mismatches", members, contradictions, tag_mismatches) +
              where};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "eigenfunction law", 10.0, eigenfunction_law},
      {2, "shifted-Laplacian constant", 1.0, shifted_laplacian_constant},
      {3, "vanishing-integral identity", 1.0, vanishing_integral},
      {4, "three-definition agreement", 60.0, three_definitions},
      {5, "OU transference", 5.0, ou_transference},
      {6, "elementary exponential inequality", 1.0, elementary_inequality},
      {7, "kernel comparability", 30.0, kernel_comparability},
      {8, "kernel bound suites", 120.0, bound_suites},
      {9, "corpus reproduction", 60.0, corpus_reproduction},
      {10, "divergence-vs-admissibility coherence", 120.0, admissibility_coherence},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.time_limit;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s [%d] %s: %s; %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.time_limit, in_time ? "" : " over time");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
