#include "fracherm/corpus.hpp"

#include <cmath>
#include <stdexcept>

#include "fracherm/hermite.hpp"

namespace fracherm {

namespace {

double bump(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// A field f(x) = g(x - c) anchored at c so offsets from c are exact.
ScalarField centred(int d, const Point& c, std::function<double(const Point&)> g, const std::string& label) {
  ScalarField f(d, [g, c](const Point& x) { return g(x - c); }, label);
  f.with_anchor(c, g);
  return f;
}

}  // namespace

double plateau_cutoff(double r) {
  const double a = bump(2.0 - r);
  const double b = bump(r - 1.0);
  return a / (a + b);
}

ScalarField make_corpus_field(const std::string& name, const CorpusParams& p) {
  const int d = p.d;
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("corpus: d must be in [1, 3]");
  const Point c = p.x0 ? *p.x0 : Point(d);
  if (c.dim() != d) throw std::invalid_argument("corpus: x0 dimension mismatch");
  const double alpha = p.alpha;

  if (name == "gaussian") {
    ScalarField f(d, [](const Point& x) { return std::exp(-x.norm2()); }, "gaussian");
    f.with_gradient([](const Point& x) { return x * (-2.0 * std::exp(-x.norm2())); });
    return f;
  }
  if (name == "psi") {
    ScalarField f(d, [](const Point& x) { return std::exp(-0.5 * x.norm2()); }, "psi");
    f.with_gradient([](const Point& x) { return x * (-std::exp(-0.5 * x.norm2())); });
    return f;
  }
  if (name == "one") {
    ScalarField f(d, [](const Point&) { return 1.0; }, "one");
    f.with_gradient([d](const Point&) { return Point(d); });
    return f;
  }
  if (name == "x2_gauss") {
    ScalarField f(d, [](const Point& x) { return x[0] * x[0] * std::exp(-0.5 * x.norm2()); }, "x2_gauss");
    f.with_gradient([](const Point& x) {
      const double e = std::exp(-0.5 * x.norm2());
      Point g = x * (-x[0] * x[0] * e);
      g[0] += 2.0 * x[0] * e;
      return g;
    });
    return f;
  }
  if (name.size() > 1 && name[0] == 'h' && name.find_first_not_of("0123456789", 1) == std::string::npos) {
    if (d != 1) throw std::invalid_argument("corpus: h<k> is one-dimensional");
    const int k = std::stoi(name.substr(1));
    if (k > 200) throw std::invalid_argument("corpus: h<k> needs k <= 200");
    return ScalarField(1, [k](const Point& x) { return hermite_function_1d(k, x[0]); }, name);
  }
  if (name == "fx") {
    if (!(p.gamma >= 0.0 && p.gamma < d)) throw std::invalid_argument("corpus: fx needs gamma in [0, d)");
    const double g = p.gamma;
    ScalarField f = centred(d, c, [g](const Point& h) {
      const double r = h.norm();
      return r == 0.0 ? 0.0 : sign(h[0]) / std::pow(r, g);
    }, "fx");
    f.with_known_value(c, 0.0).with_singular_point(c);
    return f;
  }
  if (name == "gx" || name == "gx_cutoff") {
    const bool cut = name == "gx_cutoff";
    const double e = 3.0 - alpha;
    ScalarField f = centred(d, c, [e, cut](const Point& h) {
      const double r = h.norm();
      if (r == 0.0) return 0.0;
      const double v = sign(h[0]) / std::pow(r, e);
      return cut ? v * plateau_cutoff(r) : v;
    }, name);
    f.with_known_value(c, 0.0).with_singular_point(c);
    return f;
  }
  if (name == "abs_alpha_cutoff" || name == "sign_abs_alpha_cutoff") {
    const bool sgn = name == "sign_abs_alpha_cutoff";
    ScalarField f = centred(d, c, [alpha, sgn](const Point& h) {
      const double r = h.norm();
      const double v = std::pow(r, alpha) * plateau_cutoff(r);
      return sgn ? sign(h[0]) * v : v;
    }, name);
    f.with_singular_point(c);
    return f;
  }
  throw std::invalid_argument("corpus: unknown field '" + name + "'");
}

std::vector<CorpusEntry> example_corpus() {
  std::vector<CorpusEntry> out;
  auto add = [&](std::string id, std::string name, CorpusParams p, double alpha, CorpusTags tags) {
    if (!p.x0) p.x0 = Point(p.d);
    p.alpha = alpha;
    const Point x0 = *p.x0;
    out.push_back({std::move(id), std::move(name), p, x0, alpha, tags});
  };
  CorpusTags smooth;
  smooth.in_D_alpha = true;
  smooth.in_D_alpha_strict = true;
  smooth.lip_beta = 2.0;
  smooth.smooth = true;
  smooth.admissible = true;

  add("gaussian@0.5", "gaussian", {1, 1.0, 0.5, Point{0.5}}, 1.0, smooth);
  add("psi@0", "psi", {1, 1.0, 0.5, Point{0.0}}, 1.0, smooth);
  add("h3@0.7", "h3", {1, 1.0, 0.5, Point{0.7}}, 1.0, smooth);
  add("x2_gauss@-0.4", "x2_gauss", {1, 1.0, 0.5, Point{-0.4}}, 1.5, smooth);

  for (double alpha : {0.5, 1.0, 1.5}) {
    const std::string a = std::to_string(alpha).substr(0, 3);
    CorpusTags abs_tags;
    abs_tags.in_D_alpha = false;
    abs_tags.in_D_alpha_strict = false;
    abs_tags.lip_beta = alpha;
    abs_tags.admissible = false;
    add("abs_alpha_cutoff[" + a + "]@0.3", "abs_alpha_cutoff", {1, alpha, 0.5, Point{0.3}}, alpha, abs_tags);

    CorpusTags sign_tags;
    sign_tags.in_D_alpha = true;
    sign_tags.in_D_alpha_strict = true;
    sign_tags.lip_beta = alpha;
    sign_tags.discontinuous = false;
    sign_tags.admissible = true;
    add("sign_abs_alpha_cutoff[" + a + "]@0.3", "sign_abs_alpha_cutoff", {1, alpha, 0.5, Point{0.3}}, alpha,
        sign_tags);
  }

  // Odd about 0 with f(0) = 0, unbounded there.
  CorpusTags fx1;
  fx1.in_D_alpha = true;
  fx1.in_D_alpha_strict = true;
  fx1.discontinuous = true;
  fx1.unbounded = true;
  fx1.admissible = true;
  add("fx[0.5]@0", "fx", {1, 1.0, 0.5, Point{0.0}}, 1.0, fx1);
  add("fx[0.5]@0,alpha1.5", "fx", {1, 1.5, 0.5, Point{0.0}}, 1.5, fx1);
  CorpusTags fx2 = fx1;
  add("fx[1]@0,d2", "fx", {2, 1.5, 1.0, Point{0.0, 0.0}}, 1.5, fx2);

  // d + alpha - 3 > 0: in D^alpha but not strictly.
  CorpusTags gx;
  gx.in_D_alpha = true;
  gx.in_D_alpha_strict = false;
  gx.discontinuous = true;
  gx.unbounded = true;
  gx.admissible = true;  // at the centre the odd singularity cancels exactly
  add("gx[1.5]@0,d3", "gx", {3, 1.5, 0.5, Point{0.0, 0.0, 0.0}}, 1.5, gx);
  CorpusTags gxc = gx;
  gxc.admissible = false;
  add("gx_cutoff[1.5]@e1,d3", "gx_cutoff", {3, 1.5, 0.5, Point{1.0, 0.0, 0.0}}, 1.5, gxc);
  return out;
}

}  // namespace fracherm
