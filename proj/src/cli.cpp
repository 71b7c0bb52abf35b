#include "fracherm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "fracherm/expr.hpp"
#include "fracherm/kernel_bounds.hpp"
#include "fracherm/smoothness.hpp"

namespace fracherm::cli {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands{"frac", "bounds", "smoothness", "admissibility", "converge"};

std::pair<int, int> line_column(std::string_view text, size_t offset) {
  int line = 1;
  int column = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Semantic errors point at the first occurrence of the offending key.
[[noreturn]] void fail_at_key(std::string_view text, const std::string& key, const std::string& what) {
  const size_t pos = text.find("\"" + key + "\"");
  const auto [line, column] = pos == std::string_view::npos ? std::pair{1, 1} : line_column(text, pos);
  throw ConfigError(what, line, column);
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  double number(const json& j, const std::string& key) const {
    if (!j.is_number()) fail_at_key(text_, key, "'" + key + "' must be a number");
    return j.get<double>();
  }
  int integer(const json& j, const std::string& key) const {
    if (!j.is_number_integer()) fail_at_key(text_, key, "'" + key + "' must be an integer");
    return j.get<int>();
  }
  bool boolean(const json& j, const std::string& key) const {
    if (!j.is_boolean()) fail_at_key(text_, key, "'" + key + "' must be true or false");
    return j.get<bool>();
  }
  std::string string(const json& j, const std::string& key) const {
    if (!j.is_string()) fail_at_key(text_, key, "'" + key + "' must be a string");
    return j.get<std::string>();
  }
  Point point(const json& j, const std::string& key, int d) const {
    if (j.is_number() && d == 1) return Point{j.get<double>()};
    if (!j.is_array() || static_cast<int>(j.size()) != d) {
      fail_at_key(text_, key, "'" + key + "' entries must be arrays of " + std::to_string(d) + " numbers");
    }
    Point p(d);
    for (int i = 0; i < d; ++i) p[i] = number(j[i], key);
    return p;
  }
  void only(const json& obj, const std::string& key, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail_at_key(text_, key, "'" + key + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
        fail_at_key(text_, k, "unknown field '" + k + "' in '" + key + "'");
      }
    }
  }
  [[noreturn]] void fail(const std::string& key, const std::string& what) const { fail_at_key(text_, key, what); }

 private:
  std::string_view text_;
};

OperatorSpec parse_operator(const Reader& rd, const json& j) {
  rd.only(j, "operator", {"kind", "d", "m", "R"});
  if (!j.contains("kind")) rd.fail("operator", "operator needs a 'kind'");
  const std::string kind = rd.string(j["kind"], "kind");
  const int d = j.contains("d") ? rd.integer(j["d"], "d") : 1;
  try {
    if (kind == "hermite") return OperatorSpec::hermite(d, j.contains("m") ? rd.number(j["m"], "m") : 0.0);
    if (kind == "ornstein_uhlenbeck") return OperatorSpec::ornstein_uhlenbeck(d);
    if (kind == "shifted_laplacian") {
      return OperatorSpec::shifted_laplacian(d, j.contains("R") ? rd.number(j["R"], "R") : 1.0);
    }
  } catch (const std::invalid_argument& e) {
    rd.fail("operator", e.what());
  }
  rd.fail("kind", "unknown operator kind '" + kind + "'");
}

QuadratureSpec parse_quadrature(const Reader& rd, const json& j) {
  rd.only(j, "quadrature",
          {"abs_tol", "rel_tol", "max_subdivisions", "split_A", "shell_ratio", "divergence_threshold",
           "min_shell_exponent", "angular_points"});
  QuadratureSpec q;
  if (j.contains("abs_tol")) q.abs_tol = rd.number(j["abs_tol"], "abs_tol");
  if (j.contains("rel_tol")) q.rel_tol = rd.number(j["rel_tol"], "rel_tol");
  if (j.contains("max_subdivisions")) q.max_subdivisions = rd.integer(j["max_subdivisions"], "max_subdivisions");
  if (j.contains("split_A")) q.split_A = rd.number(j["split_A"], "split_A");
  if (j.contains("shell_ratio")) q.shell_ratio = rd.number(j["shell_ratio"], "shell_ratio");
  if (j.contains("divergence_threshold")) {
    q.divergence_threshold = rd.number(j["divergence_threshold"], "divergence_threshold");
  }
  if (j.contains("min_shell_exponent")) {
    q.min_shell_exponent = rd.integer(j["min_shell_exponent"], "min_shell_exponent");
  }
  if (j.contains("angular_points")) q.angular_points = rd.integer(j["angular_points"], "angular_points");
  try {
    q.validate();
  } catch (const std::exception& e) {
    rd.fail("quadrature", e.what());
  }
  return q;
}

json outcome_json(const IntegralOutcome& o) {
  json j;
  j["status"] = to_string(o.status);
  j["value"] = o.converged() ? json(o.value) : json(nullptr);
  j["error_estimate"] = o.converged() ? json(o.error_estimate) : json(nullptr);
  if (o.status == Status::Diverged) j["partial_sum"] = o.value;
  return j;
}

json operator_json(const OperatorSpec& op) {
  json j;
  j["kind"] = to_string(op.kind);
  j["d"] = op.d;
  if (op.kind == OperatorKind::HermiteShifted) j["m"] = op.m;
  if (op.kind == OperatorKind::ShiftedLaplacian) j["R"] = op.R;
  return j;
}

json point_json(const Point& p) {
  json j = json::array();
  for (int i = 0; i < p.dim(); ++i) j.push_back(p[i]);
  return j;
}

json report_json(const KernelBoundReport& r) {
  json j;
  j["grid"] = r.grid;
  j["sup_ratio"] = r.sup_ratio;
  j["refinement_drift"] = r.refinement_drift;
  j["pass"] = r.pass;
  if (!r.trials.empty()) {
    j["trials"] = json::array();
    for (const auto& t : r.trials) {
      j["trials"].push_back(
          {{"gamma", t.gamma}, {"sup_ratio", t.sup_ratio}, {"refinement_drift", t.refinement_drift}, {"pass", t.pass}});
    }
  }
  return j;
}

int status_code(Status s) {
  switch (s) {
    case Status::Converged:
      return kOk;
    case Status::Diverged:
      return kDiverged;
    case Status::Inconclusive:
      break;
  }
  return kInconclusive;
}

// Divergence dominates inconclusiveness.
int combine(int a, int b) {
  if (a == kDiverged || b == kDiverged) return kDiverged;
  return std::max(a, b);
}

int tri_code(Tri t) { return t == Tri::Inconclusive ? kInconclusive : kOk; }

// Kernel bounds are stated for the Hermite family; the OU operator is
// checked through its transferred Hermite operator.
OperatorSpec bounds_operator(const OperatorSpec& op) {
  if (op.kind == OperatorKind::OrnsteinUhlenbeck) return OperatorSpec::hermite(op.d, -op.d);
  return op;
}

struct Task {
  std::vector<int> key;
  std::function<std::pair<std::vector<Record>, int>()> run;
};

struct Context {
  const RunConfig& config;
  std::uint64_t seed;
  json provenance;
  ScalarField field;

  json base(const char* kind) const {
    json j;
    j["kind"] = kind;
    j["operator"] = operator_json(config.op);
    j["provenance"] = provenance;
    return j;
  }
};

std::vector<Task> frac_tasks(const Context& cx) {
  std::vector<Task> tasks;
  for (size_t i = 0; i < cx.config.points.size(); ++i) {
    tasks.push_back({{static_cast<int>(i)}, [&cx, i] {
                       const RunConfig& c = cx.config;
                       const Point& x0 = c.points[i];
                       FracRequest req = c.frac;
                       req.spectral = req.spectral && c.op.d <= 2 &&
                                      c.op.kind != OperatorKind::ShiftedLaplacian;
                       const FracResult r = fractional_power(c.op, c.sigma, cx.field, x0, c.quadrature, req);
                       std::vector<Record> out;
                       auto add = [&](int sub, const char* def, json fields) {
                         json j = cx.base("frac");
                         j["sigma"] = c.sigma;
                         j["x0"] = point_json(x0);
                         j["definition"] = def;
                         j["agreement_spread"] = r.agreement_spread;
                         j.update(fields);
                         out.push_back({{static_cast<int>(i), sub}, std::move(j)});
                       };
                       int code = status_code(r.bochner.status);
                       json b = outcome_json(r.bochner);
                       if (r.transferred_value) b["transferred_value"] = *r.transferred_value;
                       add(0, "bochner", b);
                       if (c.frac.extension) {
                         const bool ok = r.extension && r.extension->converged;
                         add(1, "extension",
                             {{"status", ok ? "converged" : "inconclusive"},
                              {"value", r.extension ? json(r.extension->value) : json(nullptr)},
                              {"error_estimate",
                               r.extension && r.extension->extrapolants.size() >= 2
                                   ? json(std::fabs(r.extension->extrapolants.back() -
                                                    r.extension->extrapolants[r.extension->extrapolants.size() - 2]))
                                   : json(nullptr)}});
                         if (!ok) code = combine(code, kInconclusive);
                       }
                       if (req.spectral) {
                         json s{{"status", r.spectral ? "converged" : "inconclusive"},
                                {"value", r.spectral ? json(r.spectral->value) : json(nullptr)},
                                {"error_estimate", r.spectral ? json(r.spectral->tail_estimate) : json(nullptr)}};
                         if (r.spectral) s["truncation_K"] = r.spectral->truncation_K;
                         add(2, "spectral", s);
                         if (!r.spectral) code = combine(code, kInconclusive);
                       }
                       if (code == kOk && r.agreement_spread > c.agreement_tol) code = kInconclusive;
                       return std::pair{std::move(out), code};
                     }});
  }
  return tasks;
}

std::vector<Task> bounds_tasks(const Context& cx) {
  std::vector<Task> tasks;
  const auto& checks = cx.config.bounds.checks;
  for (size_t i = 0; i < checks.size(); ++i) {
    tasks.push_back({{static_cast<int>(i)}, [&cx, i] {
                       const RunConfig& c = cx.config;
                       const std::string& name = c.bounds.checks[i];
                       const OperatorSpec op = bounds_operator(c.op);
                       json j = cx.base("bounds");
                       j["check"] = name;
                       j["sigma"] = c.sigma;
                       bool pass = true;
                       if (name == "elementary") {
                         const double worst = elementary_inequality_check(c.bounds.samples, cx.seed);
                         pass = worst <= 1.0 + 1e-12;
                         j["samples"] = c.bounds.samples;
                         j["worst_ratio"] = worst;
                         j["pass"] = pass;
                       } else if (name == "smoothness" && op.kind != OperatorKind::HermiteShifted) {
                         j["applicable"] = false;
                       } else {
                         KernelBoundReport r;
                         if (name == "size") {
                           r = verify_size_bound(op, c.sigma, c.quadrature);
                         } else if (name == "smoothness") {
                           r = verify_smoothness_bound(op, c.sigma, c.quadrature);
                         } else {
                           r = verify_gaussian_tail(op, c.sigma, c.quadrature);
                         }
                         j.update(report_json(r));
                         if (name == "size" && op.kind == OperatorKind::ShiftedLaplacian) {
                           j["analytic_constant"] = shifted_laplacian_size_constant(op.d, c.sigma);
                         }
                         pass = r.pass;
                       }
                       std::vector<Record> out{{{static_cast<int>(i)}, std::move(j)}};
                       return std::pair{std::move(out), pass ? int{kOk} : int{kInconclusive}};
                     }});
  }
  return tasks;
}

std::vector<Task> smoothness_tasks(const Context& cx) {
  std::vector<Task> tasks;
  for (size_t i = 0; i < cx.config.points.size(); ++i) {
    tasks.push_back({{static_cast<int>(i)}, [&cx, i] {
                       const RunConfig& c = cx.config;
                       SmoothnessSpec spec;
                       spec.alpha = c.alpha;
                       spec.delta = c.delta;
                       spec.x0 = c.points[i];
                       const SmoothnessReport r = dini_membership(cx.field, spec, c.quadrature);
                       json j = cx.base("smoothness");
                       j["alpha"] = c.alpha;
                       j["x0"] = point_json(c.points[i]);
                       j["in_D_alpha"] = to_string(r.in_D_alpha);
                       j["in_D_alpha_strict"] = to_string(r.in_D_alpha_strict);
                       j["strict_via_centered"] = to_string(r.strict_via_centered);
                       j["redundancy_note"] = r.redundancy_note;
                       j["second_diff_integral"] = outcome_json(r.second_diff_integral);
                       j["first_diff_integral"] = outcome_json(r.first_diff_integral);
                       j["centered_diff_integral"] = outcome_json(r.centered_diff_integral);
                       std::vector<double> radii;
                       for (int k = 2; k <= 12; ++k) radii.push_back(std::ldexp(1.0, -k));
                       try {
                         j["lip_beta"] = lip_estimate(cx.field, c.points[i], radii, c.quadrature.angular_points);
                       } catch (const std::exception&) {
                         j["lip_beta"] = nullptr;
                       }
                       const int code = combine(tri_code(r.in_D_alpha), tri_code(r.in_D_alpha_strict));
                       std::vector<Record> out{{{static_cast<int>(i)}, std::move(j)}};
                       return std::pair{std::move(out), code};
                     }});
  }
  return tasks;
}

std::vector<Task> admissibility_tasks(const Context& cx) {
  std::vector<Task> tasks;
  for (size_t i = 0; i < cx.config.points.size(); ++i) {
    tasks.push_back({{static_cast<int>(i)}, [&cx, i] {
                       const RunConfig& c = cx.config;
                       const AdmissibilityReport r =
                           admissibility_check(c.op, c.sigma, cx.field, c.points[i], c.quadrature);
                       json j = cx.base("admissibility");
                       j["sigma"] = c.sigma;
                       j["x0"] = point_json(c.points[i]);
                       j["verdict"] = to_string(r.verdict);
                       j["delta"] = r.delta;
                       j["pointwise_finite"] = r.pointwise_finite;
                       j["weight_integral"] = outcome_json(r.weight_integral);
                       j["tail_part"] = outcome_json(r.tail_part);
                       j["local_part"] = outcome_json(r.local_part);
                       j["far_part"] = outcome_json(r.far_part);
                       int code = kOk;
                       if (r.verdict == Verdict::NotAdmissible) code = kDiverged;
                       if (r.verdict == Verdict::Inconclusive) code = kInconclusive;
                       std::vector<Record> out{{{static_cast<int>(i)}, std::move(j)}};
                       return std::pair{std::move(out), code};
                     }});
  }
  return tasks;
}

std::vector<Task> converge_tasks(const Context& cx) {
  std::vector<Task> tasks;
  for (size_t i = 0; i < cx.config.points.size(); ++i) {
    tasks.push_back({{static_cast<int>(i)}, [&cx, i] {
                       const RunConfig& c = cx.config;
                       const Point& x0 = c.points[i];
                       ExtensionResult r;
                       if (c.op.kind == OperatorKind::OrnsteinUhlenbeck) {
                         FracRequest req = c.frac;
                         req.extension = true;
                         req.spectral = false;
                         r = *ou_fractional(c.sigma, cx.field, x0, c.quadrature, req).extension;
                       } else {
                         try {
                           r = extension_limit(c.op, c.sigma, cx.field, x0, c.frac.t_sequence, c.quadrature,
                                               c.frac.extension_tol);
                         } catch (const NonConvergenceError& e) {
                           r = e.result();
                         }
                       }
                       std::vector<Record> out;
                       for (size_t k = 0; k < r.trace.size(); ++k) {
                         json j = cx.base("converge");
                         j["sigma"] = c.sigma;
                         j["x0"] = point_json(x0);
                         j["j"] = k;
                         j["t"] = r.trace[k].t;
                         j["approximant"] = r.trace[k].approximant;
                         j["extrapolant"] = k < r.extrapolants.size() ? json(r.extrapolants[k]) : json(nullptr);
                         out.push_back({{static_cast<int>(i), static_cast<int>(k)}, std::move(j)});
                       }
                       json s = cx.base("converge_summary");
                       s["sigma"] = c.sigma;
                       s["x0"] = point_json(x0);
                       s["value"] = r.value;
                       s["converged"] = r.converged;
                       s["tol"] = c.frac.extension_tol;
                       out.push_back({{static_cast<int>(i), static_cast<int>(r.trace.size())}, std::move(s)});
                       return std::pair{std::move(out), r.converged ? int{kOk} : int{kInconclusive}};
                     }});
  }
  return tasks;
}

json provenance_json(const RunConfig& c, std::uint64_t seed) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "fnv1a64:%016" PRIx64, c.hash());
  const QuadratureSpec& q = c.quadrature;
  return {{"config_hash", hash},
          {"version", kVersion},
          {"seed", seed},
          {"tolerances",
           {{"abs_tol", q.abs_tol},
            {"rel_tol", q.rel_tol},
            {"max_subdivisions", q.max_subdivisions},
            {"split_A", q.split_A},
            {"shell_ratio", q.shell_ratio},
            {"divergence_threshold", q.divergence_threshold},
            {"min_shell_exponent", q.min_shell_exponent},
            {"angular_points", q.angular_points},
            {"agreement_tol", c.agreement_tol},
            {"extension_tol", c.frac.extension_tol}}}};
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

std::string ConfigError::diagnostic(const std::string& source) const {
  return source + ":" + std::to_string(line_) + ":" + std::to_string(column_) + ": " + what();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig RunConfig::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const size_t at = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = line_column(text, at);
    std::string msg = e.what();
    const size_t cut = msg.find("syntax error");
    throw ConfigError(cut == std::string::npos ? msg : msg.substr(cut), line, column);
  }
  const Reader rd(text);
  rd.only(doc, "config",
          {"operator", "sigma", "points", "function", "alpha", "delta", "quadrature", "frac", "bounds", "outputs"});
  RunConfig c;
  c.canonical = doc.dump();
  if (doc.contains("operator")) c.op = parse_operator(rd, doc["operator"]);
  const int d = c.op.d;
  if (doc.contains("sigma")) c.sigma = rd.number(doc["sigma"], "sigma");
  if (!(c.sigma > 0.0 && c.sigma < 1.0)) rd.fail("sigma", "sigma must lie in (0,1)");
  c.alpha = doc.contains("alpha") ? rd.number(doc["alpha"], "alpha") : 2.0 * c.sigma;
  if (!(c.alpha > 0.0 && c.alpha < 2.0)) rd.fail("alpha", "alpha must lie in (0,2)");
  if (doc.contains("delta")) c.delta = rd.number(doc["delta"], "delta");
  if (!(c.delta > 0.0)) rd.fail("delta", "delta must be > 0");
  if (doc.contains("points")) {
    if (!doc["points"].is_array()) rd.fail("points", "'points' must be an array");
    for (const auto& p : doc["points"]) c.points.push_back(rd.point(p, "points", d));
  } else {
    c.points.push_back(Point(d));
  }
  if (doc.contains("quadrature")) c.quadrature = parse_quadrature(rd, doc["quadrature"]);

  c.corpus.d = d;
  c.corpus.alpha = c.alpha;
  if (!doc.contains("function")) rd.fail("config", "config needs a 'function'");
  const json& fn = doc["function"];
  bool explicit_expr = false;
  if (fn.is_string()) {
    c.function = fn.get<std::string>();
  } else {
    rd.only(fn, "function", {"corpus", "expr", "alpha", "gamma", "center"});
    if (fn.contains("corpus") == fn.contains("expr")) rd.fail("function", "'function' needs one of 'corpus' or 'expr'");
    c.function = fn.contains("corpus") ? rd.string(fn["corpus"], "corpus") : rd.string(fn["expr"], "expr");
    if (fn.contains("alpha")) c.corpus.alpha = rd.number(fn["alpha"], "alpha");
    if (fn.contains("gamma")) c.corpus.gamma = rd.number(fn["gamma"], "gamma");
    if (fn.contains("center")) c.corpus.x0 = rd.point(fn["center"], "center", d);
    explicit_expr = fn.contains("expr");
  }
  if (c.function.empty()) rd.fail("function", "'function' must not be empty");
  if (!explicit_expr) {
    try {
      make_corpus_field(c.function, c.corpus);
      c.function_is_corpus = true;
    } catch (const std::invalid_argument&) {
      c.function_is_corpus = false;
    }
  }
  if (!c.function_is_corpus) {
    try {
      Expression::parse(c.function, d);
    } catch (const ParseError& e) {
      // Locate the expression text in the document when it appears verbatim.
      const size_t pos = text.find(c.function);
      if (pos == std::string_view::npos) rd.fail("function", e.what());
      const auto [line, column] = line_column(text, pos + static_cast<size_t>(e.column() - 1));
      throw ConfigError(e.what(), line, column);
    }
  }

  if (doc.contains("frac")) {
    const json& f = doc["frac"];
    rd.only(f, "frac", {"extension", "spectral", "spectral_K", "agreement_tol", "t_sequence", "extension_tol"});
    if (f.contains("extension")) c.frac.extension = rd.boolean(f["extension"], "extension");
    if (f.contains("spectral")) c.frac.spectral = rd.boolean(f["spectral"], "spectral");
    if (f.contains("spectral_K")) c.frac.spectral_K = rd.integer(f["spectral_K"], "spectral_K");
    if (f.contains("agreement_tol")) c.agreement_tol = rd.number(f["agreement_tol"], "agreement_tol");
    if (f.contains("extension_tol")) c.frac.extension_tol = rd.number(f["extension_tol"], "extension_tol");
    if (f.contains("t_sequence")) {
      if (!f["t_sequence"].is_array()) rd.fail("t_sequence", "'t_sequence' must be an array");
      c.frac.t_sequence.clear();
      for (const auto& t : f["t_sequence"]) c.frac.t_sequence.push_back(rd.number(t, "t_sequence"));
      if (c.frac.t_sequence.size() < 2) rd.fail("t_sequence", "'t_sequence' needs at least two values");
      for (size_t i = 0; i < c.frac.t_sequence.size(); ++i) {
        const double t = c.frac.t_sequence[i];
        if (!(t >= 1e-4) || (i > 0 && !(t < c.frac.t_sequence[i - 1]))) {
          rd.fail("t_sequence", "'t_sequence' must be strictly decreasing and >= 1e-4");
        }
      }
    }
    if (c.frac.spectral_K < 5 || c.frac.spectral_K > 200) rd.fail("spectral_K", "'spectral_K' must be in [5, 200]");
  }
  if (doc.contains("bounds")) {
    const json& b = doc["bounds"];
    rd.only(b, "bounds", {"checks", "samples"});
    if (b.contains("samples")) c.bounds.samples = rd.integer(b["samples"], "samples");
    if (c.bounds.samples < 1) rd.fail("samples", "'samples' must be >= 1");
    if (b.contains("checks")) {
      if (!b["checks"].is_array()) rd.fail("checks", "'checks' must be an array");
      c.bounds.checks.clear();
      for (const auto& x : b["checks"]) {
        const std::string name = rd.string(x, "checks");
        if (name != "size" && name != "smoothness" && name != "gaussian_tail" && name != "elementary") {
          rd.fail("checks", "unknown bound check '" + name + "'");
        }
        c.bounds.checks.push_back(name);
      }
    }
  }
  if (doc.contains("outputs")) {
    if (!doc["outputs"].is_array()) rd.fail("outputs", "'outputs' must be an array");
    for (const auto& x : doc["outputs"]) {
      const std::string name = rd.string(x, "outputs");
      if (std::find(kCommands.begin(), kCommands.end(), name) == kCommands.end()) {
        rd.fail("outputs", "unknown output '" + name + "'");
      }
      c.outputs.push_back(name);
    }
  }
  return c;
}

ScalarField RunConfig::field() const {
  if (function_is_corpus) return make_corpus_field(function, corpus);
  return Expression::parse(function, op.d).to_field();
}

std::uint64_t RunConfig::hash() const { return fnv1a64(canonical); }

int worker_count() {
  if (const char* env = std::getenv("FRACHERM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<int>(std::min<long>(n, 256));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CommandResult run_command(const std::string& command, const RunConfig& config, std::uint64_t seed, int threads) {
  const Context cx{config, seed, provenance_json(config, seed), config.field()};
  std::vector<Task> tasks;
  if (command == "frac") {
    tasks = frac_tasks(cx);
  } else if (command == "bounds") {
    tasks = bounds_tasks(cx);
  } else if (command == "smoothness") {
    tasks = smoothness_tasks(cx);
  } else if (command == "admissibility") {
    tasks = admissibility_tasks(cx);
  } else if (command == "converge") {
    tasks = converge_tasks(cx);
  } else {
    throw std::invalid_argument("unknown command '" + command + "'");
  }

  CommandResult result;
  std::mutex sink;
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      try {
        auto [records, code] = tasks[i].run();
        const std::lock_guard<std::mutex> lock(sink);
        for (auto& r : records) result.records.push_back(std::move(r));
        result.exit_code = combine(result.exit_code, code);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(sink);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  std::sort(result.records.begin(), result.records.end(),
            [](const Record& a, const Record& b) { return a.key < b.key; });
  return result;
}

void write_json(const std::vector<Record>& records, std::ostream& out) {
  for (const auto& r : records) out << r.body.dump() << '\n';
}

void write_csv(const std::vector<Record>& records, std::ostream& out) {
  std::vector<json> flat;
  std::set<std::string> columns;
  for (const auto& r : records) {
    flat.push_back(r.body.flatten());
    for (const auto& [k, v] : flat.back().items()) columns.insert(k);
  }
  bool first = true;
  for (const auto& c : columns) {
    out << (first ? "" : ",") << csv_cell(c);
    first = false;
  }
  out << '\n';
  for (const auto& f : flat) {
    first = true;
    for (const auto& c : columns) {
      out << (first ? "" : ",");
      if (f.contains(c)) out << csv_cell(f[c]);
      first = false;
    }
    out << '\n';
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fractional powers of Hermite-type operators"};
  app.require_subcommand(1);
  std::string config_path;
  std::uint64_t seed = kDefaultSeed;
  std::string format = "json";
  std::string out_path = "-";
  for (const auto& name : kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed, "seed for sampled checks");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--out", out_path, "output path, - for stdout");
  }
  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fracherm: " << e.what() << '\n';
    return kUsage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    err << "fracherm: cannot read config '" << config_path << "'\n";
    return kUsage;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  RunConfig config;
  try {
    config = RunConfig::parse(text);
  } catch (const ConfigError& e) {
    err << e.diagnostic(config_path) << '\n';
    return kUsage;
  }
  if (!config.outputs.empty() &&
      std::find(config.outputs.begin(), config.outputs.end(), command) == config.outputs.end()) {
    const size_t pos = text.find("\"outputs\"");
    const auto [line, column] = pos == std::string::npos ? std::pair{1, 1} : line_column(text, pos);
    err << ConfigError("output '" + command + "' is not enabled in 'outputs'", line, column).diagnostic(config_path)
        << '\n';
    return kUsage;
  }

  CommandResult result;
  try {
    result = run_command(command, config, seed, worker_count());
  } catch (const std::exception& e) {
    err << "fracherm: " << command << ": " << e.what() << '\n';
    return kInconclusive;
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (out_path != "-") {
    file.open(out_path, std::ios::binary);
    if (!file) {
      err << "fracherm: cannot write '" << out_path << "'\n";
      return kUsage;
    }
    sink = &file;
  }
  if (format == "csv") {
    write_csv(result.records, *sink);
  } else {
    write_json(result.records, *sink);
  }
  return result.exit_code;
}

}  // namespace fracherm::cli
