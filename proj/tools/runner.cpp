#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "excal/surface.hpp"
#include "json.hpp"

namespace excal::tool {
namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- helpers

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j[key].get<double>();
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number_integer())
    throw ConfigError(std::string(key) + " must be an integer");
  return j[key].get<int>();
}

std::vector<double> get_doubles(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    throw ConfigError(std::string(key) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number()) throw ConfigError(std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

ChartDomain parse_box(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be an object");
  return ChartDomain(get_doubles(j, "lo"), get_doubles(j, "hi"),
                     get_num(j, "margin", 0.0));
}

Expression parse_expr(const json& j, int dim, const char* what) {
  if (!j.is_string()) throw ConfigError(std::string(what) + " must be a string");
  try {
    return Expression::parse(j.get<std::string>(), dim);
  } catch (const std::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

std::vector<Expression> parse_exprs(const json& j, int dim, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + " must be an array");
  std::vector<Expression> out;
  for (const auto& v : j) out.push_back(parse_expr(v, dim, what));
  return out;
}

// FNV-1a over the canonical config text plus the resolved flags.
std::string digest(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ------------------------------------------------------ random generators

Expression random_term(std::mt19937_64& rng, int dim) {
  std::uniform_real_distribution<double> coeff(-1.5, 1.5);
  std::uniform_int_distribution<int> var(0, dim - 1);
  std::uniform_int_distribution<int> pick(0, 5);
  Expression c = Expression::constant(coeff(rng), dim);
  Expression xi = Expression::variable(var(rng), dim);
  switch (pick(rng)) {
    case 0: return c;
    case 1: return c * xi;
    case 2: return c * xi * Expression::variable(var(rng), dim);
    case 3: return c * xi.apply(Func::Sin);
    case 4: return c * xi.apply(Func::Cos);
    default: return c * (xi / Expression::constant(3.0, dim)).apply(Func::Exp);
  }
}

Expression random_expression(std::mt19937_64& rng, int dim) {
  return random_term(rng, dim) + random_term(rng, dim);
}

VectorField random_vector_field(std::mt19937_64& rng, const ChartDomain& dom) {
  std::vector<Expression> comps;
  for (int i = 0; i < dom.dim; ++i) comps.push_back(random_expression(rng, dom.dim));
  return VectorField(std::move(comps), dom);
}

DifferentialForm random_form(std::mt19937_64& rng, const ChartDomain& dom, int k) {
  std::vector<Expression> comps;
  auto count = static_cast<std::size_t>(binomial(dom.dim, k));
  for (std::size_t i = 0; i < count; ++i) comps.push_back(random_expression(rng, dom.dim));
  return DifferentialForm(k, std::move(comps), dom);
}

MultiVectorField random_decomposable(std::mt19937_64& rng, const ChartDomain& dom, int k) {
  std::vector<VectorField> factors;
  for (int i = 0; i < k; ++i) factors.push_back(random_vector_field(rng, dom));
  return MultiVectorField::decomposable(random_expression(rng, dom.dim),
                                        std::move(factors), dom);
}

PointSet random_points(std::mt19937_64& rng, const ChartDomain& dom, int count) {
  ChartDomain box = dom.inner();
  PointSet pts;
  std::vector<double> p(static_cast<std::size_t>(box.dim));
  for (int i = 0; i < count; ++i) {
    for (int a = 0; a < box.dim; ++a) {
      auto ua = static_cast<std::size_t>(a);
      std::uniform_real_distribution<double> dist(box.lo[ua], box.hi[ua]);
      p[ua] = dist(rng);
    }
    pts.push_back(p);
  }
  return pts;
}

AltTensor random_tensor(std::mt19937_64& rng, int n, int k, Variance var) {
  AltTensor t(n, k, var);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (auto& c : t.components()) c = dist(rng);
  return t;
}

// --------------------------------------------------------------- context

struct Context {
  json config;
  int dim = 0;
  ChartDomain domain;
  VolumeStructure volume;
  QuadratureSpec quad;
  std::map<std::string, VectorField> fields;
  std::map<std::string, MultiVectorField> multivectors;
  std::uint64_t seed = 0;
  int points = 25;
  std::optional<double> tol_override;

  const VectorField& field(const json& task, const char* key) const {
    if (!task.contains(key) || !task[key].is_string())
      throw ConfigError(std::string(key) + " must name a declared vector field");
    auto it = fields.find(task[key].get<std::string>());
    if (it == fields.end())
      throw ConfigError("undeclared vector field " + task[key].get<std::string>());
    return it->second;
  }
  const MultiVectorField& multivector(const json& task, const char* key) const {
    if (!task.contains(key) || !task[key].is_string())
      throw ConfigError(std::string(key) + " must name a declared multivector");
    auto it = multivectors.find(task[key].get<std::string>());
    if (it == multivectors.end())
      throw ConfigError("undeclared multivector " + task[key].get<std::string>());
    return it->second;
  }
  double tolerance(const json& task, double fallback) const {
    if (tol_override) return *tol_override;
    return get_num(task, "tolerance", fallback);
  }
};

Context build_context(const json& cfg, const RunOptions& opt) {
  Context ctx;
  ctx.config = cfg;
  if (!cfg.contains("dimension")) throw ConfigError("dimension is required");
  ctx.dim = get_int(cfg, "dimension", 0);
  if (ctx.dim < 1 || ctx.dim > 6) throw ConfigError("dimension must be in 1..6");
  if (!cfg.contains("domain")) throw ConfigError("domain is required");
  ctx.domain = parse_box(cfg["domain"], "domain");
  if (ctx.domain.dim != ctx.dim) throw ConfigError("domain box does not match dimension");
  if (!cfg.contains("density")) throw ConfigError("density is required");
  ctx.volume = VolumeStructure(
      ScalarField(parse_expr(cfg["density"], ctx.dim, "density"), ctx.domain));

  if (cfg.contains("quadrature")) {
    const json& q = cfg["quadrature"];
    ctx.quad.nodes_per_axis = get_int(q, "nodes_per_axis", 32);
    ctx.quad.panels = get_int(q, "panels", 1);
    ctx.quad.samples = get_int(q, "samples", 100000);
  }
  ctx.seed = opt.seed ? *opt.seed
                      : static_cast<std::uint64_t>(get_num(cfg, "seed", 0.0));
  ctx.quad.seed = ctx.seed;
  ctx.points = opt.points ? *opt.points : get_int(cfg, "points", 25);
  if (ctx.points < 1) throw ConfigError("points must be positive");
  ctx.tol_override = opt.tol;

  if (cfg.contains("fields")) {
    if (!cfg["fields"].is_object()) throw ConfigError("fields must be an object");
    for (const auto& [name, comps] : cfg["fields"].items())
      ctx.fields.emplace(name, VectorField(parse_exprs(comps, ctx.dim, name.c_str()),
                                           ctx.domain));
  }
  if (cfg.contains("multivectors")) {
    if (!cfg["multivectors"].is_object())
      throw ConfigError("multivectors must be an object");
    for (const auto& [name, spec] : cfg["multivectors"].items()) {
      if (!spec.is_object() || !spec.contains("factors"))
        throw ConfigError(name + " must be an object with coeff and factors");
      Expression coeff = spec.contains("coeff")
                             ? parse_expr(spec["coeff"], ctx.dim, "coeff")
                             : Expression::constant(1.0, ctx.dim);
      std::vector<VectorField> factors;
      for (const auto& f : spec["factors"])
        factors.emplace_back(parse_exprs(f, ctx.dim, "factor"), ctx.domain);
      ctx.multivectors.emplace(
          name, MultiVectorField::decomposable(coeff, std::move(factors), ctx.domain));
    }
  }
  return ctx;
}

SurfaceSetup build_surface(const Context& ctx, std::vector<double>& radii) {
  if (!ctx.config.contains("surface"))
    throw ConfigError("surface block is required for this task");
  const json& s = ctx.config["surface"];
  StraighteningMap chart;
  chart.dim = ctx.dim;
  chart.codim = get_int(s, "codimension", 1);
  if (chart.codim < 1 || chart.codim >= ctx.dim)
    throw ConfigError("codimension must be in 1..dimension-1");
  chart.forward = parse_exprs(s.at("forward"), ctx.dim, "surface.forward");
  if (s.contains("inverse"))
    chart.inverse = parse_exprs(s["inverse"], ctx.dim, "surface.inverse");
  chart.chart_box = parse_box(s.at("chart_box"), "surface.chart_box");
  if (!chart.inverse.empty()) chart.self_check();

  ElementarySurface surf{chart, parse_box(s.at("param_box"), "surface.param_box"),
                         get_num(s, "epsilon", 0.0)};

  TransversalSystem sys;
  if (!s.contains("transversal") || !s["transversal"].is_array())
    throw ConfigError("surface.transversal must be an array of vector fields");
  for (const auto& f : s["transversal"])
    sys.fields.emplace_back(parse_exprs(f, ctx.dim, "transversal"), ctx.domain);
  if (static_cast<int>(sys.fields.size()) != chart.codim)
    throw ConfigError("transversal system must have codimension many fields");
  if (s.contains("h") && !chart.inverse.empty()) {
    sys.alpha = TransversalSystem::associated_form(
        chart, parse_expr(s["h"], chart.codim, "surface.h"), ctx.domain);
  }

  FlowEngine eng{get_num(s, "flow_step", 1e-3), 10000000, ctx.domain};
  SurfaceSetup setup{surf,      sys,
                     eng,       ctx.volume,
                     ctx.quad,  get_int(s, "ball_radial_nodes", 12),
                     get_int(s, "ball_angular_nodes", 16)};
  radii = s.contains("radii") ? get_doubles(s, "radii")
                              : std::vector<double>{0.2, 0.1, 0.05, 0.025};
  return setup;
}

// ----------------------------------------------------------------- tasks

struct Worst {
  bool any = false;
  double residual = 0.0;
  std::string task;
  std::vector<double> point;

  void offer(const std::string& t, double r, const std::vector<double>& p) {
    if (!any || r > residual) {
      any = true;
      residual = r;
      task = t;
      point = p;
    }
  }
};

json report_identity(const IdentityReport& rep) {
  return json{{"name", rep.name},
              {"samples", rep.samples},
              {"max_abs", rep.max_abs},
              {"max_rel", rep.max_rel},
              {"scale", rep.scale},
              {"worst_point", rep.worst_point}};
}

json run_adjunctions(Context& ctx, const json& task, std::mt19937_64& rng, Worst& worst) {
  int max_dim = std::min(get_int(task, "max_dim", 4), 5);
  int trials = get_int(task, "trials", 60);
  double tol = ctx.tolerance(task, 1e-12);
  double worst_i = 0.0, worst_j = 0.0;
  long cases = 0;
  for (int n = 2; n <= max_dim; ++n) {
    for (int k = 1; k <= n; ++k)
      for (int m = 1; m <= k; ++m)
        for (int t = 0; t < trials; ++t) {
          AltTensor w = random_tensor(rng, n, k, Variance::Covector);
          AltTensor x = random_tensor(rng, n, m, Variance::Vector);
          AltTensor z = random_tensor(rng, n, k - m, Variance::Vector);
          double lhs = pair(interior_by_multivector(w, x), z);
          double rhs = pair(w, wedge(x, z));
          worst_i = std::max(worst_i, std::abs(lhs - rhs) /
                                          (1.0 + std::max(std::abs(lhs), std::abs(rhs))));
          ++cases;
        }
    for (int m = 1; m <= n; ++m)
      for (int k = 0; k <= m; ++k)
        for (int t = 0; t < trials; ++t) {
          AltTensor w = random_tensor(rng, n, k, Variance::Covector);
          AltTensor eta = random_tensor(rng, n, m - k, Variance::Covector);
          AltTensor x = random_tensor(rng, n, m, Variance::Vector);
          double lhs = pair(eta, interior_by_form(w, x));
          double rhs = pair(wedge(w, eta), x);
          worst_j = std::max(worst_j, std::abs(lhs - rhs) /
                                          (1.0 + std::max(std::abs(lhs), std::abs(rhs))));
          ++cases;
        }
  }
  bool pass = worst_i <= tol && worst_j <= tol;
  if (!pass) worst.offer("adjunctions", std::max(worst_i, worst_j), {});
  return json{{"task", "adjunctions"}, {"pass", pass},       {"tolerance", tol},
              {"cases", cases},        {"max_rel_i", worst_i}, {"max_rel_j", worst_j}};
}

json run_identity_suite(Context& ctx, const json& task, const std::string& kind,
                        std::mt19937_64& rng, Worst& worst) {
  int trials = get_int(task, "trials", 5);
  double fallback = kind == "lemma1" ? 1e-10 : kind == "aux" ? 1e-10
                    : kind == "leibniz" ? 1e-9 : 1e-8;
  double tol = ctx.tolerance(task, fallback);
  int n = ctx.dim;
  IdentityReport worst_rep;
  int cases = 0;
  auto consider = [&](const IdentityReport& rep) {
    if (cases == 0 || rep.max_rel > worst_rep.max_rel) worst_rep = rep;
    ++cases;
  };
  for (int t = 0; t < trials; ++t) {
    if (kind == "lemma1") {
      for (int k = 1; k <= n; ++k)
        consider(check_lemma1(random_form(rng, ctx.domain, k),
                              random_decomposable(rng, ctx.domain, k), ctx.volume,
                              random_points(rng, ctx.domain, ctx.points)));
    } else if (kind == "aux") {
      for (int m = 1; m <= n; ++m)
        for (int k = 0; k <= m; ++k)
          consider(check_aux(random_form(rng, ctx.domain, k),
                             random_decomposable(rng, ctx.domain, m), ctx.volume,
                             random_points(rng, ctx.domain, ctx.points)));
    } else if (kind == "leibniz") {
      for (int m = 2; m <= n; ++m)
        for (int k = 1; k < m; ++k)
          consider(check_leibniz_j(random_form(rng, ctx.domain, k),
                                   random_decomposable(rng, ctx.domain, m), ctx.volume,
                                   random_points(rng, ctx.domain, ctx.points)));
    } else {  // agreement
      for (int k = 1; k <= n; ++k)
        consider(check_operator_agreement(random_decomposable(rng, ctx.domain, k),
                                          ctx.volume,
                                          random_points(rng, ctx.domain, ctx.points)));
    }
  }
  bool pass = worst_rep.max_rel <= tol;
  if (!pass) worst.offer(kind, worst_rep.max_rel, worst_rep.worst_point);
  return json{{"task", kind},
              {"pass", pass},
              {"tolerance", tol},
              {"cases", cases},
              {"worst", report_identity(worst_rep)}};
}

json run_weakdiv(Context& ctx, const json& task, Worst& worst) {
  const MultiVectorField& z = ctx.multivector(task, "multivector");
  if (!task.contains("bump")) throw ConfigError("weakdiv needs a bump test-form spec");
  Bump bump{get_doubles(task["bump"], "center"), get_num(task["bump"], "radius", 1.0)};
  if (static_cast<int>(bump.center.size()) != ctx.dim)
    throw ConfigError("bump center dimension mismatch");
  double tol = ctx.tolerance(task, 1e-6);
  bool corrupt = task.contains("corrupt") && task["corrupt"].get<bool>();

  MultiVectorField w = div_strong(z, ctx.volume);
  if (corrupt) {
    std::vector<VectorField> factors;
    for (int i = 0; i + 1 < z.grade(); ++i)
      factors.push_back(VectorField::basis(i, ctx.domain));
    w = add(w, MultiVectorField::decomposable(Expression::constant(1.0, ctx.dim),
                                              std::move(factors), ctx.domain));
  }
  const auto& mis = multi_indices(ctx.dim, z.grade() - 1);
  std::vector<MultiIndex> selected(mis.begin(),
                                   mis.begin() + std::min<std::size_t>(2, mis.size()));
  DifferentialForm omega =
      make_bump_form(z.grade() - 1, bump.center, bump.radius, selected, ctx.domain);
  WeakDivResult res = weak_div_residual(z, w, omega, ctx.volume, ctx.quad, bump);
  double rel = res.residual / res.scale;
  bool pass = rel <= tol;
  if (!pass) worst.offer("weakdiv", rel, bump.center);
  return json{{"task", "weakdiv"},
              {"pass", pass},
              {"tolerance", tol},
              {"corrupt", corrupt},
              {"residual", res.residual},
              {"relative", rel},
              {"error_estimate", res.error_estimate},
              {"scale", res.scale}};
}

json run_div(Context& ctx, const json& task, Worst& worst) {
  const MultiVectorField& z = ctx.multivector(task, "multivector");
  int grid = get_int(task, "grid", 3);
  if (grid < 1) throw ConfigError("grid must be positive");
  double tol = ctx.tolerance(task, 1e-8);
  MultiVectorField strong = div_strong(z, ctx.volume);
  MultiVectorField recursive = div_recursive(z, ctx.volume);
  const auto& mis = multi_indices(ctx.dim, z.grade() - 1);

  ChartDomain box = ctx.domain.inner();
  std::vector<double> p(static_cast<std::size_t>(ctx.dim));
  std::vector<int> idx(static_cast<std::size_t>(ctx.dim), 0);
  json rows = json::array();
  double worst_dis = 0.0;
  bool done = false;
  while (!done) {
    for (int a = 0; a < ctx.dim; ++a) {
      auto ua = static_cast<std::size_t>(a);
      double f = grid == 1 ? 0.5 : static_cast<double>(idx[ua]) / (grid - 1);
      p[ua] = box.lo[ua] + f * (box.hi[ua] - box.lo[ua]);
    }
    AltTensor s = strong.at_components(p);
    AltTensor r = recursive.at(p);
    double dis = (s - r).norm() / (1.0 + s.norm());
    worst_dis = std::max(worst_dis, dis);
    json comps = json::array();
    for (const auto& mi : mis) comps.push_back(s[mi]);
    rows.push_back(json{{"point", p}, {"components", comps}, {"disagreement", dis}});
    done = true;
    for (int a = ctx.dim - 1; a >= 0; --a) {
      auto ua = static_cast<std::size_t>(a);
      if (++idx[ua] < grid) {
        done = false;
        break;
      }
      idx[ua] = 0;
    }
  }
  bool pass = worst_dis <= tol;
  if (!pass) worst.offer("div", worst_dis, p);
  json indices = json::array();
  for (const auto& mi : mis) indices.push_back(mi);
  return json{{"task", "div"},        {"pass", pass},
              {"tolerance", tol},     {"grade", z.grade() - 1},
              {"indices", indices},   {"max_disagreement", worst_dis},
              {"rows", rows}};
}

json run_surface(Context& ctx, const json& task, Worst& worst) {
  std::vector<double> radii;
  SurfaceSetup setup = build_surface(ctx, radii);
  double tol = ctx.tolerance(task, 1e-4);
  double direct_tol = get_num(task, "direct_tolerance", 1e-8);
  SurfaceMeasureReport rep = surface_measure(setup, radii);

  double err;
  bool pass;
  if (task.contains("oracle")) {
    double oracle = get_num(task, "oracle", 0.0);
    err = std::abs(rep.sigma_extrapolated - oracle);
    pass = err <= tol && std::abs(rep.sigma_direct - oracle) <= direct_tol;
  } else {
    err = std::abs(rep.sigma_extrapolated - rep.sigma_direct);
    pass = err <= tol;
  }
  pass = pass && rep.monotone_ok;
  if (!pass) worst.offer("surface", err, {});
  json table = json::array();
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    table.push_back(json{{"r", rep.radii[i]},
                         {"sigma_r", rep.sigma_r[i]},
                         {"quadrature_error", rep.sigma_err[i]}});
  return json{{"task", "surface"},
              {"pass", pass},
              {"tolerance", tol},
              {"direct_tolerance", direct_tol},
              {"table", table},
              {"sigma_extrapolated", rep.sigma_extrapolated},
              {"sigma_direct", rep.sigma_direct},
              {"extrapolation_vs_oracle", err},
              {"observed_order", rep.observed_order},
              {"monotone_ok", rep.monotone_ok}};
}

json run_theorem2(Context& ctx, const json& task, Worst& worst) {
  std::vector<double> radii;
  SurfaceSetup setup = build_surface(ctx, radii);
  const VectorField& z = ctx.field(task, "field");
  int q = ctx.dim - setup.surface.chart.codim;
  Expression u = task.contains("u") ? parse_expr(task["u"], q, "u")
                                    : Expression::constant(1.0, q);
  double tol = ctx.tolerance(task, 1e-4);
  Theorem2Report rep = theorem2_check(setup, z, u, radii);
  bool pass = rep.difference <= tol;
  if (!pass) worst.offer("theorem2", rep.difference, {});
  json table = json::array();
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    table.push_back(json{{"r", rep.radii[i]}, {"rhs_r", rep.rhs_r[i]}});
  return json{{"task", "theorem2"},
              {"pass", pass},
              {"tolerance", tol},
              {"lhs", rep.lhs},
              {"table", table},
              {"rhs_extrapolated", rep.rhs_extrapolated},
              {"difference", rep.difference},
              {"observed_order", rep.observed_order},
              {"max_abs_div_lift", rep.max_abs_div_lift}};
}

json run_restriction(Context& ctx, const json& task, Worst& worst) {
  std::vector<double> radii;
  SurfaceSetup setup = build_surface(ctx, radii);
  const VectorField& z = ctx.field(task, "field");
  int q = ctx.dim - setup.surface.chart.codim;
  Expression density = task.contains("surface_density")
                           ? parse_expr(task["surface_density"], q, "surface_density")
                           : Expression::constant(1.0, q);
  Expression h = task.contains("h")
                     ? parse_expr(task["h"], setup.surface.chart.codim, "h")
                     : Expression::constant(1.0, setup.surface.chart.codim);
  int samples = get_int(task, "samples", 50);
  double tol = ctx.tolerance(task, 1e-6);
  IdentityReport rep = restriction_check(setup, z, density, h, samples);
  bool pass = rep.max_abs <= tol;
  if (!pass) worst.offer("restriction", rep.max_abs, rep.worst_point);
  return json{{"task", "restriction"},
              {"pass", pass},
              {"tolerance", tol},
              {"report", report_identity(rep)}};
}

// ------------------------------------------------------------------ csv

void csv_flatten(const json& j, const std::string& prefix, std::string& out,
                 const std::string& task) {
  if (j.is_object()) {
    for (const auto& [key, val] : j.items())
      csv_flatten(val, prefix.empty() ? key : prefix + "." + key, out, task);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i)
      csv_flatten(j[i], prefix + "[" + std::to_string(i) + "]", out, task);
  } else {
    out += task + "," + prefix + "," + j.dump() + "\n";
  }
}

std::string to_csv(const json& tasks) {
  std::string out = "task,metric,value\n";
  for (const auto& t : tasks) {
    std::string name = t.value("task", "");
    for (const auto& [key, val] : t.items())
      if (key != "task") csv_flatten(val, key, out, name);
  }
  return out;
}

const std::set<std::string> kCheckKinds{"adjunctions", "lemma1", "aux",
                                        "leibniz", "agreement", "weakdiv"};

bool selected(const std::string& mode, const std::string& kind) {
  if (mode.empty()) return true;
  if (mode == "check") return kCheckKinds.count(kind) > 0;
  return mode == kind;
}

}  // namespace

RunOutcome run_config(const std::string& config_text, const RunOptions& options) {
  json cfg;
  try {
    cfg = json::parse(config_text);
  } catch (const std::exception& e) {
    return {2, std::string("config parse error: ") + e.what()};
  }

  try {
    Context ctx = build_context(cfg, options);
    if (!cfg.contains("tasks") || !cfg["tasks"].is_array())
      throw ConfigError("tasks must be an array");

    std::vector<json> chosen;
    for (const auto& task : cfg["tasks"]) {
      if (!task.is_object() || !task.contains("task") || !task["task"].is_string())
        throw ConfigError("each task needs a task kind");
      if (selected(options.mode, task["task"].get<std::string>())) chosen.push_back(task);
    }
    if (chosen.empty()) throw ConfigError("no tasks");

    std::mt19937_64 rng(ctx.seed);
    Worst worst;
    json results = json::array();
    for (const auto& task : chosen) {
      std::string kind = task["task"].get<std::string>();
      if (kind == "adjunctions")
        results.push_back(run_adjunctions(ctx, task, rng, worst));
      else if (kind == "lemma1" || kind == "aux" || kind == "leibniz" ||
               kind == "agreement")
        results.push_back(run_identity_suite(ctx, task, kind, rng, worst));
      else if (kind == "weakdiv")
        results.push_back(run_weakdiv(ctx, task, worst));
      else if (kind == "div")
        results.push_back(run_div(ctx, task, worst));
      else if (kind == "surface")
        results.push_back(run_surface(ctx, task, worst));
      else if (kind == "theorem2")
        results.push_back(run_theorem2(ctx, task, worst));
      else if (kind == "restriction")
        results.push_back(run_restriction(ctx, task, worst));
      else
        throw ConfigError("unknown task kind " + kind);
    }

    bool pass = !worst.any;
    json report{{"version", "1.0.0"},
                {"mode", options.mode.empty() ? "all" : options.mode},
                {"seed", ctx.seed},
                {"points", ctx.points},
                {"format", options.format},
                {"config_digest",
                 digest(cfg.dump() + "|" + options.mode + "|" +
                        std::to_string(ctx.seed) + "|" + std::to_string(ctx.points))},
                {"pass", pass},
                {"tasks", results}};
    if (!pass)
      report["worst"] = json{{"task", worst.task},
                             {"residual", worst.residual},
                             {"point", worst.point}};
    std::string text =
        options.format == "csv" ? to_csv(results) : report.dump(2) + "\n";
    return {pass ? 0 : 1, std::move(text)};
  } catch (const std::exception& e) {
    return {2, std::string("config error: ") + e.what()};
  }
}

}  // namespace excal::tool
