#include "wpt/runner.hpp"

#include <omp.h>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "wpt/experiments.hpp"
#include "wpt/hypersurface.hpp"
#include "wpt/weak_form.hpp"

namespace wpt {

namespace {

namespace ptree = boost::property_tree;
using Json = nlohmann::ordered_json;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num(long x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

class Section {
 public:
  Section(const ptree::ptree &root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(ptree::ptree::path_type(name_, '\0'))) tree_ = &*child;
  }

  [[nodiscard]] bool has(const std::string &key) const { return raw(key).has_value(); }

  template <class T>
  [[nodiscard]] T get(const std::string &key) const {
    const auto text = raw(key);
    if (!text) throw Error(ErrorCode::ConfigParse, "missing field [" + name_ + "] " + key);
    return parse<T>(key, *text);
  }

  template <class T>
  [[nodiscard]] std::vector<T> get_list(const std::string &key) const {
    const std::string text = get<std::string>(key);
    std::vector<T> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) out.push_back(parse<T>(key, trim(item)));
    if (out.empty()) throw Error(ErrorCode::ConfigParse, "field [" + name_ + "] " + key + " is an empty list");
    return out;
  }

 private:
  static std::string trim(const std::string &s) {
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t") - a + 1);
  }

  [[nodiscard]] std::optional<std::string> raw(const std::string &key) const {
    if (!tree_) return std::nullopt;
    auto v = tree_->get_optional<std::string>(ptree::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  template <class T>
  [[nodiscard]] T parse(const std::string &key, const std::string &text) const {
    if constexpr (std::is_same_v<T, std::string>) {
      return text;
    } else {
      T value{};
      const char *end = text.data() + text.size();
      const auto [ptr, ec] = std::from_chars(text.data(), end, value);
      if (ec != std::errc() || ptr != end || text.empty())
        throw Error(ErrorCode::ConfigParse, "field [" + name_ + "] " + key + ": cannot parse '" + text + "'");
      return value;
    }
  }

  std::string name_;
  const ptree::ptree *tree_ = nullptr;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  Json summary = Json::object();
};

struct Context {
  const Section &cfg;
  const RunRequest &request;

  [[nodiscard]] std::uint64_t seed() const {
    return request.seed ? *request.seed : cfg.get<std::uint64_t>("seed");
  }
};

Table ot_solve(const Context &ctx) {
  const std::string kind = ctx.cfg.get<std::string>("manifold");
  const int points = ctx.cfg.get<int>("points");
  const int instances = ctx.cfg.get<int>("instances");
  Rng rng(ctx.seed());
  Manifold M = Manifold::flat_torus(2);
  if (kind == "sphere") M = Manifold::sphere();
  else if (kind != "torus") throw Error(ErrorCode::ConfigParse, "field [ot-solve] manifold: expected torus or sphere");

  Table t{{"instance", "cost", "pivots", "marginal_error"}, {}};
  double total = 0.0;
  for (int i = 0; i < instances; ++i) {
    const ParticleMeasure mu = random_uniform_measure(M, points, rng);
    const ParticleMeasure nu = random_uniform_measure(M, points, rng);
    const Coupling c = solve_exact_ot(mu, nu);
    t.rows.push_back({num(i), num(c.cost), num(c.pivots), num(c.marginal_error())});
    total += c.cost;
  }
  t.summary["mean_cost"] = instances > 0 ? total / instances : 0.0;
  return t;
}

Table pt_delta(const Context &ctx) {
  const double length = ctx.cfg.get<double>("arc_length");
  const int particles = ctx.cfg.get<int>("particles");
  const double spread = ctx.cfg.get<double>("spread");
  const auto qs = ctx.cfg.get_list<int>("q_values");
  Rng rng(ctx.seed());
  const DeltaGeodesic g = sphere_meridian(length);
  const TangentMeasure nu1 = random_tangent_measure(g.manifold, g.at(1.0), particles, spread, rng);
  const TangentMeasure exact = exact_delta_transport(g, nu1);

  Table t{{"Q", "w2_error"}, {}};
  for (int Q : qs) {
    const TangentMeasure approx = petrunin_delta_transport(g, nu1, Q);
    t.rows.push_back({num(Q), num(tangent_w2(g.manifold, approx, exact))});
  }
  double speed = 0.0;
  for (size_t k = 0; k < nu1.fiber.vectors.size(); ++k) speed += nu1.fiber.weights[k] * nu1.fiber.vectors[k].norm();
  t.summary["mean_speed"] = speed;
  return t;
}

struct SmoothSetup {
  SmoothGeodesic geodesic;
  GridField eta1;
};

SmoothSetup smooth_setup(const Section &cfg) {
  const int n = cfg.get<int>("grid");
  const int K = cfg.get<int>("steps");
  const double eps = cfg.get<double>("epsilon");
  SmoothGeodesic g = cosine_geodesic(n, K, eps);
  GridField eta1 = reference_eta1(g);
  return {std::move(g), std::move(eta1)};
}

Json geodesic_summary(const SmoothGeodesic &g) {
  const auto &d = g.diagnostics();
  return {{"continuity_residual", d.continuity_residual},
          {"hj_residual", d.hj_residual},
          {"c2_norm", d.c2_norm},
          {"min_jacobian", d.min_jacobian}};
}

Table pt_smooth(const Context &ctx) {
  const auto [g, eta1] = smooth_setup(ctx.cfg);
  const TransportTriple eta = solve_pt_pde(g, eta1);
  const auto companions = reference_companions(g);
  std::vector<TransportTriple> bars;
  for (const auto &c : companions) bars.push_back(solve_pt_pde(g, c));

  Table t{{"k", "t", "norm_sq", "pairing_1", "pairing_2"}, {}};
  for (int k = 0; k <= g.steps(); ++k)
    t.rows.push_back({num(k), num(g.time(k)), num(pairing(g, eta.eta[k], eta.eta[k], k)),
                      num(pairing(g, eta.eta[k], bars[0].eta[k], k)), num(pairing(g, eta.eta[k], bars[1].eta[k], k))});
  t.summary["geodesic"] = geodesic_summary(g);
  t.summary["norm_drift"] = pairing_drift(g, eta, eta);
  t.summary["pairing_drift_1"] = pairing_drift(g, eta, bars[0]);
  t.summary["pairing_drift_2"] = pairing_drift(g, eta, bars[1]);
  return t;
}

Table pt_petrunin(const Context &ctx) {
  const auto [g, eta1] = smooth_setup(ctx.cfg);
  const auto qs = ctx.cfg.get_list<int>("q_values");
  const double tol = ctx.cfg.get<double>("tol");
  const int F = ctx.cfg.get<int>("max_frequency");
  const int D = ctx.cfg.get<int>("time_degree");
  const TransportTriple pde = solve_pt_pde(g, eta1);
  const GridField &rho0 = g.slice(0).rho;
  const GridVectorField ref0 = gradient(pde.eta0);

  Table t{{"Q", "error", "drift", "weak_residual", "energy", "max_inner_iterations", "max_contraction"}, {}};
  for (int Q : qs) {
    const PetruninRecord rec = petrunin_transport(g, eta1, Q, tol);
    const double err = weighted_norm(rho0, gradient(rec.triple.eta0) - ref0);
    t.rows.push_back({num(Q), num(err), num(rec.drift), num(residual_suite(g, rec.triple, F, D).max_residual),
                      num(transport_energy(g, rec.triple)), num(rec.max_inner_iterations), num(rec.max_contraction)});
  }
  t.summary["geodesic"] = geodesic_summary(g);
  t.summary["pde_weak_residual"] = residual_suite(g, pde, F, D).max_residual;
  return t;
}

Table weak_check(const Context &ctx) {
  const auto [g, eta1] = smooth_setup(ctx.cfg);
  const std::string source = ctx.cfg.get<std::string>("source");
  const int F = ctx.cfg.get<int>("max_frequency");
  const int D = ctx.cfg.get<int>("time_degree");
  TransportTriple triple;
  if (source == "pde") triple = solve_pt_pde(g, eta1);
  else if (source == "petrunin") triple = petrunin_transport(g, eta1, ctx.cfg.get<int>("segments")).triple;
  else throw Error(ErrorCode::ConfigParse, "field [weak-check] source: expected pde or petrunin");

  const SuiteResult suite = residual_suite(g, triple, F, D);
  Table t{{"kx", "ky", "kind", "degree", "residual"}, {}};
  for (const auto &r : suite.rows)
    t.rows.push_back({num(r.kx), num(r.ky), r.sine ? "sin" : "cos", num(r.degree), num(r.residual)});
  t.summary["max_residual"] = suite.max_residual;
  return t;
}

Table cylinder(const Context &ctx) {
  const auto ns = ctx.cfg.get_list<int>("n_values");
  const double amp = ctx.cfg.get<double>("amplitude");
  Table t{{"n", "lp_cost", "vertical_cost", "plan_is_vertical", "max_potential_error", "loop_integral",
           "max_tangential"},
          {}};
  for (int n : ns) {
    const CylinderReport r = cylinder_example([&](double x) { return 1.0 + amp * std::sin(x); }, n);
    t.rows.push_back({num(n), num(r.lp_cost), num(r.vertical_cost), r.plan_is_vertical ? "1" : "0",
                      num(r.max_potential_error), num(r.loop_integral), num(r.max_tangential)});
  }
  return t;
}

Table el(const Context &ctx) {
  const int n = ctx.cfg.get<int>("n");
  const double y0 = ctx.cfg.get<double>("y0");
  const double y1 = ctx.cfg.get<double>("y1");
  const double shift = ctx.cfg.get<double>("shift");
  const double amp = ctx.cfg.get<double>("amplitude");
  const auto levels = ctx.cfg.get_list<double>("levels");
  const Manifold T = Manifold::flat_torus(2);
  std::vector<ManifoldPoint> a, b;
  for (double x : cosine_quantiles(n, amp)) {
    a.push_back(T.point(x, y0));
    b.push_back(T.point(x + shift, y1));
  }
  const ElReport r = el_diagnostics(ParticleMeasure::uniform(T, a), ParticleMeasure::uniform(T, b), levels);
  Table t{{"t", "loop_integral", "decomposition_residual", "multiplier_residual", "mean_eta", "mean_half_speed_sq",
           "mean_half_ratio"},
          {}};
  for (const auto &L : r.levels)
    t.rows.push_back({num(L.t), num(L.loop_integral), num(L.decomposition_residual), num(L.max_multiplier_residual),
                      num(L.mean_eta), num(L.mean_half_speed_sq), num(L.mean_half_ratio)});
  t.summary["rays"] = r.rays;
  t.summary["max_speed_deviation"] = r.max_speed_deviation;
  return t;
}

Table cone(const Context &ctx) {
  const int samples = ctx.cfg.get<int>("samples");
  const int fiber = ctx.cfg.get<int>("fiber_size");
  const int triples = ctx.cfg.get<int>("triples");
  const double radius = ctx.cfg.get<double>("radius");
  Rng rng(ctx.seed());
  const Carrier S = Carrier::torus_circle(Manifold::flat_torus(2), Vec2(0.5, 0.5), radius, samples);
  const std::vector<double> w(samples, 1.0 / samples);
  Table t{{"triple", "d_ab", "d_bc", "d_ac", "triangle_slack"}, {}};
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < triples; ++i) {
    const ConeElement a = random_cone_element(S, w, fiber, rng);
    const ConeElement b = random_cone_element(S, w, fiber, rng);
    const ConeElement c = random_cone_element(S, w, fiber, rng);
    const double ab = cone_distance(a, b).distance, bc = cone_distance(b, c).distance,
                 ac = cone_distance(a, c).distance;
    const double slack = ab + bc - ac;
    worst = std::min(worst, slack);
    t.rows.push_back({num(i), num(ab), num(bc), num(ac), num(slack)});
  }
  t.summary["min_triangle_slack"] = triples > 0 ? worst : 0.0;
  return t;
}

using Command = std::function<Table(const Context &)>;

const std::map<std::string, Command> &registry() {
  static const std::map<std::string, Command> r = {
      {"ot-solve", ot_solve},         {"pt-delta", pt_delta}, {"pt-smooth", pt_smooth},
      {"pt-petrunin", pt_petrunin},   {"weak-check", weak_check}, {"cylinder-example", cylinder},
      {"el-diagnostics", el},         {"cone-distance", cone}};
  return r;
}

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::ResolutionMismatch:
    case ErrorCode::SizeCapExceeded:
    case ErrorCode::BaseMismatch:
    case ErrorCode::UnknownCommand:
    case ErrorCode::ConfigParse: return 2;
    default: return 3;
  }
}

void write_outputs(const RunRequest &req, const Table &t, double seconds) {
  std::ostringstream csv;
  for (size_t k = 0; k < t.columns.size(); ++k) csv << (k ? "," : "") << t.columns[k];
  csv << '\n';
  for (const auto &row : t.rows) {
    for (size_t k = 0; k < row.size(); ++k) csv << (k ? "," : "") << row[k];
    csv << '\n';
  }
  char footer[64];
  std::snprintf(footer, sizeof footer, "#wall_seconds,%.3f\n", seconds);
  csv << footer;

  std::ofstream out(req.out_path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open output file " + req.out_path);
  out << csv.str();

  Json side = {{"command", req.command}, {"columns", t.columns}, {"rows", t.rows.size()}, {"summary", t.summary}};
  std::ofstream js(req.out_path + ".json", std::ios::binary);
  if (!js) throw Error(ErrorCode::InvalidArgument, "cannot open output file " + req.out_path + ".json");
  js << side.dump(2) << '\n';
}

}  // namespace

const std::vector<std::string> &runner_commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto &[name, _] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

int run(const RunRequest &request, std::ostream &log) {
  try {
    const auto it = registry().find(request.command);
    if (it == registry().end()) throw Error(ErrorCode::UnknownCommand, "unknown command '" + request.command + "'");

    ptree::ptree root;
    try {
      ptree::read_ini(request.config_path, root);
    } catch (const ptree::ini_parser_error &e) {
      throw Error(ErrorCode::ConfigParse, e.what());
    }
    const Section cfg(root, request.command);
    const int threads = request.threads ? *request.threads : cfg.has("threads") ? cfg.get<int>("threads") : 0;
    if (threads < 0) throw Error(ErrorCode::ConfigParse, "field [" + request.command + "] threads must be >= 0");
    if (threads > 0) omp_set_num_threads(threads);

    const auto start = std::chrono::steady_clock::now();
    const Table table = it->second(Context{cfg, request});
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_outputs(request, table, seconds);
    return 0;
  } catch (const Error &e) {
    log << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception &e) {
    log << "error: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace wpt
