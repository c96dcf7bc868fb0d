#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "wentzell/config.hpp"
#include "wentzell/dynamics.hpp"
#include "wentzell/experiments.hpp"
#include "wentzell/io.hpp"
#include "wentzell/metric.hpp"
#include "wentzell/otto.hpp"
#include "wentzell/transport.hpp"

namespace fs = std::filesystem;
using namespace wentzell;
using nlohmann::json;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_r, n_theta, resolution;
  std::vector<double> a, h;
  std::optional<double> dt, T;
};

ExperimentConfig resolve(const Overrides& o) {
  auto cfg = load_config_or_default(o.config);
  if (o.out) cfg.out_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.n_r) cfg.n_r = *o.n_r;
  if (o.n_theta) cfg.n_theta = *o.n_theta;
  if (o.resolution) cfg.resolution = *o.resolution;
  if (!o.a.empty()) cfg.a = o.a;
  if (!o.h.empty()) cfg.jko_h = o.h;
  if (o.dt) cfg.dt = *o.dt;
  if (o.T) cfg.T = *o.T;
  cfg.validate();
  return cfg;
}

std::string tag(double a) { return "a" + format_double(a); }

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat flow with Wentzell boundary conditions: operators, refraction distance, JKO"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--seed", o.seed, "random seed");
  app.add_option("--n-r", o.n_r, "radial rings");
  app.add_option("--n-theta", o.n_theta, "angular sectors");
  app.add_option("--a", o.a, "boundary diffusivity list")->delimiter(',');
  app.add_option("--jko-h", o.h, "JKO step list")->delimiter(',');
  app.add_option("--dt", o.dt, "time step");
  app.add_option("--T", o.T, "final time");
  app.add_option("--resolution", o.resolution, "distance grid resolution");

  auto* mesh_cmd = app.add_subcommand("mesh-info", "print mesh and operator statistics");

  std::string init = "cosine";
  auto* heat_cmd = app.add_subcommand("heat", "run the heat flow for every a and write heat_a<a>.csv");
  heat_cmd->add_option("--init", init, "initial mu-density")->check(CLI::IsMember({"uniform", "cosine"}));

  std::vector<double> from, to;
  double point_a = 1.0;
  auto* dist_cmd = app.add_subcommand("distance", "refraction distance between two points");
  auto* geo_cmd = app.add_subcommand("geodesic", "geodesic polyline between two points");
  for (auto* c : {dist_cmd, geo_cmd}) {
    c->add_option("--from", from, "x y")->expected(2)->required();
    c->add_option("--to", to, "x y")->expected(2)->required();
    c->add_option("--metric-a", point_a, "boundary diffusivity of the metric");
  }

  double jko_a = 1.0, jko_T = 0.05;
  auto* jko_cmd = app.add_subcommand("jko", "JKO flow on the coarse mesh; writes jko.csv and the cost matrix");
  jko_cmd->add_option("--metric-a", jko_a, "metric used for the transport cost");
  jko_cmd->add_option("--until", jko_T, "final time");

  std::string exp_name;
  auto* exp_cmd = app.add_subcommand("exp", "run an experiment");
  exp_cmd->add_option("name", exp_name, "nogo | varadhan | snell | ede | envelope | all")
      ->required()
      ->check(CLI::IsMember({"nogo", "varadhan", "snell", "ede", "envelope", "all"}));

  auto* report_cmd = app.add_subcommand("report", "aggregate experiment summaries into summary.json");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(o);
    const fs::path out(cfg.out_dir);

    if (mesh_cmd->parsed()) {
      const DiskMesh mesh(cfg.n_r, cfg.n_theta);
      json per_a = json::array();
      for (double a : cfg.a) {
        const OperatorSet ops(mesh, a);
        std::vector<double> x(mesh.size());
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = mesh.position(k).x;
        per_a.push_back({{"a", a},
                         {"nonzeros", ops.stiffness().nnz()},
                         {"bandwidth", ops.stiffness().bandwidth()},
                         {"energy_of_x", ops.dirichlet_form(x)}});
      }
      double wsum = 0;
      for (double w : mesh.weights()) wsum += w;
      print({{"n_r", mesh.n_r()},
             {"n_theta", mesh.n_theta()},
             {"nodes", mesh.size()},
             {"interior_nodes", mesh.interior_size()},
             {"boundary_nodes", mesh.n_theta()},
             {"c", mesh.c()},
             {"weight_sum", wsum},
             {"operators", per_a}});
      return 0;
    }

    if (heat_cmd->parsed()) {
      const DiskMesh mesh(cfg.n_r, cfg.n_theta);
      std::vector<double> f(mesh.size(), 1.0);
      if (init == "cosine") f = cosine_density(mesh);
      const auto rho0 = rho_from_mu_density(mesh, f);
      json res = json::array();
      for (double a : cfg.a) {
        const OperatorSet ops(mesh, a);
        const auto tr = solve_heat(ops, rho0, cfg.T, cfg.dt);
        const auto path = out / ("heat_" + tag(a) + ".csv");
        write_heat_csv(path, ops, tr, cfg.hash());
        res.push_back({{"a", a},
                       {"file", path.string()},
                       {"steps", tr.states.size() - 1},
                       {"final_mass", total_mass(mesh, tr.states.back())},
                       {"final_entropy", entropy(mesh, tr.states.back())},
                       {"final_boundary_mass", boundary_mass(mesh, tr.states.back())}});
      }
      print(res);
      return 0;
    }

    if (dist_cmd->parsed() || geo_cmd->parsed()) {
      const Point2 x{from[0], from[1]}, y{to[0], to[1]};
      const RefractionMetric metric(point_a, cfg.resolution);
      if (dist_cmd->parsed()) {
        print({{"a", point_a},
               {"distance", metric.distance(x, y)},
               {"graph", metric.graph().distance(x, y)},
               {"optimiser", optimal_route(point_a, x, y).length},
               {"chord", std::hypot(x.x - y.x, x.y - y.y)}});
      } else {
        const auto g = metric.geodesic(x, y);
        const auto path = out / ("geodesic_" + tag(point_a) + ".json");
        auto j = geodesic_json(g);
        write_json(path, j);
        print({{"file", path.string()},
               {"weighted_length", g.weighted_length},
               {"fallback", g.fallback},
               {"entry_angle_deg", j.contains("entry_angle_deg") ? j["entry_angle_deg"] : json(nullptr)}});
      }
      return 0;
    }

    if (jko_cmd->parsed()) {
      const DiskMesh mesh(cfg.jko_n_r, cfg.jko_n_theta);
      const auto C = cost_matrix(jko_a, mesh_points(mesh), cfg.resolution);
      write_cost_matrix(out / ("cost_" + tag(jko_a)), C);
      JkoConfig jc;
      jc.h = cfg.jko_h.front();
      jc.epsilon = cfg.jko_epsilon;
      jc.max_iter = cfg.jko_max_iter;
      jc.cost = &C;
      const auto tr = jko_flow(rho_from_mu_density(mesh, cosine_density(mesh)), jc, jko_T, mesh);
      write_jko_csv(out / "jko.csv", mesh, tr, cfg.hash());
      print({{"h", jc.h},
             {"steps", tr.states.size() - 1},
             {"final_entropy", tr.entropy.back()},
             {"final_boundary_mass", boundary_mass(mesh, tr.states.back())}});
      return 0;
    }

    if (exp_cmd->parsed()) {
      std::vector<std::string> names = exp_name == "all" ? experiment_names() : std::vector<std::string>{exp_name};
      bool pass = true;
      for (const auto& n : names) {
        const auto r = run_experiment(n, cfg);
        pass = pass && r.pass;
        std::printf("%s: %s\n", n.c_str(), r.pass ? "pass" : "FAIL");
        std::cout << r.metrics.dump(2) << '\n';
      }
      return pass ? 0 : 2;
    }

    if (report_cmd->parsed()) {
      const auto rep = emit_report(out);
      print(rep);
      return rep.at("all_pass").get<bool>() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
