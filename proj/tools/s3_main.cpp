// s3: command-line frontend for the sub-Riemannian 3-sphere kernel.
//
//   s3 geodesic  --lambda L [--p x1,y1,x2,y2] [--v-theta T] ... --out PREFIX
//   s3 surface   sphere|clifford|ruled|cmc-torus|rotational ... --out PREFIX
//   s3 verify    [--suite frames|geodesics|surfaces|rotational|all]
//
// Outputs are deterministic: CSV uses 17 significant digits, JSON carries a
// schema version.  S3_THREADS caps the worker pool used for grid generation.
//
// Exit codes: 0 ok, 1 verify failures, 2 invalid flags, 3 numeric failure,
// 4 a paper-invariant check failed beyond tolerance.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "s3/cmc_torus.hpp"
#include "s3/geodesic.hpp"
#include "s3/mesh.hpp"
#include "s3/profile.hpp"
#include "s3/surfaces.hpp"
#include "s3/verify.hpp"

using json = nlohmann::ordered_json;

namespace {

struct InvariantFailure {
  std::string name;
  double value;
  double tolerance;
};

s3::Vec4 parse_vec4(const std::string& text, const char* what) {
  s3::Vec4 v;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf", &v[0], &v[1], &v[2], &v[3]) != 4)
    throw CLI::ValidationError(what, "expected four comma-separated numbers");
  return v;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << text;
}

void write_report(const std::string& path, const json& report) {
  write_text(path, report.dump(2) + "\n");
}

struct MeshStats {
  double h_mean = 0.0;
  double h_stddev = 0.0;
  std::size_t singular_points = 0;
  std::size_t samples = 0;
};

MeshStats curvature_stats(const std::vector<const s3::ParamPatch*>& patches) {
  MeshStats stats;
  std::vector<double> values;
  for (const s3::ParamPatch* patch : patches) {
    const std::size_t du = std::max<std::size_t>(1, patch->nu / 48);
    const std::size_t dv = std::max<std::size_t>(1, patch->nv / 48);
    // curvature estimates need interior points on clamped axes
    const std::size_t i0 = patch->meta.periodic_u ? 0 : 2;
    const std::size_t j0 = patch->meta.periodic_v ? 0 : 2;
    for (std::size_t i = i0; i + i0 < patch->nu; i += du) {
      for (std::size_t j = j0; j + j0 < patch->nv; j += dv) {
        if (!patch->singular_flag.empty() && patch->singular_flag[i * patch->nv + j]) {
          ++stats.singular_points;
          continue;
        }
        const s3::SurfaceFrame f = frame_at_patch(*patch, i, j);
        if (f.singular) {
          ++stats.singular_points;
          continue;
        }
        if (f.nh_norm < 1e-2) continue;  // too close to the singular set
        values.push_back(s3::mean_curvature_estimate(*patch, i, j).H);
      }
    }
  }
  stats.samples = values.size();
  if (!values.empty()) {
    stats.h_mean = std::accumulate(values.begin(), values.end(), 0.0) / values.size();
    double var = 0.0;
    for (double v : values) var += (v - stats.h_mean) * (v - stats.h_mean);
    stats.h_stddev = std::sqrt(var / values.size());
  }
  return stats;
}

void export_meshes(const std::vector<const s3::ParamPatch*>& patches, const s3::Vec4& pole,
                   const std::string& out_prefix, json& report) {
  std::size_t dropped = 0;
  std::string obj;
  std::string csv = "sheet,vertex,nh_norm,mean_curvature,singular\r\n";
  std::size_t offset = 0;
  for (std::size_t k = 0; k < patches.size(); ++k) {
    const s3::SurfaceMesh mesh = s3::build_mesh(*patches[k], pole);
    dropped += mesh.dropped_vertices;
    obj += "o sheet" + std::to_string(k) + "\n";
    for (const s3::Vec3& v : mesh.vertices)
      obj += "v " + s3::format_float(v[0]) + ' ' + s3::format_float(v[1]) + ' ' +
             s3::format_float(v[2]) + "\n";
    for (const auto& f : mesh.faces)
      obj += "f " + std::to_string(f[0] + 1 + offset) + ' ' + std::to_string(f[1] + 1 + offset) +
             ' ' + std::to_string(f[2] + 1 + offset) + "\n";
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      const s3::VertexAttributes& a = mesh.attributes[i];
      csv += std::to_string(k) + ',' + std::to_string(i + 1 + offset) + ',' +
             s3::format_float(a.nh_norm) + ',' + s3::format_float(a.mean_curvature) + ',' +
             (a.singular ? "1" : "0") + "\r\n";
    }
    offset += mesh.vertices.size();
  }
  write_text(out_prefix + ".obj", obj);
  write_text(out_prefix + "_attrs.csv", csv);
  report["dropped_vertices"] = dropped;
}

int run_geodesic(double lambda, const std::string& p_text, double v_theta, double length,
                 int samples, const std::string& out, const s3::RationalityPolicy& policy) {
  if (samples < 2) throw CLI::ValidationError("--samples", "need at least 2");
  const s3::Vec4 p = s3::renormalized(parse_vec4(p_text, "--p"));
  const s3::GeodesicSpec spec = s3::geodesic_from_angle(p, v_theta, lambda);

  std::string csv = "s,x1,y1,x2,y2,hopf_y1,hopf_x2,hopf_y2\r\n";
  double residual_max = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double s = length * k / (samples - 1);
    const s3::Vec4 g = s3::geodesic_point(spec, s);
    const s3::Vec3 image = s3::hopf(g);
    residual_max = std::max(residual_max, s3::geodesic_ode_residual(spec, s));
    csv += s3::format_float(s);
    for (int c = 0; c < 4; ++c) csv += "," + s3::format_float(g[c]);
    for (int c = 0; c < 3; ++c) csv += "," + s3::format_float(image[c]);
    csv += "\r\n";
  }
  write_text(out + ".csv", csv);

  const s3::GeodesicClass cls = s3::classify_geodesic(lambda, policy);
  json report;
  report["schema"] = 1;
  report["lambda"] = lambda;
  report["ratio"] = cls.ratio;
  report["kind"] = cls.kind == s3::OrbitKind::closed ? "Closed" : "Dense";
  report["rho"] = cls.rho;
  report["slope"] = cls.slope;
  if (cls.period) report["period"] = *cls.period;
  if (cls.approx)
    report["ratio_fraction"] = {{"num", cls.approx->num}, {"den", cls.approx->den}};
  report["residual_max"] = residual_max;
  write_report(out + ".json", report);
  return 0;
}

json layout_to_json(const s3::CmcTorusLayout& layout) {
  json j;
  j["mu"] = layout.mu;
  j["lambda"] = layout.lambda;
  j["s_plus"] = layout.s_plus;
  j["s_minus"] = layout.s_minus;
  j["eps_mu"] = layout.eps_mu;
  j["eps_mu_tilde"] = layout.eps_mu_tilde;
  j["theta1"] = layout.theta1;
  j["theta2"] = layout.theta2;
  j["theta1_tilde"] = layout.theta1_tilde;
  j["theta2_tilde"] = layout.theta2_tilde;
  j["theta1_scanned"] = layout.theta1_scanned;
  j["theta_branch1"] = layout.theta_branch1;
  j["theta_branch2"] = layout.theta_branch2;
  j["closes"] = layout.closes;
  j["closing_step"] = layout.closing_step;
  return j;
}

const char* delaunay_name(s3::DelaunayKind kind) {
  switch (kind) {
    case s3::DelaunayKind::meridian_two_sphere: return "Meridian2Sphere";
    case s3::DelaunayKind::clifford_torus: return "CliffordTorus";
    case s3::DelaunayKind::sphere_sh: return "SphereSH";
    case s3::DelaunayKind::unduloid: return "Unduloid";
    case s3::DelaunayKind::nodoid: return "Nodoid";
    case s3::DelaunayKind::petal: return "Petal";
  }
  return "?";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Carnot-Caratheodory geodesics and CMC surfaces of the sub-Riemannian 3-sphere"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand name

  // --config may preload any long option; explicit flags override it.
  std::string config_path;
  json config = json::object();
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "cannot open config " << config_path << "\n";
      return 2;
    }
    in >> config;
  }
  auto cfgd = [&](const char* key, double fallback) {
    return config.contains(key) ? config[key].get<double>() : fallback;
  };
  auto cfgi = [&](const char* key, long long fallback) {
    return config.contains(key) ? config[key].get<long long>() : fallback;
  };
  std::string config_opt_sink;
  app.add_option("--config", config_opt_sink, "JSON config file; flags override its values");

  s3::RationalityPolicy policy;
  policy.tol = cfgd("rational_tol", 1e-9);
  policy.max_denominator = cfgi("max_denominator", 64);
  app.add_option("--rational-tol", policy.tol, "rationality detection tolerance");
  app.add_option("--max-denominator", policy.max_denominator,
                 "denominator cap for rationality detection");

  int exit_code = 0;

  // ---- geodesic ----
  auto* geo = app.add_subcommand("geodesic", "trace a geodesic and classify its orbit");
  double g_lambda = cfgd("lambda", 0.0), g_vtheta = cfgd("v_theta", 0.0),
         g_length = cfgd("length", 4 * M_PI);
  int g_samples = static_cast<int>(cfgi("samples", 512));
  std::string g_p = config.value("p", "1,0,0,0");
  std::string g_out = config.value("out", "");
  geo->add_option("--lambda", g_lambda, "geodesic curvature")
      ->required(!config.contains("lambda"));
  geo->add_option("--p", g_p, "start point x1,y1,x2,y2 (renormalized)");
  geo->add_option("--v-theta", g_vtheta, "initial direction angle in the horizontal plane");
  geo->add_option("--length", g_length, "arc length of the trace");
  geo->add_option("--samples", g_samples, "number of samples");
  geo->add_option("--out", g_out, "output prefix (.csv, .json)")
      ->required(!config.contains("out"));
  geo->callback([&] {
    exit_code = run_geodesic(g_lambda, g_p, g_vtheta, g_length, g_samples, g_out, policy);
  });

  // ---- surface ----
  auto* surf = app.add_subcommand("surface", "generate a surface mesh and report");
  surf->require_subcommand(1);
  std::string s_out = config.value("out", "");
  std::string s_pole = config.value("pole", "0,0,0,1");
  std::size_t res_u = cfgi("res_u", 128), res_v = cfgi("res_v", 65);
  double p_lambda = cfgd("lambda", 1.0), p_rho = cfgd("rho", std::sqrt(0.5)),
         p_mu = cfgd("mu", 0.0), p_H = cfgd("H", 1.0), p_E = cfgd("E", 0.0),
         p_perturb = cfgd("perturb", 0.0), p_length = cfgd("length", 10.0);
  int p_side = static_cast<int>(cfgi("side", 1)), p_steps = static_cast<int>(cfgi("steps", 2));

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", s_out, "output prefix (.obj, _attrs.csv, .json)")
        ->required(!config.contains("out"));
    cmd->add_option("--pole", s_pole, "stereographic pole x1,y1,x2,y2");
    cmd->add_option("--res-u", res_u, "grid resolution along u");
    cmd->add_option("--res-v", res_v, "grid resolution along v");
  };
  auto* sph = surf->add_subcommand("sphere", "spherical CMC surface S_lambda");
  sph->add_option("--lambda", p_lambda, "mean curvature");
  add_common(sph);
  auto* cliff = surf->add_subcommand("clifford", "Clifford torus |z1| = rho");
  cliff->add_option("--rho", p_rho, "torus radius in (0,1)");
  add_common(cliff);
  auto* rul = surf->add_subcommand("ruled", "ruled sheet over a horizontal directrix");
  rul->add_option("--lambda", p_lambda, "sheet curvature");
  rul->add_option("--mu", p_mu, "directrix curvature");
  rul->add_option("--side", p_side, "+1: leave by J(Gamma'), -1: by -J(Gamma')");
  rul->add_option("--perturb", p_perturb,
                  "steering perturbation amplitude; nonzero breaks stationarity");
  add_common(rul);
  auto* cmc = surf->add_subcommand("cmc-torus", "C_{mu,lambda} alternating ruled sheets");
  cmc->add_option("--mu", p_mu, "singular-curve curvature");
  cmc->add_option("--lambda", p_lambda, "sheet curvature");
  cmc->add_option("--steps", p_steps, "extension rounds");
  add_common(cmc);
  auto* rot = surf->add_subcommand("rotational", "rotationally invariant CMC surface");
  rot->add_option("--H", p_H, "mean curvature");
  rot->add_option("--E", p_E, "energy of the profile");
  rot->add_option("--length", p_length, "profile arc length");
  add_common(rot);

  surf->callback([&] {
    const s3::Vec4 pole = s3::renormalized(parse_vec4(s_pole, "--pole"));
    json report;
    report["schema"] = 1;
    std::optional<InvariantFailure> failure;
    auto check = [&](const char* name, double value, double tol) {
      if (value > tol && !failure) failure = InvariantFailure{name, value, tol};
    };

    if (sph->parsed()) {
      report["kind"] = "sphere";
      report["lambda"] = p_lambda;
      const s3::ParamPatch patch = s3::sphere_patch(p_lambda, res_u, res_v);
      const MeshStats stats = curvature_stats({&patch});
      report["H_mean"] = stats.h_mean;
      report["H_stddev"] = stats.h_stddev;
      report["singular_points"] = stats.singular_points;
      report["orthogonality_max"] = 0.0;  // isolated singular points only
      report["area_estimate"] = s3::area_estimate(patch);
      export_meshes({&patch}, pole, s_out, report);
      check("mean curvature equals lambda", std::abs(stats.h_mean - p_lambda), 1e-3);
      check("mean curvature spread", stats.h_stddev, 1e-3);
    } else if (cliff->parsed()) {
      report["kind"] = "clifford";
      report["rho"] = p_rho;
      const s3::ParamPatch patch = s3::clifford_patch(p_rho, res_u, res_v);
      const MeshStats stats = curvature_stats({&patch});
      const double expected = s3::torus_curvature(p_rho);
      report["H_mean"] = stats.h_mean;
      report["H_stddev"] = stats.h_stddev;
      report["H_expected"] = expected;
      report["singular_points"] = stats.singular_points;
      report["orthogonality_max"] = 0.0;  // empty singular set
      report["area_estimate"] = s3::area_estimate(patch);
      export_meshes({&patch}, pole, s_out, report);
      check("mean curvature equals the torus value", std::abs(stats.h_mean - expected), 1e-4);
    } else if (rul->parsed()) {
      report["kind"] = "ruled";
      report["lambda"] = p_lambda;
      report["mu"] = p_mu;
      report["perturb"] = p_perturb;
      const s3::Vec4 p0(1, 0, 0, 0);
      s3::HorizontalCurve directrix;
      double window = 4.0 * M_PI / std::sqrt(1.0 + p_mu * p_mu);
      bool periodic = false;
      if (p_perturb == 0.0) {
        directrix = s3::geodesic_directrix({p0, s3::e1_at(p0), p_mu});
        try {
          window = s3::geodesic_period(p_mu);
          periodic = true;
        } catch (const std::domain_error&) {
        }
      } else {
        const double a = p_perturb;
        directrix = s3::SteeredCurve(
                        p0, [a](double e) { return a * std::sin(2 * e); },
                        [a](double e) { return 2 * a * std::cos(2 * e); },
                        [a](double e) { return -4 * a * std::sin(2 * e); }, -0.1, window + 0.1)
                        .as_curve();
      }
      const auto samples = s3::sample_curve(directrix, 0.0, window, res_u, periodic);
      s3::RuledSheet sheet = s3::ruled_patch(samples, p_lambda, p_side, res_v);
      sheet.patch.meta.periodic_u = periodic;
      const MeshStats stats = curvature_stats({&sheet.patch});
      const double ortho =
          std::max(s3::orthogonality_check(sheet.start), s3::orthogonality_check(sheet.end));
      report["H_mean"] = stats.h_mean;
      report["H_stddev"] = stats.h_stddev;
      report["singular_points"] = stats.singular_points;
      report["orthogonality_max"] = ortho;
      report["jacobi_residual"] = sheet.end.jacobi_residual;
      report["area_estimate"] = s3::area_estimate(sheet.patch);
      export_meshes({&sheet.patch}, pole, s_out, report);
      check("singular curves met orthogonally", ortho, 1e-5);
      check("Jacobi boundary condition", sheet.end.jacobi_residual, 1e-6);
    } else if (cmc->parsed()) {
      report["kind"] = "cmc-torus";
      s3::CmcTorusResult result;
      try {
        result = s3::cmc_torus_patch(p_mu, p_lambda, p_steps, res_u, res_v);
      } catch (const std::runtime_error& e) {
        std::cerr << "invariant check failed: " << e.what() << "\n";
        exit_code = 4;
        return;
      }
      std::vector<const s3::ParamPatch*> patches;
      double ortho = 0.0;
      double h_sum = 0.0, h_sq = 0.0;
      std::size_t h_count = 0, singular_points = 0;
      for (const auto& sheet : result.sheets) {
        patches.push_back(&sheet.patch);
        ortho = std::max(
            {ortho, s3::orthogonality_check(sheet.start), s3::orthogonality_check(sheet.end)});
        // Sheets alternate curvature sign against their own normals; orient the
        // estimates to the global lambda before averaging.
        const double orient = (sheet.lambda * p_lambda >= 0.0) ? 1.0 : -1.0;
        const MeshStats stats = curvature_stats({&sheet.patch});
        h_sum += orient * stats.h_mean * static_cast<double>(stats.samples);
        h_sq += (stats.h_stddev * stats.h_stddev +
                 stats.h_mean * stats.h_mean) * static_cast<double>(stats.samples);
        h_count += stats.samples;
        singular_points += stats.singular_points;
      }
      const double h_mean = h_count ? h_sum / static_cast<double>(h_count) : 0.0;
      const double h_stddev =
          h_count ? std::sqrt(std::max(0.0, h_sq / static_cast<double>(h_count) -
                                                h_mean * h_mean))
                  : 0.0;
      double area = 0.0;
      for (const auto* patch : patches) area += s3::area_estimate(*patch);
      report["sheets"] = result.sheets.size();
      report["H_mean"] = h_mean;
      report["H_stddev"] = h_stddev;
      report["singular_points"] = singular_points;
      report["orthogonality_max"] = ortho;
      report["area_estimate"] = area;
      report["self_intersection_candidates"] =
          s3::self_intersection_candidates(result.sheets, 5e-4, 6);
      report["layout"] = layout_to_json(result.layout);
      export_meshes(patches, pole, s_out, report);
      check("singular curves met orthogonally", ortho, 1e-5);
      check("mean curvature equals lambda across sheets", std::abs(h_mean - p_lambda), 1e-3);
    } else if (rot->parsed()) {
      report["kind"] = "rotational";
      report["H"] = p_H;
      report["E"] = p_E;
      const s3::DelaunayClass cls = s3::classify_profile(p_E, p_H, policy);
      report["classification"] = delaunay_name(cls.kind);
      report["compact"] = cls.compact;
      if (cls.period) report["period"] = *cls.period;

      // canonical launch state per class
      s3::ProfileState init{0.4, 0.0, M_PI_2};
      const double Hn = p_H < 0 ? -p_H : p_H;
      const double En = p_H < 0 ? -p_E : p_E;
      if (cls.kind == s3::DelaunayKind::meridian_two_sphere) {
        init = {0.1, 0.0, 0.0};
      } else if (cls.kind == s3::DelaunayKind::sphere_sh) {
        init = {std::atan(1.0 / Hn), 0.0, M_PI_2};
      } else if (cls.kind == s3::DelaunayKind::petal) {
        init = {std::asin(Hn / std::sqrt(1 + Hn * Hn)), 0.0, 1.5 * M_PI};
      } else {
        const auto bounds = s3::omega_bounds(En, Hn);
        if (!bounds) throw std::runtime_error("no admissible band for (E, H)");
        init = (cls.kind == s3::DelaunayKind::nodoid)
                   ? s3::ProfileState{bounds->second - 1e-12, 0.0, M_PI_2}
                   : s3::ProfileState{bounds->first + 1e-12, 0.0, M_PI_2};
      }
      s3::ProfileOptions opts;
      opts.tol = 1e-11;
      const s3::ProfileSolution sol = s3::integrate_profile(init, Hn, p_length, opts);
      report["energy"] = sol.E;
      report["energy_drift"] = sol.energy_drift_max;
      report["events"] = sol.events.size();
      const s3::ParamPatch patch = s3::revolve(sol, res_u);
      const MeshStats stats = curvature_stats({&patch});
      report["H_mean"] = stats.h_mean;
      report["H_stddev"] = stats.h_stddev;
      report["singular_points"] = stats.singular_points;
      report["orthogonality_max"] = 0.0;
      report["area_estimate"] = s3::area_estimate(patch);
      export_meshes({&patch}, pole, s_out, report);
      check("first integral drift", sol.energy_drift_max, 1e-8);
      if (cls.kind == s3::DelaunayKind::unduloid || cls.kind == s3::DelaunayKind::nodoid) {
        const double quad = s3::period_by_quadrature(p_E, p_H);
        report["period_by_quadrature"] = quad;
        check("period quadrature vs closed form", std::abs(quad - *cls.period), 1e-6);
        // embedded unduloids need T = 2 pi / k; report the candidate without
        // certifying embeddedness
        const double k = 2 * M_PI / *cls.period;
        report["embeddedness_k_candidate"] = std::llround(k);
        report["embeddedness_k_residual"] = std::abs(k - std::llround(k));
      }
      check("mean curvature equals H", std::abs(stats.h_mean - Hn), 2e-3);
    }

    if (failure) {
      report["failed_invariant"] = {
          {"name", failure->name}, {"value", failure->value}, {"tolerance", failure->tolerance}};
      write_report(s_out + ".json", report);
      std::cerr << "invariant check failed: " << failure->name << " (value " << failure->value
                << " > tolerance " << failure->tolerance << ")\n";
      exit_code = 4;
      return;
    }
    write_report(s_out + ".json", report);
  });

  // ---- verify ----
  auto* ver = app.add_subcommand("verify", "run the module invariant suites");
  std::string v_suite = config.value("suite", "all");
  std::string v_json;
  ver->add_option("--suite", v_suite, "frames|geodesics|surfaces|rotational|all")
      ->check(CLI::IsMember({"frames", "geodesics", "surfaces", "rotational", "all"}));
  ver->add_option("--json", v_json, "also write the report as JSON");
  ver->callback([&] {
    const std::vector<s3::CheckResult> results = s3::verify_suite(v_suite);
    json checks = json::array();
    bool all_pass = true;
    for (const auto& r : results) {
      std::printf("[%s] %-55s value %.3e  tol %.3e\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                  r.value, r.tolerance);
      checks.push_back(
          {{"name", r.name}, {"value", r.value}, {"tolerance", r.tolerance}, {"pass", r.pass}});
      all_pass = all_pass && r.pass;
    }
    std::printf("%s: %zu checks\n", all_pass ? "OK" : "FAILED", results.size());
    if (!v_json.empty()) {
      json report;
      report["schema"] = 1;
      report["suite"] = v_suite;
      report["pass"] = all_pass;
      report["checks"] = checks;
      write_report(v_json, report);
    }
    exit_code = all_pass ? 0 : 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return exit_code;
}
