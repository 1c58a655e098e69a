// Command-line front end: runs the pipeline stages on a JSON config and
// writes analysis-ready CSV/JSON files.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "gibbs/config.hpp"
#include "gibbs/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Context {
  gibbs::RunConfig cfg;
  std::string config_path;

  void load(int depth_override, long long seed_override,
            const std::string& out_override) {
    cfg = config_path.empty() ? gibbs::RunConfig{}
                              : gibbs::parse_config_file(config_path);
    if (depth_override > 0) cfg.depth = depth_override;
    if (seed_override >= 0) cfg.seed = std::uint64_t(seed_override);
    if (!out_override.empty()) cfg.output_dir = out_override;
    fs::create_directories(cfg.output_dir);
  }

  std::string out_path(const std::string& name) const {
    return (fs::path(cfg.output_dir) / name).string();
  }
};

int cmd_pressure(Context& ctx) {
  auto part = std::make_shared<const gibbs::MarkovPartition>(
      gibbs::partition_for(ctx.cfg));
  const gibbs::SubshiftSpec& spec = part->sft();
  gibbs::PotentialInput input = ctx.cfg.potential_u.materialize(spec);

  gibbs::Potential raw;
  if (input.trig) {
    raw = gibbs::sample_forward_potential(*part, *input.trig, ctx.cfg.depth,
                                          ctx.cfg.tol.series_tol)
              .forward;
  } else if (input.table) {
    raw = *input.table;
  } else {
    raw = gibbs::Potential::constant(spec, 0.0);
  }
  gibbs::PressureResult pr =
      gibbs::pressure(spec, raw, std::max(raw.depth(), 4));
  json j;
  j["schema_version"] = gibbs::kSchemaVersion;
  j["config"] = json::parse(ctx.cfg.echo_json());
  j["P"] = pr.value;
  j["error_bound"] = pr.error_bound;
  j["depth"] = pr.depth;
  gibbs::write_file_atomic(ctx.out_path("pressure.json"), j.dump(2) + "\n");
  std::cout << "P = " << fmt(pr.value) << "  (error bound " << fmt(pr.error_bound)
            << ")\n";
  return 0;
}

int cmd_gibbs(Context& ctx) {
  auto part = std::make_shared<const gibbs::MarkovPartition>(
      gibbs::partition_for(ctx.cfg));
  const gibbs::SubshiftSpec& spec = part->sft();
  gibbs::PotentialInput input = ctx.cfg.potential_u.materialize(spec);
  gibbs::Potential raw;
  if (input.trig) {
    raw = gibbs::sample_forward_potential(*part, *input.trig, ctx.cfg.depth,
                                          ctx.cfg.tol.series_tol)
              .forward;
  } else if (input.table) {
    raw = *input.table;
  } else {
    raw = gibbs::Potential::constant(spec, 0.0);
  }
  gibbs::InvariantNormalization norm =
      gibbs::invariant_normalization(spec, raw, ctx.cfg.depth);
  const gibbs::GibbsMeasure& mu = norm.invariant;
  const gibbs::Potential& phi = norm.phi_prime;

  gibbs::VariationProfile vp = gibbs::variation_profile(phi, phi.depth());
  const double var_phi = vp.total + vp.tail_bound;
  const double c1 = std::exp(-spec.mixing_time * phi.sup_norm() - var_phi);
  const double c2 = std::exp(var_phi);

  std::ostringstream csv;
  csv << "# config " << ctx.cfg.echo_json() << "\n";
  csv << "word,mass,S_n_phi,ratio,in_bowen_bounds\n";
  gibbs::WordIndexer idx(spec, mu.depth);
  const int n = mu.depth;
  for (std::size_t r = 0; r < idx.count(); ++r) {
    gibbs::Word w = idx.word_at(r);
    std::vector<gibbs::Symbol> ext = w.symbols;
    gibbs::WordIndexer::extend_min(spec, ext, phi.depth());
    const double sn = gibbs::birkhoff_sum(phi, ext, n);
    const double ratio = mu.mass_at_rank(r) / std::exp(sn);
    const bool okb = ratio >= c1 - 1e-12 && ratio <= c2 + 1e-12;
    csv << '"' << w.str() << '"' << "," << fmt(mu.mass_at_rank(r)) << ","
        << fmt(sn) << "," << fmt(ratio) << "," << (okb ? 1 : 0) << "\n";
  }
  gibbs::write_file_atomic(ctx.out_path("gibbs_masses.csv"), csv.str());
  std::cout << "wrote " << idx.count() << " cylinder masses (depth " << n
            << ", P = " << fmt(mu.pressure) << ")\n";
  return 0;
}

int cmd_partition(Context& ctx) {
  gibbs::MarkovPartition part = gibbs::partition_for(ctx.cfg);
  json j;
  j["schema_version"] = gibbs::kSchemaVersion;
  j["config"] = json::parse(ctx.cfg.echo_json());
  json rects = json::array();
  for (const auto& b : part.boxes)
    rects.push_back({{"u", {b.u0, b.u1}}, {"s", {b.s0, b.s1}}});
  j["rectangles"] = rects;
  j["transition"] = part.sft().matrix;
  j["lambda"] = part.sft().pf_eigenvalue;
  j["entropy"] = part.sft().entropy;
  j["mixing_time"] = part.sft().mixing_time;
  j["tau_u"] = {{"t_min", part.t_min}, {"t_max", part.t_max}};
  gibbs::write_file_atomic(ctx.out_path("partition.json"), j.dump(2) + "\n");

  auto checks = gibbs::check_partition(part, 10000, 1e-9, ctx.cfg.seed);
  std::ostringstream csv;
  csv << "# config " << ctx.cfg.echo_json() << "\n";
  csv << "check,value\n";
  csv << "cover_failures," << checks.cover_failures << "\n";
  csv << "markov_s_deviation," << fmt(checks.markov_s_deviation) << "\n";
  csv << "markov_u_deviation," << fmt(checks.markov_u_deviation) << "\n";
  csv << "transitions_match," << (checks.transitions_match ? 1 : 0) << "\n";
  csv << "strip_tiling_deviation," << fmt(part.build_checks.strip_tiling_deviation)
      << "\n";
  csv << "area_deviation," << fmt(part.build_checks.area_deviation) << "\n";
  gibbs::write_file_atomic(ctx.out_path("partition_checks.csv"), csv.str());
  std::cout << "partition with " << part.symbols() << " rectangles, lambda = "
            << fmt(part.sft().pf_eigenvalue) << "\n";
  return 0;
}

int cmd_synthesize(Context& ctx) {
  auto part = std::make_shared<const gibbs::MarkovPartition>(
      gibbs::partition_for(ctx.cfg));
  gibbs::SmoothStructure st = gibbs::synthesize_structure(
      part, ctx.cfg.potential_u.materialize(part->sft()),
      ctx.cfg.potential_s.materialize(
          gibbs::build_sft(gibbs::transpose(part->sft().matrix))),
      ctx.cfg.depth, ctx.cfg.tol.series_tol);

  json j;
  j["schema_version"] = gibbs::kSchemaVersion;
  j["config"] = json::parse(ctx.cfg.echo_json());
  j["P_u"] = st.P_u;
  j["P_s"] = st.P_s;
  j["depth"] = st.depth;
  j["resolution_u"] = st.F_u.resolution;
  j["resolution_s"] = st.F_s.resolution;
  gibbs::write_file_atomic(ctx.out_path("structure.json"), j.dump(2) + "\n");

  auto curve = [&](const gibbs::CoordinateFunction& F, const std::string& name) {
    std::ostringstream csv;
    csv << "# config " << ctx.cfg.echo_json() << "\n";
    csv << "arclength,F\n";
    for (std::size_t i = 0; i < F.breakpoints.size(); ++i)
      csv << fmt(F.breakpoints[i]) << "," << fmt(F.cumulative[i]) << "\n";
    gibbs::write_file_atomic(ctx.out_path(name), csv.str());
  };
  curve(st.F_u, "F_u.csv");
  curve(st.F_s, "F_s.csv");
  std::cout << "P_u = " << fmt(st.P_u) << ", P_s = " << fmt(st.P_s)
            << ", resolution = " << fmt(st.resolution()) << "\n";
  return 0;
}

int cmd_eigencheck(Context& ctx, int max_period, bool fd_check) {
  auto part = std::make_shared<const gibbs::MarkovPartition>(
      gibbs::partition_for(ctx.cfg));
  gibbs::SmoothStructure st = gibbs::synthesize_structure(
      part, ctx.cfg.potential_u.materialize(part->sft()),
      ctx.cfg.potential_s.materialize(
          gibbs::build_sft(gibbs::transpose(part->sft().matrix))),
      ctx.cfg.depth, ctx.cfg.tol.series_tol);

  std::ostringstream csv;
  csv << "# config " << ctx.cfg.echo_json() << "\n";
  csv << "orbit,n,lambda_u_meas,lambda_u_pred,lambda_s_meas,lambda_s_pred,err";
  if (fd_check) csv << ",lambda_u_fd";
  csv << "\n";
  double max_err = 0.0;
  int orbit_id = 0;
  for (int n = 1; n <= max_period; ++n) {
    for (const gibbs::Vec2& p :
         gibbs::periodic_orbit_representatives(part->aut, n)) {
      const auto meas =
          gibbs::measured_eigenvalues(st, p, n, ctx.cfg.depth);
      const auto pred = gibbs::predicted_eigenvalues(st, p, n);
      const double err = std::max(
          std::abs(std::log(meas.lambda_u) - std::log(pred.lambda_u)),
          std::abs(std::log(meas.lambda_s) - std::log(pred.lambda_s)));
      max_err = std::max(max_err, err);
      csv << orbit_id++ << "," << n << "," << fmt(meas.lambda_u) << ","
          << fmt(pred.lambda_u) << "," << fmt(meas.lambda_s) << ","
          << fmt(pred.lambda_s) << "," << fmt(err);
      if (fd_check)
        csv << "," << fmt(gibbs::finite_difference_expansion(st, p, n, 1e-4));
      csv << "\n";
    }
  }
  gibbs::write_file_atomic(ctx.out_path("eigencheck.csv"), csv.str());
  std::cout << "max |log meas - log pred| = " << fmt(max_err) << " over "
            << orbit_id << " orbits\n";
  return max_err <= ctx.cfg.tol.eigen_tol ? 0 : 1;
}

int write_reports(Context& ctx, const std::vector<gibbs::CheckReport>& reps,
                  const std::string& file) {
  std::ostringstream lines;
  bool all_pass = true;
  for (const auto& r : reps) {
    lines << gibbs::report_json_line(r) << "\n";
    all_pass = all_pass && r.pass;
  }
  gibbs::write_file_atomic(ctx.out_path(file), lines.str());
  std::printf("%-36s %-6s %-14s %-14s %s\n", "check", "pass", "deviation",
              "bound", "samples");
  for (const auto& r : reps)
    std::printf("%-36s %-6s %-14.5g %-14.5g %zu\n", r.name.c_str(),
                r.pass ? "yes" : "NO", r.worst_deviation, r.bound, r.samples);
  return all_pass ? 0 : 1;
}

int cmd_qs_check(Context& ctx) {
  gibbs::MarkovPartition part = gibbs::partition_for(ctx.cfg);
  auto rep = gibbs::quasisymmetry_check(
      part, ctx.cfg.potential_u.materialize(part.sft()), ctx.cfg.depth);
  return write_reports(ctx, {rep}, "qs_check.jsonl");
}

int cmd_geometry_check(Context& ctx) {
  gibbs::MarkovPartition part = gibbs::partition_for(ctx.cfg);
  auto arr = gibbs::partition_geometry_check(part, ctx.cfg.depth);
  return write_reports(ctx, {arr.begin(), arr.end()}, "geometry_check.jsonl");
}

int cmd_boundary_check(Context& ctx) {
  gibbs::MarkovPartition part = gibbs::partition_for(ctx.cfg);
  const double lam = std::abs(part.aut.lambda_u);
  std::vector<double> deltas;
  for (int e = 2; e <= 10; e += 2) deltas.push_back(std::pow(lam, -e / 2.0));
  auto rep = gibbs::boundary_mass_check(
      part, ctx.cfg.potential_u.materialize(part.sft()), ctx.cfg.depth, deltas,
      ctx.cfg.tol.boundary_threshold);
  return write_reports(ctx, {rep}, "boundary_check.jsonl");
}

int cmd_verify(Context& ctx) {
  auto part = std::make_shared<const gibbs::MarkovPartition>(
      gibbs::partition_for(ctx.cfg));
  auto reps = gibbs::run_verify_suite(
      part, ctx.cfg.potential_u.materialize(part->sft()),
      ctx.cfg.potential_s.materialize(
          gibbs::build_sft(gibbs::transpose(part->sft().matrix))),
      ctx.cfg.depth, ctx.cfg.seed);
  return write_reports(ctx, reps, "verify.jsonl");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs structures on subshifts and toral automorphisms"};
  app.require_subcommand(1);

  Context ctx;
  int depth_override = 0;
  long long seed_override = -1;
  std::string out_override;
  int max_period = 6;
  bool fd_check = false;
  app.add_option("-c,--config", ctx.config_path, "JSON config file");
  app.add_option("--depth", depth_override, "override working depth");
  app.add_option("--seed", seed_override, "override RNG seed");
  app.add_option("--out", out_override, "override output directory");

  auto* sub_pressure = app.add_subcommand("pressure", "pressure report");
  auto* sub_gibbs = app.add_subcommand("gibbs", "cylinder-mass dump");
  auto* sub_partition = app.add_subcommand("partition", "partition data");
  auto* sub_synth = app.add_subcommand("synthesize", "structure synthesis");
  auto* sub_eigen = app.add_subcommand("eigencheck", "orbit eigenvalue table");
  sub_eigen->add_option("--max-period", max_period, "largest orbit period");
  sub_eigen->add_flag("--fd-check", fd_check,
                      "append a finite-difference expansion column");
  auto* sub_qs = app.add_subcommand("qs-check", "quasisymmetry check");
  auto* sub_geo = app.add_subcommand("geometry-check", "partition geometry");
  auto* sub_bdy = app.add_subcommand("boundary-check", "boundary mass");
  auto* sub_verify = app.add_subcommand("verify", "full property suite");

  CLI11_PARSE(app, argc, argv);

  try {
    ctx.load(depth_override, seed_override, out_override);
    if (sub_pressure->parsed()) return cmd_pressure(ctx);
    if (sub_gibbs->parsed()) return cmd_gibbs(ctx);
    if (sub_partition->parsed()) return cmd_partition(ctx);
    if (sub_synth->parsed()) return cmd_synthesize(ctx);
    if (sub_eigen->parsed()) return cmd_eigencheck(ctx, max_period, fd_check);
    if (sub_qs->parsed()) return cmd_qs_check(ctx);
    if (sub_geo->parsed()) return cmd_geometry_check(ctx);
    if (sub_bdy->parsed()) return cmd_boundary_check(ctx);
    if (sub_verify->parsed()) return cmd_verify(ctx);
  } catch (const gibbs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == gibbs::ErrorCode::BadInput ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
