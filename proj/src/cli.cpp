#include "saem/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "saem/correction.hpp"
#include "saem/energy.hpp"
#include "saem/errors.hpp"
#include "saem/generate.hpp"
#include "saem/initializer.hpp"
#include "saem/report.hpp"
#include "saem/solver.hpp"
#include "saem/version.hpp"

namespace saem::cli {

namespace {

// FNV-1a
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> header(const RunConfig& config) {
  return {std::string("saem ") + kVersion, "config " + config_hash(config)};
}

void write_map(const std::filesystem::path& path, const SphericalMap& map, const TriMesh& mesh,
               const std::vector<std::string>& comments) {
  if (path.extension() == ".off" || path.extension() == ".OFF") {
    write_off(path, map.points(), mesh.faces(), comments);
  } else {
    write_obj(path, map.points(), mesh.faces(), comments);
  }
}

void check_distinct(const std::vector<std::filesystem::path>& paths) {
  std::set<std::filesystem::path> seen;
  for (const auto& p : paths) {
    if (p.empty()) continue;
    if (!seen.insert(p.lexically_normal()).second) throw std::invalid_argument("output path used twice: " + p.string());
  }
}

TriMesh load_normalized(const RunConfig& config) { return normalize_area(load_mesh(config.input, config.format)); }

// Reads the map file and checks it against the mesh.
SphericalMap load_map(const RunConfig& config, const TriMesh& mesh) {
  const RawMesh raw = read_raw_mesh(config.map, MeshFormat::Auto);
  if (raw.vertices.rows() != mesh.num_vertices() || raw.faces.rows() != mesh.num_faces()) {
    throw MeshError("map has " + std::to_string(raw.vertices.rows()) + " vertices and " +
                    std::to_string(raw.faces.rows()) + " faces, mesh has " + std::to_string(mesh.num_vertices()) +
                    " and " + std::to_string(mesh.num_faces()));
  }
  if (raw.faces != mesh.faces()) throw MeshError("map connectivity differs from the mesh");
  SphericalMap map(raw.vertices);
  if (map.max_norm_error() > 1e-6) throw MeshError("map vertices are not on the unit sphere");
  return map;
}

void print_summary(std::ostream& out, const MetricsReport& r) {
  char line[256];
  std::snprintf(line, sizeof line, "E_A %.6e  SD %.6e  folds %d  iterations %d\n", r.authalic, r.area_ratio.sd,
                r.fold_count, r.iterations);
  out << line;
}

void write_outputs(const RunConfig& config, const MetricsReport& report) {
  if (!config.report.empty()) write_report(config.report, report);
  if (!config.hist.empty()) write_histogram_csv(config.hist, report.histogram);
}

CorrectionSummary correction_summary(const CorrectionResult& c) {
  CorrectionSummary s;
  s.rounds = c.rounds;
  s.folds_before = c.initial_folds;
  s.folds_after = c.remaining_folds;
  s.folds_per_round = c.folds_per_round;
  s.singular_skips = c.singular_skips;
  s.nonconvex_rings = c.nonconvex_rings;
  return s;
}

// Maps library errors to exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const MeshError& e) {
    err << "error: invalid mesh: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const SolverError& e) {
    err << "error: solver aborted: " << e.what() << '\n';
    return kSolverAbort;
  } catch (const GeometryError& e) {
    err << "error: " << e.what() << '\n';
    return kSolverAbort;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
}

std::optional<std::array<int, 2>> parse_pair(const std::string& text) {
  if (text.empty()) return std::nullopt;
  std::array<int, 2> v{};
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> v[0] >> comma >> v[1]) || comma != ',' || !(in >> std::ws).eof()) {
    throw CLI::ValidationError("--fix", "expected i,j");
  }
  return v;
}

}  // namespace

std::string config_hash(const RunConfig& c) {
  std::ostringstream s;
  s << "max_iters=" << c.max_iters << ";tol=" << format_coordinate(c.energy_tol) << ";fp_iters=" << c.fp_iters
    << ";correct=" << c.correct << ";seed=" << c.seed;
  if (c.fixed) s << ";fix=" << (*c.fixed)[0] << ',' << (*c.fixed)[1];
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(s.str())));
  return hex;
}

int cmd_param(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_distinct({config.output, config.report, config.hist, config.trace});
    if (config.fp_iters < 0) throw std::invalid_argument("--fp-iters must be non-negative");
    const auto start = std::chrono::steady_clock::now();
    const TriMesh mesh = load_normalized(config);

    InitOptions init;
    init.warmup_max_iters = config.fp_iters;
    init.seed = config.seed;
    const SphericalMap seed_map = initial_spherical_map(mesh, init);
    const WarmupResult warm = fixed_point_warmup(mesh, seed_map, init);

    SolverOptions sopts;
    sopts.max_iters = config.max_iters;
    sopts.energy_tol = config.energy_tol;
    sopts.seed = config.seed;
    sopts.fixed = config.fixed;
    const SolverResult solved = minimize(mesh, warm.map, sopts);

    SphericalMap final_map = solved.map;
    std::optional<CorrectionResult> corrected;
    if (config.correct) {
      corrected = correct_foldings(mesh, solved.map);
      final_map = corrected->map;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    MetricsReport report = build_report(mesh, final_map, solved.state.iterations,
                                        config.omit_timing ? std::nullopt : std::optional<double>(seconds));
    report.warmup = WarmupSummary{warm.iterations, warm.energies, warm.folds};
    report.solver = summarize(solved.state);
    if (corrected) report.correction = correction_summary(*corrected);
    if (solved.state.line_search_failed) report.warnings.push_back("line search failed; best iterate returned");
    if (solved.state.preconditioner_fallback) report.warnings.push_back("preconditioner indefinite; identity used");
    if (corrected && corrected->remaining_folds > 0) {
      report.warnings.push_back("correction left " + std::to_string(corrected->remaining_folds) + " folds");
    }
    for (FaceId f : mesh.flagged_faces()) {
      report.warnings.push_back("face " + std::to_string(f.index) + " has all three vertices on one outside vertex");
    }

    if (!config.output.empty()) write_map(config.output, final_map, mesh, header(config));
    if (!config.trace.empty()) write_trace_csv(config.trace, solved.state.trace);
    write_outputs(config, report);
    print_summary(out, report);
    return static_cast<int>(kOk);
  });
}

int cmd_metrics(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_distinct({config.report, config.hist});
    const TriMesh mesh = load_normalized(config);
    const SphericalMap map = load_map(config, mesh);
    const MetricsReport report = build_report(mesh, map);
    write_outputs(config, report);
    print_summary(out, report);
    return static_cast<int>(kOk);
  });
}

int cmd_correct(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    check_distinct({config.output, config.report, config.hist});
    const TriMesh mesh = load_normalized(config);
    const SphericalMap map = load_map(config, mesh);
    const CorrectionResult corrected = correct_foldings(mesh, map);
    MetricsReport report = build_report(mesh, corrected.map);
    report.correction = correction_summary(corrected);
    if (corrected.remaining_folds > 0) {
      report.warnings.push_back("correction left " + std::to_string(corrected.remaining_folds) + " folds");
    }
    if (!config.output.empty()) write_map(config.output, corrected.map, mesh, header(config));
    write_outputs(config, report);
    out << "folds " << corrected.initial_folds << " -> " << corrected.remaining_folds << " in " << corrected.rounds
        << " rounds\n";
    return static_cast<int>(kOk);
  });
}

int cmd_gen(const GenConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    TriMesh mesh = [&] {
      if (config.shape == "icosphere") return icosphere(config.level);
      if (config.shape == "ellipsoid") return ellipsoid(config.level, Vec3(config.axes[0], config.axes[1], config.axes[2]));
      if (config.shape == "bumpy") return bumpy_sphere(config.level, config.amplitude);
      if (config.shape == "octahedron") return octahedron();
      if (config.shape == "icosahedron") return icosahedron();
      throw std::invalid_argument("unknown shape '" + config.shape + "'");
    }();
    write_mesh(config.output, mesh);
    out << config.shape << ": " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces\n";
    return static_cast<int>(kOk);
  });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spherical area-preserving parameterization of genus-zero meshes", "saem"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig config;
  GenConfig gen;
  std::string format = "auto";
  std::string fix;
  const std::map<std::string, MeshFormat> formats = {
      {"auto", MeshFormat::Auto}, {"obj", MeshFormat::Obj}, {"off", MeshFormat::Off}};

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", config.input, "Input mesh (OBJ or OFF)")->required();
    sub->add_option("--format", format, "Input format")->check(CLI::IsMember({"auto", "obj", "off"}));
  };

  CLI::App* param = app.add_subcommand("param", "Compute a spherical area-preserving map");
  add_input(param);
  param->add_option("--output", config.output, "Output map mesh");
  param->add_option("--report", config.report, "JSON report");
  param->add_option("--hist", config.hist, "Area-ratio histogram CSV");
  param->add_option("--trace", config.trace, "Iteration trace CSV");
  param->add_option("--max-iters", config.max_iters, "Solver iteration cap")->check(CLI::NonNegativeNumber);
  param->add_option("--tol", config.energy_tol, "Energy decrease threshold")->check(CLI::NonNegativeNumber);
  param->add_option("--fp-iters", config.fp_iters, "Warm-up iteration cap")->check(CLI::NonNegativeNumber);
  param->add_flag("--no-correct", "Skip fold correction");
  param->add_option("--seed", config.seed, "Rotation seed");
  param->add_option("--fix", fix, "Pinned vertices i,j");
  param->add_flag("--omit-timing", config.omit_timing, "Write wall_time as null");

  CLI::App* metrics = app.add_subcommand("metrics", "Report distortion of an existing map");
  add_input(metrics);
  metrics->add_option("--map", config.map, "Spherical map mesh")->required();
  metrics->add_option("--report", config.report, "JSON report");
  metrics->add_option("--hist", config.hist, "Area-ratio histogram CSV");

  CLI::App* correct = app.add_subcommand("correct", "Remove folded triangles from a map");
  add_input(correct);
  correct->add_option("--map", config.map, "Spherical map mesh")->required();
  correct->add_option("--output", config.output, "Corrected map mesh");
  correct->add_option("--report", config.report, "JSON report");
  correct->add_option("--hist", config.hist, "Area-ratio histogram CSV");

  CLI::App* gen_cmd = app.add_subcommand("gen", "Write a generated test mesh");
  gen_cmd->add_option("--shape", gen.shape, "Shape")
      ->check(CLI::IsMember({"icosphere", "ellipsoid", "bumpy", "octahedron", "icosahedron"}));
  gen_cmd->add_option("--level", gen.level, "Subdivision level")->check(CLI::Range(0, 7));
  gen_cmd->add_option("--axes", gen.axes, "Ellipsoid semi-axes")->delimiter(',');
  gen_cmd->add_option("--amplitude", gen.amplitude, "Bump amplitude")->check(CLI::Range(0.0, 0.999));
  gen_cmd->add_option("--output", gen.output, "Output mesh")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
    config.format = formats.at(format);
    config.correct = param->count("--no-correct") == 0;
    config.fixed = parse_pair(fix);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every usage error is invalid input
    return app.exit(e, out, err) == 0 ? static_cast<int>(kOk) : static_cast<int>(kInvalidInput);
  }

  if (*param) return cmd_param(config, out, err);
  if (*metrics) return cmd_metrics(config, out, err);
  if (*correct) return cmd_correct(config, out, err);
  return cmd_gen(gen, out, err);
}

}  // namespace saem::cli
