// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "saem/cli.hpp"
#include "saem/correction.hpp"
#include "saem/energy.hpp"
#include "saem/errors.hpp"
#include "saem/generate.hpp"
#include "saem/initializer.hpp"
#include "saem/mesh_io.hpp"
#include "saem/operators.hpp"
#include "saem/report.hpp"
#include "saem/solver.hpp"
#include "support.hpp"

namespace saem {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

// 1. Gradients against central differences.
Verdict gradient_oracle() {
  Verdict v;
  const auto start = Clock::now();
  const TriMesh mesh = normalize_area(icosphere(2));
  auto g = test::rng(2024);
  const double h = 1e-6;
  double worst_energy = 0.0, worst_volume = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SphericalMap map = test::random_fold_free_map(icosphere(2), g, 0.08);
    SphericalCoords coords = to_spherical(map);
    const auto fixed = select_fixed_vertices(mesh, map);
    coords.fixed = std::array<int, 2>{fixed[0].index, fixed[1].index};
    const VariableLayout layout(coords);
    const int k = layout.num_free();
    const Eigen::VectorXd grad = grad_spherical_authalic(mesh, coords);
    const SphericalGradient vgrad = grad_volume_spherical(mesh, coords);

    Eigen::VectorXd fd(2 * k), fd_vol(2 * coords.size()), an_vol(2 * coords.size());
    an_vol << vgrad.theta, vgrad.phi;
    for (int vert = 0; vert < coords.size(); ++vert) {
      for (int which = 0; which < 2; ++which) {
        auto eval = [&](double delta) {
          SphericalCoords c = coords;
          (which == 0 ? c.theta : c.phi)[vert] += delta;
          const SphericalMap m = from_spherical(c);
          return std::pair{spherical_authalic_energy(mesh, m), volume_measure(mesh, m)};
        };
        const auto [ep, vp] = eval(h);
        const auto [em, vm] = eval(-h);
        fd_vol[which * coords.size() + vert] = (vp - vm) / (2 * h);
        const int s = layout.slot_of_vertex[vert];
        if (s >= 0) fd[which * k + s] = (ep - em) / (2 * h);
      }
    }
    worst_energy = std::max(worst_energy, (grad - fd).lpNorm<Eigen::Infinity>() / fd.lpNorm<Eigen::Infinity>());
    worst_volume = std::max(worst_volume, (an_vol - fd_vol).lpNorm<Eigen::Infinity>() / fd_vol.lpNorm<Eigen::Infinity>());
  }
  const double t = seconds_since(start);
  v.require(worst_energy < 1e-6, "energy gradient error " + fmt("%.2e", worst_energy));
  v.require(worst_volume < 1e-6, "volume gradient error " + fmt("%.2e", worst_volume));
  v.require(t < 10.0, "runtime " + fmt("%.1f s", t));
  v.detail += (v.detail.empty() ? "" : " | ") + fmt("max rel err E %.2e", worst_energy) +
              fmt(", V %.2e", worst_volume) + fmt(", %.2f s", t);
  return v;
}

// 2. Quadratic form, constant-ratio zero, ordering and approximation bound.
Verdict energy_identities() {
  Verdict v;
  auto g = test::rng(7);
  double worst_quad = 0.0, worst_zero = 0.0, worst_order = -1e300;
  const std::vector<TriMesh> domains = {normalize_area(icosphere(3)), normalize_area(ellipsoid(3, Vec3(1, 1, 1.5))),
                                        normalize_area(bumpy_sphere(3, 0.3))};
  for (const TriMesh& mesh : domains) {
    for (int r = 0; r < 5; ++r) {
      const SphericalMap map = test::random_fold_free_map(icosphere(3), g, 0.03);
      const LaplacianMatrix l = build_stretch_laplacian(mesh, map);
      double quad = 0.0;
      for (int s = 0; s < 3; ++s) quad += 0.5 * map.points().col(s).dot(l.matrix * map.points().col(s));
      const EnergyBreakdown e = evaluate_energies(mesh, map);
      worst_quad = std::max(worst_quad, std::abs(quad - e.stretch) / e.stretch);
      worst_order = std::max(worst_order, e.authalic - e.spherical_authalic);
    }
  }
  for (int level : {2, 3, 4}) {
    const SphericalMap unit(icosphere(level).vertices());
    for (double scale : {1.0, 0.3, 5.0}) {
      const TriMesh mesh = icosphere(level).with_vertices(scale * icosphere(level).vertices());
      worst_zero = std::max(worst_zero, std::abs(authalic_energy(mesh, unit)));
    }
  }
  bool bound_ok = true;
  std::string bound_detail;
  for (int level : {3, 4, 5}) {
    const TriMesh mesh = normalize_area(icosphere(level));
    const SphericalMap map(icosphere(level).vertices());
    const ApproximationBound b = approximation_bound(mesh, map);
    const EnergyBreakdown e = evaluate_energies(mesh, map);
    worst_order = std::max(worst_order, e.authalic - e.spherical_authalic);
    bound_ok = bound_ok && !b.vacuous && b.gap <= b.bound;
    bound_detail += fmt(" L%.0f", level) + fmt(" gap %.2e", b.gap) + fmt("<=%.2e", b.bound);
  }
  v.require(worst_quad <= 1e-10, "quadratic form " + fmt("%.2e", worst_quad));
  v.require(worst_zero <= 1e-10, "constant-ratio E_A " + fmt("%.2e", worst_zero));
  v.require(worst_order <= 1e-10, "E_A exceeds E_spherical by " + fmt("%.2e", worst_order));
  v.require(bound_ok, "approximation bound violated");
  v.detail += (v.detail.empty() ? "" : " | ") + fmt("quad %.1e", worst_quad) + fmt(", |E_A| %.1e", worst_zero) +
              fmt(", max(E_A-E_sph) %.1e;", worst_order) + bound_detail;
  return v;
}

struct Pipeline {
  TriMesh mesh;
  SphericalMap seed;
  SphericalMap warm;
  SolverResult solved;
  CorrectionResult corrected;
  double seconds = 0.0;
};

Pipeline run_pipeline(const TriMesh& raw) {
  const auto start = Clock::now();
  Pipeline p{normalize_area(raw), {}, {}, {}, {}, 0.0};
  p.seed = initial_spherical_map(p.mesh);
  p.warm = fixed_point_warmup(p.mesh, p.seed).map;
  p.solved = minimize(p.mesh, p.warm);
  p.corrected = correct_foldings(p.mesh, p.solved.map);
  p.seconds = seconds_since(start);
  return p;
}

double sd_of(const TriMesh& mesh, const SphericalMap& map) { return summarize(area_ratios(mesh, map)).sd; }

// 3. Monotone trace, convergence within the cap, SD reduction, runtime.
Verdict monotonicity() {
  Verdict v;
  const std::vector<std::pair<std::string, TriMesh>> meshes = {{"ellipsoid", ellipsoid(3, Vec3(1, 1, 1.5))},
                                                                 {"bumpy", bumpy_sphere(3, 0.3)}};
  for (const auto& [name, raw] : meshes) {
    const Pipeline p = run_pipeline(raw);
    const SolverState& st = p.solved.state;
    bool monotone = true;
    for (size_t k = 1; k < st.energies.size(); ++k) monotone = monotone && st.energies[k] <= st.energies[k - 1];
    const double sd_seed = sd_of(p.mesh, p.seed);
    const double sd_final = sd_of(p.mesh, p.solved.map);
    v.require(monotone, name + " trace increases");
    // Stopping rule: deficit below 1e-5 or the 100-iteration cap, whichever comes first.
    const bool stopped = st.iterations <= 100 && (st.converged || st.iterations == 100) && !st.line_search_failed;
    v.require(stopped, name + " stopped abnormally after " + std::to_string(st.iterations) + " iterations");
    v.require(sd_final <= 0.2 * sd_seed, name + " SD ratio " + fmt("%.3f", sd_final / sd_seed));
    v.require(p.seconds < 60.0, name + " runtime " + fmt("%.1f s", p.seconds));
    v.detail += (v.detail.empty() ? "" : " | ") + name + ": " + std::to_string(st.iterations) + " it" +
                (st.converged ? " (deficit < tol)" : " (cap)") + fmt(", SD seed %.3e", sd_seed) + fmt(", warm-up %.3e", sd_of(p.mesh, p.warm)) + fmt(", final %.3e", sd_final) +
                fmt(" (x%.3f)", sd_final / sd_seed) + fmt(", %.2f s", p.seconds);
  }
  return v;
}

// 4. Magnitude targets on meshes with at least 5k faces.
Verdict magnitude() {
  Verdict v;
  const std::vector<std::pair<std::string, TriMesh>> meshes = {{"ellipsoid", ellipsoid(5, Vec3(1, 1, 1.5))},
                                                                 {"bumpy", bumpy_sphere(5, 0.3)}};
  for (const auto& [name, raw] : meshes) {
    const Pipeline p = run_pipeline(raw);
    const MetricsReport r = build_report(p.mesh, p.corrected.map);
    v.require(p.mesh.num_faces() >= 5000, name + " too small");
    v.require(r.authalic < 5e-2, name + " E_A " + fmt("%.3e", r.authalic));
    v.require(r.area_ratio.sd < 1e-1, name + " SD " + fmt("%.3e", r.area_ratio.sd));
    v.require(r.fold_count == 0, name + " folds " + std::to_string(r.fold_count));
    v.detail += (v.detail.empty() ? "" : " | ") + name + " " + std::to_string(p.mesh.num_faces()) + " faces" +
                fmt(": E_A %.3e", r.authalic) + fmt(", SD %.3e", r.area_ratio.sd) + ", folds " +
                std::to_string(r.fold_count) + fmt(", %.1f s", p.seconds);
  }
  return v;
}

// 5. Correction of induced folds on an optimized map.
Verdict correction() {
  Verdict v;
  const Pipeline base = run_pipeline(bumpy_sphere(4, 0.2));
  const TriMesh& mesh = base.mesh;
  for (int count : {1, 12, 100}) {
    const SphericalMap folded = test::fold_fixture(mesh, base.corrected.map, count);
    const int initial = count_foldings(mesh, folded);
    // One round at a time so preservation can be checked per round.
    SphericalMap current = folded;
    int rounds = 0;
    bool preserved = true;
    while (count_foldings(mesh, current) > 0 && rounds < 100) {
      std::set<int> processed;
      for (FaceId f : detect_foldings(mesh, current)) {
        for (int x : mesh.face(f)) processed.insert(x);
      }
      const SphericalMap next = correct_foldings(mesh, current, {1}).map;
      for (int x = 0; x < mesh.num_vertices(); ++x) {
        if (processed.count(x) == 0 && !(next.point(x) == current.point(x))) preserved = false;
      }
      current = next;
      ++rounds;
    }
    const CorrectionResult full = correct_foldings(mesh, folded);
    const double sd_before = sd_of(mesh, folded), sd_after = sd_of(mesh, full.map);
    const double change = std::abs(sd_after - sd_before) / sd_before;
    const std::string tag = std::to_string(count) + "-fold";
    v.require(full.remaining_folds == 0 && full.rounds <= 100, tag + " left " + std::to_string(full.remaining_folds));
    v.require(full.map == current, tag + " round-by-round result differs");
    v.require(preserved, tag + " moved an unprocessed vertex");
    v.require(full.map.max_norm_error() <= 1e-12, tag + " norm error " + fmt("%.1e", full.map.max_norm_error()));
    v.require(change < 0.05, tag + " SD change " + fmt("%.2f%%", 100 * change));
    v.detail += (v.detail.empty() ? "" : " | ") + tag + ": " + std::to_string(initial) + "->" +
                std::to_string(full.remaining_folds) + " in " + std::to_string(full.rounds) + " rounds" +
                fmt(", SD change %.2f%%", 100 * change);
  }
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "saem");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

// 6. Two identical runs give identical files.
Verdict determinism() {
  Verdict v;
  const auto dir = test::temp_dir("acceptance_det");
  write_mesh(dir / "bumpy.obj", bumpy_sphere(3, 0.3));
  for (const char* tag : {"a", "b"}) {
    const int code = cli({"param", "--input", (dir / "bumpy.obj").string(), "--output",
                          (dir / (std::string(tag) + ".obj")).string(), "--report",
                          (dir / (std::string(tag) + ".json")).string(), "--hist",
                          (dir / (std::string(tag) + ".csv")).string(), "--seed", "11", "--omit-timing"});
    v.require(code == 0, std::string("run ") + tag + " exit " + std::to_string(code));
  }
  for (const char* ext : {".obj", ".json", ".csv"}) {
    const std::string a = slurp(dir / (std::string("a") + ext)), b = slurp(dir / (std::string("b") + ext));
    v.require(!a.empty() && a == b, std::string(ext) + " files differ");
  }
  if (v.pass) v.detail = "map, report and histogram identical";
  return v;
}

// 7. Validation through the command line and the loader.
Verdict validation() {
  Verdict v;
  const auto dir = test::temp_dir("acceptance_val");
  {
    std::ofstream obj(dir / "torus.obj");
    const int rings = 8, sides = 6;
    for (int i = 0; i < rings; ++i) {
      for (int j = 0; j < sides; ++j) {
        const double u = 6.283185307179586 * i / rings, w = 6.283185307179586 * j / sides;
        obj << "v " << (2 + 0.7 * std::cos(w)) * std::cos(u) << ' ' << (2 + 0.7 * std::cos(w)) * std::sin(u) << ' '
            << 0.7 * std::sin(w) << '\n';
      }
    }
    for (int i = 0; i < rings; ++i) {
      for (int j = 0; j < sides; ++j) {
        const int a = i * sides + j, b = ((i + 1) % rings) * sides + j;
        const int c = ((i + 1) % rings) * sides + (j + 1) % sides, d = i * sides + (j + 1) % sides;
        obj << "f " << a + 1 << ' ' << b + 1 << ' ' << c + 1 << "\nf " << a + 1 << ' ' << c + 1 << ' ' << d + 1
            << '\n';
      }
    }
  }
  {
    // Octahedron with a third face on edge (+x, +y).
    const TriMesh oct = octahedron();
    Points pts(7, 3);
    pts.topRows(6) = oct.vertices();
    pts.row(6) << 0.3, 0.3, 0.3;
    FaceIndices f(9, 3);
    f.topRows(8) = oct.faces();
    f.row(8) << 0, 2, 6;
    write_obj(dir / "nonmanifold.obj", pts, f);
  }
  write_mesh(dir / "octahedron.obj", octahedron());
  write_mesh(dir / "icosahedron.off", icosahedron());

  for (const char* name : {"torus.obj", "nonmanifold.obj"}) {
    const int code = cli({"param", "--input", (dir / name).string()});
    v.require(code == 2, std::string(name) + " exit " + std::to_string(code));
  }
  const TriMesh oct = load_mesh(dir / "octahedron.obj");
  const TriMesh ico = load_mesh(dir / "icosahedron.off");
  v.require(oct.num_vertices() == 6 && oct.num_edges() == 12 && oct.num_faces() == 8, "octahedron counts");
  v.require(ico.num_vertices() == 12 && ico.num_edges() == 30 && ico.num_faces() == 20, "icosahedron counts");
  v.require(cli({"param", "--input", (dir / "octahedron.obj").string()}) == 0, "octahedron param failed");
  v.require(cli({"param", "--input", (dir / "icosahedron.off").string()}) == 0, "icosahedron param failed");
  if (v.pass) v.detail = "torus and non-manifold exit 2; octahedron 6/12/8, icosahedron 12/30/20";
  return v;
}

}  // namespace
}  // namespace saem

int main() {
  using saem::Verdict;
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"gradient oracle", saem::gradient_oracle}, {"energy identities", saem::energy_identities},
      {"monotonicity", saem::monotonicity},       {"magnitude targets", saem::magnitude},
      {"bijective correction", saem::correction}, {"determinism", saem::determinism},
      {"validation", saem::validation},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s %d %s: %s\n", v.pass ? "PASS" : "FAIL", index++, name, v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
