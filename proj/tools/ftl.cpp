// Command-line front end: one subcommand per experiment, CSV + JSON reports.
//
// Exit codes: 0 success, 1 input error, 2 certification failure.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "ftl/appendix.hpp"
#include "ftl/localization.hpp"

using namespace ftl;
using json = nlohmann::json;

namespace {

constexpr uint64_t kDefaultSeed = 20240901;

ModelDomain get_domain(const std::string& arg) {
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return load_domain(arg);
  std::string alt = std::string(FTL_DOMAIN_DIR) + "/" + arg;
  if (fs::exists(alt)) return load_domain(alt);
  if (fs::exists(alt + ".json")) return load_domain(alt + ".json");
  throw std::runtime_error("domain file not found: " + arg);
}

DomainSpec get_spec(const std::string& arg) {
  namespace fs = std::filesystem;
  if (fs::exists(arg)) return load_domain_spec(arg);
  std::string alt = std::string(FTL_DOMAIN_DIR) + "/" + arg;
  if (fs::exists(alt)) return load_domain_spec(alt);
  return load_domain_spec(alt + ".json");
}

// "min:max:count" -> ascending log-spaced grid.
std::vector<double> parse_grid(const std::string& s) {
  double lo, hi;
  int count;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
      !(lo > 0) || !(hi > lo) || count < 2)
    throw std::runtime_error("bad grid spec (want min:max:count): " + s);
  return log_grid(lo, hi, count);
}

// Comma-separated reals: n entries (real parts) or 2n (re,im interleaved).
Point parse_point(const std::string& s, int n) {
  if (s.empty()) return Point::Zero(n);
  std::vector<double> v;
  std::string tok;
  std::istringstream in(s);
  while (std::getline(in, tok, ',')) v.push_back(std::stod(tok));
  Point p = Point::Zero(n);
  if ((int)v.size() == n) {
    for (int i = 0; i < n; ++i) p[i] = v[i];
  } else if ((int)v.size() == 2 * n) {
    for (int i = 0; i < n; ++i) p[i] = Cplx(v[2 * i], v[2 * i + 1]);
  } else {
    throw std::runtime_error("point needs " + std::to_string(n) + " or " +
                             std::to_string(2 * n) + " comma-separated reals");
  }
  return p;
}

// Direction over the canonical frame: sum of terms [coef*][i*]e<k> with e<k>
// numbered as in the input file (the normal slot is mapped to the last frame
// slot). Example: "e2+e3", "0.5*e1-i*e2".
Eigen::VectorXcd parse_direction(const std::string& s, const DomainSpec& spec) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(spec.n);
  size_t i = 0;
  auto fail = [&](const std::string& m) {
    throw std::runtime_error("bad direction \"" + s + "\": " + m);
  };
  while (i < s.size()) {
    double sign = 1;
    while (i < s.size() && (s[i] == '+' || s[i] == '-' || s[i] == ' ')) {
      if (s[i] == '-') sign = -sign;
      ++i;
    }
    if (i >= s.size()) break;
    Cplx coef = sign;
    while (s[i] != 'e') {
      size_t j = s.find('*', i);
      if (j == std::string::npos) fail("expected e<k> term");
      std::string f = s.substr(i, j - i);
      if (f == "i")
        coef *= Cplx(0, 1);
      else
        coef *= std::stod(f);
      i = j + 1;
    }
    ++i; // 'e'
    size_t j = i;
    while (j < s.size() && std::isdigit((unsigned char)s[j])) ++j;
    if (j == i) fail("missing slot number");
    int k = std::stoi(s.substr(i, j - i)); // 1-based, file numbering
    if (k < 1 || k > spec.n) fail("slot out of range");
    int slot = k == spec.normal_slot ? spec.n - 1
                                     : (k < spec.normal_slot ? k - 1 : k - 2);
    a[slot] += coef;
    i = j;
  }
  if (a.norm() == 0) fail("zero direction");
  return a;
}

FrameProvider pick_provider(const std::string& name) {
  if (name == "canonical") return canonical_provider();
  if (name == "levi-eigen") return levi_eigen_provider();
  throw std::runtime_error("unknown frame provider: " + name);
}

json point_json(const Point& p) {
  json out = json::array();
  for (int i = 0; i < p.size(); ++i)
    out.push_back({p[i].real(), p[i].imag()});
  return out;
}

void emit(json& j) {
  j["schema"] = 1;
  std::cout << j.dump(2) << "\n";
}

json fit_json(const LineFit& f) {
  return {{"intercept", f.a}, {"slope", f.b}, {"r2", f.r2}};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-type domain laboratory"};
  app.require_subcommand(1);

  std::string domain, out, pstr, qstr, dir = "e1", kind = "eb1",
                                      frame = "canonical", grid = "1e-6:1e-2:25";
  double delta = 1e-2, c = 0.25, cpsh = 0.15, K = 100, dloc = 0.2, maxK = 0;
  int samples = 200, mc = 20000, count = 200, maxorder = 4, M = 0;
  int jobs = (int)std::max(1u, std::thread::hardware_concurrency());
  uint64_t seed = kDefaultSeed;
  bool assert_sep = false;
  int rc = 0;

  auto add_common = [&](CLI::App* sub, bool needs_domain = true) {
    if (needs_domain)
      sub->add_option("--domain", domain, "domain JSON file (path or catalog name)")
          ->required();
    sub->add_option("--seed", seed, "RNG seed (FTL_SEED overrides)");
    sub->add_option("--jobs", jobs, "worker pool size");
    sub->add_option("-M,--order", M, "list order (default: the domain's M)");
  };

  // ---- weights -------------------------------------------------------------
  auto* w = app.add_subcommand("weights", "F_M(L,p,delta) sweep for one direction");
  add_common(w);
  w->add_option("--dir", dir, "direction over the frame, e.g. \"e2+e3\"");
  w->add_option("--p", pstr, "base point (comma-separated reals)");
  w->add_option("--delta", grid, "delta grid min:max:count");
  w->add_option("--out", out, "CSV output path");
  w->callback([&] {
    ModelDomain d = get_domain(domain);
    DomainSpec spec = get_spec(domain);
    int m = M > 0 ? M : d.M;
    Point p = parse_point(pstr, d.n);
    Eigen::VectorXcd a = parse_direction(dir, spec);
    WeightEngine eng(tangent_frame(d), d, p, m);
    std::vector<double> ds = parse_grid(grid), Fs;
    CsvWriter csv{out.empty() ? "weights.csv" : out, {"delta", "F"}, {}};
    for (double dv : ds) {
      double F = eng.weight(a, dv).value;
      Fs.push_back(F);
      csv.rows.push_back({fmt17(dv), fmt17(F)});
    }
    csv.write();
    LineFit fit = fit_loglog(ds, Fs);
    json j{{"command", "weights"}, {"domain", d.name}, {"dir", dir},
           {"M", m},               {"csv", csv.path},  {"fit", fit_json(fit)}};
    emit(j);
  });

  // ---- eb-check / balpha ---------------------------------------------------
  auto* eb = app.add_subcommand("eb-check", "extremal-basis certificate (EB1/EB2)");
  add_common(eb);
  eb->add_option("--p", pstr, "base point");
  eb->add_option("--delta", delta, "scale delta");
  eb->add_option("--kind", kind, "eb1 or eb2");
  eb->add_option("--frame", frame, "canonical or levi-eigen");
  eb->add_option("--samples", samples, "random directions for EB1");
  eb->add_option("--max", maxK, "exit 2 when K_est exceeds this (0: report only)");
  eb->callback([&] {
    ModelDomain d = get_domain(domain);
    int m = M > 0 ? M : d.M;
    Point p = parse_point(pstr, d.n);
    if (kind != "eb1" && kind != "eb2")
      throw std::runtime_error("--kind must be eb1 or eb2");
    Frame f = pick_provider(frame)(d, p, delta);
    ExtremalityCertificate cert =
        kind == "eb2" ? check_eb2(f, d, p, delta, m)
                      : check_eb1(f, d, p, delta, m, samples,
                                  effective_seed(seed));
    json j{{"command", "eb-check"},   {"domain", d.name},
           {"kind", kind},            {"delta", delta},
           {"p", point_json(p)},      {"K_est", cert.K_est},
           {"witness", cert.witness}, {"samples", cert.sample_size},
           {"degenerate", cert.degenerate}};
    emit(j);
    if (maxK > 0 && !(cert.K_est <= maxK)) rc = 2;
  });

  auto* ba = app.add_subcommand("balpha", "condition B(alpha) estimate");
  add_common(ba);
  ba->add_option("--p", pstr, "base point");
  ba->add_option("--delta", delta, "scale delta");
  ba->add_option("--frame", frame, "canonical or levi-eigen");
  ba->add_option("--max", maxK, "exit 2 when alpha_est exceeds this");
  ba->callback([&] {
    ModelDomain d = get_domain(domain);
    int m = M > 0 ? M : d.M;
    Point p = parse_point(pstr, d.n);
    Frame f = pick_provider(frame)(d, p, delta);
    ExtremalityCertificate cert = check_balpha(f, d, p, delta, m);
    json j{{"command", "balpha"}, {"domain", d.name},
           {"delta", delta},      {"alpha_est", cert.K_est},
           {"witness", cert.witness}, {"degenerate", cert.degenerate}};
    emit(j);
    if (maxK > 0 && !(cert.K_est <= maxK)) rc = 2;
  });

  // ---- coords --------------------------------------------------------------
  auto* co = app.add_subcommand("coords", "adapted chart diagnostics");
  add_common(co);
  co->add_option("--p", pstr, "boundary base point");
  co->add_option("--delta", delta, "scale delta");
  co->add_option("--frame", frame, "canonical or levi-eigen");
  co->callback([&] {
    ModelDomain d = get_domain(domain);
    int m = M > 0 ? M : d.M;
    Point p = parse_point(pstr, d.n);
    Frame f = pick_provider(frame)(d, p, delta);
    AdaptedChart ch = adapted_coords(f, d, p, delta, m);
    json F = json::array();
    for (int i = 0; i < ch.F.size(); ++i) F.push_back(ch.F[i]);
    json j{{"command", "coords"},
           {"domain", d.name},
           {"delta", delta},
           {"degree", ch.map.degree},
           {"coeff_bound", ch.map.coeff_bound},
           {"roundtrip_residual", ch.map.roundtrip_residual},
           {"max_pure_derivative", ch.max_pure},
           {"K_prime", ch.K_prime},
           {"cond3_max", ch.cond3_max},
           {"F", F}};
    emit(j);
  });

  // ---- ball ----------------------------------------------------------------
  auto* bl = app.add_subcommand("ball", "pseudo-ball volume and exp comparison");
  add_common(bl);
  bl->add_option("--p", pstr, "boundary base point");
  bl->add_option("--delta", delta, "scale delta");
  bl->add_option("--c", c, "ball scale");
  bl->add_option("--mc", mc, "Monte-Carlo samples");
  bl->add_option("--samples", samples, "exp comparison samples");
  bl->add_option("--frame", frame, "canonical or levi-eigen");
  bl->callback([&] {
    ModelDomain d = get_domain(domain);
    int m = M > 0 ? M : d.M;
    Point p = parse_point(pstr, d.n);
    Frame f = pick_provider(frame)(d, p, delta);
    auto chart = std::make_shared<const AdaptedChart>(
        adapted_coords(f, d, p, delta, m));
    PseudoBall ball = make_pseudo_ball(chart, c);
    VolumeEstimate vol = ball_volume(ball, mc, effective_seed(seed), d.window);
    BallEquivalence eq = ball_equivalence_check(f, d, p, delta, c, samples,
                                                effective_seed(seed));
    json radii = json::array();
    for (int i = 0; i < ball.radii.size(); ++i) radii.push_back(ball.radii[i]);
    json j{{"command", "ball"},        {"domain", d.name},
           {"delta", delta},           {"c", c},
           {"radii", radii},           {"volume", vol.value},
           {"std_error", vol.std_error},
           {"exp_alpha", eq.alpha},    {"exp_beta", eq.beta},
           {"shooting_failures", eq.shooting_failures}};
    emit(j);
  });

  // ---- gamma ---------------------------------------------------------------
  auto* ga = app.add_subcommand("gamma", "pseudo-distance gamma(p,q)");
  add_common(ga);
  ga->add_option("--p", pstr, "first point")->required();
  ga->add_option("--q", qstr, "second point")->required();
  ga->add_option("--c", c, "ball scale");
  ga->add_option("--frame", frame, "canonical or levi-eigen");
  ga->callback([&] {
    ModelDomain d = get_domain(domain);
    HomogOptions opt;
    opt.c = c;
    if (M > 0) opt.M = M;
    Point p = parse_point(pstr, d.n), q = parse_point(qstr, d.n);
    double g = gamma(d, p, q, pick_provider(frame), opt);
    json j{{"command", "gamma"}, {"domain", d.name}, {"p", point_json(p)},
           {"q", point_json(q)}, {"c", c},           {"gamma", g}};
    emit(j);
  });

  // ---- doubling ------------------------------------------------------------
  auto* db = app.add_subcommand("doubling", "doubling and engulfing constants");
  add_common(db);
  db->add_option("--p", pstr, "boundary base point");
  db->add_option("--delta", delta, "scale delta");
  db->add_option("--mc", mc, "Monte-Carlo samples per volume");
  db->add_option("--samples", samples, "engulfing boundary samples");
  db->add_option("--c", c, "ball scale");
  db->add_option("--frame", frame, "canonical or levi-eigen");
  db->callback([&] {
    ModelDomain d = get_domain(domain);
    HomogOptions opt;
    opt.c = c;
    if (M > 0) opt.M = M;
    Point p = parse_point(pstr, d.n);
    FrameProvider fp = pick_provider(frame);
    double dbl =
        doubling_constant(d, p, delta, mc, fp, opt, effective_seed(seed));
    double eng = engulfing_constant(d, p, delta, samples, fp, opt,
                                    effective_seed(seed));
    json j{{"command", "doubling"}, {"domain", d.name}, {"delta", delta},
           {"doubling", dbl},       {"engulfing", eng}};
    emit(j);
  });

  // ---- bergman -------------------------------------------------------------
  auto* bg = app.add_subcommand("bergman", "diagonal sweep: estimate vs oracle");
  add_common(bg);
  bg->add_option("--sweep", grid, "delta grid min:max:count");
  bg->add_option("--c", c, "star-ball scale");
  bg->add_option("--sphere-samples", samples, "star-volume sphere samples");
  bg->add_option("--frame", frame, "canonical or levi-eigen");
  bg->add_option("--out", out, "CSV output path");
  bg->callback([&] {
    ModelDomain d = get_domain(domain);
    std::vector<double> ds = parse_grid(grid);
    KernelSweep ks = kernel_sweep(d, ds, pick_provider(frame), c, samples,
                                  effective_seed(seed));
    CsvWriter csv{out.empty() ? "bergman.csv" : out,
                  {"delta", "estimate", "oracle", "star_volume"},
                  {}};
    for (size_t i = 0; i < ks.deltas.size(); ++i)
      csv.rows.push_back({fmt17(ks.deltas[i]), fmt17(ks.estimate[i]),
                          fmt17(ks.has_oracle ? ks.oracle[i] : 0.0),
                          fmt17(ks.star_volume[i])});
    csv.write();
    json j{{"command", "bergman"},
           {"domain", d.name},
           {"csv", csv.path},
           {"has_oracle", ks.has_oracle},
           {"estimate_fit", fit_json(ks.estimate_fit)},
           {"oracle_fit", fit_json(ks.oracle_fit)},
           {"star_fit", fit_json(ks.star_fit)},
           {"log_correction_fit", fit_json(ks.log_correction_fit)},
           {"verdict", ks.verdict}};
    emit(j);
  });

  // ---- star-volume ---------------------------------------------------------
  auto* sv = app.add_subcommand("star-volume", "volume of the star ball D(p,delta)");
  add_common(sv);
  sv->add_option("--p", pstr, "base point");
  sv->add_option("--delta", delta, "scale delta");
  sv->add_option("--c", c, "ball scale");
  sv->add_option("--samples", samples, "tangential sphere samples");
  sv->add_option("--frame", frame, "canonical or levi-eigen");
  sv->callback([&] {
    ModelDomain d = get_domain(domain);
    Point p = parse_point(pstr, d.n);
    Frame f = pick_provider(frame)(d, p, delta);
    VolumeEstimate vol =
        star_ball_volume(f, d, p, delta, c, samples, effective_seed(seed));
    json j{{"command", "star-volume"}, {"domain", d.name},
           {"delta", delta},           {"c", c},
           {"volume", vol.value},      {"std_error", vol.std_error},
           {"samples", vol.samples}};
    emit(j);
  });

  // ---- herbort-cert --------------------------------------------------------
  auto* hc = app.add_subcommand("herbort-cert",
                                "two-direction non-separation certificate");
  add_common(hc);
  hc->add_option("--delta", grid, "delta grid min:max:count");
  hc->add_option("--K", K, "extremality constant to test");
  hc->add_flag("--assert-separable", assert_sep,
               "exit 2 when the verdict is `not separable'");
  hc->add_option("--out", out, "CSV output path");
  hc->callback([&] {
    ModelDomain d = get_domain(domain);
    SeparationReport rep = separation_certificate(
        d, Point::Zero(d.n), parse_grid(grid), K);
    CsvWriter csv{out.empty() ? "herbort-cert.csv" : out,
                  {"delta", "F2", "F3", "Fsum", "s"},
                  {}};
    for (size_t i = 0; i < rep.deltas.size(); ++i)
      csv.rows.push_back({fmt17(rep.deltas[i]), fmt17(rep.F2[i]),
                          fmt17(rep.F3[i]), fmt17(rep.Fsum[i]),
                          fmt17(rep.s[i])});
    csv.write();
    json j{{"command", "herbort-cert"},
           {"domain", d.name},
           {"K", K},
           {"csv", csv.path},
           {"s_fit", fit_json(rep.s_fit)},
           {"verdict", rep.verdict},
           {"delta_K", rep.delta_K}};
    emit(j);
    if (assert_sep && rep.verdict.find("not separable") != std::string::npos)
      rc = 2;
  });

  // ---- psh-build / psh-verify ---------------------------------------------
  auto add_psh = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--p", pstr, "boundary base point");
    sub->add_option("--delta", delta, "scale delta");
    sub->add_option("--c", cpsh, "cover ball scale");
    sub->add_option("--frame", frame, "canonical or levi-eigen");
  };
  auto build_psh = [&](const ModelDomain& d, const Point& p) {
    PSHOptions opt;
    opt.c = cpsh;
    opt.seed = effective_seed(seed);
    return assemble_H(d, p, pick_provider(frame), delta, opt);
  };
  auto asm_json = [](const PSHAssembly& a) {
    return json{{"centers", a.centers.size()}, {"tuples", a.tuples},
                {"local_pieces", a.local_pieces}, {"A", a.A},
                {"B", a.B_const},                {"gamma1", a.gamma1},
                {"K0", a.K0},                    {"scale", a.scale},
                {"sup_bound", a.bound},          {"c0", a.c0}};
  };

  auto* pb = app.add_subcommand("psh-build", "assemble the adapted PSH function");
  add_psh(pb);
  pb->callback([&] {
    ModelDomain d = get_domain(domain);
    Point p = parse_point(pstr, d.n);
    PSHAssembly a = build_psh(d, p);
    json j{{"command", "psh-build"}, {"domain", d.name}, {"delta", delta},
           {"assembly", asm_json(a)}};
    emit(j);
  });

  auto* pv = app.add_subcommand("psh-verify",
                                "assemble and check the three PSH conditions");
  add_psh(pv);
  pv->add_option("--grid-points", samples, "strip grid size")->default_val(100);
  pv->callback([&] {
    ModelDomain d = get_domain(domain);
    Point p = parse_point(pstr, d.n);
    PSHAssembly a = build_psh(d, p);
    GridSpec gs;
    gs.points = samples;
    gs.seed = effective_seed(seed);
    BetaReport rep = verify_adapted(a, d, delta, gs, pick_provider(frame));
    json j{{"command", "psh-verify"},
           {"domain", d.name},
           {"delta", delta},
           {"assembly", asm_json(a)},
           {"beta", rep.beta},
           {"sup_H", rep.sup_H},
           {"worst_hess_ratio", rep.worst_hess_ratio},
           {"worst_list_ratio", rep.worst_list_ratio},
           {"hess_min_eig", rep.hess_min_eig},
           {"cond2_failed", rep.cond2_failed},
           {"grid_points", rep.grid_points}};
    emit(j);
    if (rep.cond2_failed || !std::isfinite(rep.beta)) rc = 2;
  });

  // ---- localize ------------------------------------------------------------
  auto* lc = app.add_subcommand("localize",
                                "bump localization and frame transport check");
  add_common(lc);
  lc->add_option("--d", dloc, "localization depth (O at distance d inside)");
  lc->add_option("--delta", delta, "scale delta");
  lc->add_option("--samples", samples, "strict-PSH sample count");
  lc->callback([&] {
    ModelDomain d = get_domain(domain);
    int m = M > 0 ? M : d.M;
    LocalizedDomain ld = make_localized(d, dloc, samples, effective_seed(seed));
    // One boundary point of D in the bump-active band.
    Rng rng(effective_seed(seed));
    Point p;
    double rel = 0;
    for (int tries = 0; tries < 4000; ++tries) {
      Point u = random_unit_vector(rng, d.n);
      double lo = 0, hi = 2.0 * ld.mu;
      if (eval_at(ld.r, Point(ld.O + hi * u)).real() <= 0) continue;
      for (int b = 0; b < 80; ++b) {
        double mid = 0.5 * (lo + hi);
        (eval_at(ld.r, Point(ld.O + mid * u)).real() < 0 ? lo : hi) = mid;
      }
      p = ld.O + 0.5 * (lo + hi) * u;
      rel = std::sqrt(ld.s_at(p)) / ld.mu;
      if (rel >= 1.3 && rel <= 1.85) break;
    }
    Point q = project_to_boundary(ld, p);
    Frame om = orthonormalize(tangent_frame(d), d, q, delta, m);
    LocalFrame lf = build_local_frame(ld, p, delta, om);
    RatioReport rr = localized_weight_check(ld, p, delta, lf);
    std::string pattern;
    for (bool b : lf.chose_T) pattern += b ? 'T' : 'W';
    json j{{"command", "localize"},
           {"domain", d.name},
           {"d", ld.d},
           {"mu", ld.mu},
           {"K0", ld.K0},
           {"strict_min_eig", ld.strict_min_eig},
           {"point_rel", rel},
           {"delta", delta},
           {"K_prime", lf.Kprime},
           {"chose", pattern},
           {"ratio_max", rr.max_ratio},
           {"ratio_min", rr.min_ratio},
           {"directions", rr.directions}};
    emit(j);
    if (!std::isfinite(rr.max_ratio) || rr.max_ratio <= 0) rc = 2;
  });

  // ---- appendix ------------------------------------------------------------
  auto* ap = app.add_subcommand("appendix",
                                "iterated-Laplacian domination corpus sweep");
  add_common(ap, /*needs_domain=*/false);
  ap->add_option("--count", count, "corpus size");
  ap->add_option("--max-order", maxorder, "max |alpha0+beta0| tested");
  ap->add_option("--out", out, "CSV output path");
  ap->callback([&] {
    std::atomic<int> next{0}, checked{0}, violations{0};
    std::mutex mu;
    std::map<int, double> worstC;
    CsvWriter csv{out.empty() ? "appendix.csv" : out,
                  {"seed", "degree", "j", "K1", "targets", "max_C"},
                  {}};
    csv.rows.resize(count);
    auto worker = [&] {
      for (int s; (s = next.fetch_add(1)) < count;) {
        uint64_t sd = (uint64_t)s + 1;
        int degree = 2 * (1 + (int)(sd % 4)), jdim = 1 + (int)(sd % 2);
        GeneratedPoly gp = random_nonneg_poly(sd, degree, jdim);
        int local = 0;
        double localC = 0;
        // Odometer over (alpha, beta) with |alpha + beta| <= maxorder.
        std::vector<int> flat(2 * jdim, 0);
        while (true) {
          int tot = 0;
          for (int v : flat) tot += v;
          if (tot > 0 && tot <= maxorder) {
            std::vector<int> a0(flat.begin(), flat.begin() + jdim);
            std::vector<int> b0(flat.begin() + jdim, flat.end());
            if (std::abs(derivative_at_zero(gp.g, a0, b0)) > 1e-12) {
              DominationResult r = laplacian_domination(gp.g, a0, b0, gp.K1);
              ++local;
              if (!(r.value > 0)) ++violations;
              localC = std::max(localC, r.constant);
            }
          }
          int i = 0;
          while (i < 2 * jdim && flat[i] == maxorder) flat[i++] = 0;
          if (i == 2 * jdim) break;
          ++flat[i];
        }
        checked += local;
        csv.rows[s] = {std::to_string(sd),    std::to_string(degree),
                       std::to_string(jdim),  fmt17(gp.K1),
                       std::to_string(local), fmt17(localC)};
        std::lock_guard<std::mutex> lk(mu);
        int bucket = (int)std::floor(std::log10(gp.K1));
        worstC[bucket] = std::max(worstC[bucket], localC);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, jobs); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    csv.write();
    json buckets = json::object();
    for (const auto& [b, C] : worstC)
      buckets["1e" + std::to_string(b)] = C;
    json j{{"command", "appendix"},   {"count", count},
           {"targets_checked", checked.load()},
           {"violations", violations.load()},
           {"max_C_per_K1_bucket", buckets},
           {"csv", csv.path}};
    emit(j);
    if (violations.load() > 0) rc = 2;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
