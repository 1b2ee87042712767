#include "entfate/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "entfate/errors.hpp"

namespace entfate {

namespace {

constexpr std::uint64_t kFermiStream = 0xfe21;

void check_optimizer(const OptimizerConfig& c, const char* flag) {
  try {
    c.validate();
  } catch (const DomainError& e) {
    throw DomainError(std::string(flag) + ": " + e.what());
  }
}

std::string join_sites(const SubsystemSpec& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? " " : "") + std::to_string(s[i]);
  return out;
}

// Runs body(i) for i in [0, n) in parallel and rethrows the first exception.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr error;
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(entfate_parallel_for_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

Curve make_curve(const std::vector<double>& s, const std::vector<double>& v) {
  Curve c;
  for (std::size_t i = 0; i < s.size(); ++i) c.emplace_back(s[i], v[i]);
  return c;
}

nlohmann::json crossing_json(const ZeroCrossing& z) {
  switch (z.kind) {
    case ZeroCrossing::Kind::found: return z.s;
    case ZeroCrossing::Kind::none: return "none";
    case ZeroCrossing::Kind::beyond_range: return "beyond_range";
  }
  return nullptr;
}

io::Cell optional_cell(const std::optional<double>& v) {
  if (v) return *v;
  return std::monostate{};
}

}  // namespace

std::vector<double> LinearGrid::values() const {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("linear grid needs lo <= hi and step > 0");
  }
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

std::vector<double> LogGrid::values() const {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw DomainError("log grid needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> out(static_cast<std::size_t>(points));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (points - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void RunConfig::validate() const {
  if (!std::isfinite(h) || h < 0.0) throw DomainError("--h: must be finite and >= 0");
  try {
    h_grid.values();
  } catch (const DomainError& e) {
    throw DomainError(std::string("--h-min/--h-max/--h-step: ") + e.what());
  }
  if (h_grid.lo < 0.0) throw DomainError("--h-min: must be >= 0");
  try {
    t_grid.values();
  } catch (const DomainError& e) {
    throw DomainError(std::string("--t-min/--t-max/--t-points: ") + e.what());
  }
  try {
    time_grid.values();
  } catch (const DomainError& e) {
    throw DomainError(std::string("--time-max/--time-step: ") + e.what());
  }
  if (time_grid.lo < 0.0) throw DomainError("--time-min: must be >= 0");
  if (pattern.size() != 12 || pattern.find_first_not_of("01ud") != std::string::npos) {
    throw DomainError("--pattern: need 12 characters from {0,1,u,d}, got '" + pattern + "'");
  }
  if (!face.empty() && face.size() != 3) throw DomainError("--face: need exactly 3 sites");
  if (!pair.empty() && pair.size() != 2) throw DomainError("--pair: need exactly 2 sites");
  check_optimizer(geometric, "--restarts");
  check_optimizer(w, "--w-restarts");
  if (modes != 3 && modes != 4) throw DomainError("--m: must be 3 or 4");
  if (seeds < 1) throw DomainError("--seeds: must be >= 1");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["out"] = out_dir.string();
  j["seed"] = seed;
  j["h"] = h;
  j["h_grid"] = {{"min", h_grid.lo}, {"max", h_grid.hi}, {"step", h_grid.step}};
  j["t_grid"] = {{"min", t_grid.lo}, {"max", t_grid.hi}, {"points", t_grid.points}};
  j["time_grid"] = {{"min", time_grid.lo}, {"max", time_grid.hi}, {"step", time_grid.step}};
  j["pattern"] = pattern;
  j["pair"] = pair;
  j["face"] = face;
  j["geometric"] = {{"restarts", geometric.restarts},
                    {"max_iterations", geometric.max_iterations},
                    {"tolerance", geometric.tolerance},
                    {"enabled", compute_geometric}};
  j["w"] = {{"restarts", w.restarts}, {"max_evaluations", w.max_iterations}, {"tolerance", w.tolerance}};
  j["m"] = modes;
  j["seeds"] = seeds;
  return j;
}

RunContext::RunContext(RunConfig config) : config_(std::move(config)), graph_(build_icosahedron()) {
  config_.validate();
  config_.geometric.seed = config_.seed;
  config_.w.seed = config_.seed;
  const SubsystemSpec f = face();
  f.check_range(graph_.vertex_count());
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a + 1; b < 3; ++b) {
      if (!graph_.adjacent(f[a], f[b])) throw DomainError("--face: sites must form a triangle");
    }
  }
  const SubsystemSpec p = pair();
  p.check_range(graph_.vertex_count());
  if (!graph_.adjacent(p[0], p[1])) throw DomainError("--pair: sites must be adjacent");
}

SubsystemSpec RunContext::face() const {
  if (!config_.face.empty()) return SubsystemSpec(config_.face);
  return triangle_scaled(graph_, 1);
}

SubsystemSpec RunContext::pair() const {
  if (!config_.pair.empty()) return SubsystemSpec(config_.pair);
  const SubsystemSpec f = face();
  return SubsystemSpec{f[0], f[1]};
}

std::shared_ptr<const SpectrumCache> RunContext::spectrum(double h) {
  for (const auto& [key, cache] : spectra_) {
    if (key == h) return cache;
  }
  const auto start = std::chrono::steady_clock::now();
  const ModelParams params{1.0, h};
  auto cache = std::make_shared<const SpectrumCache>(diagonalize(build_hamiltonian(graph_, params), params));
  ++diagonalizations_;
  add_timing("diagonalize", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  // one 4096-dim spectrum is 128 MiB; keep only the latest
  spectra_.clear();
  spectra_.emplace_back(h, cache);
  return cache;
}

void RunContext::add_timing(const std::string& stage, double seconds) {
  for (auto& [name, total] : timings_) {
    if (name == stage) {
      total += seconds;
      return;
    }
  }
  timings_.emplace_back(stage, seconds);
}

void RunContext::record_selection(const std::string& name, const SubsystemSpec& sites) {
  selections_[name] = sites.labels();
}

nlohmann::json RunContext::metadata(const nlohmann::json& derived) const {
  nlohmann::json j;
  j["artifact_version"] = kArtifactVersion;
  j["config"] = config_.to_json();
  j["seed"] = config_.seed;
  j["basis_convention"] = std::string(BasisConvention::id);
  j["log_base"] = "e";
  j["diagonalizations"] = diagonalizations_;
  nlohmann::json t = nlohmann::json::array();
  for (const auto& [name, seconds] : timings_) t.push_back({{"stage", name}, {"seconds", seconds}});
  j["timings"] = t;
  j["selections"] = selections_;
  if (!derived.is_null()) j["derived"] = derived;
  return j;
}

RunContext::Stage::Stage(RunContext& ctx, std::string name)
    : ctx_(ctx), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

RunContext::Stage::~Stage() {
  ctx_.add_timing(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
}

DetectorValues evaluate_detectors(const DensityMatrix& pair_rdm, const DensityMatrix& face_rdm,
                                  const RunConfig& config) {
  DetectorValues v;
  v.e_logneg = log_negativity(pair_rdm, SubsystemSpec{pair_rdm.sites().front()});
  if (config.compute_geometric) v.d_geom = geometric_entanglement(face_rdm, config.geometric).value;
  v.w_gme = gme_W(face_rdm, config.w).value;
  return v;
}

FieldSweepResult field_sweep(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const SubsystemSpec face = ctx.face(), pair = ctx.pair();
  ctx.record_selection("face", face);
  ctx.record_selection("pair", pair);
  FieldSweepResult out;
  out.table.columns = {"h", "E_logneg", "D_geom", "W_gme", "sz", "sxsx_conn", "sysy_conn", "szsz_conn"};
  const auto hs = cfg.h_grid.values();
  std::vector<double> e_values;
  for (double h : hs) {
    const auto cache = ctx.spectrum(h);
    RunContext::Stage stage(ctx, "measures");
    const auto rdm = [&](const SubsystemSpec& keep) { return zero_temperature_rdm(*cache, keep); };
    const DetectorValues d = evaluate_detectors(rdm(pair), rdm(face), cfg);
    const SpinObservables obs = observables(rdm, ctx.graph());
    out.table.add_row({h, d.e_logneg, optional_cell(d.d_geom), d.w_gme, obs.sz, obs.sxsx_conn,
                       obs.sysy_conn, obs.szsz_conn});
    e_values.push_back(d.e_logneg);
  }
  out.h2_star = onset_crossing(make_curve(hs, e_values));
  return out;
}

nlohmann::json Thresholds::to_json() const {
  nlohmann::json j;
  j["T2"] = t2;
  j["T3"] = t3;
  j["T_E"] = crossing_json(t_e);
  j["T_W"] = crossing_json(t_w);
  j["T3_star"] = t3_star ? nlohmann::json(*t3_star) : nlohmann::json(nullptr);
  return j;
}

TempSweepResult temp_sweep(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const SubsystemSpec face = ctx.face(), pair = ctx.pair();
  ctx.record_selection("face", face);
  ctx.record_selection("pair", pair);
  const auto cache = ctx.spectrum(cfg.h);

  std::optional<ThermalSeries> pair_series, face_series;
  {
    RunContext::Stage stage(ctx, "eigenstate_rdms");
    pair_series.emplace(*cache, pair);
    face_series.emplace(*cache, face);
  }
  const SeparableBall ball2 = separable_ball(DensityMatrix::maximally_mixed(2));
  const SeparableBall ball3 = separable_ball(DensityMatrix::maximally_mixed(3));

  const auto ts = cfg.t_grid.values();
  std::vector<DetectorValues> values(ts.size());
  std::vector<double> dist2(ts.size()), dist3(ts.size());
  {
    RunContext::Stage stage(ctx, "measures");
    parallel_for(ts.size(), [&](std::size_t i) {
      const DensityMatrix rp = pair_series->at(ts[i]);
      const DensityMatrix rf = face_series->at(ts[i]);
      values[i] = evaluate_detectors(rp, rf, cfg);
      dist2[i] = frobenius_distance(rp.matrix(), ball2.center.matrix());
      dist3[i] = frobenius_distance(rf.matrix(), ball3.center.matrix());
    });
  }

  TempSweepResult out;
  out.table.columns = {"T", "E_logneg", "D_geom", "W_gme", "dist2_to_I4", "dist3_to_I8"};
  std::vector<double> e_values, w_values;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out.table.add_row({ts[i], values[i].e_logneg, optional_cell(values[i].d_geom), values[i].w_gme,
                       dist2[i], dist3[i]});
    e_values.push_back(values[i].e_logneg);
    w_values.push_back(values[i].w_gme);
    if (!out.thresholds.t3_star && values[i].d_geom && *values[i].d_geom <= kEffectivelySeparable) {
      out.thresholds.t3_star = ts[i];
    }
  }
  {
    RunContext::Stage stage(ctx, "thresholds");
    const auto pair_at = [&](double t) { return pair_series->at(t); };
    const auto face_at = [&](double t) { return face_series->at(t); };
    out.thresholds.t2 = temperature_threshold(pair_at, ball2, ts.front(), ts.back()).temperature;
    out.thresholds.t3 = temperature_threshold(face_at, ball3, ts.front(), ts.back()).temperature;
  }
  out.thresholds.t_e = zero_crossing(make_curve(ts, e_values));
  out.thresholds.t_w = zero_crossing(make_curve(ts, w_values));
  return out;
}

io::Table quench(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const SubsystemSpec face = ctx.face(), pair = ctx.pair();
  ctx.record_selection("face", face);
  ctx.record_selection("pair", pair);
  const PureState psi0 = product_basis_state(cfg.pattern, ctx.graph().vertex_count());
  const auto cache = ctx.spectrum(cfg.h);
  const QuenchEvolution evolution(*cache, psi0);
  const BasisConvention conv(cache->n_sites());

  const auto ts = cfg.time_grid.values();
  std::vector<DetectorValues> values(ts.size());
  {
    RunContext::Stage stage(ctx, "measures");
    parallel_for(ts.size(), [&](std::size_t i) {
      const PureState psi = evolution.at(ts[i]);
      values[i] = evaluate_detectors(partial_trace(psi, pair, conv), partial_trace(psi, face, conv), cfg);
    });
  }
  io::Table table;
  table.columns = {"t", "E_logneg", "D_geom", "W_gme"};
  for (std::size_t i = 0; i < ts.size(); ++i) {
    table.add_row({ts[i], values[i].e_logneg, optional_cell(values[i].d_geom), values[i].w_gme});
  }
  return table;
}

io::Table separation(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const auto cache = ctx.spectrum(cfg.h);
  const SiteGraph& g = ctx.graph();
  io::Table table;
  table.columns = {"kind", "scale", "sites", "E_logneg", "D_geom", "W_gme"};
  RunContext::Stage stage(ctx, "measures");
  for (int d : {1, 2}) {
    const SubsystemSpec sites = pair_at_distance(g, d);
    ctx.record_selection("pair_d" + std::to_string(d), sites);
    const DensityMatrix rho = zero_temperature_rdm(*cache, sites);
    const double e = log_negativity(rho, SubsystemSpec{sites[0]});
    std::optional<double> dg;
    if (cfg.compute_geometric) dg = geometric_entanglement(rho, cfg.geometric).value;
    table.add_row({std::string("pair"), static_cast<double>(d), join_sites(sites), e, optional_cell(dg),
                   std::monostate{}});
  }
  for (int scale : {1, 2}) {
    const SubsystemSpec sites = triangle_scaled(g, scale);
    ctx.record_selection("triangle_s" + std::to_string(scale), sites);
    const DensityMatrix rho = zero_temperature_rdm(*cache, sites);
    std::optional<double> dg;
    if (cfg.compute_geometric) dg = geometric_entanglement(rho, cfg.geometric).value;
    const double w = gme_W(rho, cfg.w).value;
    table.add_row({std::string("triangle"), static_cast<double>(scale), join_sites(sites),
                   std::monostate{}, optional_cell(dg), w});
  }
  return table;
}

io::Table frh(RunContext& ctx) {
  const RunConfig& cfg = ctx.config();
  const auto cache = ctx.spectrum(cfg.h);
  const SubsystemSpec face = ctx.face();
  const SubsystemSpec one{face[0]}, two{face[0], face[1]};
  ctx.record_selection("site", one);
  ctx.record_selection("pair", two);
  ctx.record_selection("face", face);
  std::vector<FrhEntry> s1, s2, s3;
  {
    RunContext::Stage stage(ctx, "frh");
    s1 = frh_sweep(*cache, one);
    s2 = frh_sweep(*cache, two);
    s3 = frh_sweep(*cache, face);
  }
  io::Table table;
  table.columns = {"n", "E_n", "lambda_min_1site", "lambda_min_2site", "lambda_min_3site"};
  table.rows.reserve(s1.size());
  for (std::size_t n = 0; n < s1.size(); ++n) {
    table.add_row({static_cast<double>(n), s1[n].energy, s1[n].lambda_min, s2[n].lambda_min, s3[n].lambda_min});
  }
  return table;
}

namespace {

nlohmann::json report_json(const fermi::VerificationReport& r) {
  return {{"min_eigenvalue", r.min_eigenvalue},
          {"max_parity_commutator", r.max_parity_commutator},
          {"reconstruction_error", r.reconstruction_error},
          {"pass", r.pass()}};
}

fermi::VerificationReport verify_at(const fermi::FermionicEnsemble& ens, double eps) {
  const auto decomp = fermi::biseparable_decomposition(ens, eps);
  return fermi::verify_decomposition(decomp, fermi::assemble_rho_eps(ens, eps).matrix());
}

nlohmann::json analytic_case(int modes, double expected, bool& pass) {
  const auto ens = fermi::uniform_sigma_x_ensemble(modes);
  const auto es = fermi::epsilon_star(ens);
  const bool matches = std::abs(es.value - expected) <= 1e-6;
  const auto at_star = verify_at(ens, es.value);
  const auto beyond = verify_at(ens, 1.5 * es.value);
  const bool ok = matches && at_star.pass() && !beyond.psd_ok;
  pass = pass && ok;
  return {{"m", modes},
          {"epsilon_star", es.value},
          {"expected", expected},
          {"at_epsilon_star", report_json(at_star)},
          {"at_1.5_epsilon_star", report_json(beyond)},
          {"pass", ok}};
}

}  // namespace

FermiVerifyResult fermi_verify(const RunConfig& config) {
  config.validate();
  FermiVerifyResult out;
  out.pass = true;
  nlohmann::json failures = nlohmann::json::array();
  double worst_eig = std::numeric_limits<double>::infinity(), worst_comm = 0.0, worst_rec = 0.0;
  int block_bound = 0, mode_bound = 0;
  for (int s = 0; s < config.seeds; ++s) {
    auto rng = restart_rng(config.seed, kFermiStream, static_cast<std::uint64_t>(s));
    const auto ens = fermi::random_ensemble(config.modes, rng);
    const auto es = fermi::epsilon_star(ens);
    (es.binding == fermi::EpsilonStar::Binding::mode_positivity ? mode_bound : block_bound)++;
    for (double eps : {0.5 * es.value, es.value}) {
      const auto r = verify_at(ens, eps);
      worst_eig = std::min(worst_eig, r.min_eigenvalue);
      worst_comm = std::max(worst_comm, r.max_parity_commutator);
      worst_rec = std::max(worst_rec, r.reconstruction_error);
      if (!r.pass()) {
        out.pass = false;
        failures.push_back({{"seed_index", s}, {"epsilon", eps}, {"report", report_json(r)}});
      }
    }
  }
  nlohmann::json analytic = nlohmann::json::array();
  analytic.push_back(analytic_case(3, 1.0 / (2.0 * std::sqrt(3.0)), out.pass));
  if (config.modes == 4) analytic.push_back(analytic_case(4, 1.0 / std::sqrt(28.0), out.pass));

  out.report = {{"m", config.modes},
                {"seed", config.seed},
                {"seeds", config.seeds},
                {"failures", failures},
                {"worst", {{"min_eigenvalue", worst_eig},
                           {"max_parity_commutator", worst_comm},
                           {"reconstruction_error", worst_rec}}},
                {"binding", {{"block_positivity", block_bound}, {"mode_positivity", mode_bound}}},
                {"analytic", analytic},
                {"pass", out.pass}};
  return out;
}

void write_outputs(const RunContext& ctx, const std::string& stem, const io::Table& table,
                   const nlohmann::json& derived) {
  const auto& dir = ctx.config().out_dir;
  std::filesystem::create_directories(dir);
  io::write_csv(dir / (stem + ".csv"), table);
  std::ofstream meta(dir / "metadata.json");
  meta << ctx.metadata(derived).dump(2) << '\n';
}

}  // namespace entfate
