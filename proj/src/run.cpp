// Copyright 2026 The fermix Authors
// SPDX-License-Identifier: Apache-2.0

#include "fermix/run.hpp"

#include <boost/version.hpp>
#include <fftw3.h>
#include <openssl/crypto.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <ctime>
#include <deque>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

#include "fermix/basis.hpp"
#include "fermix/ci_solver.hpp"
#include "fermix/errors.hpp"
#include "fermix/hf_solver.hpp"
#include "fermix/observables.hpp"
#include "fermix/singleshot.hpp"
#include "fermix/state_io.hpp"

namespace fermix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

// All file output goes through one background thread, in submission order.
class OutputWriter {
 public:
  explicit OutputWriter(fs::path dir) : dir_(std::move(dir)), worker_([this] { loop(); }) {}
  ~OutputWriter() {
    try {
      finish();
    } catch (...) {
    }
  }
  OutputWriter(const OutputWriter&) = delete;
  OutputWriter& operator=(const OutputWriter&) = delete;

  void submit(const std::string& name, const std::string& kind,
              std::function<void(const fs::path&)> job) {
    {
      std::lock_guard lock(mu_);
      index_.push_back({{"path", name}, {"kind", kind}});
      queue_.push_back({dir_ / name, std::move(job)});
    }
    cv_.notify_one();
  }

  void finish() {
    {
      std::lock_guard lock(mu_);
      done_ = true;
    }
    cv_.notify_one();
    if (worker_.joinable()) worker_.join();
    if (error_) {
      auto e = error_;
      error_ = nullptr;
      std::rethrow_exception(e);
    }
  }

  json index() const {
    std::lock_guard lock(mu_);
    return index_;
  }

 private:
  struct Task {
    fs::path path;
    std::function<void(const fs::path&)> job;
  };

  void loop() {
    for (;;) {
      Task t;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [this] { return done_ || !queue_.empty(); });
        if (queue_.empty()) return;
        t = std::move(queue_.front());
        queue_.pop_front();
      }
      try {
        t.job(t.path);
      } catch (...) {
        std::lock_guard lock(mu_);
        if (!error_) error_ = std::current_exception();
      }
    }
  }

  fs::path dir_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Task> queue_;
  json index_ = json::array();
  bool done_ = false;
  std::exception_ptr error_;
  std::thread worker_;
};

std::string fixed3(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  return std::string(buf, r.ptr);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::MatrixXd stack_rows(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t k = 0; k < rows.size(); ++k) m.row(k) = rows[k].transpose();
  return m;
}

// Index of the recorded time nearest to each requested one.
std::map<std::size_t, std::vector<double>> match_times(const std::vector<double>& recorded,
                                                       const std::vector<double>& wanted) {
  std::map<std::size_t, std::vector<double>> out;
  for (double t : wanted) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < recorded.size(); ++k)
      if (std::abs(recorded[k] - t) < std::abs(recorded[best] - t)) best = k;
    out[best].push_back(t);
  }
  return out;
}

struct Context {
  const RunConfig& cfg;
  OutputWriter& out;
  GridSpec grid;
  json results = json::object();
  std::string stage;
};

void write_matrix(Context& ctx, const std::string& name, const std::string& kind,
                  Eigen::MatrixXd data, std::vector<Axis> axes) {
  ctx.out.submit(name, kind, [data = std::move(data), axes = std::move(axes)](const fs::path& p) {
    write_raw(p, data, axes);
  });
}

void write_table(Context& ctx, const std::string& name, std::vector<std::string> header,
                 std::vector<std::vector<double>> rows) {
  ctx.out.submit(name, "csv", [h = std::move(header), r = std::move(rows)](const fs::path& p) {
    write_csv(p, h, r);
  });
}

Axis x_axis(const GridSpec& g) { return {"x", to_std(g.points)}; }

json filament_counts(const Context& ctx, const Eigen::VectorXd& ra, const Eigen::VectorXd& rb) {
  const auto& x = ctx.grid.points;
  const double p = ctx.cfg.filament_prominence;
  return {{"A_left", count_filaments(ra, x, ctx.cfg.x_min, 0.0, p)},
          {"A_right", count_filaments(ra, x, 0.0, ctx.cfg.x_max, p)},
          {"B_left", ctx.cfg.n_b > 0 ? count_filaments(rb, x, ctx.cfg.x_min, 0.0, p) : 0},
          {"B_right", ctx.cfg.n_b > 0 ? count_filaments(rb, x, 0.0, ctx.cfg.x_max, p) : 0},
          {"prominence", p}};
}

double lambda_or_nan(const Eigen::VectorXd& ra, const Eigen::VectorXd& rb) {
  if (ra.sum() <= 0.0 || rb.sum() <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return overlap_lambda(ra, rb);
}

// Shared bookkeeping for the CI and HF time series.
struct SeriesLog {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<double> times, x2, lambda;
  std::vector<Eigen::VectorXd> rho_a, rho_b;
  json snapshots = json::array();
};

json series_summary(const Context& ctx, const SeriesLog& log) {
  json r;
  double sum = 0.0, mx = -1.0;
  int cnt = 0;
  for (std::size_t k = 0; k < log.times.size(); ++k) {
    if (log.times[k] < 10.0 || std::isnan(log.lambda[k])) continue;
    sum += log.lambda[k];
    mx = std::max(mx, log.lambda[k]);
    ++cnt;
  }
  r["lambda_mean_t_ge_10"] = cnt ? json(sum / cnt) : json(nullptr);
  r["lambda_max_t_ge_10"] = cnt ? json(mx) : json(nullptr);
  const double expected = 2.0 * ctx.cfg.trap.omega;
  const double span = log.times.empty() ? 0.0 : log.times.back() - log.times.front();
  if (span * expected / (2.0 * std::numbers::pi) >= 3.0) {
    r["breathing_frequency"] = breathing_frequency(log.times, log.x2, expected);
  } else {
    r["breathing_frequency"] = nullptr;
    r["breathing_note"] = "record shorter than three periods of 2 omega";
  }
  r["snapshots"] = log.snapshots;
  return r;
}

void emit_series(Context& ctx, const std::string& tag, SeriesLog& log) {
  write_table(ctx, "series_" + tag + ".csv", log.header, std::move(log.rows));
  const Axis t_axis{"t", log.times};
  write_matrix(ctx, "carpet_" + tag + "_A.f64", "density-carpet", stack_rows(log.rho_a),
               {t_axis, x_axis(ctx.grid)});
  write_matrix(ctx, "carpet_" + tag + "_B.f64", "density-carpet", stack_rows(log.rho_b),
               {t_axis, x_axis(ctx.grid)});
}

std::vector<std::string> base_header(const std::string& pops_prefix, int na, int nb) {
  std::vector<std::string> h{"time", "energy", "norm", "lambda", "x2_A", "x2_B", "x2_total"};
  for (int i = 0; i < na; ++i) h.push_back(pops_prefix + "A_" + std::to_string(i));
  for (int i = 0; i < nb; ++i) h.push_back(pops_prefix + "B_" + std::to_string(i));
  return h;
}

struct CIRun {
  OrbitalBasis basis;
  CIState ground;
  GroundStateReport report;
};

CIRun ci_ground_stage(Context& ctx, int M) {
  CIRun r;
  r.basis = solve_one_body(ctx.grid, ctx.cfg.trap, M);
  r.ground = ground_state_ci(r.basis, ctx.cfg.g_initial, ctx.cfg.n_a, ctx.cfg.n_b, ctx.cfg.lanczos,
                             &r.report);
  return r;
}

HFState hf_ground_stage(Context& ctx, HFReport* rep) {
  HFOptions o;
  o.tau = ctx.cfg.hf.tau;
  o.max_iterations = ctx.cfg.hf.max_iterations;
  return hf_ground(ctx.grid, ctx.cfg.trap, ctx.cfg.g_initial, ctx.cfg.n_a, ctx.cfg.n_b,
                   ctx.cfg.hf.seed_asymmetry, o, rep);
}

void write_ground_density(Context& ctx, const std::string& tag, const Eigen::VectorXd& ra,
                          const Eigen::VectorXd& rb) {
  Eigen::MatrixXd d(2, ra.size());
  d.row(0) = ra.transpose();
  d.row(1) = rb.transpose();
  write_matrix(ctx, "ground_" + tag + "_density.f64", "density", d,
               {{"species", {0.0, 1.0}}, x_axis(ctx.grid)});
}

void run_ground(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.solver != SolverKind::HF) {
    ctx.stage = "ci-ground";
    CIRun r = ci_ground_stage(ctx, cfg.basis_M);
    const Eigen::VectorXd ra = density(r.ground, Species::A, r.basis);
    const Eigen::VectorXd rb = density(r.ground, Species::B, r.basis);
    ctx.results["ci_ground"] = {{"energy", r.report.energy},
                                {"residual", r.report.residual},
                                {"matvecs", r.report.matvecs},
                                {"lambda", lambda_or_nan(ra, rb)},
                                {"schmidt", schmidt_decompose(r.ground).lambdas}};
    write_ground_density(ctx, "ci", ra, rb);
    const CIState st = r.ground;
    const double g = cfg.g_initial;
    ctx.out.submit("ground_ci.fxci", "ci-checkpoint", [st, g](const fs::path& p) { save_ci_state(p, st, g); });
  }
  if (cfg.solver != SolverKind::CI) {
    ctx.stage = "hf-ground";
    HFReport rep;
    const HFState hf = hf_ground_stage(ctx, &rep);
    const Eigen::VectorXd ra = density(hf, Species::A), rb = density(hf, Species::B);
    ctx.results["hf_ground"] = {{"energy", rep.energy},
                                {"iterations", rep.iterations},
                                {"lambda", lambda_or_nan(ra, rb)}};
    write_ground_density(ctx, "hf", ra, rb);
    const double g = cfg.g_initial;
    ctx.out.submit("ground_hf.fxhf", "hf-checkpoint", [hf, g](const fs::path& p) { save_hf_state(p, hf, g); });
  }
}

void snapshot_ci(Context& ctx, SeriesLog& log, const CIState& s, const OrbitalBasis& basis,
                 const Eigen::VectorXd& ra, const Eigen::VectorXd& rb, const std::vector<double>& wanted) {
  const std::string tt = "t" + fixed3(s.time);
  const std::vector<Axis> axes{x_axis(ctx.grid), x_axis(ctx.grid)};
  json snap{{"time", s.time}, {"requested", wanted}, {"filaments", filament_counts(ctx, ra, rb)}};
  for (Species sp : {Species::A, Species::B}) {
    if (s.n(sp) == 0) continue;
    const std::string sn(to_string(sp));
    write_matrix(ctx, "g1_ci_" + sn + "_" + tt + ".f64", "g1-abs", g1_map(one_body_rdm(s, sp, basis)).values, axes);
    const CorrelationMap m = g2_map(s, sp, sp, basis);
    if (m.defined) write_matrix(ctx, "g2_ci_" + sn + sn + "_" + tt + ".f64", "g2-intra", m.values, axes);
  }
  if (s.n_a() > 0 && s.n_b() > 0)
    write_matrix(ctx, "g2_ci_AB_" + tt + ".f64", "g2-inter", g2_map(s, Species::A, Species::B, basis).values, axes);
  log.snapshots.push_back(snap);
}

void snapshot_hf(Context& ctx, SeriesLog& log, const HFState& s, const Eigen::VectorXd& ra,
                 const Eigen::VectorXd& rb, const std::vector<double>& wanted) {
  const std::string tt = "t" + fixed3(s.time);
  const std::vector<Axis> axes{x_axis(ctx.grid), x_axis(ctx.grid)};
  json snap{{"time", s.time}, {"requested", wanted}, {"filaments", filament_counts(ctx, ra, rb)}};
  for (Species sp : {Species::A, Species::B}) {
    const OneBodyRDM rdm = one_body_rdm(s, sp, ctx.grid.weight);
    if (rdm.n_particles == 0) continue;
    write_matrix(ctx, "g1_hf_" + std::string(to_string(sp)) + "_" + tt + ".f64", "g1-abs",
                 g1_map(rdm).values, axes);
  }
  log.snapshots.push_back(snap);
}

void run_quench(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  const std::vector<double> times = record_times(0.0, cfg.propagation);
  const auto snaps = match_times(times, cfg.snapshot_times);
  json& res = ctx.results;

  if (cfg.solver != SolverKind::HF) {
    ctx.stage = "ci-ground";
    CIRun r = ci_ground_stage(ctx, cfg.basis_M);
    const OrbitalBasis& basis = r.basis;
    res["ci_ground"] = {{"energy", r.report.energy}, {"residual", r.report.residual}};
    ctx.stage = "ci-propagation";
    SeriesLog log;
    log.header = base_header("n", cfg.basis_M, cfg.basis_M);
    const double e0 = ci_energy(r.ground, basis, cfg.g_final);
    double max_norm_drift = 0.0, max_energy_drift = 0.0;
    std::size_t k = 0;
    CIState last;
    propagate_ci(r.ground, basis, cfg.g_final, cfg.propagation, [&](const CIState& s) {
      const OneBodyRDM da = one_body_rdm(s, Species::A, basis);
      const OneBodyRDM db = one_body_rdm(s, Species::B, basis);
      const Eigen::VectorXd ra = da.density(), rb = db.density();
      const double e = ci_energy(s, basis, cfg.g_final);
      max_norm_drift = std::max(max_norm_drift, std::abs(s.norm() - 1.0));
      max_energy_drift = std::max(max_energy_drift, std::abs(e - e0) / std::max(1e-300, std::abs(e0)));
      std::vector<double> row{s.time, e, s.norm(), lambda_or_nan(ra, rb),
                              cfg.n_a ? second_moment(ra, ctx.grid.points) : 0.0,
                              cfg.n_b ? second_moment(rb, ctx.grid.points) : 0.0,
                              second_moment(ra + rb, ctx.grid.points)};
      const Eigen::VectorXd pa = da.natural_populations(), pb = db.natural_populations();
      row.insert(row.end(), pa.data(), pa.data() + pa.size());
      row.insert(row.end(), pb.data(), pb.data() + pb.size());
      log.rows.push_back(std::move(row));
      log.times.push_back(s.time);
      log.x2.push_back(log.rows.back()[6]);
      log.lambda.push_back(log.rows.back()[3]);
      log.rho_a.push_back(ra);
      log.rho_b.push_back(rb);
      if (auto it = snaps.find(k); it != snaps.end()) snapshot_ci(ctx, log, s, basis, ra, rb, it->second);
      ++k;
      last = s;
    });
    ctx.stage = "ci-analysis";
    json sum = series_summary(ctx, log);
    sum["max_norm_drift"] = max_norm_drift;
    sum["max_relative_energy_drift"] = max_energy_drift;
    sum["energy"] = e0;
    res["ci_quench"] = sum;
    emit_series(ctx, "ci", log);
    const double g = cfg.g_final;
    ctx.out.submit("final_ci.fxci", "ci-checkpoint", [last, g](const fs::path& p) { save_ci_state(p, last, g); });
  }

  if (cfg.solver != SolverKind::CI) {
    ctx.stage = "hf-ground";
    HFReport rep;
    const HFState hf0 = hf_ground_stage(ctx, &rep);
    res["hf_ground"] = {{"energy", rep.energy}, {"iterations", rep.iterations}};
    ctx.stage = "hf-propagation";
    SeriesLog log;
    log.header = base_header("n", cfg.n_a, cfg.n_b);
    const double e0 = hf_energy(hf0, ctx.grid, cfg.trap, cfg.g_final);
    double max_energy_drift = 0.0, max_ortho = 0.0;
    std::size_t k = 0;
    HFState last;
    hf_propagate(hf0, ctx.grid, cfg.trap, cfg.g_final, cfg.propagation, [&](const HFState& s) {
      const Eigen::VectorXd ra = density(s, Species::A), rb = density(s, Species::B);
      const double e = hf_energy(s, ctx.grid, cfg.trap, cfg.g_final);
      const double ortho = hf_orthonormality_error(s, ctx.grid.weight);
      max_ortho = std::max(max_ortho, ortho);
      max_energy_drift = std::max(max_energy_drift, std::abs(e - e0) / std::max(1e-300, std::abs(e0)));
      std::vector<double> row{s.time, e, 1.0 - ortho, lambda_or_nan(ra, rb),
                              cfg.n_a ? second_moment(ra, ctx.grid.points) : 0.0,
                              cfg.n_b ? second_moment(rb, ctx.grid.points) : 0.0,
                              second_moment(ra + rb, ctx.grid.points)};
      for (Species sp : {Species::A, Species::B}) {
        const Eigen::VectorXd p = one_body_rdm(s, sp, ctx.grid.weight).natural_populations();
        row.insert(row.end(), p.data(), p.data() + p.size());
      }
      log.rows.push_back(std::move(row));
      log.times.push_back(s.time);
      log.x2.push_back(log.rows.back()[6]);
      log.lambda.push_back(log.rows.back()[3]);
      log.rho_a.push_back(ra);
      log.rho_b.push_back(rb);
      if (auto it = snaps.find(k); it != snaps.end()) snapshot_hf(ctx, log, s, ra, rb, it->second);
      ++k;
      last = s;
    });
    ctx.stage = "hf-analysis";
    json sum = series_summary(ctx, log);
    sum["max_relative_energy_drift"] = max_energy_drift;
    sum["max_orthonormality_error"] = max_ortho;
    sum["energy"] = e0;
    res["hf_quench"] = sum;
    emit_series(ctx, "hf", log);
    const double g = cfg.g_final;
    ctx.out.submit("final_hf.fxhf", "hf-checkpoint", [last, g](const fs::path& p) { save_hf_state(p, last, g); });
  }
}

void run_shots(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  if (cfg.solver == SolverKind::HF) throw ConfigError("shots need the CI solver");
  if (!cfg.shots.enabled) throw ConfigError("shots.enabled is false");
  ctx.stage = "ci-ground";
  CIRun r = ci_ground_stage(ctx, cfg.basis_M);
  const OrbitalBasis& basis = r.basis;

  ctx.stage = "ci-propagation";
  PropagationConfig pc = cfg.propagation;
  pc.t_final = *std::max_element(cfg.shots.times.begin(), cfg.shots.times.end());
  const std::vector<double> times = record_times(0.0, pc);
  const auto wanted = match_times(times, cfg.shots.times);
  std::vector<CIState> states;
  std::size_t k = 0;
  propagate_ci(r.ground, basis, cfg.g_final, pc, [&](const CIState& s) {
    if (wanted.count(k)) states.push_back(s);
    ++k;
  });

  ctx.stage = "shots";
  ShotConfig sc;
  sc.psf_width = cfg.shots.psf_width;
  sc.species_order = cfg.shots.species_order;
  sc.rng_seed = cfg.rng_seed;
  sc.n_shots = cfg.shots.n_shots;
  const Eigen::VectorXd image = sc.resolved_image_grid(ctx.grid);
  json out = json::array();
  for (const CIState& s : states) {
    std::vector<ShotImage> shots;
    const ShotAverage avg = average_shots(s, sc, basis, ctx.grid, &shots);
    const std::string tt = "t" + fixed3(s.time);

    std::vector<std::vector<double>> pos;
    for (std::size_t i = 0; i < shots.size(); ++i) {
      for (std::size_t j = 0; j < shots[i].positions_a.size(); ++j)
        pos.push_back({double(i), 0.0, double(j), shots[i].positions_a[j]});
      for (std::size_t j = 0; j < shots[i].positions_b.size(); ++j)
        pos.push_back({double(i), 1.0, double(j), shots[i].positions_b[j]});
    }
    write_table(ctx, "shots_" + tt + "_positions.csv", {"shot", "species", "draw", "x"}, std::move(pos));

    json entry{{"time", s.time}, {"n_shots", sc.n_shots}, {"species_order", to_string(sc.species_order)}};
    for (Species sp : {Species::A, Species::B}) {
      const std::string sn(to_string(sp));
      const bool is_a = sp == Species::A;
      std::vector<Eigen::VectorXd> running;
      std::vector<double> ns;
      Eigen::VectorXd acc = Eigen::VectorXd::Zero(image.size());
      std::size_t next = 0;
      std::vector<int> marks = cfg.shots.running_average_at;
      std::sort(marks.begin(), marks.end());
      for (std::size_t i = 0; i < shots.size(); ++i) {
        acc += is_a ? shots[i].intensity_a : shots[i].intensity_b;
        while (next < marks.size() && static_cast<std::size_t>(marks[next]) == i + 1) {
          running.push_back(acc / double(i + 1));
          ns.push_back(double(i + 1));
          ++next;
        }
      }
      if (cfg.shots.keep_images) {
        std::vector<Eigen::VectorXd> imgs;
        for (const ShotImage& im : shots) imgs.push_back(is_a ? im.intensity_a : im.intensity_b);
        std::vector<double> idx(shots.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = double(i);
        write_matrix(ctx, "shots_" + tt + "_" + sn + ".f64", "shot-images", stack_rows(imgs),
                     {{"shot", idx}, {"x", to_std(image)}});
      }
      if (!running.empty())
        write_matrix(ctx, "shots_" + tt + "_" + sn + "_running.f64", "shot-running-average",
                     stack_rows(running), {{"n_shots", ns}, {"x", to_std(image)}});
      const Eigen::VectorXd& target = is_a ? avg.target_a : avg.target_b;
      const Eigen::VectorXd& mean = is_a ? avg.mean_a : avg.mean_b;
      Eigen::MatrixXd tm(2, image.size());
      tm.row(0) = mean.transpose();
      tm.row(1) = target.transpose();
      write_matrix(ctx, "shots_" + tt + "_" + sn + "_mean_target.f64", "shot-average",
                   tm, {{"row", {0.0, 1.0}}, {"x", to_std(image)}});
      entry["l1_mean_vs_target_" + sn] = trapezoid((mean - target).cwiseAbs(), image);
    }
    out.push_back(entry);
  }
  ctx.results["shots"] = out;
}

void run_converge(Context& ctx) {
  const RunConfig& cfg = ctx.cfg;
  std::vector<int> Ms = cfg.converge_M;
  std::sort(Ms.begin(), Ms.end());
  Ms.erase(std::unique(Ms.begin(), Ms.end()), Ms.end());
  if (Ms.size() < 2) throw ConfigError("converge.M needs at least two distinct sizes");
  std::vector<std::vector<Eigen::VectorXd>> ra(Ms.size()), rb(Ms.size());
  std::vector<double> times;
  for (std::size_t m = 0; m < Ms.size(); ++m) {
    ctx.stage = "converge-M" + std::to_string(Ms[m]);
    CIRun r = ci_ground_stage(ctx, Ms[m]);
    times.clear();
    propagate_ci(r.ground, r.basis, cfg.g_final, cfg.propagation, [&](const CIState& s) {
      times.push_back(s.time);
      ra[m].push_back(density(s, Species::A, r.basis));
      rb[m].push_back(density(s, Species::B, r.basis));
    });
  }
  ctx.stage = "converge-analysis";
  std::vector<std::string> header{"time"};
  std::vector<std::vector<double>> cols;
  json summary = json::array();
  const std::size_t ref = Ms.size() - 1;
  for (std::size_t m = 0; m < ref; ++m) {
    for (Species sp : {Species::A, Species::B}) {
      const int n = sp == Species::A ? cfg.n_a : cfg.n_b;
      if (n == 0) continue;
      const auto& a = sp == Species::A ? ra : rb;
      const std::vector<double> d = density_deviation(a[m], a[ref], ctx.grid.weight, n);
      header.push_back("drho_" + std::string(to_string(sp)) + "_M" + std::to_string(Ms[m]));
      cols.push_back(d);
      summary.push_back({{"M", Ms[m]}, {"reference_M", Ms[ref]}, {"species", to_string(sp)},
                         {"max_deviation", *std::max_element(d.begin(), d.end())}});
    }
  }
  std::vector<std::vector<double>> rows(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    rows[k].push_back(times[k]);
    for (const auto& c : cols) rows[k].push_back(c[k]);
  }
  write_table(ctx, "converge.csv", header, std::move(rows));
  ctx.results["converge"] = summary;
}

}  // namespace

std::string_view to_string(RunMode m) {
  switch (m) {
    case RunMode::Ground: return "ground";
    case RunMode::Quench: return "quench";
    case RunMode::Shots: return "shots";
    case RunMode::Converge: return "converge";
  }
  return "?";
}

json version_info() {
  return {{"fermix", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"boost", BOOST_LIB_VERSION},
          {"openssl", std::string(OpenSSL_version(OPENSSL_VERSION))}};
}

json run_scenario(const RunConfig& cfg, RunMode mode, const std::string& command_line) {
  cfg.validate();
  const fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

  json manifest{{"program", "fermix"},
                {"mode", to_string(mode)},
                {"command", command_line},
                {"versions", version_info()},
                {"config", to_json(cfg)},
                {"config_hash", config_hash(cfg)},
                {"relabeled_species", cfg.relabeled},
                {"created", utc_now()}};

  OutputWriter out(dir);
  Context ctx{cfg, out, {}, json::object(), "setup"};
  auto finalize = [&](bool complete, const std::string& error) {
    manifest["complete"] = complete;
    manifest["results"] = ctx.results;
    manifest["files"] = out.index();
    if (!complete) {
      manifest["failed_stage"] = ctx.stage;
      manifest["error"] = error;
    }
    std::ofstream mf(dir / "manifest.json");
    mf << manifest.dump(2) << '\n';
  };

  try {
    ctx.grid = build_grid(cfg.grid_points, cfg.x_min, cfg.x_max);
    switch (mode) {
      case RunMode::Ground: run_ground(ctx); break;
      case RunMode::Quench: run_quench(ctx); break;
      case RunMode::Shots: run_shots(ctx); break;
      case RunMode::Converge: run_converge(ctx); break;
    }
    ctx.stage = "write";
    out.finish();
  } catch (const std::exception& e) {
    try {
      out.finish();
    } catch (...) {
    }
    finalize(false, e.what());
    const std::string msg = ctx.stage + ": " + e.what();
    try {
      throw;
    } catch (const ResonanceError&) {
      throw ResonanceError(msg);
    } catch (const ConfigError&) {
      throw ConfigError(msg);
    } catch (const InvalidPositionError& x) {
      throw InvalidPositionError(msg, x.residual());
    } catch (const SamplingError& x) {
      throw SamplingError(msg, x.residual());
    } catch (const NumericalError& x) {
      throw NumericalError(msg, x.residual());
    } catch (const AnalysisError&) {
      throw AnalysisError(msg);
    }
  }
  finalize(true, "");
  return manifest;
}

}  // namespace fermix
