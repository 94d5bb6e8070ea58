#include "lrmc/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <optional>
#include <random>

#include "lrmc/data.hpp"
#include "lrmc/metrics.hpp"
#include "lrmc/vb_exact.hpp"
#include "lrmc/vb_gamp.hpp"

namespace lrmc::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Flags shared by every command that runs a solver.
struct SolverOptions {
  std::string solver = "gamp";
  std::string w = "identity";
  double w_scale = ScaledIdentity{}.scale;
  double theta = GraphLaplacian{}.theta;
  double eps_hat = GraphLaplacian{}.eps_hat;
  HyperParams hyper;
  SolverConfig config;
  bool omit_timing = false;

  WMatrixSpec w_spec() const {
    if (w == "identity") return ScaledIdentity{w_scale};
    if (w == "difference") return SecondOrderDifference{};
    return GraphLaplacian{theta, eps_hat};
  }

  HyperParams hyper_params() const {
    HyperParams h = hyper;
    h.w_spec = w_spec();
    h.validate();
    return h;
  }
};

void add_solver_options(CLI::App* app, SolverOptions& o, bool allow_both) {
  std::vector<std::string> solvers{"exact", "gamp"};
  if (allow_both) solvers.push_back("both");
  app->add_option("--solver", o.solver, "Inference backend")
      ->check(CLI::IsMember(solvers))
      ->capture_default_str();
  app->add_option("--w", o.w, "Wishart scale matrix")
      ->check(CLI::IsMember({"identity", "difference", "laplacian"}))
      ->capture_default_str();
  app->add_option("--w-scale", o.w_scale, "s in W = s I")->capture_default_str();
  app->add_option("--theta", o.theta, "Laplacian kernel width")
      ->capture_default_str();
  app->add_option("--eps-hat", o.eps_hat, "Laplacian diagonal shift")
      ->capture_default_str();
  app->add_option("--a", o.hyper.a, "Gamma shape of the noise prior")
      ->capture_default_str();
  app->add_option("--b", o.hyper.b, "Gamma rate of the noise prior")
      ->capture_default_str();
  app->add_option("--nu", o.hyper.nu, "Wishart degrees of freedom")
      ->capture_default_str();
  app->add_option("--max-iters", o.config.max_outer_iters, "Outer iterations")
      ->capture_default_str();
  app->add_option("--tol", o.config.rel_tol,
                  "Relative change of <X> that stops the outer loop")
      ->capture_default_str();
  app->add_option("--inner-iters", o.config.inner_gamp_iters,
                  "GAMP sweeps per outer iteration")
      ->capture_default_str();
  app->add_option("--damping", o.config.damping, "GAMP damping in (0, 1]")
      ->capture_default_str();
  app->add_option("--gamma-cap", o.config.gamma_cap, "Upper bound on <gamma>")
      ->capture_default_str();
  app->add_option("--jitter", o.config.cov_jitter,
                  "Diagonal jitter on column precisions")
      ->capture_default_str();
  app->add_flag("--cold-start{false}", o.config.warm_start,
                "Restart GAMP from scratch every outer iteration");
  app->add_option("--threads", o.config.threads, "Column worker threads")
      ->capture_default_str();
  app->add_flag("--omit-timing", o.omit_timing,
                "Leave wall-clock fields out of reports");
}

struct Run {
  SolveResult result;
  double seconds = 0.0;
};

Run run_solver(const std::string& solver, const ObservedMatrix& y,
               const HyperParams& hyper, const SolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Run run;
  run.result = solver == "exact" ? solve_exact(y, hyper, config)
                                 : solve_gamp(y, hyper, config);
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return run;
}

Json settings_json(const SolverOptions& o, const std::string& solver) {
  Json w{{"kind", o.w}};
  if (o.w == "identity") w["scale"] = o.w_scale;
  if (o.w == "laplacian") {
    w["theta"] = o.theta;
    w["eps_hat"] = o.eps_hat;
  }
  return Json{{"solver", solver},
              {"w", w},
              {"a", o.hyper.a},
              {"b", o.hyper.b},
              {"nu", o.hyper.nu},
              {"max_outer_iters", o.config.max_outer_iters},
              {"rel_tol", o.config.rel_tol},
              {"inner_gamp_iters", o.config.inner_gamp_iters},
              {"damping", o.config.damping},
              {"gamma_cap", o.config.gamma_cap},
              {"cov_jitter", o.config.cov_jitter},
              {"warm_start", o.config.warm_start},
              {"threads", o.config.threads}};
}

Json solve_json(const Run& run, bool omit_timing) {
  const SolveResult& r = run.result;
  Json j{{"iterations", r.iterations},
         {"converged", r.converged},
         {"transposed", r.transposed},
         {"gamma_mean", r.state.gamma_mean},
         {"effective_rank", effective_rank(r.state)}};
  if (!omit_timing) {
    j["wall_seconds"] = run.seconds;
    j["iteration_seconds"] = r.iteration_seconds;
  }
  return j;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

bool is_image_path(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm";
}

Matrix load_dense(const fs::path& path) {
  if (is_image_path(path)) return load_gray_image(path);
  const ObservedMatrix t = load_masked_csv(path);
  if (t.observed_count() != t.rows() * t.cols()) {
    throw ValidationError(path.string() + ": truth file must list every entry");
  }
  return t.values();
}

// Deterministic per-(cell, trial) seed.
std::uint64_t derive_seed(std::uint64_t base, std::size_t rank_index,
                          std::size_t rho_index, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(base),
                    static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(rank_index),
                    static_cast<std::uint32_t>(rho_index),
                    static_cast<std::uint32_t>(trial)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// --- complete ---------------------------------------------------------------

struct CompleteOptions {
  SolverOptions solver;
  std::string input;
  std::string out;
  std::string report;
  std::string truth;
  double keep_fraction = 1.0;
  std::uint64_t seed = 0;
};

int cmd_complete(const CompleteOptions& o, std::ostream& out) {
  const HyperParams hyper = o.solver.hyper_params();
  SolverConfig config = o.solver.config;
  config.seed = o.seed;
  config.validate();

  const fs::path input(o.input);
  const bool image = is_image_path(input);
  ObservedMatrix y;
  std::optional<Matrix> truth;
  if (image) {
    const Matrix pixels = load_gray_image(input);
    y = mask_pixels(pixels, o.keep_fraction, o.seed);
    truth = pixels;
  } else {
    if (o.keep_fraction != 1.0) {
      throw ValidationError("--keep-fraction applies to image input only");
    }
    y = load_masked_csv(input);
  }
  if (!o.truth.empty()) truth = load_dense(o.truth);
  if (truth && (truth->rows() != y.rows() || truth->cols() != y.cols())) {
    throw ValidationError("truth shape does not match the input");
  }

  // Pixels are solved on [0, 1]; the default start assumes unit-scale data.
  const double intensity = image ? 255.0 : 1.0;
  const ObservedMatrix scaled =
      image ? ObservedMatrix(y.values() / intensity, y.mask()) : y;
  const Run run = run_solver(o.solver.solver, scaled, hyper, config);
  const Matrix x_hat = intensity * run.result.state.x_mean;

  if (!o.out.empty()) {
    if (image) {
      save_gray_image(o.out, x_hat);
    } else {
      save_dense_csv(o.out, x_hat);
    }
  }

  Json report{{"schema_version", kReportSchemaVersion},
              {"command", "complete"},
              {"input", o.input},
              {"rows", y.rows()},
              {"cols", y.cols()},
              {"observed_count", y.observed_count()},
              {"seed", o.seed},
              {"settings", settings_json(o.solver, o.solver.solver)},
              {"result", solve_json(run, o.solver.omit_timing)}};
  if (image) {
    report["keep_fraction"] = o.keep_fraction;
    report["intensity_scale"] = intensity;
  }
  if (truth) {
    Json m{{"relative_error", relative_error(*truth, x_hat)}};
    if (image) {
      const Matrix clipped = x_hat.cwiseMax(0.0).cwiseMin(255.0);
      m["psnr"] = psnr(*truth, clipped);
      m["ssim"] = ssim(*truth, clipped);
    }
    report["metrics"] = m;
  }

  if (!o.report.empty()) {
    write_json(o.report, report);
  } else {
    out << report.dump(2) << '\n';
  }
  return kExitOk;
}

// --- synth-bench ------------------------------------------------------------

struct BenchOptions {
  SolverOptions solver;
  Index m = 200;
  Index n = 200;
  std::vector<Index> ranks{2, 5, 10};
  std::vector<double> rhos{0.2, 0.5};
  int trials = 10;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_synth_bench(const BenchOptions& o, std::ostream& out) {
  const HyperParams hyper = o.solver.hyper_params();
  o.solver.config.validate();
  if (o.trials < 1) throw ValidationError("--trials must be >= 1");
  if (o.ranks.empty() || o.rhos.empty()) {
    throw ValidationError("--ranks and --rhos must be non-empty");
  }
  std::vector<std::string> solvers;
  if (o.solver.solver == "both") {
    solvers = {"exact", "gamp"};
  } else {
    solvers = {o.solver.solver};
  }

  std::ofstream file;
  std::ostream* sink = &out;
  if (!o.out.empty()) {
    file.open(o.out, std::ios::binary);
    if (!file) throw IoError("cannot open " + o.out + " for writing");
    sink = &file;
  }
  std::ostream& csv = *sink;
  csv << "solver,m,n,rank,rho,noise,trials,successes,success_rate,"
         "mean_relative_error,mean_iterations,mean_seconds\n";

  for (std::size_t ri = 0; ri < o.ranks.size(); ++ri) {
    for (std::size_t pi = 0; pi < o.rhos.size(); ++pi) {
      const Index k = o.ranks[ri];
      const double rho = o.rhos[pi];
      struct Tally {
        int successes = 0;
        double err = 0.0;
        double iters = 0.0;
        double seconds = 0.0;
      };
      std::vector<Tally> tally(solvers.size());
      for (int t = 0; t < o.trials; ++t) {
        const SyntheticInstance inst = generate_synthetic(
            o.m, o.n, k, rho, o.noise, derive_seed(o.seed, ri, pi, t));
        for (std::size_t s = 0; s < solvers.size(); ++s) {
          const Run run =
              run_solver(solvers[s], inst.observed, hyper, o.solver.config);
          const double e = relative_error(inst.x_true, run.result.state.x_mean);
          tally[s].successes += e < kSuccessThreshold;
          tally[s].err += e;
          tally[s].iters += run.result.iterations;
          tally[s].seconds += run.seconds;
        }
      }
      for (std::size_t s = 0; s < solvers.size(); ++s) {
        const double tr = o.trials;
        csv << solvers[s] << ',' << o.m << ',' << o.n << ',' << k << ','
            << format_double(rho) << ',' << format_double(o.noise) << ','
            << o.trials << ',' << tally[s].successes << ','
            << format_double(tally[s].successes / tr) << ','
            << format_double(tally[s].err / tr) << ','
            << format_double(tally[s].iters / tr) << ',';
        if (!o.solver.omit_timing) csv << format_double(tally[s].seconds / tr);
        csv << '\n';
      }
      csv.flush();
    }
  }
  if (!csv) throw IoError("write failed: " + o.out);
  return kExitOk;
}

// --- rate-predict -----------------------------------------------------------

struct RateOptions {
  SolverOptions solver;
  std::string ratings;
  double train_fraction = 0.5;
  double r_min = 1.0;
  double r_max = 5.0;
  int index_base = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string report;
};

int cmd_rate_predict(const RateOptions& o, std::ostream& out) {
  const HyperParams hyper = o.solver.hyper_params();
  SolverConfig config = o.solver.config;
  config.seed = o.seed;
  config.validate();

  const ObservedMatrix all =
      load_ratings(o.ratings, o.r_min, o.r_max, o.index_base);
  auto [train, test] = split_holdout(all, o.train_fraction, o.seed);
  if (test.observed_count() == 0) throw ValidationError("empty holdout");
  if (train.observed_count() == 0) throw ValidationError("empty training set");

  const Run run = run_solver(o.solver.solver, train, hyper, config);
  const Matrix prediction =
      run.result.state.x_mean.cwiseMax(o.r_min).cwiseMin(o.r_max);

  const double train_mean =
      train.values().sum() / static_cast<double>(train.observed_count());
  const Matrix baseline = Matrix::Constant(all.rows(), all.cols(), train_mean);

  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw IoError("cannot open " + o.out + " for writing");
    f << "user,item,rating,prediction\n";
    for (Index i = 0; i < all.rows(); ++i) {
      for (Index j = 0; j < all.cols(); ++j) {
        if (!test.observed(i, j)) continue;
        f << i + o.index_base << ',' << j + o.index_base << ','
          << format_double(test.values()(i, j)) << ','
          << format_double(prediction(i, j)) << '\n';
      }
    }
    if (!f) throw IoError("write failed: " + o.out);
  }

  Json report{
      {"schema_version", kReportSchemaVersion},
      {"command", "rate-predict"},
      {"ratings", o.ratings},
      {"users", all.rows()},
      {"items", all.cols()},
      {"train_fraction", o.train_fraction},
      {"train_count", train.observed_count()},
      {"test_count", test.observed_count()},
      {"r_min", o.r_min},
      {"r_max", o.r_max},
      {"seed", o.seed},
      {"settings", settings_json(o.solver, o.solver.solver)},
      {"result", solve_json(run, o.solver.omit_timing)},
      {"metrics",
       {{"nmae", nmae(test.values(), prediction, test.mask(), o.r_min, o.r_max)},
        {"baseline_nmae",
         nmae(test.values(), baseline, test.mask(), o.r_min, o.r_max)},
        {"train_mean", train_mean}}}};

  if (!o.report.empty()) {
    write_json(o.report, report);
  } else {
    out << report.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bayesian low-rank matrix completion"};
  app.name("lrmc");
  app.require_subcommand(1);

  CompleteOptions complete;
  CLI::App* c = app.add_subcommand("complete", "Complete a masked matrix or image");
  c->add_option("--input", complete.input,
                "Masked CSV (.csv) or binary graymap (.pgm)")
      ->required();
  c->add_option("--out", complete.out, "Completed matrix, same format as input");
  c->add_option("--report", complete.report, "JSON report (stdout if absent)");
  c->add_option("--truth", complete.truth,
                "Ground truth: dense CSV or graymap");
  c->add_option("--keep-fraction", complete.keep_fraction,
                "Fraction of image pixels kept")
      ->capture_default_str();
  c->add_option("--seed", complete.seed, "Pixel mask seed")->capture_default_str();
  add_solver_options(c, complete.solver, false);

  BenchOptions bench;
  CLI::App* b = app.add_subcommand("synth-bench",
                                   "Success rates on synthetic instances");
  b->add_option("--m", bench.m, "Rows")->capture_default_str();
  b->add_option("--n", bench.n, "Columns")->capture_default_str();
  b->add_option("--ranks", bench.ranks, "Comma-separated ranks")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("--rhos", bench.rhos, "Comma-separated sampling ratios")
      ->delimiter(',')
      ->capture_default_str();
  b->add_option("--trials", bench.trials, "Instances per cell")
      ->capture_default_str();
  b->add_option("--noise", bench.noise, "Noise standard deviation")
      ->capture_default_str();
  b->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
  b->add_option("--out", bench.out, "CSV output (stdout if absent)");
  add_solver_options(b, bench.solver, true);

  RateOptions rate;
  CLI::App* r = app.add_subcommand("rate-predict",
                                   "Predict held-out ratings");
  r->add_option("--ratings", rate.ratings, "user,item,rating triples")
      ->required();
  r->add_option("--train-fraction", rate.train_fraction,
                "Fraction of ratings used for training")
      ->capture_default_str();
  r->add_option("--r-min", rate.r_min, "Smallest rating")->capture_default_str();
  r->add_option("--r-max", rate.r_max, "Largest rating")->capture_default_str();
  r->add_option("--index-base", rate.index_base,
                "Index of the first user and item")
      ->capture_default_str();
  r->add_option("--seed", rate.seed, "Split seed")->capture_default_str();
  r->add_option("--out", rate.out, "Held-out predictions CSV");
  r->add_option("--report", rate.report, "JSON report (stdout if absent)");
  add_solver_options(r, rate.solver, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (c->parsed()) return cmd_complete(complete, out);
    if (b->parsed()) return cmd_synth_bench(bench, out);
    return cmd_rate_predict(rate, out);
  } catch (const NumericalError& e) {
    err << "lrmc: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ValidationError& e) {
    err << "lrmc: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const IoError& e) {
    err << "lrmc: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace lrmc::cli
