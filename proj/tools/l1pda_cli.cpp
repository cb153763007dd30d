#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "l1pda/eval.hpp"
#include "l1pda/format.hpp"
#include "l1pda/io.hpp"
#include "l1pda/simulate.hpp"

namespace {

using namespace l1pda;

// Shared across fit/path/cv; --tol sets the absolute tolerance and
// scales the relative one to keep the default 1e-7 / 1e-5 ratio.
struct SolverFlags {
  double rho = 1.0;
  int max_iter = 10000;
  double tol = 1e-7;

  SolveConfig config() const {
    SolveConfig cfg;
    cfg.rho = rho;
    cfg.max_iter = max_iter;
    cfg.abs_tol = tol;
    cfg.rel_tol = 100.0 * tol;
    return cfg;
  }
};

void add_solver_flags(CLI::App* cmd, SolverFlags* flags) {
  cmd->add_option("--rho", flags->rho, "ADMM step size")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", flags->max_iter, "iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", flags->tol, "absolute tolerance (relative = 100x this)")
      ->check(CLI::PositiveNumber);
}

char parse_delimiter(const std::string& s) {
  if (s.size() != 1) {
    throw CLI::ValidationError("--delimiter", "must be a single character");
  }
  return s[0];
}

int usage_error(const std::string& msg) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  return 2;
}

nlohmann::json solver_json(const SolveResult& r) {
  return {{"converged", r.converged},
          {"iterations", r.iterations},
          {"primal_residual", r.primal_residual},
          {"dual_residual", r.dual_residual},
          {"objective", r.objective}};
}

std::string csv_field(const std::string& s, char delimiter) {
  const bool quote = !s.empty() && (s.front() == ' ' || s.back() == ' ' ||
                                    s.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
                                        std::string::npos);
  if (!quote) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

struct FitArgs {
  std::string data, label, method, out;
  std::string delimiter = ",";
  double lambda = 0.0;
  double alpha = 0.0;
  bool has_lambda = false;
  bool has_alpha = false;
  SolverFlags solver;
};

int run_fit(const FitArgs& a) {
  if (a.method == "l1pda") {
    if (!a.has_lambda) return usage_error("method l1pda requires --lambda");
    if (a.has_alpha) return usage_error("--alpha only applies to method rda");
    if (!(a.lambda >= 0.0)) return usage_error("--lambda must be nonnegative");
  } else if (a.method == "rda") {
    if (!a.has_alpha) return usage_error("method rda requires --alpha");
    if (a.has_lambda) return usage_error("--lambda only applies to method l1pda");
    if (!(a.alpha >= 0.0 && a.alpha <= 1.0)) {
      return usage_error("--alpha must lie in [0, 1]");
    }
  } else if (a.has_lambda || a.has_alpha) {
    return usage_error("--lambda/--alpha do not apply to method " + a.method);
  }

  const char delim = parse_delimiter(a.delimiter);
  LabeledDataset data = load_csv(a.data, a.label, delim);
  ClassStats stats = compute_stats(data);

  nlohmann::json config = {{"command", "fit"},
                           {"data", a.data},
                           {"label", a.label},
                           {"method", a.method}};
  PdaModel model;
  SolveResult diag;
  if (a.method == "lda") {
    model = fit_lda(stats);
  } else if (a.method == "qda") {
    model = fit_qda(stats);
  } else if (a.method == "rda") {
    model = fit_rda(stats, a.alpha);
    config["alpha"] = a.alpha;
  } else {
    SolveConfig cfg = a.solver.config();
    model = fit_l1pda(stats, a.lambda, cfg, std::nullopt, &diag);
    config["lambda"] = a.lambda;
    config["rho"] = cfg.rho;
    config["max_iter"] = cfg.max_iter;
    config["abs_tol"] = cfg.abs_tol;
    config["rel_tol"] = cfg.rel_tol;
  }

  nlohmann::json provenance = {{"config", config}, {"dataset_hash", dataset_hash(data)}};
  if (a.method == "l1pda") provenance["solver"] = solver_json(diag);
  save_model(a.out, model, provenance);

  if (a.method == "l1pda" && !diag.converged) {
    std::fprintf(stderr,
                 "warning: solver did not converge within %d iterations "
                 "(primal %.3e, dual %.3e); model written anyway\n",
                 diag.iterations, diag.primal_residual, diag.dual_residual);
    return 5;
  }
  std::printf("wrote %s model to %s\n", a.method.c_str(), a.out.c_str());
  return 0;
}

struct PathArgs {
  std::string data, label, out;
  std::string delimiter = ",";
  int nlambda = 30;
  double eps = 0.01;
  SolverFlags solver;
};

int run_path(const PathArgs& a) {
  const char delim = parse_delimiter(a.delimiter);
  LabeledDataset data = load_csv(a.data, a.label, delim);
  ClassStats stats = compute_stats(data);
  LambdaGrid grid = make_grid(lambda_max(stats), a.nlambda, a.eps);
  SolveConfig cfg = a.solver.config();
  PathFit fit = solve_path(stats, grid, cfg);

  std::filesystem::create_directories(a.out);
  const std::string digest = dataset_hash(data);
  nlohmann::json config = {{"command", "path"}, {"data", a.data},
                           {"label", a.label},  {"nlambda", a.nlambda},
                           {"eps", a.eps},      {"rho", cfg.rho},
                           {"max_iter", cfg.max_iter}, {"abs_tol", cfg.abs_tol},
                           {"rel_tol", cfg.rel_tol}};

  int converged = 0;
  for (std::size_t k = 0; k < fit.results.size(); ++k) {
    const SolveResult& r = fit.results[k];
    if (r.converged) ++converged;
    PdaModel model = model_from_solve(stats, grid.values[k], r);
    nlohmann::json provenance = {{"config", config},
                                 {"dataset_hash", digest},
                                 {"index", k},
                                 {"solver", solver_json(r)}};
    char name[32];
    std::snprintf(name, sizeof(name), "model_%03zu.json", k);
    save_model((std::filesystem::path(a.out) / name).string(), model, provenance);
  }
  write_text_file((std::filesystem::path(a.out) / "path.csv").string(),
                  path_diagnostics_csv(fit));
  std::printf("wrote %zu path points to %s (%d of %zu converged)\n", fit.results.size(),
              a.out.c_str(), converged, fit.results.size());
  return 0;
}

struct CvArgs {
  std::string data, label, out;
  std::string method = "l1pda";
  std::string delimiter = ",";
  int folds = 0;
  std::uint64_t seed = 0;
  int nlambda = 30;
  double eps = 0.01;
  int nalpha = 30;
  SolverFlags solver;
};

int run_cv(const CvArgs& a) {
  const char delim = parse_delimiter(a.delimiter);
  LabeledDataset data = load_csv(a.data, a.label, delim);

  CvReport report;
  if (a.method == "l1pda") {
    ClassStats stats = compute_stats(data);
    LambdaGrid grid = make_grid(lambda_max(stats), a.nlambda, a.eps);
    report = cross_validate(data, grid, a.folds, a.seed, a.solver.config());
  } else if (a.method == "rda") {
    if (a.nalpha < 2) return usage_error("--nalpha must be at least 2");
    std::vector<double> alphas(a.nalpha);
    for (int j = 0; j < a.nalpha; ++j) {
      alphas[j] = static_cast<double>(j) / (a.nalpha - 1);
    }
    report = cross_validate_rda(data, alphas, a.folds, a.seed);
  } else {
    report = cross_validate_fixed(data, a.method, a.folds, a.seed);
  }

  nlohmann::json j = cv_report_json(report, dataset_hash(data));
  write_text_file(a.out, j.dump(2) + "\n");
  std::printf("best %s: %s = %s, mean accuracy %.4f (report in %s)\n",
              report.method.c_str(), report.method == "rda" ? "alpha" : "lambda",
              detail::fmt(report.grid[report.best_index]).c_str(),
              report.mean_accuracy[report.best_index], a.out.c_str());
  return 0;
}

struct PredictArgs {
  std::string model, data, out;
  std::string delimiter = ",";
  bool proba = false;
};

int run_predict(const PredictArgs& a) {
  LoadedModel loaded = load_model(a.model);
  const PdaModel& model = loaded.model;
  const char delim = parse_delimiter(a.delimiter);
  FeatureTable table = load_feature_csv(a.data, delim);
  if (table.X.cols() != model.p()) {
    throw CsvError("model expects " + std::to_string(model.p()) + " features, '" + a.data +
                   "' has " + std::to_string(table.X.cols()));
  }

  std::string out;
  for (const std::string& name : table.names) {
    out += csv_field(name, delim);
    out += delim;
  }
  out += "predicted";
  if (a.proba) {
    out += delim;
    out += "p_class1";
  }
  out += '\n';
  for (int i = 0; i < table.X.rows(); ++i) {
    const Vector x = table.X.row(i).transpose();
    for (int j = 0; j < table.X.cols(); ++j) {
      out += detail::fmt_exact(table.X(i, j));
      out += delim;
    }
    out += csv_field(model.label_names[predict(model, x) - 1], delim);
    if (a.proba) {
      out += delim;
      out += detail::fmt_exact(predict_proba(model, x));
    }
    out += '\n';
  }
  write_text_file(a.out, out);
  std::printf("wrote %d predictions to %s\n", static_cast<int>(table.X.rows()),
              a.out.c_str());
  return 0;
}

struct SimulateArgs {
  std::string out;
  int p = 30;
  int n = 33;
  double c = 0.9;
  int reps = 100;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
  if (a.p < 10) return usage_error("--p must be at least 10 (the mean shift spans 10 coordinates)");
  if (a.n < 1) return usage_error("--n must be positive");
  if (!(a.c > -0.25 && a.c < 1.0)) return usage_error("--c must lie in (-0.25, 1)");
  if (a.reps < 2) return usage_error("--reps must be at least 2");

  SimDesign design;
  design.p = a.p;
  design.n_per_class = a.n;
  design.c = a.c;
  design.seed = a.seed;
  ExperimentReport report = run_experiment(design, a.reps);

  write_text_file(a.out, experiment_report_json(report).dump(2) + "\n");
  std::printf("p=%d n=%d c=%g reps=%d seed=%llu\n", a.p, a.n, a.c, a.reps,
              static_cast<unsigned long long>(a.seed));
  std::printf("%-8s %11s %9s %11s %9s\n", "method", "accuracy", "se", "auc", "se");
  for (const MethodSummary& s : report.methods) {
    std::printf("%-8s %11.4f %9.4f %11.4f %9.4f\n", s.method.c_str(), s.mean_accuracy,
                s.se_accuracy, s.mean_auc, s.se_auc);
  }
  std::printf("report written to %s\n", a.out.c_str());
  return 0;
}

struct KktArgs {
  std::string model, data, label;
  std::string delimiter = ",";
};

int run_kkt_check(const KktArgs& a) {
  LoadedModel loaded = load_model(a.model);
  const PdaModel& model = loaded.model;
  if (model.method == "rda") {
    return usage_error("kkt-check does not apply to rda models (no lambda solves them)");
  }
  const char delim = parse_delimiter(a.delimiter);
  LabeledDataset data = load_csv(a.data, a.label, delim);
  if (data.label_names != model.label_names) {
    throw InvalidDatasetError("label values in '" + a.data +
                              "' do not match the model's label map");
  }
  ClassStats stats = compute_stats(data);
  if (stats.p() != model.p()) {
    throw InvalidDatasetError("model expects " + std::to_string(model.p()) +
                              " features, '" + a.data + "' has " +
                              std::to_string(stats.p()));
  }

  double lambda = 0.0;
  if (model.method == "l1pda") {
    lambda = model.lambda;
  } else if (model.method == "lda") {
    lambda = lambda_max(stats);
  }
  KktReport report = kkt_report(model.P1, model.P2, stats, lambda);
  std::printf("%s\n", kkt_report_json(report).dump(2).c_str());
  return report.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-class Gaussian classifiers with a fused sparsity penalty on the "
               "difference of precision matrices"};
  app.require_subcommand(1);

  FitArgs fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "fit one classifier and save the model");
  fit_cmd->add_option("--data", fit.data, "labeled CSV file")->required();
  fit_cmd->add_option("--label", fit.label, "name of the label column")->required();
  fit_cmd->add_option("--method", fit.method, "lda, qda, rda or l1pda")
      ->required()
      ->check(CLI::IsMember({"lda", "qda", "rda", "l1pda"}));
  CLI::Option* lambda_opt = fit_cmd->add_option("--lambda", fit.lambda, "penalty (l1pda)");
  CLI::Option* alpha_opt = fit_cmd->add_option("--alpha", fit.alpha, "mixing weight (rda)");
  add_solver_flags(fit_cmd, &fit.solver);
  fit_cmd->add_option("--out", fit.out, "output model file")->required();
  fit_cmd->add_option("--delimiter", fit.delimiter, "CSV delimiter");

  PathArgs path;
  CLI::App* path_cmd =
      app.add_subcommand("path", "fit a full penalty path and save per-point models");
  path_cmd->add_option("--data", path.data, "labeled CSV file")->required();
  path_cmd->add_option("--label", path.label, "name of the label column")->required();
  path_cmd->add_option("--nlambda", path.nlambda, "number of grid points")
      ->check(CLI::Range(2, 100000));
  path_cmd->add_option("--eps", path.eps, "smallest lambda as a fraction of lambda_max")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  add_solver_flags(path_cmd, &path.solver);
  path_cmd->add_option("--out", path.out, "output directory")->required();
  path_cmd->add_option("--delimiter", path.delimiter, "CSV delimiter");

  CvArgs cv;
  CLI::App* cv_cmd = app.add_subcommand("cv", "tune by stratified cross-validation");
  cv_cmd->add_option("--data", cv.data, "labeled CSV file")->required();
  cv_cmd->add_option("--label", cv.label, "name of the label column")->required();
  cv_cmd->add_option("--folds", cv.folds, "number of folds")
      ->required()
      ->check(CLI::Range(2, 1000000));
  cv_cmd->add_option("--seed", cv.seed, "fold assignment seed")->required();
  cv_cmd->add_option("--method", cv.method, "lda, qda, rda or l1pda")
      ->check(CLI::IsMember({"lda", "qda", "rda", "l1pda"}));
  cv_cmd->add_option("--nlambda", cv.nlambda, "lambda grid size (l1pda)")
      ->check(CLI::Range(2, 100000));
  cv_cmd->add_option("--eps", cv.eps, "smallest lambda as a fraction of lambda_max")
      ->check(CLI::Range(std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0)));
  cv_cmd->add_option("--nalpha", cv.nalpha, "alpha grid size (rda)");
  add_solver_flags(cv_cmd, &cv.solver);
  cv_cmd->add_option("--out", cv.out, "output report file")->required();
  cv_cmd->add_option("--delimiter", cv.delimiter, "CSV delimiter");

  PredictArgs predict;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "label new rows with a saved model");
  predict_cmd->add_option("--model", predict.model, "model file")->required();
  predict_cmd->add_option("--data", predict.data, "feature-only CSV file")->required();
  predict_cmd->add_flag("--proba", predict.proba, "also emit P(y=1|x)");
  predict_cmd->add_option("--out", predict.out, "output CSV file")->required();
  predict_cmd->add_option("--delimiter", predict.delimiter, "CSV delimiter");

  SimulateArgs simulate;
  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "run the two-population benchmark");
  simulate_cmd->add_option("--p", simulate.p, "dimension");
  simulate_cmd->add_option("--n", simulate.n, "training rows per class");
  simulate_cmd->add_option("--c", simulate.c, "block correlation of class 2");
  simulate_cmd->add_option("--reps", simulate.reps, "number of repetitions");
  simulate_cmd->add_option("--seed", simulate.seed, "master seed");
  simulate_cmd->add_option("--out", simulate.out, "output report file")->required();

  KktArgs kkt;
  CLI::App* kkt_cmd =
      app.add_subcommand("kkt-check", "verify optimality of a saved model on data");
  kkt_cmd->add_option("--model", kkt.model, "model file")->required();
  kkt_cmd->add_option("--data", kkt.data, "labeled CSV file")->required();
  kkt_cmd->add_option("--label", kkt.label, "name of the label column")->required();
  kkt_cmd->add_option("--delimiter", kkt.delimiter, "CSV delimiter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  fit.has_lambda = lambda_opt->count() > 0;
  fit.has_alpha = alpha_opt->count() > 0;

  try {
    if (fit_cmd->parsed()) return run_fit(fit);
    if (path_cmd->parsed()) return run_path(path);
    if (cv_cmd->parsed()) return run_cv(cv);
    if (predict_cmd->parsed()) return run_predict(predict);
    if (simulate_cmd->parsed()) return run_simulate(simulate);
    if (kkt_cmd->parsed()) return run_kkt_check(kkt);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const CsvError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const InvalidDatasetError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const ModelFormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const DegenerateGridError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const StratificationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const RocError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const IllPosedError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const SingularMatrixError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const NotPositiveDefiniteError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
