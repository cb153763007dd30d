#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "l1pda/format.hpp"
#include "l1pda/io.hpp"
#include "testutil.hpp"

using namespace l1pda;
using testutil::TempDir;

namespace {

const std::string& cli_path() {
  static const std::string path = [] {
    const char* env = std::getenv("L1PDA_CLI");
    REQUIRE_MESSAGE(env != nullptr, "set L1PDA_CLI to the binary under test");
    return std::string(env);
  }();
  return path;
}

// Runs the tool through the shell, captures both streams, returns the
// exit code.
int run_cli(const std::string& args, const std::string& log) {
  const int rc = std::system((cli_path() + " " + args + " >" + log + " 2>&1").c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

// A well-conditioned two-class training file; returns its path.
std::string write_training_csv(const TempDir& dir, std::mt19937_64& rng, int p,
                               int n_per_class, const std::string& name = "train.csv") {
  LabeledDataset d = testutil::random_dataset(rng, p, n_per_class, n_per_class);
  d.label_names = {{"neg", "pos"}};
  const std::string path = dir.file(name);
  save_csv(d, path, "label", ',');
  return path;
}

}  // namespace

TEST_CASE("fit produces a model that kkt-check accepts") {
  TempDir dir("cli_fit");
  std::mt19937_64 rng(501);
  const std::string train = write_training_csv(dir, rng, 4, 25);
  LabeledDataset d = load_csv(train, "label", ',');
  const double lmax = lambda_max(compute_stats(d));

  for (const std::string method : {"lda", "qda"}) {
    const std::string model = dir.file(method + ".json");
    CHECK(run_cli("fit --data " + train + " --label label --method " + method +
                      " --out " + model,
                  dir.file("log")) == 0);
    CHECK(load_model(model).model.method == method);
    CHECK(run_cli("kkt-check --model " + model + " --data " + train + " --label label",
                  dir.file("log")) == 0);
  }

  const std::string model = dir.file("l1.json");
  const std::string fit_cmd = "fit --data " + train +
                              " --label label --method l1pda --lambda " +
                              detail::fmt_exact(0.3 * lmax) + " --out ";
  CHECK(run_cli(fit_cmd + model, dir.file("log")) == 0);
  LoadedModel loaded = load_model(model);
  CHECK(loaded.model.method == "l1pda");
  CHECK(loaded.provenance.at("solver").at("converged") == true);
  CHECK(run_cli("kkt-check --model " + model + " --data " + train + " --label label",
                dir.file("kkt.json")) == 0);
  nlohmann::json rep = nlohmann::json::parse(read_text_file(dir.file("kkt.json")));
  CHECK(rep.at("report") == "kkt");
  CHECK(rep.at("stationarity_ok") == true);

  // Identical flags give a byte-identical model file.
  CHECK(run_cli(fit_cmd + dir.file("l1_again.json"), dir.file("log")) == 0);
  CHECK(read_text_file(model) == read_text_file(dir.file("l1_again.json")));
}

TEST_CASE("kkt-check rejects a model whose penalty was tampered with") {
  TempDir dir("cli_tamper");
  std::mt19937_64 rng(502);
  const std::string train = write_training_csv(dir, rng, 4, 25);
  LabeledDataset d = load_csv(train, "label", ',');
  const double lmax = lambda_max(compute_stats(d));

  const std::string model = dir.file("m.json");
  REQUIRE(run_cli("fit --data " + train + " --label label --method l1pda --lambda " +
                      detail::fmt_exact(0.3 * lmax) + " --out " + model,
                  dir.file("log")) == 0);
  nlohmann::json j = nlohmann::json::parse(read_text_file(model));
  j["lambda"] = double(j["lambda"]) / 100.0;
  write_text_file(model, j.dump(2) + "\n");
  CHECK(run_cli("kkt-check --model " + model + " --data " + train + " --label label",
                dir.file("log")) == 1);
}

TEST_CASE("predict labels new rows and reports class-1 probabilities") {
  TempDir dir("cli_predict");
  std::mt19937_64 rng(503);
  LabeledDataset d = testutil::random_dataset(rng, 3, 30, 30);
  d.label_names = {{"neg", "pos"}};
  for (int i = 0; i < d.X.rows(); ++i)  // push the classes far apart
    d.X(i, 0) += d.y[static_cast<std::size_t>(i)] == 1 ? -10.0 : 10.0;
  const std::string train = dir.file("train.csv");
  save_csv(d, train, "label", ',');

  const std::string model = dir.file("m.json");
  REQUIRE(run_cli("fit --data " + train + " --label label --method lda --out " + model,
                  dir.file("log")) == 0);

  const std::string query = dir.file("query.csv");
  write_text_file(query, "f1,f2,f3\n-10,0,0\n10,0,0\n");
  const std::string out = dir.file("pred.csv");
  CHECK(run_cli("predict --model " + model + " --data " + query + " --proba --out " + out,
                dir.file("log")) == 0);

  const std::string text = read_text_file(out);
  REQUIRE(text.rfind("f1,f2,f3,predicted,p_class1\n", 0) == 0);
  const auto line_end = text.find('\n', text.find('\n') + 1);
  const std::string row1 = text.substr(text.find('\n') + 1, line_end - text.find('\n') - 1);
  const std::string row2 = text.substr(line_end + 1, text.size() - line_end - 2);
  CHECK(row1.find(",neg,") != std::string::npos);
  CHECK(row2.find(",pos,") != std::string::npos);
  CHECK(std::stod(row1.substr(row1.rfind(',') + 1)) > 0.99);
  CHECK(std::stod(row2.substr(row2.rfind(',') + 1)) < 0.01);

  // Without the flag the probability column is absent.
  CHECK(run_cli("predict --model " + model + " --data " + query + " --out " + out,
                dir.file("log")) == 0);
  CHECK(read_text_file(out).rfind("f1,f2,f3,predicted\n", 0) == 0);
}

TEST_CASE("usage mistakes exit with code 2") {
  TempDir dir("cli_usage");
  std::mt19937_64 rng(504);
  const std::string train = write_training_csv(dir, rng, 3, 12);
  const std::string log = dir.file("log");
  const std::string out = " --out " + dir.file("m.json");

  CHECK(run_cli("", log) == 2);
  CHECK(run_cli("frobnicate", log) == 2);
  CHECK(run_cli("fit --label label --method lda" + out, log) == 2);
  CHECK(run_cli("fit --data " + train + " --label label --method svm" + out, log) == 2);
  CHECK(run_cli("fit --data " + train + " --label label --method l1pda" + out, log) == 2);
  CHECK(run_cli("fit --data " + train + " --label label --method lda --lambda 1" + out,
                log) == 2);
  CHECK(run_cli("fit --data " + train + " --label label --method rda" + out, log) == 2);
  CHECK(run_cli("fit --data " + train + " --label label --method rda --alpha 1.5" + out,
                log) == 2);
  CHECK(run_cli("fit --data " + train +
                    " --label label --method lda --delimiter ,, " + out,
                log) == 2);
  CHECK(run_cli("simulate --p 9 --reps 2 --out " + dir.file("r.json"), log) == 2);
  CHECK(run_cli("simulate --c 1.0 --reps 2 --out " + dir.file("r.json"), log) == 2);
  CHECK(run_cli("--help", log) == 0);

  // kkt-check has no penalty to verify for an rda model.
  const std::string rda = dir.file("rda.json");
  REQUIRE(run_cli("fit --data " + train + " --label label --method rda --alpha 0.5 --out " +
                      rda,
                  log) == 0);
  CHECK(run_cli("kkt-check --model " + rda + " --data " + train + " --label label", log) ==
        2);
}

TEST_CASE("data problems exit with code 3") {
  TempDir dir("cli_data");
  std::mt19937_64 rng(505);
  const std::string train = write_training_csv(dir, rng, 3, 12);
  const std::string log = dir.file("log");

  CHECK(run_cli("fit --data " + dir.file("absent.csv") +
                    " --label label --method lda --out " + dir.file("m.json"),
                log) == 3);

  const std::string junk = dir.file("junk.csv");
  write_text_file(junk, "a,b,label\n1,2,x\n1,zz,y\n");
  CHECK(run_cli("fit --data " + junk + " --label label --method lda --out " +
                    dir.file("m.json"),
                log) == 3);

  const std::string model = dir.file("m.json");
  REQUIRE(run_cli("fit --data " + train + " --label label --method lda --out " + model,
                  log) == 0);
  const std::string narrow = dir.file("narrow.csv");
  write_text_file(narrow, "f1,f2\n1,2\n");
  CHECK(run_cli("predict --model " + model + " --data " + narrow + " --out " +
                    dir.file("p.csv"),
                log) == 3);

  const std::string corrupt = dir.file("corrupt.json");
  write_text_file(corrupt, "{not json");
  CHECK(run_cli("predict --model " + corrupt + " --data " + narrow + " --out " +
                    dir.file("p.csv"),
                log) == 3);
}

TEST_CASE("rank-deficient problems exit with code 4") {
  TempDir dir("cli_illposed");
  std::mt19937_64 rng(506);

  // Too few rows in total: every method is ill-posed.
  LabeledDataset tiny = testutil::random_dataset(rng, 8, 4, 4);
  const std::string tiny_csv = dir.file("tiny.csv");
  save_csv(tiny, tiny_csv, "label", ',');
  const std::string log = dir.file("log");
  CHECK(run_cli("fit --data " + tiny_csv + " --label label --method lda --out " +
                    dir.file("m.json"),
                log) == 4);
  CHECK(run_cli("fit --data " + tiny_csv +
                    " --label label --method l1pda --lambda 0.5 --out " + dir.file("m.json"),
                log) == 4);

  // Singular class covariances with a healthy pooled one: the penalized
  // fit works, the unpenalized one cannot.
  LabeledDataset d = testutil::random_dataset(rng, 4, 4, 4);
  const std::string csv = dir.file("singular.csv");
  save_csv(d, csv, "label", ',');
  const double lmax = lambda_max(compute_stats(load_csv(csv, "label", ',')));
  CHECK(run_cli("fit --data " + csv + " --label label --method qda --out " +
                    dir.file("m.json"),
                log) == 4);
  CHECK(run_cli("fit --data " + csv + " --label label --method l1pda --lambda " +
                    detail::fmt_exact(0.3 * lmax) + " --out " + dir.file("m.json"),
                log) == 0);
}

TEST_CASE("a capped fit exits with code 5 yet still writes the model") {
  TempDir dir("cli_unconverged");
  std::mt19937_64 rng(507);
  const std::string train = write_training_csv(dir, rng, 4, 25);
  const double lmax = lambda_max(compute_stats(load_csv(train, "label", ',')));

  const std::string model = dir.file("m.json");
  CHECK(run_cli("fit --data " + train + " --label label --method l1pda --lambda " +
                    detail::fmt_exact(0.1 * lmax) + " --max-iter 3 --out " + model,
                dir.file("log")) == 5);
  LoadedModel loaded = load_model(model);
  CHECK(loaded.provenance.at("solver").at("converged") == false);
  CHECK(loaded.provenance.at("solver").at("iterations") == 3);
}

TEST_CASE("path writes one model per grid point plus a diagnostics table") {
  TempDir dir("cli_path");
  std::mt19937_64 rng(508);
  const std::string train = write_training_csv(dir, rng, 3, 20);
  const std::string outdir = dir.file("path_out");

  CHECK(run_cli("path --data " + train + " --label label --nlambda 5 --eps 0.05 --out " +
                    outdir,
                dir.file("log")) == 0);

  std::vector<double> lambdas;
  for (int k = 0; k < 5; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "/model_%03d.json", k);
    LoadedModel m = load_model(outdir + name);
    CHECK(m.model.method == "l1pda");
    CHECK(m.provenance.at("index") == k);
    lambdas.push_back(m.model.lambda);
  }
  CHECK(std::is_sorted(lambdas.rbegin(), lambdas.rend()));

  // The first point sits at lambda_max, where both precisions pool.
  LoadedModel first = load_model(outdir + std::string("/model_000.json"));
  CHECK(testutil::max_abs_diff(first.model.P1.mat(), first.model.P2.mat()) < 1e-6);

  const std::string table = read_text_file(outdir + std::string("/path.csv"));
  std::size_t lines = 0;
  for (char ch : table) lines += ch == '\n';
  CHECK(lines == 6);
  CHECK(table.rfind("index,lambda,converged,", 0) == 0);

  // Every converged point passes the optimality check.
  CHECK(run_cli("kkt-check --model " + outdir + "/model_004.json --data " + train +
                    " --label label",
                dir.file("log")) == 0);
}

TEST_CASE("cv reports are byte-identical across reruns") {
  TempDir dir("cli_cv");
  std::mt19937_64 rng(509);
  const std::string train = write_training_csv(dir, rng, 3, 18);
  const std::string log = dir.file("log");

  const std::string base = "cv --data " + train + " --label label --folds 3 --seed 7 ";
  const std::string r1 = dir.file("r1.json");
  const std::string r2 = dir.file("r2.json");
  CHECK(run_cli(base + "--method l1pda --nlambda 4 --eps 0.1 --out " + r1, log) == 0);
  CHECK(run_cli(base + "--method l1pda --nlambda 4 --eps 0.1 --out " + r2, log) == 0);
  CHECK(read_text_file(r1) == read_text_file(r2));

  nlohmann::json rep = nlohmann::json::parse(read_text_file(r1));
  CHECK(rep.at("report") == "cv");
  CHECK(rep.at("method") == "l1pda");
  CHECK(rep.at("folds") == 3);
  CHECK(rep.at("seed") == 7);
  CHECK(rep.at("grid").size() == 4);
  const int best = rep.at("best_index");
  CHECK(best >= 0);
  CHECK(best < 4);

  CHECK(run_cli(base + "--method rda --nalpha 3 --out " + r1, log) == 0);
  rep = nlohmann::json::parse(read_text_file(r1));
  CHECK(rep.at("method") == "rda");
  CHECK(rep.at("grid") == nlohmann::json({0.0, 0.5, 1.0}));

  CHECK(run_cli(base + "--method lda --out " + r1, log) == 0);
  rep = nlohmann::json::parse(read_text_file(r1));
  CHECK(rep.at("grid").size() == 1);
}

TEST_CASE("simulate is deterministic under a fixed seed") {
  TempDir dir("cli_sim");
  const std::string log = dir.file("log");
  const std::string base = "simulate --p 10 --n 12 --c 0.5 --reps 2 --seed 11 --out ";
  const std::string r1 = dir.file("r1.json");
  const std::string r2 = dir.file("r2.json");
  CHECK(run_cli(base + r1, log) == 0);
  CHECK(run_cli(base + r2, log) == 0);
  CHECK(read_text_file(r1) == read_text_file(r2));

  nlohmann::json rep = nlohmann::json::parse(read_text_file(r1));
  CHECK(rep.at("report") == "simulate");
  CHECK(rep.at("reps") == 2);
  CHECK(rep.at("design").at("p") == 10);
  CHECK(rep.at("design").at("c") == 0.5);
  REQUIRE(rep.at("methods").size() == 4);
  CHECK(rep.at("methods")[0].at("method") == "l1pda");
  CHECK(rep.at("methods")[1].at("method") == "lda");
  CHECK(rep.at("methods")[2].at("method") == "qda");
  CHECK(rep.at("methods")[3].at("method") == "rda");
  for (const auto& m : rep.at("methods")) {
    const double acc = m.at("mean_accuracy");
    const double auc = m.at("mean_auc");
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(auc >= 0.0);
    CHECK(auc <= 1.0);
  }
}

TEST_CASE("fit honors a custom delimiter") {
  TempDir dir("cli_delim");
  std::mt19937_64 rng(510);
  LabeledDataset d = testutil::random_dataset(rng, 3, 12, 12);
  const std::string train = dir.file("train.tsv");
  save_csv(d, train, "label", ';');
  CHECK(run_cli("fit --data " + train + " --label label --method lda --delimiter \\; --out " +
                    dir.file("m.json"),
                dir.file("log")) == 0);
}
