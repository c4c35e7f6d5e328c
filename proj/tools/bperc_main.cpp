// Command-line front end: sequential training, prediction, model
// inspection, and the three experiment runners.
//
// Exit codes: 0 ok, 2 I/O or parse failure, 3 dimension mismatch,
// 4 invalid activation or model spec, 5 unknown experiment.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bperc/experiments.hpp"
#include "bperc/model_io.hpp"
#include "bperc/perceptron.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitDimension = 3;
constexpr int kExitInvalidSpec = 4;
constexpr int kExitUnknownExperiment = 5;

struct CliError {
  int code;
  std::string message;
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw CliError{kExitParse, what + ": not a finite decimal: '" + t + "'"};
  }
  return v;
}

std::vector<double> parse_vector(const std::string& text,
                                 const std::string& what) {
  std::vector<double> out;
  for (const auto& f : split(text, ',')) out.push_back(parse_double(f, what));
  return out;
}

// Activation spec: sigmoid | relu | leaky:<s> | linear | pwl:<a>,<b>
bperc::Activation parse_activation(const std::string& spec) {
  try {
    if (spec == "sigmoid") return bperc::Activation::sigmoid();
    if (spec == "relu") return bperc::Activation::relu();
    if (spec == "linear") return bperc::Activation::linear();
    if (spec.rfind("leaky:", 0) == 0) {
      char* end = nullptr;
      const std::string arg = spec.substr(6);
      const double s = std::strtod(arg.c_str(), &end);
      if (arg.empty() || end != arg.c_str() + arg.size()) {
        throw std::invalid_argument("bad leaky slope");
      }
      return bperc::Activation::leaky_relu(s);
    }
    if (spec.rfind("pwl:", 0) == 0) {
      const auto parts = split(spec.substr(4), ',');
      if (parts.size() != 2) throw std::invalid_argument("pwl needs alpha,beta");
      char* e1 = nullptr;
      char* e2 = nullptr;
      const double a = std::strtod(parts[0].c_str(), &e1);
      const double b = std::strtod(parts[1].c_str(), &e2);
      if (parts[0].empty() || e1 != parts[0].c_str() + parts[0].size() ||
          parts[1].empty() || e2 != parts[1].c_str() + parts[1].size()) {
        throw std::invalid_argument("bad pwl parameters");
      }
      return bperc::Activation::pwl(a, b);
    }
    throw std::invalid_argument("unknown activation '" + spec + "'");
  } catch (const std::invalid_argument& e) {
    throw CliError{kExitInvalidSpec,
                   std::string("invalid activation spec: ") + e.what()};
  }
}

// CSV with header x1..xd,y; returns instances and the input dimension.
std::pair<std::vector<bperc::TrainingInstance>, Eigen::Index> read_data_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitParse, "cannot open data file: " + path};
  std::string line;
  if (!std::getline(in, line)) {
    throw CliError{kExitParse, "data file is empty (header expected): " + path};
  }
  const auto header = split(line, ',');
  if (header.size() < 2 || trim(header.back()) != "y") {
    throw CliError{kExitParse,
                   "malformed header (expected x1..xd,y): " + path};
  }
  const auto dim = static_cast<Eigen::Index>(header.size()) - 1;

  std::vector<bperc::TrainingInstance> data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (static_cast<Eigen::Index>(fields.size()) != dim + 1) {
      throw CliError{kExitParse, path + ":" + std::to_string(line_no) +
                                     ": expected " + std::to_string(dim + 1) +
                                     " fields, got " +
                                     std::to_string(fields.size())};
    }
    bperc::TrainingInstance inst;
    inst.x.resize(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      inst.x(i) = parse_double(fields[i], path + ":" + std::to_string(line_no));
    }
    inst.y = parse_double(fields.back(), path + ":" + std::to_string(line_no));
    data.push_back(std::move(inst));
  }
  return {std::move(data), dim};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw CliError{kExitParse, "cannot open output file: " + path};
  return out;
}

bperc::BayesianPerceptron load_model_checked(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{kExitParse, "cannot open model file: " + path};
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return bperc::model_from_json(text);
  } catch (const std::invalid_argument& e) {
    // Unreadable JSON is an I/O-class failure; a readable document with an
    // invalid model spec is a spec failure.
    const std::string what = e.what();
    if (what.find("invalid JSON") != std::string::npos) {
      throw CliError{kExitParse, what};
    }
    throw CliError{kExitInvalidSpec, what};
  }
}

int cmd_train(const std::string& data_path, const std::string& activation_spec,
              double epsilon, const std::string& prior_mean_spec,
              double prior_var, bool no_bias, const std::string& out_path) {
  const bperc::Activation act = parse_activation(activation_spec);
  auto [data, dim] = read_data_csv(data_path);
  const bool bias = !no_bias;
  const Eigen::Index wdim = dim + (bias ? 1 : 0);

  const auto mean_values = parse_vector(prior_mean_spec, "--prior-mean");
  Eigen::VectorXd mean;
  if (mean_values.size() == 1) {
    mean = Eigen::VectorXd::Constant(wdim, mean_values[0]);
  } else if (static_cast<Eigen::Index>(mean_values.size()) == wdim) {
    mean = Eigen::Map<const Eigen::VectorXd>(mean_values.data(), wdim);
  } else {
    throw CliError{kExitDimension,
                   "--prior-mean has " + std::to_string(mean_values.size()) +
                       " entries, model needs " + std::to_string(wdim)};
  }
  if (prior_var < 0.0) {
    throw CliError{kExitInvalidSpec, "--prior-var must be >= 0"};
  }

  bperc::WeightPosterior prior{
      mean, prior_var * Eigen::MatrixXd::Identity(wdim, wdim)};
  bperc::BayesianPerceptron model(dim, act, std::move(prior), bias, epsilon);
  model = model.fit(data);

  bperc::save_model(model, out_path);
  std::cout << "trained on " << data.size() << " instances (input_dim=" << dim
            << ", bias=" << (bias ? "yes" : "no") << ")\n";
  std::cout << "posterior mean =";
  for (Eigen::Index i = 0; i < model.weight_dim(); ++i) {
    std::cout << ' ' << fmt17(model.weights().mean(i));
  }
  std::cout << "\nposterior covariance trace = "
            << fmt17(model.weights().cov.trace()) << "\n";
  std::cout << "model written to " << out_path << "\n";
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input_spec) {
  const bperc::BayesianPerceptron model = load_model_checked(model_path);
  const auto values = parse_vector(input_spec, "--input");
  if (static_cast<Eigen::Index>(values.size()) != model.input_dim()) {
    throw CliError{kExitDimension,
                   "--input has " + std::to_string(values.size()) +
                       " entries, model expects " +
                       std::to_string(model.input_dim())};
  }
  const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(
      values.data(), static_cast<Eigen::Index>(values.size()));
  const bperc::Prediction p = model.predict(x);
  std::cout << "mu_y = " << fmt17(p.mu_y) << "\n";
  std::cout << "sigma_y2 = " << fmt17(p.sigma_y2) << "\n";
  std::cout << "mu_a = " << fmt17(p.mu_a) << "\n";
  std::cout << "sigma_a2 = " << fmt17(p.sigma_a2) << "\n";
  return kExitOk;
}

int cmd_inspect(const std::string& model_path) {
  const bperc::BayesianPerceptron model = load_model_checked(model_path);
  std::cout << "format version = " << bperc::kModelFormatVersion << "\n";
  std::cout << "input_dim = " << model.input_dim() << "\n";
  std::cout << "bias = " << (model.has_bias() ? "true" : "false") << "\n";
  if (model.activation().is_sigmoid()) {
    std::cout << "activation = sigmoid\n";
  } else {
    std::cout << "activation = pwl(alpha=" << fmt17(model.activation().alpha())
              << ", beta=" << fmt17(model.activation().beta()) << ")\n";
  }
  std::cout << "epsilon = " << fmt17(model.epsilon()) << "\n";
  std::cout << "mean =";
  for (Eigen::Index i = 0; i < model.weight_dim(); ++i) {
    std::cout << ' ' << fmt17(model.weights().mean(i));
  }
  std::cout << "\ncov trace = " << fmt17(model.weights().cov.trace()) << "\n";
  return kExitOk;
}

struct ExperimentFlags {
  std::uint64_t seed = 1;
  int trials = 50;
  double epsilon = 0.01;
  std::string out;
  std::string field_out;
  std::string band_out;
  int n_instances = 25;
  int n_train = 20;
  double grad_lr = 0.05;
  int grad_epochs = 1;
  double grad_init_sd = 2.0;
};

int run_experiment(const std::string& name, const ExperimentFlags& f) {
  if (name == "ground-truth") {
    bperc::GroundTruthConfig cfg;
    cfg.epsilon = f.epsilon;
    const auto result = bperc::run_ground_truth_comparison(cfg);
    auto out = open_output(f.out.empty() ? "ground_truth.csv" : f.out);
    bperc::write_ground_truth_csv(result, out);
    std::cout << "grid points = " << result.records.size()
              << " (epsilon=" << fmt17(cfg.epsilon) << ")\n";
    std::cout << "mean-mae = " << fmt17(result.mean_abs_err.mean) << " +- "
              << fmt17(result.mean_abs_err.stddev) << "\n";
    std::cout << "variance-mae = " << fmt17(result.var_abs_err.mean) << " +- "
              << fmt17(result.var_abs_err.stddev) << "\n";
    std::cout << "frac(mean err <= 0.2) = "
              << fmt17(result.frac_mean_err_below(0.2)) << "\n";
    return kExitOk;
  }
  if (name == "classification") {
    bperc::ClassificationConfig cfg;
    cfg.seed = f.seed;
    cfg.trials = f.trials;
    cfg.epsilon = f.epsilon;
    cfg.n_instances = f.n_instances;
    const auto result = bperc::run_linear_classification(cfg);
    auto out = open_output(f.out.empty() ? "classification.csv" : f.out);
    bperc::write_classification_csv(result, out);
    if (!f.field_out.empty()) {
      auto field = open_output(f.field_out);
      bperc::write_variance_field_csv(result, field);
    }
    std::cout << "trials = " << result.trials.size() << "\n";
    std::cout << "median cosine similarity = " << fmt17(result.median_cosine)
              << "\n";
    std::cout << "median lattice accuracy = " << fmt17(result.median_accuracy)
              << "\n";
    return kExitOk;
  }
  if (name == "regression") {
    bperc::RegressionConfig cfg;
    cfg.seed = f.seed;
    cfg.trials = f.trials;
    cfg.epsilon = f.epsilon;
    cfg.n_train = f.n_train;
    cfg.grad_learning_rate = f.grad_lr;
    cfg.grad_epochs = f.grad_epochs;
    cfg.grad_init_sd = f.grad_init_sd;
    const auto result = bperc::run_softplus_regression(cfg);
    auto out = open_output(f.out.empty() ? "regression.csv" : f.out);
    bperc::write_regression_csv(result, out);
    if (!f.band_out.empty()) {
      auto band = open_output(f.band_out);
      bperc::write_regression_band_csv(result, band);
    }
    std::cout << "trials = " << result.trials.size()
              << " (grad lr=" << fmt17(cfg.grad_learning_rate)
              << ", epochs=" << cfg.grad_epochs
              << ", init sd=" << fmt17(cfg.grad_init_sd) << ")\n";
    for (std::size_t c = 0; c < result.checkpoint_ns.size(); ++c) {
      std::cout << "n=" << result.checkpoint_ns[c] << ": bp rmse "
                << fmt17(result.bp_rmse[c].mean) << " +- "
                << fmt17(result.bp_rmse[c].stddev) << ", grad rmse "
                << fmt17(result.grad_rmse[c].mean) << " +- "
                << fmt17(result.grad_rmse[c].stddev) << "\n";
    }
    return kExitOk;
  }
  throw CliError{kExitUnknownExperiment, "unknown experiment '" + name +
                                             "' (known: ground-truth, "
                                             "classification, regression)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian perceptron: closed-form sequential training and "
               "moment-matched prediction"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Sequentially train on a CSV");
  std::string data_path, activation_spec = "sigmoid", prior_mean_spec = "0";
  std::string model_out = "model.json";
  double epsilon = bperc::BayesianPerceptron::kDefaultEpsilon;
  double prior_var = 1.0;
  bool no_bias = false;
  train->add_option("--data", data_path, "CSV with header x1..xd,y")
      ->required();
  train->add_option("--activation", activation_spec,
                    "sigmoid|relu|leaky:<s>|linear|pwl:<a>,<b>");
  train->add_option("--epsilon", epsilon, "output noise variance");
  train->add_option("--prior-mean", prior_mean_spec,
                    "scalar (broadcast) or comma-separated vector");
  train->add_option("--prior-var", prior_var, "prior covariance is var * I");
  train->add_flag("--no-bias", no_bias, "no bias augmentation");
  train->add_option("--out", model_out, "model file to write");

  // predict
  auto* predict = app.add_subcommand("predict", "Forward pass for one input");
  std::string model_path, input_spec;
  predict->add_option("--model", model_path, "model file")->required();
  predict->add_option("--input", input_spec, "comma-separated input vector")
      ->required();

  // inspect
  auto* inspect = app.add_subcommand("inspect", "Print a model file");
  std::string inspect_path;
  inspect->add_option("--model", inspect_path, "model file")->required();

  // experiment
  auto* experiment =
      app.add_subcommand("experiment", "Run a named experiment");
  std::string experiment_name;
  ExperimentFlags flags;
  experiment
      ->add_option("name", experiment_name,
                   "ground-truth | classification | regression")
      ->required();
  experiment->add_option("--seed", flags.seed, "base RNG seed");
  experiment->add_option("--trials", flags.trials, "number of random trials");
  experiment->add_option("--epsilon", flags.epsilon,
                         "output noise variance / oracle likelihood noise");
  experiment->add_option("--out", flags.out, "results CSV path");
  experiment->add_option("--field-out", flags.field_out,
                         "classification: variance-field CSV for trial 0");
  experiment->add_option("--band-out", flags.band_out,
                         "regression: predictive-band CSV");
  experiment->add_option("--n", flags.n_instances,
                         "classification: instances per trial");
  experiment->add_option("--n-train", flags.n_train,
                         "regression: training instances per trial");
  experiment->add_option("--grad-lr", flags.grad_lr,
                         "regression: baseline learning rate");
  experiment->add_option("--grad-epochs", flags.grad_epochs,
                         "regression: baseline passes per instance");
  experiment->add_option("--grad-init-sd", flags.grad_init_sd,
                         "regression: baseline init std deviation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      return cmd_train(data_path, activation_spec, epsilon, prior_mean_spec,
                       prior_var, no_bias, model_out);
    }
    if (predict->parsed()) return cmd_predict(model_path, input_spec);
    if (inspect->parsed()) return cmd_inspect(inspect_path);
    if (experiment->parsed()) return run_experiment(experiment_name, flags);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidSpec;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
