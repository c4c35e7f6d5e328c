#include "bperc/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace bperc {

using nlohmann::json;

std::string model_to_json(const BayesianPerceptron& model) {
  json j;
  j["version"] = kModelFormatVersion;
  j["input_dim"] = model.input_dim();
  j["bias"] = model.has_bias();
  if (model.activation().is_sigmoid()) {
    j["activation"] = {{"type", "sigmoid"}};
  } else {
    j["activation"] = {{"type", "pwl"},
                       {"alpha", model.activation().alpha()},
                       {"beta", model.activation().beta()}};
  }
  j["epsilon"] = model.epsilon();
  const WeightPosterior& w = model.weights();
  j["mean"] = std::vector<double>(w.mean.begin(), w.mean.end());
  json cov = json::array();
  for (Eigen::Index r = 0; r < w.dim(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < w.dim(); ++c) row.push_back(w.cov(r, c));
    cov.push_back(std::move(row));
  }
  j["cov"] = std::move(cov);
  return j.dump(2) + "\n";
}

BayesianPerceptron model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model: invalid JSON: ") +
                                e.what());
  }
  try {
    const int version = j.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw std::invalid_argument("model: unsupported format version " +
                                  std::to_string(version));
    }
    const auto input_dim = j.at("input_dim").get<Eigen::Index>();
    const bool bias = j.at("bias").get<bool>();
    const double epsilon = j.at("epsilon").get<double>();

    const json& act = j.at("activation");
    const std::string type = act.at("type").get<std::string>();
    Activation activation = Activation::sigmoid();
    if (type == "pwl") {
      activation = Activation::pwl(act.at("alpha").get<double>(),
                                   act.at("beta").get<double>());
    } else if (type != "sigmoid") {
      throw std::invalid_argument("model: unknown activation type '" + type +
                                  "'");
    }

    const auto mean_values = j.at("mean").get<std::vector<double>>();
    const auto dim = static_cast<Eigen::Index>(mean_values.size());
    WeightPosterior w;
    w.mean = Eigen::Map<const Eigen::VectorXd>(mean_values.data(), dim);
    w.cov.resize(dim, dim);
    const json& cov = j.at("cov");
    if (static_cast<Eigen::Index>(cov.size()) != dim) {
      throw std::invalid_argument("model: cov row count != mean length");
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto row = cov.at(r).get<std::vector<double>>();
      if (static_cast<Eigen::Index>(row.size()) != dim) {
        throw std::invalid_argument("model: cov is not square");
      }
      for (Eigen::Index c = 0; c < dim; ++c) w.cov(r, c) = row[c];
    }
    return BayesianPerceptron(input_dim, activation, std::move(w), bias,
                              epsilon);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model: bad schema: ") +
                                e.what());
  }
}

void save_model(const BayesianPerceptron& model,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open model file for writing: " +
                             path.string());
  }
  out << model_to_json(model);
  if (!out.good()) {
    throw std::runtime_error("failed writing model file: " + path.string());
  }
}

BayesianPerceptron load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open model file: " + path.string());
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace bperc
