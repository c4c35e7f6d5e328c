#pragma once

// Model persistence: a single JSON document with version, input_dim, bias,
// activation (tag + pwl slopes), epsilon, mean, and row-major covariance.
// Doubles round-trip exactly (shortest round-trip serialization).

#include <filesystem>
#include <string>

#include "bperc/perceptron.hpp"

namespace bperc {

inline constexpr int kModelFormatVersion = 1;

std::string model_to_json(const BayesianPerceptron& model);

// Throws std::invalid_argument on malformed JSON or schema violations
// (missing fields, dimension disagreements, invalid activation).
BayesianPerceptron model_from_json(const std::string& text);

void save_model(const BayesianPerceptron& model,
                const std::filesystem::path& path);

// Throws std::runtime_error when the file cannot be read.
BayesianPerceptron load_model(const std::filesystem::path& path);

}  // namespace bperc
