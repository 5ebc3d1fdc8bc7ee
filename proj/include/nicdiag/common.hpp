#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace nicdiag {

/// Input file could not be parsed (bad syntax, bad field types).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parsed but violates a domain invariant (duplicates, unknown ids, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched models/schemas or bad run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training set does not satisfy a trainer's preconditions.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Splitmix64 step; derives an independent stream seed from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Sampling helpers built directly on mt19937_64 output. The standard
// <random> distributions are not bit-specified across library
// implementations, and reproducibility here has to be exact.
double uniform01(std::mt19937_64& rng);                         // [0, 1)
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n); // {0..n-1}
double gaussian(std::mt19937_64& rng);                          // N(0, 1)
long poisson(std::mt19937_64& rng, double lambda);

/// Index of the largest weight after walking the cumulative sum of `row`
/// against one uniform draw. Ties and zero-mass rows fall back to the
/// last/first nonzero entry deterministically.
std::size_t sample_discrete(std::mt19937_64& rng, const std::vector<double>& row);

/// Round-trippable decimal text for doubles ("%.17g").
std::string format_double(double v);
double parse_double(const std::string& s);

/// Splits on any whitespace, skipping empty fields.
std::vector<std::string> split_tokens(const std::string& s);
/// Splits on a single delimiter, keeping empty fields.
std::vector<std::string> split_on(const std::string& s, char delim);

}  // namespace nicdiag
