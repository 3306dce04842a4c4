#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace alsim {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;
using Seed = std::uint64_t;

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Sub-seed roles. Values are part of the reproducibility contract: never renumber.
enum class SeedRole : std::uint64_t {
  kTrainData = 1,
  kTestData = 2,
  kSplit = 3,
  kFit = 4,
  kActiveStrategy = 5,
  kRandomInstance = 6,
  kBayesError = 7,
  kOptimumError = 8,
  kCalibration = 9,
  kExperiment = 10,
  kCommittee = 11,
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Deterministic sub-seed from (master, role, index); independent of call order.
Seed derive_seed(Seed master, SeedRole role, std::uint64_t index = 0) noexcept;

// Stable 64-bit FNV-1a hash, used to key seeds by experiment identifiers.
std::uint64_t stable_hash(std::string_view text) noexcept;

}  // namespace alsim
