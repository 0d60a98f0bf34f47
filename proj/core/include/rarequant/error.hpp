#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rarequant {

// Root of every error the library raises on bad data or failed estimation.
// Precondition violations by the caller (wrong sizes, out-of-range
// arguments) use std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Data errors: the input corpus cannot support the requested operation.
class DataError : public Error {
public:
    using Error::Error;
};

class ParseError : public DataError {
public:
    ParseError(std::size_t line, const std::string& what)
        : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public DataError {
public:
    DuplicateIdError(std::size_t line, const std::string& id)
        : DataError("line " + std::to_string(line) + ": duplicate id '" + id + "'"),
          line_(line), id_(id) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& id() const noexcept { return id_; }

private:
    std::size_t line_;
    std::string id_;
};

class InsufficientClassError : public DataError {
public:
    explicit InsufficientClassError(int label)
        : DataError("class " + std::to_string(label) + " has fewer than 2 documents"),
          label_(label) {}
    int label() const noexcept { return label_; }

private:
    int label_;
};

class EmptyDatasetError : public DataError {
public:
    EmptyDatasetError() : DataError("dataset is empty") {}
};

class SingleClassError : public DataError {
public:
    SingleClassError() : DataError("SingleClassError: training data contains a single class") {}
};

class DegenerateScoresError : public DataError {
public:
    explicit DegenerateScoresError(double variance)
        : DataError("DegenerateScoresError: score variance " + std::to_string(variance) +
                    " is below the 1e-6 floor") {}
};

class EmptyEvaluationError : public DataError {
public:
    EmptyEvaluationError() : DataError("evaluation set is empty") {}
};

class ClassAbsentError : public DataError {
public:
    explicit ClassAbsentError(int label)
        : DataError("class " + std::to_string(label) + " is absent from the evaluation set") {}
};

// Model errors: a model cannot be built or applied.
class DimError : public Error {
public:
    DimError(std::size_t expected, std::size_t got)
        : Error("dimension mismatch: model has " + std::to_string(expected) +
                ", vector has " + std::to_string(got)) {}
};

class DivergenceError : public Error {
public:
    explicit DivergenceError(int iteration)
        : Error("non-finite loss at iteration " + std::to_string(iteration)) {}
};

class ZeroWeightError : public Error {
public:
    ZeroWeightError() : Error("all ensemble voting weights are zero") {}
};

class MemberBuildError : public Error {
public:
    MemberBuildError(std::uint64_t seed, const std::string& why)
        : Error("member with seed " + std::to_string(seed) + " failed: " + why), seed_(seed) {}
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

class EnsembleBuildError : public Error {
public:
    EnsembleBuildError(std::vector<std::uint64_t> seeds, const std::string& what)
        : Error(what), seeds_(std::move(seeds)) {}
    const std::vector<std::uint64_t>& failed_seeds() const noexcept { return seeds_; }

private:
    std::vector<std::uint64_t> seeds_;
};

class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace rarequant
