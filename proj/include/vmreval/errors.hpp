#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vmreval {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An interval whose end lies before its start (or a NaN endpoint).
class InvalidInterval : public Error {
 public:
  using Error::Error;
};

// A parameter outside its documented domain (K < 1, theta outside [0,1], ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Structurally broken input: mismatched lengths, unknown ids, non-finite scores.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A query id was inserted twice into a keyed collection.
class DuplicateKey : public Error {
 public:
  using Error::Error;
};

// A ranked list refers to a query the ground truth does not annotate.
class MissingAnnotation : public Error {
 public:
  using Error::Error;
};

// A run lacks a ranked list for a query in the evaluated set.
class MissingPrediction : public Error {
 public:
  using Error::Error;
};

// An evaluation was requested over zero queries.
class EmptyQuerySet : public Error {
 public:
  using Error::Error;
};

// A malformed line in an input file; remembers where.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Kendall's tau-b has a zero denominator (one of the vectors is all ties).
class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

// A subsampling request needs more queries than the dataset holds.
class InsufficientQueries : public Error {
 public:
  using Error::Error;
};

// A ground-truth segment that cannot be re-annotated (zero length).
class DegenerateAnnotation : public Error {
 public:
  using Error::Error;
};

// No perturbation of the requested kind exists for the given list.
class Infeasible : public Error {
 public:
  using Error::Error;
};

// Filesystem trouble while writing results.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vmreval
