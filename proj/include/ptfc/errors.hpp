#pragma once

#include <stdexcept>
#include <string>

namespace ptfc
{

/// Malformed or inconsistent input (bad file, length mismatch, cyclic DAG, ...).
class input_error : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation is violated by otherwise
/// well-formed input, e.g. a degenerate CPT entry handed to the log-odds
/// construction.
class precondition_error : public input_error
{
public:
  using input_error::input_error;
};

/// The request is valid but exceeds what this implementation will do:
/// enumeration limits, node budgets, exact-search size caps.
class capability_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace ptfc
