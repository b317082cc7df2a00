// Copyright 2026 The TokenGraph Authors. Licensed under the Apache License, Version 2.0.
#pragma once

#include <stdexcept>
#include <string>

namespace tokengraph {

/// Bad caller input: malformed arguments, missing files, violated preconditions.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape/dimension disagreement between tensors, graphs or shards.
class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A file exists but its contents do not follow the expected binary/text layout.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure during training (non-finite loss or gradients).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tokengraph
