#pragma once

#include <stdexcept>

namespace dynavo {

// Bad or missing input data (dataset files, masks, config). Maps to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unrecoverable failure while processing a sequence. Maps to exit code 3.
struct PipelineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dynavo
