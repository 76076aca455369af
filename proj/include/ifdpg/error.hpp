#pragma once

#include <stdexcept>

namespace ifdpg {

// Malformed or unreadable input: files, flags, serialized documents.
// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is well formed but the pipeline cannot produce a meaningful result,
// e.g. a labeling with a single class. The CLI maps this to exit code 2.
class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ifdpg
