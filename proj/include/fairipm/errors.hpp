#ifndef FAIRIPM_ERRORS_HPP
#define FAIRIPM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fairipm {

// Invalid arguments raise std::invalid_argument; numerical failures raise
// NumericError; file problems raise IoError/ParseError. The C API maps each
// type to its own status code.

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when an input stream ends before a batch satisfies its constraints.
// Carries how many samples of the partial batch had been consumed.
class StreamExhausted : public std::runtime_error {
 public:
  StreamExhausted(const std::string& message, size_t partial_count)
      : std::runtime_error(message), partial_count_(partial_count) {}
  size_t partial_count() const { return partial_count_; }

 private:
  size_t partial_count_;
};

}  // namespace fairipm

#endif
