#ifndef MYOPIC_ERRORS_HH_
#define MYOPIC_ERRORS_HH_

#include <stdexcept>
#include <string>

namespace myopic {

// Malformed input to a constructor or operation (violated precondition).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RegularizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long step, double t)
      : std::runtime_error(what + " (step " + std::to_string(step) + ", t=" + std::to_string(t) + ")"),
        step_(step), t_(t) {}
  long step() const { return step_; }
  double time() const { return t_; }

 private:
  long step_;
  double t_;
};

}  // namespace myopic

#endif
