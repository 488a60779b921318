#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cnotasym {

/// Malformed input document. `path()` names the offending field, e.g.
/// "qubits[1].t2_us".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error(path.empty() ? what : path + ": " + what),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// A gate or edge used by a circuit has no noise/error parameters.
class MissingNoiseParameters : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The assignment matrix is too ill-conditioned to invert reliably.
class UnreliableMitigation : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class TranspileError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cnotasym
