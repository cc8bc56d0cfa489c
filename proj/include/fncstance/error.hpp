#pragma once

#include <stdexcept>
#include <string>

namespace fncstance {

// Base of every error thrown by the library. The CLI maps any of these to a
// nonzero exit status.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing column, malformed CSV row, empty required field.
class SchemaError : public Error { using Error::Error; };
// A stance row references a body id that the bodies file does not define.
class JoinError : public Error { using Error::Error; };
// Unknown stance label.
class LabelError : public Error { using Error::Error; };
// Out-of-range argument to a pure operation.
class ParameterError : public Error { using Error::Error; };
// Split produced an empty side.
class SplitError : public Error { using Error::Error; };
// Corrupt or inconsistent binary/text file.
class FormatError : public Error { using Error::Error; };
// Feature block or cache shape does not match what the model expects.
class ShapeError : public Error { using Error::Error; };
// Non-finite value found in gradients or parameters.
class NumericError : public Error { using Error::Error; };
// Embedding store has no vector for a requested key.
class MissingEmbeddingError : public Error { using Error::Error; };
// Bad run configuration or empty input at the command level.
class ConfigError : public Error { using Error::Error; };

}  // namespace fncstance
