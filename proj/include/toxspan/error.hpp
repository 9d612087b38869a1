#pragma once

#include <stdexcept>
#include <string>

namespace toxspan {

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct EncodingError : Error {
  explicit EncodingError(const std::string& msg) : Error(msg) {}
};

struct MalformedSpanList : Error {
  explicit MalformedSpanList(const std::string& msg) : Error(msg) {}
};

struct OffsetOutOfBounds : Error {
  explicit OffsetOutOfBounds(const std::string& msg) : Error(msg) {}
};

struct MalformedRecord : Error {
  explicit MalformedRecord(const std::string& msg) : Error(msg) {}
};

struct VocabularyError : Error {
  explicit VocabularyError(const std::string& msg) : Error(msg) {}
};

struct EmptyCorpus : Error {
  explicit EmptyCorpus(const std::string& msg) : Error(msg) {}
};

struct ModelFormatError : Error {
  explicit ModelFormatError(const std::string& msg) : Error(msg) {}
};

struct UnknownDocumentId : Error {
  explicit UnknownDocumentId(const std::string& msg) : Error(msg) {}
};

struct LengthMismatch : Error {
  explicit LengthMismatch(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

}  // namespace toxspan
