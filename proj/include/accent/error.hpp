#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace accent {

/// Base class for every data or contract error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidFeature : public Error {
public:
    using Error::Error;
};

/// A symbol missing from the symbol table. `offset` is the byte offset in the
/// input text (or npos when the lookup was not part of a parse).
class UnknownSymbol : public Error {
public:
    UnknownSymbol(std::string symbol, std::size_t offset = std::string::npos)
        : Error(offset == std::string::npos
                    ? "unknown symbol '" + symbol + "'"
                    : "unknown symbol '" + symbol + "' at byte " + std::to_string(offset)),
          symbol_(std::move(symbol)),
          offset_(offset) {}

    const std::string& symbol() const noexcept { return symbol_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string symbol_;
    std::size_t offset_;
};

class EmptyWord : public Error {
public:
    using Error::Error;
};

class NotAVowel : public Error {
public:
    using Error::Error;
};

class DuplicateWord : public Error {
public:
    using Error::Error;
};

class BadPhoneme : public Error {
public:
    using Error::Error;
};

class MissingWord : public Error {
public:
    explicit MissingWord(std::string word)
        : Error("missing word '" + word + "'"), word_(std::move(word)) {}
    const std::string& word() const noexcept { return word_; }

private:
    std::string word_;
};

class EmptyLexicon : public Error {
public:
    EmptyLexicon() : Error("lexicon is empty") {}
};

class MalformedTranscript : public Error {
public:
    using Error::Error;
};

class UnbalancedDesign : public Error {
public:
    using Error::Error;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace accent
