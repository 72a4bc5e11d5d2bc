#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bibmatch {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input data. `line` is 1-based when the source is a line-oriented
// file, 0 when unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0) : Error(msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(long long id)
        : Error("duplicate record id " + std::to_string(id)), id_(id) {}
    long long id() const { return id_; }

private:
    long long id_;
};

class InvalidRecordError : public Error {
public:
    InvalidRecordError(const std::string& field, const std::string& msg)
        : Error("invalid record field '" + field + "': " + msg), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class EmptyInputError : public Error {
public:
    EmptyInputError() : Error("empty input") {}
};

class UnparseableError : public Error {
public:
    using Error::Error;
};

class InvalidFieldError : public Error {
public:
    InvalidFieldError(const std::string& field, const std::string& msg)
        : Error("invalid field '" + field + "': " + msg), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class EmptyTrainingSetError : public Error {
public:
    EmptyTrainingSetError() : Error("training set is empty") {}
};

class SingleClassDataError : public Error {
public:
    using Error::Error;
};

class VersionMismatchError : public Error {
public:
    using Error::Error;
};

class FeatureOrderMismatchError : public Error {
public:
    using Error::Error;
};

class BadRatiosError : public Error {
public:
    using Error::Error;
};

class BadMscCodeError : public Error {
public:
    explicit BadMscCodeError(const std::string& code)
        : Error("bad MSC code '" + code + "'") {}
};

class BadConfigError : public Error {
public:
    using Error::Error;
};

// Query language syntax error; `offset` is the byte offset into the query string.
class QuerySyntaxError : public Error {
public:
    QuerySyntaxError(const std::string& msg, std::size_t offset)
        : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

class UnknownFieldError : public Error {
public:
    explicit UnknownFieldError(const std::string& field)
        : Error("unknown search field '" + field + "'"), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

}  // namespace bibmatch
