#pragma once

#include <stdexcept>
#include <string>

namespace ballflow {

/// Base of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed text input.  Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Structurally invalid input (bad ids, wrong sizes, non-positive radii).
class InputError : public Error {
public:
    using Error::Error;
};

/// A real-geometry operation was asked to handle a virtual or degenerate
/// tetrahedron.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A packing contains a virtual tetrahedron where a real one is required.
class VirtualPackingError : public GeometryError {
public:
    VirtualPackingError(std::size_t tet, int apex, const std::string& what)
        : GeometryError(what), tet_(tet), apex_(apex) {}
    std::size_t tet() const { return tet_; }
    int apex() const { return apex_; }

private:
    std::size_t tet_;
    int apex_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ballflow
