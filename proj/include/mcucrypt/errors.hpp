#pragma once

#include <stdexcept>

namespace mcucrypt {

// Base class for all domain errors. The CLI maps these to exit status 2,
// distinct from usage errors (1).
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class length_error : public error {
public:
    using error::error;
};

class padding_error : public error {
public:
    using error::error;
};

class range_error : public error {
public:
    using error::error;
};

class topology_error : public error {
public:
    using error::error;
};

class integrity_error : public error {
public:
    using error::error;
};

} // namespace mcucrypt
