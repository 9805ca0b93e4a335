#pragma once

#include <stdexcept>
#include <string>

namespace ncpdo {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StructuralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// memory guard refusals
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Unsupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ncpdo
