#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace reserveflow {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IslandedNetwork : Error {
    std::vector<int> buses;
    IslandedNetwork(std::string what, std::vector<int> b)
        : Error(std::move(what)), buses(std::move(b)) {}
};

struct NumericalFailure : Error { using Error::Error; };
struct TooLarge : Error { using Error::Error; };

struct InfeasibleMarket : Error {
    std::vector<std::string> constraints;  // rows carrying the certificate
    InfeasibleMarket(std::string what, std::vector<std::string> c)
        : Error(std::move(what)), constraints(std::move(c)) {}
};
struct UnboundedMarket : Error { using Error::Error; };

struct UnknownScenario : Error { using Error::Error; };

struct ParseError : Error {
    int line = 0, column = 0;
    ParseError(std::string what, int l, int c) : Error(std::move(what)), line(l), column(c) {}
};
struct SchemaError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct MissingData : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct CalibrationFailed : Error { using Error::Error; };

}  // namespace reserveflow
