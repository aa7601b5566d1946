#ifndef HGM_ERRORS_HPP
#define HGM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hgm {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct PrecisionMismatchError : Error {
    explicit PrecisionMismatchError(const std::string& msg) : Error(msg) {}
};

struct SingularMatrixError : Error {
    int pivot_index;
    SingularMatrixError(const std::string& msg, int pivot) : Error(msg), pivot_index(pivot) {}
};

struct RankDeficiencyError : Error {
    int column;
    RankDeficiencyError(const std::string& msg, int col) : Error(msg), column(col) {}
};

struct ComplexSpectrumError : Error {
    explicit ComplexSpectrumError(const std::string& msg) : Error(msg) {}
};

struct EigenTieError : Error {
    explicit EigenTieError(const std::string& msg) : Error(msg) {}
};

struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

struct SingularPointError : Error {
    double at;  // informational only
    SingularPointError(const std::string& msg, double t) : Error(msg), at(t) {}
};

struct ParseError : Error {
    int line, column;
    ParseError(const std::string& msg, int ln, int col) : Error(msg), line(ln), column(col) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

struct StencilRangeError : Error {
    explicit StencilRangeError(const std::string& msg) : Error(msg) {}
};

struct DataPointError : Error {
    explicit DataPointError(const std::string& msg) : Error(msg) {}
};

struct StepUnderflowError : Error {
    double last_good_t;
    StepUnderflowError(const std::string& msg, double t) : Error(msg), last_good_t(t) {}
};

struct OverflowError : Error {
    explicit OverflowError(const std::string& msg) : Error(msg) {}
};

struct FilterError : Error {
    explicit FilterError(const std::string& msg) : Error(msg) {}
};

}  // namespace hgm

#endif
