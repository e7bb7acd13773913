#pragma once

#include <stdexcept>
#include <string>

namespace ncg {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct OwnerMismatch : Error {
    using Error::Error;
};
struct ScalarModeMismatch : Error {
    using Error::Error;
};
struct OutOfWindow : Error {
    using Error::Error;
};
struct ShapeMismatch : Error {
    using Error::Error;
};
struct InvalidInput : Error {
    using Error::Error;
};
struct NoStar : Error {
    using Error::Error;
};
struct NonCommutativeEntries : Error {
    using Error::Error;
};
struct ZeroMatrix : Error {
    using Error::Error;
};
struct NotAMorphism : Error {
    using Error::Error;
};
struct NotCenterReduced : Error {
    using Error::Error;
};
struct RestrictionEscapesCenter : Error {
    using Error::Error;
};
struct NotMultiplicative : Error {
    using Error::Error;
};
struct DivergenceDetected : Error {
    using Error::Error;
};
struct OutsideConvergenceRadius : Error {
    using Error::Error;
};
struct NonCommutingEndos : Error {
    using Error::Error;
};
struct NotInNormalForm : Error {
    using Error::Error;
};
struct Inconclusive : Error {
    using Error::Error;
};

} // namespace ncg
