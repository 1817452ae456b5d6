#pragma once

#include <stdexcept>
#include <string>

namespace sepstab {

// Base class for all library errors. Thin subclasses give callers something
// to catch per failure mode; the CLI maps the class name into its error line.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define SEPSTAB_ERROR(Name)                                                   \
    struct Name : Error {                                                     \
        explicit Name(const std::string& what) : Error(what) {}              \
        const char* kind() const noexcept override { return #Name; }         \
    }

SEPSTAB_ERROR(NonUnitNorm);
SEPSTAB_ERROR(NotHermitian);
SEPSTAB_ERROR(NotDensityMatrix);
SEPSTAB_ERROR(DimensionMismatch);
SEPSTAB_ERROR(NotUnbiasedBasis);
SEPSTAB_ERROR(DimensionCap);
SEPSTAB_ERROR(InvalidOrder);
SEPSTAB_ERROR(InvalidParameters);
SEPSTAB_ERROR(NotCPTP);
SEPSTAB_ERROR(UnsupportedDimension);
SEPSTAB_ERROR(ParseError);
SEPSTAB_ERROR(ValidationError);

#undef SEPSTAB_ERROR

} // namespace sepstab
