#ifndef HOPFORGE_ERRORS_HPP
#define HOPFORGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hopforge {

/// Malformed scalar/element/order input.
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A polynomial operation would exceed the configured degree cap.
/// Raised instead of letting coefficient growth thrash the process.
class degree_cap_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The box monomials of a presentation are K-linearly dependent.
class dependence_error : public std::runtime_error {
public:
    dependence_error(const std::string& what, std::size_t rank_found)
        : std::runtime_error(what), rank(rank_found) {}
    std::size_t rank;
};

/// Koch construction refused: A = Theta^{-1}Theta^(p) has an entry
/// of negative valuation.
class integrality_error : public std::runtime_error {
public:
    integrality_error(const std::string& what, int row, int col)
        : std::runtime_error(what), row(row), col(col) {}
    int row;
    int col;
};

/// Arithmetic invariant violated; indicates a bug, not bad input.
class internal_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace hopforge

#endif
