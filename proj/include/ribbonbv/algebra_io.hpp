#ifndef RIBBONBV_ALGEBRA_IO_HPP
#define RIBBONBV_ALGEBRA_IO_HPP

#include <istream>
#include <stdexcept>
#include <string>

#include "ribbonbv/algebra.hpp"

namespace ribbonbv {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line;
  int column;
};

/// Line-oriented algebra description:
///   kind associative|a_infinity
///   basis <name>:<even|odd> ...
///   product[n] (i1,...,in)-><j>=<p/q>
///   cyclic[n] (i0,...,in)=<p/q>
///   beta (i,j)=<p/q>
///   I (i)-><j>=<p/q>
///   H (i)-><j>=<p/q>
/// Indices are basis names or 0-based integers; `#` starts a comment.
AlgebraSpec parse_algebra(std::istream& in);
AlgebraSpec parse_algebra_string(const std::string& text);
AlgebraSpec load_algebra(const std::string& path);

std::string format_algebra(const AlgebraSpec& spec);

}  // namespace ribbonbv

#endif  // RIBBONBV_ALGEBRA_IO_HPP
