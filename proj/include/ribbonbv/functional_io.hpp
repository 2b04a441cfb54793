#ifndef RIBBONBV_FUNCTIONAL_IO_HPP
#define RIBBONBV_FUNCTIONAL_IO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ribbonbv/algebra_io.hpp"
#include "ribbonbv/bvcalc.hpp"

namespace ribbonbv {

inline constexpr const char* kVersion = "0.1.0";

/// Reproducibility header of a serialized functional. A file without a
/// manifest is read as exact (untruncated).
struct Manifest {
  Truncation truncation;
  std::string weighting;  // empty when not recorded
  std::string version;
  std::optional<int> chi_min;
  std::string algebra;  // free-form source label
};

struct StoredFunctional {
  Functional functional;
  Manifest manifest;
};

/// Text form: `# key=value` manifest lines, then one term per line in
/// canonical order (see format_term).
void write_functional(std::ostream& os, const Functional& f, const Manifest& m);
std::string format_functional(const Functional& f, const Manifest& m);
/// Letters must index `parity`; terms are re-canonicalized on input.
StoredFunctional read_functional(std::istream& is, const std::vector<std::uint8_t>& parity);
StoredFunctional load_functional(const std::string& path, const std::vector<std::uint8_t>& parity);

/// JSON mirror with the same canonical term order.
std::string format_functional_json(const Functional& f, const Manifest& m);
StoredFunctional parse_functional_json(const std::string& text, const std::vector<std::uint8_t>& parity);

}  // namespace ribbonbv

#endif  // RIBBONBV_FUNCTIONAL_IO_HPP
