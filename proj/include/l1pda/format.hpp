#ifndef L1PDA_FORMAT_HPP
#define L1PDA_FORMAT_HPP

#include <string>

namespace l1pda::detail {

// Short form for diagnostics and error messages (%.6g).
std::string fmt(double x);

// Shortest decimal string that parses back to exactly x; used wherever
// a serialized number must round-trip bit-exactly.
std::string fmt_exact(double x);

}  // namespace l1pda::detail

#endif  // L1PDA_FORMAT_HPP
