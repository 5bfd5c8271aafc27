#pragma once

#include <string>
#include <string_view>

namespace npfuse {

/// 17 significant digits, scientific, locale independent ("-2.5100000000000000e+02").
/// Round-trips every finite double exactly.
std::string format_sig17(double value);

/// Locale-independent strict parse of a whole token; throws DecodeError.
double parse_double(std::string_view token);
long long parse_integer(std::string_view token);

}  // namespace npfuse
