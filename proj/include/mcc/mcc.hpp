#pragma once

#include "mcc/criteria.hpp"
#include "mcc/error.hpp"
#include "mcc/io.hpp"
#include "mcc/report.hpp"
#include "mcc/selection.hpp"
#include "mcc/tournament.hpp"

namespace mcc {

inline constexpr const char* version = "0.1.0";

} // namespace mcc
