#pragma once

#include "fairgroups/color.hpp"
#include "fairgroups/core.hpp"
#include "fairgroups/debias.hpp"
#include "fairgroups/io.hpp"
#include "fairgroups/metrics.hpp"
#include "fairgroups/rangesum.hpp"
#include "fairgroups/segment.hpp"
#include "fairgroups/synth.hpp"

namespace fairgroups {

inline constexpr std::string_view kVersion = "0.1.0";

}  // namespace fairgroups
