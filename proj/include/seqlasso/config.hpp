#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "seqlasso/experiments.hpp"

namespace seqlasso {

// "lasso,fsr,slasso" -> selectors; throws Config naming `selectors`.
std::vector<Selector> parse_selector_list(const std::string& text);
std::string format_selector_list(const std::vector<Selector>& selectors);

// Flat key=value lines using the simulate flag names, readable back through
// `simulate --config`.
void write_config(std::ostream& os, const SimulationConfig& cfg);

}  // namespace seqlasso
