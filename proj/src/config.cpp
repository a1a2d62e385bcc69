#include "seqlasso/config.hpp"

#include <ostream>
#include <sstream>

#include "seqlasso/error.hpp"

namespace seqlasso {

std::vector<Selector> parse_selector_list(const std::string& text) {
    std::vector<Selector> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            out.push_back(parse_selector(item));
        } catch (const Error& e) {
            throw Error(ErrorCode::Config, std::string("selectors: ") + e.what());
        }
    }
    if (out.empty()) throw Error(ErrorCode::Config, "selectors: empty list");
    return out;
}

std::string format_selector_list(const std::vector<Selector>& selectors) {
    std::string s;
    for (Selector sel : selectors) {
        if (!s.empty()) s += ',';
        s += to_string(sel);
    }
    return s;
}

void write_config(std::ostream& os, const SimulationConfig& cfg) {
    const auto old = os.precision(17);
    os << "n=" << cfg.n << '\n'
       << "structure=" << to_string(cfg.structure.kind) << '\n';
    if (structure_uses_rho(cfg.structure.kind)) os << "rho=" << cfg.structure.rho << '\n';
    os << "coef-type=" << cfg.coef_type << '\n'
       << "h=" << cfg.h << '\n'
       << "replicates=" << cfg.replicates << '\n'
       << "seed=" << cfg.seed << '\n'
       << "selectors=" << format_selector_list(cfg.selectors) << '\n'
       << "steps=" << cfg.max_steps << '\n'
       << "gamma-r=" << cfg.gamma_r << '\n';
    if (cfg.gamma) os << "gamma=" << *cfg.gamma << '\n';
    if (cfg.p) os << "p=" << cfg.p << '\n';
    if (cfg.p0) os << "p0=" << cfg.p0 << '\n';
    os << "ebic=" << (cfg.ebic_mode ? "true" : "false") << '\n';
    os.precision(old);
}

}  // namespace seqlasso
