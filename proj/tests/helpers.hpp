#ifndef FGML_TEST_HELPERS_HPP
#define FGML_TEST_HELPERS_HPP

#include "fgml/flamelet.hpp"
#include "fgml/mech.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace fgml_test {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline const fgml::mech::Mechanism& bundled_mech() {
    static fgml::mech::Mechanism m = fgml::mech::parse_mechanism(
        read_file(std::string(FGML_DATA_DIR) + "/methane4step.mech"));
    return m;
}

inline fgml::flamelet::BoundaryConditions methane_air_bc(const fgml::mech::Mechanism& m) {
    fgml::flamelet::BoundaryConditions bc;
    bc.t_ox = 300.0;
    bc.t_fuel = 300.15;
    bc.pressure = 101325.0;
    bc.y_ox.assign(m.n_species(), 0.0);
    bc.y_fuel.assign(m.n_species(), 0.0);
    bc.y_ox[m.species_index("O2")] = 0.233;
    bc.y_ox[m.species_index("N2")] = 0.767;
    bc.y_fuel[m.species_index("CH4")] = 1.0;
    return bc;
}

} // namespace fgml_test

#endif
