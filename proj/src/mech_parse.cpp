#include "fgml/mech.hpp"
#include "fgml/numio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

// Parser and canonical serializer for the mechanism text format described in
// docs/mechanism-format.md: ELEMENTS / SPECIES / THERMO / REACTIONS sections,
// '!' comments, NASA-7 records in 4-line groups.

namespace fgml::mech {

namespace {

const std::map<std::string, double> kAtomicMass = {
    {"H", 1.008},    {"HE", 4.002602}, {"C", 12.011},  {"N", 14.007},
    {"O", 15.999},   {"F", 18.998403}, {"NE", 20.1797},{"NA", 22.98977},
    {"MG", 24.305},  {"AL", 26.981539},{"SI", 28.085}, {"P", 30.973762},
    {"S", 32.06},    {"CL", 35.45},    {"AR", 39.948}, {"K", 39.0983},
    {"CA", 40.078},  {"FE", 55.845},   {"BR", 79.904}, {"KR", 83.798},
    {"XE", 131.293}};

std::string upcase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

// Fortran-style field: optional leading '+', 'D' exponents.
bool parse_field(std::string field, double& out) {
    field = trim(field);
    if (!field.empty() && field[0] == '+') field.erase(0, 1);
    for (char& c : field)
        if (c == 'D' || c == 'd') c = 'E';
    return try_parse_double(field, out);
}

struct Line {
    int number = 0;     // 1-based, in the original text
    std::string text;   // comment stripped, not trimmed (thermo is column based)
};

std::vector<Line> split_lines(const std::string& text) {
    std::vector<Line> lines;
    std::string cur;
    int n = 1;
    for (char c : text) {
        if (c == '\n') {
            lines.push_back({n++, cur});
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back({n, cur});
    for (auto& l : lines) {
        std::size_t bang = l.text.find('!');
        if (bang != std::string::npos) l.text.erase(bang);
    }
    return lines;
}

bool is_keyword(const std::string& first_token, const char* kw) {
    return upcase(first_token) == kw;
}

// ---- THERMO records ---------------------------------------------------------

// Coefficient line: whitespace tokens when they parse cleanly, otherwise the
// classic packed 15-column fields. A trailing record marker digit is dropped.
std::vector<double> parse_coeff_line(const Line& l, std::size_t expected) {
    auto toks = split_ws(l.text);
    if (toks.size() == expected + 1 && toks.back().size() == 1 &&
        std::isdigit(static_cast<unsigned char>(toks.back()[0])))
        toks.pop_back();
    if (toks.size() == expected) {
        std::vector<double> vals(expected);
        bool ok = true;
        for (std::size_t i = 0; i < expected && ok; ++i)
            ok = parse_field(toks[i], vals[i]);
        if (ok) return vals;
    }
    // packed fixed fields, 15 columns each
    std::vector<double> vals(expected);
    for (std::size_t i = 0; i < expected; ++i) {
        if (l.text.size() < 15 * i + 1)
            throw SyntaxError(l.number, static_cast<int>(15 * i + 1),
                              "NASA-7 coefficient field");
        std::string field = l.text.substr(15 * i, 15);
        if (!parse_field(field, vals[i]))
            throw SyntaxError(l.number, static_cast<int>(15 * i + 1),
                              "NASA-7 coefficient field");
    }
    return vals;
}

SpeciesThermo parse_thermo_record(const Line& l1, const Line& l2, const Line& l3,
                                  const Line& l4) {
    SpeciesThermo s;

    // line 1: name (cols 1-24), composition (cols 25-44, four 2+3 slots),
    // then phase and the three range temperatures
    auto name_toks = split_ws(l1.text.substr(0, std::min<std::size_t>(24, l1.text.size())));
    if (name_toks.empty()) throw SyntaxError(l1.number, 1, "species name");
    s.name = name_toks[0];

    if (l1.text.size() < 45) throw SyntaxError(l1.number, 45, "phase and temperature fields");
    std::string comp = l1.text.substr(24, 20);
    comp.resize(20, ' ');
    for (int slot = 0; slot < 4; ++slot) {
        std::string el = trim(comp.substr(5 * slot, 2));
        std::string cnt = trim(comp.substr(5 * slot + 2, 3));
        if (el.empty()) continue;
        long long n = 0;
        if (!try_parse_int(cnt, n) || n <= 0)
            throw SyntaxError(l1.number, 25 + 5 * slot + 2, "positive atom count");
        s.composition.emplace_back(upcase(el), static_cast<int>(n));
    }
    if (s.composition.empty())
        throw SyntaxError(l1.number, 25, "element composition");

    auto tail = split_ws(l1.text.substr(44));
    if (tail.size() == 5 && tail.back() == "1") tail.pop_back();
    if (tail.size() != 4 || upcase(tail[0]) != "G")
        throw SyntaxError(l1.number, 45, "'G' phase and T_low T_high T_mid");
    if (!parse_field(tail[1], s.t_low) || !parse_field(tail[2], s.t_high) ||
        !parse_field(tail[3], s.t_mid))
        throw SyntaxError(l1.number, 46, "temperature range fields");

    auto c2 = parse_coeff_line(l2, 5); // a1..a5 high
    auto c3 = parse_coeff_line(l3, 5); // a6, a7 high, a1..a3 low
    auto c4 = parse_coeff_line(l4, 4); // a4..a7 low
    for (int i = 0; i < 5; ++i) s.coeffs_high[i] = c2[i];
    s.coeffs_high[5] = c3[0];
    s.coeffs_high[6] = c3[1];
    s.coeffs_low[0] = c3[2];
    s.coeffs_low[1] = c3[3];
    s.coeffs_low[2] = c3[4];
    for (int i = 0; i < 4; ++i) s.coeffs_low[3 + i] = c4[i];
    return s;
}

// ---- reaction lines ---------------------------------------------------------

struct Side {
    std::vector<std::pair<std::string, int>> terms;
};

Side parse_side(const std::string& expr, int line_no) {
    Side side;
    std::string buf;
    std::vector<std::string> parts;
    for (char c : expr) {
        if (c == '+') {
            parts.push_back(buf);
            buf.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            buf += c;
        }
    }
    parts.push_back(buf);
    for (const auto& p : parts) {
        if (p.empty()) throw SyntaxError(line_no, 1, "species term");
        std::size_t i = 0;
        while (i < p.size() && std::isdigit(static_cast<unsigned char>(p[i]))) ++i;
        int coef = 1;
        if (i > 0) {
            long long v = 0;
            if (!try_parse_int(p.substr(0, i), v) || v <= 0)
                throw SyntaxError(line_no, 1, "integer stoichiometric coefficient");
            coef = static_cast<int>(v);
        }
        std::string name = p.substr(i);
        if (name.empty() || !std::isalpha(static_cast<unsigned char>(name[0])))
            throw SyntaxError(line_no, 1, "species name after coefficient");
        side.terms.emplace_back(name, coef);
    }
    return side;
}

double ea_to_si(double value, const std::string& units) {
    // [J/kmol]
    if (units == "CAL/MOLE") return value * 4.184e3;
    if (units == "KCAL/MOLE") return value * 4.184e6;
    if (units == "JOULES/MOLE") return value * 1e3;
    if (units == "KJOULES/MOLE") return value * 1e6;
    if (units == "JOULES/KMOLE") return value;
    if (units == "KELVINS") return value * kGasConstant;
    throw MechError("unknown activation energy units '" + units + "'");
}

} // namespace

double atomic_mass(const std::string& element) {
    auto it = kAtomicMass.find(upcase(element));
    if (it == kAtomicMass.end())
        throw MechError("unknown element '" + element + "'");
    return it->second;
}

Mechanism parse_mechanism(const std::string& text) {
    Mechanism m;
    auto lines = split_lines(text);

    std::size_t i = 0;
    bool saw_species = false, saw_thermo = false;
    std::vector<Line> pending_reactions;
    std::string ea_units = "CAL/MOLE";
    int reactions_line = 0;

    while (i < lines.size()) {
        auto toks = split_ws(lines[i].text);
        if (toks.empty()) {
            ++i;
            continue;
        }
        const Line& header = lines[i];
        if (is_keyword(toks[0], "ELEMENTS")) {
            ++i;
            for (; i < lines.size(); ++i) {
                auto t = split_ws(lines[i].text);
                if (!t.empty() && is_keyword(t[0], "END")) break;
                for (const auto& el : t) {
                    std::string sym = upcase(el);
                    if (!kAtomicMass.count(sym))
                        throw SyntaxError(lines[i].number, 1, "known element symbol ('" + el + "' is not)");
                    if (std::find(m.elements.begin(), m.elements.end(), sym) == m.elements.end())
                        m.elements.push_back(sym);
                }
            }
            if (i == lines.size()) throw SyntaxError(header.number, 1, "END for ELEMENTS");
            ++i;
        } else if (is_keyword(toks[0], "SPECIES")) {
            saw_species = true;
            ++i;
            for (; i < lines.size(); ++i) {
                auto t = split_ws(lines[i].text);
                if (!t.empty() && is_keyword(t[0], "END")) break;
                for (const auto& name : t) {
                    for (const auto& s : m.species)
                        if (s.name == name) throw DuplicateSpecies(name);
                    SpeciesThermo st;
                    st.name = name;
                    m.species.push_back(std::move(st));
                }
            }
            if (i == lines.size()) throw SyntaxError(header.number, 1, "END for SPECIES");
            ++i;
        } else if (is_keyword(toks[0], "THERMO")) {
            saw_thermo = true;
            ++i;
            std::vector<Line> record;
            for (; i < lines.size(); ++i) {
                auto t = split_ws(lines[i].text);
                if (record.empty() && !t.empty() && is_keyword(t[0], "END")) break;
                if (t.empty()) continue;
                record.push_back(lines[i]);
                if (record.size() == 4) {
                    SpeciesThermo st = parse_thermo_record(record[0], record[1], record[2], record[3]);
                    long long idx = m.find_species(st.name);
                    if (idx < 0) throw UnknownSpecies(st.name, record[0].number);
                    if (!m.species[idx].composition.empty())
                        throw SyntaxError(record[0].number, 1,
                                          "single THERMO record per species ('" + st.name + "' repeated)");
                    m.species[idx] = std::move(st);
                    record.clear();
                }
            }
            if (!record.empty())
                throw SyntaxError(record.front().number, 1, "complete 4-line THERMO record");
            if (i == lines.size()) throw SyntaxError(header.number, 1, "END for THERMO");
            ++i;
        } else if (is_keyword(toks[0], "REACTIONS")) {
            reactions_line = header.number;
            if (toks.size() > 1) ea_units = upcase(toks[1]);
            ea_to_si(0.0, ea_units); // validate the units keyword
            ++i;
            for (; i < lines.size(); ++i) {
                auto t = split_ws(lines[i].text);
                if (!t.empty() && is_keyword(t[0], "END")) break;
                if (!t.empty()) pending_reactions.push_back(lines[i]);
            }
            if (i == lines.size()) throw SyntaxError(reactions_line, 1, "END for REACTIONS");
            ++i;
        } else {
            throw SyntaxError(header.number, 1,
                              "section keyword ELEMENTS/SPECIES/THERMO/REACTIONS");
        }
    }

    if (!saw_species || m.species.empty())
        throw SyntaxError(static_cast<int>(lines.size()), 1, "SPECIES section with at least one species");
    if (!saw_thermo)
        throw SyntaxError(static_cast<int>(lines.size()), 1, "THERMO section");

    // every declared species needs a thermo record
    for (const auto& s : m.species)
        if (s.composition.empty())
            throw SyntaxError(static_cast<int>(lines.size()), 1,
                              "THERMO record for species '" + s.name + "'");

    // derived molar masses + element presence
    for (auto& s : m.species) {
        double w = 0.0;
        for (const auto& [el, n] : s.composition) {
            if (std::find(m.elements.begin(), m.elements.end(), el) == m.elements.end())
                throw SyntaxError(0, 0, "element '" + el + "' of species '" + s.name +
                                            "' declared in ELEMENTS");
            w += n * atomic_mass(el);
        }
        s.molar_mass = w;
        if (!(s.t_low < s.t_mid && s.t_mid < s.t_high))
            throw MechError("species '" + s.name + "': temperature ranges must satisfy t_low < t_mid < t_high");
        // the two polynomial branches must meet at t_mid
        double cpl = cp_species(s, std::nextafter(s.t_mid, s.t_low));
        double cph = cp_species(s, s.t_mid);
        if (std::abs(cpl - cph) > 0.01 * std::abs(cph))
            throw MechError("species '" + s.name + "': cp branches differ by more than 1% at t_mid");
    }

    // reactions
    for (const auto& l : pending_reactions) {
        auto toks = split_ws(l.text);
        if (toks.size() < 4)
            throw SyntaxError(l.number, 1, "reaction followed by A b Ea");
        double a, b, ea;
        if (!parse_field(toks[toks.size() - 3], a) || !parse_field(toks[toks.size() - 2], b) ||
            !parse_field(toks[toks.size() - 1], ea))
            throw SyntaxError(l.number, 1, "numeric A b Ea fields");

        std::string expr;
        for (std::size_t k = 0; k + 3 < toks.size(); ++k) expr += toks[k];

        bool reversible;
        std::size_t pos;
        std::string lhs, rhs;
        if ((pos = expr.find("<=>")) != std::string::npos) {
            reversible = true;
            lhs = expr.substr(0, pos);
            rhs = expr.substr(pos + 3);
        } else if ((pos = expr.find("=>")) != std::string::npos) {
            reversible = false;
            lhs = expr.substr(0, pos);
            rhs = expr.substr(pos + 2);
        } else if ((pos = expr.find('=')) != std::string::npos) {
            reversible = true;
            lhs = expr.substr(0, pos);
            rhs = expr.substr(pos + 1);
        } else {
            throw SyntaxError(l.number, 1, "'=>', '<=>' or '=' in reaction");
        }

        Reaction r;
        r.reversible = reversible;
        r.arrhenius_a = a;
        r.arrhenius_b = b;
        r.activation_energy = ea_to_si(ea, ea_units);
        if (!(r.arrhenius_a > 0.0))
            throw MechError("reaction at line " + std::to_string(l.number) +
                            ": pre-exponential factor must be positive");
        for (const auto& [name, coef] : parse_side(lhs, l.number).terms) {
            long long idx = m.find_species(name);
            if (idx < 0) throw UnknownSpecies(name, l.number);
            r.reactants.emplace_back(static_cast<std::size_t>(idx), coef);
        }
        for (const auto& [name, coef] : parse_side(rhs, l.number).terms) {
            long long idx = m.find_species(name);
            if (idx < 0) throw UnknownSpecies(name, l.number);
            r.products.emplace_back(static_cast<std::size_t>(idx), coef);
        }
        m.reactions.push_back(std::move(r));
    }

    // element balance, exact in integers
    for (std::size_t ri = 0; ri < m.reactions.size(); ++ri) {
        std::map<std::string, long long> net;
        for (const auto& [k, nu] : m.reactions[ri].reactants)
            for (const auto& [el, n] : m.species[k].composition) net[el] -= (long long)nu * n;
        for (const auto& [k, nu] : m.reactions[ri].products)
            for (const auto& [el, n] : m.species[k].composition) net[el] += (long long)nu * n;
        for (const auto& [el, n] : net)
            if (n != 0) throw ElementImbalance(ri);
    }

    return m;
}

std::string serialize_mechanism(const Mechanism& m) {
    std::ostringstream out;
    out << "ELEMENTS\n";
    for (std::size_t i = 0; i < m.elements.size(); ++i)
        out << m.elements[i] << (i + 1 == m.elements.size() ? "" : " ");
    out << "\nEND\n";

    out << "SPECIES\n";
    for (std::size_t i = 0; i < m.species.size(); ++i)
        out << m.species[i].name << (i + 1 == m.species.size() ? "" : " ");
    out << "\nEND\n";

    out << "THERMO\n";
    for (const auto& s : m.species) {
        if (s.name.size() > 24) throw MechError("species name too long to serialize: " + s.name);
        if (s.composition.size() > 4)
            throw MechError("species '" + s.name + "' has more than 4 elements");
        std::string l1 = s.name;
        l1.resize(24, ' ');
        for (const auto& [el, n] : s.composition) {
            if (el.size() > 2 || n > 999)
                throw MechError("composition field overflow for species '" + s.name + "'");
            std::string slot = el;
            slot.resize(2, ' ');
            std::string cnt = format_int(n);
            slot += std::string(3 - cnt.size(), ' ') + cnt;
            l1 += slot;
        }
        l1.resize(44, ' ');
        l1 += "G ";
        l1 += format_double(s.t_low) + " " + format_double(s.t_high) + " " + format_double(s.t_mid);
        out << l1 << "\n";
        out << format_double(s.coeffs_high[0]) << " " << format_double(s.coeffs_high[1]) << " "
            << format_double(s.coeffs_high[2]) << " " << format_double(s.coeffs_high[3]) << " "
            << format_double(s.coeffs_high[4]) << "\n";
        out << format_double(s.coeffs_high[5]) << " " << format_double(s.coeffs_high[6]) << " "
            << format_double(s.coeffs_low[0]) << " " << format_double(s.coeffs_low[1]) << " "
            << format_double(s.coeffs_low[2]) << "\n";
        out << format_double(s.coeffs_low[3]) << " " << format_double(s.coeffs_low[4]) << " "
            << format_double(s.coeffs_low[5]) << " " << format_double(s.coeffs_low[6]) << "\n";
    }
    out << "END\n";

    out << "REACTIONS JOULES/KMOLE\n";
    for (const auto& r : m.reactions) {
        std::string line;
        auto side = [&](const std::vector<std::pair<std::size_t, int>>& terms) {
            std::string s;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                if (i) s += " + ";
                if (terms[i].second != 1) s += format_int(terms[i].second);
                s += m.species[terms[i].first].name;
            }
            return s;
        };
        line = side(r.reactants) + (r.reversible ? " <=> " : " => ") + side(r.products);
        line += "  " + format_double(r.arrhenius_a) + " " + format_double(r.arrhenius_b) + " " +
                format_double(r.activation_energy);
        out << line << "\n";
    }
    out << "END\n";
    return out.str();
}

} // namespace fgml::mech
