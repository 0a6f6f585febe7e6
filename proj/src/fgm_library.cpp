#include "fgml/fgm_library.hpp"
#include "fgml/numio.hpp"
#include "fgml/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace fgml::fgm {

using flamelet::ChiShape;
using flamelet::FlameletSolution;

std::string mechanism_fingerprint(const mech::Mechanism& m) {
    return fnv1a64_hex(mech::serialize_mechanism(m));
}

std::vector<double> FlameletLibrary::chis() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.chi_st);
    return out;
}

void FlameletLibrary::validate() const {
    if (entries.empty()) throw LibraryError("library has no entries");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i > 0 && !(entries[i].chi_st > entries[i - 1].chi_st))
            throw LibraryError("library chi values must be strictly increasing");
        if (!(entries[i].grid == grid))
            throw LibraryError("library entries must share one grid");
        if (entries[i].mass_fractions.front().size() != species_names.size())
            throw LibraryError("entry species count does not match the library");
    }
}

FlameletLibrary tabulate(const mech::Mechanism& m, const flamelet::BoundaryConditions& bc,
                         const flamelet::Grid& grid, const std::vector<double>& chis,
                         const TabulateOptions& opts) {
    if (chis.empty()) throw LibraryError("tabulate needs at least one chi value");
    for (std::size_t i = 0; i < chis.size(); ++i) {
        if (!(chis[i] > 0.0)) throw LibraryError("chi values must be positive");
        if (i > 0 && !(chis[i] > chis[i - 1]))
            throw LibraryError("chi values must be sorted and unique");
    }
    bc.validate(m);
    grid.validate();

    FlameletLibrary lib;
    lib.fingerprint = mechanism_fingerprint(m);
    for (const auto& s : m.species) lib.species_names.push_back(s.name);
    lib.bc = bc;
    lib.grid = grid;
    lib.chi_shape = opts.chi_shape;
    lib.z_st = flamelet::stoichiometric_mixture_fraction(m, bc);

    std::vector<FlameletSolution> sols(chis.size());
    int workers = opts.workers > 0 ? opts.workers : default_workers();
    parallel_for(chis.size(), workers, [&](std::size_t i) {
        flamelet::ChiProfile prof{chis[i], lib.z_st, opts.chi_shape};
        sols[i] = flamelet::solve_steady(m, prof, bc, grid, opts.solve);
    });

    for (std::size_t i = 0; i < sols.size(); ++i) {
        if (!sols[i].converged) {
            if (opts.skip_unconverged) continue;
            throw NotConverged(chis[i]);
        }
        lib.entries.push_back(std::move(sols[i]));
    }
    if (lib.entries.empty()) throw LibraryError("no converged entries");
    lib.validate();
    return lib;
}

Dataset flatten(const FlameletLibrary& lib) {
    lib.validate();
    Dataset ds;
    ds.input_names = {"Z", "chi"};
    ds.target_names.push_back("T");
    for (const auto& s : lib.species_names) ds.target_names.push_back(s);

    for (const auto& e : lib.entries) {
        for (std::size_t j = 0; j < lib.grid.size(); ++j) {
            ds.inputs.push_back({lib.grid.z[j], e.chi_st});
            std::vector<double> row;
            row.reserve(1 + lib.species_names.size());
            row.push_back(e.temperature[j]);
            for (double y : e.mass_fractions[j]) row.push_back(y);
            ds.targets.push_back(std::move(row));
        }
    }
    return ds;
}

void Dataset::validate() const {
    if (inputs.size() != targets.size())
        throw SchemaError("dataset input and target row counts differ");
    for (const auto& r : inputs) {
        if (r.size() != input_names.size()) throw SchemaError("ragged input row");
        for (double v : r)
            if (!std::isfinite(v)) throw LibraryError("dataset contains a non-finite input");
    }
    for (const auto& r : targets) {
        if (r.size() != target_names.size()) throw SchemaError("ragged target row");
        for (double v : r)
            if (!std::isfinite(v)) throw LibraryError("dataset contains a non-finite target");
    }
}

// ---- CSV ---------------------------------------------------------------

void write_csv(const Dataset& ds, std::ostream& out) {
    ds.validate();
    std::string header;
    for (const auto& n : ds.input_names) {
        if (!header.empty()) header += ",";
        header += n;
    }
    for (const auto& n : ds.target_names) header += "," + n;
    out << header << "\n";
    for (std::size_t r = 0; r < ds.size(); ++r) {
        std::string line;
        for (double v : ds.inputs[r]) {
            if (!line.empty()) line += ",";
            line += format_double(v);
        }
        for (double v : ds.targets[r]) line += "," + format_double(v);
        out << line << "\n";
    }
    if (!out) throw IoError("failed while writing CSV stream");
}

void write_csv(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_csv(ds, out);
}

namespace {

std::vector<std::string> split_on(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("CSV is empty (missing header)");
    auto cols = split_on(line, ',');
    if (cols.size() < 3)
        throw SchemaError("CSV needs at least Z, chi and one target column");
    if (cols[0] != "Z" || cols[1] != "chi")
        throw SchemaError("CSV must start with the input columns 'Z,chi'");
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i].empty()) throw SchemaError("CSV has an empty column name");
        for (std::size_t j = i + 1; j < cols.size(); ++j)
            if (cols[i] == cols[j]) throw SchemaError("CSV column '" + cols[i] + "' repeats");
    }

    Dataset ds;
    ds.input_names = {cols[0], cols[1]};
    ds.target_names.assign(cols.begin() + 2, cols.end());

    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        auto cells = split_on(line, ',');
        if (cells.size() != cols.size())
            throw ParseError(row, cells.size(), "expected " + std::to_string(cols.size()) +
                                                    " cells, found " + std::to_string(cells.size()));
        std::vector<double> vals(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (!try_parse_double(cells[c], vals[c]))
                throw ParseError(row, c + 1, "non-numeric cell '" + cells[c] + "'");
        }
        ds.inputs.push_back({vals[0], vals[1]});
        ds.targets.emplace_back(vals.begin() + 2, vals.end());
    }
    ds.validate();
    return ds;
}

Dataset read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_csv(in);
}

// ---- library container ----------------------------------------------------

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += format_double(v[i]);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s, std::size_t expect,
                                  const char* what) {
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        double v;
        if (!try_parse_double(tok, v)) throw IoError(std::string("bad number in ") + what);
        out.push_back(v);
    }
    if (expect && out.size() != expect)
        throw IoError(std::string("wrong count in ") + what);
    return out;
}

} // namespace

void write_library(const FlameletLibrary& lib, std::ostream& out) {
    lib.validate();
    std::ostringstream body;
    body << "FGMLIB 1\n";
    body << "mechanism " << lib.fingerprint << "\n";
    body << "chi_shape " << (lib.chi_shape == ChiShape::analytic_erfc ? "analytic-erfc" : "constant")
         << "\n";
    body << "z_st " << format_double(lib.z_st) << "\n";
    body << "pressure " << format_double(lib.bc.pressure) << "\n";
    body << "t_ox " << format_double(lib.bc.t_ox) << "\n";
    body << "t_fuel " << format_double(lib.bc.t_fuel) << "\n";
    std::string names;
    for (std::size_t i = 0; i < lib.species_names.size(); ++i)
        names += (i ? " " : "") + lib.species_names[i];
    body << "species " << names << "\n";
    body << "y_ox " << join_doubles(lib.bc.y_ox) << "\n";
    body << "y_fuel " << join_doubles(lib.bc.y_fuel) << "\n";
    body << "grid " << join_doubles(lib.grid.z) << "\n";
    body << "entries " << lib.entries.size() << "\n";
    for (const auto& e : lib.entries) {
        body << "entry " << format_double(e.chi_st) << " converged " << (e.converged ? 1 : 0)
             << " residual " << format_double(e.residual_norm) << " steps " << e.steps << "\n";
        body << "T " << join_doubles(e.temperature) << "\n";
        body << "rho " << join_doubles(e.density) << "\n";
        for (std::size_t k = 0; k < lib.species_names.size(); ++k) {
            std::vector<double> col(lib.grid.size());
            for (std::size_t j = 0; j < lib.grid.size(); ++j) col[j] = e.mass_fractions[j][k];
            body << "Y " << lib.species_names[k] << " " << join_doubles(col) << "\n";
        }
    }
    std::string text = body.str();
    out << text << "hash " << fnv1a64_hex(text) << "\n";
    if (!out) throw IoError("failed while writing library stream");
}

void write_library(const FlameletLibrary& lib, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    write_library(lib, out);
}

FlameletLibrary read_library(std::istream& in) {
    std::string text, line;
    std::string hash_line;
    while (std::getline(in, line)) {
        if (line.rfind("hash ", 0) == 0) {
            hash_line = line;
            break;
        }
        text += line;
        text += "\n";
    }
    if (hash_line.empty()) throw IoError("library file has no content hash");
    if (hash_line.substr(5) != fnv1a64_hex(text))
        throw IoError("library content hash mismatch");

    std::istringstream body(text);
    auto expect_key = [&](const char* key) {
        std::string l;
        if (!std::getline(body, l)) throw IoError(std::string("missing '") + key + "' line");
        std::size_t sp = l.find(' ');
        std::string k = sp == std::string::npos ? l : l.substr(0, sp);
        if (k != key) throw IoError("expected '" + std::string(key) + "', found '" + k + "'");
        return sp == std::string::npos ? std::string() : l.substr(sp + 1);
    };

    std::string magic;
    std::getline(body, magic);
    if (magic != "FGMLIB 1") throw IoError("not a library file (bad magic)");

    FlameletLibrary lib;
    lib.fingerprint = expect_key("mechanism");
    std::string shape = expect_key("chi_shape");
    if (shape == "analytic-erfc")
        lib.chi_shape = ChiShape::analytic_erfc;
    else if (shape == "constant")
        lib.chi_shape = ChiShape::constant;
    else
        throw IoError("unknown chi shape '" + shape + "'");
    lib.z_st = parse_double(expect_key("z_st"), "z_st");
    lib.bc.pressure = parse_double(expect_key("pressure"), "pressure");
    lib.bc.t_ox = parse_double(expect_key("t_ox"), "t_ox");
    lib.bc.t_fuel = parse_double(expect_key("t_fuel"), "t_fuel");
    {
        std::istringstream ns(expect_key("species"));
        std::string tok;
        while (ns >> tok) lib.species_names.push_back(tok);
        if (lib.species_names.empty()) throw IoError("library lists no species");
    }
    const std::size_t nk = lib.species_names.size();
    lib.bc.y_ox = parse_doubles(expect_key("y_ox"), nk, "y_ox");
    lib.bc.y_fuel = parse_doubles(expect_key("y_fuel"), nk, "y_fuel");
    lib.grid.z = parse_doubles(expect_key("grid"), 0, "grid");
    const std::size_t n = lib.grid.size();

    long long count = 0;
    if (!try_parse_int(expect_key("entries"), count) || count <= 0)
        throw IoError("bad entry count");
    for (long long e = 0; e < count; ++e) {
        std::istringstream hdr(expect_key("entry"));
        FlameletSolution sol;
        sol.grid = lib.grid;
        std::string tok, key;
        hdr >> tok;
        double chi;
        if (!try_parse_double(tok, chi)) throw IoError("bad entry chi");
        sol.chi_st = chi;
        int conv = 0, steps = 0;
        double resid = 0.0;
        hdr >> key >> conv >> key >> resid >> key >> steps;
        sol.converged = conv != 0;
        sol.residual_norm = resid;
        sol.steps = steps;
        sol.temperature = parse_doubles(expect_key("T"), n, "T row");
        sol.density = parse_doubles(expect_key("rho"), n, "rho row");
        sol.mass_fractions.assign(n, std::vector<double>(nk));
        for (std::size_t k = 0; k < nk; ++k) {
            std::string rest = expect_key("Y");
            std::size_t sp = rest.find(' ');
            if (sp == std::string::npos) throw IoError("bad Y row");
            if (rest.substr(0, sp) != lib.species_names[k])
                throw IoError("Y rows out of order");
            auto col = parse_doubles(rest.substr(sp + 1), n, "Y row");
            for (std::size_t j = 0; j < n; ++j) sol.mass_fractions[j][k] = col[j];
        }
        lib.entries.push_back(std::move(sol));
    }
    lib.validate();
    return lib;
}

FlameletLibrary read_library_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_library(in);
}

// ---- lookup -----------------------------------------------------------------

namespace {

// index i with xs[i] <= x <= xs[i+1]
std::size_t bracket(const std::vector<double>& xs, double x) {
    std::size_t lo = 0, hi = xs.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (xs[mid] <= x)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

} // namespace

LookupResult lookup(const FlameletLibrary& lib, double z, double chi) {
    lib.validate();
    if (!(z >= 0.0 && z <= 1.0)) throw OutOfRange("z outside [0, 1]");
    auto cs = lib.chis();
    if (!(chi >= cs.front() && chi <= cs.back()))
        throw OutOfRange("chi " + std::to_string(chi) + " outside the library range [" +
                         std::to_string(cs.front()) + ", " + std::to_string(cs.back()) + "]");

    std::size_t e = cs.size() == 1 ? 0 : bracket(cs, chi);
    std::size_t e2 = cs.size() == 1 ? 0 : e + 1;
    double tc = cs.size() == 1 ? 0.0 : (chi - cs[e]) / (cs[e2] - cs[e]);

    std::size_t j = bracket(lib.grid.z, z);
    double tz = (z - lib.grid.z[j]) / (lib.grid.z[j + 1] - lib.grid.z[j]);

    auto blend = [&](double v00, double v01, double v10, double v11) {
        double lo = (1.0 - tz) * v00 + tz * v01;
        double hi = (1.0 - tz) * v10 + tz * v11;
        return (1.0 - tc) * lo + tc * hi;
    };

    const auto& a = lib.entries[e];
    const auto& b = lib.entries[e2];
    LookupResult out;
    out.temperature = blend(a.temperature[j], a.temperature[j + 1], b.temperature[j],
                            b.temperature[j + 1]);
    out.mass_fractions.resize(lib.species_names.size());
    for (std::size_t k = 0; k < lib.species_names.size(); ++k)
        out.mass_fractions[k] = blend(a.mass_fractions[j][k], a.mass_fractions[j + 1][k],
                                      b.mass_fractions[j][k], b.mass_fractions[j + 1][k]);
    return out;
}

// ---- subset study ---------------------------------------------------------

namespace {

constexpr double kErrorFloor = 1e-10;

double pct_error(double pred, double ref) {
    return 100.0 * std::abs(pred - ref) / std::max(std::abs(ref), kErrorFloor);
}

ErrorStats stats_of(const std::vector<double>& errs) {
    ErrorStats s;
    if (errs.empty()) return s;
    s.max_pct = *std::max_element(errs.begin(), errs.end());
    s.min_pct = *std::min_element(errs.begin(), errs.end());
    double sum = 0.0;
    for (double v : errs) sum += v;
    s.mean_pct = sum / errs.size();
    return s;
}

} // namespace

std::vector<SubsetStudyRow> subset_study(const mech::Mechanism& m,
                                         const FlameletLibrary& pool,
                                         const std::vector<int>& counts,
                                         const std::vector<double>& eval_chis,
                                         const SubsetStudyOptions& opts) {
    pool.validate();
    if (mechanism_fingerprint(m) != pool.fingerprint)
        throw MechanismMismatch("mechanism does not match the library pool");
    const std::size_t p = pool.entries.size();
    if (p < 2) throw InsufficientPool("pool needs at least 2 entries");
    for (int k : counts)
        if (k < 1 || static_cast<std::size_t>(k) > p)
            throw InsufficientPool("count " + std::to_string(k) + " exceeds the pool size " +
                                   std::to_string(p));
    long long i_sp = -1;
    for (std::size_t k = 0; k < pool.species_names.size(); ++k)
        if (pool.species_names[k] == opts.species) i_sp = static_cast<long long>(k);
    if (i_sp < 0) throw LibraryError("tracked species '" + opts.species + "' not in the library");

    auto cs = pool.chis();

    // gather every requested evaluation chi, deduplicated, with reference
    // solves shared across counts
    struct Row {
        std::vector<std::size_t> sel;
        std::vector<double> evals;
    };
    std::vector<Row> rows(counts.size());
    std::vector<double> all_evals;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        int k = counts[c];
        auto& row = rows[c];
        if (k == 1) {
            row.sel = {0};
        } else {
            for (int j = 0; j < k; ++j)
                row.sel.push_back(static_cast<std::size_t>(
                    std::llround(static_cast<double>(j) * (p - 1) / (k - 1))));
        }
        if (!eval_chis.empty()) {
            row.evals = eval_chis;
        } else {
            for (std::size_t j = 0; j + 1 < row.sel.size(); ++j)
                row.evals.push_back(0.5 * (cs[row.sel[j]] + cs[row.sel[j + 1]]));
            if (row.evals.empty()) row.evals.push_back(cs[p / 2]);
        }
        for (double chi : row.evals) {
            if (!(chi >= cs.front() && chi <= cs.back()))
                throw OutOfRange("evaluation chi outside the pool range");
            all_evals.push_back(chi);
        }
    }
    std::sort(all_evals.begin(), all_evals.end());
    all_evals.erase(std::unique(all_evals.begin(), all_evals.end()), all_evals.end());

    std::vector<FlameletSolution> refs(all_evals.size());
    int workers = opts.workers > 0 ? opts.workers : default_workers();
    parallel_for(all_evals.size(), workers, [&](std::size_t i) {
        flamelet::ChiProfile prof{all_evals[i], pool.z_st, pool.chi_shape};
        auto sol = flamelet::solve_steady(m, prof, pool.bc, pool.grid, opts.solve);
        if (!sol.converged) throw NotConverged(all_evals[i]);
        refs[i] = std::move(sol);
    });
    std::map<double, const FlameletSolution*> ref_by_chi;
    for (std::size_t i = 0; i < all_evals.size(); ++i) ref_by_chi[all_evals[i]] = &refs[i];

    std::vector<SubsetStudyRow> out;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        const auto& row = rows[c];
        FlameletLibrary sub = pool;
        sub.entries.clear();
        for (std::size_t idx : row.sel) sub.entries.push_back(pool.entries[idx]);

        std::vector<double> t_errs, sp_errs;
        for (double chi : row.evals) {
            const FlameletSolution& ref = *ref_by_chi.at(chi);
            for (std::size_t j = 0; j < pool.grid.size(); ++j) {
                auto pred = lookup(sub, pool.grid.z[j], chi);
                t_errs.push_back(pct_error(pred.temperature, ref.temperature[j]));
                sp_errs.push_back(
                    pct_error(pred.mass_fractions[i_sp], ref.mass_fractions[j][i_sp]));
            }
        }

        SubsetStudyRow r;
        r.count = counts[c];
        for (std::size_t idx : row.sel) r.selected_chis.push_back(cs[idx]);
        r.eval_chis = row.evals;
        r.temperature = stats_of(t_errs);
        r.species = stats_of(sp_errs);
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace fgml::fgm
