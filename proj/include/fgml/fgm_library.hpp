#ifndef FGML_FGM_LIBRARY_HPP
#define FGML_FGM_LIBRARY_HPP

#include "fgml/flamelet.hpp"
#include "fgml/mech.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgml::fgm {

struct LibraryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : LibraryError {
    using LibraryError::LibraryError;
};

struct SchemaError : LibraryError {
    using LibraryError::LibraryError;
};

struct ParseError : LibraryError {
    std::size_t row; // 1-based data row
    std::size_t col; // 1-based column
    ParseError(std::size_t row_, std::size_t col_, const std::string& what_)
        : LibraryError("parse error at row " + std::to_string(row_) + ", col " +
                       std::to_string(col_) + ": " + what_),
          row(row_), col(col_) {}
};

struct OutOfRange : LibraryError {
    using LibraryError::LibraryError;
};

struct InsufficientPool : LibraryError {
    using LibraryError::LibraryError;
};

struct MechanismMismatch : LibraryError {
    using LibraryError::LibraryError;
};

struct NotConverged : LibraryError {
    double chi;
    explicit NotConverged(double chi_)
        : LibraryError("flamelet solve did not converge at chi = " + std::to_string(chi_)),
          chi(chi_) {}
};

// Content fingerprint of a mechanism (hash of its canonical serialization).
std::string mechanism_fingerprint(const mech::Mechanism& m);

// Ordered collection of steady flamelet solutions over chi_st, all sharing
// one grid, one set of boundary conditions and one mechanism.
struct FlameletLibrary {
    std::string fingerprint;
    std::vector<std::string> species_names;
    flamelet::BoundaryConditions bc;
    flamelet::Grid grid;
    flamelet::ChiShape chi_shape = flamelet::ChiShape::analytic_erfc;
    double z_st = 0.0;
    std::vector<flamelet::FlameletSolution> entries; // ascending unique chi_st

    std::vector<double> chis() const;
    void validate() const;

    bool operator==(const FlameletLibrary&) const = default;
};

struct TabulateOptions {
    flamelet::SolveOptions solve;
    flamelet::ChiShape chi_shape = flamelet::ChiShape::analytic_erfc;
    bool skip_unconverged = false;
    int workers = 0; // 0: hardware concurrency
};

// One converged solve per chi (parallel across entries). Throws
// NotConverged(chi) for the lowest failing chi unless skipping is enabled.
FlameletLibrary tabulate(const mech::Mechanism& m, const flamelet::BoundaryConditions& bc,
                         const flamelet::Grid& grid, const std::vector<double>& chis,
                         const TabulateOptions& opts = {});

// Flat training table: inputs (Z, chi), targets (T, Y...).
struct Dataset {
    std::vector<std::string> input_names;
    std::vector<std::string> target_names;
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;

    std::size_t size() const { return inputs.size(); }
    void validate() const; // equal row counts, finite values

    bool operator==(const Dataset&) const = default;
};

// Row order: ascending chi, then ascending Z. A bijection onto the library's
// (node, entry) set.
Dataset flatten(const FlameletLibrary& lib);

// CSV with a header row; values are shortest-round-trip decimals, so
// read(write(ds)) == ds bit-exactly.
void write_csv(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, const std::string& path);
Dataset read_csv(std::istream& in);
Dataset read_csv_file(const std::string& path);

// Library container (docs/library-format.md), bit-exact round trip.
void write_library(const FlameletLibrary& lib, std::ostream& out);
void write_library(const FlameletLibrary& lib, const std::string& path);
FlameletLibrary read_library(std::istream& in);
FlameletLibrary read_library_file(const std::string& path);

// Bilinear table lookup: linear in Z on the stored grid, linear in chi
// between bracketing entries. Exact at stored nodes.
struct LookupResult {
    double temperature;
    std::vector<double> mass_fractions;
};
LookupResult lookup(const FlameletLibrary& lib, double z, double chi);

// Minimum-library study: for each count k, an evenly indexed k-subset of the
// pool approximates held-out chi values against fresh reference solves.
struct ErrorStats {
    double max_pct = 0.0;
    double min_pct = 0.0;
    double mean_pct = 0.0;
};

struct SubsetStudyRow {
    int count = 0;
    std::vector<double> selected_chis;
    std::vector<double> eval_chis;
    ErrorStats temperature;
    ErrorStats species; // the tracked species column (CO2 by default)
};

struct SubsetStudyOptions {
    std::string species = "CO2";
    flamelet::SolveOptions solve;
    int workers = 0;
};

std::vector<SubsetStudyRow> subset_study(const mech::Mechanism& m,
                                         const FlameletLibrary& pool,
                                         const std::vector<int>& counts,
                                         const std::vector<double>& eval_chis,
                                         const SubsetStudyOptions& opts = {});

} // namespace fgml::fgm

#endif
