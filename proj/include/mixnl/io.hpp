#pragma once

#include "mixnl/analysis_checks.hpp"
#include "mixnl/bifurcation.hpp"
#include "mixnl/dissipation.hpp"
#include "mixnl/spectral.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mixnl {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable to_csv(const ConvergenceTable& table);
CsvTable to_csv(const Branch& branch);
CsvTable to_csv(const Spectrum& sp);
// Eigenvectors at every mesh node (0 at constrained nodes): node_x, role, phi_1, ..., phi_n.
CsvTable to_csv(const Spectrum& sp, const Mesh1D& mesh);
CsvTable to_csv(const std::vector<CheckReport>& reports);

/// Header plus rows, comma separated, LF line endings, fields quoted only
/// when they contain a comma, quote or newline. Refuses an empty table.
std::string render_csv(const CsvTable& table);
void write_csv(const CsvTable& table, const std::string& path);

/// Flat key-value record written next to every output.
struct RunManifest {
    std::string subcommand;
    std::string config_path;
    std::string output_dir;
    std::uint64_t seed = 0;
    std::string resolved_config; // serialize_config output
    std::vector<std::pair<std::string, double>> timings; // seconds

    std::string render() const;
};

void write_text(const std::string& text, const std::string& path);

inline constexpr const char* kToolVersion = "1.0.0";

} // namespace mixnl
