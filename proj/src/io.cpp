#include "mixnl/io.hpp"

#include "mixnl/config.hpp"
#include "mixnl/errors.hpp"

#include <fstream>
#include <sstream>

namespace mixnl {

namespace {

std::string quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

CsvTable to_csv(const ConvergenceTable& table) {
    CsvTable t;
    t.header = {"k", "set_measure", "lambda1", "target", "rel_gap", "linf_norm", "integral_condition"};
    for (const auto& r : table.rows) {
        t.rows.push_back({std::to_string(r.k), format_double(r.set_measure), format_double(r.lambda1),
                          format_double(r.target), format_double(r.rel_gap), format_double(r.linf_norm),
                          format_double(r.integral_condition)});
    }
    return t;
}

CsvTable to_csv(const Branch& branch) {
    CsvTable t;
    t.header = {"index", "lambda", "linf_norm", "l2_norm", "arclength", "newton_iters"};
    for (std::size_t i = 0; i < branch.points.size(); ++i) {
        const auto& p = branch.points[i];
        t.rows.push_back({std::to_string(i), format_double(p.lambda), format_double(p.linf_norm),
                          format_double(p.l2_norm), format_double(p.arclength), std::to_string(p.newton_iters)});
    }
    return t;
}

CsvTable to_csv(const Spectrum& sp) {
    CsvTable t;
    t.header = {"index", "lambda", "residual"};
    for (std::size_t i = 0; i < sp.pairs.size(); ++i) {
        t.rows.push_back({std::to_string(i + 1), format_double(sp.pairs[i].lambda),
                          format_double(sp.pairs[i].residual)});
    }
    return t;
}

CsvTable to_csv(const Spectrum& sp, const Mesh1D& mesh) {
    CsvTable t;
    t.header = {"node_x", "role"};
    for (std::size_t i = 0; i < sp.pairs.size(); ++i) {
        t.header.push_back("phi_" + std::to_string(i + 1));
    }
    for (std::size_t n = 0; n < mesh.node_count(); ++n) {
        std::vector<std::string> row{format_double(mesh.nodes[n]), std::string(to_string(mesh.node_role[n]))};
        const int d = mesh.free_dof[n];
        for (const auto& pair : sp.pairs) {
            row.push_back(format_double(d < 0 ? 0.0 : pair.vector(d)));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable to_csv(const std::vector<CheckReport>& reports) {
    CsvTable t;
    t.header = {"check", "pass", "margin", "witness", "seed"};
    for (const auto& r : reports) {
        t.rows.push_back({r.name, r.pass ? "true" : "false", format_double(r.margin), r.witness,
                          std::to_string(r.seed)});
    }
    return t;
}

std::string render_csv(const CsvTable& table) {
    if (table.header.empty() || table.rows.empty()) {
        throw IoError("refusing to write an empty table");
    }
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            os << (i ? "," : "") << quote(fields[i]);
        }
        os << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) {
        if (r.size() != table.header.size()) {
            throw IoError("row width does not match the header");
        }
        line(r);
    }
    return os.str();
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("failed writing " + path);
    }
}

void write_csv(const CsvTable& table, const std::string& path) {
    write_text(render_csv(table), path);
}

std::string RunManifest::render() const {
    std::ostringstream os;
    os << "manifest.subcommand = " << subcommand << '\n';
    os << "manifest.config_path = " << config_path << '\n';
    os << "manifest.output_dir = " << output_dir << '\n';
    os << "manifest.seed = " << seed << '\n';
    os << "manifest.tool_version = " << kToolVersion << '\n';
    for (const auto& [name, seconds] : timings) {
        os << "manifest.time." << name << " = " << format_double(seconds) << '\n';
    }
    os << resolved_config;
    return os.str();
}

} // namespace mixnl
