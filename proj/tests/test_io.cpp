#include "mixnl/errors.hpp"
#include "mixnl/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

using namespace mixnl;

namespace {

std::vector<std::string> header_of(const CsvTable& t) { return t.header; }

} // namespace

TEST(Csv, RendersHeaderAndRowsWithLf) {
    CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{"1", "2"}, {"3", "4"}};
    EXPECT_EQ(render_csv(t), "a,b\n1,2\n3,4\n");
}

TEST(Csv, QuotesOnlyWhenNeeded) {
    CsvTable t;
    t.header = {"name", "note"};
    t.rows = {{"plain", "x, y"}, {"say \"hi\"", "two\nlines"}};
    EXPECT_EQ(render_csv(t), "name,note\nplain,\"x, y\"\n\"say \"\"hi\"\"\",\"two\nlines\"\n");
}

TEST(Csv, RefusesEmptyTablesAndRaggedRows) {
    EXPECT_THROW(render_csv(CsvTable{}), IoError);
    CsvTable ragged;
    ragged.header = {"a", "b"};
    ragged.rows = {{"1"}};
    EXPECT_THROW(render_csv(ragged), IoError);
}

TEST(Csv, WriteFailsOnAMissingDirectory) {
    CsvTable t;
    t.header = {"a"};
    EXPECT_THROW(write_csv(t, "/nonexistent/dir/x.csv"), IoError);
}

TEST(Csv, SchemasOfEveryOutput) {
    ConvergenceTable table;
    table.rows.push_back({});
    EXPECT_EQ(header_of(to_csv(table)), (std::vector<std::string>{"k", "set_measure", "lambda1", "target", "rel_gap",
                                                                  "linf_norm", "integral_condition"}));
    Branch b;
    b.points.push_back({});
    EXPECT_EQ(header_of(to_csv(b)),
              (std::vector<std::string>{"index", "lambda", "linf_norm", "l2_norm", "arclength", "newton_iters"}));
    Spectrum sp;
    sp.pairs.push_back({2.0, Eigen::VectorXd::Ones(1), 0.0});
    EXPECT_EQ(header_of(to_csv(sp)), (std::vector<std::string>{"index", "lambda", "residual"}));
    std::vector<CheckReport> reports(1);
    EXPECT_EQ(header_of(to_csv(reports)), (std::vector<std::string>{"check", "pass", "margin", "witness", "seed"}));
}

TEST(Csv, EigenvectorsCoverEveryNode) {
    DomainConfig cfg;
    cfg.neumann_set = {{1.0, 1.5}};
    const auto mesh = build_mesh(cfg, 0.25);
    Spectrum sp;
    const auto n = static_cast<Eigen::Index>(free_dof_count(mesh));
    sp.pairs.push_back({1.0, Eigen::VectorXd::LinSpaced(n, 1.0, 2.0), 0.0});
    const auto t = to_csv(sp, mesh);
    EXPECT_EQ(t.header, (std::vector<std::string>{"node_x", "role", "phi_1"}));
    ASSERT_EQ(t.rows.size(), mesh.node_count());
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
        EXPECT_EQ(t.rows[i][1], std::string(to_string(mesh.node_role[i])));
        if (is_constrained(mesh.node_role[i])) EXPECT_EQ(std::stod(t.rows[i][2]), 0.0);
    }
}

TEST(Manifest, RendersFlatKeysFollowedByTheConfig) {
    RunManifest m;
    m.subcommand = "eig";
    m.config_path = "a.cfg";
    m.output_dir = "out";
    m.seed = 3;
    m.resolved_config = "s = 0.5\n";
    m.timings = {{"solve", 0.25}};
    const std::string text = m.render();
    EXPECT_NE(text.find("manifest.subcommand = eig\n"), std::string::npos);
    EXPECT_NE(text.find("manifest.seed = 3\n"), std::string::npos);
    EXPECT_NE(text.find("manifest.time.solve = 0.25"), std::string::npos);
    EXPECT_NE(text.find(std::string("manifest.tool_version = ") + kToolVersion), std::string::npos);
    EXPECT_EQ(text.substr(text.size() - 8), "s = 0.5\n");
}

TEST(WriteText, WritesTheExactBytes) {
    const auto dir = std::filesystem::temp_directory_path() / "mixnl_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "t.txt").string();
    write_text("x = 1\n", path);
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), "x = 1\n");
    std::filesystem::remove_all(dir);
}
