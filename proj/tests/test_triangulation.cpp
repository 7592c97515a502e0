#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "ballflow/error.hpp"
#include "ballflow/triangulation.hpp"

using namespace ballflow;

namespace {

bool has_rule(const ValidationReport& r, const std::string& rule) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](const Violation& v) { return v.rule == rule; });
}

void check_star_consistency(const Triangulation& t) {
    const auto deg = t.degrees();
    EXPECT_EQ(std::accumulate(deg.begin(), deg.end(), 0), 4 * static_cast<int>(t.num_tetrahedra()));
    for (std::size_t e = 0; e < t.num_edges(); ++e) {
        const Edge& edge = t.edges()[e];
        const auto star = t.edge_star(e);
        ASSERT_FALSE(star.empty());
        for (int ti : star) {
            const Tet& tt = t.tet(ti);
            EXPECT_NE(std::find(tt.begin(), tt.end(), edge.a), tt.end());
            EXPECT_NE(std::find(tt.begin(), tt.end(), edge.b), tt.end());
        }
    }
    for (int v = 0; v < t.num_vertices(); ++v)
        for (int ti : t.vertex_star(v)) {
            const Tet& tt = t.tet(ti);
            EXPECT_NE(std::find(tt.begin(), tt.end(), v), tt.end());
        }
}

}  // namespace

TEST(Triangulation, FiveCell) {
    const Triangulation t = generate_boundary_4simplex();
    EXPECT_EQ(t.num_vertices(), 5);
    EXPECT_EQ(t.num_tetrahedra(), 5u);
    EXPECT_EQ(t.num_edges(), 10u);
    EXPECT_EQ(t.num_faces(), 10u);
    EXPECT_EQ(t.euler_characteristic(), 0);
    EXPECT_TRUE(validate(t).passed());
    EXPECT_TRUE(is_regular(t));
    for (int d : t.degrees()) EXPECT_EQ(d, 4);
    check_star_consistency(t);
}

TEST(Triangulation, SixteenCell) {
    const Triangulation t = generate_16cell();
    EXPECT_EQ(t.num_vertices(), 8);
    EXPECT_EQ(t.num_tetrahedra(), 16u);
    EXPECT_EQ(t.num_edges(), 24u);
    EXPECT_EQ(t.num_faces(), 32u);
    EXPECT_EQ(t.euler_characteristic(), 0);
    EXPECT_TRUE(validate(t).passed());
    EXPECT_TRUE(is_regular(t));
    for (int d : t.degrees()) EXPECT_EQ(d, 8);
    for (const Edge& e : t.edges()) EXPECT_NE(e.a / 2, e.b / 2) << "antipodal edge " << e.a << "-" << e.b;
    check_star_consistency(t);
}

TEST(Triangulation, CycleJoin) {
    const Triangulation t = generate_cycle_join(5, 7);
    EXPECT_EQ(t.num_vertices(), 12);
    EXPECT_EQ(t.num_tetrahedra(), 35u);
    EXPECT_TRUE(validate(t).passed());
    EXPECT_FALSE(is_regular(t));
    check_star_consistency(t);

    const Triangulation c44 = generate_cycle_join(4, 4);
    EXPECT_EQ(c44.num_tetrahedra(), 16u);
    EXPECT_TRUE(is_regular(c44));
    EXPECT_THROW(generate_cycle_join(2, 5), InputError);
}

TEST(Triangulation, SingleTetFailsFacePairing) {
    const Triangulation t(4, {{0, 1, 2, 3}});
    const ValidationReport r = validate(t);
    EXPECT_FALSE(r.passed());
    EXPECT_TRUE(has_rule(r, "face-pairing"));
    EXPECT_TRUE(has_rule(r, "euler-characteristic"));
}

TEST(Triangulation, DisconnectedAndDuplicate) {
    // Two disjoint 5-cells.
    const Triangulation five = generate_boundary_4simplex();
    std::vector<Tet> tets;
    for (const Tet& t : five.tetrahedra()) {
        tets.push_back(t);
        tets.push_back({t[0] + 5, t[1] + 5, t[2] + 5, t[3] + 5});
    }
    EXPECT_TRUE(has_rule(validate(Triangulation(10, tets)), "connectivity"));

    std::vector<Tet> dup(five.tetrahedra().begin(), five.tetrahedra().end());
    dup.push_back({3, 2, 1, 0});
    EXPECT_TRUE(has_rule(validate(Triangulation(5, dup)), "duplicate-tetrahedron"));
}

TEST(Triangulation, ConstructorRejectsBadIds) {
    EXPECT_THROW(Triangulation(4, {{0, 1, 2, 4}}), InputError);
    EXPECT_THROW(Triangulation(4, {{0, 0, 1, 2}}), InputError);
    EXPECT_THROW(Triangulation(4, {{-1, 0, 1, 2}}), InputError);
}

TEST(Loader, ParsesFiveCell) {
    const Triangulation t = load_triangulation(
        "# five cell\n"
        "vertices 5\n"
        "\n"
        "tet 0 1 2 3\n"
        "tet 0 1 2 4   \n"
        "tet 0 1 3 4\n"
        "  tet 0 2 3 4\n"
        "tet 1 2 3 4\n");
    EXPECT_EQ(t.num_edges(), 10u);
    EXPECT_EQ(t.num_faces(), 10u);
    EXPECT_TRUE(validate(t).passed());
}

TEST(Loader, RoundTrip) {
    const Triangulation t = generate_16cell();
    const Triangulation u = load_triangulation(format_triangulation(t));
    ASSERT_EQ(u.num_tetrahedra(), t.num_tetrahedra());
    for (std::size_t i = 0; i < t.num_tetrahedra(); ++i) EXPECT_EQ(u.tet(i), t.tet(i));
}

TEST(Loader, Errors) {
    auto expect_parse = [](const std::string& text, int line) {
        try {
            load_triangulation(text);
            ADD_FAILURE() << "no error for:\n" << text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), line) << e.what();
        }
    };
    expect_parse("vertices 4\ntet 0 0 1 2\n", 2);
    expect_parse("vertices 4\ntet 0 1 2 7\n", 2);
    expect_parse("vertices 4\ntet 0 1 2\n", 2);
    expect_parse("vertices 4\ntet 0 1 2 3 4\n", 2);
    expect_parse("tet 0 1 2 3\n", 1);
    expect_parse("vertices x\n", 1);
    expect_parse("vertices 5\ntet 0 1 2 3\ntet 3 2 1 0\n", 3);
    expect_parse("vertices 5\ntri 0 1 2\n", 2);
    expect_parse("", 1);
}

TEST(Loader, ErrorColumnPointsAtToken) {
    try {
        load_triangulation("vertices 4\ntet 0 1 2 9\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.column(), 11);
    }
}

TEST(Triangulation, EdgeIndexLookup) {
    const Triangulation t = generate_16cell();
    EXPECT_TRUE(t.edge_index(0, 2).has_value());
    EXPECT_TRUE(t.edge_index(2, 0).has_value());
    EXPECT_FALSE(t.edge_index(0, 1).has_value());
}
