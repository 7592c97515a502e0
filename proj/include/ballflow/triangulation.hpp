#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ballflow/error.hpp"

namespace ballflow {

using Tet = std::array<int, 4>;
using Face = std::array<int, 3>;

struct Edge {
    int a = 0;  // a < b
    int b = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

// Local edge order used for per-tetrahedron edge arrays (lengths, dihedral
// angles, edge ids): (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
inline constexpr std::array<std::array<int, 2>, 6> kTetEdges = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

inline constexpr int local_edge_index(int p, int q) {
    if (p > q) std::swap(p, q);
    if (p == 0) return q - 1;
    if (p == 1) return q + 1;
    return 5;
}

/// Combinatorics of a triangulated closed 3-manifold.
///
/// Vertices are dense ids 0..N-1.  Tetrahedra keep the order in which they
/// were supplied; edges and faces are derived and sorted lexicographically.
/// The object is immutable once built, so concurrent readers need no
/// synchronisation.
class Triangulation {
public:
    /// Throws InputError for a vertex id out of range or a tetrahedron with a
    /// repeated vertex.  Manifold conditions are not checked here; see
    /// validate().
    Triangulation(int num_vertices, std::vector<Tet> tetrahedra);

    int num_vertices() const { return num_vertices_; }
    std::size_t num_edges() const { return edges_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    std::size_t num_tetrahedra() const { return tets_.size(); }

    std::span<const Tet> tetrahedra() const { return tets_; }
    const Tet& tet(std::size_t t) const { return tets_[t]; }
    std::span<const Edge> edges() const { return edges_; }
    std::span<const Face> faces() const { return faces_; }

    /// Indices of the tetrahedra incident to vertex v, ascending.
    std::span<const int> vertex_star(int v) const;
    /// Indices of the tetrahedra incident to edge e, ascending.
    std::span<const int> edge_star(std::size_t e) const;
    /// Number of tetrahedra incident to face f.
    int face_multiplicity(std::size_t f) const { return face_count_[f]; }

    int degree(int v) const { return static_cast<int>(vertex_star(v).size()); }
    std::vector<int> degrees() const;

    /// Edge ids of tetrahedron t in kTetEdges order.
    const std::array<int, 6>& tet_edge_ids(std::size_t t) const { return tet_edges_[t]; }

    std::optional<std::size_t> edge_index(int a, int b) const;

    long euler_characteristic() const;

private:
    int num_vertices_;
    std::vector<Tet> tets_;
    std::vector<Edge> edges_;
    std::vector<Face> faces_;
    std::vector<int> face_count_;
    std::vector<std::array<int, 6>> tet_edges_;
    // CSR incidence
    std::vector<int> vstar_offsets_, vstar_;
    std::vector<int> estar_offsets_, estar_;
};

struct Violation {
    std::string rule;  // face-pairing | euler-characteristic | connectivity | duplicate-tetrahedron
    std::string where;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool passed() const { return violations.empty(); }
};

/// Checks the closed pseudo-manifold conditions: every face in exactly two
/// tetrahedra, V - E + F - T = 0, connected 1-skeleton, no repeated
/// tetrahedron.  Vertex links are not checked.
ValidationReport validate(const Triangulation& t);

bool is_regular(const Triangulation& t);

/// Parses the text format:
///   vertices N
///   tet a b c d
///   ...
/// Lines whose first non-blank character is '#' are comments.  Throws
/// ParseError (with line/column) or InputError.
Triangulation load_triangulation(std::string_view text);
Triangulation load_triangulation_file(const std::string& path);

std::string format_triangulation(const Triangulation& t);

/// Boundary of the 4-simplex: 5 vertices, all 4-subsets as tetrahedra.
Triangulation generate_boundary_4simplex();

/// Boundary of the 4-dimensional cross-polytope.  Vertices 2k and 2k+1 form
/// the k-th antipodal pair; each tetrahedron takes one vertex from each pair.
Triangulation generate_16cell();

/// Join of an n-cycle and an m-cycle (n, m >= 3), a triangulation of S^3
/// with n*m tetrahedra.  Vertices 0..n-1 lie on the first cycle and have
/// degree 2m; vertices n..n+m-1 lie on the second and have degree 2n.
Triangulation generate_cycle_join(int n, int m);

}  // namespace ballflow
