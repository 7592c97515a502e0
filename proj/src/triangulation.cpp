#include "ballflow/triangulation.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

namespace ballflow {

namespace {

std::string describe(std::span<const int> ids) {
    std::string s = "{";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(ids[i]);
    }
    return s + "}";
}

// Builds CSR offsets/values from (key, value) pairs already grouped by key.
void build_csr(int num_keys, const std::vector<std::pair<int, int>>& pairs, std::vector<int>& offsets,
               std::vector<int>& values) {
    offsets.assign(num_keys + 1, 0);
    for (const auto& [k, v] : pairs) ++offsets[k + 1];
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    values.assign(pairs.size(), 0);
    std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
    for (const auto& [k, v] : pairs) values[cursor[k]++] = v;
}

}  // namespace

Triangulation::Triangulation(int num_vertices, std::vector<Tet> tetrahedra)
    : num_vertices_(num_vertices), tets_(std::move(tetrahedra)) {
    if (num_vertices_ <= 0) throw InputError("vertex count must be positive");
    for (std::size_t t = 0; t < tets_.size(); ++t) {
        const Tet& tt = tets_[t];
        for (int v : tt) {
            if (v < 0 || v >= num_vertices_)
                throw InputError("tetrahedron " + std::to_string(t) + " " + describe(tt) + ": vertex id " +
                                 std::to_string(v) + " out of range [0, " + std::to_string(num_vertices_) + ")");
        }
        Tet sorted = tt;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw InputError("tetrahedron " + std::to_string(t) + " " + describe(tt) + ": repeated vertex");
    }

    // Edges and faces, sorted lexicographically.
    std::map<std::pair<int, int>, int> edge_ids;
    std::map<Face, int> face_counts;
    for (const Tet& tt : tets_) {
        for (const auto& [p, q] : kTetEdges) {
            int a = std::min(tt[p], tt[q]), b = std::max(tt[p], tt[q]);
            edge_ids.emplace(std::make_pair(a, b), 0);
        }
        for (int skip = 0; skip < 4; ++skip) {
            Face f{};
            int k = 0;
            for (int p = 0; p < 4; ++p)
                if (p != skip) f[k++] = tt[p];
            std::sort(f.begin(), f.end());
            ++face_counts[f];
        }
    }
    int next = 0;
    for (auto& [key, id] : edge_ids) {
        id = next++;
        edges_.push_back({key.first, key.second});
    }
    for (const auto& [f, c] : face_counts) {
        faces_.push_back(f);
        face_count_.push_back(c);
    }

    std::vector<std::pair<int, int>> vpairs, epairs;
    tet_edges_.resize(tets_.size());
    for (std::size_t t = 0; t < tets_.size(); ++t) {
        const Tet& tt = tets_[t];
        for (int v : tt) vpairs.emplace_back(v, static_cast<int>(t));
        for (int e = 0; e < 6; ++e) {
            int a = tt[kTetEdges[e][0]], b = tt[kTetEdges[e][1]];
            int id = edge_ids.at({std::min(a, b), std::max(a, b)});
            tet_edges_[t][e] = id;
            epairs.emplace_back(id, static_cast<int>(t));
        }
    }
    build_csr(num_vertices_, vpairs, vstar_offsets_, vstar_);
    build_csr(static_cast<int>(edges_.size()), epairs, estar_offsets_, estar_);
}

std::span<const int> Triangulation::vertex_star(int v) const {
    return std::span<const int>(vstar_).subspan(vstar_offsets_[v], vstar_offsets_[v + 1] - vstar_offsets_[v]);
}

std::span<const int> Triangulation::edge_star(std::size_t e) const {
    return std::span<const int>(estar_).subspan(estar_offsets_[e], estar_offsets_[e + 1] - estar_offsets_[e]);
}

std::vector<int> Triangulation::degrees() const {
    std::vector<int> d(num_vertices_);
    for (int v = 0; v < num_vertices_; ++v) d[v] = degree(v);
    return d;
}

std::optional<std::size_t> Triangulation::edge_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{a, b}, [](const Edge& x, const Edge& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    if (it == edges_.end() || !(*it == Edge{a, b})) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
}

long Triangulation::euler_characteristic() const {
    return static_cast<long>(num_vertices_) - static_cast<long>(edges_.size()) + static_cast<long>(faces_.size()) -
           static_cast<long>(tets_.size());
}

ValidationReport validate(const Triangulation& t) {
    ValidationReport report;

    for (std::size_t f = 0; f < t.num_faces(); ++f) {
        if (t.face_multiplicity(f) != 2) {
            report.violations.push_back({"face-pairing", "face " + describe(t.faces()[f]) + " lies in " +
                                                             std::to_string(t.face_multiplicity(f)) +
                                                             " tetrahedra"});
        }
    }

    if (long chi = t.euler_characteristic(); chi != 0) {
        report.violations.push_back(
            {"euler-characteristic",
             "V-E+F-T = " + std::to_string(t.num_vertices()) + "-" + std::to_string(t.num_edges()) + "+" +
                 std::to_string(t.num_faces()) + "-" + std::to_string(t.num_tetrahedra()) + " = " +
                 std::to_string(chi)});
    }

    // Connectivity of the 1-skeleton (union-find).
    std::vector<int> parent(t.num_vertices());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : t.edges()) parent[find(e.a)] = find(e.b);
    std::set<int> roots;
    for (int v = 0; v < t.num_vertices(); ++v) roots.insert(find(v));
    if (roots.size() > 1) {
        std::vector<int> unreached;
        int root0 = find(0);
        for (int v = 0; v < t.num_vertices(); ++v)
            if (find(v) != root0) unreached.push_back(v);
        report.violations.push_back(
            {"connectivity", std::to_string(roots.size()) + " components; not connected to vertex 0: " +
                                 describe(unreached)});
    }

    std::map<Tet, std::size_t> seen;
    for (std::size_t i = 0; i < t.num_tetrahedra(); ++i) {
        Tet s = t.tet(i);
        std::sort(s.begin(), s.end());
        auto [it, inserted] = seen.emplace(s, i);
        if (!inserted) {
            report.violations.push_back({"duplicate-tetrahedron", "tetrahedra " + std::to_string(it->second) +
                                                                      " and " + std::to_string(i) + " are both " +
                                                                      describe(s)});
        }
    }
    return report;
}

bool is_regular(const Triangulation& t) {
    const int d0 = t.degree(0);
    for (int v = 1; v < t.num_vertices(); ++v)
        if (t.degree(v) != d0) return false;
    return true;
}

namespace {

struct Token {
    std::string_view text;
    int column;  // 1-based
};

std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        if (i >= line.size() || line[i] == '#') break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r' && line[j] != '#') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

long parse_int(const Token& tok, int line) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), value);
    if (ec != std::errc() || ptr != tok.text.data() + tok.text.size())
        throw ParseError(line, tok.column, "expected an integer, got '" + std::string(tok.text) + "'");
    return value;
}

}  // namespace

Triangulation load_triangulation(std::string_view text) {
    std::optional<int> num_vertices;
    std::vector<Tet> tets;
    std::vector<int> tet_lines;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;

        auto toks = tokenize(line);
        if (toks.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (!num_vertices) {
            if (toks[0].text != "vertices")
                throw ParseError(line_no, toks[0].column, "expected 'vertices N' header");
            if (toks.size() != 2) throw ParseError(line_no, toks[0].column, "'vertices' takes exactly one count");
            long n = parse_int(toks[1], line_no);
            if (n <= 0 || n > 100'000'000) throw ParseError(line_no, toks[1].column, "vertex count must be positive");
            num_vertices = static_cast<int>(n);
        } else {
            if (toks[0].text != "tet")
                throw ParseError(line_no, toks[0].column, "unknown record '" + std::string(toks[0].text) + "'");
            if (toks.size() != 5) throw ParseError(line_no, toks[0].column, "'tet' takes exactly four vertex ids");
            Tet tt{};
            for (int k = 0; k < 4; ++k) {
                long v = parse_int(toks[k + 1], line_no);
                if (v < 0 || v >= *num_vertices)
                    throw ParseError(line_no, toks[k + 1].column,
                                     "vertex id " + std::to_string(v) + " out of range [0, " +
                                         std::to_string(*num_vertices) + ")");
                tt[k] = static_cast<int>(v);
            }
            for (int a = 0; a < 4; ++a)
                for (int b = a + 1; b < 4; ++b)
                    if (tt[a] == tt[b])
                        throw ParseError(line_no, toks[b + 1].column,
                                         "tetrahedron has repeated vertex " + std::to_string(tt[a]));
            tets.push_back(tt);
            tet_lines.push_back(line_no);
        }
        if (end == text.size()) break;
    }
    if (!num_vertices) throw ParseError(std::max(line_no, 1), 1, "missing 'vertices N' header");

    std::map<Tet, std::size_t> seen;
    for (std::size_t i = 0; i < tets.size(); ++i) {
        Tet s = tets[i];
        std::sort(s.begin(), s.end());
        if (auto [it, ok] = seen.emplace(s, i); !ok)
            throw ParseError(tet_lines[i], 1,
                             "duplicate tetrahedron (same vertex set as line " +
                                 std::to_string(tet_lines[it->second]) + ")");
    }
    return Triangulation(*num_vertices, std::move(tets));
}

Triangulation load_triangulation_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open triangulation file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_triangulation(ss.str());
}

std::string format_triangulation(const Triangulation& t) {
    std::ostringstream os;
    os << "vertices " << t.num_vertices() << '\n';
    for (const Tet& tt : t.tetrahedra()) os << "tet " << tt[0] << ' ' << tt[1] << ' ' << tt[2] << ' ' << tt[3] << '\n';
    return os.str();
}

Triangulation generate_boundary_4simplex() {
    std::vector<Tet> tets;
    for (int skip = 4; skip >= 0; --skip) {
        Tet tt{};
        int k = 0;
        for (int v = 0; v < 5; ++v)
            if (v != skip) tt[k++] = v;
        tets.push_back(tt);
    }
    return Triangulation(5, std::move(tets));
}

Triangulation generate_16cell() {
    std::vector<Tet> tets;
    for (int mask = 0; mask < 16; ++mask) {
        Tet tt{};
        for (int k = 0; k < 4; ++k) tt[k] = 2 * k + ((mask >> k) & 1);
        tets.push_back(tt);
    }
    return Triangulation(8, std::move(tets));
}

Triangulation generate_cycle_join(int n, int m) {
    if (n < 3 || m < 3) throw InputError("cycle join needs both cycle lengths >= 3");
    std::vector<Tet> tets;
    tets.reserve(static_cast<std::size_t>(n) * m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) tets.push_back({i, (i + 1) % n, n + j, n + (j + 1) % m});
    return Triangulation(n + m, std::move(tets));
}

}  // namespace ballflow
