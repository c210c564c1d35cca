#include "scatter/io.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace scatter {

namespace {

[[noreturn]] void fail(const std::string& origin, const YAML::Node& node, const std::string& msg)
{
    std::ostringstream os;
    os << origin;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": " << msg;
    throw Error(ErrorCode::ConfigError, os.str());
}

std::string slurp(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

YAML::Node load(const std::string& text, const std::string& origin)
{
    try {
        YAML::Node root = YAML::Load(text);
        if (!root.IsMap()) fail(origin, root, "expected a mapping at the top level");
        return root;
    } catch (const YAML::Exception& e) {
        std::ostringstream os;
        os << origin << ":" << e.mark.line + 1 << ": " << e.msg;
        throw Error(ErrorCode::ConfigError, os.str());
    }
}

double number(const YAML::Node& node, const std::string& origin, const std::string& what)
{
    if (!node.IsScalar()) fail(origin, node, what + ": expected a number");
    try {
        return node.as<double>();
    } catch (const YAML::Exception&) {
        fail(origin, node, what + ": '" + node.Scalar() + "' is not a number");
    }
}

int integer(const YAML::Node& node, const std::string& origin, const std::string& what)
{
    double v = number(node, origin, what);
    if (v != std::floor(v) || v < 1 || v > 1e6) fail(origin, node, what + ": expected a positive integer");
    return int(v);
}

bool is_pair(const YAML::Node& node) { return node.IsSequence() && node.size() == 2 && node[0].IsScalar() && node[1].IsScalar(); }

cplx entry(const YAML::Node& node, const std::string& origin, const std::string& what)
{
    if (is_pair(node)) return {number(node[0], origin, what), number(node[1], origin, what)};
    return number(node, origin, what);
}

Mat matrix(const YAML::Node& node, int n, const std::string& origin, const std::string& what)
{
    Mat m(n, n);
    if (node.IsScalar()) {
        if (n != 1) fail(origin, node, what + ": a bare number needs n = 1");
        m(0, 0) = number(node, origin, what);
        return m;
    }
    if (!node.IsSequence()) fail(origin, node, what + ": expected a matrix");
    if (n == 1 && is_pair(node)) {
        m(0, 0) = entry(node, origin, what);
        return m;
    }
    // flat row-major pairs; n * n differs from n once n > 1, and a single row [[re, im]] is not a row for n = 1
    bool flat = int(node.size()) == n * n;
    for (const auto& e : node) flat = flat && is_pair(e);
    if (flat) {
        for (int i = 0; i < n * n; ++i) m(i / n, i % n) = entry(node[i], origin, what);
        return m;
    }
    if (int(node.size()) != n) fail(origin, node, what + ": expected " + std::to_string(n) + " rows");
    for (int i = 0; i < n; ++i) {
        const YAML::Node row = node[i];
        if (!row.IsSequence() || int(row.size()) != n)
            fail(origin, row, what + ": row " + std::to_string(i + 1) + " needs " + std::to_string(n) + " entries");
        for (int j = 0; j < n; ++j) m(i, j) = entry(row[j], origin, what);
    }
    return m;
}

Mat block(const YAML::Node& node, int rows, int cols, const std::string& origin, const std::string& what)
{
    if (!node.IsSequence() || int(node.size()) != rows) fail(origin, node, what + ": expected " + std::to_string(rows) + " rows");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        const YAML::Node row = node[i];
        if (!row.IsSequence() || int(row.size()) != cols)
            fail(origin, row, what + ": row " + std::to_string(i + 1) + " needs " + std::to_string(cols) + " entries");
        for (int j = 0; j < cols; ++j) m(i, j) = entry(row[j], origin, what);
    }
    return m;
}

YAML::Node need(const YAML::Node& parent, const char* key, const std::string& origin)
{
    YAML::Node v = parent[key];
    if (!v) fail(origin, parent, std::string("missing field '") + key + "'");
    return v;
}

PotentialSpec potential_from(const YAML::Node& node, const std::string& origin, bool half_line, int n_hint = 0)
{
    if (!node.IsMap()) fail(origin, node, "potential: expected a mapping");
    PotentialSpec V;
    V.n = node["n"] ? integer(node["n"], origin, "n") : n_hint;
    if (V.n < 1) fail(origin, node, "missing field 'n'");
    if (n_hint && V.n != n_hint) fail(origin, node["n"], "potential n differs from the problem n");
    if (YAML::Node cells = node["cells"]) {
        if (!cells.IsSequence()) fail(origin, cells, "cells: expected a list");
        for (const auto& c : cells) {
            if (!c.IsMap()) fail(origin, c, "cell: expected {a, b, matrix}");
            Cell cell{number(need(c, "a", origin), origin, "a"), number(need(c, "b", origin), origin, "b"),
                      matrix(need(c, "matrix", origin), V.n, origin, "matrix")};
            if (!(cell.b > cell.a)) fail(origin, c, "cell needs a < b");
            if ((cell.v - cell.v.adjoint()).norm() > 1e-10) fail(origin, c["matrix"], "matrix is not Hermitian");
            V.cells.push_back(cell);
        }
    }
    try {
        validate_potential(V, half_line);
    } catch (const Error& e) {
        fail(origin, node, e.what());
    }
    return V;
}

BoundaryPair boundary_from(const YAML::Node& node, const std::string& origin)
{
    if (!node.IsMap()) fail(origin, node, "boundary: expected a mapping");
    BoundaryPair bp;
    if (YAML::Node r = node["robin"]) {
        if (r.IsScalar()) bp = robin(number(r, origin, "robin"));
        else {
            if (!r.IsSequence() || r.size() == 0) fail(origin, r, "robin: expected an angle or a list of angles");
            RVec th(r.size());
            for (size_t i = 0; i < r.size(); ++i) th[i] = number(r[i], origin, "robin");
            bp = robin(th);
        }
    } else if (YAML::Node nn = node["neumann"]) {
        bp = neumann(integer(nn, origin, "neumann"));
    } else if (YAML::Node d = node["dirichlet"]) {
        bp = dirichlet(integer(d, origin, "dirichlet"));
    } else if (YAML::Node l = node["delta"]) {
        int n = node["n"] ? integer(node["n"], origin, "n") : (l.IsScalar() || is_pair(l) ? 1 : int(l.size()));
        bp = line_interaction_matrices(matrix(l, n, origin, "delta"));
    } else {
        int n = integer(need(node, "n", origin), origin, "n");
        bp.A = matrix(need(node, "A", origin), n, origin, "A");
        bp.B = matrix(need(node, "B", origin), n, origin, "B");
    }
    try {
        validate_boundary(bp);
    } catch (const Error& e) {
        fail(origin, node, e.what());
    }
    return bp;
}

LineProblem line_from(const YAML::Node& node, const std::string& origin)
{
    if (!node.IsMap()) fail(origin, node, "line problem: expected a mapping");
    int n = integer(need(node, "n", origin), origin, "n");
    PotentialSpec V = node["potential"] ? potential_from(node["potential"], origin, false, n) : zero_potential(n);
    YAML::Node in = need(node, "interaction", origin);
    if (!in.IsMap()) fail(origin, in, "interaction: expected {delta: ...} or {general: ...}");
    try {
        if (YAML::Node d = in["delta"]) return delta_problem(V, matrix(d, n, origin, "delta"));
        if (YAML::Node g = in["general"]) {
            auto b = [&](const char* k) { return block(need(g, k, origin), n, 2 * n, origin, k); };
            return transmission_problem(V, b("A1"), b("A2"), b("B1"), b("B2"));
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail(origin, in, e.what());
    }
    fail(origin, in, "interaction: expected 'delta' or 'general'");
}

// inline mapping or a path relative to the config
YAML::Node resolve(const YAML::Node& node, const std::filesystem::path& base, std::string& origin)
{
    if (node.IsScalar()) {
        auto p = base / node.Scalar();
        origin = p.string();
        return load(slurp(p), origin);
    }
    return node;
}

}  // namespace

PotentialSpec parse_potential(const std::string& text, const std::string& origin, bool half_line)
{
    return potential_from(load(text, origin), origin, half_line);
}

BoundaryPair parse_boundary(const std::string& text, const std::string& origin)
{
    return boundary_from(load(text, origin), origin);
}

LineProblem parse_line_problem(const std::string& text, const std::string& origin)
{
    return line_from(load(text, origin), origin);
}

PotentialSpec read_potential(const std::filesystem::path& file, bool half_line)
{
    return parse_potential(slurp(file), file.string(), half_line);
}

BoundaryPair read_boundary(const std::filesystem::path& file) { return parse_boundary(slurp(file), file.string()); }

LineProblem read_line_problem(const std::filesystem::path& file) { return parse_line_problem(slurp(file), file.string()); }

ScenarioConfig read_config(const std::filesystem::path& file)
{
    const std::string origin = file.string();
    YAML::Node root = load(slurp(file), origin);
    const auto base = file.parent_path();
    ScenarioConfig c;
    if (YAML::Node p = root["potential"]) {
        std::string o = origin;
        c.potential = potential_from(resolve(p, base, o), o, true);
    }
    if (YAML::Node b = root["boundary"]) {
        std::string o = origin;
        c.boundary = boundary_from(resolve(b, base, o), o);
    }
    if (YAML::Node l = root["line"]) {
        std::string o = origin;
        c.line = line_from(resolve(l, base, o), o);
    }
    if (!c.line && !(c.potential && c.boundary)) fail(origin, root, "need 'potential' and 'boundary', or 'line'");
    if (c.potential && c.boundary && c.potential->n != c.boundary->n())
        fail(origin, root["boundary"], "boundary size differs from the potential size");

    if (YAML::Node g = root["grid"]) {
        if (!g.IsMap()) fail(origin, g, "grid: expected a mapping");
        if (g["kmax"]) c.grid.kmax = number(g["kmax"], origin, "kmax");
        if (g["nk"]) c.grid.nk = integer(g["nk"], origin, "nk");
        if (g["dx"]) c.grid.dx = number(g["dx"], origin, "dx");
        if (g["xmax"]) c.grid.xmax = number(g["xmax"], origin, "xmax");
        if (!(c.grid.kmax > 0) || !(c.grid.dx > 0) || !(c.grid.xmax > 0) || c.grid.nk % 2)
            fail(origin, g, "grid: kmax, dx, xmax must be positive and nk even");
        try {
            check_grid(KGrid(c.grid.kmax, c.grid.nk), c.grid.dx);
        } catch (const Error& e) {
            fail(origin, g, e.what());
        }
    }
    if (YAML::Node t = root["tolerances"]) {
        if (!t.IsMap()) fail(origin, t, "tolerances: expected a mapping");
        auto get = [&](const char* k, double& dst) {
            if (t[k]) {
                dst = number(t[k], origin, k);
                if (!(dst > 0)) fail(origin, t[k], std::string(k) + ": must be positive");
            }
        };
        get("hypothesis", c.tol.hypothesis);
        get("unitarity", c.tol.unitarity);
        get("agreement", c.tol.agreement);
    }
    if (YAML::Node o = root["output"]) c.output = base / o.as<std::string>();
    return c;
}

Field read_field_csv(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
    const std::string origin = file.string();
    auto bad = [&](int line, const std::string& msg) {
        throw Error(ErrorCode::ConfigError, origin + ":" + std::to_string(line) + ": " + msg);
    };
    std::string line;
    if (!std::getline(in, line)) bad(1, "empty file");
    int cols = 1;
    for (char ch : line) cols += ch == ',';
    if (cols < 3 || cols % 2 == 0 || line.rfind("x", 0) != 0) bad(1, "header must be x,re_1,im_1,...");
    const int n = (cols - 1) / 2;
    std::vector<double> xs;
    std::vector<std::vector<cplx>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            double v;
            auto b = tok.data(), e = tok.data() + tok.size();
            while (b < e && *b == ' ') ++b;
            auto r = std::from_chars(b, e, v);
            if (r.ec != std::errc()) bad(lineno, "'" + tok + "' is not a number");
            vals.push_back(v);
        }
        if (int(vals.size()) != cols) bad(lineno, "expected " + std::to_string(cols) + " columns");
        xs.push_back(vals[0]);
        std::vector<cplx> r(n);
        for (int c = 0; c < n; ++c) r[c] = {vals[1 + 2 * c], vals[2 + 2 * c]};
        rows.push_back(r);
    }
    if (xs.size() < 3) bad(lineno, "need at least three rows");
    const double dx = (xs.back() - xs.front()) / double(xs.size() - 1);
    // gaps against the first one, so the error lands on the row that breaks the spacing
    const double gap = xs[1] - xs[0];
    if (!(gap > 0)) bad(3, "x must increase");
    for (size_t r = 2; r < xs.size(); ++r)
        if (std::abs(xs[r] - xs[r - 1] - gap) > 1e-9 * std::max(1.0, std::abs(xs[r])))
            bad(int(r) + 2, "x must be uniformly spaced");
    Field f;
    if (std::abs(xs.front()) < 1e-12 * dx) {
        f = Field::half(dx, int(xs.size()) - 1, n);
    } else {
        if (std::abs(xs.front() + xs.back()) > 1e-9 * dx || xs.size() % 2 == 0)
            bad(2, "x must start at 0 or be symmetric about 0");
        f = Field::line(dx, int(xs.size() - 1) / 2, n);
    }
    for (size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c < n; ++c) f.v(r, c) = rows[r][c];
    return f;
}

std::string format_number(double v)
{
    if (v == 0.0) return "0";
    char buf[40];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_field_csv(std::ostream& os, const Field& f)
{
    os << "x";
    for (int c = 1; c <= f.n(); ++c) os << ",re_" << c << ",im_" << c;
    os << "\n";
    for (int r = 0; r < f.nodes(); ++r) {
        os << format_number(f.x(r));
        for (int c = 0; c < f.n(); ++c) os << "," << format_number(f.v(r, c).real()) << "," << format_number(f.v(r, c).imag());
        os << "\n";
    }
}

void write_series_csv(std::ostream& os, const std::string& var, const std::vector<double>& at, const MatSeries& s,
                      const std::string& name)
{
    write_series_csv(os, var, at, {NamedSeries{name, &s}});
}

void write_series_csv(std::ostream& os, const std::string& var, const std::vector<double>& at,
                      const std::vector<NamedSeries>& all)
{
    if (at.empty() || all.empty()) throw Error(ErrorCode::IoError, "nothing to write");
    for (const auto& ns : all)
        if (!ns.series || Eigen::Index(at.size()) != ns.series->size())
            throw Error(ErrorCode::IoError, "series '" + ns.name + "' does not match its abscissae");
    os << var;
    for (const auto& ns : all) {
        const int n = ns.series->n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                std::string tag = n == 1 ? ns.name : ns.name + std::to_string(i + 1) + std::to_string(j + 1);
                os << ",re_" << tag << ",im_" << tag;
            }
    }
    os << "\n";
    for (size_t q = 0; q < at.size(); ++q) {
        os << format_number(at[q]);
        for (const auto& ns : all) {
            auto b = (*ns.series)[q];
            for (int i = 0; i < ns.series->n; ++i)
                for (int j = 0; j < ns.series->n; ++j)
                    os << "," << format_number(b(i, j).real()) << "," << format_number(b(i, j).imag());
        }
        os << "\n";
    }
}

void write_kernel_csv(std::ostream& os, const KernelTable& K, int stride)
{
    if (K.nx == 0 || K.ny == 0) throw Error(ErrorCode::IoError, "empty kernel table");
    stride = std::max(1, stride);
    os << "x,y";
    for (int i = 1; i <= K.n; ++i)
        for (int j = 1; j <= K.n; ++j) os << ",re_" << i << j << ",im_" << i << j;
    os << "\n";
    for (int a = 0; a < K.nx; a += stride)
        for (int l = a; l < K.ny; l += stride) {
            os << format_number(K.x(a)) << "," << format_number(K.y(l));
            auto b = K.at(a, l);
            for (int i = 0; i < K.n; ++i)
                for (int j = 0; j < K.n; ++j) os << "," << format_number(b(i, j).real()) << "," << format_number(b(i, j).imag());
            os << "\n";
        }
}

std::ofstream open_output(const std::filesystem::path& file)
{
    if (file.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
    return out;
}

}  // namespace scatter
