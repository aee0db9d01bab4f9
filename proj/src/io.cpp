#include "capkit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace capkit {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

struct Reader {
    std::filesystem::path path;
    std::ifstream in;
    int line_no = 0;
    std::string line;

    explicit Reader(const std::filesystem::path& p) : path(p), in(p) {
        if (!in) throw ParseError(p.string() + ": cannot open file");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    }

    std::string& next_line() {
        if (!std::getline(in, line)) fail("unexpected end of file");
        ++line_no;
        return line;
    }
};

double parse_double_token(Reader& r, const std::string& tok, const char* what) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) r.fail(std::string("bad ") + what + " '" + tok + "'");
    return v;
}

long parse_int_token(Reader& r, const std::string& tok, const char* what) {
    long v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) r.fail(std::string("bad ") + what + " '" + tok + "'");
    return v;
}

RootCube read_header(Reader& r, const char* tag) {
    {
        std::string& l = r.next_line();
        if (l != std::string(tag) + " v1") r.fail(std::string("expected header '") + tag + " v1', got '" + l + "'");
    }
    int d = 0, n = 0;
    {
        std::istringstream ss(r.next_line());
        std::string td, tn;
        if (!(ss >> td >> tn) || td.rfind("d=", 0) != 0 || tn.rfind("n=", 0) != 0)
            r.fail("expected 'd=<int> n=<int>'");
        d = static_cast<int>(parse_int_token(r, td.substr(2), "dimension"));
        n = static_cast<int>(parse_int_token(r, tn.substr(2), "resolution"));
    }
    std::array<double, kMaxDim> origin{0.0, 0.0, 0.0};
    double side = 0.0;
    {
        std::istringstream ss(r.next_line());
        std::string tok;
        if (!(ss >> tok) || tok.rfind("origin=", 0) != 0) r.fail("expected 'origin=<d decimals> side=<decimal>'");
        if (d < 1 || d > kMaxDim) r.fail("dimension d=" + std::to_string(d) + " not supported (d must be 1, 2 or 3)");
        origin[0] = parse_double_token(r, tok.substr(7), "origin coordinate");
        for (int t = 1; t < d; ++t) {
            if (!(ss >> tok)) r.fail("origin needs d coordinates");
            origin[t] = parse_double_token(r, tok, "origin coordinate");
        }
        if (!(ss >> tok) || tok.rfind("side=", 0) != 0) r.fail("expected 'side=<decimal>' after origin");
        side = parse_double_token(r, tok.substr(5), "side");
    }
    try {
        return RootCube(d, origin, side, n);
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
}

// Reads exactly `count` whitespace-separated tokens; errors name the 1-based token index.
std::vector<std::string> read_tokens(Reader& r, std::size_t count) {
    std::vector<std::string> toks;
    toks.reserve(count);
    std::string tok;
    while (toks.size() < count) {
        if (!(r.in >> tok)) {
            r.line_no = -1;
            throw ParseError(r.path.string() + ": payload too short, expected " + std::to_string(count) +
                             " values, got " + std::to_string(toks.size()));
        }
        toks.push_back(tok);
    }
    if (r.in >> tok)
        throw ParseError(r.path.string() + ": payload too long, expected exactly " + std::to_string(count) +
                         " values");
    return toks;
}

void write_header(std::ofstream& out, const char* tag, const RootCube& root) {
    out << tag << " v1\n";
    out << "d=" << root.d << " n=" << root.n << "\n";
    out << "origin=";
    for (int t = 0; t < root.d; ++t) out << (t ? " " : "") << format_double(root.origin[t]);
    out << " side=" << format_double(root.side) << "\n";
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

template <class T>
void write_payload(std::ofstream& out, const std::vector<T>& vals, auto&& fmt) {
    constexpr std::size_t per_line = 8;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        out << fmt(vals[i]);
        out << ((i + 1) % per_line == 0 || i + 1 == vals.size() ? '\n' : ' ');
    }
}

}  // namespace

GridFunction read_grid(const std::filesystem::path& path) {
    Reader r(path);
    RootCube root = read_header(r, "dgf");
    auto toks = read_tokens(r, root.leaf_count());
    std::vector<double> vals(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
        vals[i] = parse_double_token(r, toks[i], "value");
        if (!std::isfinite(vals[i]))
            throw ParseError(path.string() + ": non-finite value at token " + std::to_string(i + 1));
    }
    return GridFunction(root, std::move(vals));
}

void write_grid(const std::filesystem::path& path, const GridFunction& f) {
    auto out = open_out(path);
    write_header(out, "dgf", f.root);
    write_payload(out, f.values, [](double v) { return format_double(v); });
}

DyadicSet read_set(const std::filesystem::path& path) {
    Reader r(path);
    RootCube root = read_header(r, "dst");
    auto toks = read_tokens(r, root.leaf_count());
    std::vector<std::uint8_t> mask(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i] == "0")
            mask[i] = 0;
        else if (toks[i] == "1")
            mask[i] = 1;
        else
            throw ParseError(path.string() + ": set token " + std::to_string(i + 1) + " must be 0 or 1, got '" +
                             toks[i] + "'");
    }
    return DyadicSet(root, std::move(mask));
}

void write_set(const std::filesystem::path& path, const DyadicSet& s) {
    auto out = open_out(path);
    write_header(out, "dst", s.root);
    write_payload(out, s.mask, [](std::uint8_t b) { return b ? "1" : "0"; });
}

DiscreteMeasure read_measure(const std::filesystem::path& path) {
    Reader r(path);
    RootCube root = read_header(r, "dms");
    auto toks = read_tokens(r, root.leaf_count());
    std::vector<double> masses(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
        masses[i] = parse_double_token(r, toks[i], "mass");
        if (!std::isfinite(masses[i]) || masses[i] < 0.0)
            throw ParseError(path.string() + ": mass at token " + std::to_string(i + 1) +
                             " must be nonnegative and finite");
    }
    return DiscreteMeasure(root, std::move(masses));
}

void write_measure(const std::filesystem::path& path, const DiscreteMeasure& m) {
    auto out = open_out(path);
    write_header(out, "dms", m.root);
    write_payload(out, m.masses, [](double v) { return format_double(v); });
}

}  // namespace capkit
