#include "phdae/lti_io.hpp"

#include "phdae/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

namespace phdae {

namespace {

using Shape = std::pair<Index, Index>;
using ShapeOf = std::function<std::map<std::string, Shape>(const std::vector<Index>&)>;

std::vector<std::string> tokens_of(const std::string& line) {
    const auto hash = line.find('#');
    std::istringstream is(hash == std::string::npos ? line : line.substr(0, hash));
    std::vector<std::string> out;
    for (std::string tok; is >> tok;) out.push_back(tok);
    return out;
}

bool parse_number(const std::string& tok, double& value) {
    const char* first = tok.data();
    const char* last = first + tok.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last && std::isfinite(value);
}

bool parse_dimension(const std::string& tok, Index& value) {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || v < 0) return false;
    value = static_cast<Index>(v);
    return true;
}

struct Parsed {
    std::vector<Index> dims;
    std::map<std::string, Mat> blocks;
};

Parsed parse_blocks(std::istream& in, std::size_t dim_count, const std::string& dims_usage, const ShapeOf& shape_of) {
    Parsed out;
    std::map<std::string, Shape> shapes;
    std::string line;
    int line_no = 0;

    std::string current;
    Mat* target = nullptr;
    Index filled = 0;

    const auto finish_block = [&](int at_line) {
        if (target && filled < target->size()) {
            std::ostringstream os;
            os << "too few entries: got " << filled << ", expected " << target->size();
            throw ParseError(at_line, current, os.str());
        }
        target = nullptr;
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto toks = tokens_of(line);
        if (toks.empty()) continue;

        if (out.dims.empty()) {
            if (toks[0] != "dims" || toks.size() != dim_count + 1) {
                throw ParseError(line_no, "", "expected header '" + dims_usage + "'");
            }
            for (std::size_t k = 1; k < toks.size(); ++k) {
                Index d = 0;
                if (!parse_dimension(toks[k], d)) throw ParseError(line_no, "", "invalid dimension '" + toks[k] + "'");
                out.dims.push_back(d);
            }
            shapes = shape_of(out.dims);
            continue;
        }

        std::size_t k = 0;
        if (!target || filled == target->size()) {
            finish_block(line_no);
            const std::string& name = toks[0];
            const auto it = shapes.find(name);
            if (it == shapes.end()) {
                double ignored = 0.0;
                if (parse_number(name, ignored)) {
                    throw ParseError(line_no, current, "too many entries");
                }
                throw ParseError(line_no, name, "unknown block '" + name + "'");
            }
            if (out.blocks.count(name)) throw ParseError(line_no, name, "duplicate block");
            if (toks.size() != 1) throw ParseError(line_no, name, "block name must be alone on its line");
            current = name;
            out.blocks[name] = Mat::Zero(it->second.first, it->second.second);
            target = &out.blocks[name];
            filled = 0;
            k = 1;
        }
        for (; k < toks.size(); ++k) {
            if (filled == target->size()) throw ParseError(line_no, current, "too many entries");
            double value = 0.0;
            if (!parse_number(toks[k], value)) {
                if (shapes.count(toks[k])) {
                    std::ostringstream os;
                    os << "too few entries: got " << filled << ", expected " << target->size();
                    throw ParseError(line_no, current, os.str());
                }
                throw ParseError(line_no, current, "non-numeric entry '" + toks[k] + "'");
            }
            const Index cols = target->cols();
            (*target)(filled / cols, filled % cols) = value;
            ++filled;
        }
    }
    if (out.dims.empty()) throw ParseError(line_no, "", "missing header '" + dims_usage + "'");
    finish_block(line_no);
    return out;
}

Mat block_or_zero(const Parsed& p, const std::string& name, Index rows, Index cols) {
    const auto it = p.blocks.find(name);
    return it == p.blocks.end() ? Mat::Zero(rows, cols) : it->second;
}

void write_block(std::ostream& out, const std::string& name, const Mat& m) {
    out << name << "\n";
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
        out << "\n";
    }
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

}  // namespace

LtiModel read_lti(std::istream& in) {
    const Parsed p = parse_blocks(in, 3, "dims n ell m", [](const std::vector<Index>& d) {
        const Index n = d[0], ell = d[1], m = d[2];
        return std::map<std::string, Shape>{
            {"E", {ell, n}}, {"J", {ell, ell}}, {"R", {ell, ell}}, {"B", {ell, m}},
            {"P", {ell, m}}, {"S", {m, m}},     {"N", {m, m}},     {"Z", {ell, n}},
            {"w", {ell, 1}}, {"Q", {n, n}},     {"v", {n, 1}},     {"c", {1, 1}}};
    });
    const Index n = p.dims[0], ell = p.dims[1], m = p.dims[2];
    LtiModel lti;
    lti.E = block_or_zero(p, "E", ell, n);
    lti.J = block_or_zero(p, "J", ell, ell);
    lti.R = block_or_zero(p, "R", ell, ell);
    lti.B = block_or_zero(p, "B", ell, m);
    lti.P = block_or_zero(p, "P", ell, m);
    lti.S = block_or_zero(p, "S", m, m);
    lti.N = block_or_zero(p, "N", m, m);
    lti.Z = block_or_zero(p, "Z", ell, n);
    lti.w = block_or_zero(p, "w", ell, 1);
    lti.Q = block_or_zero(p, "Q", n, n);
    lti.v = block_or_zero(p, "v", n, 1);
    lti.c = block_or_zero(p, "c", 1, 1)(0, 0);
    return lti;
}

LtiModel read_lti_file(const std::filesystem::path& path) {
    std::ifstream in = open(path);
    return read_lti(in);
}

void write_lti(std::ostream& out, const LtiModel& lti) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::setprecision(17);
    out << "dims " << lti.n() << " " << lti.ell() << " " << lti.m() << "\n";
    write_block(out, "E", lti.E);
    write_block(out, "J", lti.J);
    write_block(out, "R", lti.R);
    write_block(out, "B", lti.B);
    write_block(out, "P", lti.P);
    write_block(out, "S", lti.S);
    write_block(out, "N", lti.N);
    write_block(out, "Z", lti.Z);
    write_block(out, "w", lti.w);
    write_block(out, "Q", lti.Q);
    write_block(out, "v", lti.v);
    write_block(out, "c", Mat::Constant(1, 1, lti.c));
    out.flags(flags);
    out.precision(precision);
}

InterconnectionSpec read_interconnection(std::istream& in) {
    const Parsed p = parse_blocks(in, 2, "dims k m", [](const std::vector<Index>& d) {
        return std::map<std::string, Shape>{{"M_ic", {d[0], d[1]}}, {"N_ic", {d[0], d[1]}}};
    });
    return InterconnectionSpec{block_or_zero(p, "M_ic", p.dims[0], p.dims[1]),
                               block_or_zero(p, "N_ic", p.dims[0], p.dims[1])};
}

InterconnectionSpec read_interconnection_file(const std::filesystem::path& path) {
    std::ifstream in = open(path);
    return read_interconnection(in);
}

}  // namespace phdae
