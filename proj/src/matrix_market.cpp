#include "spgemm/matrix_market.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace spgemm {

namespace {

bool is_blank(const std::string& s)
{
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            return false;
    return true;
}

long long parse_ll(const char*& p, long line, const char* what)
{
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(p, &end, 10);
    if (end == p || errno == ERANGE)
        throw ParseError(std::string("expected ") + what, line);
    p = end;
    return v;
}

double parse_double(const char*& p, long line)
{
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p)
        throw ParseError("expected a numeric value", line);
    p = end;
    return v;
}

} // namespace

CsrMatrix read_matrix_market(const std::string& path, MatrixMarketInfo* info)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "' for reading");

    std::string linebuf;
    long line = 0;

    if (!std::getline(in, linebuf))
        throw ParseError("missing MatrixMarket header", 1);
    ++line;

    std::istringstream hdr(linebuf);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix")
        throw ParseError("not a MatrixMarket matrix header", line);
    if (format != "coordinate")
        throw ParseError("only coordinate format is supported", line);
    const bool pattern = field == "pattern";
    if (!pattern && field != "real" && field != "integer")
        throw ParseError("unsupported field '" + field + "'", line);
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general")
        throw ParseError("unsupported symmetry '" + symmetry + "'", line);

    // size line, after any comments
    long long rows = 0, cols = 0, entries = 0;
    for (;;) {
        if (!std::getline(in, linebuf))
            throw ParseError("missing size line", line + 1);
        ++line;
        if (!linebuf.empty() && linebuf[0] == '%')
            continue;
        if (is_blank(linebuf))
            continue;
        const char* p = linebuf.c_str();
        rows = parse_ll(p, line, "row count");
        cols = parse_ll(p, line, "column count");
        entries = parse_ll(p, line, "entry count");
        break;
    }
    if (rows < 0 || cols < 0 || entries < 0)
        throw ParseError("negative size field", line);
    const long long index_max = std::numeric_limits<index_t>::max();
    if (rows > index_max || cols > index_max || entries > index_max)
        throw ParseError("size exceeds 32-bit index range", line);

    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(symmetric ? 2 * entries : entries));

    long long seen = 0;
    while (seen < entries) {
        if (!std::getline(in, linebuf))
            throw ParseError("unexpected end of file: "
                                 + std::to_string(entries - seen) + " entries missing",
                             line + 1);
        ++line;
        if ((!linebuf.empty() && linebuf[0] == '%') || is_blank(linebuf))
            continue;
        const char* p = linebuf.c_str();
        const long long r = parse_ll(p, line, "row index");
        const long long c = parse_ll(p, line, "column index");
        if (r < 1 || r > rows || c < 1 || c > cols)
            throw ParseError("index out of range", line);
        const double v = pattern ? 1.0 : parse_double(p, line);
        const index_t ri = static_cast<index_t>(r - 1);
        const index_t ci = static_cast<index_t>(c - 1);
        triplets.push_back({ri, ci, v});
        if (symmetric && ri != ci)
            triplets.push_back({ci, ri, v});
        ++seen;
    }

    CsrMatrix m = build_csr(static_cast<index_t>(rows), static_cast<index_t>(cols), triplets);
    if (info) {
        info->field = field;
        info->symmetry = symmetry;
        info->declared_entries = entries;
        info->expanded_symmetric = symmetric;
        info->coalesced_duplicates = m.nnz() < static_cast<offset_t>(triplets.size());
    }
    return m;
}

void write_matrix_market(const CsrMatrix& m, const std::string& path)
{
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw IoError("cannot open '" + path + "' for writing");

    std::fprintf(f, "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(f, "%d %d %lld\n", m.num_rows, m.num_cols, static_cast<long long>(m.nnz()));
    for (index_t i = 0; i < m.num_rows; ++i)
        for (offset_t p = m.row_begin(i); p < m.row_end(i); ++p)
            std::fprintf(f, "%d %d %.17g\n", i + 1, m.col_indices[p] + 1, m.values[p]);

    if (std::fclose(f) != 0)
        throw IoError("write to '" + path + "' failed");
}

} // namespace spgemm
