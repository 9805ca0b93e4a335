#include "ncpdo/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ncpdo {

namespace {

static_assert(std::endian::native == std::endian::little, "dump format assumes a little-endian host");

constexpr char magic[4] = {'N', 'C', 'P', 'D'};
constexpr std::uint32_t version = 1;

template <class T>
void put(std::ostream& os, T v)
{
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is)
{
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is)
        throw DataError("dump: truncated header");
    return v;
}

} // namespace

void write_records(const std::string& path, const std::vector<DumpRecord>& recs)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw ConfigError("dump: cannot write " + path);
    for (const auto& r : recs) {
        os.write(magic, 4);
        put<std::uint32_t>(os, version);
        put<std::uint32_t>(os, static_cast<std::uint32_t>(r.grid.d));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(r.grid.n));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(r.grid.q));
        put<std::uint32_t>(os, static_cast<std::uint32_t>(r.view));
        put<std::uint64_t>(os, r.data.size());
        for (auto v : r.data) {
            put<double>(os, v.real());
            put<double>(os, v.imag());
        }
    }
}

std::vector<DumpRecord> read_records(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("dump: cannot open " + path);
    std::vector<DumpRecord> out;
    while (is.peek() != std::char_traits<char>::eof()) {
        char m[4];
        is.read(m, 4);
        if (!is || std::memcmp(m, magic, 4) != 0)
            throw DataError("dump: bad magic in " + path);
        if (get<std::uint32_t>(is) != version)
            throw DataError("dump: unsupported version");
        DumpRecord r;
        r.grid.d = static_cast<int>(get<std::uint32_t>(is));
        r.grid.n = static_cast<int>(get<std::uint32_t>(is));
        r.grid.q = static_cast<int>(get<std::uint32_t>(is));
        auto view = get<std::uint32_t>(is);
        if (view > 2)
            throw DataError("dump: unknown view tag");
        r.view = static_cast<DumpView>(view);
        r.grid.validate();
        auto count = get<std::uint64_t>(is);
        std::size_t expect = r.view == DumpView::symbol_table ? r.grid.points() * r.grid.values() : r.grid.values();
        if (count != expect)
            throw StructuralError("dump: payload size does not match header");
        r.data.resize(count);
        for (auto& v : r.data) {
            double re = get<double>(is), im = get<double>(is);
            v = {re, im};
        }
        out.push_back(std::move(r));
    }
    return out;
}

void write_function(const std::string& path, const OpValuedFunction& f, DumpView view)
{
    if (view == DumpView::symbol_table)
        throw ValidationError("dump: functions are written as samples or coeffs");
    write_records(path, {{f.grid(), view, view == DumpView::samples ? f.samples() : f.coeffs()}});
}

OpValuedFunction read_function(const std::string& path)
{
    auto recs = read_records(path);
    if (recs.size() != 1 || recs[0].view == DumpView::symbol_table)
        throw StructuralError("dump: expected a single function record in " + path);
    auto& r = recs[0];
    return r.view == DumpView::samples ? OpValuedFunction::from_samples(r.grid, std::move(r.data))
                                       : OpValuedFunction::from_coeffs(r.grid, std::move(r.data));
}

void write_symbol_dump(const std::string& path, const Symbol& s)
{
    auto d = s.to_dense();
    write_records(path, {{s.grid(), DumpView::symbol_table, d.table()}});
}

Symbol read_symbol_dump(const std::string& path)
{
    auto recs = read_records(path);
    if (recs.size() != 1 || recs[0].view != DumpView::symbol_table)
        throw StructuralError("dump: expected a single symbol table in " + path);
    return Symbol::dense(recs[0].grid, std::move(recs[0].data));
}

} // namespace ncpdo
