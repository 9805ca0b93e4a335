#pragma once

#include <string>
#include <vector>

#include "ncpdo/grid.hpp"
#include "ncpdo/symbol.hpp"

namespace ncpdo {

enum class DumpView : std::uint32_t { samples = 0, coeffs = 1, symbol_table = 2 };

struct DumpRecord {
    GridSpec grid;
    DumpView view = DumpView::samples;
    std::vector<cplx> data;
};

void write_records(const std::string& path, const std::vector<DumpRecord>& recs);
std::vector<DumpRecord> read_records(const std::string& path);

void write_function(const std::string& path, const OpValuedFunction& f, DumpView view = DumpView::samples);
OpValuedFunction read_function(const std::string& path);

void write_symbol_dump(const std::string& path, const Symbol& s);
Symbol read_symbol_dump(const std::string& path);

} // namespace ncpdo
