#ifndef HGM_REPORT_HPP
#define HGM_REPORT_HPP

#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "hgm/steppers.hpp"

namespace hgm {

// Smallest table node whose relative error against the oracle exceeds the
// threshold; +infinity when the table never fails. Oracle zeros are skipped.
template <class R>
double failure_onset(const SolutionTable<R>& table, const std::function<R(const R&)>& oracle,
                     double threshold = 0.3, std::string* note = nullptr) {
    long skipped = 0;
    for (std::size_t i = 0; i < table.states.size(); ++i) {
        R t = table.grid.node(static_cast<long>(i));
        R ref = oracle(t);
        if (ref == R(0)) {
            ++skipped;
            continue;
        }
        R rel = abs((table.states[i][0] - ref) / ref);
        if (rel > scalar<R>::from_double(threshold)) return to_double(t);
    }
    if (note && skipped > 0) *note = std::to_string(skipped) + " oracle zeros skipped";
    return std::numeric_limits<double>::infinity();
}

struct CsvOptions {
    std::vector<std::string> meta;  // emitted as '# key: value' lines
    bool reference_column = false;
};

template <class R>
void write_csv(const std::string& path, const SolutionTable<R>& table,
               const std::function<R(const R&)>* oracle, const CsvOptions& opts) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open output file " + path);
    for (const auto& m : opts.meta) out << "# " << m << "\n";
    out << "t";
    const int dim = table.states.empty() ? 0 : static_cast<int>(table.states[0].size());
    for (int j = 0; j < dim; ++j) {
        out << ",f";
        for (int q = 0; q < j; ++q) out << "'";
    }
    if (oracle) out << ",reference,rel_error";
    out << "\n";
    for (std::size_t i = 0; i < table.states.size(); ++i) {
        R t = table.grid.node(static_cast<long>(i));
        out << format_shortest(t);
        for (int j = 0; j < dim; ++j) out << "," << format_shortest(table.states[i][j]);
        if (oracle) {
            R ref = (*oracle)(t);
            out << "," << format_shortest(ref);
            if (ref == R(0))
                out << ",nan";
            else
                out << "," << format_shortest(to_double(abs((table.states[i][0] - ref) / ref)));
        }
        out << "\n";
    }
}

}  // namespace hgm

#endif
