#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qtsim/state.hpp"

namespace qtsim::cli {

// 12 significant digits: tight enough that 1e-10 deviations are visible,
// stable enough to reproduce byte-for-byte.
inline std::string fmt_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string fmt_complex(const cplx& a) {
    std::string out = fmt_g(a.real());
    if (a.imag() >= 0.0) out += "+";
    out += fmt_g(a.imag()) + "i";
    return out;
}

// One emitted record: ordered, preformatted key=value fields. Every record
// of a run carries the same keys in the same order.
struct RunRecord {
    std::vector<std::pair<std::string, std::string>> fields;
};

struct RunOutput {
    std::vector<std::pair<std::string, std::string>> header;  // config echo
    std::vector<RunRecord> records;                           // trial order
    std::vector<std::pair<std::string, std::string>> summary;
};

namespace detail {

inline void emit_pairs(
    std::ostream& os,
    const std::vector<std::pair<std::string, std::string>>& fields) {
    for (const auto& f : fields) os << ' ' << f.first << '=' << f.second;
}

}  // namespace detail

// Machine format: a schema line, one line per record, one summary line.
inline void emit_lines(const RunOutput& out, std::ostream& os) {
    os << "qtsim schema=1";
    detail::emit_pairs(os, out.header);
    os << '\n';
    for (const auto& rec : out.records) {
        os << "record";
        detail::emit_pairs(os, rec.fields);
        os << '\n';
    }
    os << "summary";
    detail::emit_pairs(os, out.summary);
    os << '\n';
}

// Human format: the same schema line, then the records as an aligned table
// and the summary as a key/value block.
inline void emit_table(const RunOutput& out, std::ostream& os) {
    os << "qtsim schema=1";
    detail::emit_pairs(os, out.header);
    os << "\n\n";

    if (!out.records.empty()) {
        const auto& head = out.records.front().fields;
        std::vector<size_t> width(head.size());
        for (size_t c = 0; c < head.size(); ++c)
            width[c] = head[c].first.size();
        for (const auto& rec : out.records)
            for (size_t c = 0; c < rec.fields.size(); ++c)
                width[c] = std::max(width[c], rec.fields[c].second.size());

        const auto pad = [&](const std::string& s, size_t w) {
            return std::string(w - s.size(), ' ') + s;
        };
        for (size_t c = 0; c < head.size(); ++c)
            os << (c ? " | " : "") << pad(head[c].first, width[c]);
        os << '\n';
        for (size_t c = 0; c < head.size(); ++c)
            os << (c ? "-+-" : "") << std::string(width[c], '-');
        os << '\n';
        for (const auto& rec : out.records) {
            for (size_t c = 0; c < rec.fields.size(); ++c)
                os << (c ? " | " : "") << pad(rec.fields[c].second, width[c]);
            os << '\n';
        }
        os << '\n';
    }

    os << "summary\n";
    size_t kw = 0;
    for (const auto& f : out.summary) kw = std::max(kw, f.first.size());
    for (const auto& f : out.summary)
        os << "  " << f.first << std::string(kw - f.first.size(), ' ')
           << " = " << f.second << '\n';
}

inline void emit(const RunOutput& out, const std::string& format,
                 std::ostream& os) {
    if (format == "table")
        emit_table(out, os);
    else
        emit_lines(out, os);
}

}  // namespace qtsim::cli
