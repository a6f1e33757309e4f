#include "llmslice/trace.hpp"

#include <ostream>
#include <sstream>

namespace llmslice {

void RunTrace::add(SimTime time, std::string kind, std::string fields) {
    records_.push_back(TraceRecord{time, std::move(kind), std::move(fields)});
}

std::size_t RunTrace::count_kind(const std::string& kind) const {
    std::size_t count = 0;
    for (const TraceRecord& record : records_) {
        if (record.kind == kind) ++count;
    }
    return count;
}

void RunTrace::write(std::ostream& out) const {
    for (const TraceRecord& record : records_) {
        out << record.time << ' ' << record.kind;
        if (!record.fields.empty()) out << ' ' << record.fields;
        out << '\n';
    }
}

std::string RunTrace::digest() const {
    std::ostringstream rendered;
    write(rendered);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : rendered.str()) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    std::ostringstream hex;
    hex << std::hex << hash;
    return hex.str();
}

}  // namespace llmslice
