#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "llmslice/time.hpp"

namespace llmslice {

// One line of the run event log: "<time_us> <kind> <fields...>".
struct TraceRecord {
    SimTime time = 0;
    std::string kind;
    std::string fields;
};

// Chronological record of a run (dispatch order). The digest is a pure
// function of the rendered lines, which makes reproducibility checkable
// with a single comparison.
class RunTrace {
public:
    void add(SimTime time, std::string kind, std::string fields);

    const std::vector<TraceRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    std::size_t count_kind(const std::string& kind) const;

    void write(std::ostream& out) const;
    std::string digest() const;  // FNV-1a 64 over the rendered log, hex

private:
    std::vector<TraceRecord> records_;
};

}  // namespace llmslice
