// CSV ingestion for price/return panels plus the cleaning rules applied
// before estimation.
#pragma once

#include <string>

#include "dcskeptic/types.hpp"

namespace dcs {

// What to do with holes in the panel before differencing.
struct CleanPolicy {
    enum class Kind { drop_incomplete_rows, forward_fill } kind = Kind::drop_incomplete_rows;
    int max_k = 1;  // forward_fill: longest run of misses carried forward
};

// Reads a CSV panel. Two layouts are accepted, keyed off the header row:
//   wide:  date,TICK1,TICK2,...           (one row per date)
//   long:  date,ticker,value              (one row per observation)
// Dates must be ISO-8601 (YYYY-MM-DD, real calendar dates); rows come back
// sorted by date, long-format tickers sorted alphabetically. Empty and
// NA/NaN cells are missing: InputError naming the ticker and date unless
// allow_missing, in which case they load as NaN for the cleaning step.
// Duplicate dates / (date,ticker) pairs and unparseable numbers raise
// InputError with the offending line number. No quoting support — fields
// must not contain commas.
ReturnPanel load_prices(const std::string& path, bool allow_missing = false);

// Drops or fills missing cells per the policy. forward_fill carries the
// last seen value over runs of at most max_k misses; longer runs and
// leading misses survive, and any row still incomplete afterwards is
// dropped. Row count may shrink; column set never does.
ReturnPanel clean_panel(const ReturnPanel& panel, const CleanPolicy& policy = {});

// clean_panel, then log returns between consecutive kept rows (gaps are
// spliced), then exact column demeaning. InputError on nonpositive prices
// (named) or fewer than two usable rows.
ReturnPanel to_returns(const ReturnPanel& prices, const CleanPolicy& policy = {});

// For panels that already hold returns: clean_panel + exact demeaning,
// no differencing.
ReturnPanel clean_returns(const ReturnPanel& returns, const CleanPolicy& policy = {});

}  // namespace dcs
