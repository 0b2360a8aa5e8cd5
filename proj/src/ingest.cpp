#include "dcskeptic/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace dcs {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

bool valid_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    int y = std::stoi(s.substr(0, 4));
    int m = std::stoi(s.substr(5, 2));
    int d = std::stoi(s.substr(8, 2));
    if (m < 1 || m > 12 || d < 1) return false;
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dmax = days[m - 1] + (m == 2 && leap(y) ? 1 : 0);
    return d <= dmax;
}

bool is_missing(const std::string& f) {
    if (f.empty()) return true;
    std::string low;
    for (char c : f) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return low == "na" || low == "nan";
}

double parse_number(const std::string& f, int line_no) {
    const char* begin = f.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + f.size() || f.empty())
        throw InputError("unparseable number '" + f + "' (line " + std::to_string(line_no) + ")");
    return v;
}

std::string lower(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

ReturnPanel load_prices(const std::string& path, bool allow_missing) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");

    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    // Ignore trailing blank lines but reject interior ones later.
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.size() < 2) throw InputError("'" + path + "': need a header row and data");

    std::vector<std::string> header = split_csv(lines[0]);
    if (header.empty() || lower(header[0]) != "date")
        throw InputError("'" + path + "': first header column must be 'date'");

    const bool long_format = header.size() == 3 && lower(header[1]) == "ticker" &&
                             lower(header[2]) == "value";

    ReturnPanel panel;
    if (!long_format) {
        if (header.size() < 2)
            throw InputError("'" + path + "': wide layout needs at least one ticker column");
        panel.tickers.assign(header.begin() + 1, header.end());
        std::set<std::string> seen_tickers;
        for (const std::string& t : panel.tickers) {
            if (t.empty()) throw InputError("'" + path + "': empty ticker name in header");
            if (!seen_tickers.insert(t).second)
                throw InputError("'" + path + "': duplicate ticker '" + t + "' in header");
        }
        const Eigen::Index p = static_cast<Eigen::Index>(panel.tickers.size());

        struct Row {
            std::string date;
            std::vector<double> values;
            int line_no;
        };
        std::vector<Row> rows;
        std::set<std::string> seen_dates;
        for (std::size_t i = 1; i < lines.size(); ++i) {
            const int line_no = static_cast<int>(i) + 1;
            if (trim(lines[i]).empty())
                throw InputError("blank row (line " + std::to_string(line_no) + ")");
            std::vector<std::string> f = split_csv(lines[i]);
            if (f.size() != header.size())
                throw InputError("expected " + std::to_string(header.size()) + " fields, got " +
                                 std::to_string(f.size()) + " (line " + std::to_string(line_no) +
                                 ")");
            if (!valid_iso_date(f[0]))
                throw InputError("bad date '" + f[0] + "' (line " + std::to_string(line_no) +
                                 "), expected YYYY-MM-DD");
            if (!seen_dates.insert(f[0]).second)
                throw InputError("duplicate date " + f[0] + " (line " + std::to_string(line_no) +
                                 ")");
            Row row{f[0], {}, line_no};
            row.values.reserve(static_cast<std::size_t>(p));
            for (Eigen::Index j = 0; j < p; ++j) {
                const std::string& cell = f[static_cast<std::size_t>(j) + 1];
                if (is_missing(cell)) {
                    if (!allow_missing)
                        throw InputError("missing value for " +
                                         panel.tickers[static_cast<std::size_t>(j)] + " on " +
                                         f[0] + " (line " + std::to_string(line_no) + ")");
                    row.values.push_back(kNaN);
                } else {
                    row.values.push_back(parse_number(cell, line_no));
                }
            }
            rows.push_back(std::move(row));
        }
        std::sort(rows.begin(), rows.end(),
                  [](const Row& a, const Row& b) { return a.date < b.date; });
        panel.values.resize(static_cast<Eigen::Index>(rows.size()), p);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            panel.dates.push_back(rows[i].date);
            for (Eigen::Index j = 0; j < p; ++j)
                panel.values(static_cast<Eigen::Index>(i), j) =
                    rows[i].values[static_cast<std::size_t>(j)];
        }
        return panel;
    }

    // Long layout: collect observations, then pivot.
    std::map<std::string, std::map<std::string, double>> cells;  // date -> ticker -> value
    std::set<std::string> tickers;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int line_no = static_cast<int>(i) + 1;
        if (trim(lines[i]).empty())
            throw InputError("blank row (line " + std::to_string(line_no) + ")");
        std::vector<std::string> f = split_csv(lines[i]);
        if (f.size() != 3)
            throw InputError("expected 3 fields, got " + std::to_string(f.size()) + " (line " +
                             std::to_string(line_no) + ")");
        if (!valid_iso_date(f[0]))
            throw InputError("bad date '" + f[0] + "' (line " + std::to_string(line_no) +
                             "), expected YYYY-MM-DD");
        if (f[1].empty()) throw InputError("empty ticker (line " + std::to_string(line_no) + ")");
        double v;
        if (is_missing(f[2])) {
            if (!allow_missing)
                throw InputError("missing value for " + f[1] + " on " + f[0] + " (line " +
                                 std::to_string(line_no) + ")");
            v = kNaN;
        } else {
            v = parse_number(f[2], line_no);
        }
        auto& row = cells[f[0]];
        if (!row.emplace(f[1], v).second)
            throw InputError("duplicate observation for " + f[1] + " on " + f[0] + " (line " +
                             std::to_string(line_no) + ")");
        tickers.insert(f[1]);
    }
    panel.tickers.assign(tickers.begin(), tickers.end());
    const Eigen::Index p = static_cast<Eigen::Index>(panel.tickers.size());
    panel.values.resize(static_cast<Eigen::Index>(cells.size()), p);
    Eigen::Index i = 0;
    for (const auto& [date, row] : cells) {
        panel.dates.push_back(date);
        for (Eigen::Index j = 0; j < p; ++j) {
            const std::string& tick = panel.tickers[static_cast<std::size_t>(j)];
            auto it = row.find(tick);
            if (it == row.end()) {
                if (!allow_missing)
                    throw InputError("missing value for " + tick + " on " + date);
                panel.values(i, j) = kNaN;
            } else {
                panel.values(i, j) = it->second;
            }
        }
        ++i;
    }
    return panel;
}

ReturnPanel clean_panel(const ReturnPanel& panel, const CleanPolicy& policy) {
    const Eigen::Index t = panel.values.rows(), p = panel.values.cols();
    if (panel.dates.size() != static_cast<std::size_t>(t))
        throw InputError("clean_panel: date index out of step with values");

    Matrix filled = panel.values;
    if (policy.kind == CleanPolicy::Kind::forward_fill) {
        if (policy.max_k < 1) throw InputError("clean_panel: forward_fill needs max_k >= 1");
        for (Eigen::Index j = 0; j < p; ++j) {
            Eigen::Index i = 0;
            while (i < t) {
                if (!std::isnan(filled(i, j))) {
                    ++i;
                    continue;
                }
                Eigen::Index run_end = i;
                while (run_end < t && std::isnan(filled(run_end, j))) ++run_end;
                const Eigen::Index run = run_end - i;
                if (i > 0 && run <= policy.max_k)
                    for (Eigen::Index k = i; k < run_end; ++k) filled(k, j) = filled(i - 1, j);
                i = run_end;
            }
        }
    }

    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < t; ++i) {
        bool complete = true;
        for (Eigen::Index j = 0; j < p; ++j)
            if (std::isnan(filled(i, j))) {
                complete = false;
                break;
            }
        if (complete) keep.push_back(i);
    }

    ReturnPanel out;
    out.tickers = panel.tickers;
    out.values.resize(static_cast<Eigen::Index>(keep.size()), p);
    out.dates.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        out.dates.push_back(panel.dates[static_cast<std::size_t>(keep[i])]);
        out.values.row(static_cast<Eigen::Index>(i)) = filled.row(keep[i]);
    }
    return out;
}

ReturnPanel to_returns(const ReturnPanel& prices, const CleanPolicy& policy) {
    ReturnPanel clean = clean_panel(prices, policy);
    const Eigen::Index t = clean.values.rows(), p = clean.values.cols();
    if (t < 2) throw InputError("to_returns: fewer than two usable rows after cleaning");
    for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            if (!(clean.values(i, j) > 0.0))
                throw InputError("to_returns: nonpositive price for " +
                                 clean.tickers[static_cast<std::size_t>(j)] + " on " +
                                 clean.dates[static_cast<std::size_t>(i)]);

    ReturnPanel out;
    out.tickers = clean.tickers;
    out.dates.assign(clean.dates.begin() + 1, clean.dates.end());
    out.values.resize(t - 1, p);
    for (Eigen::Index i = 1; i < t; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            out.values(i - 1, j) = std::log(clean.values(i, j) / clean.values(i - 1, j));
    for (Eigen::Index j = 0; j < p; ++j)
        out.values.col(j).array() -= out.values.col(j).mean();
    return out;
}

ReturnPanel clean_returns(const ReturnPanel& returns, const CleanPolicy& policy) {
    ReturnPanel out = clean_panel(returns, policy);
    if (out.values.rows() < 2)
        throw InputError("clean_returns: fewer than two usable rows after cleaning");
    for (Eigen::Index j = 0; j < out.values.cols(); ++j)
        out.values.col(j).array() -= out.values.col(j).mean();
    return out;
}

}  // namespace dcs
