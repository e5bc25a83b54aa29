#include "aquacast/calendar.hpp"
#include "aquacast/util.hpp"

#include <istream>
#include <set>
#include <stdexcept>

namespace aquacast {

void HolidayTable::add(Date date, const std::string& name) {
    if (name.empty()) {
        throw std::invalid_argument("holiday name must be non-empty");
    }
    auto [it, inserted] = entries_.emplace(date, name);
    if (!inserted) {
        throw std::invalid_argument("duplicate holiday date " + date.to_string());
    }
}

std::optional<std::string> HolidayTable::lookup(Date date) const {
    auto it = entries_.find(date);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> HolidayTable::names() const {
    std::set<std::string> unique;
    for (const auto& [date, name] : entries_) unique.insert(name);
    return {unique.begin(), unique.end()};
}

HolidayTable load_holidays(std::istream& source) {
    HolidayTable table;
    std::string line;
    size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(source, line)) {
        ++line_no;
        line = strip_cr(line);
        if (!header_seen) {
            header_seen = true;
            if (line != "date,name") {
                throw std::runtime_error("holiday CSV: unexpected header '" + line + "'");
            }
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 2) {
            throw std::runtime_error("holiday CSV: expected 2 fields at line " +
                                     std::to_string(line_no));
        }
        auto date = Date::parse(fields[0]);
        if (!date) {
            throw std::runtime_error("holiday CSV: malformed date at line " +
                                     std::to_string(line_no));
        }
        try {
            table.add(*date, fields[1]);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("holiday CSV: " + std::string(e.what()) +
                                     " at line " + std::to_string(line_no));
        }
    }
    return table;
}

} // namespace aquacast
